//! Bundled expected values for the `tables` self-check, with the tolerances
//! the check enforces. Values are the published reference-radio operating
//! points; the rate columns carry 2-4 significant digits, hence the relative
//! gates.

/// (n, p_budget, sleep_mean_ms, listen_ms, duty_pct, rate_per_s)
pub const TABLE3: [(u32, f64, f64, f64, f64, f64); 9] = [
    (3, 0.15, 1778.68, 2.066, 0.168, 0.0039),
    (3, 0.3, 887.39, 2.070, 0.336, 0.0156),
    (3, 0.5, 530.88, 2.075, 0.561, 0.0434),
    (5, 0.15, 1777.18, 2.068, 0.168, 0.0130),
    (5, 0.3, 885.91, 2.075, 0.337, 0.0519),
    (5, 0.5, 529.43, 2.084, 0.564, 0.1443),
    (10, 0.15, 1773.49, 2.075, 0.169, 0.0584),
    (10, 0.3, 882.32, 2.089, 0.340, 0.2332),
    (10, 0.5, 525.97, 2.107, 0.572, 0.6470),
];

/// (n, p_budget, busy-wake probability, energy_uj per renewal, pct of budget)
pub const APPENDIX_A: [(u32, f64, f64, f64, f64); 9] = [
    (3, 0.15, 0.34e-3, 0.0302, 0.034),
    (3, 0.3, 0.69e-3, 0.0605, 0.068),
    (3, 0.5, 1.15e-3, 0.1010, 0.112),
    (5, 0.15, 0.41e-3, 0.0363, 0.068),
    (5, 0.3, 0.83e-3, 0.0728, 0.135),
    (5, 0.5, 1.38e-3, 0.1215, 0.223),
    (10, 0.15, 0.47e-3, 0.0410, 0.151),
    (10, 0.3, 0.94e-3, 0.0822, 0.300),
    (10, 0.5, 1.57e-3, 0.1376, 0.495),
];

/// (n, p_budget, rate with switching costs, rate with them zeroed, power_mw
/// actually drawn by the zero-cost configuration on the real radio)
pub const APPENDIX_B: [(u32, f64, f64, f64, f64); 9] = [
    (3, 0.15, 0.0039, 0.010, 0.26),
    (3, 0.3, 0.0156, 0.038, 0.52),
    (3, 0.5, 0.0434, 0.107, 0.86),
    (5, 0.15, 0.0130, 0.032, 0.26),
    (5, 0.3, 0.0519, 0.128, 0.52),
    (5, 0.5, 0.1440, 0.359, 0.87),
    (10, 0.15, 0.0584, 0.144, 0.26),
    (10, 0.3, 0.2330, 0.581, 0.52),
    (10, 0.5, 0.6470, 1.630, 0.87),
];

/// Relative gate on sleep mean, listen window, and rates in tables3.csv.
pub const TOL_T3_REL: f64 = 0.02;
/// Absolute gate on the duty-cycle column, percentage points.
pub const TOL_T3_DUTY_PP: f64 = 0.005;
/// Relative gate on every appendix column; those tables print 2-3
/// significant digits.
pub const TOL_APPENDIX_REL: f64 = 0.05;
