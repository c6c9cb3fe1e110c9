//! Panda-D: the voltage-adaptive variant. Instead of assuming a known
//! harvesting rate, each node reads its storage-capacitor voltage at sleep
//! entry, maps it to a desired spend rate, and picks the sleep mean that makes
//! its own cycle consume exactly that much.

use serde::Serialize;

use crate::model::{NetworkParams, RadioProfile};
use crate::optimizer::{pca, PcaSettings};
use crate::{Error, Result};

/// Lower edge of the law's voltage domain; also the hardware cutoff voltage.
pub const V_FLOOR: f64 = 3.6;
/// Voltage at which the desired power equals the budget estimate.
pub const V_ANCHOR: f64 = 3.8;
/// Upper edge of the law's voltage domain (capacitor rating).
pub const V_CEIL: f64 = 4.0;
/// Desired power at the floor voltage (mW): a trickle that keeps the node
/// probing instead of stalling.
pub const P_FLOOR: f64 = 0.01;

/// The voltage -> sleep-mean law. Linear desired-power ramp anchored at
/// `(3.6 V, 0.01 mW)` and `(3.8 V, p_budget_est)`, clamped to
/// `[3.6 V, 4.0 V]`; the sleep mean then solves the node's own cycle-power
/// equation for that target.
#[derive(Debug, Clone, Copy)]
pub struct PandaDLaw {
    /// Active-cycle energy `P_rx*l + P_tx*M + C_sr + C_ts` (uJ).
    cycle_energy: f64,
    /// Active-cycle duration `l + M` (ms).
    cycle_active: f64,
    /// Desired-power slope `(p_budget_est - P_FLOOR) / (V_ANCHOR - V_FLOOR)`.
    slope: f64,
    listen: f64,
}

/// The law rewritten as `sleep_mean = scale / (v - v_offset) - active`, the
/// form convenient for firmware tables.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LawCoefficients {
    /// ms*V
    pub scale: f64,
    /// V
    pub v_offset: f64,
    /// ms
    pub active: f64,
}

impl PandaDLaw {
    /// Build the law for a radio and budget estimate with an explicit listen
    /// window.
    pub fn new(radio: &RadioProfile, p_budget_est: f64, listen: f64) -> Result<Self> {
        radio.validate()?;
        if !(p_budget_est > P_FLOOR) {
            return Err(Error::InvalidParameter(format!(
                "p_budget_est must exceed the {P_FLOOR} mW floor for the ramp to increase, got {p_budget_est}"
            )));
        }
        if !(listen >= 0.0) {
            return Err(Error::InvalidParameter("listen must be >= 0".into()));
        }
        Ok(Self {
            cycle_energy: radio.p_rx * listen + radio.p_tx * radio.msg_dur + radio.c_sr + radio.c_ts,
            cycle_active: listen + radio.msg_dur,
            slope: (p_budget_est - P_FLOOR) / (V_ANCHOR - V_FLOOR),
            listen,
        })
    }

    /// Build the law with the listen window frozen at the two-node
    /// configuration-search value, the intended deployment recipe: pairwise
    /// discovery is the floor case, and larger cliques only discover faster.
    pub fn derive(radio: &RadioProfile, p_budget_est: f64) -> Result<Self> {
        let net = NetworkParams::new(2, p_budget_est)?;
        let sol = pca(radio, &net, &PcaSettings::default())?;
        Self::new(radio, p_budget_est, sol.config.listen)
    }

    pub fn listen(&self) -> f64 {
        self.listen
    }

    /// Desired spend rate at capacitor voltage `v` (mW) and whether `v` was
    /// outside the law's domain and got clamped.
    pub fn desired_power(&self, v: f64) -> (f64, bool) {
        let clamped = v.clamp(V_FLOOR, V_CEIL);
        (P_FLOOR + self.slope * (clamped - V_FLOOR), clamped != v)
    }

    /// Mean sleep duration (ms) tracking the desired power:
    /// `1/lambda = cycle_energy / P_des - (l + M)`. Returns `f64::INFINITY`
    /// when the target power is not positive (park the node).
    pub fn sleep_mean_from_voltage(&self, v: f64) -> f64 {
        let (p_des, _) = self.desired_power(v);
        if p_des <= 0.0 {
            return f64::INFINITY;
        }
        self.cycle_energy / p_des - self.cycle_active
    }

    pub fn coefficients(&self) -> LawCoefficients {
        LawCoefficients {
            scale: self.cycle_energy / self.slope,
            v_offset: V_FLOOR - P_FLOOR / self.slope,
            active: self.cycle_active,
        }
    }
}

/// Discovery rate over one directional link between nodes with different
/// sleep rates (per second): node `i` transmits first with probability
/// `lambda_i/(lambda_i+lambda_j)`, node `j` catches the window with
/// probability `1 - e^(-lambda_j*l)`, and the pair renews every
/// `1/(lambda_i+lambda_j) + l + M` ms. First-order model for heterogeneous
/// neighbors; ignores third-party interference.
pub fn link_rate_approx(lambda_i: f64, lambda_j: f64, listen: f64, msg_dur: f64) -> f64 {
    let sum = lambda_i + lambda_j;
    let catch = crate::model::one_minus_exp_neg(lambda_j * listen);
    1000.0 * (lambda_i / sum) * catch / (1.0 / sum + listen + msg_dur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::reference_radio;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn ramp_hits_its_anchors_and_clamps() {
        let law = PandaDLaw::new(&reference_radio(), 0.15, 2.0643).unwrap();
        assert!(close(law.desired_power(V_FLOOR).0, P_FLOOR, 1e-12));
        assert!(close(law.desired_power(V_ANCHOR).0, 0.15, 1e-12));
        assert!(close(law.desired_power(V_CEIL).0, 0.29, 1e-12));
        let (p, clamped) = law.desired_power(3.2);
        assert!(clamped && close(p, P_FLOOR, 1e-12));
        let (p, clamped) = law.desired_power(4.4);
        assert!(clamped && close(p, 0.29, 1e-12));
        // Monotone over the domain.
        let mut prev = 0.0;
        for i in 0..=40 {
            let v = V_FLOOR + (V_CEIL - V_FLOOR) * i as f64 / 40.0;
            let (p, _) = law.desired_power(v);
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn sleep_mean_follows_the_cycle_power_identity() {
        let radio = reference_radio();
        let law = PandaDLaw::new(&radio, 0.15, 2.0643).unwrap();
        for v in [3.65, 3.8, 3.95] {
            let mean = law.sleep_mean_from_voltage(v);
            let (p_des, _) = law.desired_power(v);
            let cycle = mean + law.listen() + radio.msg_dur;
            let spent = (radio.p_rx * law.listen()
                + radio.p_tx * radio.msg_dur
                + radio.c_sr
                + radio.c_ts)
                / cycle;
            assert!(close(spent, p_des, 1e-12), "v={v}: {spent} vs {p_des}");
        }
    }

    #[test]
    fn coefficients_match_the_reference_firmware_constants() {
        let law = PandaDLaw::derive(&reference_radio(), 0.15).unwrap();
        let c = law.coefficients();
        assert!(close(c.scale, 382.2238, 1e-3), "scale {}", c.scale);
        assert!(close(c.v_offset, 3.5857, 1e-3), "v_offset {}", c.v_offset);
        assert!(close(c.active, 2.9843, 1e-3), "active {}", c.active);
        // Endpoint sleep means: 26.75 s at the floor, 0.92 s at the ceiling.
        assert!(close(law.sleep_mean_from_voltage(V_FLOOR), 26_750.0, 1e-2));
        assert!(close(law.sleep_mean_from_voltage(V_CEIL), 920.0, 1e-2));
        // Both forms of the law agree.
        for v in [3.6, 3.7, 3.85, 4.0] {
            let direct = law.sleep_mean_from_voltage(v);
            let via_coeff = c.scale / (v - c.v_offset) - c.active;
            assert!(close(direct, via_coeff, 1e-12));
        }
    }

    #[test]
    fn rejects_budget_below_the_floor() {
        assert!(PandaDLaw::new(&reference_radio(), 0.01, 2.0).is_err());
        assert!(PandaDLaw::new(&reference_radio(), 0.005, 2.0).is_err());
    }

    #[test]
    fn link_rate_matches_hand_value_and_symmetry() {
        // Hand-evaluated at (1/1777.2, 1/7542.6, l=2.0643, M=0.92).
        let rate = link_rate_approx(1.0 / 1777.2, 1.0 / 7542.6, 2.0643, 0.92);
        assert!(close(rate, 1.5366e-4, 1e-3), "rate {rate}");
        // Equal rates reduce to half the shared-rate pair formula.
        let lam = 1.0 / 1000.0;
        let sym = link_rate_approx(lam, lam, 2.0, 0.92);
        let catch = 1.0 - (-lam * 2.0f64).exp();
        let pair = 1000.0 * 0.5 * catch / (1.0 / (2.0 * lam) + 2.0 + 0.92);
        assert!(close(sym, pair, 1e-12));
    }
}
