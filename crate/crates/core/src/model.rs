//! Renewal model for a clique of Panda nodes.
//!
//! A renewal starts with every node asleep and ends when the first node to
//! wake, listen idle for `l` ms, and seize the channel finishes its `M`-ms
//! broadcast. With `n` nodes sleeping at rate `lambda`, the first wake takes
//! `1/(n*lambda)` ms in expectation, so a renewal lasts
//! `rho = 1/(n*lambda) + l + M`. Per renewal a node is the transmitter with
//! probability `1/n` and a receiver with probability `(1-e^(-lambda*l))(n-1)/n`
//! (it must wake inside the transmitter's listen window); otherwise it sleeps
//! through and spends nothing.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Measured radio characteristics. Power in mW, durations in ms, switching
/// costs in uJ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioProfile {
    /// Transmit-state power draw.
    pub p_tx: f64,
    /// Listen/receive-state power draw.
    pub p_rx: f64,
    /// Sleep-state power draw. Treated as a constant floor: the optimizer
    /// subtracts it from the budget rather than carrying it through the
    /// per-state terms.
    pub p_sleep: f64,
    /// Discovery-message duration `M`.
    pub msg_dur: f64,
    /// Sleep -> listen switching energy.
    pub c_sr: f64,
    /// Listen -> sleep switching energy.
    pub c_rs: f64,
    /// Sleep -> transmit switching energy (unmeasured on the reference board;
    /// defaults to `c_sr`).
    pub c_st: f64,
    /// Transmit -> sleep switching energy.
    pub c_ts: f64,
    /// Clear-channel-assessment duration for a wake that finds the channel
    /// busy. Zero on the reference board (detection is effectively instant).
    pub t_cca: f64,
}

impl RadioProfile {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_tx", self.p_tx),
            ("p_rx", self.p_rx),
            ("p_sleep", self.p_sleep),
            ("msg_dur", self.msg_dur),
            ("c_sr", self.c_sr),
            ("c_rs", self.c_rs),
            ("c_st", self.c_st),
            ("c_ts", self.c_ts),
            ("t_cca", self.t_cca),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "radio.{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.msg_dur <= 0.0 {
            return Err(Error::InvalidParameter(
                "radio.msg_dur must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Network-level givens: clique size and per-node power budget (mW), the
/// long-run average a node may spend (for harvesters, the harvesting rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub n: u32,
    pub p_budget: f64,
}

impl NetworkParams {
    pub fn new(n: u32, p_budget: f64) -> Result<Self> {
        let params = Self { n, p_budget };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("network.n must be >= 1".into()));
        }
        if !self.p_budget.is_finite() || self.p_budget <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "network.p_budget must be positive, got {}",
                self.p_budget
            )));
        }
        Ok(())
    }
}

/// A node's protocol knobs: sleep rate `lambda` (1/ms) and listen window `l`
/// (ms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PandaConfig {
    pub lambda: f64,
    pub listen: f64,
}

impl PandaConfig {
    pub fn new(lambda: f64, listen: f64) -> Result<Self> {
        let cfg = Self { lambda, listen };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Convenience constructor from the mean sleep duration in ms.
    pub fn from_sleep_mean(sleep_mean: f64, listen: f64) -> Result<Self> {
        Self::new(1.0 / sleep_mean, listen)
    }

    /// Mean sleep duration `1/lambda` in ms.
    pub fn sleep_mean(&self) -> f64 {
        1.0 / self.lambda
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "config.lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !self.listen.is_finite() || self.listen < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "config.listen must be >= 0, got {}",
                self.listen
            )));
        }
        Ok(())
    }
}

/// Everything the renewal analysis says about one (config, radio, network)
/// triple.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RenewalMetrics {
    /// Expected renewal duration (ms).
    pub rho: f64,
    /// Expected idle listen before the transmission starts, receiver side (ms).
    pub chi: f64,
    /// Expected receivers per renewal.
    pub exp_receivers: f64,
    /// Network discovery rate (discoveries per second).
    pub rate: f64,
    /// Fraction of a node's own cycle spent with the radio on.
    pub duty: f64,
    /// Transmitter-role energy per renewal (uJ).
    pub eta_tx: f64,
    /// Receiver-role energy per renewal (uJ).
    pub eta_rx: f64,
    /// Expected per-node probing power (mW): transmitter role.
    pub phi_tx: f64,
    /// Expected per-node discovery power (mW): receiver role.
    pub phi_rx: f64,
}

/// Numerically stable `1 - e^(-x)`.
#[inline]
pub(crate) fn one_minus_exp_neg(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// Expected renewal duration `rho = 1/(n*lambda) + l + M` in ms.
pub fn renewal_duration(cfg: &PandaConfig, radio: &RadioProfile, n: u32) -> f64 {
    1.0 / (cfg.lambda * n as f64) + cfg.listen + radio.msg_dur
}

/// Expected idle listen `chi` (ms): how long a node that will become a
/// receiver listens before the transmission starts. This is the mean of an
/// Exp(lambda) variable conditioned below `l`, measured from the window's end:
/// `chi = 1/lambda - l*e^(-lambda*l) / (1 - e^(-lambda*l))`.
pub fn expected_idle_listen(cfg: &PandaConfig) -> f64 {
    let l = cfg.listen;
    if l == 0.0 {
        return 0.0;
    }
    let x = cfg.lambda * l;
    if x < 1e-6 {
        // Series of l*(1/x - 1/(e^x - 1)); the closed form cancels
        // catastrophically for small x.
        l * (0.5 - x / 12.0 + x * x * x / 720.0)
    } else {
        1.0 / cfg.lambda - l * (-x).exp() / one_minus_exp_neg(x)
    }
}

/// Expected number of receivers per renewal: `(n-1)(1 - e^(-lambda*l))`.
pub fn expected_receivers(cfg: &PandaConfig, n: u32) -> f64 {
    (n as f64 - 1.0) * one_minus_exp_neg(cfg.lambda * cfg.listen)
}

/// Network discovery rate in discoveries per second.
pub fn discovery_rate(cfg: &PandaConfig, radio: &RadioProfile, n: u32) -> f64 {
    1000.0 * expected_receivers(cfg, n) / renewal_duration(cfg, radio, n)
}

/// Fraction of a node's own sleep-listen-transmit cycle spent with the radio
/// on: `(l + M) / (1/lambda + l + M)`.
pub fn duty_cycle(cfg: &PandaConfig, radio: &RadioProfile) -> f64 {
    let active = cfg.listen + radio.msg_dur;
    active / (1.0 / cfg.lambda + active)
}

/// Per-renewal energy (uJ) for the two active roles: transmitter
/// (`eta_tx = C_sr + P_rx*l + P_tx*M + C_ts`) and receiver
/// (`eta_rx = C_sr + P_rx*(chi + M) + C_rs`). A node that sleeps through the
/// renewal spends nothing beyond the sleep floor.
pub fn energy_per_role(cfg: &PandaConfig, radio: &RadioProfile) -> (f64, f64) {
    let eta_tx = radio.c_sr + radio.p_rx * cfg.listen + radio.p_tx * radio.msg_dur + radio.c_ts;
    let eta_rx = radio.c_sr + radio.p_rx * (expected_idle_listen(cfg) + radio.msg_dur) + radio.c_rs;
    (eta_tx, eta_rx)
}

/// Expected per-node power (mW) split by role: `phi_tx` is the probing power
/// (the node transmits, probability `1/n`), `phi_rx` the discovery power (the
/// node receives, probability `(1-e^(-lambda*l))(n-1)/n`). Each is
/// `Pr(role) * eta_role / rho`.
pub fn power_split(cfg: &PandaConfig, radio: &RadioProfile, n: u32) -> (f64, f64) {
    let nf = n as f64;
    let rho = renewal_duration(cfg, radio, n);
    let (eta_tx, eta_rx) = energy_per_role(cfg, radio);
    let pr_tx = 1.0 / nf;
    let pr_rx = one_minus_exp_neg(cfg.lambda * cfg.listen) * (nf - 1.0) / nf;
    (pr_tx * eta_tx / rho, pr_rx * eta_rx / rho)
}

/// Total expected per-node power (mW), excluding the sleep floor.
pub fn power_consumption(cfg: &PandaConfig, radio: &RadioProfile, n: u32) -> f64 {
    let (phi_tx, phi_rx) = power_split(cfg, radio, n);
    phi_tx + phi_rx
}

/// The one second-order effect the role split ignores: a node that wakes while
/// a transmission is in the air performs a brief clear-channel assessment and
/// goes straight back to sleep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdleExtension {
    /// Probability a given node performs such a wake during a renewal:
    /// `(n-1)/n * e^(-lambda*l) * (1 - e^(-lambda*M))`.
    pub probability: f64,
    /// Expected energy per renewal (uJ): `probability * (C_sr + P_rx*t_cca + C_rs)`.
    pub energy: f64,
    /// That energy as a fraction of the power budget.
    pub budget_fraction: f64,
}

/// Busy-wake (CCA) cost per renewal. The node must have slept through the
/// listen window and then woken inside the message window.
pub fn idle_extension(cfg: &PandaConfig, radio: &RadioProfile, net: &NetworkParams) -> IdleExtension {
    let nf = net.n as f64;
    let probability = (nf - 1.0) / nf
        * (-cfg.lambda * cfg.listen).exp()
        * one_minus_exp_neg(cfg.lambda * radio.msg_dur);
    let per_event = radio.c_sr + radio.p_rx * radio.t_cca + radio.c_rs;
    let energy = probability * per_event;
    let rho = renewal_duration(cfg, radio, net.n);
    IdleExtension {
        probability,
        energy,
        budget_fraction: energy / rho / net.p_budget,
    }
}

/// Assemble the full renewal picture for one configuration.
pub fn renewal_metrics(cfg: &PandaConfig, radio: &RadioProfile, net: &NetworkParams) -> RenewalMetrics {
    let (eta_tx, eta_rx) = energy_per_role(cfg, radio);
    let (phi_tx, phi_rx) = power_split(cfg, radio, net.n);
    RenewalMetrics {
        rho: renewal_duration(cfg, radio, net.n),
        chi: expected_idle_listen(cfg),
        exp_receivers: expected_receivers(cfg, net.n),
        rate: discovery_rate(cfg, radio, net.n),
        duty: duty_cycle(cfg, radio),
        eta_tx,
        eta_rx,
        phi_tx,
        phi_rx,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::reference_radio;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn renewal_duration_matches_hand_values() {
        let radio = reference_radio();
        let cfg = PandaConfig::from_sleep_mean(1778.68, 2.066).unwrap();
        assert!(close(renewal_duration(&cfg, &radio, 3), 595.879, 1e-5));
        let cfg = PandaConfig::from_sleep_mean(525.97, 2.107).unwrap();
        assert!(close(renewal_duration(&cfg, &radio, 10), 55.624, 1e-4));
    }

    #[test]
    fn idle_listen_matches_quadrature() {
        // Numerically integrating P(wait > t) for the conditioned exponential
        // gives 0.1999091960 at lambda*l = 10 (lambda = 5, l = 2).
        let cfg = PandaConfig::new(5.0, 2.0).unwrap();
        assert!(close(expected_idle_listen(&cfg), 0.199_909_196_0, 1e-9));
        // And 1.0370949904 at the (n=5, 885.91, 2.075) operating point.
        let cfg = PandaConfig::from_sleep_mean(885.91, 2.075).unwrap();
        assert!(close(expected_idle_listen(&cfg), 1.037_094_990_4, 1e-9));
    }

    #[test]
    fn idle_listen_series_agrees_with_closed_form() {
        // Around the series/closed-form switchover the two evaluations must
        // agree far beyond the model tolerances.
        for &x in &[1e-4_f64, 1e-5, 2e-6, 1e-6, 9e-7] {
            let l = 2.0;
            let lambda = x / l;
            let series = l * (0.5 - x / 12.0 + x * x * x / 720.0);
            let closed = 1.0 / lambda - l * (-x).exp() / one_minus_exp_neg(x);
            assert!(
                close(series, closed, 1e-9),
                "x={x}: series {series} vs closed {closed}"
            );
            let cfg = PandaConfig::new(lambda, l).unwrap();
            let chi = expected_idle_listen(&cfg);
            assert!(close(chi, series, 1e-9));
        }
    }

    #[test]
    fn idle_listen_limits() {
        // l -> 0 kills the idle wait entirely.
        let cfg = PandaConfig::new(0.01, 0.0).unwrap();
        assert_eq!(expected_idle_listen(&cfg), 0.0);
        // lambda*l -> 0: a receiver's wake point is uniform in the window, so
        // the expected wait tends to l/2.
        let cfg = PandaConfig::new(1e-12, 2.0).unwrap();
        assert!(close(expected_idle_listen(&cfg), 1.0, 1e-9));
        // lambda*l large: conditioning pins the wake near the window start,
        // chi -> 1/lambda.
        let cfg = PandaConfig::new(50.0, 2.0).unwrap();
        assert!(close(expected_idle_listen(&cfg), 1.0 / 50.0, 1e-9));
    }

    #[test]
    fn role_energies_match_hand_values() {
        let radio = reference_radio();
        // eta_tx = 74.36 + 64.85*2.066 + 59.23*0.92 + 4.83
        let cfg = PandaConfig::from_sleep_mean(1778.68, 2.066).unwrap();
        let (eta_tx, _) = energy_per_role(&cfg, &radio);
        assert!(close(eta_tx, 267.6617, 1e-6));
        // eta_rx at the (n=5, p_b=0.3) operating point; chi = 1.0370949904.
        let cfg = PandaConfig::from_sleep_mean(885.91, 2.075).unwrap();
        let (_, eta_rx) = energy_per_role(&cfg, &radio);
        assert!(close(eta_rx, 214.757_610_13, 1e-8));
    }

    #[test]
    fn single_node_never_discovers() {
        let radio = reference_radio();
        let cfg = PandaConfig::new(0.001, 2.0).unwrap();
        assert_eq!(expected_receivers(&cfg, 1), 0.0);
        assert_eq!(discovery_rate(&cfg, &radio, 1), 0.0);
        let (_, phi_rx) = power_split(&cfg, &radio, 1);
        assert_eq!(phi_rx, 0.0);
    }

    #[test]
    fn zero_listen_never_discovers_but_still_spends() {
        let radio = reference_radio();
        let cfg = PandaConfig::new(0.001, 0.0).unwrap();
        assert_eq!(discovery_rate(&cfg, &radio, 5), 0.0);
        let (phi_tx, phi_rx) = power_split(&cfg, &radio, 5);
        assert!(phi_tx > 0.0);
        assert_eq!(phi_rx, 0.0);
    }

    #[test]
    fn duty_cycle_matches_published_column() {
        // (sleep mean, listen, duty %) triples for the reference hardware.
        let rows = [
            (1778.68, 2.066, 0.168),
            (887.39, 2.070, 0.336),
            (530.88, 2.075, 0.561),
            (1777.18, 2.068, 0.168),
            (885.91, 2.075, 0.337),
            (529.43, 2.084, 0.564),
            (1773.49, 2.075, 0.169),
            (882.32, 2.089, 0.340),
            (525.97, 2.107, 0.572),
        ];
        let radio = reference_radio();
        for (sleep, listen, duty_pct) in rows {
            let cfg = PandaConfig::from_sleep_mean(sleep, listen).unwrap();
            let duty = duty_cycle(&cfg, &radio) * 100.0;
            assert!(
                (duty - duty_pct).abs() < 5e-4,
                "sleep={sleep}: duty {duty:.4}% vs {duty_pct}%"
            );
        }
    }

    #[test]
    fn power_split_and_consumption_agree() {
        let radio = reference_radio();
        let net = NetworkParams::new(5, 0.3).unwrap();
        let cfg = PandaConfig::from_sleep_mean(885.91, 2.075).unwrap();
        let (phi_tx, phi_rx) = power_split(&cfg, &radio, net.n);
        let total = power_consumption(&cfg, &radio, net.n);
        assert_eq!(total, phi_tx + phi_rx);
        // The published configs sit essentially on the budget.
        assert!(close(total, 0.3, 2e-3), "total {total}");
    }

    #[test]
    fn busy_wake_cost_matches_hand_values() {
        let radio = reference_radio();
        // Hand-computed on the (n, p_b) operating grid; the correction stays
        // three orders of magnitude under the budget.
        let rows = [
            (3u32, 0.15, 1778.68, 2.066, 3.443e-4, 0.030_24, 3.4e-4),
            (5, 0.3, 885.91, 2.075, 8.284e-4, 0.072_77, 1.35e-3),
            (10, 0.5, 525.97, 2.107, 1.567e-3, 0.137_65, 4.95e-3),
        ];
        for (n, p_b, sleep, listen, prob, energy, frac) in rows {
            let net = NetworkParams::new(n, p_b).unwrap();
            let cfg = PandaConfig::from_sleep_mean(sleep, listen).unwrap();
            let ext = idle_extension(&cfg, &radio, &net);
            assert!(close(ext.probability, prob, 1e-3), "prob {}", ext.probability);
            assert!(close(ext.energy, energy, 1e-3), "energy {}", ext.energy);
            assert!(close(ext.budget_fraction, frac, 1e-2), "frac {}", ext.budget_fraction);
        }
    }

    #[test]
    fn metrics_bundle_is_consistent() {
        let radio = reference_radio();
        let net = NetworkParams::new(10, 0.5).unwrap();
        let cfg = PandaConfig::from_sleep_mean(525.97, 2.107).unwrap();
        let m = renewal_metrics(&cfg, &radio, &net);
        assert_eq!(m.rho, renewal_duration(&cfg, &radio, net.n));
        assert_eq!(m.phi_tx + m.phi_rx, power_consumption(&cfg, &radio, net.n));
        assert!(m.rate > 0.0 && m.duty > 0.0 && m.chi > 0.0);
        assert!(m.exp_receivers < net.n as f64 - 1.0);
    }

    #[test]
    fn validation_rejects_nonsense() {
        assert!(PandaConfig::new(0.0, 1.0).is_err());
        assert!(PandaConfig::new(f64::NAN, 1.0).is_err());
        assert!(PandaConfig::new(0.001, -1.0).is_err());
        assert!(NetworkParams::new(0, 0.3).is_err());
        assert!(NetworkParams::new(5, 0.0).is_err());
        let mut radio = reference_radio();
        radio.msg_dur = 0.0;
        assert!(radio.validate().is_err());
        radio.msg_dur = 0.92;
        radio.c_sr = -1.0;
        assert!(radio.validate().is_err());
    }
}
