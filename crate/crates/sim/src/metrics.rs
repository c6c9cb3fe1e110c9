//! What a run produces: the discovery log and everything derivable from it,
//! plus per-node energy accounting and sampled capacitor traces.

use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discovery {
    pub time_ms: f64,
    pub tx: u32,
    pub rx: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub initial_uj: f64,
    pub stored_uj: f64,
    pub harvested_uj: f64,
    pub spilled_uj: f64,
    pub cutoffs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub duration_ms: f64,
    pub discoveries: Vec<Discovery>,
    /// `[rx][tx]` discovery counts; diagonal always zero.
    pub neighbor_table: Vec<Vec<u64>>,
    /// Completed transmissions — in a clique, the number of renewals.
    pub transmissions: u64,
    /// Wakes that found the channel busy and went straight back to sleep.
    pub busy_wakes: u64,
    /// Transmissions started while an adjacent one was in flight. Always zero
    /// in a clique (carrier sense); diagnostic for odd topologies.
    pub collisions: u64,
    /// Receptions lost to overlapping transmissions from hidden terminals.
    pub garbled: u64,
    pub consumed_uj: Vec<f64>,
    /// Capacitor bookkeeping per node; `None` on an unconstrained supply.
    pub ledgers: Vec<Option<EnergyLedger>>,
    /// Sampled `(time_ms, volts)` per node; empty on an unconstrained supply.
    pub voltage_trace: Vec<Vec<(f64, f64)>>,
}

impl SimReport {
    pub fn node_count(&self) -> usize {
        self.neighbor_table.len()
    }

    /// Network-wide discoveries per second.
    pub fn rate_per_s(&self) -> f64 {
        1000.0 * self.discoveries.len() as f64 / self.duration_ms
    }

    /// Directional discoveries per second for one ordered pair.
    pub fn link_rate_per_s(&self, tx: u32, rx: u32) -> f64 {
        1000.0 * self.neighbor_table[rx as usize][tx as usize] as f64 / self.duration_ms
    }

    /// Average consumed power of one node over the whole run, mW.
    pub fn measured_power(&self, node: u32) -> f64 {
        self.consumed_uj[node as usize] / self.duration_ms
    }

    /// Inter-discovery gaps for a directional link; `count - 1` samples.
    pub fn latency_cdf(&self, tx: u32, rx: u32) -> LatencyCdf {
        let mut times: Vec<f64> = self
            .discoveries
            .iter()
            .filter(|d| d.tx == tx && d.rx == rx)
            .map(|d| d.time_ms)
            .collect();
        times.sort_by(f64::total_cmp);
        let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(f64::total_cmp);
        LatencyCdf { gaps }
    }

    /// The discovery log as CSV.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "time_ms,tx_id,rx_id")?;
        for d in &self.discoveries {
            writeln!(w, "{:.3},{},{}", d.time_ms, d.tx, d.rx)?;
        }
        Ok(())
    }
}

/// Empirical latency distribution for one directional link.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyCdf {
    gaps: Vec<f64>,
}

impl LatencyCdf {
    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn mean_ms(&self) -> Option<f64> {
        (!self.gaps.is_empty()).then(|| self.gaps.iter().sum::<f64>() / self.gaps.len() as f64)
    }

    pub fn max_ms(&self) -> Option<f64> {
        self.gaps.last().copied()
    }

    /// Linear-interpolation percentile, `q` in [0, 1]. Fewer than one sample
    /// yields nothing.
    pub fn percentile_ms(&self, q: f64) -> Option<f64> {
        if self.gaps.is_empty() || !(0.0..=1.0).contains(&q) {
            return None;
        }
        let pos = q * (self.gaps.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        Some(self.gaps[lo] * (1.0 - frac) + self.gaps[hi] * frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report_with(discoveries: Vec<Discovery>, n: usize, duration_ms: f64) -> SimReport {
        let mut table = vec![vec![0u64; n]; n];
        for d in &discoveries {
            table[d.rx as usize][d.tx as usize] += 1;
        }
        SimReport {
            duration_ms,
            discoveries,
            neighbor_table: table,
            transmissions: 0,
            busy_wakes: 0,
            collisions: 0,
            garbled: 0,
            consumed_uj: vec![0.0; n],
            ledgers: vec![None; n],
            voltage_trace: vec![Vec::new(); n],
        }
    }

    #[test]
    fn rate_is_log_length_over_duration() {
        let r = report_with(
            vec![
                Discovery { time_ms: 10.0, tx: 0, rx: 1 },
                Discovery { time_ms: 20.0, tx: 1, rx: 0 },
            ],
            2,
            1000.0,
        );
        assert_eq!(r.rate_per_s(), 2.0);
        assert_eq!(r.link_rate_per_s(0, 1), 1.0);
    }

    #[test]
    fn latency_needs_two_discoveries_per_link() {
        let r = report_with(
            vec![
                Discovery { time_ms: 100.0, tx: 0, rx: 1 },
                Discovery { time_ms: 400.0, tx: 0, rx: 1 },
                Discovery { time_ms: 1000.0, tx: 0, rx: 1 },
                Discovery { time_ms: 77.0, tx: 1, rx: 0 },
            ],
            2,
            2000.0,
        );
        let cdf = r.latency_cdf(0, 1);
        assert_eq!(cdf.len(), 2);
        assert_eq!(cdf.percentile_ms(0.0), Some(300.0));
        assert_eq!(cdf.percentile_ms(1.0), Some(600.0));
        assert_eq!(cdf.percentile_ms(0.5), Some(450.0));
        assert_eq!(cdf.mean_ms(), Some(450.0));
        // One discovery gives no gap.
        assert!(r.latency_cdf(1, 0).is_empty());
        assert_eq!(r.latency_cdf(1, 0).percentile_ms(0.5), None);
    }

    #[test]
    fn csv_has_stable_header() {
        let r = report_with(vec![Discovery { time_ms: 1.5, tx: 2, rx: 0 }], 3, 10.0);
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "time_ms,tx_id,rx_id\n1.500,2,0\n");
    }

    #[test]
    fn percentile_rejects_out_of_range() {
        let cdf = LatencyCdf { gaps: vec![1.0, 2.0] };
        assert_eq!(cdf.percentile_ms(1.5), None);
        assert_eq!(cdf.percentile_ms(-0.1), None);
    }
}
