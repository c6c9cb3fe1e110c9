//! Capacitor energy accounting. Stored energy follows E = C·V²/2 between a
//! hard ceiling (overflow spills) and the cutoff voltage (the node drops out
//! of its protocol until it recovers). Units: mF, V, µJ, mW (µJ/ms).

use crate::metrics::EnergyLedger;

pub const V_CUTOFF: f64 = 3.6;
pub const V_MAX: f64 = 4.0;
pub const CUTOFF_SLEEP_MS: f64 = 10_000.0;

/// µJ stored at `volts` on a `capacitance_mf` capacitor: 500·C·V².
pub fn stored_at(capacitance_mf: f64, volts: f64) -> f64 {
    500.0 * capacitance_mf * volts * volts
}

/// Compensated accumulator. Runs make hundreds of millions of µJ-scale
/// additions into 1e5-µJ-scale sums; plain f64 drifts past the 1e-6 µJ
/// conservation budget, Kahan stays orders of magnitude under it.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn new(value: f64) -> Self {
        Self { sum: value, carry: 0.0 }
    }

    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn get(&self) -> f64 {
        self.sum
    }

    fn set(&mut self, value: f64) {
        self.sum = value;
        self.carry = 0.0;
    }

    /// Clamp to `limit` and return the exact excess, compensation included.
    /// `sum - limit` is exact by Sterbenz (the clamp only fires with
    /// `limit < sum < 2*limit`), so folding the carry in afterwards keeps the
    /// books balanced to a relative, not absolute, rounding error; naively
    /// spilling `get() - limit` leaks the carry on every clamp, which adds up
    /// over millions of ceiling-riding settles.
    fn drain_above(&mut self, limit: f64) -> f64 {
        let excess = (self.sum - limit) - self.carry;
        self.sum = limit;
        self.carry = 0.0;
        excess
    }
}

#[derive(Debug, Clone)]
pub struct Capacitor {
    capacitance_mf: f64,
    /// Post-efficiency income, µJ/ms.
    income_mw: f64,
    stored: KahanSum,
    initial_uj: f64,
    harvested: KahanSum,
    spilled: KahanSum,
    cutoffs: u64,
    ceiling_uj: f64,
}

impl Capacitor {
    pub fn new(capacitance_mf: f64, harvest_mw: f64, efficiency: f64, v_init: f64) -> Self {
        let stored = stored_at(capacitance_mf, v_init);
        Self {
            capacitance_mf,
            income_mw: harvest_mw * efficiency,
            stored: KahanSum::new(stored),
            initial_uj: stored,
            harvested: KahanSum::default(),
            spilled: KahanSum::default(),
            cutoffs: 0,
            ceiling_uj: stored_at(capacitance_mf, V_MAX),
        }
    }

    pub fn voltage(&self) -> f64 {
        (self.stored.get() / (500.0 * self.capacitance_mf)).sqrt()
    }

    /// Advance the supply over `dt_ms` while the radio draws `draw_mw`:
    /// income accrues, the draw comes out, overflow spills at the ceiling.
    /// The stored floor never engages in practice — the cutoff voltage parks
    /// the node far above empty — but is clamped for physical sanity.
    pub fn settle(&mut self, dt_ms: f64, draw_mw: f64) {
        debug_assert!(dt_ms >= 0.0);
        let income = self.income_mw * dt_ms;
        self.harvested.add(income);
        self.stored.add(income);
        self.stored.add(-draw_mw * dt_ms);
        let level = self.stored.get();
        if level > self.ceiling_uj {
            let excess = self.stored.drain_above(self.ceiling_uj);
            self.spilled.add(excess);
        } else if level < 0.0 {
            self.stored.set(0.0);
        }
    }

    /// One-off switching cost.
    pub fn impulse(&mut self, cost_uj: f64) {
        self.stored.add(-cost_uj);
        if self.stored.get() < 0.0 {
            self.stored.set(0.0);
        }
    }

    pub fn is_cut_off(&self) -> bool {
        self.voltage() <= V_CUTOFF
    }

    pub fn note_cutoff(&mut self) {
        self.cutoffs += 1;
    }

    pub fn ledger(&self) -> EnergyLedger {
        EnergyLedger {
            initial_uj: self.initial_uj,
            stored_uj: self.stored.get(),
            harvested_uj: self.harvested.get(),
            spilled_uj: self.spilled.get(),
            cutoffs: self.cutoffs,
        }
    }
}
