//! Deterministic seed derivation for parallel sweeps: every grid cell gets
//! its own stream no matter how the work is scheduled.

/// One step of splitmix64 (Steele et al.'s SplittableRandom finalizer).
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-cell seed: the master seed and the cell coordinates (node count,
/// budget bits, and a free tag for sub-runs within a cell) are folded through
/// chained splitmix64 steps, so adjacent cells land in unrelated streams and
/// the result is independent of evaluation order.
pub fn cell_seed(master: u64, n: u32, p_budget: f64, tag: u64) -> u64 {
    let mut s = master;
    let mut h = splitmix64(&mut s) ^ u64::from(n);
    let mut h2 = splitmix64(&mut h) ^ p_budget.to_bits();
    let mut h3 = splitmix64(&mut h2) ^ tag;
    splitmix64(&mut h3)
}
