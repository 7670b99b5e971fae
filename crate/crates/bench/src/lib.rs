//! Shared inputs for the criterion benches.

/// Couplings spanning the attractive side, the free point and the repulsive
/// side of the ground branch.
pub const LAMBDA_SAMPLES: [f64; 4] = [-3.0, -0.5, 0.3, 0.9];

/// Evenly spaced arguments on `[lo, hi]`.
pub fn arguments(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
