#![allow(dead_code)]

use pairlab_core::quad::composite_rule;
use pairlab_core::specfun::osc_eigenfunction;
use std::f64::consts::FRAC_1_SQRT_2;

/// ∫∫ f(x1, x2) for f symmetric under x1 ↔ x2, integrated in u = (x1+x2)/√2
/// and r = x1 − x2 ≥ 0 so the contact kink sits on the domain boundary.
pub fn integrate_sym(f: impl Fn(f64, f64) -> f64, u_max: f64, r_max: f64, panels: usize) -> f64 {
    let (us, uw) = composite_rule(-u_max, u_max, panels, 16);
    let (rs, rw) = composite_rule(0.0, r_max, panels, 16);
    let mut s = 0.0;
    for (r, wr) in rs.iter().zip(&rw) {
        for (u, wu) in us.iter().zip(&uw) {
            let x1 = u * FRAC_1_SQRT_2 + 0.5 * r;
            let x2 = u * FRAC_1_SQRT_2 - 0.5 * r;
            s += wr * wu * f(x1, x2);
        }
    }
    // both signs of r, Jacobian 1/√2
    2.0 * s * FRAC_1_SQRT_2
}

pub fn permanent(k: usize, m: usize, x1: f64, x2: f64) -> f64 {
    (osc_eigenfunction(k, x1) * osc_eigenfunction(m, x2) + osc_eigenfunction(m, x1) * osc_eigenfunction(k, x2))
        * FRAC_1_SQRT_2
}

/// `S_{k,m}` in ordered coordinates.
pub fn slater_term(k: usize, m: usize, x1: f64, x2: f64) -> f64 {
    let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
    (osc_eigenfunction(k, lo) * osc_eigenfunction(m, hi) - osc_eigenfunction(m, lo) * osc_eigenfunction(k, hi))
        * FRAC_1_SQRT_2
}
