//! Relative-motion spectrum of the contact-interacting pair and the
//! conversions between coupling, 1D scattering length and 3D scattering
//! length.
//!
//! The energy relation is `γ̃ = −√2 Γ(3/4 − ε/2) / Γ(1/4 − ε/2)`. Between two
//! consecutive poles of the numerator `γ̃(ε)` increases monotonically from
//! `−∞` to `+∞`, which defines the branches:
//!
//! * branch 0: `ε ∈ (−∞, 3/2)`
//! * branch `n ≥ 1`: `ε ∈ (3/2 + 2(n−1), 3/2 + 2n)`, with `γ̃ = 0` at `1/2 + 2n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma_ratio;

/// `|ζ(1/2)|`.
pub const ZETA_HALF_ABS: f64 = 1.460_354_508_8;

/// Distance from a pole at which bracketing starts.
const POLE_OFFSET: f64 = 1e-9;

/// Relative distance to the resonance below which `gamma_from_a3d` refuses.
const RESONANCE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    /// Dimensionless coupling `γ̃`.
    pub gamma_t: f64,
    /// Dimensionless 1D scattering length, `γ̃ = −1/ã`.
    pub a_t: f64,
    /// `a₃D / l⊥` when the coupling came from a 3D scattering length.
    pub a3d_ratio: Option<f64>,
}

impl InteractionParams {
    pub fn from_gamma(gamma_t: f64) -> Result<Self> {
        if !gamma_t.is_finite() {
            return Err(Error::domain("spectrum", "coupling must be finite"));
        }
        let a_t = if gamma_t == 0.0 {
            f64::INFINITY
        } else {
            -1.0 / gamma_t
        };
        Ok(Self {
            gamma_t,
            a_t,
            a3d_ratio: None,
        })
    }

    pub fn from_scattering_length(a_t: f64) -> Result<Self> {
        if a_t == 0.0 || a_t.is_nan() {
            return Err(Error::domain(
                "spectrum",
                "zero scattering length means infinite coupling",
            ));
        }
        let gamma_t = if a_t.is_infinite() { 0.0 } else { -1.0 / a_t };
        Ok(Self {
            gamma_t,
            a_t,
            a3d_ratio: None,
        })
    }

    /// From `a₃D/l⊥` and the ratio `l∥/l⊥` of the axial and transverse
    /// oscillator lengths.
    pub fn from_a3d(a3d_ratio: f64, length_ratio: f64) -> Result<Self> {
        if !(length_ratio.is_finite() && length_ratio > 0.0) {
            return Err(Error::domain("spectrum", "length ratio must be positive"));
        }
        let g = gamma_from_a3d(a3d_ratio)? * length_ratio;
        let mut p = Self::from_gamma(g)?;
        p.a3d_ratio = Some(a3d_ratio);
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub branch: usize,
    pub gamma_t: f64,
    pub eps_r: f64,
    pub lambda_t: f64,
}

impl SpectralPoint {
    fn new(branch: usize, gamma_t: f64, eps_r: f64) -> Self {
        Self {
            branch,
            gamma_t,
            eps_r,
            lambda_t: eps_r - 0.5,
        }
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Coupling that produces relative energy `eps_r`.
pub fn gamma_of_energy(eps_r: f64) -> Result<f64> {
    if !eps_r.is_finite() {
        return Err(Error::domain("spectrum", "energy must be finite"));
    }
    let a = 0.75 - 0.5 * eps_r;
    let b = 0.25 - 0.5 * eps_r;
    if is_pole(a) {
        return Err(Error::Divergence { eps_r });
    }
    Ok(-std::f64::consts::SQRT_2 * gamma_ratio(a, b)?)
}

/// Open energy interval of a branch; the lower end of branch 0 is `−∞`.
pub fn branch_interval(branch: usize) -> (f64, f64) {
    let hi = 1.5 + 2.0 * branch as f64;
    let lo = if branch == 0 {
        f64::NEG_INFINITY
    } else {
        hi - 2.0
    };
    (lo, hi)
}

/// Relative energy on `branch` for coupling `gamma_t`.
pub fn energy_of_gamma(gamma_t: f64, branch: usize) -> Result<SpectralPoint> {
    if !gamma_t.is_finite() {
        return Err(Error::domain("spectrum", "coupling must be finite"));
    }
    let zero = 0.5 + 2.0 * branch as f64;
    if gamma_t == 0.0 {
        return Ok(SpectralPoint::new(branch, gamma_t, zero));
    }
    let f = |e: f64| gamma_of_energy(e).map(|g| g - gamma_t);
    let (lo, hi) = branch_interval(branch);
    let eps = if gamma_t > 0.0 {
        let hi = pole_side(hi, -1.0, gamma_t, &f)?;
        brent(&f, zero, hi, gamma_t)?
    } else if branch > 0 {
        let lo = pole_side(lo, 1.0, gamma_t, &f)?;
        brent(&f, lo, zero, gamma_t)?
    } else {
        // ε = 1/2 − e^u maps the unbounded attractive side onto u ∈ ℝ
        let g = |u: f64| f(0.5 - u.exp());
        let u_lo = POLE_OFFSET.ln();
        let mut u_hi = (gamma_t * gamma_t + 2.0).ln();
        let mut tries = 0;
        while g(u_hi)? > 0.0 {
            u_hi += 1.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::Bracketing {
                    target: gamma_t,
                    lo: f64::NEG_INFINITY,
                    hi: zero,
                    f_lo: g(u_hi)?,
                    f_hi: g(u_lo)?,
                });
            }
        }
        // γ̃ decreases in u, so flip the sign to keep the bracket increasing
        let neg = |u: f64| g(u).map(|v| -v);
        if neg(u_lo)? > 0.0 {
            // target between 0 and γ̃(1/2 − 1e-9): finish in ε directly
            brent(&f, 0.5 - POLE_OFFSET, zero, gamma_t)?
        } else {
            let u = brent(&neg, u_lo, u_hi, gamma_t)?;
            0.5 - u.exp()
        }
    };
    Ok(SpectralPoint::new(branch, gamma_t, eps))
}

// Moves an endpoint off a pole until the residual there has the sign needed
// for a bracket (`dir` points into the interval).
fn pole_side(pole: f64, dir: f64, target: f64, f: &impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut off = POLE_OFFSET;
    loop {
        let x = pole + dir * off;
        let v = f(x)?;
        if v * dir < 0.0 {
            return Ok(x);
        }
        off *= 1e-2;
        if off < 4.0 * f64::EPSILON * pole.abs().max(1.0) {
            return Err(Error::Bracketing {
                target,
                lo: pole.min(x),
                hi: pole.max(x),
                f_lo: v,
                f_hi: v,
            });
        }
    }
}

// Brent's method on an increasing bracket f(a) < 0 < f(b).
fn brent(f: &impl Fn(f64) -> Result<f64>, a: f64, b: f64, target: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracketing {
            target,
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NonConvergence {
        module: "spectrum",
        iterations: 200,
        residual: fb,
    })
}

/// Coupling in units of `ħ²/(m l⊥)` for a 3D scattering length `a₃D = r·l⊥`.
pub fn gamma_from_a3d(a3d_ratio: f64) -> Result<f64> {
    if !a3d_ratio.is_finite() {
        return Err(Error::domain("spectrum", "a3d ratio must be finite"));
    }
    let denom = 1.0 - ZETA_HALF_ABS * a3d_ratio;
    if denom.abs() < RESONANCE_TOL {
        return Err(Error::Resonance { ratio: a3d_ratio });
    }
    Ok(2.0 * a3d_ratio / denom)
}
