//! Finite-difference checks of the relative wavefunction against the Weber
//! equation `ψ″ + (λ̃ + 1/2 − x²/4) ψ = 0` away from contact, and of the
//! derivative jump the contact term imposes at `x = 0`.
//!
//! Jump condition: with `γ̃` from the energy relation, `ψ_r ∝ D_λ̃(|x|)` and
//! `D′_λ̃(0)/D_λ̃(0) = −√2 Γ(1/2 − λ̃/2)/Γ(−λ̃/2)`. Writing `ε = λ̃ + 1/2` this is
//! `−√2 Γ(3/4 − ε/2)/Γ(1/4 − ε/2) = γ̃`, so
//! `[ψ′(0⁺) − ψ′(0⁻)] / ψ(0) = 2 D′(0)/D(0) = 2γ̃`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::GridSpec;
use crate::spectrum::gamma_of_energy;
use crate::states::ExactState;

/// Excluded half-width around contact, in grid spacings.
pub const EXCLUDED_SPACINGS: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub lambda_t: f64,
    /// `max |ψ″_FD + (λ̃ + 1/2 − x²/4) ψ| / max |ψ|` over the checked nodes.
    pub max_residual: f64,
    /// Node where the maximum occurs.
    pub at: f64,
    pub spacing: f64,
    pub extent: f64,
    /// Nodes with `|x| ≤ excluded_band` are skipped.
    pub excluded_band: f64,
    pub nodes_checked: usize,
}

/// Residual of the normalized relative wavefunction on `grid`.
pub fn relative_ode_residual(lambda_t: f64, grid: GridSpec) -> Result<ResidualReport> {
    let state = ExactState::new(lambda_t, 0)?;
    let h = grid.spacing();
    let xs = grid.nodes();
    let psi: Vec<f64> = xs.iter().map(|&x| state.relative(x)).collect::<Result<_>>()?;
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::domain("verify", "wavefunction vanishes on the grid"));
    }
    let band = EXCLUDED_SPACINGS * h;
    let mut worst = 0.0f64;
    let mut at = f64::NAN;
    let mut checked = 0;
    for i in 1..xs.len() - 1 {
        let x = xs[i];
        if x.abs() <= band {
            continue;
        }
        let d2 = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (h * h);
        let r = (d2 + (lambda_t + 0.5 - 0.25 * x * x) * psi[i]).abs() / scale;
        checked += 1;
        if r > worst {
            worst = r;
            at = x;
        }
    }
    Ok(ResidualReport {
        lambda_t,
        max_residual: worst,
        at,
        spacing: h,
        extent: grid.extent,
        excluded_band: band,
        nodes_checked: checked,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub lambda_t: f64,
    pub gamma_t: f64,
    /// `[ψ′(0⁺) − ψ′(0⁻)] / ψ(0)` from one-sided differences.
    pub measured: f64,
    /// `2γ̃`.
    pub expected: f64,
    /// `|measured − expected| / max(1, |expected|)`.
    pub error: f64,
}

/// Derivative jump at contact from fourth-order one-sided differences with
/// step `h`.
pub fn derivative_jump(lambda_t: f64, h: f64) -> Result<JumpReport> {
    if !(h > 0.0 && h < 0.1) {
        return Err(Error::domain("verify", format!("step {h} outside (0, 0.1)")));
    }
    let state = ExactState::new(lambda_t, 0)?;
    let f = |x: f64| state.relative(x);
    let one_sided = |dir: f64| -> Result<f64> {
        let v: Vec<f64> = (0..5).map(|k| f(dir * k as f64 * h)).collect::<Result<_>>()?;
        Ok(dir * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h))
    };
    let psi0 = f(0.0)?;
    let measured = (one_sided(1.0)? - one_sided(-1.0)?) / psi0;
    let gamma_t = gamma_of_energy(lambda_t + 0.5)?;
    let expected = 2.0 * gamma_t;
    Ok(JumpReport {
        lambda_t,
        gamma_t,
        measured,
        expected,
        error: (measured - expected).abs() / expected.abs().max(1.0),
    })
}
