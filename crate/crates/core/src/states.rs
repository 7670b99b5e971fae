//! Two-particle wavefunctions and the two oscillator-basis expansions of the
//! ground branch.
//!
//! Coordinates: `u = (x1+x2)/√2`, `r = x1 − x2`. The exact state is
//! `ψ = 2^{1/4} φ_n(u) · (2/π)^{1/4} √R(λ̃) D_λ̃(|r|)` with
//! `R(λ̃) = Γ(−λ̃) / (Ψ((1−λ̃)/2) − Ψ(−λ̃/2))`.
//!
//! The bosonic-like expansion uses products `φ_n φ_n` and permanents
//! `P_{k,m} = [φ_k(x1)φ_m(x2) + φ_m(x1)φ_k(x2)]/√2` with `k + m` even; the
//! fermionic-like one uses `S_{k,m} = [φ_k(x<)φ_m(x>) − φ_m(x<)φ_k(x>)]/√2` with
//! `k + m` odd, written in the ordered coordinates `x< ≤ x>`.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quad::composite_rule;
use crate::specfun::{digamma_fn, gamma_fn, ln_factorial, osc_eigenfunction, osc_eigenfunctions, parabolic_d, rgamma};

/// Center-of-mass oscillator quantum; contributes `n + 1/2` to the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmQuantum {
    pub n: usize,
}

impl CmQuantum {
    pub fn energy(&self) -> f64 {
        self.n as f64 + 0.5
    }
}

/// `R(λ̃)`, the squared normalization of `D_λ̃(|r|)` up to `(2/π)^{1/2}`.
/// Non-negative integers use the limit `1/(2·n!)`.
pub fn relative_norm_ratio(lambda_t: f64) -> Result<f64> {
    if !lambda_t.is_finite() {
        return Err(Error::domain("states", "lambda must be finite"));
    }
    if lambda_t >= 0.0 && lambda_t == lambda_t.floor() {
        return Ok(0.5 * (-ln_factorial(lambda_t as usize)).exp());
    }
    let num = gamma_fn(-lambda_t)?;
    let den = digamma_fn(0.5 * (1.0 - lambda_t))? - digamma_fn(-0.5 * lambda_t)?;
    let r = num / den;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::domain(
            "states",
            format!("relative normalization not positive at lambda = {lambda_t}"),
        ));
    }
    Ok(r)
}

/// A real two-particle wavefunction that the quadrature oracle can sample.
pub trait Wavefunction: Sync {
    fn eval(&self, x1: f64, x2: f64) -> Result<f64>;

    /// `ψ(xs[i], xs[j])` as a matrix.
    fn tabulate(&self, xs: &[f64]) -> Result<Matrix> {
        let n = xs.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &a) in xs.iter().enumerate() {
            for (j, &b) in xs.iter().enumerate() {
                m.set(i, j, self.eval(a, b)?);
            }
        }
        Ok(m)
    }

    /// True when `ψ(−x1, −x2) = ±ψ(x1, x2)`.
    fn has_definite_parity(&self) -> bool {
        false
    }
}

impl<F> Wavefunction for F
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(self(x1, x2))
    }
}

fn cm_factor(cm_n: usize, x1: f64, x2: f64) -> f64 {
    2f64.powf(0.25) * osc_eigenfunction(cm_n, (x1 + x2) * FRAC_1_SQRT_2)
}

// Tabulates g(x_i + x_j) · h(|x_i − x_j|) on a uniform grid using the 2n − 1
// distinct sums and n distinct separations.
fn tabulate_separable(
    xs: &[f64],
    sum_part: impl Fn(f64) -> f64,
    sep_part: impl Fn(f64) -> Result<f64>,
) -> Option<Result<Matrix>> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    let uniform = xs
        .iter()
        .enumerate()
        .all(|(i, &x)| (x - (xs[0] + i as f64 * h)).abs() <= 1e-12 * (1.0 + x.abs()));
    if !uniform {
        return None;
    }
    let sums: Vec<f64> = (0..2 * n - 1).map(|k| sum_part(2.0 * xs[0] + k as f64 * h)).collect();
    let seps: Result<Vec<f64>> = (0..n).map(|k| sep_part(k as f64 * h)).collect();
    Some(seps.map(|seps| {
        Matrix::from_fn(n, n, |i, j| sums[i + j] * seps[i.abs_diff(j)])
    }))
}

/// Exact eigenstate with relative parameter `λ̃` and CM quantum `cm_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactState {
    pub lambda_t: f64,
    pub cm_n: usize,
    rel_norm: f64,
}

impl ExactState {
    pub fn new(lambda_t: f64, cm_n: usize) -> Result<Self> {
        let r = relative_norm_ratio(lambda_t)?;
        Ok(Self {
            lambda_t,
            cm_n,
            rel_norm: (2.0 / PI).powf(0.25) * r.sqrt(),
        })
    }

    /// Normalized relative factor `ψ_r(r)`.
    pub fn relative(&self, r: f64) -> Result<f64> {
        Ok(self.rel_norm * parabolic_d(self.lambda_t, r.abs())?)
    }
}

impl Wavefunction for ExactState {
    fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(cm_factor(self.cm_n, x1, x2) * self.relative(x1 - x2)?)
    }

    fn tabulate(&self, xs: &[f64]) -> Result<Matrix> {
        let cm = |s: f64| 2f64.powf(0.25) * osc_eigenfunction(self.cm_n, s * FRAC_1_SQRT_2);
        match tabulate_separable(xs, cm, |r| self.relative(r)) {
            Some(m) => m,
            None => default_tabulate(self, xs),
        }
    }

    fn has_definite_parity(&self) -> bool {
        true
    }
}

fn default_tabulate(w: &impl Wavefunction, xs: &[f64]) -> Result<Matrix> {
    let n = xs.len();
    let mut m = Matrix::zeros(n, n);
    for (i, &a) in xs.iter().enumerate() {
        for (j, &b) in xs.iter().enumerate() {
            m.set(i, j, w.eval(a, b)?);
        }
    }
    Ok(m)
}

/// `ψ(x1, x2)` of the exact state.
pub fn eval_psi_exact(x1: f64, x2: f64, lambda_t: f64, cm_n: usize) -> Result<f64> {
    ExactState::new(lambda_t, cm_n)?.eval(x1, x2)
}

/// Infinite-repulsion state: `φ_n(u) φ_l̃(|x1 − x2|/√2)` with odd `l̃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepulsiveState {
    pub l_t: usize,
    pub cm_n: usize,
}

impl RepulsiveState {
    pub fn new(l_t: usize, cm_n: usize) -> Result<Self> {
        if l_t % 2 == 0 {
            return Err(Error::domain("states", format!("relative quantum {l_t} must be odd")));
        }
        Ok(Self { l_t, cm_n })
    }
}

impl Wavefunction for RepulsiveState {
    fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(osc_eigenfunction(self.cm_n, (x1 + x2) * FRAC_1_SQRT_2)
            * osc_eigenfunction(self.l_t, (x1 - x2).abs() * FRAC_1_SQRT_2))
    }

    fn tabulate(&self, xs: &[f64]) -> Result<Matrix> {
        let cm = |s: f64| osc_eigenfunction(self.cm_n, s * FRAC_1_SQRT_2);
        let rel = |r: f64| Ok(osc_eigenfunction(self.l_t, r * FRAC_1_SQRT_2));
        match tabulate_separable(xs, cm, rel) {
            Some(m) => m,
            None => default_tabulate(self, xs),
        }
    }

    fn has_definite_parity(&self) -> bool {
        true
    }
}

pub fn eval_psi_repulsive(x1: f64, x2: f64, l_t: usize, cm_n: usize) -> Result<f64> {
    RepulsiveState::new(l_t, cm_n)?.eval(x1, x2)
}

/// Deeply bound approximation `2^{1/4} φ_n(u) · √κ e^{−κ|x1 − x2|}`,
/// `κ = √(−λ̃)`, valid for `λ̃ ≤ −5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractiveState {
    pub lambda_t: f64,
    pub cm_n: usize,
}

/// Largest `λ̃` accepted by [`AttractiveState`].
pub const ATTRACTIVE_LIMIT: f64 = -5.0;

impl AttractiveState {
    pub fn new(lambda_t: f64, cm_n: usize) -> Result<Self> {
        if !(lambda_t <= ATTRACTIVE_LIMIT) {
            return Err(Error::domain(
                "states",
                format!("attractive closed form needs lambda <= {ATTRACTIVE_LIMIT}, got {lambda_t}"),
            ));
        }
        Ok(Self { lambda_t, cm_n })
    }

    pub fn kappa(&self) -> f64 {
        (-self.lambda_t).sqrt()
    }

    fn relative(&self, r: f64) -> f64 {
        let k = self.kappa();
        k.sqrt() * (-k * r.abs()).exp()
    }
}

impl Wavefunction for AttractiveState {
    fn eval(&self, x1: f64, x2: f64) -> Result<f64> {
        Ok(cm_factor(self.cm_n, x1, x2) * self.relative(x1 - x2))
    }

    fn tabulate(&self, xs: &[f64]) -> Result<Matrix> {
        let cm = |s: f64| 2f64.powf(0.25) * osc_eigenfunction(self.cm_n, s * FRAC_1_SQRT_2);
        match tabulate_separable(xs, cm, |r| Ok(self.relative(r))) {
            Some(m) => m,
            None => default_tabulate(self, xs),
        }
    }

    fn has_definite_parity(&self) -> bool {
        true
    }
}

pub fn eval_psi_attractive(x1: f64, x2: f64, lambda_t: f64, cm_n: usize) -> Result<f64> {
    AttractiveState::new(lambda_t, cm_n)?.eval(x1, x2)
}

fn check_lambda(lambda_t: f64) -> Result<()> {
    if !lambda_t.is_finite() || lambda_t > 1.0 {
        return Err(Error::domain(
            "states",
            format!("ground-branch lambda must lie in (-inf, 1], got {lambda_t}"),
        ));
    }
    Ok(())
}

// 2^{(λ+1)/2} / Γ(1 − λ/2) · √R
fn bosonic_prefactor(lambda_t: f64) -> Result<f64> {
    let r = relative_norm_ratio(lambda_t)?;
    Ok((0.5 * (lambda_t + 1.0) * LN_2).exp() * rgamma(1.0 - 0.5 * lambda_t) * r.sqrt())
}

// 2^{λ/2+1} / Γ((1 − λ)/2) · √R, without the 1/(λ − 2n − 1) factor
fn fermionic_prefactor(lambda_t: f64) -> Result<f64> {
    let r = relative_norm_ratio(lambda_t)?;
    Ok(((0.5 * lambda_t + 1.0) * LN_2).exp() * rgamma(0.5 * (1.0 - lambda_t)) * r.sqrt())
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn c_from_prefactor(n: usize, lambda_t: f64, pre: f64) -> f64 {
    let nf = n as f64;
    let pole = if n == 0 { 1.0 } else { lambda_t / (lambda_t - 2.0 * nf) };
    // (2n)! / (4^n n!²)
    let central = (ln_factorial(2 * n) - 2.0 * nf * LN_2 - 2.0 * ln_factorial(n)).exp();
    pre * pole * central
}

fn cs_from_prefactor(n: usize, k: usize, lambda_t: f64, pre: f64) -> f64 {
    let nf = n as f64;
    let lw = ln_factorial(2 * n + 1)
        - 2.0 * nf * LN_2
        - ln_factorial(n)
        - 0.5 * (ln_factorial(2 * n + 1 - k) + ln_factorial(k));
    pre / (lambda_t - 2.0 * nf - 1.0) * sign(n + 1 + k) * lw.exp()
}

/// Product coefficient of `φ_n(x1) φ_n(x2)` in the bosonic-like expansion.
pub fn coeff_c(n: usize, lambda_t: f64) -> Result<f64> {
    check_lambda(lambda_t)?;
    Ok(c_from_prefactor(n, lambda_t, bosonic_prefactor(lambda_t)?))
}

/// Coefficient of the permanent `P_{k, 2n−k}`, `0 ≤ k < n`.
pub fn coeff_cp(n: usize, k: usize, lambda_t: f64) -> Result<f64> {
    if n == 0 || k >= n {
        return Err(Error::domain("states", format!("permanent index (n={n}, k={k}) needs 0 <= k < n")));
    }
    let c = coeff_c(n, lambda_t)?;
    Ok(cp_from_c(n, k, c))
}

fn cp_from_c(n: usize, k: usize, c: f64) -> f64 {
    let lw = ln_factorial(n) - 0.5 * (ln_factorial(2 * n - k) + ln_factorial(k));
    SQRT_2 * c * sign(n + k) * lw.exp()
}

/// Coefficient of `S_{k, 2n+1−k}` in the fermionic-like expansion, `0 ≤ k ≤ n`.
pub fn coeff_cs(n: usize, k: usize, lambda_t: f64) -> Result<f64> {
    check_lambda(lambda_t)?;
    if k > n {
        return Err(Error::domain("states", format!("Slater index (n={n}, k={k}) needs k <= n")));
    }
    if lambda_t == 1.0 {
        return Ok(if n == 0 && k == 0 { 1.0 } else { 0.0 });
    }
    Ok(cs_from_prefactor(n, k, lambda_t, fermionic_prefactor(lambda_t)?))
}

/// Weight `c(n)² + Σ_k cP(n,k)²` of bosonic level `n`, in closed form.
pub fn bosonic_level_weight(n: usize, lambda_t: f64) -> Result<f64> {
    let c = coeff_c(n, lambda_t)?;
    let nf = n as f64;
    Ok(c * c * (2.0 * nf * LN_2 + 2.0 * ln_factorial(n) - ln_factorial(2 * n)).exp())
}

/// Weight `Σ_k cS(n,k)²` of fermionic level `n`, in closed form.
pub fn fermionic_level_weight(n: usize, lambda_t: f64) -> Result<f64> {
    check_lambda(lambda_t)?;
    if lambda_t == 1.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let a = fermionic_prefactor(lambda_t)?;
    let nf = n as f64;
    let lw = ln_factorial(2 * n + 1) - 2.0 * nf * LN_2 - 2.0 * ln_factorial(n);
    Ok(a * a * lw.exp() / (2.0 * nf + 1.0 - lambda_t).powi(2))
}

/// How many levels to keep when building [`GroundStateCoefficients`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub n_max: usize,
    /// Truncation used when `n_max` misses `tol`.
    pub escalate_to: usize,
    /// Target for both norm defects.
    pub tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            n_max: 60,
            escalate_to: 200,
            tol: 1e-8,
        }
    }
}

impl TruncationPolicy {
    pub fn fixed(n_max: usize) -> Self {
        Self {
            n_max,
            escalate_to: n_max,
            tol: 1e-8,
        }
    }
}

/// Truncated coefficients of both expansions at fixed `λ̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateCoefficients {
    pub lambda_t: f64,
    pub n_max: usize,
    /// `c[n]`, `n = 0..=n_max`.
    pub c: Vec<f64>,
    /// `c_p[n-1][k]`, `n = 1..=n_max`, `k = 0..n`.
    pub c_p: Vec<Vec<f64>>,
    /// `c_s[n][k]`, `n = 0..=n_max`, `k = 0..=n`.
    pub c_s: Vec<Vec<f64>>,
    pub norm_defect_bosonic: f64,
    pub norm_defect_fermionic: f64,
    /// Both defects within the policy tolerance.
    pub converged: bool,
}

impl GroundStateCoefficients {
    /// Fixed truncation at `n_max`.
    pub fn new(lambda_t: f64, n_max: usize) -> Result<Self> {
        check_lambda(lambda_t)?;
        if n_max == 0 {
            return Err(Error::domain("states", "n_max must be positive"));
        }
        let bpre = bosonic_prefactor(lambda_t)?;
        let c: Vec<f64> = (0..=n_max).map(|n| c_from_prefactor(n, lambda_t, bpre)).collect();
        let c_p: Vec<Vec<f64>> = (1..=n_max)
            .map(|n| (0..n).map(|k| cp_from_c(n, k, c[n])).collect())
            .collect();
        let c_s: Vec<Vec<f64>> = if lambda_t == 1.0 {
            (0..=n_max)
                .map(|n| (0..=n).map(|k| if n == 0 && k == 0 { 1.0 } else { 0.0 }).collect())
                .collect()
        } else {
            let fpre = fermionic_prefactor(lambda_t)?;
            (0..=n_max)
                .map(|n| (0..=n).map(|k| cs_from_prefactor(n, k, lambda_t, fpre)).collect())
                .collect()
        };
        let sb: f64 = c.iter().map(|v| v * v).sum::<f64>()
            + c_p.iter().flatten().map(|v| v * v).sum::<f64>();
        let sf: f64 = c_s.iter().flatten().map(|v| v * v).sum();
        let defect = |s: f64| {
            let d = 1.0 - s;
            if d < 0.0 && d > -1e-12 {
                0.0
            } else {
                d
            }
        };
        let mut out = Self {
            lambda_t,
            n_max,
            c,
            c_p,
            c_s,
            norm_defect_bosonic: defect(sb),
            norm_defect_fermionic: defect(sf),
            converged: false,
        };
        out.converged = out.max_defect() <= TruncationPolicy::default().tol;
        Ok(out)
    }

    /// Truncation chosen by `policy`: `n_max` first, `escalate_to` when the
    /// defects miss `tol`.
    pub fn with_policy(lambda_t: f64, policy: TruncationPolicy) -> Result<Self> {
        let mut gs = Self::new(lambda_t, policy.n_max)?;
        if gs.max_defect() > policy.tol && policy.escalate_to > policy.n_max {
            log::debug!(
                "lambda {lambda_t}: defect {:e} at n_max {}, escalating to {}",
                gs.max_defect(),
                policy.n_max,
                policy.escalate_to
            );
            gs = Self::new(lambda_t, policy.escalate_to)?;
        }
        gs.converged = gs.max_defect() <= policy.tol;
        Ok(gs)
    }

    pub fn max_defect(&self) -> f64 {
        self.norm_defect_bosonic.max(self.norm_defect_fermionic)
    }

    /// Truncated bosonic-like sum at `(x1, x2)`.
    pub fn eval_bosonic(&self, x1: f64, x2: f64) -> f64 {
        let top = 2 * self.n_max;
        let p1 = osc_eigenfunctions(top, x1);
        let p2 = osc_eigenfunctions(top, x2);
        let mut s = 0.0;
        for (n, &c) in self.c.iter().enumerate() {
            s += c * p1[n] * p2[n];
        }
        for (idx, row) in self.c_p.iter().enumerate() {
            let n = idx + 1;
            for (k, &cp) in row.iter().enumerate() {
                let m = 2 * n - k;
                s += cp * (p1[k] * p2[m] + p1[m] * p2[k]) * FRAC_1_SQRT_2;
            }
        }
        s
    }

    /// Truncated fermionic-like sum at `(x1, x2)`.
    pub fn eval_fermionic(&self, x1: f64, x2: f64) -> f64 {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let top = 2 * self.n_max + 1;
        let pl = osc_eigenfunctions(top, lo);
        let ph = osc_eigenfunctions(top, hi);
        let mut s = 0.0;
        for (n, row) in self.c_s.iter().enumerate() {
            for (k, &cs) in row.iter().enumerate() {
                let m = 2 * n + 1 - k;
                s += cs * (pl[k] * ph[m] - pl[m] * ph[k]) * FRAC_1_SQRT_2;
            }
        }
        s
    }
}

/// Definition of the pair size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairSizeDefinition {
    /// `√⟨(x1 − x2)²⟩`.
    #[default]
    Rms,
}

/// Pair size of the ground-branch relative state at `λ̃`, in oscillator lengths.
pub fn pair_size(lambda_t: f64, defn: PairSizeDefinition) -> Result<f64> {
    check_lambda(lambda_t)?;
    match defn {
        PairSizeDefinition::Rms => rms_separation(lambda_t),
    }
}

fn rms_separation(lambda_t: f64) -> Result<f64> {
    // D_λ̃(r)² ≲ r^{2λ̃} e^{-r²/2} and λ̃ ≤ 1, so the tail past 14 is below 1e-40
    let extent = 14.0;
    let moments = |panels: usize| -> Result<(f64, f64)> {
        let (xs, ws) = composite_rule(0.0, extent, panels, 16);
        let mut m0 = 0.0;
        let mut m2 = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let d = parabolic_d(lambda_t, *x)?;
            m0 += w * d * d;
            m2 += w * d * d * x * x;
        }
        Ok((m0, m2))
    };
    let mut panels = 8;
    let (m0, m2) = moments(panels)?;
    let mut prev = (m2 / m0).sqrt();
    for _ in 0..6 {
        panels *= 2;
        let (m0, m2) = moments(panels)?;
        let cur = (m2 / m0).sqrt();
        if (cur - prev).abs() <= 1e-10 * cur {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        module: "states",
        iterations: panels,
        residual: prev,
    })
}
