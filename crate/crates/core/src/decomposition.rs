//! Schmidt and Slater canonical forms of the ground-branch pair, their
//! entanglement measures, and closed-form decompositions of the
//! non-interacting and fermionized excited states.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{clamp_to_unit_interval, sym_eigvals, Matrix, SymMatrix};
use crate::specfun::ln_factorial;
use crate::states::{pair_size, GroundStateCoefficients, PairSizeDefinition, TruncationPolicy};

/// Eigenvalues at or below this count as zero for the rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Largest truncation defect a decomposition accepts before refusing.
pub const MAX_DEFECT: f64 = 0.5;

/// Tolerance on the twofold pairing of Slater eigenvalues.
pub const PAIRING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionKind {
    Schmidt,
    Slater,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub kind: DecompositionKind,
    /// Descending. Schmidt: `λ_j`, summing to 1. Slater: one `z_j` per
    /// degenerate pair, summing to 1/2.
    pub eigenvalues: Vec<f64>,
    /// Number of eigenvalues above [`RANK_THRESHOLD`]; each Slater pair
    /// counts once.
    pub rank: usize,
    /// `1/Tr ρ²` (Schmidt) or `1/(2 Tr ρ²)` (Slater).
    pub k_number: f64,
    pub s_vn: f64,
    pub s_lin: f64,
    /// `1 − Tr ρ²` of the one-particle matrix; equals `s_lin` for Schmidt.
    pub s_lin_strict: f64,
    /// Truncation defect of the representation that was decomposed.
    pub norm_defect: f64,
    pub n_max: usize,
}

impl DecompositionResult {
    /// Eigenvalue multiplicity in the one-particle density matrix.
    pub fn multiplicity(&self) -> usize {
        match self.kind {
            DecompositionKind::Schmidt => 1,
            DecompositionKind::Slater => 2,
        }
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.multiplicity() as f64 * self.eigenvalues.iter().map(|v| v * v).sum::<f64>()
    }
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn check_defect(defect: f64, n_max: usize) -> Result<()> {
    if !(defect <= MAX_DEFECT) {
        return Err(Error::Truncation { defect, n_max });
    }
    Ok(())
}

// The bosonic matrix couples indices of equal parity only; returns the even
// and odd blocks.
fn bosonic_blocks(gs: &GroundStateCoefficients) -> [SymMatrix; 2] {
    let top = 2 * gs.n_max;
    let mut blocks = [SymMatrix::zeros(top / 2 + 1), SymMatrix::zeros(top.div_ceil(2))];
    for (n, &c) in gs.c.iter().enumerate() {
        blocks[n % 2].set(n / 2, n / 2, c);
    }
    for (idx, row) in gs.c_p.iter().enumerate() {
        let n = idx + 1;
        for (k, &cp) in row.iter().enumerate() {
            let m = 2 * n - k;
            blocks[k % 2].set(k / 2, m / 2, cp * FRAC_1_SQRT_2);
        }
    }
    blocks
}

// The fermionic matrix W is antisymmetric and couples even to odd indices;
// `B[e][o] = W[2e][2o+1]`.
fn fermionic_block(gs: &GroundStateCoefficients) -> Matrix {
    let dim = gs.n_max + 1;
    let mut b = Matrix::zeros(dim, dim);
    for (n, row) in gs.c_s.iter().enumerate() {
        for (k, &cs) in row.iter().enumerate() {
            let m = 2 * n + 1 - k;
            let w = cs * FRAC_1_SQRT_2;
            if k % 2 == 0 {
                b.set(k / 2, m / 2, w);
            } else {
                b.set(m / 2, k / 2, -w);
            }
        }
    }
    b
}

fn block_frobenius_sq(blocks: &[SymMatrix]) -> f64 {
    blocks.iter().map(SymMatrix::frobenius_sq).sum()
}

fn sym_square_frobenius_sq(a: &SymMatrix) -> f64 {
    a.to_dense().gram().frobenius_sq()
}

/// Schmidt decomposition of the bosonic-like expansion.
pub fn schmidt_decompose(gs: &GroundStateCoefficients) -> Result<DecompositionResult> {
    check_defect(gs.norm_defect_bosonic, gs.n_max)?;
    let blocks = bosonic_blocks(gs);
    let total = block_frobenius_sq(&blocks);
    let mut lambdas = Vec::with_capacity(2 * gs.n_max + 1);
    for b in &blocks {
        if b.dim() > 0 {
            lambdas.extend(sym_eigvals(b)?.into_iter().map(|mu| mu * mu / total));
        }
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    clamp_to_unit_interval(&mut lambdas);
    let purity: f64 = lambdas.iter().map(|v| v * v).sum();
    let s_lin = 1.0 - purity;
    Ok(DecompositionResult {
        kind: DecompositionKind::Schmidt,
        rank: lambdas.iter().filter(|&&v| v > RANK_THRESHOLD).count(),
        k_number: 1.0 / purity,
        s_vn: -lambdas.iter().map(|&v| xlnx(v)).sum::<f64>(),
        s_lin,
        s_lin_strict: s_lin,
        eigenvalues: lambdas,
        norm_defect: gs.norm_defect_bosonic,
        n_max: gs.n_max,
    })
}

/// Slater decomposition of the fermionic-like expansion.
pub fn slater_decompose(gs: &GroundStateCoefficients) -> Result<DecompositionResult> {
    check_defect(gs.norm_defect_fermionic, gs.n_max)?;
    let b = fermionic_block(gs);
    let total = 2.0 * b.frobenius_sq();
    let left = sym_eigvals(&b.outer_gram())?;
    let right = sym_eigvals(&b.gram())?;
    let mismatch = left
        .iter()
        .zip(&right)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / total;
    if mismatch > PAIRING_TOL {
        return Err(Error::Pairing { mismatch });
    }
    let mut z: Vec<f64> = left.iter().zip(&right).map(|(x, y)| 0.5 * (x + y) / total).collect();
    clamp_to_unit_interval(&mut z);
    let purity = 2.0 * z.iter().map(|v| v * v).sum::<f64>();
    Ok(DecompositionResult {
        kind: DecompositionKind::Slater,
        rank: z.iter().filter(|&&v| v > RANK_THRESHOLD).count(),
        k_number: 1.0 / (2.0 * purity),
        s_vn: -2.0 * z.iter().map(|&v| xlnx(v)).sum::<f64>() - LN_2,
        s_lin: 1.0 - 2.0 * purity,
        s_lin_strict: 1.0 - purity,
        eigenvalues: z,
        norm_defect: gs.norm_defect_fermionic,
        n_max: gs.n_max,
    })
}

/// `Tr ρ²` of the bosonic-like expansion without diagonalizing.
pub fn schmidt_purity(gs: &GroundStateCoefficients) -> Result<f64> {
    check_defect(gs.norm_defect_bosonic, gs.n_max)?;
    let blocks = bosonic_blocks(gs);
    let total = block_frobenius_sq(&blocks);
    Ok(blocks.iter().map(sym_square_frobenius_sq).sum::<f64>() / (total * total))
}

/// `Tr ρ²` of the one-particle matrix of the fermionic-like expansion.
pub fn slater_purity(gs: &GroundStateCoefficients) -> Result<f64> {
    check_defect(gs.norm_defect_fermionic, gs.n_max)?;
    let b = fermionic_block(gs);
    let f = b.frobenius_sq();
    Ok(b.gram().frobenius_sq() / (2.0 * f * f))
}

/// `K − K^f` at `lambda_t` with truncation `n_max`.
pub fn k_difference(lambda_t: f64, n_max: usize) -> Result<f64> {
    let gs = GroundStateCoefficients::new(lambda_t, n_max)?;
    Ok(1.0 / schmidt_purity(&gs)? - 1.0 / (2.0 * slater_purity(&gs)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub lambda_t: f64,
    /// Sign changes of `K − K^f` seen on the coarse scan.
    pub sign_changes: usize,
    pub n_max: usize,
}

/// Locates where the Schmidt and Slater numbers cross on `[lo, hi]`:
/// a coarse scan with `samples` points, then bisection to `tol` on the first
/// bracket found.
pub fn locate_crossover(lo: f64, hi: f64, samples: usize, n_max: usize, tol: f64) -> Result<Crossover> {
    if !(lo < hi && hi <= 1.0) || samples < 2 {
        return Err(Error::domain("decomposition", "crossover scan needs lo < hi <= 1 and two samples"));
    }
    let grid: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&l| k_difference(l, n_max)).collect::<Result<_>>()?;
    let brackets: Vec<usize> = (0..samples - 1)
        .filter(|&i| vals[i].signum() != vals[i + 1].signum())
        .collect();
    let Some(&first) = brackets.first() else {
        return Err(Error::Bracketing {
            target: 0.0,
            lo,
            hi,
            f_lo: vals[0],
            f_hi: vals[samples - 1],
        });
    };
    let (mut a, mut b, mut fa) = (grid[first], grid[first + 1], vals[first]);
    let mut iterations = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = k_difference(mid, n_max)?;
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence {
                module: "decomposition",
                iterations,
                residual: b - a,
            });
        }
    }
    Ok(Crossover {
        lambda_t: 0.5 * (a + b),
        sign_changes: brackets.len(),
        n_max,
    })
}

/// Leading eigenvalues kept per representation in a [`ScanRow`].
pub const SCAN_TOP: usize = 10;

/// One row of an entanglement scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda_t: f64,
    pub s_lin_bosonic: f64,
    pub s_lin_fermionic: f64,
    pub s_lin_strict: f64,
    pub s_vn_bosonic: f64,
    pub s_vn_fermionic: f64,
    pub k_bosonic: f64,
    pub k_fermionic: f64,
    pub pair_size: f64,
    pub n_max: usize,
    pub converged: bool,
    /// Top [`SCAN_TOP`] Schmidt eigenvalues, zero-padded.
    pub top_bosonic: Vec<f64>,
    /// Top [`SCAN_TOP`] Slater `z_j` (one per pair), zero-padded.
    pub top_fermionic: Vec<f64>,
}

fn leading(v: &[f64]) -> Vec<f64> {
    (0..SCAN_TOP).map(|i| v.get(i).copied().unwrap_or(0.0)).collect()
}

/// Both decompositions and the pair size at one coupling.
pub fn scan_point(lambda_t: f64, policy: TruncationPolicy) -> Result<ScanRow> {
    let gs = GroundStateCoefficients::with_policy(lambda_t, policy)?;
    let b = schmidt_decompose(&gs)?;
    let f = slater_decompose(&gs)?;
    Ok(ScanRow {
        lambda_t,
        s_lin_bosonic: b.s_lin,
        s_lin_fermionic: f.s_lin,
        s_lin_strict: f.s_lin_strict,
        s_vn_bosonic: b.s_vn,
        s_vn_fermionic: f.s_vn,
        k_bosonic: b.k_number,
        k_fermionic: f.k_number,
        pair_size: pair_size(lambda_t, PairSizeDefinition::Rms)?,
        n_max: gs.n_max,
        converged: gs.converged,
        top_bosonic: leading(&b.eigenvalues),
        top_fermionic: leading(&f.eigenvalues),
    })
}

/// Applies `f` to every item on `threads` workers; output order follows input.
pub fn parallel_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

/// Scan over `lambda_grid`; a failing point is reported in place and the
/// scan continues.
pub fn entropy_scan(lambda_grid: &[f64], policy: TruncationPolicy, threads: usize) -> Vec<(f64, Result<ScanRow>)> {
    parallel_map(lambda_grid, threads, |&l| (l, scan_point(l, policy)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitalSign {
    /// `(φ_k + φ_m)/√2`
    Plus,
    /// `(φ_k − φ_m)/√2`
    Minus,
    /// `φ_k` alone (`k = m`)
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalOrbital {
    pub k: usize,
    pub m: usize,
    pub sign: OrbitalSign,
    pub occupation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoninteractingDecomposition {
    pub cm_n: usize,
    /// Descending occupation.
    pub orbitals: Vec<NaturalOrbital>,
    pub s_lin: f64,
    /// `1 − 1/ε` with `ε = n + 1`.
    pub bound: f64,
}

impl NoninteractingDecomposition {
    pub fn occupations(&self) -> Vec<f64> {
        self.orbitals.iter().map(|o| o.occupation).collect()
    }
}

fn binom_weight(n: usize, k: usize) -> f64 {
    // C(n,k)/2^n
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k) - n as f64 * LN_2).exp()
}

/// Natural orbitals of `φ_n(u) φ_0(v)`, the non-interacting state with `n`
/// center-of-mass quanta.
pub fn noninteracting_decomposition(cm_n: usize) -> NoninteractingDecomposition {
    let mut orbitals = Vec::with_capacity(cm_n + 1);
    for k in 0..cm_n.div_ceil(2) {
        let w = binom_weight(cm_n, k);
        for sign in [OrbitalSign::Plus, OrbitalSign::Minus] {
            orbitals.push(NaturalOrbital {
                k,
                m: cm_n - k,
                sign,
                occupation: w,
            });
        }
    }
    if cm_n % 2 == 0 {
        orbitals.push(NaturalOrbital {
            k: cm_n / 2,
            m: cm_n / 2,
            sign: OrbitalSign::Single,
            occupation: binom_weight(cm_n, cm_n / 2),
        });
    }
    orbitals.sort_by(|a, b| b.occupation.total_cmp(&a.occupation));
    // Tr ρ² = C(2n,n)/4^n
    let n = cm_n;
    let purity = (ln_factorial(2 * n) - 2.0 * ln_factorial(n) - 2.0 * n as f64 * LN_2).exp();
    NoninteractingDecomposition {
        cm_n,
        orbitals,
        s_lin: 1.0 - purity,
        bound: 1.0 - 1.0 / (n as f64 + 1.0),
    }
}

/// Coefficient `c` of the Slater-like term `S_{q, N−q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlaterTerm {
    pub q: usize,
    pub partner: usize,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionizedDecomposition {
    pub l_t: usize,
    pub cm_n: usize,
    pub terms: Vec<SlaterTerm>,
    pub s_lin: f64,
    /// `1 − 1/⌊ε/2⌋`.
    pub bound: f64,
    /// `ε = n + l̃ + 1`.
    pub energy: f64,
}

/// Slater-like expansion of the infinitely repulsive state
/// `φ_n(u) φ_l̃(|v|)`.
pub fn fermionized_decomposition(l_t: usize, cm_n: usize) -> Result<FermionizedDecomposition> {
    if l_t % 2 == 0 {
        return Err(Error::domain(
            "decomposition",
            format!("relative quantum {l_t} must be odd"),
        ));
    }
    let coeffs = if cm_n == 0 {
        relative_only_coefficients(l_t)
    } else {
        mixed_coefficients(l_t, cm_n)
    };
    let total = cm_n + l_t;
    let terms: Vec<SlaterTerm> = coeffs
        .into_iter()
        .enumerate()
        .map(|(q, coefficient)| SlaterTerm {
            q,
            partner: total - q,
            coefficient,
        })
        .collect();
    let norm: f64 = terms.iter().map(|t| t.coefficient.powi(2)).sum();
    let quartic: f64 = terms.iter().map(|t| t.coefficient.powi(4)).sum::<f64>() / (norm * norm);
    let eps = total + 1;
    let half = eps / 2;
    Ok(FermionizedDecomposition {
        l_t,
        cm_n,
        terms,
        s_lin: 1.0 - quartic,
        bound: 1.0 - 1.0 / half as f64,
        energy: eps as f64,
    })
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

// c_q = √(l!/2^{l−1}) (−1)^q / √((l−q)! q!), q = 0..=(l−1)/2
fn relative_only_coefficients(l: usize) -> Vec<f64> {
    let pre = 0.5 * (ln_factorial(l) - (l as f64 - 1.0) * LN_2);
    (0..=(l - 1) / 2)
        .map(|q| sign(q) * (pre - 0.5 * (ln_factorial(l - q) + ln_factorial(q))).exp())
        .collect()
}

// Weight of φ_i(x<)φ_j(x>) in the product of two-orbital expansions, labelled
// by the four orbital quanta and the two contraction orders.
#[allow(clippy::too_many_arguments)]
fn product_weight(l_t: usize, n: usize, k: usize, l: usize, r: usize, p: usize) -> f64 {
    if k < r || l < r || n - k < p || l_t - l < p {
        return 0.0;
    }
    let num = 0.5 * (ln_factorial(k + l - 2 * r) + ln_factorial(n - k + l_t - l - 2 * p));
    let den = ln_factorial(k - r)
        + ln_factorial(l - r)
        + ln_factorial(n - k - p)
        + ln_factorial(l_t - l - p)
        + ln_factorial(r)
        + ln_factorial(p);
    (num - den).exp()
}

// Coefficients for n ≥ 1 from expanding the centre-of-mass and relative
// oscillators in single-particle products and collecting each S_{q, N−q}.
fn mixed_coefficients(l_t: usize, n: usize) -> Vec<f64> {
    let total = n + l_t;
    let (nbar, middle) = if n % 2 == 0 { (n / 2, true) } else { (n.div_ceil(2), false) };
    let pre = 0.5 * (ln_factorial(l_t) + ln_factorial(n) - (total as f64 - 1.0) * LN_2);
    let half = |x: usize| (x % 2 == 0).then_some(x / 2);
    (0..=(total - 1) / 2)
        .map(|q| {
            // antisymmetric selector for the (i, j) = (q, N−q) term
            let sel = |i: usize, j: usize| -> f64 {
                let a = if i == q && j == total - q { 1.0 } else { 0.0 };
                let b = if j == q && i == total - q { 1.0 } else { 0.0 };
                a - b
            };
            let mut acc = 0.0;
            for l in 0..=(l_t - 1) / 2 {
                let mut s = 0.0;
                for k in 0..nbar {
                    for i in k.abs_diff(l)..=k + l {
                        let (a, b) = (n - k, l_t - l);
                        for j in a.abs_diff(b)..=a + b {
                            if let (Some(r), Some(p)) = (half(k + l - i), half(a + b - j)) {
                                s += product_weight(l_t, n, k, l, r, p) * sel(i, j);
                            }
                        }
                    }
                    let (a, b) = (n - k, l_t - l);
                    for i in a.abs_diff(l)..=a + l {
                        for j in k.abs_diff(b)..=k + b {
                            if let (Some(r), Some(p)) = (half(k + b - j), half(a + l - i)) {
                                s += product_weight(l_t, n, k, b, r, p) * sel(i, j);
                            }
                        }
                    }
                }
                if middle {
                    let h = n / 2;
                    let b = l_t - l;
                    for i in h.abs_diff(l)..=h + l {
                        for j in h.abs_diff(b)..=h + b {
                            if let (Some(r), Some(p)) = (half(h + b - j), half(h + l - i)) {
                                s += product_weight(l_t, n, h, b, r, p) * sel(i, j);
                            }
                        }
                    }
                }
                acc += sign(l) * s;
            }
            pre.exp() * acc
        })
        .collect()
}

/// Degeneracy of the fermionized level `ε` and the number of single-particle
/// orbitals it involves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermionizedLevel {
    pub degeneracy: usize,
    pub g_sp: usize,
}

pub fn fermionized_degeneracy(eps: usize) -> Result<FermionizedLevel> {
    if eps < 2 {
        return Err(Error::domain("decomposition", format!("fermionized energy {eps} below 2")));
    }
    Ok(if eps % 2 == 0 {
        FermionizedLevel {
            degeneracy: eps / 2,
            g_sp: eps,
        }
    } else {
        FermionizedLevel {
            degeneracy: (eps - 1) / 2,
            g_sp: eps - 1,
        }
    })
}
