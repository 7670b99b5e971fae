//! Brute-force one-particle density matrices on a uniform grid, used to check
//! the coefficient-space decompositions independently.

use serde::{Deserialize, Serialize};

use crate::decomposition::{parallel_map, DecompositionResult};
use crate::error::{Error, Result};
use crate::linalg::{clamp_to_unit_interval, sym_eigvals, Matrix, SymMatrix};
use crate::states::Wavefunction;

/// Captured grid norm below which a wavefunction counts as leaking.
pub const MIN_CAPTURED_NORM: f64 = 0.999;

/// Uniform grid on `[−extent, extent]` with an odd number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub extent: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::domain("oracle", format!("grid extent must be positive, got {extent}")));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::domain("oracle", format!("grid needs an odd point count >= 3, got {points}")));
        }
        Ok(Self { extent, points })
    }

    /// Grid whose spacing does not exceed `max_spacing`.
    pub fn with_max_spacing(extent: f64, max_spacing: f64) -> Result<Self> {
        let intervals = (2.0 * extent / max_spacing).ceil() as usize;
        Self::new(extent, intervals + intervals % 2 + 1)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        let mid = (self.points / 2) as f64;
        (0..self.points).map(|i| (i as f64 - mid) * h).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.points];
        w[0] *= 0.5;
        w[self.points - 1] *= 0.5;
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    /// Reduce `ψ(x1, x2)` over `x2`.
    Standard,
    /// Reduce the antisymmetric extension `sign(x2 − x1) ψ(x1, x2)`, which is
    /// the state read in ordered coordinates `(x<, x>)`.
    Strict1d,
}

/// Trace-normalized `ρ(x_i, x_j)` with quadrature weights folded in, so its
/// eigenvalues are the occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmKernel {
    pub grid: GridSpec,
    pub mode: ReductionMode,
    pub matrix: SymMatrix,
    /// `∫∫ψ²` on the grid before normalization.
    pub captured_norm: f64,
    /// The state had definite parity, so `ρ(−x, −x′) = ρ(x, x′)`.
    pub reflection_symmetric: bool,
}

/// Eigenvalues of a kernel, descending and clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue before clamping.
    pub min_raw: f64,
    pub sum: f64,
}

impl RdmKernel {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.frobenius_sq()
    }

    pub fn spectrum(&self) -> Result<GridSpectrum> {
        let mut raw = if self.reflection_symmetric {
            let (even, odd) = parity_blocks(&self.matrix);
            let mut v = sym_eigvals(&even)?;
            if odd.dim() > 0 {
                v.extend(sym_eigvals(&odd)?);
            }
            v.sort_by(|a, b| b.total_cmp(a));
            v
        } else {
            sym_eigvals(&self.matrix)?
        };
        let min_raw = raw.last().copied().unwrap_or(0.0);
        let sum = raw.iter().sum();
        clamp_to_unit_interval(&mut raw);
        Ok(GridSpectrum {
            eigenvalues: raw,
            min_raw,
            sum,
        })
    }
}

// Splits a reflection-symmetric kernel (K_{i,j} = K_{n−1−i, n−1−j}) into the
// blocks acting on even and odd grid vectors.
fn parity_blocks(k: &SymMatrix) -> (SymMatrix, SymMatrix) {
    let n = k.dim();
    let mid = n / 2;
    let mirror = |j: usize| n - 1 - j;
    let even = SymMatrix::from_fn(mid + 1, |i, j| {
        if i == mid && j == mid {
            k.get(mid, mid)
        } else if i == mid {
            std::f64::consts::SQRT_2 * k.get(mid, j)
        } else {
            k.get(i, j) + k.get(i, mirror(j))
        }
    });
    let odd = SymMatrix::from_fn(mid, |i, j| k.get(i, j) - k.get(i, mirror(j)));
    (even, odd)
}

/// One-particle density matrix of `psi` on `grid`.
pub fn build_rdm(psi: &dyn Wavefunction, grid: GridSpec, mode: ReductionMode) -> Result<RdmKernel> {
    build_rdm_with(psi, grid, mode, 1)
}

/// As [`build_rdm`], assembling the kernel rows on `threads` workers.
pub fn build_rdm_with(psi: &dyn Wavefunction, grid: GridSpec, mode: ReductionMode, threads: usize) -> Result<RdmKernel> {
    let xs = grid.nodes();
    let ws = grid.weights();
    let n = xs.len();
    let mut a = psi.tabulate(&xs)?;
    if !a.is_finite() {
        return Err(Error::domain("oracle", "wavefunction is not finite on the grid"));
    }
    // A_ik = √w_i f(x_i, t_k) √w_k, so that K = A Aᵀ
    let sw: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    // In strict mode f jumps across t = x_i; the trapezoid takes the mean of
    // the one-sided limits of each product there, which is 0 for K_ij and
    // ψ(x_i, x_i)² for K_ii. The zero sits in A, the diagonal term is added.
    let mut contact = vec![0.0; n];
    for i in 0..n {
        for k in 0..n {
            let v = sw[i] * sw[k] * a.get(i, k);
            let s = match mode {
                ReductionMode::Standard => 1.0,
                ReductionMode::Strict1d => match k.cmp(&i) {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Less => -1.0,
                    std::cmp::Ordering::Equal => {
                        contact[i] = v * v;
                        0.0
                    }
                },
            };
            a.set(i, k, s * v);
        }
    }
    let captured = a.frobenius_sq() + contact.iter().sum::<f64>();
    if !(captured >= MIN_CAPTURED_NORM) {
        return Err(Error::Leakage { captured });
    }
    let mut matrix = gram_rows(&a, threads);
    for (i, c) in contact.iter().enumerate() {
        matrix.set(i, i, matrix.get(i, i) + c);
    }
    matrix.scale(1.0 / matrix.trace());
    Ok(RdmKernel {
        grid,
        mode,
        matrix,
        captured_norm: captured,
        reflection_symmetric: psi.has_definite_parity(),
    })
}

fn gram_rows(a: &Matrix, threads: usize) -> SymMatrix {
    let n = a.rows();
    let rows: Vec<usize> = (0..n).collect();
    let lower: Vec<Vec<f64>> = parallel_map(&rows, threads, |&i| {
        (0..=i)
            .map(|j| a.row(i).iter().zip(a.row(j)).map(|(x, y)| x * y).sum())
            .collect()
    });
    SymMatrix::from_fn(n, |i, j| lower[i][j])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub index: usize,
    pub analytic: f64,
    pub grid: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub top_k: usize,
    pub max_deviation: f64,
    pub rows: Vec<ComparisonRow>,
}

/// Occupations of a decomposition with multiplicity, as a grid kernel would
/// produce them.
pub fn analytic_occupations(analytic: &DecompositionResult) -> Vec<f64> {
    analytic
        .eigenvalues
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, analytic.multiplicity()))
        .collect()
}

/// Compares the leading `top_k` occupations of `analytic` (with multiplicity)
/// against `grid_eigenvalues`.
pub fn compare_decompositions(
    analytic: &DecompositionResult,
    grid_eigenvalues: &[f64],
    top_k: usize,
) -> Result<ComparisonReport> {
    compare_occupations(&analytic_occupations(analytic), grid_eigenvalues, top_k)
}

pub fn compare_occupations(analytic: &[f64], grid: &[f64], top_k: usize) -> Result<ComparisonReport> {
    if top_k == 0 || top_k > analytic.len() || top_k > grid.len() {
        return Err(Error::Dimension {
            module: "oracle",
            msg: format!(
                "top_k = {top_k} with {} analytic and {} grid eigenvalues",
                analytic.len(),
                grid.len()
            ),
        });
    }
    let rows: Vec<ComparisonRow> = (0..top_k)
        .map(|i| ComparisonRow {
            index: i,
            analytic: analytic[i],
            grid: grid[i],
            deviation: (analytic[i] - grid[i]).abs(),
        })
        .collect();
    Ok(ComparisonReport {
        top_k,
        max_deviation: rows.iter().map(|r| r.deviation).fold(0.0, f64::max),
        rows,
    })
}
