use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: pole at x = {x}")]
    Pole { func: &'static str, x: f64 },

    #[error("{module}: argument out of domain: {msg}")]
    Domain { module: &'static str, msg: String },

    #[error("{module}: no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        module: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("spectrum: coupling diverges at eps_r = {eps_r} (infinite repulsion)")]
    Divergence { eps_r: f64 },

    #[error("spectrum: confinement-induced resonance at a3d/l_perp = {ratio}")]
    Resonance { ratio: f64 },

    #[error(
        "spectrum: root not bracketed on ({lo}, {hi}) for gamma = {target}: residuals {f_lo:e}, {f_hi:e}"
    )]
    Bracketing {
        target: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("linalg: Jacobi sweeps exhausted ({sweeps}), off-diagonal norm {residual:e}")]
    EigenNonConvergence { sweeps: usize, residual: f64 },

    #[error("decomposition: truncated norm defect {defect:e} too large at n_max = {n_max}")]
    Truncation { defect: f64, n_max: usize },

    #[error("decomposition: Slater eigenvalues fail to pair (mismatch {mismatch:e})")]
    Pairing { mismatch: f64 },

    #[error("oracle: wavefunction leaks out of the grid, captured norm {captured}")]
    Leakage { captured: f64 },

    #[error("{module}: dimension mismatch: {msg}")]
    Dimension { module: &'static str, msg: String },
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::EigenNonConvergence { .. }
                | Error::Bracketing { .. }
                | Error::Truncation { .. }
                | Error::Pairing { .. }
                | Error::Leakage { .. }
        )
    }

    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            module,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
