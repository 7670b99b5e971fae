//! Two particles in a 1D harmonic trap with a contact interaction: exact
//! spectrum and eigenstates, their Schmidt and Slater decompositions, and
//! brute-force grid checks of both.
//!
//! Natural units throughout (`m = ω = ħ = 1`). `lambda_t` is the relative
//! quantum number `λ̃ = ε_r − 1/2`; the ground branch is `λ̃ ∈ (−∞, 1]`.

pub mod decomposition;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod spectrum;
pub mod states;
pub mod verify;

pub use decomposition::{
    entropy_scan, fermionized_decomposition, fermionized_degeneracy, noninteracting_decomposition,
    schmidt_decompose, slater_decompose, DecompositionKind, DecompositionResult,
};
pub use error::{Error, Result};
pub use oracle::{build_rdm, compare_decompositions, GridSpec, RdmKernel, ReductionMode};
pub use spectrum::{energy_of_gamma, gamma_of_energy, InteractionParams, SpectralPoint};
pub use states::{
    AttractiveState, ExactState, GroundStateCoefficients, RepulsiveState, TruncationPolicy, Wavefunction,
};
pub use verify::{derivative_jump, relative_ode_residual, JumpReport, ResidualReport};
