//! Bound-state spectra of diatomic radial potentials by the asymptotic
//! iteration method, with closed-form spectra and a finite-difference
//! eigensolver as cross-checks.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aim;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod ratfun;
pub mod special;

pub use aim::{
    delta, delta_at_energy, delta_sequence, find_eigenvalues, iterate, iterate_with, laguerre_quantization,
    AimOptions, AimSeed, AimState, EigenvalueReport, Precision,
};
pub use error::{Error, Result};
pub use oracle::{
    discretize, lowest_eigenvalues, solve_levels, solve_levels_with, OracleOptions, RadialGrid, TridiagonalSystem,
};
pub use potential::{
    kernel_energy, relative_difference, DerivedParams, GridSpec, KratzerReading, Potential, PotentialModel,
    SpectrumResult, UnitSystem,
};
pub use ratfun::{DoubleDouble, Polynomial, RationalFunction, Scalar};
pub use special::{laguerre_eval, laguerre_poly, normalize, ode_residual, LaguerreSpec, RadialWavefunction};
