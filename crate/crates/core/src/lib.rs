//! Numerical toolkit for Bessel-potential and fractional Sobolev spaces on
//! periodic grids: Fourier-multiplier potentials, rearrangements,
//! fractional seminorms, Peetre K-functionals and an embedding-verification
//! harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod grid;
pub mod interpolation;
pub mod kernel;
pub mod norms;
pub mod potentials;
pub mod synth;

pub use error::{Error, Result};
pub use experiments::{ExperimentParams, ExperimentReport, TheoremTag};
pub use grid::{make_grid, quadrature_lp, GridFunction, PeriodicGrid};
pub use interpolation::{k_numeric, KFunctional, NormCouple};
pub use norms::SpaceSpec;
pub use potentials::MultiplierOrder;
pub use synth::{synthesize, FunctionKind, FunctionSpec};
