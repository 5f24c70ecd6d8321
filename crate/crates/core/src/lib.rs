//! Liouvillian spectra of dissipative collective-spin models.
//!
//! This crate builds vectorized Liouvillians for a family of driven,
//! collectively dissipating spin-N/2 ensembles, computes their exact
//! spectra with a dense non-Hermitian eigensolver, and evaluates the
//! first-order degenerate perturbation theory that organizes the spectrum
//! into superspin sectors. Time-domain tools (closed-form magnetization
//! series and direct master-equation integration) and spectral
//! post-processing (gap, sector densities, perturbative-vs-exact matching,
//! exceptional-point sweeps) sit on top.
//!
//! All numerical kernels are generic over the real scalar type through
//! [`Real`] (`f32` or `f64`); the `*64` aliases at the crate root pin the
//! double-precision instantiations used by the CLI and the test suite.

// parameter guards use negated comparisons so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod collective_spin;
pub mod dynamics;
pub mod eigensolve;
pub mod error;
pub mod linalg;
pub mod models;
pub mod perturbation;
pub mod scalar;
pub mod superop;

pub use error::{Error, Result};
pub use scalar::Real;

use ndarray::{Array1, Array2};
use num_complex::Complex;

/// Dense complex matrix over a generic real scalar.
pub type CMatrix<T> = Array2<Complex<T>>;
/// Dense complex vector over a generic real scalar.
pub type CVector<T> = Array1<Complex<T>>;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Double-precision complex matrix.
pub type CMat64 = CMatrix<f64>;
/// Double-precision complex vector.
pub type CVec64 = CVector<f64>;

/// Double-precision collective spin operators.
pub type SpinOperatorSet64 = collective_spin::SpinOperatorSet<f64>;
/// Double-precision model description.
pub type ModelSpec64 = models::ModelSpec<f64>;
/// Double-precision vectorized Liouvillian.
pub type Liouvillian64 = superop::Liouvillian<f64>;
/// Double-precision superspin operators.
pub type SuperspinSet64 = superop::SuperspinSet<f64>;
/// Double-precision coupled superspin basis.
pub type CoupledBasis64 = superop::CoupledBasis<f64>;
/// Double-precision eigendecomposition result.
pub type EigenResult64 = eigensolve::EigenResult<f64>;
/// Double-precision time series of magnetization expectation values.
pub type TimeSeries64 = dynamics::TimeSeries<f64>;
