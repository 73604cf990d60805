//! Finite-dimensional operator means, relative/Tsallis/exponential operator
//! entropies, and a verification harness that checks the associated operator
//! and scalar inequalities as Loewner-order predicates over constrained
//! random matrix instances.
//!
//! Positive invertible operators are modeled as real symmetric positive
//! definite matrices. All matrix functions go through a symmetric spectral
//! decomposition, so every operation is available for any scalar type
//! implementing [`Real`] (`f32`, `f64`); the harness, generators, and report
//! machinery are instantiated at `f64`.

pub mod entropy;
pub mod error;
pub mod gen;
pub mod harness;
pub mod linalg;
pub mod maps;
pub mod matrix;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod streams;
pub mod sweeps;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

pub use error::{Error, Result};

/// Scalar type the numerical core is generic over.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from `f64`, for constants and tolerances.
    fn of(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("finite f64 constant")
    }
    /// Lossy conversion to `f64`, for reporting.
    fn to_f64(self) -> f64 {
        <f64 as num_traits::NumCast>::from(self).expect("real scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Matrix64 = matrix::Matrix<f64>;
pub type Matrix32 = matrix::Matrix<f32>;
pub type SpdMatrix64 = linalg::SpdMatrix<f64>;
pub type SpdMatrix32 = linalg::SpdMatrix<f32>;
pub type SpectralDecomp64 = linalg::SpectralDecomp<f64>;
pub type OperatorPair64 = entropy::OperatorPair<f64>;
pub type SpectralWindow64 = scalar::SpectralWindow<f64>;
pub type PositiveMap64 = maps::PositiveMap<f64>;

/// Tool version reported by the CLI and embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of the JSON report/case schema.
pub const SCHEMA_VERSION: u32 = 1;
