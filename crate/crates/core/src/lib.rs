//! Birkhoff-James orthogonality on finite-dimensional real normed spaces.
//!
//! The crate is generic over the scalar type ([`Scalar`]: `f32` or `f64`);
//! the `*64` aliases below are what the CLI and the test suites use.
//!
//! - [`spaces`]: `lp` norms, one-sided norm derivatives, supporting functionals.
//! - [`sip`]: semi-inner products and the `x+` / `x-` classification.
//! - [`operators`]: operator norms and norm attainment sets.
//! - [`orthogonality`]: orthogonality certificates and norm retrieval.
//! - [`approximation`]: best approximation by operators from a subspace.

pub mod approximation;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod operators;
pub mod orthogonality;
pub mod scalar;
pub mod search;
pub mod sip;
pub mod spaces;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spaces::{Norm, Space};

pub type Vector64 = spaces::Vector<f64>;
pub type Vector32 = spaces::Vector<f32>;
pub type Functional64 = spaces::Functional<f64>;
pub type Functional32 = spaces::Functional<f32>;
pub type Operator64 = operators::Operator<f64>;
pub type Operator32 = operators::Operator<f32>;
pub type AttainmentSample64 = operators::AttainmentSample<f64>;
pub type OrthoCertificate64 = orthogonality::OrthoCertificate<f64>;
pub type RetrievalReport64 = orthogonality::RetrievalReport<f64>;
pub type DistanceReport64 = approximation::DistanceReport<f64>;
