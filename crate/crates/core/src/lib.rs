//! Exact operator algebra, classical brackets and spectra for generic
//! superintegrable systems on pseudo-spheres.

pub mod error;
pub mod laurent;
pub mod linalg;
pub mod model;
pub mod phase;
pub mod racah3;
pub mod rational;
pub mod specsolver;
pub mod weyl;

pub use error::{Error, Result};
pub use laurent::{DerivMonomial, LaurentMonomial, LaurentPoly, Metric};
pub use rational::{HbarPoly, Rational};
pub use weyl::WeylOp;
