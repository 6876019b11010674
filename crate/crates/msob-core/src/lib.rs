//! Numerical toolkit for a mixed local/nonlocal critical-exponent problem:
//! sharp constant arithmetic, extremal-profile norms, two independent
//! quadrature routes to the fractional seminorm, dimension-threshold
//! scans for the comparison inequality, energy bookkeeping at critical
//! levels, and a profile-decomposition extractor for synthetic
//! concentrating sequences.

pub mod bessel;
pub mod bubble;
pub mod error;
pub mod extract;
pub mod ledger;
pub mod quad;
pub mod quadrature;
pub mod shapes;
pub mod specfn;
pub mod threshold;
pub mod verify;

pub use bubble::{Bubble, CoronParams, Cutoff};
pub use error::{Error, Result};
pub use quad::{QuadSpec, RadialFn};
pub use quadrature::QuadValue;
