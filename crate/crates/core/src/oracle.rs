//! Analytic ground truth for the jittering identities.
//!
//! Everything here is exact or quadrature-grade and independent of the
//! estimators, so it can be used to judge them.

pub mod model;
pub mod pmf;
pub mod quadrature;

pub use model::{true_conditional, Condition, Functional, GaussianConditional, JitteredModelDensity, SyntheticMixedModel};
pub use pmf::{convolution_breaks, convolve_density, DiscretePmf};
pub use quadrature::{adaptive_integral, adaptive_integral_with_breaks, finite_difference};
