//! Jittering estimators for mixed discrete-continuous data.
//!
//! Discrete coordinates are made continuous by adding noise from the
//! `U + θ(B_ν − 0.5)` family, which has a flat plateau around zero and
//! support strictly inside `(−1, 1)`. With such noise the jittered density
//! agrees with the original probability mass function at every integer, and
//! its derivatives along the discrete axes vanish there. Continuous-data
//! estimators (kernel density estimation, local linear regression) can then
//! be applied to the jittered sample directly.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, CSV handling and
//! the command-line front end live in the companion `mixjitter-cli` crate.
//!
//! Modules:
//! - [`noise`]: the noise family, its density, sampling, and membership checks.
//! - [`oracle`]: exact convolutions, quadrature, finite differences and
//!   synthetic models with closed-form conditional functionals.
//! - [`data`]: typed mixed datasets, dummy coding, jittering, standardization.
//! - [`estimators`]: jittered kernel density and local linear regression.
//! - [`regression`]: conditional mean, CDF, quantile and class probabilities
//!   computed from any [`regression::DensitySurface`].
//!
//! Jittering is an estimation device for nonparametric methods only;
//! parametric models fitted to jittered data are generally inconsistent.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod matrix;
pub mod noise;
pub mod oracle;
pub mod regression;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use noise::{NoiseReport, NoiseSpec};
