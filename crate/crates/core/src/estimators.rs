//! Jittering estimators: kernel density estimation and local linear
//! regression on the jittered sample, optionally averaged over several
//! independent jitters.

use alloc::vec::Vec;

pub mod bandwidth;
pub mod kde;
pub mod kernel;
pub mod loclin;

pub use bandwidth::select_bandwidth;
pub use kde::{fit_kde, kde_eval, KdeModel, Replicate};
pub use kernel::Kernel;
pub use loclin::{fit_loclin, loclin_eval, LocLinModel, LocLinReplicate};

/// Settings shared by [`fit_kde`] and [`fit_loclin`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub kernel: Kernel,
    /// Number of independent jitter replicates to average over.
    pub num_jitters: usize,
    pub seed: u64,
    /// Per-column bandwidths on the standardized scale; normal-reference
    /// rule when `None`.
    pub bandwidth: Option<Vec<f64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            kernel: Kernel::Gaussian,
            num_jitters: 1,
            seed: 0,
            bandwidth: None,
        }
    }
}
