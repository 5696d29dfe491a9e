//! Conditional functionals of a (jittered) joint density.
//!
//! For a continuous response the mean, CDF and quantile of the jittered
//! density equal those of the original density. For a discrete response the
//! mean is unchanged (the noise is symmetric), but the CDF needs a
//! correction: with `f` the jittered density and `t` an integer,
//!
//! ```text
//! P(Z ≤ t | ·) = ∫_{−∞}^t f ds / ∫ f ds  +  f(t) / (2 ∫ f ds)
//! ```
//!
//! because half of the jittered mass of the atom at `t` lies above `t`, and
//! the density at `t` equals that atom's mass. Quantiles are the smallest
//! integers at which the corrected CDF reaches `alpha`.
//!
//! Every functional works on any [`DensitySurface`]: the fitted
//! [`KdeModel`] or an analytic jittered density from [`crate::oracle`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimators::KdeModel;
use crate::oracle::quadrature::adaptive_integral_with_breaks;

/// Conditioning mass below which a query has no local data.
pub const MIN_DENOMINATOR: f64 = 1e-12;
/// Absolute tolerance for response-axis quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;
/// Bisection tolerance for continuous-response quantiles.
pub const QUANTILE_TOLERANCE: f64 = 1e-8;
/// Integers added on each side of the observed range when searching for a
/// discrete quantile.
pub const QUANTILE_MARGIN: i64 = 2;

/// `∫_{−∞}^{upper} f ds` and `∫_{−∞}^{upper} s f ds` along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisIntegrals {
    pub mass: f64,
    pub first_moment: f64,
}

/// A joint density over `dim()` coordinates, plus what the functional layer
/// needs to integrate it along one axis.
pub trait DensitySurface {
    fn dim(&self) -> usize;

    fn density(&self, point: &[f64]) -> f64;

    /// Smallest and largest observed value along `axis`.
    fn observed_range(&self, axis: usize) -> (f64, f64);

    /// How far beyond the observed range the density can carry mass.
    fn reach(&self, axis: usize) -> f64;

    /// Non-smooth points along `axis` inside `(lo, hi)`, used as quadrature
    /// break hints.
    fn breakpoints(&self, _axis: usize, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Closed-form axis integrals, when the surface has them. The default
    /// falls back to adaptive quadrature.
    fn axis_integrals(&self, _axis: usize, _point: &[f64], _upper: f64) -> Option<AxisIntegrals> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ResponseKind {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryKind {
    Mean,
    /// Conditional CDF at a threshold.
    Cdf(f64),
    /// Conditional quantile at a level in `[0, 1]`.
    Quantile(f64),
    /// Class probabilities; the listed columns form a dummy-coded block.
    ClassProbs(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalQuery {
    pub kind: QueryKind,
    pub response_index: usize,
    pub response_kind: ResponseKind,
    /// Values of every non-response column, in column order.
    pub covariate_point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalEstimate {
    /// One value, or one per class for [`QueryKind::ClassProbs`].
    pub values: Vec<f64>,
    /// Estimated conditioning density `∫ f ds` at the covariate point.
    pub denominator_mass: f64,
    pub query: FunctionalQuery,
}

impl ConditionalEstimate {
    pub fn value(&self) -> f64 {
        self.values[0]
    }
}

/// Validated view of a query against a surface.
struct Slice<'a, S: ?Sized> {
    surface: &'a S,
    axis: usize,
    point: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl<'a, S: DensitySurface + ?Sized> Slice<'a, S> {
    fn new(surface: &'a S, query: &FunctionalQuery) -> Result<Self> {
        let dim = surface.dim();
        if query.response_index >= dim {
            return Err(Error::Schema(alloc::format!(
                "response column {} out of range for {dim} columns",
                query.response_index
            )));
        }
        if query.covariate_point.len() + 1 != dim {
            return Err(Error::DimensionMismatch {
                expected: dim - 1,
                got: query.covariate_point.len(),
            });
        }
        let axis = query.response_index;
        let mut point = Vec::with_capacity(dim);
        point.extend_from_slice(&query.covariate_point[..axis]);
        point.push(0.0);
        point.extend_from_slice(&query.covariate_point[axis..]);
        let (min, max) = surface.observed_range(axis);
        let reach = surface.reach(axis);
        Ok(Self {
            surface,
            axis,
            point,
            lo: min - reach - 1.0,
            hi: max + reach + 1.0,
        })
    }

    fn density_at(&self, s: f64) -> f64 {
        let mut p = self.point.clone();
        p[self.axis] = s;
        self.surface.density(&p)
    }

    /// `(∫_{lo}^{upper} f, ∫_{lo}^{upper} s f)`.
    fn integrals(&self, upper: f64) -> Result<AxisIntegrals> {
        if let Some(closed) = self.surface.axis_integrals(self.axis, &self.point, upper) {
            return Ok(closed);
        }
        let upper = upper.min(self.hi);
        if upper <= self.lo {
            return Ok(AxisIntegrals {
                mass: 0.0,
                first_moment: 0.0,
            });
        }
        let breaks = self.surface.breakpoints(self.axis, self.lo, upper);
        let f = |s: f64| self.density_at(s);
        let g = |s: f64| s * self.density_at(s);
        let mass = adaptive_integral_with_breaks(&f, self.lo, upper, &breaks, QUADRATURE_TOLERANCE)?;
        let first_moment = adaptive_integral_with_breaks(&g, self.lo, upper, &breaks, QUADRATURE_TOLERANCE)?;
        Ok(AxisIntegrals { mass, first_moment })
    }

    fn denominator(&self) -> Result<f64> {
        let total = self.integrals(f64::INFINITY)?.mass;
        if !(total > MIN_DENOMINATOR) {
            return Err(Error::NoLocalData { mass: total });
        }
        Ok(total)
    }

    fn cdf(&self, t: f64, kind: ResponseKind, denominator: f64) -> Result<f64> {
        let below = self.integrals(t)?.mass / denominator;
        let value = match kind {
            ResponseKind::Continuous => below,
            ResponseKind::Discrete => below + self.density_at(t) / (2.0 * denominator),
        };
        Ok(value.clamp(0.0, 1.0))
    }
}

/// Conditional mean of the response given the covariate point.
pub fn cond_mean<S: DensitySurface + ?Sized>(surface: &S, query: &FunctionalQuery) -> Result<ConditionalEstimate> {
    let slice = Slice::new(surface, query)?;
    let full = slice.integrals(f64::INFINITY)?;
    if !(full.mass > MIN_DENOMINATOR) {
        return Err(Error::NoLocalData { mass: full.mass });
    }
    Ok(ConditionalEstimate {
        values: alloc::vec![full.first_moment / full.mass],
        denominator_mass: full.mass,
        query: query.clone(),
    })
}

/// Conditional CDF at the query threshold; discrete responses get the
/// half-density correction.
pub fn cond_cdf<S: DensitySurface + ?Sized>(surface: &S, query: &FunctionalQuery) -> Result<ConditionalEstimate> {
    let QueryKind::Cdf(t) = query.kind else {
        return Err(Error::InvalidParameter("cond_cdf needs a Cdf query".into()));
    };
    if query.response_kind == ResponseKind::Discrete && libm::trunc(t) != t {
        return Err(Error::InvalidParameter(alloc::format!(
            "threshold for a discrete response must be an integer, got {t}"
        )));
    }
    let slice = Slice::new(surface, query)?;
    let denominator = slice.denominator()?;
    Ok(ConditionalEstimate {
        values: alloc::vec![slice.cdf(t, query.response_kind, denominator)?],
        denominator_mass: denominator,
        query: query.clone(),
    })
}

/// Conditional quantile: the smallest integer in the observed range
/// (widened by [`QUANTILE_MARGIN`]) whose corrected CDF reaches `alpha` for a
/// discrete response; bisection on the CDF for a continuous one.
pub fn cond_quantile<S: DensitySurface + ?Sized>(surface: &S, query: &FunctionalQuery) -> Result<ConditionalEstimate> {
    let QueryKind::Quantile(alpha) = query.kind else {
        return Err(Error::InvalidParameter("cond_quantile needs a Quantile query".into()));
    };
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(alloc::format!("alpha must be in [0, 1], got {alpha}")));
    }
    let slice = Slice::new(surface, query)?;
    let denominator = slice.denominator()?;
    let value = match query.response_kind {
        ResponseKind::Discrete => {
            let (min, max) = surface.observed_range(slice.axis);
            let first = libm::ceil(min) as i64 - QUANTILE_MARGIN;
            let last = libm::floor(max) as i64 + QUANTILE_MARGIN;
            let mut supremum = 0.0_f64;
            let mut found = None;
            for t in first..=last {
                let c = slice.cdf(t as f64, ResponseKind::Discrete, denominator)?;
                supremum = supremum.max(c);
                if c >= alpha {
                    found = Some(t as f64);
                    break;
                }
            }
            found.ok_or(Error::QuantileSearch { alpha, supremum })?
        }
        ResponseKind::Continuous => {
            let (mut lo, mut hi) = (slice.lo, slice.hi);
            let top = slice.cdf(hi, ResponseKind::Continuous, denominator)?;
            if top < alpha {
                return Err(Error::QuantileSearch { alpha, supremum: top });
            }
            if slice.cdf(lo, ResponseKind::Continuous, denominator)? >= alpha {
                lo
            } else {
                while hi - lo > QUANTILE_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    if slice.cdf(mid, ResponseKind::Continuous, denominator)? >= alpha {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    };
    Ok(ConditionalEstimate {
        values: alloc::vec![value],
        denominator_mass: denominator,
        query: query.clone(),
    })
}

/// Dispatches on the query kind. Class probabilities need a [`KdeModel`];
/// see [`classify`].
pub fn evaluate<S: DensitySurface + ?Sized>(surface: &S, query: &FunctionalQuery) -> Result<ConditionalEstimate> {
    match query.kind {
        QueryKind::Mean => cond_mean(surface, query),
        QueryKind::Cdf(_) => cond_cdf(surface, query),
        QueryKind::Quantile(_) => cond_quantile(surface, query),
        QueryKind::ClassProbs(_) => Err(Error::InvalidParameter(
            "class probabilities are evaluated with `classify`".into(),
        )),
    }
}

/// Class probabilities as conditional means of the dummy columns.
///
/// For each class column the other columns of the block are integrated out
/// (exact for a product kernel), the conditional mean of the class dummy is
/// taken given the covariates, and the resulting vector is clamped to
/// `[0, 1]` and renormalized. `covariate_point` holds the values of every
/// column outside the block, in column order.
pub fn classify(model: &KdeModel, query: &FunctionalQuery) -> Result<ConditionalEstimate> {
    let QueryKind::ClassProbs(block) = &query.kind else {
        return Err(Error::InvalidParameter("classify needs a ClassProbs query".into()));
    };
    if block.len() < 2 {
        return Err(Error::InvalidParameter("a class block needs at least two columns".into()));
    }
    let dim = model.dim();
    if let Some(&bad) = block.iter().find(|&&c| c >= dim) {
        return Err(Error::Schema(alloc::format!("class column {bad} out of range")));
    }
    let covariates: Vec<usize> = (0..dim).filter(|c| !block.contains(c)).collect();
    if query.covariate_point.len() != covariates.len() {
        return Err(Error::DimensionMismatch {
            expected: covariates.len(),
            got: query.covariate_point.len(),
        });
    }

    let mut raw = Vec::with_capacity(block.len());
    let mut denominator = 0.0;
    for &class_col in block {
        let mut keep = covariates.clone();
        keep.push(class_col);
        keep.sort_unstable();
        let axis = keep.iter().position(|&c| c == class_col).expect("class column kept");
        let marginal = model.marginal(&keep)?;
        let sub = FunctionalQuery {
            kind: QueryKind::Mean,
            response_index: axis,
            response_kind: ResponseKind::Discrete,
            covariate_point: query.covariate_point.clone(),
        };
        let est = cond_mean(&marginal, &sub)?;
        denominator = est.denominator_mass;
        raw.push(est.value().clamp(0.0, 1.0));
    }
    let total: f64 = raw.iter().sum();
    let values = if total > 0.0 {
        raw.iter().map(|p| p / total).collect()
    } else {
        alloc::vec![1.0 / raw.len() as f64; raw.len()]
    };
    Ok(ConditionalEstimate {
        values,
        denominator_mass: denominator,
        query: query.clone(),
    })
}
