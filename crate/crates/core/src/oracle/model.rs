use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::pmf::{convolution_breaks, DiscretePmf};
use crate::data::{ColumnSchema, MixedDataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise::NoiseSpec;
use crate::regression::DensitySurface;
use crate::rng::{self, Domain};
use crate::special::{normal_cdf, normal_pdf, normal_quantile};

/// `X | Z = z ~ N(mean_intercept + mean_slope·z, (scale_intercept + scale_slope·z)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianConditional {
    pub mean_intercept: f64,
    pub mean_slope: f64,
    pub scale_intercept: f64,
    pub scale_slope: f64,
}

impl GaussianConditional {
    pub fn mean(&self, z: i64) -> f64 {
        self.mean_intercept + self.mean_slope * z as f64
    }

    pub fn scale(&self, z: i64) -> f64 {
        self.scale_intercept + self.scale_slope * z as f64
    }

    pub fn density(&self, z: i64, x: f64) -> f64 {
        let s = self.scale(z);
        normal_pdf((x - self.mean(z)) / s) / s
    }

    pub fn cdf(&self, z: i64, x: f64) -> f64 {
        normal_cdf((x - self.mean(z)) / self.scale(z))
    }

    pub fn quantile(&self, z: i64, alpha: f64) -> f64 {
        self.mean(z) + self.scale(z) * normal_quantile(alpha)
    }

    pub fn draw<R: Rng + ?Sized>(&self, z: i64, rng: &mut R) -> f64 {
        let n: f64 = StandardNormal.sample(rng);
        self.mean(z) + self.scale(z) * n
    }
}

/// `f(z, x) = f_Z(z) · f_{X|Z}(x | z)` with a finite discrete margin and an
/// optional Gaussian conditional for one continuous coordinate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticMixedModel {
    margin: DiscretePmf,
    continuous: Option<GaussianConditional>,
}

/// Target functional for [`true_conditional`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    Mean,
    Cdf(f64),
    Quantile(f64),
}

/// Which coordinate is the response and what it is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    /// Marginal law of the discrete coordinate.
    Discrete,
    /// Discrete coordinate given `X = x`.
    DiscreteGivenContinuousAt(f64),
    /// Discrete coordinate given `X ∈ [a, b]`.
    DiscreteGivenContinuousIn(f64, f64),
    /// Continuous coordinate given `Z = z`.
    ContinuousGivenDiscrete(i64),
}

impl SyntheticMixedModel {
    pub fn discrete(margin: DiscretePmf) -> Self {
        Self {
            margin,
            continuous: None,
        }
    }

    pub fn mixed(margin: DiscretePmf, conditional: GaussianConditional) -> Result<Self> {
        for (z, p) in margin.atoms() {
            if p > 0.0 && !(conditional.scale(z) > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "conditional scale must be positive, got {} at z = {z}",
                    conditional.scale(z)
                )));
            }
        }
        Ok(Self {
            margin,
            continuous: Some(conditional),
        })
    }

    pub fn margin(&self) -> &DiscretePmf {
        &self.margin
    }

    pub fn conditional(&self) -> Option<&GaussianConditional> {
        self.continuous.as_ref()
    }

    pub fn is_mixed(&self) -> bool {
        self.continuous.is_some()
    }

    /// Number of coordinates: 1 (pure discrete) or 2.
    pub fn dim(&self) -> usize {
        1 + usize::from(self.is_mixed())
    }

    /// Joint density w.r.t. counting × Lebesgue measure at an integer `z`.
    pub fn joint_density(&self, z: i64, x: Option<f64>) -> f64 {
        let p = self.margin.pmf(z);
        match (&self.continuous, x) {
            (Some(c), Some(x)) if p > 0.0 => p * c.density(z, x),
            (Some(_), _) => 0.0,
            (None, _) => p,
        }
    }

    /// Draws `n` rows with columns `z` (discrete) and, for mixed models, `x`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<MixedDataset> {
        let mut rng = rng::stream(seed, Domain::Simulation, 0);
        let cols = self.dim();
        let mut rows = Matrix::zeros(n, cols);
        for r in 0..n {
            let u: f64 = rng.random();
            let z = self.margin.draw_from_uniform(u);
            rows.set(r, 0, z as f64);
            if let Some(c) = &self.continuous {
                rows.set(r, 1, c.draw(z, &mut rng));
            }
        }
        let mut schema = vec![ColumnSchema::discrete("z")];
        if self.is_mixed() {
            schema.push(ColumnSchema::continuous("x"));
        }
        MixedDataset::new(schema, rows)
    }

    /// Density of the jittered vector `(Z + ε, X)` as a [`DensitySurface`].
    pub fn jittered(&self, noise: NoiseSpec) -> JitteredModelDensity<'_> {
        JitteredModelDensity { model: self, noise }
    }
}

/// Exact value of a conditional functional of the (unjittered) model.
pub fn true_conditional(model: &SyntheticMixedModel, functional: Functional, condition: Condition) -> Result<f64> {
    match condition {
        Condition::ContinuousGivenDiscrete(z) => {
            let c = model
                .continuous
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("model has no continuous coordinate".into()))?;
            if model.margin.pmf(z) <= 0.0 {
                return Err(Error::UndefinedConditional);
            }
            match functional {
                Functional::Mean => Ok(c.mean(z)),
                Functional::Cdf(t) => Ok(c.cdf(z, t)),
                Functional::Quantile(alpha) => {
                    check_alpha(alpha)?;
                    Ok(c.quantile(z, alpha))
                }
            }
        }
        _ => {
            let weights = discrete_weights(model, condition)?;
            let total: f64 = weights.iter().map(|(_, w)| w).sum();
            if !(total > 0.0) {
                return Err(Error::UndefinedConditional);
            }
            match functional {
                Functional::Mean => Ok(weights.iter().map(|(z, w)| *z as f64 * w).sum::<f64>() / total),
                Functional::Cdf(t) => Ok(weights
                    .iter()
                    .filter(|(z, _)| (*z as f64) <= t)
                    .map(|(_, w)| w)
                    .sum::<f64>()
                    / total),
                Functional::Quantile(alpha) => {
                    check_alpha(alpha)?;
                    let mut acc = 0.0;
                    for (z, w) in &weights {
                        acc += w / total;
                        if acc >= alpha {
                            return Ok(*z as f64);
                        }
                    }
                    Ok(weights.last().map(|(z, _)| *z as f64).unwrap_or(f64::NAN))
                }
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("alpha must be in [0, 1], got {alpha}")))
    }
}

fn discrete_weights(model: &SyntheticMixedModel, condition: Condition) -> Result<Vec<(i64, f64)>> {
    let need_continuous = || {
        model
            .continuous
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("model has no continuous coordinate".into()))
    };
    let atoms = model.margin.atoms();
    Ok(match condition {
        Condition::Discrete => atoms.collect(),
        Condition::DiscreteGivenContinuousAt(x) => {
            let c = need_continuous()?;
            atoms
                .map(|(z, p)| (z, if p > 0.0 { p * c.density(z, x) } else { 0.0 }))
                .collect()
        }
        Condition::DiscreteGivenContinuousIn(a, b) => {
            let c = need_continuous()?;
            if !(a <= b) {
                return Err(Error::InvalidParameter("interval must satisfy a <= b".into()));
            }
            atoms
                .map(|(z, p)| (z, if p > 0.0 { p * (c.cdf(z, b) - c.cdf(z, a)) } else { 0.0 }))
                .collect()
        }
        Condition::ContinuousGivenDiscrete(_) => unreachable!("handled by caller"),
    })
}

/// Analytic density of `(Z + ε, X)` for a synthetic model:
/// `Σ_{z'} f_Z(z') η(z − z') f_{X|Z}(x | z')`.
#[derive(Debug, Clone, Copy)]
pub struct JitteredModelDensity<'a> {
    model: &'a SyntheticMixedModel,
    noise: NoiseSpec,
}

impl JitteredModelDensity<'_> {
    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn model(&self) -> &SyntheticMixedModel {
        self.model
    }
}

impl DensitySurface for JitteredModelDensity<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn density(&self, point: &[f64]) -> f64 {
        let z = point[0];
        if !z.is_finite() {
            return 0.0;
        }
        let pmf = &self.model.margin;
        let lo = (libm::floor(z) as i64 - 1).max(pmf.support_min());
        let hi = (libm::ceil(z) as i64 + 1).min(pmf.support_max());
        let mut total = 0.0;
        for atom in lo..=hi {
            let p = pmf.pmf(atom);
            if p == 0.0 {
                continue;
            }
            let eta = self.noise.density(z - atom as f64);
            if eta == 0.0 {
                continue;
            }
            let cond = match (&self.model.continuous, point.get(1)) {
                (Some(c), Some(&x)) => c.density(atom, x),
                _ => 1.0,
            };
            total += p * eta * cond;
        }
        total
    }

    fn observed_range(&self, axis: usize) -> (f64, f64) {
        let pmf = &self.model.margin;
        match (axis, &self.model.continuous) {
            (0, _) => (pmf.support_min() as f64, pmf.support_max() as f64),
            (_, Some(c)) => pmf
                .atoms()
                .filter(|(_, p)| *p > 0.0)
                .map(|(z, _)| c.mean(z))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m), hi.max(m))),
            (_, None) => (0.0, 0.0),
        }
    }

    fn reach(&self, axis: usize) -> f64 {
        match (axis, &self.model.continuous) {
            (0, _) => self.noise.gamma2(),
            (_, Some(c)) => {
                10.0 * self
                    .model
                    .margin
                    .atoms()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(z, _)| c.scale(z))
                    .fold(0.0, f64::max)
            }
            (_, None) => 0.0,
        }
    }

    fn breakpoints(&self, axis: usize, lo: f64, hi: f64) -> Vec<f64> {
        if axis == 0 {
            convolution_breaks(&self.noise, lo, hi)
        } else {
            Vec::new()
        }
    }
}
