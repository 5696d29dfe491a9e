use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::noise::NoiseSpec;

/// Probability mass function with finite support `support_min, support_min + 1, …`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscretePmf {
    support_min: i64,
    probabilities: Vec<f64>,
}

const SUM_TOLERANCE: f64 = 1e-12;

impl DiscretePmf {
    pub fn new(support_min: i64, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidParameter("pmf needs at least one atom".into()));
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter("pmf entries must be finite and >= 0".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("pmf sums to {total}, not 1")));
        }
        Ok(Self {
            support_min,
            probabilities,
        })
    }

    pub fn binomial(trials: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("binomial p must be in [0, 1], got {p}")));
        }
        let n = trials as usize;
        let mut probs = Vec::with_capacity(n + 1);
        let mut coef = 1.0_f64;
        for k in 0..=n {
            if k > 0 {
                coef = coef * ((n - k + 1) as f64) / (k as f64);
            }
            probs.push(coef * libm::pow(p, k as f64) * libm::pow(1.0 - p, (n - k) as f64));
        }
        Self::new(0, probs)
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::binomial(1, p)
    }

    /// Poisson(λ) restricted to `{0, …, max}` and renormalized.
    pub fn poisson_truncated(lambda: f64, max: u32) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("poisson rate must be positive, got {lambda}")));
        }
        let mut probs = Vec::with_capacity(max as usize + 1);
        let mut term = libm::exp(-lambda);
        for k in 0..=max {
            if k > 0 {
                term *= lambda / f64::from(k);
            }
            probs.push(term);
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(0, probs)
    }

    pub fn support_min(&self) -> i64 {
        self.support_min
    }

    pub fn support_max(&self) -> i64 {
        self.support_min + self.probabilities.len() as i64 - 1
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `(value, probability)` pairs over the support.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.support_min + i as i64, p))
    }

    pub fn pmf(&self, z: i64) -> f64 {
        if z < self.support_min {
            return 0.0;
        }
        self.probabilities
            .get((z - self.support_min) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn cdf(&self, z: i64) -> f64 {
        self.atoms().take_while(|&(v, _)| v <= z).map(|(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v as f64 * p).sum()
    }

    /// Smallest support point whose CDF reaches `alpha`.
    pub fn quantile(&self, alpha: f64) -> Result<i64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha must be in [0, 1], got {alpha}")));
        }
        let mut acc = 0.0;
        for (v, p) in self.atoms() {
            acc += p;
            if acc >= alpha {
                return Ok(v);
            }
        }
        // rounding can leave the total a hair below 1
        Ok(self.support_max())
    }

    /// Inverse-CDF draw from a uniform variate in `[0, 1)`.
    pub fn draw_from_uniform(&self, u: f64) -> i64 {
        let mut acc = 0.0;
        for (v, p) in self.atoms() {
            acc += p;
            if u < acc {
                return v;
            }
        }
        self.support_max()
    }
}

/// Density of `Z + ε` at `z`: `Σ_{z'} f_Z(z') η(z − z')`.
///
/// Only atoms within one unit of `z` can contribute since `γ2 < 1`, so the
/// sum runs over `⌊z⌋ − 1 ..= ⌈z⌉ + 1` and is exact.
pub fn convolve_density(pmf: &DiscretePmf, spec: &NoiseSpec, z: f64) -> f64 {
    if !z.is_finite() {
        return 0.0;
    }
    let lo = libm::floor(z) as i64 - 1;
    let hi = libm::ceil(z) as i64 + 1;
    (lo.max(pmf.support_min())..=hi.min(pmf.support_max()))
        .map(|atom| pmf.pmf(atom) * spec.density(z - atom as f64))
        .sum()
}

/// Break hints for integrating a convolved density over `[lo, hi]`: every
/// integer `k` in range shifted by `±γ1`, `±γ2`.
pub fn convolution_breaks(spec: &NoiseSpec, lo: f64, hi: f64) -> Vec<f64> {
    let first = libm::floor(lo) as i64 - 1;
    let last = libm::ceil(hi) as i64 + 1;
    let mut out = Vec::new();
    for k in first..=last {
        for kink in spec.kinks() {
            let x = k as f64 + kink;
            if x > lo && x < hi {
                out.push(x);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
