use alloc::vec::Vec;

use super::bandwidth::{check_override, select_bandwidth};
use super::kernel::Kernel;
use super::FitOptions;
use crate::data::{jitter, ColumnSchema, MixedDataset, Standardization};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise::NoiseSpec;
use crate::regression::{AxisIntegrals, DensitySurface};

/// One jittered copy of the data on the standardized scale.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Replicate {
    pub index: u64,
    pub rows: Matrix,
}

/// Fitted jittering kernel density estimator.
///
/// Jitters are drawn once at fit time. Each replicate is standardized with
/// the transform estimated on replicate 0, and the estimate is the average
/// of the per-replicate product-kernel estimates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KdeModel {
    schema: Vec<ColumnSchema>,
    noise: NoiseSpec,
    seed: u64,
    kernel: Kernel,
    bandwidths: Vec<f64>,
    transform: Standardization,
    replicates: Vec<Replicate>,
    /// Min and max of the jittered values per column, original scale.
    observed: Vec<(f64, f64)>,
}

/// Fits a jittered KDE. Categorical columns are dummy coded first.
pub fn fit_kde(dataset: &MixedDataset, spec: &NoiseSpec, options: &FitOptions) -> Result<KdeModel> {
    if options.num_jitters == 0 {
        return Err(Error::InvalidParameter("num_jitters must be at least 1".into()));
    }
    let dataset = dataset.dummy_code_all()?;
    let n = dataset.n();
    let d = dataset.ncols();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let bandwidths = match &options.bandwidth {
        Some(b) => {
            check_override(b, d)?;
            b.clone()
        }
        None => select_bandwidth(n, d)?,
    };

    let mut raw = Vec::with_capacity(options.num_jitters);
    for r in 0..options.num_jitters as u64 {
        raw.push(jitter(&dataset, spec, options.seed, r)?);
    }
    let transform = Standardization::fit_lenient(raw[0].rows())?;
    let mut observed = alloc::vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for rep in &raw {
        for row in rep.rows().rows_iter() {
            for (c, &v) in row.iter().enumerate() {
                observed[c].0 = observed[c].0.min(v);
                observed[c].1 = observed[c].1.max(v);
            }
        }
    }
    let replicates = raw
        .iter()
        .map(|rep| Replicate {
            index: rep.replicate_index(),
            rows: transform.apply_matrix(rep.rows()),
        })
        .collect();

    Ok(KdeModel {
        schema: dataset.schema().to_vec(),
        noise: *spec,
        seed: options.seed,
        kernel: options.kernel,
        bandwidths,
        transform,
        replicates,
        observed,
    })
}

/// Density estimate at `point` (original units).
pub fn kde_eval(model: &KdeModel, point: &[f64]) -> Result<f64> {
    model.eval(point)
}

impl KdeModel {
    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Bandwidths on the standardized scale.
    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn transform(&self) -> &Standardization {
        &self.transform
    }

    pub fn replicates(&self) -> &[Replicate] {
        &self.replicates
    }

    pub fn num_jitters(&self) -> usize {
        self.replicates.len()
    }

    pub fn n(&self) -> usize {
        self.replicates.first().map_or(0, |r| r.rows.nrows())
    }

    pub fn dim(&self) -> usize {
        self.schema.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(())
    }

    /// `1 / ∏_j scale_j`: converts standardized densities to original units.
    fn jacobian(&self, axes: impl Iterator<Item = usize>) -> f64 {
        1.0 / axes.map(|j| self.transform.scales()[j]).product::<f64>()
    }

    /// Estimate from replicate `r` alone.
    pub fn eval_replicate(&self, r: usize, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        let q = self.transform.apply(point);
        Ok(self.replicate_density(&self.replicates[r].rows, &q))
    }

    /// Average of [`KdeModel::eval_replicate`] over all replicates.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        Ok(self.eval_unchecked(point))
    }

    fn eval_unchecked(&self, point: &[f64]) -> f64 {
        let q = self.transform.apply(point);
        let total: f64 = self
            .replicates
            .iter()
            .map(|rep| self.replicate_density(&rep.rows, &q))
            .sum();
        total / self.replicates.len() as f64
    }

    fn replicate_density(&self, rows: &Matrix, q: &[f64]) -> f64 {
        let b = &self.bandwidths;
        let sum: f64 = rows
            .rows_iter()
            .map(|row| {
                self.kernel
                    .product(row.iter().zip(q).zip(b).map(|((&x, &qj), &bj)| (x - qj) / bj))
            })
            .sum();
        let norm = rows.nrows() as f64 * b.iter().product::<f64>();
        sum / norm * self.jacobian(0..self.dim())
    }

    /// The estimator restricted to the columns in `keep`.
    ///
    /// For a product kernel this is exactly the marginal of the full
    /// estimate over the dropped columns.
    pub fn marginal(&self, keep: &[usize]) -> Result<KdeModel> {
        if let Some(&bad) = keep.iter().find(|&&c| c >= self.dim()) {
            return Err(Error::Schema(alloc::format!("column index {bad} out of range")));
        }
        Ok(KdeModel {
            schema: keep.iter().map(|&c| self.schema[c].clone()).collect(),
            noise: self.noise,
            seed: self.seed,
            kernel: self.kernel,
            bandwidths: keep.iter().map(|&c| self.bandwidths[c]).collect(),
            transform: self.transform.select(keep),
            replicates: self
                .replicates
                .iter()
                .map(|r| Replicate {
                    index: r.index,
                    rows: r.rows.select_columns(keep),
                })
                .collect(),
            observed: keep.iter().map(|&c| self.observed[c]).collect(),
        })
    }
}

impl DensitySurface for KdeModel {
    fn dim(&self) -> usize {
        self.schema.len()
    }

    fn density(&self, point: &[f64]) -> f64 {
        self.eval_unchecked(point)
    }

    fn observed_range(&self, axis: usize) -> (f64, f64) {
        self.observed[axis]
    }

    fn reach(&self, axis: usize) -> f64 {
        6.0 * self.bandwidths[axis] * self.transform.scales()[axis]
    }

    /// Epanechnikov estimates have kinks at every jittered observation ± one
    /// bandwidth; Gaussian estimates are smooth.
    fn breakpoints(&self, axis: usize, lo: f64, hi: f64) -> Vec<f64> {
        if self.kernel.support_radius().is_none() {
            return Vec::new();
        }
        let b = self.bandwidths[axis];
        let mut out: Vec<f64> = self
            .replicates
            .iter()
            .flat_map(|r| r.rows.column(axis))
            .flat_map(|u| [u - b, u + b])
            .map(|u| self.transform.invert_value(axis, u))
            .filter(|&x| x > lo && x < hi)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Closed form: along one axis each kernel term integrates to its kernel
    /// CDF, and its first moment to `center·CDF + scale·b·∫vK(v)dv`.
    fn axis_integrals(&self, axis: usize, point: &[f64], upper: f64) -> Option<AxisIntegrals> {
        let d = self.dim();
        let q = self.transform.apply(point);
        let (mean_a, scale_a) = (self.transform.means()[axis], self.transform.scales()[axis]);
        let b_a = self.bandwidths[axis];
        let t = if upper == f64::INFINITY {
            f64::INFINITY
        } else {
            self.transform.apply_value(axis, upper)
        };
        let other_norm: f64 = (0..d).filter(|&j| j != axis).map(|j| self.bandwidths[j]).product::<f64>()
            * (0..d).filter(|&j| j != axis).map(|j| self.transform.scales()[j]).product::<f64>();

        let mut mass = 0.0;
        let mut first = 0.0;
        for rep in &self.replicates {
            let (mut m0, mut m1) = (0.0, 0.0);
            for row in rep.rows.rows_iter() {
                let w = self.kernel.product(
                    (0..d)
                        .filter(|&j| j != axis)
                        .map(|j| (row[j] - q[j]) / self.bandwidths[j]),
                );
                if w == 0.0 {
                    continue;
                }
                let v = (t - row[axis]) / b_a;
                let cdf = self.kernel.cdf(v);
                let center = mean_a + scale_a * row[axis];
                m0 += w * cdf;
                m1 += w * (center * cdf + scale_a * b_a * self.kernel.partial_first_moment(v));
            }
            let norm = rep.rows.nrows() as f64 * other_norm;
            mass += m0 / norm;
            first += m1 / norm;
        }
        let j = self.replicates.len() as f64;
        Some(AxisIntegrals {
            mass: mass / j,
            first_moment: first / j,
        })
    }
}
