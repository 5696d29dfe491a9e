use alloc::vec::Vec;

use super::bandwidth::{check_override, select_bandwidth};
use super::kernel::Kernel;
use super::FitOptions;
use crate::data::{jitter, ColumnSchema, MixedDataset, Standardization};
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::matrix::Matrix;
use crate::noise::NoiseSpec;

/// Total kernel weight below which a point has no local data.
pub const MIN_LOCAL_WEIGHT: f64 = 1e-12;
const RIDGE_FACTOR: f64 = 1e-8;
const PIVOT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocLinReplicate {
    pub index: u64,
    /// Jittered covariates, standardized.
    pub covariates: Matrix,
    pub response: Vec<f64>,
}

/// Fitted jittering local linear regression of one column on all others.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocLinModel {
    schema: Vec<ColumnSchema>,
    response_index: usize,
    covariate_indices: Vec<usize>,
    noise: NoiseSpec,
    seed: u64,
    kernel: Kernel,
    jitter_response: bool,
    bandwidths: Vec<f64>,
    transform: Standardization,
    replicates: Vec<LocLinReplicate>,
}

/// Fits local linear regression of column `response_index` on the remaining
/// columns after jittering. A discrete response keeps its original values
/// unless `jitter_response` is set.
pub fn fit_loclin(
    dataset: &MixedDataset,
    response_index: usize,
    spec: &NoiseSpec,
    options: &FitOptions,
    jitter_response: bool,
) -> Result<LocLinModel> {
    if options.num_jitters == 0 {
        return Err(Error::InvalidParameter("num_jitters must be at least 1".into()));
    }
    if !dataset.categorical_indices().is_empty() {
        return Err(Error::Schema("categorical columns must be dummy coded before fitting".into()));
    }
    if response_index >= dataset.ncols() {
        return Err(Error::Schema(alloc::format!("response column {response_index} out of range")));
    }
    let covariate_indices: Vec<usize> = (0..dataset.ncols()).filter(|&c| c != response_index).collect();
    let d = covariate_indices.len();
    if d == 0 {
        return Err(Error::InvalidParameter(
            "local linear regression needs at least one covariate".into(),
        ));
    }
    let n = dataset.n();
    if n < d + 2 {
        return Err(Error::InsufficientData { needed: d + 2, got: n });
    }
    let bandwidths = match &options.bandwidth {
        Some(b) => {
            check_override(b, d)?;
            b.clone()
        }
        None => select_bandwidth(n, d)?,
    };

    let response_is_discrete = dataset.schema()[response_index].is_discrete();
    let mut raw = Vec::with_capacity(options.num_jitters);
    for r in 0..options.num_jitters as u64 {
        let jittered = jitter(dataset, spec, options.seed, r)?;
        let response: Vec<f64> = if response_is_discrete && !jitter_response {
            dataset.rows().column(response_index).collect()
        } else {
            jittered.rows().column(response_index).collect()
        };
        raw.push((r, jittered.rows().select_columns(&covariate_indices), response));
    }
    let transform = Standardization::fit_lenient(&raw[0].1)?;
    let replicates = raw
        .into_iter()
        .map(|(index, covariates, response)| LocLinReplicate {
            index,
            covariates: transform.apply_matrix(&covariates),
            response,
        })
        .collect();

    Ok(LocLinModel {
        schema: dataset.schema().to_vec(),
        response_index,
        covariate_indices,
        noise: *spec,
        seed: options.seed,
        kernel: options.kernel,
        jitter_response,
        bandwidths,
        transform,
        replicates,
    })
}

/// Conditional mean estimate at `covariate_point`.
pub fn loclin_eval(model: &LocLinModel, covariate_point: &[f64]) -> Result<f64> {
    model.eval(covariate_point)
}

impl LocLinModel {
    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn response_index(&self) -> usize {
        self.response_index
    }

    pub fn covariate_indices(&self) -> &[usize] {
        &self.covariate_indices
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

    pub fn jitter_response(&self) -> bool {
        self.jitter_response
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn transform(&self) -> &Standardization {
        &self.transform
    }

    pub fn replicates(&self) -> &[LocLinReplicate] {
        &self.replicates
    }

    /// Average over replicates of the local intercept.
    pub fn eval(&self, covariate_point: &[f64]) -> Result<f64> {
        let d = self.covariate_indices.len();
        if covariate_point.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: covariate_point.len(),
            });
        }
        let q = self.transform.apply(covariate_point);
        let mut total = 0.0;
        for rep in &self.replicates {
            total += self.local_intercept(rep, &q)?;
        }
        Ok(total / self.replicates.len() as f64)
    }

    /// Solves `min Σ w_i (y_i − m − βᵀ(c_i − q))²` and returns `m`.
    fn local_intercept(&self, rep: &LocLinReplicate, q: &[f64]) -> Result<f64> {
        let d = q.len();
        let m = d + 1;
        let mut gram = alloc::vec![0.0; m * m];
        let mut rhs = alloc::vec![0.0; m];
        let mut design = alloc::vec![0.0; m];
        let mut total_weight = 0.0;
        for (row, &y) in rep.covariates.rows_iter().zip(&rep.response) {
            let w = self.kernel.product(
                row.iter()
                    .zip(q)
                    .zip(&self.bandwidths)
                    .map(|((&c, &qj), &bj)| (c - qj) / bj),
            );
            if w == 0.0 {
                continue;
            }
            total_weight += w;
            design[0] = 1.0;
            for j in 0..d {
                design[j + 1] = row[j] - q[j];
            }
            for a in 0..m {
                let wa = w * design[a];
                rhs[a] += wa * y;
                for b in a..m {
                    gram[a * m + b] += wa * design[b];
                }
            }
        }
        if total_weight < MIN_LOCAL_WEIGHT {
            return Err(Error::NoLocalData { mass: total_weight });
        }
        for a in 0..m {
            for b in 0..a {
                gram[a * m + b] = gram[b * m + a];
            }
        }
        if let Some(beta) = cholesky_solve(&gram, &rhs, m, PIVOT_TOLERANCE) {
            return Ok(beta[0]);
        }
        let trace: f64 = (0..m).map(|a| gram[a * m + a]).sum();
        let ridge = RIDGE_FACTOR * trace / m as f64;
        for a in 0..m {
            gram[a * m + a] += ridge;
        }
        cholesky_solve(&gram, &rhs, m, 0.0)
            .map(|beta| beta[0])
            .ok_or(Error::NoLocalData { mass: total_weight })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn xy(rows: &[[f64; 2]]) -> MixedDataset {
        MixedDataset::new(
            vec![ColumnSchema::continuous("x"), ColumnSchema::continuous("y")],
            Matrix::from_rows(2, rows),
        )
        .unwrap()
    }

    fn no_noise() -> NoiseSpec {
        NoiseSpec::new(0.0, 1, 0).unwrap()
    }

    #[test]
    fn reproduces_linear_data() {
        let rows: Vec<[f64; 2]> = (0..30).map(|i| [f64::from(i) * 0.1, 3.0 * f64::from(i) * 0.1]).collect();
        let m = fit_loclin(&xy(&rows), 1, &no_noise(), &FitOptions::default(), false).unwrap();
        for &x0 in &[0.0, 0.77, 2.9] {
            assert!((m.eval(&[x0]).unwrap() - 3.0 * x0).abs() < 1e-8);
        }
    }

    #[test]
    fn continuous_response_is_stored_verbatim() {
        let rows = [[0.0, 1.5], [1.0, 2.25], [2.0, -0.125], [3.0, 9.0]];
        let m = fit_loclin(&xy(&rows), 1, &no_noise(), &FitOptions::default(), false).unwrap();
        let want: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        assert_eq!(m.replicates()[0].response, want);
    }

    #[test]
    fn discrete_response_kept_unless_requested() {
        let ds = MixedDataset::new(
            vec![ColumnSchema::continuous("x"), ColumnSchema::discrete("z")],
            Matrix::from_rows(2, &[[0.0, 1.0], [1.0, 2.0], [2.0, 0.0], [3.0, 4.0]]),
        )
        .unwrap();
        let spec = NoiseSpec::new(0.8, 5, 1).unwrap();
        let kept = fit_loclin(&ds, 1, &spec, &FitOptions::default(), false).unwrap();
        assert_eq!(kept.replicates()[0].response, vec![1.0, 2.0, 0.0, 4.0]);
        let jit = fit_loclin(&ds, 1, &spec, &FitOptions::default(), true).unwrap();
        assert_ne!(jit.replicates()[0].response, vec![1.0, 2.0, 0.0, 4.0]);
    }

    #[test]
    fn refit_is_identical() {
        let ds = MixedDataset::new(
            vec![ColumnSchema::discrete("z"), ColumnSchema::continuous("y")],
            Matrix::from_rows(2, &[[0.0, 1.0], [1.0, 2.0], [2.0, 0.5], [3.0, 4.0], [1.0, 1.0]]),
        )
        .unwrap();
        let spec = NoiseSpec::new(0.8, 5, 1).unwrap();
        let opts = FitOptions {
            num_jitters: 3,
            seed: 9,
            ..FitOptions::default()
        };
        assert_eq!(fit_loclin(&ds, 1, &spec, &opts, false).unwrap(), fit_loclin(&ds, 1, &spec, &opts, false).unwrap());
    }

    #[test]
    fn precondition_errors() {
        let one_col = MixedDataset::new(vec![ColumnSchema::continuous("y")], Matrix::from_rows(1, &[[1.0], [2.0], [3.0]])).unwrap();
        assert!(matches!(
            fit_loclin(&one_col, 0, &no_noise(), &FitOptions::default(), false),
            Err(Error::InvalidParameter(_))
        ));
        let short = xy(&[[0.0, 1.0], [1.0, 2.0]]);
        assert!(matches!(
            fit_loclin(&short, 1, &no_noise(), &FitOptions::default(), false),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn no_local_data_far_away() {
        let rows = [[0.0, 1.0], [0.1, 2.0], [0.2, 0.5], [0.3, 4.0]];
        let opts = FitOptions {
            kernel: Kernel::Epanechnikov,
            ..FitOptions::default()
        };
        let m = fit_loclin(&xy(&rows), 1, &no_noise(), &opts, false).unwrap();
        assert!(matches!(m.eval(&[50.0]), Err(Error::NoLocalData { .. })));
    }

    #[test]
    fn ridge_fallback_on_collinear_design() {
        // every covariate value identical: slope is unidentified, intercept is
        // still the weighted mean
        let rows = [[1.0, 1.0], [1.0, 2.0], [1.0, 3.0], [1.0, 6.0]];
        let m = fit_loclin(&xy(&rows), 1, &no_noise(), &FitOptions::default(), false).unwrap();
        assert!((m.eval(&[1.0]).unwrap() - 3.0).abs() < 1e-6);
    }
}
