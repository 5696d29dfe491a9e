//! Typed mixed datasets, categorical dummy coding, jittering and
//! standardization.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::noise::NoiseSpec;
use crate::rng::{self, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ColumnKind {
    /// Integer-valued with a natural order; jittered.
    DiscreteOrdered,
    Continuous,
    /// Unordered labels, stored as indices into `levels` until dummy coded.
    Categorical,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Level labels of a categorical column, sorted; empty otherwise.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub levels: Vec<String>,
}

impl ColumnSchema {
    pub fn discrete(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::DiscreteOrdered,
            levels: Vec::new(),
        }
    }

    pub fn continuous(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Continuous,
            levels: Vec::new(),
        }
    }

    /// Levels are sorted lexicographically and deduplicated.
    pub fn categorical<S: ToString>(name: impl Into<String>, levels: &[S]) -> Self {
        let mut levels: Vec<String> = levels.iter().map(ToString::to_string).collect();
        levels.sort();
        levels.dedup();
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
            levels,
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.kind == ColumnKind::DiscreteOrdered
    }
}

/// Observations `(Z_i, X_i)` with a typed schema.
///
/// Discrete columns hold integer-valued reals, categorical columns hold
/// level indices, and no entry may be missing (NaN) or infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDataset {
    schema: Vec<ColumnSchema>,
    rows: Matrix,
}

impl MixedDataset {
    pub fn new(schema: Vec<ColumnSchema>, rows: Matrix) -> Result<Self> {
        if rows.ncols() != schema.len() {
            return Err(Error::Schema(format!(
                "{} schema columns but {} data columns",
                schema.len(),
                rows.ncols()
            )));
        }
        for (i, col) in schema.iter().enumerate() {
            if schema[..i].iter().any(|c| c.name == col.name) {
                return Err(Error::Schema(format!("duplicate column name `{}`", col.name)));
            }
        }
        for r in 0..rows.nrows() {
            for (c, col) in schema.iter().enumerate() {
                let v = rows.get(r, c);
                if !v.is_finite() {
                    return Err(Error::Schema(format!(
                        "row {r}, column `{}`: missing or non-finite value",
                        col.name
                    )));
                }
                let integral = libm::trunc(v) == v;
                match col.kind {
                    ColumnKind::DiscreteOrdered if !integral => {
                        return Err(Error::Schema(format!(
                            "row {r}, column `{}`: discrete value {v} is not an integer",
                            col.name
                        )));
                    }
                    ColumnKind::Categorical if !integral || v < 0.0 || v as usize >= col.levels.len() => {
                        return Err(Error::Schema(format!(
                            "row {r}, column `{}`: {v} is not a level index",
                            col.name
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(Self { schema, rows })
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.schema.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    fn indices_of(&self, kind: ColumnKind) -> Vec<usize> {
        self.schema
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn discrete_indices(&self) -> Vec<usize> {
        self.indices_of(ColumnKind::DiscreteOrdered)
    }

    pub fn continuous_indices(&self) -> Vec<usize> {
        self.indices_of(ColumnKind::Continuous)
    }

    pub fn categorical_indices(&self) -> Vec<usize> {
        self.indices_of(ColumnKind::Categorical)
    }

    /// Number of discrete (jittered) columns.
    pub fn p(&self) -> usize {
        self.discrete_indices().len()
    }

    /// Number of continuous columns.
    pub fn q(&self) -> usize {
        self.continuous_indices().len()
    }

    /// Replaces every categorical column by its dummy block.
    pub fn dummy_code_all(&self) -> Result<MixedDataset> {
        let mut out = self.clone();
        while let Some(&c) = out.categorical_indices().first() {
            let name = out.schema[c].name.clone();
            out = dummy_code(&out, &name)?;
        }
        Ok(out)
    }
}

/// Replaces categorical column `column_name` with one binary discrete column
/// per level, named `column=level`, in lexicographic level order.
pub fn dummy_code(dataset: &MixedDataset, column_name: &str) -> Result<MixedDataset> {
    let idx = dataset
        .column_index(column_name)
        .ok_or_else(|| Error::Schema(format!("no column named `{column_name}`")))?;
    let col = &dataset.schema[idx];
    if col.kind != ColumnKind::Categorical {
        return Err(Error::Schema(format!("column `{column_name}` is not categorical")));
    }
    let k = col.levels.len();
    if k < 2 {
        return Err(Error::DegenerateColumn(format!(
            "categorical column `{column_name}` has {k} level(s); dummy coding needs at least 2"
        )));
    }

    let mut schema = Vec::with_capacity(dataset.ncols() + k - 1);
    schema.extend_from_slice(&dataset.schema[..idx]);
    schema.extend(col.levels.iter().map(|l| ColumnSchema::discrete(format!("{column_name}={l}"))));
    schema.extend_from_slice(&dataset.schema[idx + 1..]);

    let n = dataset.n();
    let mut rows = Matrix::zeros(n, schema.len());
    for r in 0..n {
        let src = dataset.rows.row(r);
        let dst = rows.row_mut(r);
        dst[..idx].copy_from_slice(&src[..idx]);
        dst[idx + src[idx] as usize] = 1.0;
        dst[idx + k..].copy_from_slice(&src[idx + 1..]);
    }
    MixedDataset::new(schema, rows)
}

/// A dataset whose discrete columns carry added noise.
#[derive(Debug, Clone, PartialEq)]
pub struct JitteredDataset {
    schema: Vec<ColumnSchema>,
    noise: NoiseSpec,
    seed: u64,
    replicate_index: u64,
    rows: Matrix,
}

impl JitteredDataset {
    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replicate_index(&self) -> u64 {
        self.replicate_index
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn into_rows(self) -> Matrix {
        self.rows
    }
}

/// Adds independent noise from `spec` to every discrete column.
///
/// Noise comes from the jitter stream `(seed, replicate_index)`, so equal
/// inputs give bit-identical output and distinct replicate indices give
/// independent replicates. Continuous columns are copied unchanged.
/// Categorical columns must be dummy coded first.
pub fn jitter(dataset: &MixedDataset, spec: &NoiseSpec, seed: u64, replicate_index: u64) -> Result<JitteredDataset> {
    if !dataset.categorical_indices().is_empty() {
        return Err(Error::Schema(
            "categorical columns must be dummy coded before jittering".into(),
        ));
    }
    let discrete = dataset.discrete_indices();
    if spec.dims() != discrete.len() {
        return Err(Error::Schema(format!(
            "noise has {} dimensions but the dataset has {} discrete columns",
            spec.dims(),
            discrete.len()
        )));
    }
    let mut stream = rng::stream(seed, Domain::Jitter, replicate_index);
    let noise = spec.sample_with(&mut stream, dataset.n());
    let mut rows = dataset.rows.clone();
    for r in 0..dataset.n() {
        for (k, &c) in discrete.iter().enumerate() {
            rows.set(r, c, rows.get(r, c) + noise.get(r, k));
        }
    }
    Ok(JitteredDataset {
        schema: dataset.schema.clone(),
        noise: *spec,
        seed,
        replicate_index,
        rows,
    })
}

/// Per-column affine map `x ↦ (x − mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardization {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardization {
    pub fn identity(dims: usize) -> Self {
        Self {
            means: alloc::vec![0.0; dims],
            scales: alloc::vec![1.0; dims],
        }
    }

    /// Sample means and `n − 1` standard deviations; zero spread is an error.
    pub fn fit(rows: &Matrix) -> Result<Self> {
        Self::fit_inner(rows, false)
    }

    /// Like [`Standardization::fit`], but a column with zero spread keeps
    /// unit scale (it is only centered).
    pub fn fit_lenient(rows: &Matrix) -> Result<Self> {
        Self::fit_inner(rows, true)
    }

    fn fit_inner(rows: &Matrix, lenient: bool) -> Result<Self> {
        let n = rows.nrows();
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        let mut means = Vec::with_capacity(rows.ncols());
        let mut scales = Vec::with_capacity(rows.ncols());
        for c in 0..rows.ncols() {
            let mean = rows.column(c).sum::<f64>() / n as f64;
            let ss: f64 = rows.column(c).map(|v| (v - mean) * (v - mean)).sum();
            let sd = libm::sqrt(ss / (n - 1) as f64);
            let sd = if sd > 0.0 {
                sd
            } else if lenient {
                1.0
            } else {
                return Err(Error::DegenerateColumn(format!("column {c} has zero variance")));
            };
            means.push(mean);
            scales.push(sd);
        }
        Ok(Self { means, scales })
    }

    pub fn dims(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    #[inline]
    pub fn apply_value(&self, col: usize, x: f64) -> f64 {
        (x - self.means[col]) / self.scales[col]
    }

    #[inline]
    pub fn invert_value(&self, col: usize, u: f64) -> f64 {
        u * self.scales[col] + self.means[col]
    }

    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        point.iter().enumerate().map(|(c, &x)| self.apply_value(c, x)).collect()
    }

    pub fn invert(&self, point: &[f64]) -> Vec<f64> {
        point.iter().enumerate().map(|(c, &u)| self.invert_value(c, u)).collect()
    }

    pub fn apply_matrix(&self, rows: &Matrix) -> Matrix {
        let mut out = rows.clone();
        for r in 0..out.nrows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = self.apply_value(c, *v);
            }
        }
        out
    }

    pub fn invert_matrix(&self, rows: &Matrix) -> Matrix {
        let mut out = rows.clone();
        for r in 0..out.nrows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = self.invert_value(c, *v);
            }
        }
        out
    }

    /// Restriction to the given columns.
    pub fn select(&self, cols: &[usize]) -> Self {
        Self {
            means: cols.iter().map(|&c| self.means[c]).collect(),
            scales: cols.iter().map(|&c| self.scales[c]).collect(),
        }
    }
}

/// Centers and scales every column to unit sample variance.
pub fn standardize(dataset: &MixedDataset) -> Result<(Matrix, Standardization)> {
    let t = Standardization::fit(dataset.rows())?;
    Ok((t.apply_matrix(dataset.rows()), t))
}
