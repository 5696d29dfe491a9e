//! CSV ingestion and output. Header row required, `,` delimiter, `.`
//! decimals. Every header column must be declared in the schema.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use mixjitter::data::{ColumnKind, ColumnSchema, MixedDataset};
use mixjitter::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Column roles by name, as given by `--discrete`, `--continuous` and
/// `--categorical`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemaSpec {
    pub discrete: Vec<String>,
    pub continuous: Vec<String>,
    pub categorical: Vec<String>,
}

impl SchemaSpec {
    pub fn is_empty(&self) -> bool {
        self.discrete.is_empty() && self.continuous.is_empty() && self.categorical.is_empty()
    }

    fn kind_of(&self, name: &str) -> CliResult<ColumnKind> {
        let hits: Vec<ColumnKind> = [
            (&self.discrete, ColumnKind::DiscreteOrdered),
            (&self.continuous, ColumnKind::Continuous),
            (&self.categorical, ColumnKind::Categorical),
        ]
        .into_iter()
        .filter(|(names, _)| names.iter().any(|n| n == name))
        .map(|(_, k)| k)
        .collect();
        match hits.as_slice() {
            [k] => Ok(*k),
            [] => Err(CliError::Data(format!("column `{name}` has no declared kind"))),
            _ => Err(CliError::Data(format!("column `{name}` is declared more than once"))),
        }
    }

    fn check_declared_present(&self, header: &[String]) -> CliResult<()> {
        for name in self.discrete.iter().chain(&self.continuous).chain(&self.categorical) {
            if !header.iter().any(|h| h == name) {
                return Err(CliError::Data(format!("declared column `{name}` is not in the header")));
            }
        }
        Ok(())
    }
}

pub fn load_csv(path: &Path, schema: &SchemaSpec) -> CliResult<MixedDataset> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_csv(file, schema).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_csv<R: Read>(reader: R, schema: &SchemaSpec) -> CliResult<MixedDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("unreadable header: {e}")))?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();
    schema.check_declared_present(&header)?;
    let kinds = header.iter().map(|h| schema.kind_of(h)).collect::<CliResult<Vec<_>>>()?;

    let mut raw: Vec<csv::StringRecord> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Data(format!("row {}: {e}", i + 1)))?;
        raw.push(rec);
    }

    let levels: Vec<Vec<String>> = kinds
        .iter()
        .enumerate()
        .map(|(c, kind)| match kind {
            ColumnKind::Categorical => raw
                .iter()
                .map(|r| r[c].trim().to_owned())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            _ => Vec::new(),
        })
        .collect();

    let mut rows = Matrix::zeros(raw.len(), header.len());
    for (r, rec) in raw.iter().enumerate() {
        for (c, field) in rec.iter().enumerate() {
            let field = field.trim();
            let value = match kinds[c] {
                ColumnKind::Categorical => levels[c].binary_search_by(|l| l.as_str().cmp(field)).unwrap() as f64,
                kind => {
                    let cell = |what: &str| CliError::Data(format!("row {}, column `{}`: {what}", r + 1, header[c]));
                    let v = field
                        .parse::<f64>()
                        .map_err(|_| cell(&format!("`{field}` is not a number")))?;
                    if !v.is_finite() {
                        return Err(cell(&format!("`{field}` is not finite")));
                    }
                    if kind == ColumnKind::DiscreteOrdered && v.trunc() != v {
                        return Err(cell(&format!("discrete value `{field}` is not an integer")));
                    }
                    v
                }
            };
            rows.set(r, c, value);
        }
    }

    let columns = header
        .iter()
        .zip(&kinds)
        .zip(&levels)
        .map(|((name, kind), lv)| match kind {
            ColumnKind::DiscreteOrdered => ColumnSchema::discrete(name.clone()),
            ColumnKind::Continuous => ColumnSchema::continuous(name.clone()),
            ColumnKind::Categorical => ColumnSchema::categorical(name.clone(), lv),
        })
        .collect();
    MixedDataset::new(columns, rows).map_err(|e| CliError::Data(e.to_string()))
}

/// Writes a header and rows. Categorical cells are written as their level
/// labels; numbers use the shortest representation that parses back to the
/// same value.
pub fn write_csv<W: Write>(writer: W, schema: &[ColumnSchema], rows: &Matrix) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let to_data = |e: csv::Error| CliError::Data(format!("writing CSV: {e}"));
    w.write_record(schema.iter().map(|c| c.name.as_str())).map_err(to_data)?;
    for row in rows.rows_iter() {
        let fields = row.iter().zip(schema).map(|(&v, col)| match col.kind {
            ColumnKind::Categorical => col.levels[v as usize].clone(),
            _ => format_number(v),
        });
        w.write_record(fields).map_err(to_data)?;
    }
    w.flush().map_err(|e| CliError::Data(format!("writing CSV: {e}")))
}

pub fn write_dataset<W: Write>(writer: W, dataset: &MixedDataset) -> CliResult<()> {
    write_csv(writer, dataset.schema(), dataset.rows())
}

pub(crate) fn format_number(v: f64) -> String {
    format!("{v}")
}
