use std::fs::File;
use std::path::Path;

use mixjitter::data::ColumnSchema;
use mixjitter::estimators::{KdeModel, LocLinModel};
use mixjitter::regression::{classify, evaluate, FunctionalQuery, QueryKind, ResponseKind};
use rayon::prelude::*;

use crate::args::{EvalArgs, FunctionalKind};
use crate::artifact::{Artifact, FittedModel};
use crate::csvio::format_number;
use crate::error::{CliError, CliResult};
use crate::emit;

/// One output row: a label, the query point, the estimate and the
/// conditioning mass (absent for plain densities).
struct Row {
    kind: String,
    point: Vec<f64>,
    value: f64,
    denominator_mass: Option<f64>,
}

/// A fully specified evaluation: which columns a point fills and how to
/// turn a point into rows.
struct Plan<'a> {
    columns: Vec<String>,
    eval: Box<PointEval<'a>>,
}

type PointEval<'a> = dyn Fn(&[f64]) -> CliResult<Vec<Row>> + Sync + 'a;

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let artifact = Artifact::load(&args.model)?;
    let plan = match &artifact.fitted {
        FittedModel::Kde(m) => kde_plan(m, args)?,
        FittedModel::Loclin(m) => loclin_plan(m, args)?,
    };
    let points = collect_points(args, &plan.columns)?;
    let results: Vec<CliResult<Vec<Row>>> = points.par_iter().map(|p| (plan.eval)(p)).collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["kind"]
        .into_iter()
        .chain(plan.columns.iter().map(String::as_str))
        .chain(["value", "denominator_mass"]);
    w.write_record(header).map_err(csv_err)?;
    for rows in results {
        for row in rows? {
            let mut rec = vec![row.kind];
            rec.extend(row.point.iter().map(|&v| format_number(v)));
            rec.push(format_number(row.value));
            rec.push(row.denominator_mass.map(format_number).unwrap_or_default());
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    let buf = w.into_inner().map_err(|e| CliError::Data(format!("writing CSV: {e}")))?;
    emit(args.output.as_deref(), &buf)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(format!("writing CSV: {e}"))
}

fn names(schema: &[ColumnSchema], cols: &[usize]) -> Vec<String> {
    cols.iter().map(|&c| schema[c].name.clone()).collect()
}

fn response_name(args: &EvalArgs) -> CliResult<&str> {
    args.response
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--functional {:?} needs --response", args.functional).to_lowercase()))
}

fn kde_plan<'a>(model: &'a KdeModel, args: &EvalArgs) -> CliResult<Plan<'a>> {
    let schema = model.schema();
    let dim = schema.len();
    if args.functional == FunctionalKind::Density {
        return Ok(Plan {
            columns: names(schema, &(0..dim).collect::<Vec<_>>()),
            eval: Box::new(move |p| {
                Ok(vec![Row {
                    kind: "density".into(),
                    point: p.to_vec(),
                    value: model.eval(p)?,
                    denominator_mass: None,
                }])
            }),
        });
    }

    let name = response_name(args)?;
    if args.functional == FunctionalKind::Classify {
        let prefix = format!("{name}=");
        let block: Vec<usize> = (0..dim).filter(|&c| schema[c].name.starts_with(&prefix)).collect();
        if block.len() < 2 {
            return Err(CliError::Data(format!("model has no dummy-coded categorical column `{name}`")));
        }
        let labels: Vec<String> = block.iter().map(|&c| schema[c].name.clone()).collect();
        let covariates: Vec<usize> = (0..dim).filter(|c| !block.contains(c)).collect();
        return Ok(Plan {
            columns: names(schema, &covariates),
            eval: Box::new(move |p| {
                let est = classify(
                    model,
                    &FunctionalQuery {
                        kind: QueryKind::ClassProbs(block.clone()),
                        response_index: block[0],
                        response_kind: ResponseKind::Discrete,
                        covariate_point: p.to_vec(),
                    },
                )?;
                Ok(labels
                    .iter()
                    .zip(&est.values)
                    .map(|(label, &value)| Row {
                        kind: format!("prob({label})"),
                        point: p.to_vec(),
                        value,
                        denominator_mass: Some(est.denominator_mass),
                    })
                    .collect())
            }),
        });
    }

    let response = model
        .column_index(name)
        .ok_or_else(|| CliError::Data(format!("model has no column named `{name}`")))?;
    let response_kind = if schema[response].is_discrete() {
        ResponseKind::Discrete
    } else {
        ResponseKind::Continuous
    };
    let (kind, label) = match args.functional {
        FunctionalKind::Mean => (QueryKind::Mean, "mean".to_owned()),
        FunctionalKind::Cdf => {
            let t = args
                .threshold
                .ok_or_else(|| CliError::Usage("--functional cdf needs --threshold".into()))?;
            (QueryKind::Cdf(t), format!("cdf({})", format_number(t)))
        }
        FunctionalKind::Quantile => {
            let a = args
                .alpha
                .ok_or_else(|| CliError::Usage("--functional quantile needs --alpha".into()))?;
            (QueryKind::Quantile(a), format!("quantile({})", format_number(a)))
        }
        FunctionalKind::Density | FunctionalKind::Classify => unreachable!("handled above"),
    };
    let covariates: Vec<usize> = (0..dim).filter(|&c| c != response).collect();
    Ok(Plan {
        columns: names(schema, &covariates),
        eval: Box::new(move |p| {
            let est = evaluate(
                model,
                &FunctionalQuery {
                    kind: kind.clone(),
                    response_index: response,
                    response_kind,
                    covariate_point: p.to_vec(),
                },
            )?;
            Ok(vec![Row {
                kind: label.clone(),
                point: p.to_vec(),
                value: est.value(),
                denominator_mass: Some(est.denominator_mass),
            }])
        }),
    })
}

fn loclin_plan<'a>(model: &'a LocLinModel, args: &EvalArgs) -> CliResult<Plan<'a>> {
    if args.functional != FunctionalKind::Mean {
        return Err(CliError::Usage(
            "a local linear model only supports --functional mean".into(),
        ));
    }
    let fitted_response = &model.schema()[model.response_index()].name;
    if let Some(r) = &args.response {
        if r != fitted_response {
            return Err(CliError::Usage(format!(
                "model was fitted with response `{fitted_response}`, not `{r}`"
            )));
        }
    }
    Ok(Plan {
        columns: names(model.schema(), model.covariate_indices()),
        eval: Box::new(move |p| {
            Ok(vec![Row {
                kind: "mean".into(),
                point: p.to_vec(),
                value: model.eval(p)?,
                denominator_mass: None,
            }])
        }),
    })
}

fn collect_points(args: &EvalArgs, columns: &[String]) -> CliResult<Vec<Vec<f64>>> {
    let mut points = Vec::new();
    for (i, text) in args.at.iter().enumerate() {
        let values = if text.trim().is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("--at #{}: `{s}` is not a number", i + 1)))
                })
                .collect::<CliResult<Vec<_>>>()?
        };
        if values.len() != columns.len() {
            return Err(CliError::Usage(format!(
                "--at #{}: expected {} value(s) for columns [{}], got {}",
                i + 1,
                columns.len(),
                columns.join(","),
                values.len()
            )));
        }
        points.push(values);
    }
    if let Some(path) = &args.points {
        points.extend(read_points(path, columns)?);
    }
    if points.is_empty() {
        if columns.is_empty() {
            points.push(Vec::new());
        } else {
            return Err(CliError::Usage(format!(
                "no evaluation points; give --at or --points for columns [{}]",
                columns.join(",")
            )));
        }
    }
    Ok(points)
}

/// Reads points from a CSV whose header contains every column in `columns`;
/// other columns are ignored.
fn read_points(path: &Path, columns: &[String]) -> CliResult<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let data_err = |msg: String| CliError::Data(format!("{}: {msg}", path.display()));
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| data_err(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();
    let positions = columns
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| data_err(format!("missing column `{c}`")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| data_err(format!("row {}: {e}", r + 1)))?;
        let point = positions
            .iter()
            .zip(columns)
            .map(|(&i, name)| {
                let s = rec[i].trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| data_err(format!("row {}, column `{name}`: `{s}` is not a finite number", r + 1)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        out.push(point);
    }
    Ok(out)
}
