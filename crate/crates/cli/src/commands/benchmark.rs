use std::fmt::Write as _;

use mixjitter::estimators::{fit_kde, FitOptions, Kernel};
use mixjitter::oracle::SyntheticMixedModel;
use mixjitter::regression::{cond_cdf, cond_mean, FunctionalQuery, QueryKind, ResponseKind};
use mixjitter::NoiseSpec;
use rayon::prelude::*;

use crate::args::{BenchFunctional, BenchmarkArgs};
use crate::config::ModelConfig;
use crate::csvio::format_number;
use crate::error::{CliError, CliResult};
use crate::{emit, resolve};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub seed: u64,
    pub functional: BenchFunctional,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub base_seed: u64,
    pub functionals: Vec<BenchFunctional>,
    pub theta: f64,
    pub nu: u32,
    pub kernel: Kernel,
    pub jitters: usize,
}

/// `n_min, n_min·ratio, …` rounded to integers, `steps` values.
pub fn geometric_grid(n_min: usize, ratio: f64, steps: usize) -> CliResult<Vec<usize>> {
    if !(ratio > 1.0) || steps == 0 || n_min < 2 {
        return Err(CliError::Usage("geometric grid needs n_min ≥ 2, ratio > 1 and steps ≥ 1".into()));
    }
    Ok((0..steps)
        .map(|k| (n_min as f64 * ratio.powi(k as i32)).round() as usize)
        .collect())
}

fn query(kind: QueryKind) -> FunctionalQuery {
    FunctionalQuery {
        kind,
        response_index: 0,
        response_kind: ResponseKind::Discrete,
        covariate_point: Vec::new(),
    }
}

/// Errors of every requested functional for one `(n, seed)` cell. The data
/// are drawn with `seed`, and the jitters use the same seed in their own
/// stream domain.
pub fn run_cell(model: &SyntheticMixedModel, plan: &BenchPlan, n: usize, seed: u64) -> CliResult<Vec<BenchRecord>> {
    let data = model.sample(n, seed)?;
    let spec = NoiseSpec::new(plan.theta, plan.nu, data.p())?;
    let options = FitOptions {
        kernel: plan.kernel,
        num_jitters: plan.jitters,
        seed,
        bandwidth: None,
    };
    let fitted = fit_kde(&data, &spec, &options)?;
    let margin_model = if fitted.dim() > 1 { fitted.marginal(&[0])? } else { fitted };
    let pmf = model.margin();
    let atoms: Vec<(i64, f64)> = pmf.atoms().collect();

    let mut out = Vec::with_capacity(plan.functionals.len());
    for &functional in &plan.functionals {
        let error = match functional {
            BenchFunctional::KdeMae => {
                let mut total = 0.0;
                for &(z, p) in &atoms {
                    total += (margin_model.eval(&[z as f64])? - p).abs();
                }
                total / atoms.len() as f64
            }
            BenchFunctional::CondMean => (cond_mean(&margin_model, &query(QueryKind::Mean))?.value() - pmf.mean()).abs(),
            BenchFunctional::CdfMae => {
                let mut total = 0.0;
                for &(z, _) in &atoms {
                    let est = cond_cdf(&margin_model, &query(QueryKind::Cdf(z as f64)))?.value();
                    total += (est - pmf.cdf(z)).abs();
                }
                total / atoms.len() as f64
            }
        };
        out.push(BenchRecord { n, seed, functional, error });
    }
    Ok(out)
}

/// Runs every cell concurrently. Records come back sorted by
/// `(n, seed, functional)`.
pub fn run_grid(model: &SyntheticMixedModel, plan: &BenchPlan) -> CliResult<Vec<BenchRecord>> {
    let cells: Vec<(usize, u64)> = plan
        .sizes
        .iter()
        .flat_map(|&n| (0..plan.seeds).map(move |i| (n, plan.base_seed.wrapping_add(i))))
        .collect();
    let results: Vec<CliResult<Vec<BenchRecord>>> =
        cells.par_iter().map(|&(n, seed)| run_cell(model, plan, n, seed)).collect();
    let mut records = Vec::with_capacity(cells.len() * plan.functionals.len());
    for r in results {
        records.extend(r?);
    }
    records.sort_by_key(|r| (r.n, r.seed, r.functional));
    Ok(records)
}

/// Per-functional, per-n mean and across-seed standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub functional: BenchFunctional,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryLine> {
    let mut keys: Vec<(BenchFunctional, usize)> = records.iter().map(|r| (r.functional, r.n)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(functional, n)| {
            let errs: Vec<f64> = records
                .iter()
                .filter(|r| r.functional == functional && r.n == n)
                .map(|r| r.error)
                .collect();
            let k = errs.len() as f64;
            let mean = errs.iter().sum::<f64>() / k;
            let sd = if errs.len() > 1 {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryLine { functional, n, mean, sd }
        })
        .collect()
}

/// Least-squares slope of `ln(mean error)` on `ln n`.
pub fn log_log_slope(lines: &[SummaryLine], functional: BenchFunctional) -> Option<f64> {
    let pts: Vec<(f64, f64)> = lines
        .iter()
        .filter(|l| l.functional == functional && l.mean > 0.0)
        .map(|l| ((l.n as f64).ln(), l.mean.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from("n,seed,functional,error\n");
    for r in records {
        let _ = writeln!(s, "{},{},{},{}", r.n, r.seed, r.functional.name(), format_number(r.error));
    }
    s
}

pub fn render_summary(lines: &[SummaryLine], functionals: &[BenchFunctional]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>8} {:>12} {:>12}", "functional", "n", "mean_error", "sd_error");
    for l in lines {
        let _ = writeln!(s, "{:<10} {:>8} {:>12.6} {:>12.6}", l.functional.name(), l.n, l.mean, l.sd);
    }
    for &f in functionals {
        match log_log_slope(lines, f) {
            Some(b) => {
                let _ = writeln!(s, "slope {:<10} {:>8.4}", f.name(), b);
            }
            None => {
                let _ = writeln!(s, "slope {:<10} {:>8}", f.name(), "n/a");
            }
        }
    }
    s
}

pub fn run(args: &BenchmarkArgs) -> CliResult<()> {
    let settings = resolve(&args.noise, None, args.kernel, args.jitters, None)?;
    let model = match &args.model_config {
        Some(path) => ModelConfig::load(path)?,
        None => ModelConfig::default_binomial(),
    }
    .build()?;
    let sizes = if args.sizes.is_empty() {
        geometric_grid(args.n_min, args.ratio, args.steps)?
    } else {
        args.sizes.clone()
    };
    if args.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let mut functionals = args.functionals.clone();
    functionals.sort();
    functionals.dedup();
    let plan = BenchPlan {
        sizes,
        seeds: args.seeds,
        base_seed: settings.seed,
        functionals,
        theta: settings.theta,
        nu: settings.nu,
        kernel: settings.kernel,
        jitters: settings.jitters,
    };
    // fail early on a bad noise spec rather than inside every cell
    settings.noise(1)?;
    let records = run_grid(&model, &plan)?;
    let summary = render_summary(&summarize(&records), &plan.functionals);
    emit(args.output.as_deref(), render_csv(&records).as_bytes())?;
    if args.output.is_some() {
        emit(None, summary.as_bytes())
    } else {
        eprint!("{summary}");
        Ok(())
    }
}
