use mixjitter::estimators::{fit_kde, fit_loclin, FitOptions};

use crate::args::{EstimatorKind, FitArgs};
use crate::artifact::{Artifact, FittedModel};
use crate::csvio::load_csv;
use crate::error::{CliError, CliResult};
use crate::resolve;

pub fn run(args: &FitArgs) -> CliResult<()> {
    let settings = resolve(
        &args.noise,
        Some(&args.schema),
        args.kernel,
        args.jitters,
        args.bandwidth.as_ref(),
    )?;
    let dataset = load_csv(&args.input, &settings.schema)?.dummy_code_all()?;
    let spec = settings.noise(dataset.p())?;
    let options = FitOptions {
        kernel: settings.kernel,
        num_jitters: settings.jitters,
        seed: settings.seed,
        bandwidth: settings.bandwidth.clone(),
    };
    let fitted = match args.estimator {
        EstimatorKind::Kde => {
            if args.response.is_some() || args.jitter_response {
                return Err(CliError::Usage("--response applies to --estimator loclin only".into()));
            }
            FittedModel::Kde(fit_kde(&dataset, &spec, &options)?)
        }
        EstimatorKind::Loclin => {
            let name = args
                .response
                .as_deref()
                .ok_or_else(|| CliError::Usage("--estimator loclin needs --response".into()))?;
            let response = dataset
                .column_index(name)
                .ok_or_else(|| CliError::Data(format!("no column named `{name}` (categorical columns are dummy coded as `name=level`)")))?;
            FittedModel::Loclin(fit_loclin(&dataset, response, &spec, &options, args.jitter_response)?)
        }
    };
    Artifact::new(fitted).save(&args.output)
}
