use mixjitter::data::jitter;

use crate::args::JitterArgs;
use crate::csvio::{load_csv, write_csv};
use crate::error::CliResult;
use crate::{emit, resolve};

/// Reads a CSV, dummy codes categorical columns and writes one jittered
/// replicate.
pub fn run(args: &JitterArgs) -> CliResult<()> {
    let settings = resolve(&args.noise, Some(&args.schema), None, None, None)?;
    let dataset = load_csv(&args.input, &settings.schema)?.dummy_code_all()?;
    let spec = settings.noise(dataset.p())?;
    let jittered = jitter(&dataset, &spec, settings.seed, args.replicate)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, jittered.schema(), jittered.rows())?;
    emit(args.output.as_deref(), &buf)
}
