use crate::args::SimulateArgs;
use crate::config::ModelConfig;
use crate::csvio::write_dataset;
use crate::error::CliResult;
use crate::{emit, resolve_seed};

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let model = ModelConfig::load(&args.model_config)?.build()?;
    let seed = resolve_seed(args.seed, None);
    let sample = model.sample(args.n, seed)?;
    let mut buf = Vec::new();
    write_dataset(&mut buf, &sample)?;
    emit(args.output.as_deref(), &buf)
}
