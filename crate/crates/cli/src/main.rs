use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dtigraph::{LossKind, SplitMode, Variant};
use dtigraph_cli::{run, Command, Overrides, Query, RunConfig};

#[derive(Parser)]
#[command(name = "dtigraph", version, about = "Dual graph learning for drug-target interaction prediction")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; relative paths resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// warm, cold_drug or cold_target.
    #[arg(long, global = true)]
    mode: Option<SplitMode>,
    /// even, odd, attention, adgl_only, edgl_only or no_fusion.
    #[arg(long, global = true)]
    variant: Option<Variant>,
    /// slf, flf, wlf or rlf.
    #[arg(long, global = true)]
    loss: Option<LossKind>,
    /// Negatives sampled per positive.
    #[arg(long, global = true)]
    ratio: Option<f64>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Learn drug and target affinity matrices from the feature views.
    Affinity,
    /// Fit on every labeled pair and save a checkpoint.
    Train,
    /// Run the warm or cold-start protocol.
    Evaluate,
    /// Rank unknown partners of one drug or target.
    Predict {
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        drug: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Evaluate every point of the configured grid.
    Sweep,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let c = cli.common;
    let overrides = Overrides {
        seed: c.seed,
        mode: c.mode,
        variant: c.variant,
        loss: c.loss,
        ratio: c.ratio,
        jobs: c.jobs,
        out_dir: c.out_dir,
    };
    let command = match cli.command {
        Cmd::Affinity => Command::Affinity,
        Cmd::Train => Command::Train,
        Cmd::Evaluate => Command::Evaluate,
        Cmd::Sweep => Command::Sweep,
        Cmd::Predict { drug, target, top } => Command::Predict {
            query: match (drug, target) {
                (Some(d), _) => Query::Drug(d),
                (None, Some(t)) => Query::Target(t),
                (None, None) => unreachable!("clap requires one of --drug or --target"),
            },
            top,
        },
    };
    let result = RunConfig::load(c.config.as_deref(), &overrides).and_then(|cfg| {
        let outputs = run(&command, &cfg)?;
        outputs.write(&cfg.out_dir)?;
        Ok(cfg.out_dir)
    });
    match result {
        Ok(dir) => {
            log::info!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dtigraph: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
