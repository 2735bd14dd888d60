use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use igmc::deep::{Schedule, TrainConfig};
use igmc::experiment::{
    self, BernoulliArgs, ClassifyArgs, Command, ConvergeArgs, ExponentialArgs, Fixture, RunManifest,
};
use igmc::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_NONDETERMINISTIC: u8 = 4;

/// Posterior distributions of an expectation by incremental generative Monte Carlo.
#[derive(Parser)]
#[command(name = "igmc", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Number of chains.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Generated values per chain.
    #[arg(long, default_value_t = 1000)]
    h: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bernoulli approach on `a` successes out of `m` observations.
    Bernoulli {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exponential approach on `m` observations with sample mean `mean`.
    Exponential {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        mean: f64,
        #[command(flatten)]
        common: Common,
    },
    /// L1 convergence sweep against the Beta limit.
    Converge {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: usize,
        /// Cells as `n1:h1,n2:h2,...`; defaults to the single cell (--n, --h).
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<Sweep>,
        /// Seeds per cell.
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Per-class posterior uncertainty of a small softmax classifier.
    Classify {
        /// `blobs[:classes=K,per_class=P,separation=S,seed=X]` or a CSV path
        /// with header `f1,...,fd,label`.
        #[arg(long, default_value = "blobs")]
        fixture: String,
        /// Query point, e.g. `3,0`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Re-run a recorded manifest and compare output digests.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 0.002)]
    lr: f64,
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Cosine)]
    schedule: ScheduleArg,
    #[arg(long, default_value_t = 1)]
    batch_size: usize,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 0)]
    init_seed: u64,
    /// Reuse the previous step's weights instead of re-initializing.
    #[arg(long)]
    warm_start: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Constant,
    Cosine,
}

#[derive(Clone)]
struct Sweep(Vec<(usize, usize)>);

fn parse_sweep(text: &str) -> Result<Sweep, String> {
    text.split(',')
        .map(|cell| {
            let (n, h) = cell
                .split_once(':')
                .ok_or_else(|| format!("expected n:h, got {cell:?}"))?;
            let n = n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?;
            let h = h.trim().parse().map_err(|e| format!("{h:?}: {e}"))?;
            Ok((n, h))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Sweep)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::QuadratureFailure { .. } | Error::NonFiniteLoss { .. } | Error::ZeroMean => {
            EXIT_NUMERICAL
        }
        Error::Io(_) => 1,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, out, threads) = match cli.command {
        Cmd::Bernoulli { m, a, common } => (
            Command::Bernoulli(BernoulliArgs { m, a, n: common.n, h: common.h, seed: common.seed }),
            common.out,
            common.threads,
        ),
        Cmd::Exponential { m, mean, common } => (
            Command::Exponential(ExponentialArgs { m, mean, n: common.n, h: common.h, seed: common.seed }),
            common.out,
            common.threads,
        ),
        Cmd::Converge { m, a, sweep, seeds, common } => (
            Command::Converge(ConvergeArgs {
                m,
                a,
                sweep: sweep.map_or_else(|| vec![(common.n, common.h)], |s| s.0),
                seeds,
                seed: common.seed,
            }),
            common.out,
            common.threads,
        ),
        Cmd::Classify { fixture, x, train, common } => {
            let fixture = match Fixture::parse(&fixture) {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let train = TrainConfig {
                epochs: train.epochs,
                learning_rate: train.lr,
                momentum: train.momentum,
                schedule: match train.schedule {
                    ScheduleArg::Constant => Schedule::Constant,
                    ScheduleArg::Cosine => Schedule::Cosine,
                },
                batch_size: train.batch_size,
                init_seed: train.init_seed,
                hidden_width: train.hidden,
                warm_start: train.warm_start,
            };
            (
                Command::Classify(ClassifyArgs { fixture, x, n: common.n, h: common.h, seed: common.seed, train }),
                common.out,
                common.threads,
            )
        }
        Cmd::Replay { manifest, out, threads } => return replay(&manifest, &out, threads),
    };

    match experiment::run(&command, &out, threads) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", serde_json::to_string_pretty(&outcome.summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn replay(manifest: &std::path::Path, out: &std::path::Path, threads: Option<usize>) -> ExitCode {
    let recorded = match RunManifest::read(manifest) {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    match experiment::replay(&recorded, out, threads) {
        Ok(mismatched) if mismatched.is_empty() => {
            println!("all {} outputs reproduced", recorded.outputs.len());
            ExitCode::SUCCESS
        }
        Ok(mismatched) => {
            eprintln!("error: outputs differ from the manifest: {}", mismatched.join(", "));
            ExitCode::from(EXIT_NONDETERMINISTIC)
        }
        Err(e) => fail(&e),
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(err))
}
