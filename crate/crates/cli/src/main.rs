use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ong_lab::{exit, ExperimentConfig, ExperimentKind, LabError, Overrides};

#[derive(Parser)]
#[command(name = "ong-lab", version, about = "Monte Carlo experiments on the on-line nearest-neighbour graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Law of large numbers for the scaled total.
    Lln(RunArgs),
    /// Expected weight of the last edge.
    MeanGain(RunArgs),
    /// Dyadic differences of the mean when alpha = d.
    LogRegime(RunArgs),
    /// Limit of the mean when alpha > d, binomial and Poissonized.
    MuLimit(RunArgs),
    /// Variance against n on a dyadic grid.
    VarianceScan(RunArgs),
    /// L2 size of the increment between coupled prefixes.
    CauchyTail(RunArgs),
    /// Nested Monte Carlo for the conditioned second moments of a re-sample.
    ResampleCheck(RunArgs),
    /// Voronoi cell diameters against n.
    VoronoiScan(RunArgs),
    /// Grid index against brute force on random instances.
    OracleCheck(RunArgs),
    /// Closed-form constants.
    Constants(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, replacing `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, replacing `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    shadow_oracle: bool,
    #[arg(long)]
    dump_edges: bool,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        use ExperimentKind as K;
        match self {
            Command::Lln(a) => (K::Lln, a),
            Command::MeanGain(a) => (K::MeanGain, a),
            Command::LogRegime(a) => (K::LogRegime, a),
            Command::MuLimit(a) => (K::MuLimit, a),
            Command::VarianceScan(a) => (K::VarianceScan, a),
            Command::CauchyTail(a) => (K::CauchyTail, a),
            Command::ResampleCheck(a) => (K::ResampleCheck, a),
            Command::VoronoiScan(a) => (K::VoronoiScan, a),
            Command::OracleCheck(a) => (K::OracleCheck, a),
            Command::Constants(a) => (K::Constants, a),
        }
    }
}

fn run(cli: Cli) -> Result<i32, LabError> {
    let (kind, args) = cli.command.split();
    let cfg = ExperimentConfig::from_path(&args.config)?;
    if cfg.experiment != kind {
        return Err(LabError::invalid(format!(
            "subcommand {kind} does not match the config's experiment {}",
            cfg.experiment
        )));
    }
    let overrides = Overrides {
        out: args.out,
        seed: args.seed,
        threads: args.threads,
        shadow_oracle: args.shadow_oracle,
        dump_edges: args.dump_edges,
    };
    let cfg = overrides.apply(cfg)?;
    let outcome = ong_lab::run(&cfg)?;
    for g in &outcome.summary.gates {
        eprintln!("{} {}: {:?}", if g.passed { "PASS" } else { "FAIL" }, g.name, g.observed);
    }
    println!("{}", cfg.output_dir.display());
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(exit::PASS as u8);
        }
        Err(e) => {
            eprintln!("{}", LabError::invalid(e.to_string().trim_end()).to_json());
            return ExitCode::from(exit::INVALID_CONFIG as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
