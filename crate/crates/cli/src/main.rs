use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod plot;

use commands::CliError;

#[derive(Parser)]
#[command(name = "rkdec", version, about = "Rank exact decompositions of multiparameter persistence modules")]
struct Cli {
    /// Prime field characteristic; must match the input presentation when both are given.
    #[arg(long = "field", global = true)]
    field: Option<u32>,
    /// Seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Stop resolutions after this many steps.
    #[arg(long = "max-depth", global = true)]
    max_depth: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Hook,
    Rect,
}

#[derive(Subcommand)]
enum Command {
    /// Rank invariant on the grade grid of a presentation.
    RankInv { input: PathBuf },
    /// Usual multigraded Betti numbers.
    Betti { input: PathBuf },
    /// Rank exact decomposition as a hook barcode.
    Rkdec { input: PathBuf },
    /// Minimal rank decomposition by hooks or rectangles.
    Mrd {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "hook")]
        shape: ShapeArg,
    },
    /// Limit exact Betti numbers, as upsets.
    UpsetBetti { input: PathBuf },
    /// Signed bottleneck dissimilarity between two barcode files.
    Match { first: PathBuf, second: PathBuf },
    /// Run a seeded experiment suite.
    Repro {
        experiment: String,
        /// Comma-separated values of k.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        /// Comma-separated grid sides.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// SVG drawing of a two-parameter barcode.
    Plot { input: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    let g = commands::Globals { field: cli.field, seed: cli.seed, max_depth: cli.max_depth };
    let ok = |s: String| Ok((s, true));
    match cli.command {
        Command::RankInv { input } => ok(commands::rank_inv(&read(&input)?, &g)?),
        Command::Betti { input } => ok(commands::betti(&read(&input)?, &g)?),
        Command::Rkdec { input } => ok(commands::rkdec(&read(&input)?, &g)?),
        Command::Mrd { input, shape } => ok(commands::mrd(&read(&input)?, matches!(shape, ShapeArg::Rect), &g)?),
        Command::UpsetBetti { input } => ok(commands::upset_betti(&read(&input)?, &g)?),
        Command::Match { first, second } => ok(commands::matching(&read(&first)?, &read(&second)?)?),
        Command::Repro { experiment, k, m, instances, epsilon } => {
            commands::repro(&experiment, k, m, instances, epsilon, &g)
        }
        Command::Plot { input } => ok(plot::svg(&read(&input)?)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let (text, passed) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    let written = match &out {
        Some(path) => std::fs::write(path, format!("{text}\n")),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other,
        },
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: experiment verdicts failed");
        ExitCode::from(4)
    }
}
