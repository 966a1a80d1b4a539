//! `zeck`: decompose, solve, simulate and draw Zeckendorf games, or serve them over HTTP.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 state budget exceeded, 1 other
//! failures such as I/O errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use zeck_core::export::build_export;
use zeck_core::sequence::{greedy_decompose, SequenceSpec};
use zeck_core::simulate::{run_batch, write_games_csv, write_histogram_csv};
use zeck_core::solver::{length_bounds_from, Solver, DEFAULT_STATE_BUDGET};
use zeck_core::{Error, TreeFormat};

#[derive(Parser)]
#[command(name = "zeck", version, about = "Zeckendorf game engine and solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Game {
    /// Starting value: the game begins at {1^n}.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    c: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
}

impl Game {
    fn spec(&self) -> Result<SequenceSpec, Error> {
        SequenceSpec::new(self.c, self.k)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print the greedy (unique legal) decomposition of n.
    Decompose {
        #[command(flatten)]
        game: Game,
        /// text or json.
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Solve the game from {1^n} and print winner and length bounds as JSON.
    Solve {
        #[command(flatten)]
        game: Game,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
    },
    /// Play seeded random games and report move-count statistics.
    Simulate {
        #[command(flatten)]
        game: Game,
        #[arg(long, default_value_t = 1000)]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for games.csv and histogram.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// json prints the statistics; csv prints the per-game rows.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Write the layered game tree as Graphviz DOT or nested JSON.
    Tree {
        #[command(flatten)]
        game: Game,
        /// Stop expanding below this depth.
        #[arg(long)]
        depth: Option<u32>,
        /// dot or json.
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
    },
    /// Run the HTTP play service until interrupted.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
        /// Session snapshot file, read on startup and rewritten after every change.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::StateBudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::InvalidInput(_) | Error::Overflow { .. } | Error::UnsupportedSpec { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

/// A closed pipe (e.g. `| head`) is not an error.
fn quiet_pipe(result: io::Result<()>) -> Result<(), Failure> {
    match result {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    quiet_pipe(writeln!(io::stdout().lock(), "{text}"))
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Other(e.to_string()))?;
    emit(&text)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn decompose(game: Game, format: Format) -> Result<(), Failure> {
    let spec = game.spec()?;
    let d = greedy_decompose(&spec, game.n)?;
    let (gzd, igzd) = (d.summand_count(), d.index_sum());
    match format {
        Format::Json => print_json(&json!({
            "n": game.n,
            "c": game.c,
            "k": game.k,
            "terms": d.terms().collect::<Vec<_>>(),
            "gzd": gzd,
            "igzd": igzd,
        })),
        Format::Text if spec.is_fibonacci() => emit(&format!("{d} (Z={gzd})")),
        Format::Text => emit(&format!("{d} (GZD={gzd}, IGZD={igzd})")),
        _ => Err(Failure::Usage(
            "decompose supports --format text or json".into(),
        )),
    }
}

fn solve(game: Game, budget: usize) -> Result<(), Failure> {
    let spec = game.spec()?;
    let table = Solver::with_budget(budget).solve(&spec, game.n)?;
    let bounds = length_bounds_from(&table, game.n)?;
    print_json(&json!({
        "n": game.n,
        "c": game.c,
        "k": game.k,
        "winner": table.winner(),
        "min_len": bounds.min_len,
        "max_len": bounds.max_len,
        "bounds_ok": bounds.bounds_ok,
        "lower_bound": bounds.formulas.lower(),
        "upper_bound": bounds.formulas.upper(),
        "states": table.len(),
    }))
}

fn simulate(
    game: Game,
    games: u64,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), Failure> {
    let spec = game.spec()?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let batch = run_batch(&spec, game.n, games, seed, workers)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let mut w = create(&dir.join("games.csv"))?;
        write_games_csv(&mut w, &batch)?;
        w.flush()?;
        let mut w = create(&dir.join("histogram.csv"))?;
        write_histogram_csv(&mut w, &batch.stats)?;
        w.flush()?;
    }
    match format {
        Format::Json => print_json(&json!(batch.stats)),
        Format::Csv => quiet_pipe(write_games_csv(io::stdout().lock(), &batch)),
        _ => Err(Failure::Usage(
            "simulate supports --format json or csv".into(),
        )),
    }
}

fn tree(
    game: Game,
    depth: Option<u32>,
    format: Format,
    out: Option<PathBuf>,
    budget: usize,
) -> Result<(), Failure> {
    let format = match format {
        Format::Dot => TreeFormat::Dot,
        Format::Json => TreeFormat::Json,
        _ => return Err(Failure::Usage("tree supports --format dot or json".into())),
    };
    let spec = game.spec()?;
    let table = Solver::with_budget(budget).solve(&spec, game.n)?;
    let text = build_export(&table, depth, budget)?.render(format);
    match out {
        Some(path) => {
            let mut w = create(&path)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => emit(&text)?,
    }
    Ok(())
}

fn serve(port: u16, budget: usize, snapshot: Option<PathBuf>) -> Result<(), Failure> {
    tracing_subscriber::fmt().with_writer(io::stderr).init();
    let config = zeck_service::Config {
        budget,
        snapshot,
        ..Default::default()
    };
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(zeck_service::serve(addr, config))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decompose { game, format } => decompose(game, format),
        Command::Solve { game, budget } => solve(game, budget),
        Command::Simulate {
            game,
            games,
            seed,
            out,
            format,
        } => simulate(game, games, seed, out, format),
        Command::Tree {
            game,
            depth,
            format,
            out,
            budget,
        } => tree(game, depth, format, out, budget),
        Command::Serve { port, budget, out } => serve(port, budget, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn core_errors_map_to_exit_classes() {
        assert!(matches!(
            Failure::from(Error::StateBudgetExceeded { budget: 1 }),
            Failure::Budget(_)
        ));
        assert!(matches!(
            Failure::from(Error::InvalidInput("x".into())),
            Failure::Usage(_)
        ));
        assert!(matches!(
            Failure::from(Error::CycleDetected("x".into())),
            Failure::Other(_)
        ));
    }
}
