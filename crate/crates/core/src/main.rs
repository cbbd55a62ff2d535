use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use haarpt::cli::{
    cmd_exact, cmd_freeness, cmd_mc, cmd_predict, cmd_wg, grammar,
    reproduce::{cmd_reproduce, ReproduceParams},
    CliError, CommandReport, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "haarpt",
    about = "Exact and Monte Carlo moments of partial transposes of Haar unitaries",
    version
)]
struct Cli {
    /// Cap the worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact Weingarten table for S_n at dimension N.
    Wg {
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        dim: u64,
    },
    /// Exact expected normalized trace of a word.
    Exact {
        /// Word in the grammar `label:perm'?`, e.g. "A:G(1,2,4) A:G(1,2,4)'".
        #[arg(long)]
        word: String,
        #[arg(long = "N")]
        dim: usize,
    },
    /// Monte Carlo estimate of a word's expected normalized trace.
    Mc {
        #[arg(long)]
        word: String,
        #[arg(long = "N")]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Limit prediction for a sign pattern under a cumulant model.
    Predict {
        /// Pattern such as "uu*uu*"; distinct letters are free labels.
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        b: u64,
        /// One of: transpose, block, haar.
        #[arg(long, default_value = "transpose")]
        model: String,
    },
    /// Pairwise asymptotic-freeness verdicts on a size grid.
    Freeness {
        #[arg(long)]
        spec1: String,
        #[arg(long)]
        spec2: String,
        #[arg(long)]
        spec3: Option<String>,
        #[arg(long)]
        spec4: Option<String>,
        /// Comma-separated matrix sizes, e.g. 8,16,32.
        #[arg(long)]
        grid: String,
    },
    /// Run a canned experiment with pass/fail at the declared tolerance.
    Reproduce {
        /// One of: thm16, counterexample, blocks, cor26, cor27, diagfree.
        name: String,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Pass band in standard errors for Monte Carlo checks.
        #[arg(long, default_value_t = 4.0)]
        tolerance: f64,
        #[arg(long)]
        grid: Option<String>,
    },
}

fn run(command: Command) -> Result<CommandReport, CliError> {
    match command {
        Command::Wg { n, dim } => cmd_wg(n, dim),
        Command::Exact { word, dim } => cmd_exact(&word, dim),
        Command::Mc {
            word,
            dim,
            samples,
            seed,
        } => cmd_mc(&word, dim, samples, seed),
        Command::Predict { pattern, b, model } => cmd_predict(&pattern, b, &model),
        Command::Freeness {
            spec1,
            spec2,
            spec3,
            spec4,
            grid,
        } => {
            let mut specs = vec![spec1, spec2];
            specs.extend(spec3);
            specs.extend(spec4);
            let grid = grammar::parse_grid(&grid)?;
            cmd_freeness(&specs, &grid)
        }
        Command::Reproduce {
            name,
            b,
            d,
            samples,
            seed,
            tolerance,
            grid,
        } => {
            let grid = grid.map(|g| grammar::parse_grid(&g)).transpose()?;
            let params = ReproduceParams {
                b,
                d,
                samples,
                seed,
                tolerance,
                grid,
            };
            cmd_reproduce(&name, &params)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("haarpt: could not configure {threads} threads: {e}");
            std::process::exit(2);
        }
    }
    match run(cli.command) {
        Ok(report) => {
            let rendered = report.render(cli.format.into());
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &rendered) {
                        eprintln!("haarpt: cannot write {}: {e}", path.display());
                        std::process::exit(2);
                    }
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout.write_all(rendered.as_bytes()).expect("stdout");
                }
            }
            for line in &report.human {
                eprintln!("{line}");
            }
            let code = match report.pass {
                Some(false) => 1,
                _ => 0,
            };
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("haarpt: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("see 'haarpt --help' for usage");
            }
            std::process::exit(e.exit_code());
        }
    }
}
