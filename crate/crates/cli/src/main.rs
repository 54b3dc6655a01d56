use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rwval_cli::commands::{run, Command, Conditioning, Options};
use rwval_cli::generate;
use rwval_cli::report::Format;
use rwval_cli::scenario::parse_scenario;
use rwval_cli::{CliError, Result};
use rwval_core::parse_rational;

#[derive(Parser)]
#[command(
    name = "rwval",
    version,
    about = "Arbitrage, growth-optimal portfolios and information in finite markets"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
    /// Comparison tolerance (default 0 in rational mode, 1e-9 in float mode).
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Seed for randomized generators; echoed in reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the scenario's numeraire asset.
    #[arg(long, global = true)]
    numeraire: Option<String>,
    /// Exit with status 2 when the verdict is negative.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditioningArg {
    Information,
    Prices,
    Trivial,
}

#[derive(Subcommand)]
enum Cmd {
    /// Arbitrage, dominance, martingale measures, completeness, sensitivity and efficiency.
    Check { scenario: PathBuf },
    /// Martingale measures node by node and the density process.
    Emm { scenario: PathBuf },
    /// Growth-optimal portfolio and its wealth process.
    Gop { scenario: PathBuf },
    /// Risk-neutral and real-world values of a claim side by side.
    Price {
        scenario: PathBuf,
        #[arg(long)]
        claim: String,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Whether the extra information leaves price-history probabilities intact.
    Sensitivity { scenario: PathBuf },
    /// Martingale hypothesis and growth statistics of buy-and-hold strategies.
    Hypothesis {
        scenario: PathBuf,
        /// Asset held by the strategy (all assets when absent).
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long, value_enum, default_value = "information")]
        conditioning: ConditioningArg,
    },
    /// Write a scenario file to stdout.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Binomial tree with a bond and a stock.
    Crr {
        #[arg(long, default_value_t = 1)]
        periods: usize,
        #[arg(long, default_value = "2")]
        u: String,
        #[arg(long, default_value = "1/2")]
        d: String,
        #[arg(long, default_value = "0")]
        r: String,
        #[arg(long, default_value = "1/2")]
        p: String,
    },
    /// One-period three-outcome market (incomplete).
    Trinomial {
        #[arg(long, default_value = "2")]
        u: String,
        #[arg(long, default_value = "1")]
        m: String,
        #[arg(long, default_value = "1/2")]
        d: String,
    },
    /// Binomial market plus a time-0 signal with P(up | g) = accuracy.
    Insider {
        #[arg(long, default_value = "4/5")]
        accuracy: String,
    },
    /// Seeded random market (uses --seed, default 0).
    Random {
        /// Add a signal: independent, adapted or informative.
        #[arg(long)]
        signal: Option<String>,
    },
}

fn number(text: &str) -> Result<rwval_core::Rational> {
    parse_rational(text).map_err(|e| CliError::BadParams(e.to_string()))
}

fn execute(cli: &Cli) -> Result<(String, bool)> {
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let opts = Options {
        tol: cli.tol.clone(),
        seed: cli.seed,
        numeraire: cli.numeraire.clone(),
    };
    let (path, command) = match &cli.command {
        Cmd::Generate { kind } => {
            let scenario = match kind {
                GenKind::Crr {
                    periods,
                    u,
                    d,
                    r,
                    p,
                } => generate::crr(*periods, &number(u)?, &number(d)?, &number(r)?, &number(p)?)?,
                GenKind::Trinomial { u, m, d } => {
                    generate::trinomial(&number(u)?, &number(m)?, &number(d)?)?
                }
                GenKind::Insider { accuracy } => generate::insider(&number(accuracy)?)?,
                GenKind::Random { signal } => {
                    generate::random_scenario(cli.seed.unwrap_or(0), signal.as_deref())?
                }
            };
            return Ok((scenario.emit(), false));
        }
        Cmd::Check { scenario } => (scenario, Command::Check),
        Cmd::Emm { scenario } => (scenario, Command::Emm),
        Cmd::Gop { scenario } => (scenario, Command::Gop),
        Cmd::Price { scenario, claim, t } => (
            scenario,
            Command::Price {
                claim: claim.clone(),
                t: *t,
            },
        ),
        Cmd::Sensitivity { scenario } => (scenario, Command::Sensitivity),
        Cmd::Hypothesis {
            scenario,
            strategy,
            conditioning,
        } => (
            scenario,
            Command::Hypothesis {
                strategy: strategy.clone(),
                conditioning: match conditioning {
                    ConditioningArg::Information => Conditioning::Ambient,
                    ConditioningArg::Prices => Conditioning::Prices,
                    ConditioningArg::Trivial => Conditioning::Trivial,
                },
            },
        ),
    };
    let text = std::fs::read_to_string(path)?;
    let scenario = parse_scenario(&text)?;
    let out = run(&command, &scenario, &opts)?;
    Ok((out.render(format), out.negative))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, negative)) => {
            print!("{text}");
            if negative && cli.strict {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
