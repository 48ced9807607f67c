//! `lpf`: least primary factor of (Z/nZ)^x from the command line.
//!
//! Subcommands: `factor`, `count`, `constant`, `compare`, `chars`. Every
//! command supports `--format text|csv|json`; JSON output follows the
//! schema shipped in `schema/output.schema.json`. Numeric arguments accept
//! scientific notation (`1e7`). `LPF_THREADS` caps the worker pool.
//!
//! Exit codes: 0 success, 2 usage error, 3 capacity exceeded,
//! 4 unsupported q.

mod commands;
mod render;

use clap::{Parser, Subcommand, ValueEnum};
use lpf_core::Error;

use commands::Mode;

#[derive(Parser)]
#[command(name = "lpf", version, about = "Least primary factor of (Z/nZ)^x")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Factor n and print the primary decomposition of (Z/nZ)^x and S(n).
    Factor {
        /// The modulus n >= 1.
        n: String,
    },
    /// Count integers by least primary factor at threshold q.
    Count {
        /// Prime-power threshold (q = 2 allowed in sieve mode).
        #[arg(long)]
        q: String,
        /// Upper limit (real; counts go up to floor(x)).
        #[arg(long)]
        x: String,
        /// Counting route.
        #[arg(long, value_enum, default_value = "sieve")]
        mode: Mode,
        /// Prime bound for the asymptotic main terms.
        #[arg(long, default_value = "1e7")]
        prime_bound: String,
    },
    /// Evaluate the leading constant C_q with its error interval.
    Constant {
        /// Prime-power threshold q >= 3.
        #[arg(long)]
        q: String,
        /// Euler-product truncation bound.
        #[arg(long, default_value = "1e7")]
        prime_bound: String,
    },
    /// Tabulate empirical counts against asymptotic main terms.
    Compare {
        /// Largest threshold; rows cover every prime power in [2, qmax].
        #[arg(long)]
        qmax: String,
        /// Comma-separated evaluation points.
        #[arg(long, value_delimiter = ',')]
        x_list: Vec<String>,
        /// Prime bound for the constants.
        #[arg(long, default_value = "1e7")]
        prime_bound: String,
    },
    /// Print the Dirichlet character table of a modulus.
    Chars {
        /// Modulus >= 2 (phi-capped; the B_q moduli all fit).
        #[arg(long)]
        modulus: String,
    },
}

/// Integer argument, accepting scientific notation when it is exact.
fn parse_integer(name: &str, s: &str) -> Result<u64, Error> {
    let t = s.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    if let Ok(v) = t.parse::<f64>() {
        if v.is_finite() && v >= 0.0 && v <= 2f64.powi(53) && v.fract() == 0.0 {
            return Ok(v as u64);
        }
    }
    Err(Error::InvalidInput(format!(
        "{name} must be a nonnegative integer (scientific notation ok), got {s:?}"
    )))
}

fn parse_real(name: &str, s: &str) -> Result<f64, Error> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::InvalidInput(format!(
            "{name} must be a finite number, got {s:?}"
        ))),
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(raw) = std::env::var("LPF_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(
            || {
                Error::InvalidInput(format!(
                    "LPF_THREADS must be a positive integer, got {raw:?}"
                ))
            },
        )?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<String, Error> {
    let rendered = match &cli.command {
        Command::Factor { n } => commands::factor(parse_integer("n", n)?)?,
        Command::Count { q, x, mode, prime_bound } => commands::count(
            parse_integer("q", q)?,
            parse_real("x", x)?,
            *mode,
            parse_integer("prime-bound", prime_bound)?,
        )?,
        Command::Constant { q, prime_bound } => commands::constant(
            parse_integer("q", q)?,
            parse_integer("prime-bound", prime_bound)?,
        )?,
        Command::Compare { qmax, x_list, prime_bound } => {
            let xs: Vec<f64> = x_list
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_real("x-list entry", s))
                .collect::<Result<_, _>>()?;
            commands::compare(
                parse_integer("qmax", qmax)?,
                &xs,
                parse_integer("prime-bound", prime_bound)?,
            )?
        }
        Command::Chars { modulus } => {
            commands::chars(parse_integer("modulus", modulus)?)?
        }
    };
    Ok(match cli.format {
        Format::Json => rendered.to_json(),
        Format::Csv => rendered.to_csv(),
        Format::Text => rendered.to_text(),
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => 3,
        Error::UnsupportedQ(..) => 4,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| run(&cli));
    match outcome {
        Ok(output) => print!("{output}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
