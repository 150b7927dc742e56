use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hmftrace::cli::{error_json, parse_config, parse_terms, run, Command, OutputFormat, RunConfig};
use hmftrace::Error;

#[derive(Parser)]
#[command(name = "hmftrace", version, about = "Geometric trace terms, lattice zeta functions and the acceptance suite")]
struct Args {
    /// Config file of `key = value` lines.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set A=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Report destination; `-` is standard output.
    #[arg(long, short)]
    output: Option<String>,
    #[arg(long, short, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Units, covolumes and zeta residue of the configured field.
    FieldInfo,
    /// Lattice zeta function of the ring of integers.
    Zeta {
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        /// Character index.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
    },
    /// Samples of Q, g and h on the diagonal.
    Transforms,
    /// Assemble class terms over the demo inventory.
    Trace {
        /// `all`, or a comma-separated subset of elliptic, mixed, parabolic, hyp-par.
        #[arg(default_value = "all")]
        terms: String,
    },
    /// Run the acceptance suite.
    Verify {
        /// Comma-separated criterion numbers; all twelve when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

enum Failure {
    Usage(Error),
    Compute(Error),
    Io(String),
}

fn configure(args: &Args) -> Result<(Command, RunConfig), Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text).map_err(Failure::Usage)?
        }
        None => RunConfig::default(),
    };
    let usage = |m: String| Failure::Usage(Error::Config { line: 0, message: m });
    for kv in &args.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.assign(k.trim(), v.trim()).map_err(Failure::Usage)?;
    }
    if let Some(o) = &args.output {
        cfg.output = o.clone();
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        };
    }
    let command = match &args.command {
        Cmd::FieldInfo => Command::FieldInfo,
        Cmd::Zeta { s, m } => {
            if let Some(s) = s {
                cfg.assign("s", s).map_err(Failure::Usage)?;
            }
            if let Some(m) = m {
                cfg.m_u = vec![*m];
            }
            Command::Zeta
        }
        Cmd::Transforms => Command::Transforms,
        Cmd::Trace { terms } => Command::Trace(parse_terms(terms).map_err(Failure::Usage)?),
        Cmd::Verify { only } => {
            if let Some(bad) = only.iter().find(|k| !(1..=12).contains(*k)) {
                return Err(usage(format!("no criterion {bad}; expected 1 to 12")));
            }
            Command::Verify(only.clone())
        }
    };
    Ok((command, cfg))
}

fn execute(args: &Args) -> Result<bool, Failure> {
    let (command, cfg) = configure(args)?;
    let report = run(&command, &cfg, |k, seconds| {
        eprintln!("criterion {:>2}: {} {} ({seconds:.1} s)", k.id, if k.passed { "PASS" } else { "FAIL" }, k.title);
    })
    .map_err(Failure::Compute)?;
    let body = report.render(cfg.format).map_err(Failure::Compute)?;
    if cfg.output == "-" {
        print!("{body}");
    } else {
        std::fs::write(&cfg.output, body).map_err(|e| Failure::Io(format!("{}: {e}", cfg.output)))?;
    }
    Ok(report.passed())
}

fn limit_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("HMFTRACE_THREADS") else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(Error::Config { line: 0, message: format!("HMFTRACE_THREADS must be a positive count, got {text:?}") }))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match limit_threads().and_then(|_| execute(&args)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("{}", error_json(&Error::Resource(m)));
            ExitCode::from(1)
        }
    }
}
