//! `mflat`: command-line front end for the weight-sequence toolkit.
//!
//! Exit codes: 0 when a verdict was reached, 1 for usage or configuration
//! errors, 2 when the result is inconclusive or a numerical range was exceeded.

mod args;
mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::Outcome;

/// Error attributable to the invocation rather than the numerics.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const TYPE_NOTE: &str = "\
Terminology: there is no agreement in the literature on what \"type\" means for
asymptotic expansions. Here a bound C A^p M_p |z|^p has type 1/A, Gevrey
asymptotics of order 1/k use M_p = p!^(1/k), and R(theta) is the largest type
available in direction theta.";

#[derive(Parser, Debug)]
#[command(name = "mflat", version, about = "Numerical experiments with weight sequences, flat functions and quasianalyticity")]
struct Cli {
    /// TOML file whose keys override the command-line flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log progress to stderr (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Condition and index report for a weight sequence
    Diagnose(commands::DiagnoseArgs),
    /// Quasianalyticity verdicts for the three function classes
    Quasi(commands::QuasiArgs),
    /// Directional type profile R(theta) for Gevrey asymptotics
    #[command(after_help = TYPE_NOTE)]
    TypeProfile(commands::TypeProfileArgs),
    /// Numerical validation of a sectorial kernel V
    Maergoiz(commands::MaergoizArgs),
    /// Flatness constants across a sector and the predicted type bound
    #[command(after_help = TYPE_NOTE)]
    Propagate(commands::PropagateArgs),
    /// Flat function whose derivative is not flat
    Wasow(commands::WasowArgs),
    /// Maximum-modulus check on a bounded sector
    PlCheck(commands::PlCheckArgs),
    /// Extension of a directional expansion to a fan of directions
    #[command(after_help = TYPE_NOTE)]
    Extend(commands::ExtendArgs),
}

fn resolve<A: Serialize + DeserializeOwned>(flags: &A, cfg: Option<&toml::Table>, name: &str) -> Result<A> {
    let copy: A = serde_json::from_value(serde_json::to_value(flags)?)?;
    config::overlay(copy, cfg, name)
}

fn dispatch(cli: &Cli) -> Result<(Outcome, Target)> {
    let cfg = cli.config.as_deref().map(config::load).transpose()?;
    let cfg = cfg.as_ref();
    macro_rules! run {
        ($args:expr, $name:literal, $f:path) => {{
            let a = resolve($args, cfg, $name)?;
            log::debug!("{} arguments: {}", $name, serde_json::to_string(&a)?);
            let start = std::time::Instant::now();
            let outcome = $f(&a)?;
            log::info!("{} finished in {:.2?}", $name, start.elapsed());
            (outcome, Target::from(&a.output))
        }};
    }
    Ok(match &cli.command {
        Command::Diagnose(a) => run!(a, "diagnose", commands::diagnose),
        Command::Quasi(a) => run!(a, "quasi", commands::quasi),
        Command::TypeProfile(a) => run!(a, "type-profile", commands::type_profile_cmd),
        Command::Maergoiz(a) => run!(a, "maergoiz", commands::maergoiz),
        Command::Propagate(a) => run!(a, "propagate", commands::propagate),
        Command::Wasow(a) => run!(a, "wasow", commands::wasow),
        Command::PlCheck(a) => run!(a, "pl-check", commands::pl_check),
        Command::Extend(a) => run!(a, "extend", commands::extend),
    })
}

/// Where the report files go.
struct Target {
    dir: Option<PathBuf>,
    svg: bool,
}

impl From<&args::OutputArgs> for Target {
    fn from(o: &args::OutputArgs) -> Self {
        Target { dir: o.out.clone(), svg: o.svg }
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

fn emit(stem: &str, outcome: &Outcome, target: &Target) -> Result<()> {
    let json = mflat::report::to_json(&outcome.json)?;
    match &target.dir {
        None => {
            if target.svg {
                return Err(UsageError("--svg needs --out".into()).into());
            }
            println!("{json}");
            eprintln!("{}", outcome.summary);
        }
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write(dir, &format!("{stem}.json"), &(json + "\n"))?;
            for (name, body) in &outcome.csv {
                write(dir, name, body)?;
            }
            if target.svg {
                for (name, body) in &outcome.svg {
                    write(dir, name, body)?;
                }
            }
            println!("{}", outcome.summary);
        }
    }
    Ok(())
}

fn stem(c: &Command) -> &'static str {
    match c {
        Command::Diagnose(_) => "diagnose",
        Command::Quasi(_) => "quasi",
        Command::TypeProfile(_) => "type_profile",
        Command::Maergoiz(_) => "maergoiz",
        Command::Propagate(_) => "propagate",
        Command::Wasow(_) => "wasow",
        Command::PlCheck(_) => "pl_check",
        Command::Extend(_) => "extend",
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return 1;
        }
        if let Some(err) = cause.downcast_ref::<mflat::Error>() {
            return match err {
                mflat::Error::Domain(_) | mflat::Error::Range(_) => 2,
                mflat::Error::Parameter(_) | mflat::Error::Parse { .. } | mflat::Error::Io(_) => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = dispatch(&cli).and_then(|(outcome, target)| {
        emit(stem(&cli.command), &outcome, &target)?;
        Ok(outcome.decided)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("mflat: inconclusive");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("mflat: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
