//! Command-line front end.
//!
//! Exit codes: 0 success, 1 oracle mismatch, 2 malformed input, 3 resource
//! limit. Verdicts are report fields, never exit codes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::io::{canonical_json, read_family, write_family, ToolConfig};
use peps_injectivity::linalg::{EngineTag, RankEngineConfig};
use peps_injectivity::report::{check_report, mps_report, oracle_report, search_report};
use peps_injectivity::{Error, Family, GridSpec, Limits};

#[derive(Parser)]
#[command(name = "pepsinj", version, about = "Injective regions of PEPS tensor families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated family as JSON.
    Gen(GenArgs),
    /// Decide whether a grid is an injective region.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: GridSpec,
        /// Attach a witness certificate when injective.
        #[arg(long)]
        witness: bool,
    },
    /// Injectivity length of an n = 1 family.
    MpsLength {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Minimal injective grid sizes within a cap.
    Search {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cap: GridSpec,
    },
    /// Compare the sweep with brute-force enumeration.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: GridSpec,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: FamilyKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "D", alias = "bond-dim")]
    bond_dim: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    engine: Option<EngineTag>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// TOML file with [engine] and [limits] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

struct Loaded {
    family: Family,
    engine: RankEngineConfig,
    limits: Limits,
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

impl Common {
    fn load(&self) -> Result<Loaded, Error> {
        let config = match &self.config {
            Some(p) => ToolConfig::parse(&read_text(p)?)?,
            None => ToolConfig::default(),
        };
        Ok(Loaded {
            family: read_family(&read_text(&self.family)?)?,
            engine: config.engine(self.engine, self.tolerance)?,
            limits: config.limits()?,
        })
    }
}

fn emit<T: Serialize>(report: &T) -> Result<(), Error> {
    println!("{}", canonical_json(report)?);
    Ok(())
}

fn seconds(start: Instant, on: bool) -> Option<f64> {
    on.then(|| start.elapsed().as_secs_f64())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let start = Instant::now();
    match cli.command {
        Command::Gen(a) => {
            let recipe = FamilyRecipe::resolve(a.kind, a.n, a.bond_dim, a.d, a.seed)?;
            let text = write_family(&generate(&recipe)?) + "\n";
            match a.out {
                Some(p) => std::fs::write(&p, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", p.display())))?,
                None => print!("{text}"),
            }
        }
        Command::Check { common, grid, witness } => {
            let l = common.load()?;
            let mut r = check_report(&l.family, &grid, &l.engine, &l.limits, witness)?;
            r.timing_seconds = seconds(start, common.timing);
            emit(&r)?;
        }
        Command::MpsLength { common, cap } => {
            let l = common.load()?;
            let mut r = mps_report(&l.family, &l.engine, cap)?;
            r.timing_seconds = seconds(start, common.timing);
            emit(&r)?;
        }
        Command::Search { common, cap } => {
            let l = common.load()?;
            let mut r = search_report(&l.family, &cap, &l.engine, &l.limits)?;
            r.timing_seconds = seconds(start, common.timing);
            emit(&r)?;
        }
        Command::OracleCheck { common, grid } => {
            let l = common.load()?;
            let mut r = oracle_report(&l.family, &grid, &l.engine, &l.limits)?;
            r.timing_seconds = seconds(start, common.timing);
            emit(&r)?;
            if !r.agree {
                eprintln!("mismatch: sweep dim {} vs brute-force rank {}", r.sweep_dim, r.brute_force_rank);
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit(_) => 3,
                _ => 2,
            })
        }
    }
}
