use std::fs::File;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use paretonav_core::model::{InputFormat, ModelError, ParetoSet};
use paretonav_core::navigator::Surface;
use paretonav_core::testproblems::{generate, GenerateError, GeneratorKind, GeneratorSpec};
use paretonav_core::triangulate::{build_triangulation, Triangulation, TriangulationError};
use serde::Serialize;

use crate::server;

/// Process exit codes.
pub mod exit {
    pub const FAILURE: u8 = 1;
    pub const INVALID_INPUT: u8 = 2;
    pub const COLLISION: u8 = 3;
    pub const TOO_MANY_OBJECTIVES: u8 = 4;
    pub const VALIDATION: u8 = 5;
}

/// Relative tolerance for the circumsphere check of `validate`.
const DELAUNAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "paretonav", version, about = "Triangulate and navigate approximated Pareto fronts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate a point set, write the mesh and print a build report.
    Build {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a point set for dominated points and its mesh for Delaunay violations.
    Validate {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Serve navigation sessions over HTTP.
    Serve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Generate a test front.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short)]
        n: usize,
        #[arg(short = 'K', default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short)]
        m: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Dtlz2,
    UnitSimplex,
    Fig6,
    RandomConcave,
}

impl From<Kind> for GeneratorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Dtlz2 => GeneratorKind::Dtlz2,
            Kind::UnitSimplex => GeneratorKind::UnitSimplex,
            Kind::Fig6 => GeneratorKind::Fig6,
            Kind::RandomConcave => GeneratorKind::RandomConcave,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        Self::new(exit::FAILURE, error)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::new(exit::INVALID_INPUT, e)
    }
}

impl From<TriangulationError> for CliError {
    fn from(e: TriangulationError) -> Self {
        let code = match e {
            TriangulationError::TooManyObjectives(_) => exit::TOO_MANY_OBJECTIVES,
            TriangulationError::ProjectionCollision { .. } | TriangulationError::AffinelyDependent => exit::COLLISION,
            TriangulationError::TooFewPoints { .. } => exit::INVALID_INPUT,
        };
        Self::new(code, e)
    }
}

impl From<GenerateError> for CliError {
    fn from(e: GenerateError) -> Self {
        Self::new(exit::INVALID_INPUT, e)
    }
}

#[derive(Debug, Serialize)]
pub struct BuildReport {
    pub points: usize,
    pub dropped: usize,
    pub simplices: usize,
    pub build_seconds: f64,
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub points: usize,
    pub dropped: usize,
    pub simplices: usize,
    pub dominated_pairs: Vec<(usize, usize)>,
    pub delaunay_violations: Vec<(usize, usize)>,
    pub clean: bool,
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { input, output } => {
            let (ps, dropped) = load(&input)?;
            let started = Instant::now();
            let tri = build_triangulation(Arc::new(ps))?;
            let build_seconds = started.elapsed().as_secs_f64();
            log::info!("triangulated {} points into {} simplices in {build_seconds:.3} s", tri.pareto_set().len(), tri.len());
            let file = File::create(&output).with_context(|| format!("creating {}", output.display()))?;
            serde_json::to_writer(file, &tri.export()).context("writing mesh")?;
            let bounds = tri.pareto_set().ideal_nadir();
            print_json(&BuildReport {
                points: tri.pareto_set().len(),
                dropped,
                simplices: tri.len(),
                build_seconds,
                ideal: bounds.lower,
                nadir: bounds.upper,
            });
            Ok(())
        }
        Command::Validate { input } => {
            let (ps, dropped) = load(&input)?;
            let dominance = ps.validate_dominance();
            let tri = build_triangulation(Arc::new(ps))?;
            let report = validate_report(&tri, dropped, dominance.dominated_pairs);
            print_json(&report);
            if report.clean {
                Ok(())
            } else {
                Err(CliError::new(
                    exit::VALIDATION,
                    anyhow::anyhow!(
                        "{} dominated pairs, {} Delaunay violations",
                        report.dominated_pairs.len(),
                        report.delaunay_violations.len()
                    ),
                ))
            }
        }
        Command::Serve { input, port, host } => {
            let (ps, _) = load(&input)?;
            let tri = build_triangulation(Arc::new(ps))?;
            let surface = Arc::new(Surface::new(tri).map_err(|e| CliError::new(exit::INVALID_INPUT, e))?);
            let addr: SocketAddr = format!("{host}:{port}").parse().context("parsing listen address")?;
            let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
            runtime.block_on(server::serve(surface, addr)).context("serving")?;
            Ok(())
        }
        Command::Gen {
            kind,
            n,
            k,
            seed,
            m,
            output,
        } => {
            let ps = generate(&GeneratorSpec {
                kind: kind.into(),
                n,
                m,
                k,
                seed,
            })?;
            std::fs::write(&output, ps.to_json()).with_context(|| format!("writing {}", output.display()))?;
            Ok(())
        }
    }
}

fn validate_report(tri: &Triangulation, dropped: usize, dominated_pairs: Vec<(usize, usize)>) -> ValidateReport {
    let delaunay_violations = tri.delaunay_violations(DELAUNAY_TOLERANCE);
    ValidateReport {
        points: tri.pareto_set().len(),
        dropped,
        simplices: tri.len(),
        clean: dominated_pairs.is_empty() && delaunay_violations.is_empty(),
        dominated_pairs,
        delaunay_violations,
    }
}

/// Loads a point file; the format follows the extension (`.csv` or JSON).
pub fn load(path: &Path) -> Result<(ParetoSet, usize), CliError> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let loaded = ParetoSet::load(BufReader::new(file), InputFormat::from_path(path))?;
    if loaded.dropped > 0 {
        log::warn!("dropped {} duplicate points", loaded.dropped);
    }
    Ok((loaded.set, loaded.dropped))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}
