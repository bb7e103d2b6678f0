//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for input or schema errors, 2 for numerical failures.
//! Data goes to standard output or `-o`; diagnostics go to standard error.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::auxetics::{
    affine_invariance_check, apply_affine, strict_direction, SearchBudget, Tolerance,
    VerdictKind, DEFAULT_SEED,
};
use crate::constructors::{CadelnizaParams, GalleryItem, GallerySelector, LkParams};
use crate::error::{Error, Result};
use crate::io::{export_obj, framework_to_json, linkage_to_json, parse_document, to_json_string, Document};
use crate::path::{auxetic_interval, trace, trace_bidirectional, BoundaryKind, TraceConfig};
use crate::quotient::convert;
use crate::rigidity::{deformation_basis, Structure};

/// Environment variable overriding the strict-direction search seed.
pub const SEED_ENV: &str = "PERIODICA_SEED";

#[derive(Debug, Parser)]
#[command(name = "periodica", version, about = "Periodic frameworks from finite linkages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Periodic framework of a linkage with marked pairs.
    Convert {
        /// Input document; standard input when absent or `-`.
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Degrees of freedom, rank, independence and a strictly auxetic direction.
    Analyze {
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Traces the one-parameter deformation and reports the Gram curve.
    Trace {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// +1 follows the opening orientation, -1 the reverse.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        seed: i8,
        /// Trace both directions and report the auxetic interval.
        #[arg(long)]
        interval: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Writes a member of the example gallery.
    Gallery {
        selector: Selector,
        /// Dimension of paneled simplices and cadelniza linkages.
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Polygon parameter of `lk`.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        z1: Option<f64>,
        #[arg(long)]
        z2: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Applies a linear map to a framework.
    Affine {
        input: Option<PathBuf>,
        /// Row-major entries, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Verify that every deformation-basis flex keeps its Gram velocity.
        #[arg(long)]
        check_invariance: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Wireframe OBJ of a block of cells.
    Export {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        cells: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Selector {
    DoubleArrowhead,
    PaneledSimplex,
    Cadelniza,
    RoofedCadelniza,
    Lk,
}

/// Streams used by one invocation.
pub struct Streams<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs one invocation and returns its exit code.
pub fn run<I, S>(args: I, io: &mut Streams<'_>) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(io.stderr, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command, io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn read_input(path: &Option<PathBuf>, io: &mut Streams<'_>) -> Result<Document> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)?;
        }
        _ => {
            io.stdin.read_to_string(&mut text)?;
        }
    }
    parse_document(&text)
}

fn write_output(path: &Option<PathBuf>, text: &str, io: &mut Streams<'_>) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, text)?,
        _ => io.stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Search seed from the environment, or the default.
pub fn search_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn dispatch(command: Command, io: &mut Streams<'_>) -> Result<i32> {
    match command {
        Command::Convert { input, output } => {
            let Document::Linkage(l) = read_input(&input, io)? else {
                return Err(Error::schema("$.kind", "convert expects a linkage document"));
            };
            let c = convert(&l)?;
            writeln!(
                io.stderr,
                "{} vertex orbits, {} edge orbits, edge constraints {}",
                c.quotient.orbit_count,
                c.quotient.edge_orbit_count,
                if c.edges_independent { "independent" } else { "dependent" }
            )?;
            write_output(&output, &framework_to_json(&c.framework), io)?;
        }
        Command::Analyze { input, json } => {
            let report = analyze(&read_input(&input, io)?, search_seed()?)?;
            if json {
                io.stdout.write_all(to_json_string(&report).as_bytes())?;
            } else {
                write!(io.stdout, "{report}")?;
            }
        }
        Command::Trace {
            input,
            steps,
            step,
            seed,
            interval,
            output,
        } => {
            let f = read_input(&input, io)?.to_framework()?;
            let config = TraceConfig {
                step,
                max_steps: steps,
                seed: f64::from(seed),
                ..TraceConfig::default()
            };
            let path = if interval {
                trace_bidirectional(&f, &config)?
            } else {
                trace(&f, &config)?
            };
            let rows: Vec<TraceRow> = path
                .samples()
                .iter()
                .map(|s| TraceRow {
                    tau: s.tau,
                    omega: s.omega.rows(),
                    omega_dot_eigenvalues: s.verdict.eigenvalues.clone(),
                    verdict: s.verdict.kind,
                })
                .collect();
            let interval = if interval {
                let iv = auxetic_interval(&path)?;
                Some(IntervalReport {
                    lo: iv.lo,
                    hi: iv.hi,
                    lo_kind: iv.lo_kind,
                    hi_kind: iv.hi_kind,
                })
            } else {
                None
            };
            let report = TraceReport {
                samples: rows,
                terminations: path
                    .branches
                    .iter()
                    .map(|b| format!("{:?}", b.termination))
                    .collect(),
                max_length_drift: path.max_length_drift(),
                interval,
            };
            write_output(&output, &to_json_string(&report), io)?;
        }
        Command::Gallery {
            selector,
            d,
            k,
            z1,
            z2,
            perturbation,
            output,
        } => {
            let sel = match selector {
                Selector::DoubleArrowhead => GallerySelector::DoubleArrowhead,
                Selector::PaneledSimplex => GallerySelector::PaneledSimplex(d),
                Selector::Cadelniza => GallerySelector::Cadelniza(CadelnizaParams::new(d)),
                Selector::RoofedCadelniza => GallerySelector::RoofedCadelniza,
                Selector::Lk => {
                    let mut p = LkParams::new(k);
                    p.z1 = z1.unwrap_or(p.z1);
                    p.z2 = z2.unwrap_or(p.z2);
                    p.perturbation = perturbation;
                    GallerySelector::Lk(p)
                }
            };
            let text = match sel.build()? {
                GalleryItem::Linkage(l) => linkage_to_json(&l),
                GalleryItem::Framework(f) => framework_to_json(&f),
            };
            write_output(&output, &text, io)?;
        }
        Command::Affine {
            input,
            matrix,
            check_invariance,
            output,
        } => {
            let f = read_input(&input, io)?.to_framework()?;
            let a = parse_matrix(&matrix, f.dim())?;
            let image = apply_affine(&f, &a)?;
            if check_invariance {
                let space = deformation_basis(&Structure::Periodic(f.clone()))?;
                let mut ok = true;
                for (i, x) in space.basis.iter().enumerate() {
                    let c = affine_invariance_check(&f, &a, x)?;
                    writeln!(
                        io.stderr,
                        "flex {i}: max deviation {:.3e} (|w| = {:.3e}) {}",
                        c.max_deviation,
                        c.reference_norm,
                        if c.holds { "ok" } else { "FAILED" }
                    )?;
                    ok &= c.holds;
                }
                if !ok {
                    write_output(&output, &framework_to_json(&image.framework), io)?;
                    return Ok(2);
                }
            }
            write_output(&output, &framework_to_json(&image.framework), io)?;
        }
        Command::Export {
            input,
            cells,
            output,
        } => {
            let f = read_input(&input, io)?.to_framework()?;
            write_output(&output, &export_obj(&f, cells)?, io)?;
        }
    }
    Ok(0)
}

/// Parses `d·d` comma-separated entries in row-major order.
pub fn parse_matrix(text: &str, dim: usize) -> Result<DMatrix<f64>> {
    let entries = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad matrix entry {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: entries.len(),
        });
    }
    Ok(DMatrix::from_row_slice(dim, dim, &entries))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StrictDirectionReport {
    pub found: bool,
    pub lambda_min: Option<f64>,
    pub coefficients: Vec<f64>,
}

/// Schema-stable result of `analyze`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AnalyzeReport {
    pub dof: usize,
    pub rank: usize,
    pub independent: bool,
    pub strict_direction: StrictDirectionReport,
    /// Eigenvalues of `ω̇` along the best direction found, ascending.
    pub eigenvalues: Vec<f64>,
    pub seed: u64,
}

impl std::fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "dof: {}", self.dof)?;
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "independent: {}", self.independent)?;
        let s = &self.strict_direction;
        match s.lambda_min {
            Some(l) if s.found => writeln!(f, "strict direction: found, lambda_min = {l:.6e}")?,
            Some(l) => writeln!(f, "strict direction: none, best lambda_min = {l:.6e}")?,
            None => writeln!(f, "strict direction: none (no degrees of freedom)")?,
        }
        if !s.coefficients.is_empty() {
            writeln!(f, "coefficients: {:?}", s.coefficients)?;
            writeln!(f, "eigenvalues: {:?}", self.eigenvalues)?;
        }
        writeln!(f, "seed: {}", self.seed)
    }
}

/// Rigidity counts and strict-direction search for either kind of document.
pub fn analyze(doc: &Document, seed: u64) -> Result<AnalyzeReport> {
    let structure = match doc {
        Document::Linkage(l) => Structure::Finite(l.clone()),
        Document::Framework(f) => Structure::Periodic(f.clone()),
    };
    let space = deformation_basis(&structure)?;
    let (strict, eigenvalues) = if space.dof == 0 {
        (
            StrictDirectionReport {
                found: false,
                lambda_min: None,
                coefficients: Vec::new(),
            },
            Vec::new(),
        )
    } else {
        let budget = SearchBudget {
            seed,
            ..SearchBudget::default()
        };
        let s = strict_direction(&space, Tolerance::for_lattice(&structure.lattice()), budget)?;
        (
            StrictDirectionReport {
                found: s.found,
                lambda_min: Some(s.lambda_min),
                coefficients: s.coefficients,
            },
            s.eigenvalues,
        )
    };
    Ok(AnalyzeReport {
        dof: space.dof,
        rank: space.constraint_rank,
        independent: space.independent,
        strict_direction: strict,
        eigenvalues,
        seed,
    })
}

#[derive(Debug, Serialize)]
struct TraceRow {
    tau: f64,
    omega: Vec<Vec<f64>>,
    omega_dot_eigenvalues: Vec<f64>,
    verdict: VerdictKind,
}

#[derive(Debug, Serialize)]
struct IntervalReport {
    lo: f64,
    hi: f64,
    lo_kind: BoundaryKind,
    hi_kind: BoundaryKind,
}

#[derive(Debug, Serialize)]
struct TraceReport {
    samples: Vec<TraceRow>,
    terminations: Vec<String>,
    max_length_drift: f64,
    interval: Option<IntervalReport>,
}

/// Entry point of the binary: process streams and exit code.
pub fn main() -> i32 {
    let mut stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    run(
        std::env::args_os(),
        &mut Streams {
            stdin: &mut stdin,
            stdout: &mut stdout,
            stderr: &mut stderr,
        },
    )
}
