//! Command-line front end: builds complexes, reports curvature and the
//! constant-scalar-curvature verdicts, searches conformal classes for
//! critical points, and tests cyclic-length admissibility.
//!
//! Exit codes: 0 success, 2 argument error, 3 metric (realizability) error,
//! 4 non-convergence. Identical arguments and seed produce byte-identical
//! output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use regge_core::complex::{build_complex, Complex};
use regge_core::conformal::{
    cyclic_admissibility, find_critical_point, project_gauge, ConformalError, CriticalPointRun,
    OptimizeOptions, Outcome, Target,
};
use regge_core::curvature::{check_csc, cyclic_metric, report, CyclicLevels, Metric};
use regge_core::fmt::{g17, to_json_string};

const EXIT_USAGE: u8 = 2;
const EXIT_METRIC: u8 = 3;
const EXIT_NONCONVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "regge",
    version,
    about = "Piecewise-flat curvature on boundary complexes of 4-dimensional cyclic polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the complex: facets, types, census, dihedral symmetry.
    Complex(ComplexArgs),
    /// Curvature report and LCSC/VCSC verdicts for a metric.
    Curvature(CurvatureArgs),
    /// Gradient-descent search for a critical point of LEHR or VEHR.
    Optimize(OptimizeArgs),
    /// Decide whether a conformal class admits a cyclic length metric.
    Admissible(AdmissibleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexArgs {
    /// Number of vertices (at least 5).
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CurvatureArgs {
    /// Number of vertices (at least 5).
    #[arg(long)]
    n: usize,
    /// Cyclic level lengths, comma separated, one per distance (m+1 values).
    #[arg(long, conflicts_with = "lengths")]
    levels: Option<String>,
    /// CSV file of edge lengths, rows `i,j,value` with 0-based vertices.
    #[arg(long)]
    lengths: Option<PathBuf>,
    /// Tolerance for the CSC verdicts.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Lehr,
    Vehr,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Number of vertices (at least 5).
    #[arg(long)]
    n: usize,
    /// CSV file of base edge lengths; all ones when omitted.
    #[arg(long)]
    lengths: Option<PathBuf>,
    /// CSV file for the initial vertex function, rows `v,value`.
    #[arg(long, conflicts_with = "seed")]
    f0: Option<PathBuf>,
    /// Seed a random initial perturbation with sup-norm 0.05.
    #[arg(long)]
    seed: Option<u64>,
    /// Functional to descend.
    #[arg(long, value_enum, default_value_t = TargetArg::Lehr)]
    target: TargetArg,
    /// Convergence threshold on the projected gradient norm.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Cap on accepted descent steps.
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Write the iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AdmissibleArgs {
    /// Number of vertices (at least 5).
    #[arg(long)]
    n: usize,
    /// CSV file of base edge lengths, rows `i,j,value`.
    #[arg(long)]
    lengths: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

enum CliError {
    Usage(String),
    Metric(String),
    NonConvergence(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Metric(_) => EXIT_METRIC,
            CliError::NonConvergence(_) => EXIT_NONCONVERGENCE,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Metric(m)
            | CliError::NonConvergence(m)
            | CliError::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {}", e.message());
        return ExitCode::from(e.code());
    }
    let result = match cli.command {
        Command::Complex(args) => cmd_complex(args),
        Command::Curvature(args) => cmd_curvature(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Admissible(args) => cmd_admissible(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// REGGE_THREADS caps the parallel report pass; 0 or unset means automatic.
fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("REGGE_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(0) => Ok(()),
            Ok(k) => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global()
                    .ok();
                Ok(())
            }
            Err(_) => Err(CliError::Usage(format!(
                "REGGE_THREADS must be a non-negative integer, got {raw:?}"
            ))),
        },
    }
}

fn build(n: usize) -> Result<Complex, CliError> {
    build_complex(n).map_err(|e| CliError::Usage(e.to_string()))
}

fn emit(output: &OutputArgs, content: &str) -> Result<bool, CliError> {
    match &output.out {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(true)
        }
        None => {
            print!("{content}");
            Ok(false)
        }
    }
}

fn parse_levels(c: &Complex, raw: &str) -> Result<CyclicLevels, CliError> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad level value {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != c.m() + 1 {
        return Err(CliError::Usage(format!(
            "expected {} levels for n = {}, got {}",
            c.m() + 1,
            c.n(),
            values.len()
        )));
    }
    CyclicLevels::new(values).map_err(|e| CliError::Usage(e.to_string()))
}

/// Edge lengths from CSV rows `i,j,value`; every unordered edge must appear
/// exactly once.
fn read_lengths_file(c: &Complex, path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut lengths: Vec<Option<f64>> = vec![None; c.edges().len()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| {
            CliError::Usage(format!(
                "{}:{}: {what} in {line:?}",
                path.display(),
                lineno + 1
            ))
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad("expected i,j,value"));
        }
        let i: usize = fields[0].parse().map_err(|_| bad("bad vertex index"))?;
        let j: usize = fields[1].parse().map_err(|_| bad("bad vertex index"))?;
        let value: f64 = fields[2].parse().map_err(|_| bad("bad length"))?;
        let e = c
            .edge_index(i, j)
            .ok_or_else(|| bad("not an edge of the complex"))?;
        if lengths[e].replace(value).is_some() {
            return Err(bad("duplicate edge"));
        }
    }
    lengths
        .into_iter()
        .enumerate()
        .map(|(e, l)| {
            l.ok_or_else(|| {
                let [i, j] = c.edges()[e];
                CliError::Usage(format!(
                    "{}: missing edge ({i}, {j})",
                    path.display()
                ))
            })
        })
        .collect()
}

/// Vertex function from CSV rows `v,value`; every vertex must appear once.
fn read_vertex_file(c: &Complex, path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut values: Vec<Option<f64>> = vec![None; c.n()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| {
            CliError::Usage(format!(
                "{}:{}: {what} in {line:?}",
                path.display(),
                lineno + 1
            ))
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(bad("expected v,value"));
        }
        let v: usize = fields[0].parse().map_err(|_| bad("bad vertex index"))?;
        let value: f64 = fields[1].parse().map_err(|_| bad("bad value"))?;
        if v >= c.n() {
            return Err(bad("vertex out of range"));
        }
        if values[v].replace(value).is_some() {
            return Err(bad("duplicate vertex"));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| CliError::Usage(format!("{}: missing vertex {v}", path.display()))))
        .collect()
}

fn cmd_complex(args: ComplexArgs) -> Result<(), CliError> {
    let c = build(args.n)?;
    let content = match args.output.format {
        Format::Json => c.to_json(),
        Format::Csv => c.to_canonical_text(),
    };
    if emit(&args.output, &content)? {
        let census: Vec<String> = c
            .type_census()
            .into_iter()
            .map(|(ty, count)| format!("{ty}:{count}"))
            .collect();
        println!(
            "complex n={} tetrahedra={} census={}",
            c.n(),
            c.tetrahedra().len(),
            census.join(",")
        );
    }
    Ok(())
}

fn cmd_curvature(args: CurvatureArgs) -> Result<(), CliError> {
    if args.tol <= 0.0 || !args.tol.is_finite() {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let c = build(args.n)?;
    let metric = match (&args.levels, &args.lengths) {
        (Some(raw), None) => {
            let levels = parse_levels(&c, raw)?;
            cyclic_metric(&c, &levels).map_err(|e| CliError::Metric(e.to_string()))?
        }
        (None, Some(path)) => {
            let lengths = read_lengths_file(&c, path)?;
            Metric::new(&c, lengths).map_err(|e| CliError::Metric(e.to_string()))?
        }
        (None, None) => {
            return Err(CliError::Usage("provide --levels or --lengths".into()));
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let r = report(&c, &metric).map_err(|e| CliError::Metric(e.to_string()))?;
    let csc = check_csc(&r, args.tol);
    let content = match args.output.format {
        Format::Json => r.to_json(&c, &csc),
        Format::Csv => r.to_csv(&c, &csc),
    };
    if emit(&args.output, &content)? {
        let verdict = |ok: bool| if ok { "pass" } else { "fail" };
        println!(
            "LCSC: {} (max residual {})",
            verdict(csc.lcsc),
            g17(csc.max_lcsc_residual)
        );
        println!(
            "VCSC: {} (max residual {})",
            verdict(csc.vcsc),
            g17(csc.max_vcsc_residual)
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizeDoc<'a> {
    target: Target,
    converged: bool,
    outcome: Outcome,
    iterations: usize,
    value: f64,
    grad_norm: f64,
    f: &'a [f64],
    csc: &'a regge_core::CscCheck,
    report: &'a regge_core::CurvatureReport,
}

fn target_label(t: Target) -> &'static str {
    match t {
        Target::Lehr => "lehr",
        Target::Vehr => "vehr",
    }
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Converged => "converged",
        Outcome::MaxIterations => "max_iterations",
        Outcome::Boundary => "boundary",
        Outcome::Stalled => "stalled",
    }
}

fn optimize_csv(run: &CriticalPointRun, c: &Complex) -> String {
    let mut out = String::new();
    out.push_str(&format!("target,{}\n", target_label(run.target)));
    out.push_str(&format!("converged,{}\n", run.converged));
    out.push_str(&format!("outcome,{}\n", outcome_label(run.outcome)));
    out.push_str(&format!("iterations,{}\n", run.iterations));
    out.push_str(&format!("value,{}\n", g17(run.value)));
    out.push_str(&format!("grad_norm,{}\n", g17(run.grad_norm)));
    for (v, fv) in run.f.iter().enumerate() {
        out.push_str(&format!("f,{v},{}\n", g17(*fv)));
    }
    out.push_str(&run.report.to_csv(c, &run.csc));
    out
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    if args.tol <= 0.0 || !args.tol.is_finite() {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let c = build(args.n)?;
    let base = match &args.lengths {
        Some(path) => read_lengths_file(&c, path)?,
        None => vec![1.0; c.edges().len()],
    };
    let f0 = match (&args.f0, args.seed) {
        (Some(path), _) => read_vertex_file(&c, path)?,
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f: Vec<f64> = (0..c.n()).map(|_| rng.random_range(-0.05..0.05)).collect();
            project_gauge(&mut f);
            f
        }
        (None, None) => vec![0.0; c.n()],
    };
    let opts = OptimizeOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        ..OptimizeOptions::default()
    };
    let target = match args.target {
        TargetArg::Lehr => Target::Lehr,
        TargetArg::Vehr => Target::Vehr,
    };
    let run = match find_critical_point(&c, &base, &f0, target, &opts) {
        Ok(run) => run,
        Err(e @ ConformalError::Boundary(_)) => return Err(CliError::Metric(e.to_string())),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };

    if let Some(path) = &args.trace {
        fs::write(path, run.trace_csv())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let content = match args.output.format {
        Format::Json => to_json_string(&OptimizeDoc {
            target: run.target,
            converged: run.converged,
            outcome: run.outcome,
            iterations: run.iterations,
            value: run.value,
            grad_norm: run.grad_norm,
            f: &run.f,
            csc: &run.csc,
            report: &run.report,
        }),
        Format::Csv => optimize_csv(&run, &c),
    };
    if emit(&args.output, &content)? {
        println!(
            "{}: outcome={} iterations={} value={} grad_norm={}",
            target_label(run.target),
            outcome_label(run.outcome),
            run.iterations,
            g17(run.value),
            g17(run.grad_norm)
        );
    }
    if run.converged {
        Ok(())
    } else {
        Err(CliError::NonConvergence(format!(
            "search ended with outcome {} after {} accepted steps",
            outcome_label(run.outcome),
            run.iterations
        )))
    }
}

fn cmd_admissible(args: AdmissibleArgs) -> Result<(), CliError> {
    let c = build(args.n)?;
    let base = read_lengths_file(&c, &args.lengths)?;
    let adm = cyclic_admissibility(&c, &base).map_err(|e| CliError::Usage(e.to_string()))?;

    #[derive(Serialize)]
    struct Doc<'a> {
        n: usize,
        admissible: bool,
        residual: f64,
        f: &'a Option<Vec<f64>>,
        levels: &'a Option<Vec<f64>>,
    }
    let content = match args.output.format {
        Format::Json => to_json_string(&Doc {
            n: c.n(),
            admissible: adm.admissible,
            residual: adm.residual,
            f: &adm.f,
            levels: &adm.levels,
        }),
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!("n,{}\n", c.n()));
            out.push_str(&format!("admissible,{}\n", adm.admissible));
            out.push_str(&format!("residual,{}\n", g17(adm.residual)));
            if let Some(f) = &adm.f {
                for (v, fv) in f.iter().enumerate() {
                    out.push_str(&format!("f,{v},{}\n", g17(*fv)));
                }
            }
            if let Some(levels) = &adm.levels {
                for (k, level) in levels.iter().enumerate() {
                    out.push_str(&format!("level,{},{}\n", k + 1, g17(*level)));
                }
            }
            out
        }
    };
    if emit(&args.output, &content)? {
        println!(
            "{} (residual {})",
            if adm.admissible { "admissible" } else { "inadmissible" },
            g17(adm.residual)
        );
    }
    Ok(())
}
