use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use epspectra::acceptance::{self, AcceptanceConfig};
use epspectra::ep::{self, ImagTol, LocatorOptions};
use epspectra::exact::{faddeev_leverrier, parse_rational, rational_to_f64, Rational};
use epspectra::export::{self, RunMetadata};
use epspectra::grid::GridSpec;
use epspectra::newton::{self, RingTolerances};
use epspectra::operators::{
    build_hamiltonian_exact, build_rotated_hamiltonian, Coupling, ExactModel, ModelParams, Perturbation,
};
use epspectra::spectra::{self, Vary};
use epspectra::Error;

const THREADS_ENV: &str = "EPSPECTRA_THREADS";
const EXACT_DIM_WARNING: usize = 25;

#[derive(Parser)]
#[command(name = "epspectra", version, about = "Spectra and exceptional points of the PT-symmetric two-mode Bose-Hubbard model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues over a grid in gamma (or in c at fixed gamma).
    Spectrum(SpectrumArgs),
    /// Branch-matched eigenvalue trajectories over a grid in c.
    Trajectory(TrajectoryArgs),
    /// Exact characteristic polynomial in the monomial basis.
    Charpoly(CharpolyArgs),
    /// Newton diagram, leading Puiseux coefficients and rings at gamma = v.
    Newton(NewtonArgs),
    /// Exceptional-point positions over a grid in c.
    EpMap(EpMapArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Model {
    #[arg(long, short = 'N')]
    particles: usize,
    #[arg(long, default_value = "1", value_parser = parse_exact)]
    v: Rational,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: Model,
    /// Value or `min:max:steps[:log]`.
    #[arg(long, default_value = "0:2:201", value_parser = parse_grid)]
    gamma: GridSpec,
    /// Value or `min:max:steps[:log]`; at most one of gamma and c may be a range.
    #[arg(long, default_value = "0", value_parser = parse_grid)]
    c: GridSpec,
    /// Power k of the c*L_z^k perturbation; 2 is the physical 2c*L_z^2.
    #[arg(long, default_value_t = 2)]
    pert_power: u32,
    /// Polish eigenvalues against the exact characteristic polynomial.
    #[arg(long)]
    refine: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    model: Model,
    /// Fixed gamma; defaults to v.
    #[arg(long, value_parser = parse_exact)]
    gamma: Option<Rational>,
    #[arg(long, value_parser = parse_grid)]
    c: GridSpec,
    #[arg(long, default_value_t = 2)]
    pert_power: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct CharpolyArgs {
    #[command(flatten)]
    model: Model,
    /// Defaults to v.
    #[arg(long, value_parser = parse_exact)]
    gamma: Option<Rational>,
    /// Fixed coupling; kept as a formal parameter when omitted.
    #[arg(long, value_parser = parse_exact)]
    c: Option<Rational>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NewtonParam {
    /// Interaction strength c at gamma = v.
    C,
    /// Detuning gamma - v at c = 0.
    Delta,
}

#[derive(Args)]
struct NewtonArgs {
    #[command(flatten)]
    model: Model,
    #[arg(long, value_enum, default_value = "c")]
    param: NewtonParam,
    /// Power k of the L_z^k perturbation (ignored for delta).
    #[arg(long, default_value_t = 2)]
    power: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct EpMapArgs {
    #[command(flatten)]
    model: Model,
    #[arg(long, value_parser = parse_grid)]
    c: GridSpec,
    /// Interpret the c grid as values of c*N.
    #[arg(long)]
    c_times_n: bool,
    /// Upper end of the gamma scan; defaults to |v|(N+3)/2.
    #[arg(long)]
    gamma_max: Option<f64>,
    /// Bisection tolerance in gamma.
    #[arg(long, default_value_t = ep::DEFAULT_BISECTION_TOL)]
    tol: f64,
    /// Imaginary-part tolerance relative to max(1, |H|_max).
    #[arg(long, default_value_t = ep::EP_IMAG_TOL)]
    imag_tol: f64,
    /// Coarse scan cells before bisection.
    #[arg(long, default_value_t = ep::DEFAULT_COARSE_CELLS)]
    cells: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// Multiplier applied to every numerical tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Acceptance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn parse_exact(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn format_or(out: &Output, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!("format {f:?} is not available for this subcommand").to_lowercase()))
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Numerical(format!("writing {}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Numerical(format!("writing output: {e}")))
        }
    }
}

fn emit_json(path: &Option<PathBuf>, value: &Value) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    text.push('\n');
    emit(path, &text)
}

fn base_params(model: &Model, gamma: f64, c: f64, pert_power: u32) -> CliResult<ModelParams> {
    let params = ModelParams { pert_power, ..ModelParams::new(model.particles, gamma, rational_to_f64(&model.v), c) };
    params.validate()?;
    Ok(params)
}

fn cmd_spectrum(args: &SpectrumArgs) -> CliResult {
    let format = format_or(&args.out, Format::Csv, &[Format::Csv, Format::Json])?;
    let (vary, grid, fixed) = match (args.gamma.is_single(), args.c.is_single()) {
        (_, true) => (Vary::Gamma, &args.gamma, ("c", rational_to_f64(&args.c.min))),
        (true, false) => (Vary::C, &args.c, ("gamma", rational_to_f64(&args.gamma.min))),
        (false, false) => return Err(usage("only one of --gamma and --c may be a range")),
    };
    let (gamma, c) = match vary {
        Vary::Gamma => (0.0, fixed.1),
        Vary::C => (fixed.1, 0.0),
    };
    let params = base_params(&args.model, gamma, c, args.pert_power)?;
    let points = grid.points();
    let result = if args.refine {
        spectra::refined_sweep(&params, vary, &points)?
    } else {
        spectra::sweep(&params, vary, &points)?
    };
    match format {
        Format::Json => {
            let meta = RunMetadata {
                particles: params.particles,
                v: params.v,
                fixed,
                grid: grid.to_string(),
                pert_power: params.pert_power,
            };
            let mut doc = export::spectrum_json(&result, vary, &meta);
            doc["metadata"]["refined"] = json!(args.refine);
            emit_json(&args.out.output, &doc)
        }
        _ => emit(&args.out.output, &export::spectrum_csv(&result, vary)),
    }
}

fn cmd_trajectory(args: &TrajectoryArgs) -> CliResult {
    let format = format_or(&args.out, Format::Csv, &[Format::Csv, Format::Json])?;
    let gamma = rational_to_f64(args.gamma.as_ref().unwrap_or(&args.model.v));
    let params = base_params(&args.model, gamma, 0.0, args.pert_power)?;
    let sweep = spectra::track_spectra(&params, Vary::C, &args.c.points())?;
    if !sweep.unresolved_steps.is_empty() {
        eprintln!(
            "warning: {} step(s) still flagged after {} refinement levels",
            sweep.unresolved_steps.len(),
            sweep.levels
        );
    }
    match format {
        Format::Json => {
            let meta = RunMetadata {
                particles: params.particles,
                v: params.v,
                fixed: ("gamma", gamma),
                grid: args.c.to_string(),
                pert_power: params.pert_power,
            };
            emit_json(&args.out.output, &export::trajectory_json(&sweep, &meta))
        }
        _ => emit(&args.out.output, &export::trajectory_csv(&sweep)),
    }
}

fn cmd_charpoly(args: &CharpolyArgs) -> CliResult {
    let format = format_or(&args.out, Format::Text, &[Format::Text, Format::Json])?;
    if args.model.particles + 1 > EXACT_DIM_WARNING {
        eprintln!(
            "warning: exact characteristic polynomial of a {}x{} matrix may take a long time",
            args.model.particles + 1,
            args.model.particles + 1
        );
    }
    let gamma = args.gamma.clone().unwrap_or_else(|| args.model.v.clone());
    let model = ExactModel {
        particles: args.model.particles,
        gamma: gamma.clone(),
        v: args.model.v.clone(),
        c: args.c.clone().map_or(Coupling::Formal, Coupling::Value),
    };
    let cp = faddeev_leverrier(&build_hamiltonian_exact(&model)?)?;
    let mut header = format!(
        "# N = {}, v = {}, gamma = {}, c = {}\n",
        model.particles,
        model.v,
        gamma,
        args.c.as_ref().map_or("c (formal)".to_string(), ToString::to_string)
    );
    match format {
        Format::Json => {
            let meta = json!({
                "N": model.particles,
                "v": model.v.to_string(),
                "gamma": gamma.to_string(),
                "c": args.c.as_ref().map(ToString::to_string),
            });
            emit_json(&args.out.output, &export::charpoly_json(&cp, meta))
        }
        _ => {
            header.push_str(&export::charpoly_text(&cp));
            emit(&args.out.output, &header)
        }
    }
}

fn cmd_newton(args: &NewtonArgs) -> CliResult {
    let format = format_or(&args.out, Format::Text, &[Format::Text, Format::Json])?;
    let n = args.model.particles;
    let (perturbation, k, name) = match args.param {
        NewtonParam::C => {
            if args.power == 0 {
                return Err(usage("--power must be at least 1"));
            }
            (Perturbation::for_power(args.power), args.power as usize, "c")
        }
        NewtonParam::Delta => (Perturbation::Detuning, 1, "delta"),
    };
    let cp = faddeev_leverrier(&build_rotated_hamiltonian(n, &args.model.v, perturbation)?)?;
    let analysis = newton::analyze(&cp, RingTolerances::default())?;
    let prediction = newton::predict_ring_counts(n, k)?;
    match format {
        Format::Json => {
            let meta = json!({
                "N": n,
                "v": args.model.v.to_string(),
                "parameter": name,
                "power": k,
                "order": "first",
            });
            emit_json(&args.out.output, &export::newton_json(&analysis, &prediction, meta))
        }
        _ => {
            let mut text = format!("# N = {n}, v = {}, parameter {name}, power {k} (first-order terms)\n", args.model.v);
            text.push_str(&export::newton_text(&analysis, &prediction, name));
            emit(&args.out.output, &text)
        }
    }
}

fn cmd_ep_map(args: &EpMapArgs) -> CliResult {
    let format = format_or(&args.out, Format::Csv, &[Format::Csv, Format::Json])?;
    let params = base_params(&args.model, 0.0, 0.0, 2)?;
    let mut c_grid = args.c.points();
    if args.c_times_n {
        for c in &mut c_grid {
            *c /= params.particles as f64;
        }
    }
    let opts = LocatorOptions {
        gamma_max: args.gamma_max,
        coarse_cells: args.cells,
        tol: args.tol,
        imag_tol: ImagTol::Relative(args.imag_tol),
        ..LocatorOptions::default()
    };
    let map = ep::ep_map(&params, &c_grid, &opts)?;
    let grid_label = if args.c_times_n { format!("c*N = {}", args.c) } else { args.c.to_string() };
    match format {
        Format::Json => {
            let mut doc = export::ep_map_json(&map, &grid_label);
            doc["metadata"]["c_times_n"] = json!(args.c_times_n);
            emit_json(&args.out.output, &doc)?
        }
        _ => emit(&args.out.output, &export::ep_map_csv(&map))?,
    }
    for f in &map.failures {
        eprintln!("error: at c = {}: {}", export::fmt_num(f.c), f.message);
    }
    if map.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{} of {} grid points failed", map.failures.len(), c_grid.len())))
    }
}

fn cmd_verify(args: &VerifyArgs) -> CliResult {
    if !(args.tolerance_scale >= 0.0 && args.tolerance_scale.is_finite()) {
        return Err(usage("--tolerance-scale must be finite and non-negative"));
    }
    let outcomes = acceptance::run_all(&AcceptanceConfig { tolerance_scale: args.tolerance_scale });
    let mut report = acceptance::render(&outcomes);
    let passed = outcomes.iter().filter(|o| o.passed).count();
    report.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    emit(&args.output, &report)?;
    if acceptance::all_passed(&outcomes) {
        Ok(())
    } else {
        Err(Failure::Acceptance)
    }
}

fn configure_threads() -> CliResult {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Numerical(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult {
    configure_threads()?;
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Trajectory(a) => cmd_trajectory(a),
        Command::Charpoly(a) => cmd_charpoly(a),
        Command::Newton(a) => cmd_newton(a),
        Command::EpMap(a) => cmd_ep_map(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance) => {
            eprintln!("error: acceptance checks failed");
            ExitCode::from(3)
        }
    }
}
