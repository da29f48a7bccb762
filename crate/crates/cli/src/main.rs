//! `umat` — evaluate parameter-table materials, drive load paths, and run
//! the verification suite from the command line.
//!
//! Exit codes: 0 success, 1 failed checks or evaluation errors, 2 deck or
//! argument parse errors, 3 convergence/step failures.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{Matrix3, Vector3};

use umat_core::deck::{parse_deck_with_warnings, serialize_deck, MaterialSpec, MaterialType};
use umat_core::driver::{emit_csv, run_sweep, PathMode, DEFAULT_MAX_ITER, DEFAULT_TOL};
use umat_core::kinematics::{compute_invariants, FiberSet};
use umat_core::presets::{build_preset, preset_description, PRESET_NAMES};
use umat_core::stress::{cauchy_stress, energy_at};
use umat_core::verify;
use umat_core::Error;

#[derive(Parser)]
#[command(
    name = "umat",
    about = "invariant-based hyperelastic material kernel",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate energy, stress, and invariants at one deformation gradient.
    Eval(EvalArgs),
    /// Drive a homogeneous load path and emit a stress curve as CSV.
    Curve(CurveArgs),
    /// List or print the built-in material presets.
    Preset(PresetArgs),
    /// Run the verification suite (finite differences, closed forms,
    /// objectivity sampling) and print a pass/fail report.
    Check(CheckArgs),
}

#[derive(Args)]
struct MaterialSource {
    /// Input deck file.
    #[arg(long, conflicts_with = "preset")]
    deck: Option<String>,
    /// Preset name (see `umat preset list`).
    #[arg(long)]
    preset: Option<String>,
    /// Preset parameter override, repeatable: --param c10=0.5
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    source: MaterialSource,
    /// Deformation gradient, nine row-major entries "f11,f12,...,f33".
    #[arg(long = "F", allow_hyphen_values = true)]
    f: String,
    /// Fiber directions `x,y,z[;x,y,z[;x,y,z]]` overriding the deck.
    #[arg(long)]
    fibers: Option<String>,
    /// Hydrostatic pressure (required for incompressible tables).
    #[arg(long, allow_negative_numbers = true)]
    pressure: Option<f64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Uniaxial,
    Equibiaxial,
    Shear,
    Volumetric,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    source: MaterialSource,
    /// Load mode.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Control range "A:B:N" (N grid points from A to B; the reference
    /// state is always included as the marching seed).
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    /// Shear plane as two axis digits, e.g. 12 for F = I + g*e1(x)e2.
    #[arg(long)]
    plane: Option<String>,
    /// Fiber directions `x,y,z[;...]` overriding the deck.
    #[arg(long)]
    fibers: Option<String>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Newton tolerance on residual stress components.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Newton iteration cap per point.
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct PresetArgs {
    #[command(subcommand)]
    action: PresetAction,
}

#[derive(Subcommand)]
enum PresetAction {
    /// List all preset names with a one-line description.
    List,
    /// Print a preset's canonical deck.
    Show { name: String },
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: MaterialSource,
    /// Samples per randomized check.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Seed for the deterministic sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the machine-readable report (JSON) to this path.
    #[arg(long)]
    report: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn of(err: Error) -> Self {
        let code = match &err {
            Error::Parse(_) => 2,
            Error::NoConvergence { .. } | Error::StepFailure { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }

    fn args(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::of(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of a piped curve stops reading
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Preset(args) => cmd_preset(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_material(source: &MaterialSource) -> Result<MaterialSpec, Failure> {
    let params: Vec<(String, f64)> = source
        .params
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Failure::args(format!("--param {p}: expected NAME=VALUE")))?;
            let value: f64 = v
                .parse()
                .map_err(|_| Failure::args(format!("--param {p}: `{v}` is not a number")))?;
            Ok((k.to_string(), value))
        })
        .collect::<Result<_, Failure>>()?;
    match (&source.deck, &source.preset) {
        (Some(path), None) => {
            if !params.is_empty() {
                return Err(Failure::args("--param only applies to --preset"));
            }
            let text =
                std::fs::read_to_string(path).map_err(|e| Failure::args(format!("{path}: {e}")))?;
            let (spec, warnings) =
                parse_deck_with_warnings(&text).map_err(|e| Failure::of(e.into()))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(spec)
        }
        (None, Some(name)) => {
            let pairs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            Ok(build_preset(name, &pairs)?)
        }
        _ => Err(Failure::args("give exactly one of --deck or --preset")),
    }
}

fn parse_fibers(arg: &str) -> Result<FiberSet, Failure> {
    let mut dirs = Vec::new();
    for part in arg.split(';') {
        let comps: Vec<f64> = part
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::args(format!("--fibers: `{part}` is not x,y,z")))?;
        if comps.len() != 3 {
            return Err(Failure::args(format!("--fibers: `{part}` is not x,y,z")));
        }
        let v = Vector3::new(comps[0], comps[1], comps[2]);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Failure::args("--fibers: zero vector"));
        }
        dirs.push(v / norm);
    }
    FiberSet::new(&dirs).map_err(|e| Failure::args(e.to_string()))
}

fn effective_fibers(spec: &MaterialSpec, arg: &Option<String>) -> Result<FiberSet, Failure> {
    match arg {
        Some(text) => parse_fibers(text),
        None => Ok(spec.effective_fibers()),
    }
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, Failure> {
    let spec = load_material(&args.source)?;
    let comps: Vec<f64> = args
        .f
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::args("--F: expected nine comma-separated numbers"))?;
    if comps.len() != 9 {
        return Err(Failure::args(format!(
            "--F: expected nine entries, got {}",
            comps.len()
        )));
    }
    let f = Matrix3::from_row_slice(&comps);
    let fibers = effective_fibers(&spec, &args.fibers)?;

    let stress = cauchy_stress(&spec.table, &f, &fibers, args.pressure)?;
    let (state, eval) = energy_at(&spec.table, &f, &fibers)?;
    let inv = compute_invariants(&state, &fibers, &spec.table.mixed);

    println!(
        "material: {} [{}], {}",
        if spec.name.is_empty() {
            "(unnamed)"
        } else {
            &spec.name
        },
        if spec.units.is_empty() {
            "-"
        } else {
            &spec.units
        },
        match spec.table.material_type {
            MaterialType::Incompressible => "incompressible",
            MaterialType::Compressible => "compressible",
        }
    );
    println!("J    = {}", state.j);
    println!("psi  = {}", eval.energy);
    println!("sigma =");
    for i in 0..3 {
        println!(
            "  [{:>15.8e} {:>15.8e} {:>15.8e}]",
            stress.sigma[(i, 0)],
            stress.sigma[(i, 1)],
            stress.sigma[(i, 2)]
        );
    }
    let names = [
        "i1", "i2", "i3", "i4_11", "i5_11", "i4_12", "i5_12", "i4_22", "i5_22", "i4_13", "i5_13",
        "i4_23", "i5_23", "i4_33", "i5_33",
    ];
    println!("invariants:");
    for (name, v) in names.iter().zip(inv.values.iter()) {
        println!("  {name:<6} = {v}");
    }
    for (idx, v) in &inv.mixed_values {
        println!("  i{idx}   = {v}");
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_range(range: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::args("--range: expected A:B:N"));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::args("--range: A is not a number"))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::args("--range: B is not a number"))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Failure::args("--range: N is not an integer"))?;
    if n == 0 {
        return Err(Failure::args("--range: N must be at least 1"));
    }
    Ok((a, b, n))
}

fn cmd_curve(args: CurveArgs) -> Result<ExitCode, Failure> {
    let spec = load_material(&args.source)?;
    let (a, b, n) = parse_range(&args.range)?;
    let mode = match args.mode {
        ModeArg::Uniaxial => PathMode::Uniaxial,
        ModeArg::Equibiaxial => PathMode::Equibiaxial,
        ModeArg::Volumetric => PathMode::Volumetric,
        ModeArg::Shear => {
            let plane = args.plane.as_deref().unwrap_or("12");
            let digits: Vec<usize> = plane
                .chars()
                .filter_map(|c| c.to_digit(10).map(|d| d as usize))
                .collect();
            if digits.len() != 2 {
                return Err(Failure::args("--plane: expected two axis digits like 12"));
            }
            PathMode::SimpleShear {
                plane: (digits[0], digits[1]),
            }
        }
    };
    if args.plane.is_some() && args.mode != ModeArg::Shear {
        return Err(Failure::args("--plane only applies to --mode shear"));
    }
    let fibers = effective_fibers(&spec, &args.fibers)?;
    let curve = run_sweep(&spec, mode, &fibers, a, b, n, args.tol, args.max_iter)?;
    let csv = emit_csv(&curve);
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_preset(args: PresetArgs) -> Result<ExitCode, Failure> {
    match args.action {
        PresetAction::List => {
            for name in PRESET_NAMES {
                println!("{name:<32} {}", preset_description(name).unwrap_or(""));
            }
            Ok(ExitCode::SUCCESS)
        }
        PresetAction::Show { name } => {
            let spec = build_preset(&name, &[])?;
            print!("{}", serialize_deck(&spec));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, Failure> {
    let report = match (&args.source.deck, &args.source.preset) {
        (None, None) => verify::run_all(args.seed),
        _ => {
            let spec = load_material(&args.source)?;
            let mut report = verify::check_spec(&spec, args.samples, args.seed);
            // the closed-form references are material independent
            for entry in verify::check_closed_forms(args.seed) {
                report.entries.push(entry);
            }
            report
        }
    };
    print!("{}", report.render());
    if let Some(path) = &args.report {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut file, &report).map_err(|e| Failure {
            code: 1,
            message: e.to_string(),
        })?;
        file.write_all(b"\n")?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
