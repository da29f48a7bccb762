//! Homogeneous material-point load paths and stress-stretch curves.
//!
//! Each mode prescribes the deformation gradient up to a small set of free
//! unknowns that are eliminated by traction conditions:
//!
//! - uniaxial: F = diag(λ, λ₂, λ₃) with σ₂₂ = σ₃₃ = 0. Incompressible tables
//!   take λ₂ = λ₃ = λ^{-1/2} with the pressure fixed by σ₂₂ = 0; compressible
//!   tables solve (λ₂, λ₃) by Newton with a finite-difference Jacobian.
//! - equibiaxial: F = diag(λ, λ, λ₃) with σ₃₃ = 0; λ₃ = λ⁻² when
//!   incompressible.
//! - simple shear in plane (a, b): F = I + γ·e_a ⊗ e_b, J = 1 identically;
//!   for incompressible tables the pressure is fixed by zero normal stress on
//!   the out-of-plane axis.
//! - volumetric: F = J^{1/3}·I, compressible tables only.
//!
//! Control sequences are strictly monotone and start at the reference state
//! (λ = 1, γ = 0, J = 1); each point warm-starts Newton from the previous
//! solution. Compression runs through the same machinery and Macauley-gated
//! fiber terms drop out on their own.

use nalgebra::{Matrix3, Vector3};

use crate::deck::{format_float, MaterialSpec, MaterialType};
use crate::kinematics::{compute_invariants, DeformationState, FiberSet, InvariantState};
use crate::stress::{cauchy_stress, tangent_fd};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 50;

/// Deformation mode of a load path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// Control is the axial stretch λ along e₁.
    Uniaxial,
    /// Control is the in-plane stretch λ along e₁ and e₂.
    Equibiaxial,
    /// Control is the shear γ; `plane` is the ordered 1-based axis pair
    /// (a, b) in F = I + γ·e_a ⊗ e_b.
    SimpleShear { plane: (usize, usize) },
    /// Control is the volume ratio J (compressible tables only).
    Volumetric,
}

impl PathMode {
    /// The reference control value (zero-deformation point) of the mode.
    pub fn reference_control(self) -> f64 {
        match self {
            PathMode::SimpleShear { .. } => 0.0,
            _ => 1.0,
        }
    }

    fn out_of_plane(plane: (usize, usize)) -> usize {
        6 - plane.0 - plane.1
    }
}

impl std::fmt::Display for PathMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathMode::Uniaxial => write!(f, "uniaxial"),
            PathMode::Equibiaxial => write!(f, "equibiaxial"),
            PathMode::SimpleShear { plane } => write!(f, "shear plane ({},{})", plane.0, plane.1),
            PathMode::Volumetric => write!(f, "volumetric"),
        }
    }
}

/// A monotone control sequence starting at the reference state, plus the
/// fiber frame to evaluate in.
#[derive(Debug, Clone)]
pub struct LoadPath {
    pub mode: PathMode,
    pub controls: Vec<f64>,
    pub fibers: FiberSet,
}

impl LoadPath {
    pub fn new(mode: PathMode, controls: Vec<f64>, fibers: FiberSet) -> Result<Self> {
        if let PathMode::SimpleShear { plane: (a, b) } = mode {
            if !(1..=3).contains(&a) || !(1..=3).contains(&b) || a == b {
                return Err(Error::InvalidPath(format!(
                    "shear plane ({a},{b}) is not a pair of distinct axes 1..3"
                )));
            }
        }
        let reference = mode.reference_control();
        match controls.first() {
            None => return Err(Error::InvalidPath("empty control sequence".into())),
            Some(&first) if first != reference => {
                return Err(Error::InvalidPath(format!(
                    "first control value must be the reference state {reference}, got {first}"
                )))
            }
            _ => {}
        }
        let increasing = controls.len() < 2 || controls[1] > controls[0];
        for w in controls.windows(2) {
            let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
            if !ok {
                return Err(Error::InvalidPath(
                    "control sequence is not strictly monotone".into(),
                ));
            }
        }
        if !matches!(mode, PathMode::SimpleShear { .. }) && controls.iter().any(|&c| c <= 0.0) {
            return Err(Error::InvalidPath(
                "stretch/volume controls must be positive".into(),
            ));
        }
        Ok(Self {
            mode,
            controls,
            fibers,
        })
    }
}

/// One converged point of a load path.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub control: f64,
    /// The full deformation gradient, including solved lateral stretches.
    pub f: Matrix3<f64>,
    /// Cauchy stress (pressure already subtracted when incompressible).
    pub sigma: Matrix3<f64>,
    /// Hydrostatic pressure eliminated by the traction condition;
    /// zero for compressible tables.
    pub pressure: f64,
    pub invariants: InvariantState,
}

/// A computed stress-stretch curve with its material metadata.
#[derive(Debug, Clone)]
pub struct Curve {
    pub material: String,
    pub units: String,
    pub mode: PathMode,
    pub compressibility: MaterialType,
    pub points: Vec<CurvePoint>,
}

/// March a load path with default Newton settings.
pub fn run_path(spec: &MaterialSpec, path: &LoadPath) -> Result<Curve> {
    run_path_with(spec, path, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// March a load path: one converged [`CurvePoint`] per control value,
/// warm-starting each Newton solve from the previous solution.
pub fn run_path_with(
    spec: &MaterialSpec,
    path: &LoadPath,
    tol: f64,
    max_iter: usize,
) -> Result<Curve> {
    let table = &spec.table;
    if matches!(path.mode, PathMode::Volumetric)
        && table.material_type == MaterialType::Incompressible
    {
        return Err(Error::InvalidPath(
            "volumetric path requires a compressible table".into(),
        ));
    }
    let fibers = &path.fibers;
    let mut points = Vec::with_capacity(path.controls.len());
    let mut guess = [1.0f64; 2];
    for &control in &path.controls {
        let (f, sigma, pressure) = match table.material_type {
            MaterialType::Incompressible => solve_incompressible(spec, fibers, path.mode, control)?,
            MaterialType::Compressible => {
                solve_compressible(spec, fibers, path.mode, control, &mut guess, tol, max_iter)?
            }
        };
        let state = DeformationState::new(f).map_err(|e| step_failure(control, e))?;
        let invariants = compute_invariants(&state, fibers, &table.mixed);
        points.push(CurvePoint {
            control,
            f,
            sigma,
            pressure,
            invariants,
        });
    }
    Ok(Curve {
        material: spec.name.clone(),
        units: spec.units.clone(),
        mode: path.mode,
        compressibility: table.material_type,
        points,
    })
}

/// Run a whole sweep over [a, b] with n grid points, splitting it into monotone
/// branches that march outward from the reference state. The reference point
/// is always included; points are returned in ascending control order.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    spec: &MaterialSpec,
    mode: PathMode,
    fibers: &FiberSet,
    a: f64,
    b: f64,
    n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Curve> {
    let reference = mode.reference_control();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut grid = Vec::with_capacity(n);
    if n == 1 {
        grid.push(lo);
    } else {
        for i in 0..n {
            grid.push(lo + (hi - lo) * i as f64 / (n - 1) as f64);
        }
    }
    let mut down = vec![reference];
    down.extend(grid.iter().rev().filter(|&&c| c < reference));
    let mut up = vec![reference];
    up.extend(grid.iter().filter(|&&c| c > reference));

    let mut curve = Curve {
        material: spec.name.clone(),
        units: spec.units.clone(),
        mode,
        compressibility: spec.table.material_type,
        points: Vec::new(),
    };
    if down.len() > 1 {
        let path = LoadPath::new(mode, down, fibers.clone())?;
        let mut branch = run_path_with(spec, &path, tol, max_iter)?;
        branch.points.reverse();
        branch.points.pop(); // reference re-added by the up branch
        curve.points.extend(branch.points);
    }
    let path = LoadPath::new(mode, up, fibers.clone())?;
    curve
        .points
        .extend(run_path_with(spec, &path, tol, max_iter)?.points);
    Ok(curve)
}

fn step_failure(control: f64, e: Error) -> Error {
    match e {
        Error::NoConvergence { .. } => e,
        other => Error::StepFailure {
            control,
            source: Box::new(other),
        },
    }
}

fn diag(a: f64, b: f64, c: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&Vector3::new(a, b, c))
}

/// Incompressible points: the lateral kinematics are fixed by J = 1 and the
/// pressure follows directly from the zero-traction component.
fn solve_incompressible(
    spec: &MaterialSpec,
    fibers: &FiberSet,
    mode: PathMode,
    control: f64,
) -> Result<(Matrix3<f64>, Matrix3<f64>, f64)> {
    let (f, traction_axis) = match mode {
        PathMode::Uniaxial => {
            let l = control;
            (diag(l, l.powf(-0.5), l.powf(-0.5)), 1)
        }
        PathMode::Equibiaxial => {
            let l = control;
            (diag(l, l, l.powi(-2)), 2)
        }
        PathMode::SimpleShear { plane } => {
            let mut f = Matrix3::identity();
            f[(plane.0 - 1, plane.1 - 1)] = control;
            (f, PathMode::out_of_plane(plane) - 1)
        }
        PathMode::Volumetric => unreachable!("rejected in run_path_with"),
    };
    let bare =
        cauchy_stress(&spec.table, &f, fibers, Some(0.0)).map_err(|e| step_failure(control, e))?;
    let p = bare.sigma[(traction_axis, traction_axis)];
    let sigma = bare.sigma - Matrix3::identity() * p;
    Ok((f, sigma, p))
}

/// Compressible points: free lateral stretches eliminated by Newton with a
/// finite-difference Jacobian taken from the stress tangent.
fn solve_compressible(
    spec: &MaterialSpec,
    fibers: &FiberSet,
    mode: PathMode,
    control: f64,
    guess: &mut [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Result<(Matrix3<f64>, Matrix3<f64>, f64)> {
    let table = &spec.table;
    match mode {
        PathMode::SimpleShear { plane } => {
            let mut f = Matrix3::identity();
            f[(plane.0 - 1, plane.1 - 1)] = control;
            let s = cauchy_stress(table, &f, fibers, None).map_err(|e| step_failure(control, e))?;
            Ok((f, s.sigma, 0.0))
        }
        PathMode::Volumetric => {
            let f = Matrix3::identity() * control.powf(1.0 / 3.0);
            let s = cauchy_stress(table, &f, fibers, None).map_err(|e| step_failure(control, e))?;
            Ok((f, s.sigma, 0.0))
        }
        PathMode::Uniaxial => {
            // residuals (σ₂₂, σ₃₃) over unknowns (λ₂, λ₃)
            let build = |x: &[f64; 2]| diag(control, x[0], x[1]);
            let mut x = *guess;
            let mut last_residual = f64::INFINITY;
            for _ in 0..max_iter {
                let f = build(&x);
                let s =
                    cauchy_stress(table, &f, fibers, None).map_err(|e| step_failure(control, e))?;
                let r = [s.sigma[(1, 1)], s.sigma[(2, 2)]];
                let scale = 1.0 + s.sigma.abs().max();
                last_residual = r[0].abs().max(r[1].abs());
                if last_residual < tol * scale {
                    *guess = x;
                    return Ok((f, s.sigma, 0.0));
                }
                let t = tangent_fd(table, &f, fibers, None, 1e-6)
                    .map_err(|e| step_failure(control, e))?;
                let j = nalgebra::Matrix2::new(
                    t.d[1][1][1][1],
                    t.d[1][1][2][2],
                    t.d[2][2][1][1],
                    t.d[2][2][2][2],
                );
                let delta = j.lu().solve(&nalgebra::Vector2::new(-r[0], -r[1])).ok_or(
                    Error::NoConvergence {
                        iterations: max_iter,
                        residual: last_residual,
                    },
                )?;
                let mut step = 1.0;
                while x[0] + step * delta[0] <= 0.0 || x[1] + step * delta[1] <= 0.0 {
                    step *= 0.5;
                }
                x[0] += step * delta[0];
                x[1] += step * delta[1];
            }
            Err(Error::NoConvergence {
                iterations: max_iter,
                residual: last_residual,
            })
        }
        PathMode::Equibiaxial => {
            // residual σ₃₃ over the single unknown λ₃
            let mut x = guess[1];
            let mut last_residual = f64::INFINITY;
            for _ in 0..max_iter {
                let f = diag(control, control, x);
                let s =
                    cauchy_stress(table, &f, fibers, None).map_err(|e| step_failure(control, e))?;
                let r = s.sigma[(2, 2)];
                let scale = 1.0 + s.sigma.abs().max();
                last_residual = r.abs();
                if last_residual < tol * scale {
                    guess[1] = x;
                    return Ok((f, s.sigma, 0.0));
                }
                let t = tangent_fd(table, &f, fibers, None, 1e-6)
                    .map_err(|e| step_failure(control, e))?;
                let dj = t.d[2][2][2][2];
                if dj == 0.0 {
                    return Err(Error::NoConvergence {
                        iterations: max_iter,
                        residual: last_residual,
                    });
                }
                let mut delta = -r / dj;
                while x + delta <= 0.0 {
                    delta *= 0.5;
                }
                x += delta;
            }
            Err(Error::NoConvergence {
                iterations: max_iter,
                residual: last_residual,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

const INVARIANT_COLUMNS: [&str; 15] = [
    "i1", "i2", "i3", "i4_11", "i5_11", "i4_12", "i5_12", "i4_22", "i5_22", "i4_13", "i5_13",
    "i4_23", "i5_23", "i4_33", "i5_33",
];

/// Render a curve as CSV: one header row naming the columns (stress and
/// pressure annotated with the table's units and the pressure-elimination
/// convention), then one data row per point. Floats are printed in their
/// shortest exact decimal form, so identical curves yield identical bytes
/// and values read back unchanged.
pub fn emit_csv(curve: &Curve) -> String {
    let mut out = String::new();
    let units = if curve.units.is_empty() {
        "-"
    } else {
        &curve.units
    };
    let pressure_note = match curve.compressibility {
        MaterialType::Incompressible => match curve.mode {
            PathMode::Uniaxial => "from sigma_22=0",
            PathMode::Equibiaxial => "from sigma_33=0",
            PathMode::SimpleShear { plane } => {
                let c = PathMode::out_of_plane(plane);
                match c {
                    1 => "from sigma_11=0",
                    2 => "from sigma_22=0",
                    _ => "from sigma_33=0",
                }
            }
            PathMode::Volumetric => "unused",
        },
        MaterialType::Compressible => "zero",
    };
    out.push_str("control");
    for c in [
        "sigma_11", "sigma_22", "sigma_33", "sigma_12", "sigma_13", "sigma_23",
    ] {
        out.push_str(&format!(",{c}[{units}]"));
    }
    out.push_str(&format!(
        ",lambda_2,lambda_3,pressure[{units};{pressure_note}]"
    ));
    for c in INVARIANT_COLUMNS {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for p in &curve.points {
        let s = &p.sigma;
        let mut fields = vec![
            format_float(p.control),
            format_float(s[(0, 0)]),
            format_float(s[(1, 1)]),
            format_float(s[(2, 2)]),
            format_float(s[(0, 1)]),
            format_float(s[(0, 2)]),
            format_float(s[(1, 2)]),
            format_float(p.f[(1, 1)]),
            format_float(p.f[(2, 2)]),
            format_float(p.pressure),
        ];
        for v in p.invariants.values {
            fields.push(format_float(v));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
