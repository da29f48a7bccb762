//! Cauchy stress assembly and the finite-difference tangent.
//!
//! The stress follows from the free energy by the chain rule over the
//! invariants,
//!
//! ```text
//! σ = (1/J) Σ_i (∂ψ/∂Ī_i) (∂Ī_i/∂F) · Fᵀ        (− p·I when incompressible)
//! ```
//!
//! with the analytic invariant gradients from [`crate::kinematics`] carrying
//! the full deviatoric projections, so the assembled σ matches finite
//! differences of ψ(F) to discretization error. Mixed-invariant rows are
//! already folded into the base-slot derivatives by the energy evaluation.
//!
//! The tangent is numerical by design: a central difference of σ over the
//! nine entries of F. Point drivers need Jacobians, not peak throughput, and
//! the second invariant derivatives feed host solvers, not this kernel.

use nalgebra::{Matrix3, Vector3};

use crate::deck::{MaterialType, ParameterTable};
use crate::energy::{evaluate_energy, EnergyEvaluation};
use crate::kinematics::{compute_invariants, invariant_gradients, DeformationState, FiberSet};
use crate::{Error, Result};

/// Largest tolerated |det F − 1| for incompressible evaluations.
const ISOCHORIC_TOL: f64 = 1e-8;

/// Internal consistency bound on the relative skew of the assembled stress.
const SYMMETRY_TOL: f64 = 1e-8;

/// Cauchy stress with the deformed fiber directions kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StressState {
    /// Symmetric Cauchy stress in the table's energy units per unit volume.
    pub sigma: Matrix3<f64>,
    /// Isochorically deformed fiber vectors n̄_α = F̄·n_α⁰.
    pub deformed_fibers: Vec<Vector3<f64>>,
}

/// Fourth-order dσ/dF array from central finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentState {
    /// `d[i][j][k][l]` = ∂σ_ij/∂F_kl; minor symmetry in (i, j) inherited
    /// from σ.
    pub d: [[[[f64; 3]; 3]; 3]; 3],
    /// Step used for the central differences.
    pub step: f64,
}

/// Free energy ψ(F) for a table, without the incompressibility precondition.
///
/// This is the scalar the finite-difference oracles probe; incompressible
/// tables have no volumetric rows, so perturbing F off det F = 1 stays well
/// defined.
pub fn free_energy(table: &ParameterTable, f: &Matrix3<f64>, fibers: &FiberSet) -> Result<f64> {
    Ok(energy_at(table, f, fibers)?.1.energy)
}

/// Full energy evaluation at a deformation gradient.
pub fn energy_at(
    table: &ParameterTable,
    f: &Matrix3<f64>,
    fibers: &FiberSet,
) -> Result<(DeformationState, EnergyEvaluation)> {
    let state = DeformationState::new(*f)?;
    let inv = compute_invariants(&state, fibers, &table.mixed);
    let eval = evaluate_energy(table, &inv)?;
    Ok((state, eval))
}

/// Assemble the Cauchy stress at a deformation gradient.
///
/// Incompressible tables require a supplied `pressure` and det F = 1 within
/// 1e-8; the returned stress is σ − p·I. The result is symmetrized, and a
/// relative skew beyond 1e-8 (which would indicate inconsistent gradients)
/// is an internal error.
pub fn cauchy_stress(
    table: &ParameterTable,
    f: &Matrix3<f64>,
    fibers: &FiberSet,
    pressure: Option<f64>,
) -> Result<StressState> {
    let pressure = match table.material_type {
        MaterialType::Incompressible => {
            let p = pressure.ok_or(Error::MissingPressure)?;
            let det = f.determinant();
            if (det - 1.0).abs() > ISOCHORIC_TOL {
                return Err(Error::NotIsochoric(det));
            }
            p
        }
        MaterialType::Compressible => pressure.unwrap_or(0.0),
    };

    let (state, eval) = energy_at(table, f, fibers)?;
    let grads = invariant_gradients(&state, fibers);

    let mut dpsi_df = Matrix3::zeros();
    for (grad, d1) in grads.iter().zip(eval.d1) {
        if d1 != 0.0 {
            dpsi_df += grad * d1;
        }
    }
    let raw = dpsi_df * state.f.transpose() / state.j;

    let sym = (raw + raw.transpose()) * 0.5;
    let scale = sym.abs().max().max(1e-300);
    let skew = (raw - raw.transpose()).abs().max() * 0.5 / scale;
    if skew > SYMMETRY_TOL {
        return Err(Error::AsymmetricStress(skew));
    }

    let sigma = sym - Matrix3::identity() * pressure;
    let deformed_fibers = fibers
        .directions()
        .iter()
        .map(|n| state.f_bar * n)
        .collect();
    Ok(StressState {
        sigma,
        deformed_fibers,
    })
}

/// Central finite-difference tangent dσ/dF.
///
/// Propagates any stress error at the perturbed states; on incompressible
/// tables the perturbations move det F off 1 and are rejected, matching the
/// stress preconditions — the tangent is a compressible-table tool.
pub fn tangent_fd(
    table: &ParameterTable,
    f: &Matrix3<f64>,
    fibers: &FiberSet,
    pressure: Option<f64>,
    step: f64,
) -> Result<TangentState> {
    assert!(step > 0.0, "finite-difference step must be positive");
    let mut d = [[[[0.0; 3]; 3]; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            let mut fp = *f;
            let mut fm = *f;
            fp[(k, l)] += step;
            fm[(k, l)] -= step;
            let sp = cauchy_stress(table, &fp, fibers, pressure)?.sigma;
            let sm = cauchy_stress(table, &fm, fibers, pressure)?.sigma;
            for i in 0..3 {
                for j in 0..3 {
                    d[i][j][k][l] = (sp[(i, j)] - sm[(i, j)]) / (2.0 * step);
                }
            }
        }
    }
    Ok(TangentState { d, step })
}
