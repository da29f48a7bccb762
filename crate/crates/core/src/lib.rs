//! Solver-agnostic kernel for invariant-based anisotropic hyperelasticity.
//!
//! A material is defined by a parameter table: each row is one additive
//! *constitutive neuron* `w₂·f₂(f₁(f₀(Ī − Ī₀)))` acting on one of 15 numbered
//! deformation invariants (or on a mixed invariant, a linear combination of
//! the 15). The kernel evaluates the free energy ψ together with its analytic
//! first and second derivatives with respect to the invariants, assembles the
//! Cauchy stress from analytic invariant gradients, and provides a
//! finite-difference tangent for Newton drivers.
//!
//! ```
//! use nalgebra::Matrix3;
//! use umat_core::presets::build_preset;
//! use umat_core::stress::cauchy_stress;
//!
//! // incompressible neo-Hooke, uniaxial stretch 1.5, pressure from sigma_22 = 0
//! let spec = build_preset("neo_hooke", &[("c10", 0.5)])?;
//! let l: f64 = 1.5;
//! let f = Matrix3::from_diagonal(&[l, l.powf(-0.5), l.powf(-0.5)].into());
//! let fibers = spec.effective_fibers();
//! let p = cauchy_stress(&spec.table, &f, &fibers, Some(0.0))?.sigma[(1, 1)];
//! let sigma = cauchy_stress(&spec.table, &f, &fibers, Some(p))?.sigma;
//! assert!((sigma[(0, 0)] - 2.0 * 0.5 * (l * l - 1.0 / l)).abs() < 1e-12);
//! # Ok::<(), umat_core::Error>(())
//! ```
//!
//! Modules, bottom up:
//! - [`kinematics`]: deformation measures, the 15 invariants, their reference
//!   offsets, mixed invariants, analytic gradients ∂Ī/∂F.
//! - [`energy`]: the three-layer nested activation network and its chain-rule
//!   derivatives; evaluation of whole parameter tables.
//! - [`stress`]: Cauchy stress assembly and the numerical tangent.
//! - [`deck`]: parser and serializer for the keyword-based input format
//!   (`*ANISOTROPIC HYPERELASTIC`, `UNIVERSAL_TAB`, `MIXED_INV`).
//! - [`presets`]: built-in tables for the classical models and the calibrated
//!   soft-tissue parameter sets (brain, skin, artery, valve, heart).
//! - [`driver`]: homogeneous load paths (uniaxial, equibiaxial, simple shear,
//!   volumetric) with Newton elimination of the free unknowns, CSV output.
//! - [`verify`]: independent oracles — finite differences, closed forms,
//!   objectivity sampling — runnable as a library or via `umat check`.

pub mod deck;
pub mod driver;
pub mod energy;
mod error;
pub mod kinematics;
pub mod presets;
pub mod stress;
pub mod verify;

pub use error::{Error, ParseError, Result};
