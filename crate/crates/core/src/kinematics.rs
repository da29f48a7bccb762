//! Deformation measures, the 15 numbered invariants, and their gradients.
//!
//! The deformation gradient F is split multiplicatively into a volumetric
//! part J^{1/3}·I and an isochoric part F̄ = J^{-1/3}·F. Deformation is then
//! characterized by 15 invariants of the isochoric right Cauchy-Green tensor
//! C̄ = F̄ᵀ·F̄ and up to three reference fiber directions n_α⁰:
//!
//! - slot 1: Ī₁ = C̄ : I
//! - slot 2: Ī₂ = ½ (Ī₁² − C̄ : C̄)
//! - slot 3: J (volumetric; see note below)
//! - slots 4..15: Ī₄(αβ) = C̄ : (n_α⁰ ⊗ n_β⁰) and Ī₅(αβ) = C̄² : (n_α⁰ ⊗ n_β⁰)
//!   for 1 ≤ α ≤ β ≤ 3, numbered 4 + 2(α−1) + β(β−1) and 5 + 2(α−1) + β(β−1).
//!
//! Slot 3 stores J itself, not J²: the volumetric example tables (e.g. the
//! three-row reformulation of K/2((J²−1)/2 − ln J)) only reduce to their
//! classical forms with the J convention.
//!
//! Each slot carries a reference offset (3, 3, 1, ζ_αβ, ...) with
//! ζ_αβ = n_α⁰·n_β⁰, so that every offset-corrected invariant vanishes in the
//! undeformed configuration. Mixed invariants Ī_κ = Σ_j κ_j Ī_j extend the
//! base slots from index 101 upward; their offsets are Σ_j κ_j Ī_{j0}.

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

/// Number of base invariant slots.
pub const NUM_SLOTS: usize = 15;

/// First index available to mixed invariants.
pub const MIXED_BASE: u32 = 101;

/// Fiber pair (α, β) addressed by each anisotropic slot, in slot order 4..15.
const SLOT_PAIRS: [(usize, usize); 12] = [
    (1, 1),
    (1, 1),
    (1, 2),
    (1, 2),
    (2, 2),
    (2, 2),
    (1, 3),
    (1, 3),
    (2, 3),
    (2, 3),
    (3, 3),
    (3, 3),
];

/// One of the 15 invariants, identified by kind and fiber pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    I1,
    I2,
    I3,
    /// Ī₄(αβ) = C̄ : (n_α⁰ ⊗ n_β⁰), with 1 ≤ α ≤ β ≤ 3.
    I4(usize, usize),
    /// Ī₅(αβ) = C̄² : (n_α⁰ ⊗ n_β⁰), with 1 ≤ α ≤ β ≤ 3.
    I5(usize, usize),
}

impl Invariant {
    /// Slot number 1..15 under the numbering
    /// Ī₄(αβ) → 4 + 2(α−1) + β(β−1), Ī₅(αβ) → 5 + 2(α−1) + β(β−1).
    pub fn slot(self) -> Result<u32> {
        let pair_slot = |base: usize, alpha: usize, beta: usize| -> Result<u32> {
            if !(1..=3).contains(&alpha) || !(1..=3).contains(&beta) || beta < alpha {
                return Err(Error::InvalidPair { alpha, beta });
            }
            Ok((base + 2 * (alpha - 1) + beta * (beta - 1)) as u32)
        };
        match self {
            Invariant::I1 => Ok(1),
            Invariant::I2 => Ok(2),
            Invariant::I3 => Ok(3),
            Invariant::I4(alpha, beta) => pair_slot(4, alpha, beta),
            Invariant::I5(alpha, beta) => pair_slot(5, alpha, beta),
        }
    }

    /// Inverse of [`Invariant::slot`]. Returns `None` outside 1..15.
    pub fn from_slot(slot: u32) -> Option<Invariant> {
        match slot {
            1 => Some(Invariant::I1),
            2 => Some(Invariant::I2),
            3 => Some(Invariant::I3),
            4..=15 => {
                let (alpha, beta) = SLOT_PAIRS[slot as usize - 4];
                if slot.is_multiple_of(2) {
                    Some(Invariant::I4(alpha, beta))
                } else {
                    Some(Invariant::I5(alpha, beta))
                }
            }
            _ => None,
        }
    }
}

/// Deformation gradient with its derived measures.
///
/// Construction rejects det F ≤ 0. All tensors are cached on construction;
/// the value is immutable afterwards and freely shareable.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationState {
    /// Deformation gradient.
    pub f: Matrix3<f64>,
    /// J = det F > 0.
    pub j: f64,
    /// Isochoric part F̄ = J^{-1/3} F, det F̄ = 1.
    pub f_bar: Matrix3<f64>,
    /// Left Cauchy-Green tensor b = F·Fᵀ.
    pub b: Matrix3<f64>,
    /// Right Cauchy-Green tensor C = Fᵀ·F.
    pub c: Matrix3<f64>,
    /// Isochoric left Cauchy-Green tensor b̄ = F̄·F̄ᵀ.
    pub b_bar: Matrix3<f64>,
    /// Isochoric right Cauchy-Green tensor C̄ = F̄ᵀ·F̄.
    pub c_bar: Matrix3<f64>,
}

impl DeformationState {
    pub fn new(f: Matrix3<f64>) -> Result<Self> {
        let j = f.determinant();
        if j.is_nan() || j <= 0.0 {
            return Err(Error::NonPositiveJacobian(j));
        }
        let f_bar = f * j.powf(-1.0 / 3.0);
        Ok(Self {
            f,
            j,
            f_bar,
            b: f * f.transpose(),
            c: f.transpose() * f,
            b_bar: f_bar * f_bar.transpose(),
            c_bar: f_bar.transpose() * f_bar,
        })
    }

    /// Identity deformation (reference configuration).
    pub fn identity() -> Self {
        Self::new(Matrix3::identity()).expect("identity has det 1")
    }
}

/// Up to three reference fiber directions with their mutual dot products
/// ζ_αβ = n_α⁰·n_β⁰.
///
/// The ζ matrix is stored 3×3; entries for directions beyond `ndir` follow
/// the identity pattern (1 on the diagonal, 0 off it) so that unused
/// anisotropic slots sit exactly at their reference offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSet {
    directions: Vec<Vector3<f64>>,
    zeta: Matrix3<f64>,
}

impl FiberSet {
    /// Build from explicit unit directions. Rejects non-unit vectors
    /// (tolerance 1e-12 on the norm).
    pub fn new(directions: &[Vector3<f64>]) -> Result<Self> {
        if directions.len() > 3 {
            return Err(Error::InvalidPair {
                alpha: directions.len(),
                beta: directions.len(),
            });
        }
        for (i, d) in directions.iter().enumerate() {
            let norm = d.norm();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::NonUnitFiber { index: i + 1, norm });
            }
        }
        let mut zeta = Matrix3::identity();
        for a in 0..directions.len() {
            for b in 0..directions.len() {
                zeta[(a, b)] = directions[a].dot(&directions[b]);
            }
        }
        Ok(Self {
            directions: directions.to_vec(),
            zeta,
        })
    }

    /// No preferred directions (isotropic material).
    pub fn empty() -> Self {
        Self {
            directions: Vec::new(),
            zeta: Matrix3::identity(),
        }
    }

    /// The first `ndir` coordinate axes e₁, e₂, e₃.
    pub fn canonical(ndir: usize) -> Result<Self> {
        let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
        if ndir > 3 {
            return Err(Error::InvalidPair {
                alpha: ndir,
                beta: ndir,
            });
        }
        Self::new(&axes[..ndir])
    }

    /// In-plane directions (cos θ, sin θ, 0) from angles in degrees.
    pub fn from_angles_deg(angles: &[f64]) -> Result<Self> {
        let dirs: Vec<Vector3<f64>> = angles
            .iter()
            .map(|a| {
                let r = a.to_radians();
                Vector3::new(r.cos(), r.sin(), 0.0)
            })
            .collect();
        Self::new(&dirs)
    }

    /// Number of fiber families.
    pub fn ndir(&self) -> usize {
        self.directions.len()
    }

    /// Reference directions.
    pub fn directions(&self) -> &[Vector3<f64>] {
        &self.directions
    }

    /// ζ_αβ with 1-based α, β; identity pattern beyond `ndir`.
    pub fn zeta(&self, alpha: usize, beta: usize) -> f64 {
        self.zeta[(alpha - 1, beta - 1)]
    }

    fn direction(&self, alpha: usize) -> Option<&Vector3<f64>> {
        self.directions.get(alpha - 1)
    }
}

/// One mixed invariant Ī_κ = Σ_{j=1..15} κ_j Ī_j, addressed from slot 101 up.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedInvariantRow {
    /// Mixed slot index, ≥ 101.
    pub index: u32,
    /// Coefficients κ_j over the base slots, 1-based slot j at `kappa[j-1]`.
    pub kappa: [f64; NUM_SLOTS],
}

impl MixedInvariantRow {
    pub fn new(index: u32, kappa: [f64; NUM_SLOTS]) -> Self {
        Self { index, kappa }
    }
}

/// The 15 numbered invariants, their reference offsets, and any mixed
/// invariant extensions. Slots for fiber pairs beyond `ndir` hold their
/// offset values, so table rows touching them contribute nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantState {
    /// Base invariant values; slot i at `values[i-1]`.
    pub values: [f64; NUM_SLOTS],
    /// Reference offsets Ī_{i0}; slot i at `offsets[i-1]`.
    pub offsets: [f64; NUM_SLOTS],
    /// Mixed invariant values keyed by slot index ≥ 101.
    pub mixed_values: std::collections::BTreeMap<u32, f64>,
    /// Mixed invariant offsets, same keys.
    pub mixed_offsets: std::collections::BTreeMap<u32, f64>,
}

impl InvariantState {
    /// Assemble a state from explicit base values and offsets, deriving the
    /// mixed entries as Σ κ_j Ī_j and Σ κ_j Ī_{j0}.
    pub fn from_values(
        values: [f64; NUM_SLOTS],
        offsets: [f64; NUM_SLOTS],
        mixed: &[MixedInvariantRow],
    ) -> Self {
        let mut mixed_values = std::collections::BTreeMap::new();
        let mut mixed_offsets = std::collections::BTreeMap::new();
        for row in mixed {
            let value: f64 = (0..NUM_SLOTS).map(|j| row.kappa[j] * values[j]).sum();
            let offset: f64 = (0..NUM_SLOTS).map(|j| row.kappa[j] * offsets[j]).sum();
            mixed_values.insert(row.index, value);
            mixed_offsets.insert(row.index, offset);
        }
        Self {
            values,
            offsets,
            mixed_values,
            mixed_offsets,
        }
    }

    /// Value of a base or mixed slot.
    pub fn value(&self, slot: u32) -> Option<f64> {
        match slot {
            1..=15 => Some(self.values[slot as usize - 1]),
            _ => self.mixed_values.get(&slot).copied(),
        }
    }

    /// Reference offset of a base or mixed slot.
    pub fn offset(&self, slot: u32) -> Option<f64> {
        match slot {
            1..=15 => Some(self.offsets[slot as usize - 1]),
            _ => self.mixed_offsets.get(&slot).copied(),
        }
    }

    /// Offset-corrected value Ī − Ī₀ fed to the activation network.
    pub fn deviation(&self, slot: u32) -> Option<f64> {
        Some(self.value(slot)? - self.offset(slot)?)
    }
}

/// Reference offsets for a fiber set: (3, 3, 1, ζ_αβ pattern).
pub fn reference_offsets(fibers: &FiberSet) -> [f64; NUM_SLOTS] {
    let mut offsets = [0.0; NUM_SLOTS];
    offsets[0] = 3.0;
    offsets[1] = 3.0;
    offsets[2] = 1.0;
    for slot in 4..=15usize {
        let (a, b) = SLOT_PAIRS[slot - 4];
        offsets[slot - 1] = fibers.zeta(a, b);
    }
    offsets
}

/// Evaluate all 15 invariants plus any mixed rows for a deformation state.
///
/// Anisotropic slots whose fiber pair is not present in `fibers` are set to
/// their offsets (net contribution zero under any table row).
pub fn compute_invariants(
    state: &DeformationState,
    fibers: &FiberSet,
    mixed: &[MixedInvariantRow],
) -> InvariantState {
    let c_bar = &state.c_bar;
    let c_bar2 = c_bar * c_bar;

    let i1 = c_bar.trace();
    let i2 = 0.5 * (i1 * i1 - c_bar2.trace());

    let offsets = reference_offsets(fibers);
    let mut values = offsets;
    values[0] = i1;
    values[1] = i2;
    values[2] = state.j;
    for slot in 4..=15usize {
        let (a, b) = SLOT_PAIRS[slot - 4];
        if let (Some(na), Some(nb)) = (fibers.direction(a), fibers.direction(b)) {
            let m = if slot.is_multiple_of(2) {
                c_bar
            } else {
                &c_bar2
            };
            values[slot - 1] = na.dot(&(m * nb));
        }
    }

    InvariantState::from_values(values, offsets, mixed)
}

/// Analytic gradients ∂Ī_i/∂F for all 15 base slots.
///
/// Deviatoric slots include the −(1/3)(Ī_i)F^{-T}-type projection terms from
/// differentiating through J^{-2/3} and J^{-4/3}; slot 3 carries
/// ∂J/∂F = J F^{-T}. Slots for absent fiber pairs return zero, consistent
/// with their constant (offset) value.
pub fn invariant_gradients(state: &DeformationState, fibers: &FiberSet) -> [Matrix3<f64>; 15] {
    let f = &state.f;
    let j = state.j;
    let c = &state.c;
    let f_inv_t = f
        .try_inverse()
        .expect("det F > 0 by construction")
        .transpose();

    let jm23 = j.powf(-2.0 / 3.0);
    let jm43 = jm23 * jm23;
    let i1 = c.trace();
    let c2 = c * c;
    let i2 = 0.5 * (i1 * i1 - c2.trace());

    let mut grads = [Matrix3::zeros(); 15];

    // ∂Ī₁/∂F = 2 J^{-2/3} (F − (I₁/3) F^{-T})
    grads[0] = (f - f_inv_t * (i1 / 3.0)) * (2.0 * jm23);
    // ∂Ī₂/∂F = 2 J^{-4/3} (I₁ F − F·C − (2 I₂/3) F^{-T})
    grads[1] = (f * i1 - f * c - f_inv_t * (2.0 * i2 / 3.0)) * (2.0 * jm43);
    // ∂J/∂F = J F^{-T}
    grads[2] = f_inv_t * j;

    for slot in 4..=15usize {
        let (a, b) = SLOT_PAIRS[slot - 4];
        let (Some(na), Some(nb)) = (fibers.direction(a), fibers.direction(b)) else {
            continue;
        };
        if slot.is_multiple_of(2) {
            // I₄(αβ) = C : (n_α ⊗ n_β), unbarred:
            //   ∂I₄/∂F = F (n_α ⊗ n_β + n_β ⊗ n_α)
            // then Ī₄ = J^{-2/3} I₄ picks up −(2/3) Ī₄-scaled F^{-T}.
            let i4 = na.dot(&(c * nb));
            let dyad = na * nb.transpose() + nb * na.transpose();
            grads[slot - 1] = (f * dyad - f_inv_t * (2.0 / 3.0 * i4)) * jm23;
        } else {
            // I₅(αβ) = C² : (n_α ⊗ n_β):
            //   ∂I₅/∂F = F (n_α ⊗ Cn_β + Cn_β ⊗ n_α + Cn_α ⊗ n_β + n_β ⊗ Cn_α)
            // and Ī₅ = J^{-4/3} I₅ adds −(4/3) Ī₅-scaled F^{-T}.
            let cna = c * na;
            let cnb = c * nb;
            let i5 = na.dot(&(c * cnb));
            let dyad = na * cnb.transpose()
                + cnb * na.transpose()
                + cna * nb.transpose()
                + nb * cna.transpose();
            grads[slot - 1] = (f * dyad - f_inv_t * (4.0 / 3.0 * i5)) * jm43;
        }
    }
    grads
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: f64, b: f64, c: f64) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(a, b, c))
    }

    fn canonical3() -> FiberSet {
        FiberSet::canonical(3).unwrap()
    }

    #[test]
    fn identity_state() {
        let s = DeformationState::identity();
        assert_eq!(s.j, 1.0);
        assert_eq!(s.f_bar, Matrix3::identity());
        assert_eq!(s.b, Matrix3::identity());
        assert_eq!(s.c, Matrix3::identity());
    }

    #[test]
    fn isochoric_uniaxial_state() {
        let s = DeformationState::new(diag(2.0, 2f64.powf(-0.5), 2f64.powf(-0.5))).unwrap();
        assert!((s.j - 1.0).abs() < 1e-14);
        assert!((s.c[(0, 0)] - 4.0).abs() < 1e-14);
        assert!((s.c[(1, 1)] - 0.5).abs() < 1e-14);
        assert!((s.c[(2, 2)] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dilatation_state() {
        let s = DeformationState::new(diag(1.1, 1.1, 1.1)).unwrap();
        assert!((s.j - 1.331).abs() < 1e-12);
        assert!((s.f_bar - Matrix3::identity()).abs().max() < 1e-14);
        assert!((s.f_bar.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_inverted_deformation() {
        assert!(matches!(
            DeformationState::new(diag(-1.0, 1.0, 1.0)),
            Err(Error::NonPositiveJacobian(_))
        ));
        assert!(matches!(
            DeformationState::new(Matrix3::zeros()),
            Err(Error::NonPositiveJacobian(_))
        ));
    }

    #[test]
    fn fbar_determinant_is_one() {
        let f = Matrix3::new(1.3, 0.2, -0.1, 0.05, 0.9, 0.3, -0.2, 0.1, 1.1);
        let s = DeformationState::new(f).unwrap();
        assert!((s.f_bar.determinant() - 1.0).abs() < 1e-12);
        assert!((s.c_bar - s.c_bar.transpose()).abs().max() < 1e-14);
        assert!((s.b_bar - s.b_bar.transpose()).abs().max() < 1e-14);
    }

    #[test]
    fn slot_numbering_matches_scheme() {
        assert_eq!(Invariant::I1.slot().unwrap(), 1);
        assert_eq!(Invariant::I4(1, 1).slot().unwrap(), 4);
        assert_eq!(Invariant::I4(3, 3).slot().unwrap(), 14);
        assert_eq!(Invariant::I5(2, 3).slot().unwrap(), 13);
        assert!(matches!(
            Invariant::I4(2, 1).slot(),
            Err(Error::InvalidPair { .. })
        ));
    }

    #[test]
    fn slot_numbering_is_a_bijection() {
        let mut seen = std::collections::BTreeSet::new();
        let mut kinds = vec![Invariant::I1, Invariant::I2, Invariant::I3];
        for a in 1..=3 {
            for b in a..=3 {
                kinds.push(Invariant::I4(a, b));
                kinds.push(Invariant::I5(a, b));
            }
        }
        assert_eq!(kinds.len(), 15);
        for k in kinds {
            let slot = k.slot().unwrap();
            assert!((1..=15).contains(&slot));
            assert!(seen.insert(slot), "slot {slot} assigned twice");
            assert_eq!(Invariant::from_slot(slot), Some(k));
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn reference_invariants_with_orthonormal_fibers() {
        let s = DeformationState::identity();
        let inv = compute_invariants(&s, &canonical3(), &[]);
        let expected = [
            3.0, 3.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0,
        ];
        assert_eq!(inv.values, expected);
        assert_eq!(inv.offsets, expected);
    }

    #[test]
    fn simple_shear_invariants() {
        let mut f = Matrix3::identity();
        f[(0, 1)] = 0.5;
        let s = DeformationState::new(f).unwrap();
        let inv = compute_invariants(&s, &canonical3(), &[]);
        assert!((inv.values[0] - 3.25).abs() < 1e-14); // Ī₁
        assert!((inv.values[1] - 3.25).abs() < 1e-14); // Ī₂
        assert!((inv.values[2] - 1.0).abs() < 1e-14); // J
        assert!((inv.values[3] - 1.0).abs() < 1e-14); // Ī₄(11)
        assert!((inv.values[7] - 1.25).abs() < 1e-14); // Ī₄(22)
        assert!((inv.values[5] - 0.5).abs() < 1e-14); // Ī₄(12)
    }

    #[test]
    fn goh_mixed_row_at_kappa_third() {
        // κ = 1/3 kills the fiber part: mixed value = Ī₁/3, offset = 1.
        let kappa = 1.0 / 3.0;
        let mut coeffs = [0.0; NUM_SLOTS];
        coeffs[0] = kappa;
        coeffs[3] = 1.0 - 3.0 * kappa;
        let row = MixedInvariantRow::new(101, coeffs);

        let mut f = Matrix3::identity();
        f[(0, 1)] = 0.4;
        let s = DeformationState::new(f).unwrap();
        let inv = compute_invariants(&s, &FiberSet::canonical(2).unwrap(), &[row]);
        let i1 = inv.values[0];
        assert!((inv.mixed_values[&101] - i1 / 3.0).abs() < 1e-14);
        assert!((inv.mixed_offsets[&101] - 1.0).abs() < 1e-14);
        assert!((inv.deviation(101).unwrap() - (i1 - 3.0) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn unused_fiber_slots_sit_at_offsets() {
        let s = DeformationState::new(diag(1.2, 0.9, 1.0)).unwrap();
        let fibers = FiberSet::canonical(1).unwrap();
        let inv = compute_invariants(&s, &fibers, &[]);
        for slot in [6u32, 7, 8, 9, 10, 11, 12, 13, 14, 15] {
            assert_eq!(inv.deviation(slot).unwrap(), 0.0, "slot {slot}");
        }
        // slot 4/5 are live for the single fiber
        assert!(inv.deviation(4).unwrap().abs() > 1e-3);
    }

    #[test]
    fn fiber_set_rejects_non_unit_directions() {
        let err = FiberSet::new(&[Vector3::new(1.0, 1.0, 0.0)]);
        assert!(matches!(err, Err(Error::NonUnitFiber { .. })));
    }

    #[test]
    fn zeta_pattern_for_oblique_fibers() {
        let a = 30f64.to_radians();
        let fibers = FiberSet::new(&[
            Vector3::new(a.cos(), a.sin(), 0.0),
            Vector3::new(a.cos(), -a.sin(), 0.0),
        ])
        .unwrap();
        assert!((fibers.zeta(1, 1) - 1.0).abs() < 1e-12);
        assert!((fibers.zeta(1, 2) - (2.0 * a).cos()).abs() < 1e-12);
        let inv = compute_invariants(&DeformationState::identity(), &fibers, &[]);
        for slot in 1..=15 {
            assert!(
                inv.deviation(slot).unwrap().abs() < 1e-14,
                "slot {slot} not at reference"
            );
        }
    }

    // -- gradient oracle ---------------------------------------------------

    fn fd_gradient(f: &Matrix3<f64>, fibers: &FiberSet, slot: usize, step: f64) -> Matrix3<f64> {
        let mut g = Matrix3::zeros();
        for k in 0..3 {
            for l in 0..3 {
                let mut fp = *f;
                let mut fm = *f;
                fp[(k, l)] += step;
                fm[(k, l)] -= step;
                let vp = compute_invariants(&DeformationState::new(fp).unwrap(), fibers, &[])
                    .values[slot - 1];
                let vm = compute_invariants(&DeformationState::new(fm).unwrap(), fibers, &[])
                    .values[slot - 1];
                g[(k, l)] = (vp - vm) / (2.0 * step);
            }
        }
        g
    }

    #[test]
    fn gradient_of_j_at_identity() {
        let s = DeformationState::identity();
        let g = invariant_gradients(&s, &canonical3());
        assert!((g[2] - Matrix3::identity()).abs().max() < 1e-14);
    }

    #[test]
    fn gradient_of_i1_vanishes_at_identity() {
        let s = DeformationState::identity();
        let g = invariant_gradients(&s, &canonical3());
        assert!(g[0].abs().max() < 1e-14);
    }

    #[test]
    fn gradient_of_i4_11_at_identity() {
        let s = DeformationState::identity();
        let g = invariant_gradients(&s, &canonical3());
        let expected = diag(4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0);
        assert!((g[3] - expected).abs().max() < 1e-14);
        assert!(g[3].trace().abs() < 1e-14);
    }

    #[test]
    fn gradients_match_finite_differences() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let fibers = FiberSet::new(&[
            Vector3::new(0.8, 0.6, 0.0),
            Vector3::new(0.0, 0.6, 0.8),
            Vector3::new(1.0, 0.0, 0.0),
        ])
        .unwrap();
        let mut tested = 0;
        while tested < 100 {
            let mut f = Matrix3::identity();
            for k in 0..3 {
                for l in 0..3 {
                    f[(k, l)] += 0.25 * (rng.gen::<f64>() - 0.5);
                }
            }
            let det = f.determinant();
            if !(0.8..=1.25).contains(&det) {
                continue;
            }
            tested += 1;
            let s = DeformationState::new(f).unwrap();
            let grads = invariant_gradients(&s, &fibers);
            for slot in 1..=15usize {
                let fd = fd_gradient(&f, &fibers, slot, 1e-6);
                let scale = grads[slot - 1].abs().max().max(fd.abs().max()).max(1.0);
                let err = (grads[slot - 1] - fd).abs().max() / scale;
                assert!(err < 1e-7, "slot {slot}: rel err {err}");
            }
        }
    }

    #[test]
    fn invariants_are_rotation_invariant() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let fibers = canonical3();
        for _ in 0..50 {
            let mut f = Matrix3::identity();
            for k in 0..3 {
                for l in 0..3 {
                    f[(k, l)] += 0.2 * (rng.gen::<f64>() - 0.5);
                }
            }
            if f.determinant() <= 0.1 {
                continue;
            }
            let q = crate::verify::random_rotation(&mut rng);
            let a = compute_invariants(&DeformationState::new(f).unwrap(), &fibers, &[]);
            let b = compute_invariants(&DeformationState::new(q * f).unwrap(), &fibers, &[]);
            for i in 0..NUM_SLOTS {
                let scale = a.values[i].abs().max(1.0);
                assert!(
                    (a.values[i] - b.values[i]).abs() / scale < 1e-12,
                    "slot {} not rotation invariant",
                    i + 1
                );
            }
        }
    }

    #[test]
    fn deviatoric_slots_ignore_volume_scaling() {
        let f = Matrix3::new(1.1, 0.2, 0.0, 0.0, 0.95, 0.1, -0.05, 0.0, 1.0);
        let fibers = canonical3();
        let a = compute_invariants(&DeformationState::new(f).unwrap(), &fibers, &[]);
        let c = 1.17;
        let b = compute_invariants(&DeformationState::new(f * c).unwrap(), &fibers, &[]);
        for slot in 1..=15u32 {
            if slot == 3 {
                let scale = a.values[2].abs();
                assert!((b.values[2] - c.powi(3) * a.values[2]).abs() / scale < 1e-12);
            } else {
                let i = slot as usize - 1;
                let scale = a.values[i].abs().max(1.0);
                assert!(
                    (a.values[i] - b.values[i]).abs() / scale < 1e-12,
                    "slot {slot} changed under volume scaling"
                );
            }
        }
    }
}
