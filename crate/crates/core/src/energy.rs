//! The three-layer nested activation network and its analytic derivatives.
//!
//! Each parameter-table row is one additive constitutive neuron
//!
//! ```text
//! ψ_k = w₂ · f₂( f₁( f₀(Ī − Ī₀); w₀ ); w₁ )
//! ```
//!
//! with the layer menus
//!
//! - f₀: identity (x), Macauley bracket ⟨x⟩ = (|x|+x)/2, absolute value |x|
//! - f₁: integer power (w₀·x)^m, m ≥ 1
//! - f₂: linear w₁·x, exponential exp(w₁·x)−1, negative log −ln(1−w₁·x)
//!
//! Every layer returns the triple (f, f′, f″); the neuron combines them by
//! the chain rule into the energy increment and its first and second
//! derivatives with respect to the addressed invariant. f₀″ vanishes
//! identically, and at the f₀ kink (x = 0) the sub-derivative f₀′ = 0 is
//! used for both the Macauley bracket and the absolute value, which keeps
//! the reference configuration exactly stress-free.

use crate::deck::{MaterialType, ParameterTable};
use crate::kinematics::{InvariantState, NUM_SLOTS};
use crate::{Error, Result};

/// Zeroth-layer activation selector (deck field `kf0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    /// (x)
    Identity,
    /// ⟨x⟩ = max(x, 0); gates tension-only fiber terms.
    Macauley,
    /// |x|
    Abs,
}

impl GateKind {
    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            1 => Some(GateKind::Identity),
            2 => Some(GateKind::Macauley),
            3 => Some(GateKind::Abs),
            _ => None,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            GateKind::Identity => 1,
            GateKind::Macauley => 2,
            GateKind::Abs => 3,
        }
    }
}

/// Second-layer activation selector (deck field `kf2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterKind {
    /// w₁·x
    Linear,
    /// exp(w₁·x) − 1
    Exp,
    /// −ln(1 − w₁·x), defined for w₁·x < 1.
    NegLog,
}

impl OuterKind {
    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            1 => Some(OuterKind::Linear),
            2 => Some(OuterKind::Exp),
            3 => Some(OuterKind::NegLog),
            _ => None,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            OuterKind::Linear => 1,
            OuterKind::Exp => 2,
            OuterKind::NegLog => 3,
        }
    }
}

/// Largest supported first-layer power.
pub const MAX_POWER: u32 = 12;

/// One constitutive neuron: invariant slot, activation selectors, weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronRow {
    /// Invariant slot: 1..15 or a mixed index ≥ 101.
    pub slot: u32,
    /// Zeroth-layer activation.
    pub gate: GateKind,
    /// First-layer power m, 1..=12.
    pub power: u32,
    /// Second-layer activation.
    pub outer: OuterKind,
    /// Zeroth-layer weight; 1.0 by default and in every published table.
    pub w0: f64,
    /// First-layer weight (exponent scale / log slope).
    pub w1: f64,
    /// Second-layer weight (the modulus-like prefactor).
    pub w2: f64,
}

impl NeuronRow {
    pub fn new(
        slot: u32,
        gate: GateKind,
        power: u32,
        outer: OuterKind,
        w0: f64,
        w1: f64,
        w2: f64,
    ) -> Self {
        Self {
            slot,
            gate,
            power,
            outer,
            w0,
            w1,
            w2,
        }
    }
}

/// Energy and packed invariant derivatives of one table evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEvaluation {
    /// Free energy ψ per reference volume, in the table's own units.
    pub energy: f64,
    /// ∂ψ/∂Ī_i over the 15 base slots; mixed-slot rows are already folded in
    /// through their κ coefficients.
    pub d1: [f64; NUM_SLOTS],
    /// ∂²ψ/∂Ī_i∂Ī_j packed upper-triangle column-major:
    /// entry (i ≤ j) at [`packed_index`]. Without mixed rows only the
    /// diagonal is populated.
    pub d2: [f64; NUM_SLOTS * (NUM_SLOTS + 1) / 2],
}

impl EnergyEvaluation {
    fn zero() -> Self {
        Self {
            energy: 0.0,
            d1: [0.0; NUM_SLOTS],
            d2: [0.0; NUM_SLOTS * (NUM_SLOTS + 1) / 2],
        }
    }

    /// Second derivative for a base slot pair, either order.
    pub fn d2_pair(&self, i: u32, j: u32) -> f64 {
        self.d2[packed_index(i.min(j), i.max(j))]
    }
}

/// Packed position of the (i, j) second-derivative entry, 1-based slots
/// with i ≤ j: index = (i−1) + j(j−1)/2.
pub fn packed_index(i: u32, j: u32) -> usize {
    debug_assert!(i >= 1 && i <= j);
    (i as usize - 1) + (j as usize) * (j as usize - 1) / 2
}

/// Zeroth network layer: (f, f′, f″) of the selected gate at x.
///
/// f″ ≡ 0 for all three gates. At x = 0 the sub-derivative convention
/// f′ = 0 applies to the Macauley bracket and the absolute value.
pub fn layer0(gate: GateKind, x: f64) -> (f64, f64, f64) {
    match gate {
        GateKind::Identity => (x, 1.0, 0.0),
        GateKind::Macauley => {
            if x > 0.0 {
                (x, 1.0, 0.0)
            } else {
                (0.0, 0.0, 0.0)
            }
        }
        GateKind::Abs => {
            if x == 0.0 {
                (0.0, 0.0, 0.0)
            } else {
                (x.abs(), x.signum(), 0.0)
            }
        }
    }
}

/// First network layer: (f, f′, f″) of (w₀·x)^m.
pub fn layer1(power: u32, w0: f64, x: f64) -> (f64, f64, f64) {
    let m = power as i32;
    let wx = w0 * x;
    let f = wx.powi(m);
    let df = m as f64 * w0 * wx.powi(m - 1);
    let ddf = if m >= 2 {
        (m * (m - 1)) as f64 * w0 * w0 * wx.powi(m - 2)
    } else {
        0.0
    };
    (f, df, ddf)
}

/// Second network layer: (f, f′, f″) of the selected function at x.
///
/// Fails with [`Error::LogDomain`] when the negative-log branch is asked for
/// w₁·x ≥ 1; callers treat that as a failed load step.
pub fn layer2(outer: OuterKind, w1: f64, x: f64) -> Result<(f64, f64, f64)> {
    match outer {
        OuterKind::Linear => Ok((w1 * x, w1, 0.0)),
        OuterKind::Exp => {
            let e = (w1 * x).exp();
            Ok(((w1 * x).exp_m1(), w1 * e, w1 * w1 * e))
        }
        OuterKind::NegLog => {
            let t = w1 * x;
            if t >= 1.0 {
                return Err(Error::LogDomain(t));
            }
            let inv = 1.0 / (1.0 - t);
            Ok((-(-t).ln_1p(), w1 * inv, w1 * w1 * inv * inv))
        }
    }
}

/// One neuron's additive contribution (dψ, dψ/dĪ, d²ψ/dĪ²) at the
/// offset-corrected invariant value `x_inv` = Ī − Ī₀.
pub fn neuron(x_inv: f64, row: &NeuronRow) -> Result<(f64, f64, f64)> {
    let (f0, df0, ddf0) = layer0(row.gate, x_inv);
    let (f1, df1, ddf1) = layer1(row.power, row.w0, f0);
    let (f2, df2, ddf2) = layer2(row.outer, row.w1, f1)?;
    let ua = row.w2 * f2;
    let ui1 = row.w2 * df2 * df1 * df0;
    let ui2 = row.w2 * ((ddf2 * df1 * df1 + df2 * ddf1) * df0 * df0 + df2 * df1 * ddf0);
    Ok((ua, ui1, ui2))
}

/// Evaluate a whole parameter table at an invariant state.
///
/// Rows addressing a mixed slot distribute their first derivative into the
/// base slots as κ_j·ψ′ and their second derivative into base pairs as
/// κ_i·κ_j·ψ″, so downstream stress assembly only ever sees base slots.
pub fn evaluate_energy(table: &ParameterTable, inv: &InvariantState) -> Result<EnergyEvaluation> {
    let mut out = EnergyEvaluation::zero();
    let kappa_of = |slot: u32| table.mixed.iter().find(|m| m.index == slot);

    for row in &table.rows {
        if table.material_type == MaterialType::Incompressible && row.slot == 3 {
            return Err(Error::VolumetricRowInIncompressible);
        }
        let x = inv
            .deviation(row.slot)
            .ok_or(Error::UnknownInvariantSlot(row.slot))?;
        let (ua, ui1, ui2) = neuron(x, row)?;
        out.energy += ua;
        match row.slot {
            1..=15 => {
                out.d1[row.slot as usize - 1] += ui1;
                out.d2[packed_index(row.slot, row.slot)] += ui2;
            }
            _ => {
                let mixed = kappa_of(row.slot).ok_or(Error::UnknownInvariantSlot(row.slot))?;
                for j in 0..NUM_SLOTS {
                    let kj = mixed.kappa[j];
                    if kj == 0.0 {
                        continue;
                    }
                    out.d1[j] += kj * ui1;
                    for k in j..NUM_SLOTS {
                        let kk = mixed.kappa[k];
                        if kk == 0.0 {
                            continue;
                        }
                        out.d2[packed_index(j as u32 + 1, k as u32 + 1)] += kj * kk * ui2;
                    }
                }
            }
        }
    }
    Ok(out)
}
