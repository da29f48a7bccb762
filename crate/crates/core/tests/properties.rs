//! Property tests: frame invariance of the invariants, additivity and
//! monotonicity of the energy network, and deck round-trip laws.

use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

use umat_core::deck::{parse_deck, serialize_deck, MaterialSpec, MaterialType, ParameterTable};
use umat_core::energy::{evaluate_energy, GateKind, NeuronRow, OuterKind};
use umat_core::kinematics::{
    compute_invariants, reference_offsets, DeformationState, FiberSet, InvariantState,
    MixedInvariantRow, NUM_SLOTS,
};

fn matrix_from(parts: [f64; 9], amplitude: f64) -> Matrix3<f64> {
    let mut f = Matrix3::identity();
    for k in 0..3 {
        for l in 0..3 {
            f[(k, l)] += amplitude * parts[3 * k + l];
        }
    }
    f
}

fn rotation_from(q: [f64; 4]) -> Matrix3<f64> {
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

fn oblique_fibers() -> FiberSet {
    FiberSet::new(&[
        Vector3::new(0.8, 0.6, 0.0),
        Vector3::new(0.0, 0.6, 0.8),
        Vector3::new(0.0, 0.0, 1.0),
    ])
    .unwrap()
}

proptest! {
    /// Invariants depend on F only through C, so a left rotation is invisible.
    #[test]
    fn invariants_rotation_invariant(
        parts in proptest::array::uniform9(-1.0f64..1.0),
        quat in proptest::array::uniform4(-1.0f64..1.0),
    ) {
        let f = matrix_from(parts, 0.2);
        prop_assume!(f.determinant() > 0.3);
        prop_assume!(quat.iter().map(|q| q * q).sum::<f64>() > 1e-3);
        let q = rotation_from(quat);
        let fibers = oblique_fibers();
        let a = compute_invariants(&DeformationState::new(f).unwrap(), &fibers, &[]);
        let b = compute_invariants(&DeformationState::new(q * f).unwrap(), &fibers, &[]);
        for i in 0..NUM_SLOTS {
            let scale = a.values[i].abs().max(1.0);
            prop_assert!((a.values[i] - b.values[i]).abs() / scale < 1e-12, "slot {}", i + 1);
        }
    }

    /// Deviatoric slots ignore pure volume changes; slot 3 scales as c³.
    #[test]
    fn invariants_isochoric_split(
        parts in proptest::array::uniform9(-1.0f64..1.0),
        c in 0.5f64..1.5,
    ) {
        let f = matrix_from(parts, 0.2);
        prop_assume!(f.determinant() > 0.3);
        let fibers = oblique_fibers();
        let a = compute_invariants(&DeformationState::new(f).unwrap(), &fibers, &[]);
        let b = compute_invariants(&DeformationState::new(f * c).unwrap(), &fibers, &[]);
        for i in 0..NUM_SLOTS {
            let scale = a.values[i].abs().max(1.0);
            if i == 2 {
                prop_assert!((b.values[2] - c.powi(3) * a.values[2]).abs() / scale < 1e-12);
            } else {
                prop_assert!((a.values[i] - b.values[i]).abs() / scale < 1e-12, "slot {}", i + 1);
            }
        }
    }
}

fn row_strategy(slots: Vec<u32>) -> impl Strategy<Value = NeuronRow> {
    (
        proptest::sample::select(slots),
        1i64..=3,
        1u32..=4,
        1i64..=3,
        -0.8f64..0.8,
        -2.0f64..2.0,
    )
        .prop_map(|(slot, kf0, power, kf2, w1, w2)| {
            NeuronRow::new(
                slot,
                GateKind::from_code(kf0).unwrap(),
                power,
                OuterKind::from_code(kf2).unwrap(),
                1.0,
                w1,
                w2,
            )
        })
}

fn mixed_strategy() -> impl Strategy<Value = Vec<MixedInvariantRow>> {
    proptest::collection::vec(proptest::array::uniform4(-0.9f64..0.9), 0..=2).prop_map(|coeffs| {
        coeffs
            .into_iter()
            .enumerate()
            .map(|(i, k4)| {
                let mut kappa = [0.0; NUM_SLOTS];
                // spread a few coefficients over low slots
                kappa[0] = k4[0];
                kappa[1] = k4[1];
                kappa[3] = k4[2];
                kappa[7] = k4[3];
                MixedInvariantRow::new(101 + i as u32, kappa)
            })
            .collect()
    })
}

fn table_strategy() -> impl Strategy<Value = ParameterTable> {
    mixed_strategy().prop_flat_map(|mixed| {
        let mut slots: Vec<u32> = (1..=15).collect();
        slots.extend(mixed.iter().map(|m| m.index));
        proptest::collection::vec(row_strategy(slots), 0..6).prop_map(move |rows| ParameterTable {
            material_type: MaterialType::Compressible,
            ndir: 3,
            rows,
            mixed: mixed.clone(),
        })
    })
}

/// Invariant values within the safe box for the generated weights:
/// |deviation| <= 0.8 keeps every log branch inside its domain.
fn invariant_state_strategy() -> impl Strategy<Value = InvariantState> {
    proptest::collection::vec(-0.8f64..0.8, NUM_SLOTS).prop_map(|dev| {
        let offsets = reference_offsets(&FiberSet::canonical(3).unwrap());
        let mut values = offsets;
        for i in 0..NUM_SLOTS {
            values[i] += dev[i];
        }
        InvariantState::from_values(values, offsets, &[])
    })
}

proptest! {
    /// Evaluating a table equals summing its rows evaluated one at a time.
    #[test]
    fn energy_is_additive_over_rows(table in table_strategy(), state in invariant_state_strategy()) {
        let inv = InvariantState::from_values(state.values, state.offsets, &table.mixed);
        let Ok(whole) = evaluate_energy(&table, &inv) else {
            // a log branch left its domain; fine, nothing to compare
            return Ok(());
        };
        let mut energy = 0.0;
        let mut d1 = [0.0; NUM_SLOTS];
        let mut d2 = [0.0; NUM_SLOTS * (NUM_SLOTS + 1) / 2];
        for row in &table.rows {
            let single = ParameterTable {
                material_type: table.material_type,
                ndir: table.ndir,
                rows: vec![row.clone()],
                mixed: table.mixed.clone(),
            };
            let part = evaluate_energy(&single, &inv).unwrap();
            energy += part.energy;
            for (acc, v) in d1.iter_mut().zip(part.d1) {
                *acc += v;
            }
            for (acc, v) in d2.iter_mut().zip(part.d2) {
                *acc += v;
            }
        }
        prop_assert_eq!(whole.energy, energy);
        prop_assert_eq!(whole.d1, d1);
        prop_assert_eq!(&whole.d2[..], &d2[..]);
    }

    /// Tables of positive-weight linear/exponential neurons on the first
    /// invariant are non-decreasing along increasing crowding.
    #[test]
    fn energy_grows_monotonically(
        rows in proptest::collection::vec(
            (1i64..=3, 1u32..=3, 1i64..=2, 0.05f64..1.5, 0.05f64..2.0),
            1..5,
        ),
        steps in proptest::collection::vec(0.0f64..0.5, 2..8),
    ) {
        let table = ParameterTable {
            material_type: MaterialType::Incompressible,
            ndir: 0,
            rows: rows
                .iter()
                .map(|(kf0, m, kf2, w1, w2)| {
                    NeuronRow::new(
                        1,
                        GateKind::from_code(*kf0).unwrap(),
                        *m,
                        OuterKind::from_code(*kf2).unwrap(),
                        1.0,
                        *w1,
                        *w2,
                    )
                })
                .collect(),
            mixed: vec![],
        };
        let offsets = reference_offsets(&FiberSet::empty());
        let mut i1 = 3.0;
        let mut last = 0.0;
        for step in steps {
            i1 += step;
            let mut values = offsets;
            values[0] = i1;
            let inv = InvariantState::from_values(values, offsets, &[]);
            let e = evaluate_energy(&table, &inv).unwrap();
            prop_assert!(e.energy >= last - 1e-14, "energy decreased at I1 = {}", i1);
            last = e.energy;
        }
    }
}

fn weight_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(1.0),
        Just(-1.0),
        Just(0.5),
        Just(0.1054 / (2.0 * 10.7914)),
        -1e3f64..1e3,
        -1e-6f64..1e-6,
    ]
}

fn spec_strategy() -> impl Strategy<Value = MaterialSpec> {
    let row = |slots: Vec<u32>| {
        (
            proptest::sample::select(slots),
            1i64..=3,
            1u32..=12,
            1i64..=3,
            weight_strategy(),
            weight_strategy(),
            weight_strategy(),
        )
            .prop_map(|(slot, kf0, m, kf2, w0, w1, w2)| {
                NeuronRow::new(
                    slot,
                    GateKind::from_code(kf0).unwrap(),
                    m,
                    OuterKind::from_code(kf2).unwrap(),
                    w0,
                    w1,
                    w2,
                )
            })
    };
    (
        mixed_strategy(),
        proptest::bool::ANY,
        0usize..=3,
        "[a-z_]{0,10}",
        proptest::sample::select(vec!["", "kPa", "MPa"]),
        proptest::bool::ANY,
    )
        .prop_flat_map(
            move |(mixed, compressible, ndir, name, units, with_fibers)| {
                let mut slots: Vec<u32> = (1..=15).collect();
                slots.extend(mixed.iter().map(|m| m.index));
                let fibers = if with_fibers && ndir > 0 {
                    Some(FiberSet::canonical(ndir).unwrap())
                } else {
                    None
                };
                proptest::collection::vec(row(slots), 0..6).prop_map(move |rows| MaterialSpec {
                    name: name.clone(),
                    units: units.to_string(),
                    table: ParameterTable {
                        material_type: if compressible {
                            MaterialType::Compressible
                        } else {
                            MaterialType::Incompressible
                        },
                        ndir,
                        rows,
                        mixed: mixed.clone(),
                    },
                    fibers: fibers.clone(),
                })
            },
        )
}

proptest! {
    /// parse . serialize is the identity on specs, and serialize . parse is
    /// idempotent on the canonical text.
    #[test]
    fn deck_round_trip_laws(spec in spec_strategy()) {
        let text = serialize_deck(&spec);
        let parsed = parse_deck(&text).expect("canonical text parses");
        prop_assert_eq!(&parsed, &spec);
        let text2 = serialize_deck(&parsed);
        prop_assert_eq!(&text2, &text);
        let parsed2 = parse_deck(&text2).expect("still parses");
        prop_assert_eq!(&parsed2, &parsed);
    }
}
