//! Built-in parameter tables: the classical invariant-based models and the
//! calibrated soft-tissue parameter sets.
//!
//! Every preset builds the exact row structure of its published parameter
//! table. Calibrated tissue presets carry their best-fit values as defaults
//! (overridable by name); the classical models default to textbook-scale
//! values. Zero-weight terms are omitted from the built table, matching the
//! convention that absent rows are simply absent.
//!
//! Volumetric parameters (`d1`, `d`, ...) have no defaults: a preset built
//! without them is `INCOMPRESSIBLE` with no slot-3 rows, and supplying them
//! switches the table to `COMPRESSIBLE` with the published volumetric rows —
//! either the quadratic (J−1)² form or the three-row triplet equivalent to
//! K/2((J²−1)/2 − ln J).
//!
//! Units are recorded per preset (kPa for brain/artery/valve/heart, MPa for
//! skin) and surface in CSV headers; the kernel itself never converts.

use std::collections::BTreeMap;

use crate::deck::{MaterialSpec, MaterialType, ParameterTable};
use crate::energy::{GateKind, NeuronRow, OuterKind};
use crate::kinematics::{FiberSet, MixedInvariantRow, NUM_SLOTS};
use crate::{Error, Result};

/// All catalog names, in presentation order.
pub const PRESET_NAMES: [&str; 27] = [
    "neo_hooke",
    "mooney_rivlin",
    "yeoh",
    "polynomial",
    "holzapfel_two_fiber",
    "kaliske",
    "goh_dispersion",
    "vol_simo",
    "vol_ogden_modified",
    "brain_mooney_rivlin_gray",
    "brain_mooney_rivlin_white",
    "brain_blatz_ko_gray",
    "brain_blatz_ko_white",
    "brain_discovered_six_term_gray",
    "brain_discovered_six_term_white",
    "skin_neohooke_holzapfel",
    "skin_discovered",
    "artery_discovered_media",
    "artery_discovered_adventitia",
    "artery_goh_media",
    "artery_goh_adventitia",
    "valve_fung_anterior",
    "valve_fung_posterior",
    "valve_fung_septal",
    "heart_guan",
    "heart_generalized_holzapfel",
    "heart_discovered",
];

/// One-line description per preset, for `umat preset list`.
pub fn preset_description(name: &str) -> Option<&'static str> {
    let d = match name {
        "neo_hooke" => "neo-Hooke: C10*(I1-3) [+ (1/D1)(J-1)^2]; params c10 [, d1]",
        "mooney_rivlin" => "Mooney-Rivlin: C10*(I1-3) + C01*(I2-3) [+ vol]; params c10, c01 [, d1]",
        "yeoh" => "Yeoh cubic in (I1-3) [+ even-power vol rows]; params c10, c20, c30 [, d1, d2, d3]",
        "polynomial" => "first-invariant polynomial up to order 6; params c10..c60 [, d1..d6]",
        "holzapfel_two_fiber" => {
            "two-fiber Holzapfel: C10*(I1-3) + exp-quadratic fiber terms; params c10, k1, k2 [, d]"
        }
        "kaliske" => "Kaliske power series on slots 1,2,4,5,8,9; params a1..a3, b1..b3, c2..c6, d2..d6, e2..e6, f2..f6 [, dvol]",
        "goh_dispersion" => {
            "Holzapfel dispersion (mixed invariants): kappa in [0, 1/3]; params c10, k1, k2, kappa [, d]"
        }
        "vol_simo" => "volumetric energy K/2 (J-1)^2; param k",
        "vol_ogden_modified" => "volumetric energy K/2 ((J^2-1)/2 - ln J) as a three-row table; param k",
        "brain_mooney_rivlin_gray" => "gray matter cortex Mooney-Rivlin fit (mu1 = 0.0021, mu2 = 1.8817 kPa)",
        "brain_mooney_rivlin_white" => "white matter corona radiata Mooney-Rivlin fit (mu1 = 0.0168, mu2 = 0.9697 kPa)",
        "brain_blatz_ko_gray" => "gray matter cortex Blatz-Ko fit, mu/2 (I2-3) with mu = 1.9043 kPa",
        "brain_blatz_ko_white" => "white matter corona radiata Blatz-Ko fit, mu = 0.9556 kPa",
        "brain_discovered_six_term_gray" => {
            "discovered six-term second-invariant model, gray matter cortex (kPa)"
        }
        "brain_discovered_six_term_white" => {
            "discovered six-term second-invariant model, white matter corona radiata (kPa)"
        }
        "skin_neohooke_holzapfel" => {
            "porcine skin neo-Hooke + one-fiber Holzapfel fit (mu = 0.2492 MPa, a4 = 0.1054 MPa, b4 = 10.7914)"
        }
        "skin_discovered" => {
            "discovered two-term exponential-quadratic skin model (a1 = 1.3291 MPa, a4 = 0.2656 MPa)"
        }
        "artery_discovered_media" => {
            "discovered aortic media model, fibers at +/-7.00 deg (mu1 = 33.45, a = 3.74, mu5 = 2.17 kPa)"
        }
        "artery_discovered_adventitia" => {
            "discovered aortic adventitia model, fibers at +/-66.78 deg (mu1 = 8.30, a = 1.42, mu5 = 0.49 kPa)"
        }
        "artery_goh_media" => {
            "dispersion-type Holzapfel aortic media fit (mu = 48.68 kPa, a = 6.67 kPa, b = 23.17, kappa = 0.074)"
        }
        "artery_goh_adventitia" => {
            "dispersion-type Holzapfel aortic adventitia fit (mu = 13.22 kPa, a = 0.93 kPa, b = 12.06, kappa = 0.091)"
        }
        "valve_fung_anterior" => "tricuspid anterior leaflet Fung-type fit (c0 = 1.0, c1 = 0.124 kPa, c2 = 4.57)",
        "valve_fung_posterior" => "tricuspid posterior leaflet Fung-type fit (c0 = 1.0, c1 = 0.188 kPa, c2 = 14.86)",
        "valve_fung_septal" => "tricuspid septal leaflet Fung-type fit (c0 = 1.0, c1 = 0.191 kPa, c2 = 17.75)",
        "heart_guan" => "four-term Guan myocardium fit on slots 1, 4, 14, 6 (kPa; f, s, n = e1, e2, e3)",
        "heart_generalized_holzapfel" => {
            "seven-term generalized Holzapfel myocardium fit on slots 1, 4, 8, 14, 6, 12 (kPa)"
        }
        "heart_discovered" => "discovered four-term myocardium model on slots 2, 4, 14, 6 (kPa)",
        _ => return None,
    };
    Some(d)
}

/// Build a preset table, overriding defaults by parameter name.
pub fn build_preset(name: &str, params: &[(&str, f64)]) -> Result<MaterialSpec> {
    let builder = match name {
        "neo_hooke" => neo_hooke,
        "mooney_rivlin" => mooney_rivlin,
        "yeoh" => yeoh,
        "polynomial" => polynomial,
        "holzapfel_two_fiber" => holzapfel_two_fiber,
        "kaliske" => kaliske,
        "goh_dispersion" => goh_dispersion,
        "vol_simo" => vol_simo,
        "vol_ogden_modified" => vol_ogden_modified,
        "brain_mooney_rivlin_gray" | "brain_mooney_rivlin_white" => brain_mooney_rivlin,
        "brain_blatz_ko_gray" | "brain_blatz_ko_white" => brain_blatz_ko,
        "brain_discovered_six_term_gray" | "brain_discovered_six_term_white" => brain_six_term,
        "skin_neohooke_holzapfel" => skin_neohooke_holzapfel,
        "skin_discovered" => skin_discovered,
        "artery_discovered_media" | "artery_discovered_adventitia" => artery_discovered,
        "artery_goh_media" | "artery_goh_adventitia" => artery_goh,
        "valve_fung_anterior" | "valve_fung_posterior" | "valve_fung_septal" => valve_fung,
        "heart_guan" => heart_guan,
        "heart_generalized_holzapfel" => heart_generalized_holzapfel,
        "heart_discovered" => heart_discovered,
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    builder(&Params::new(name, params))
}

/// Default build of a preset.
pub fn default_spec(name: &str) -> Result<MaterialSpec> {
    build_preset(name, &[])
}

// ---------------------------------------------------------------------------
// parameter plumbing
// ---------------------------------------------------------------------------

struct Params<'a> {
    preset: &'a str,
    map: BTreeMap<String, f64>,
    used: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl<'a> Params<'a> {
    fn new(preset: &'a str, given: &[(&str, f64)]) -> Self {
        Self {
            preset,
            map: given.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            used: Default::default(),
        }
    }

    /// Value with a calibrated default.
    fn get(&self, name: &str, default: f64) -> f64 {
        self.used.borrow_mut().insert(name.to_string());
        self.map.get(name).copied().unwrap_or(default)
    }

    /// Optional value with no default (volumetric moduli).
    fn opt(&self, name: &str) -> Option<f64> {
        self.used.borrow_mut().insert(name.to_string());
        self.map.get(name).copied()
    }

    /// Reject parameter names the preset does not know.
    fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for key in self.map.keys() {
            if !used.contains(key) {
                return Err(Error::UnknownParameter {
                    preset: self.preset.to_string(),
                    name: key.to_string(),
                });
            }
        }
        Ok(())
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositiveModulus {
            name: name.to_string(),
            value,
        })
    }
}

fn row(slot: u32, kf0: u32, kf1: u32, kf2: u32, w1: f64, w2: f64) -> NeuronRow {
    NeuronRow::new(
        slot,
        GateKind::from_code(kf0 as i64).expect("builder gate code"),
        kf1,
        OuterKind::from_code(kf2 as i64).expect("builder outer code"),
        1.0,
        w1,
        w2,
    )
}

/// The three-row triplet for K/2((J²−1)/2 − ln J) with w2 = K/2 (or 1/D).
fn ogden_vol_rows(w2: f64) -> Vec<NeuronRow> {
    vec![
        row(3, 1, 1, 1, 1.0, w2),
        row(3, 1, 2, 1, 0.5, w2),
        row(3, 1, 1, 3, -1.0, w2),
    ]
}

fn spec(
    name: &str,
    units: &str,
    ndir: usize,
    rows: Vec<NeuronRow>,
    mixed: Vec<MixedInvariantRow>,
    fibers: Option<FiberSet>,
    compressible: bool,
) -> MaterialSpec {
    MaterialSpec {
        name: name.to_string(),
        units: units.to_string(),
        table: ParameterTable {
            material_type: if compressible {
                MaterialType::Compressible
            } else {
                MaterialType::Incompressible
            },
            ndir,
            rows,
            mixed,
        },
        fibers,
    }
}

fn goh_mixed_rows(kappa: f64) -> Vec<MixedInvariantRow> {
    let mut k1 = [0.0; NUM_SLOTS];
    k1[0] = kappa;
    k1[3] = 1.0 - 3.0 * kappa;
    let mut k2 = [0.0; NUM_SLOTS];
    k2[0] = kappa;
    k2[7] = 1.0 - 3.0 * kappa;
    vec![
        MixedInvariantRow::new(101, k1),
        MixedInvariantRow::new(102, k2),
    ]
}

// ---------------------------------------------------------------------------
// classical models
// ---------------------------------------------------------------------------

fn neo_hooke(p: &Params) -> Result<MaterialSpec> {
    let c10 = p.get("c10", 0.5);
    let d1 = p.opt("d1");
    p.finish()?;
    let mut rows = vec![row(1, 1, 1, 1, 1.0, c10)];
    if let Some(d1) = d1 {
        rows.push(row(3, 1, 2, 1, 1.0, 1.0 / positive("d1", d1)?));
    }
    Ok(spec("neo_hooke", "", 0, rows, vec![], None, d1.is_some()))
}

fn mooney_rivlin(p: &Params) -> Result<MaterialSpec> {
    let c10 = p.get("c10", 0.3);
    let c01 = p.get("c01", 0.2);
    let d1 = p.opt("d1");
    p.finish()?;
    let mut rows = vec![row(1, 1, 1, 1, 1.0, c10), row(2, 1, 1, 1, 1.0, c01)];
    if let Some(d1) = d1 {
        rows.push(row(3, 1, 2, 1, 1.0, 1.0 / positive("d1", d1)?));
    }
    Ok(spec(
        "mooney_rivlin",
        "",
        0,
        rows,
        vec![],
        None,
        d1.is_some(),
    ))
}

fn yeoh(p: &Params) -> Result<MaterialSpec> {
    let c = [p.get("c10", 0.5), p.get("c20", 0.1), p.get("c30", 0.01)];
    let d = [p.opt("d1"), p.opt("d2"), p.opt("d3")];
    p.finish()?;
    let mut rows = Vec::new();
    for (i, ci) in c.iter().enumerate() {
        if *ci != 0.0 {
            rows.push(row(1, 1, i as u32 + 1, 1, 1.0, *ci));
        }
    }
    let names = ["d1", "d2", "d3"];
    for (i, di) in d.iter().enumerate() {
        if let Some(di) = di {
            rows.push(row(
                3,
                1,
                2 * (i as u32 + 1),
                1,
                1.0,
                1.0 / positive(names[i], *di)?,
            ));
        }
    }
    Ok(spec(
        "yeoh",
        "",
        0,
        rows,
        vec![],
        None,
        d.iter().any(Option::is_some),
    ))
}

fn polynomial(p: &Params) -> Result<MaterialSpec> {
    let c_names = ["c10", "c20", "c30", "c40", "c50", "c60"];
    let d_names = ["d1", "d2", "d3", "d4", "d5", "d6"];
    let c: Vec<f64> = c_names
        .iter()
        .enumerate()
        .map(|(i, n)| p.get(n, if i == 0 { 0.5 } else { 0.0 }))
        .collect();
    let d: Vec<Option<f64>> = d_names.iter().map(|n| p.opt(n)).collect();
    p.finish()?;
    let mut rows = Vec::new();
    for (i, ci) in c.iter().enumerate() {
        if *ci != 0.0 {
            rows.push(row(1, 1, i as u32 + 1, 1, 1.0, *ci));
        }
    }
    for (i, di) in d.iter().enumerate() {
        if let Some(di) = di {
            rows.push(row(
                3,
                1,
                2 * (i as u32 + 1),
                1,
                1.0,
                1.0 / positive(d_names[i], *di)?,
            ));
        }
    }
    Ok(spec(
        "polynomial",
        "",
        0,
        rows,
        vec![],
        None,
        d.iter().any(Option::is_some),
    ))
}

fn holzapfel_two_fiber(p: &Params) -> Result<MaterialSpec> {
    let c10 = p.get("c10", 0.5);
    let k1 = p.get("k1", 1.0);
    let k2 = positive("k2", p.get("k2", 2.0))?;
    let d = p.opt("d");
    p.finish()?;
    let mut rows = vec![
        row(1, 1, 1, 1, 1.0, c10),
        row(4, 2, 2, 2, k2, k1 / (2.0 * k2)),
        row(8, 2, 2, 2, k2, k1 / (2.0 * k2)),
    ];
    if let Some(d) = d {
        rows.extend(ogden_vol_rows(1.0 / positive("d", d)?));
    }
    Ok(spec(
        "holzapfel_two_fiber",
        "",
        2,
        rows,
        vec![],
        None,
        d.is_some(),
    ))
}

fn kaliske(p: &Params) -> Result<MaterialSpec> {
    // coefficient vectors (a_i, b_j, c_k, d_l, e_m, f_n) with zero defaults;
    // slot/power pattern follows the published table
    let series: [(&str, u32, u32, std::ops::RangeInclusive<u32>, f64); 6] = [
        ("a", 1, 1, 1..=3, 0.5),
        ("b", 2, 1, 1..=3, 0.1),
        ("c", 4, 2, 2..=6, 0.2),
        ("d", 5, 2, 2..=6, 0.1),
        ("e", 8, 2, 2..=6, 0.2),
        ("f", 9, 2, 2..=6, 0.1),
    ];
    let mut rows = Vec::new();
    for (prefix, slot, first, range, first_default) in series {
        for power in range {
            let name = format!("{prefix}{power}");
            let default = if power == first { first_default } else { 0.0 };
            let w2 = p.get(&name, default);
            if w2 != 0.0 {
                rows.push(row(slot, 1, power, 1, 1.0, w2));
            }
        }
    }
    let d = p.opt("dvol");
    p.finish()?;
    if let Some(d) = d {
        rows.extend(ogden_vol_rows(1.0 / positive("dvol", d)?));
    }
    Ok(spec("kaliske", "", 2, rows, vec![], None, d.is_some()))
}

fn goh_dispersion(p: &Params) -> Result<MaterialSpec> {
    let c10 = p.get("c10", 0.5);
    let k1 = p.get("k1", 1.0);
    let k2 = positive("k2", p.get("k2", 2.0))?;
    let kappa = p.get("kappa", 0.1);
    let d = p.opt("d");
    p.finish()?;
    let mut rows = vec![
        row(1, 1, 1, 1, 1.0, c10),
        row(101, 2, 2, 2, k2, k1 / (2.0 * k2)),
        row(102, 2, 2, 2, k2, k1 / (2.0 * k2)),
    ];
    if let Some(d) = d {
        rows.extend(ogden_vol_rows(1.0 / positive("d", d)?));
    }
    Ok(spec(
        "goh_dispersion",
        "",
        2,
        rows,
        goh_mixed_rows(kappa),
        None,
        d.is_some(),
    ))
}

fn vol_simo(p: &Params) -> Result<MaterialSpec> {
    let k = positive("k", p.get("k", 1.0))?;
    p.finish()?;
    Ok(spec(
        "vol_simo",
        "",
        0,
        vec![row(3, 1, 2, 1, 1.0, k / 2.0)],
        vec![],
        None,
        true,
    ))
}

fn vol_ogden_modified(p: &Params) -> Result<MaterialSpec> {
    let k = positive("k", p.get("k", 1.0))?;
    p.finish()?;
    Ok(spec(
        "vol_ogden_modified",
        "",
        0,
        ogden_vol_rows(k / 2.0),
        vec![],
        None,
        true,
    ))
}

// ---------------------------------------------------------------------------
// brain
// ---------------------------------------------------------------------------

fn brain_mooney_rivlin(p: &Params) -> Result<MaterialSpec> {
    let gray = p.preset.ends_with("gray");
    let (mu1_def, mu2_def) = if gray {
        (0.0021, 1.8817)
    } else {
        (0.0168, 0.9697)
    };
    let mu1 = p.get("mu1", mu1_def);
    let mu2 = p.get("mu2", mu2_def);
    p.finish()?;
    Ok(spec(
        p.preset,
        "kPa",
        0,
        vec![
            row(1, 1, 1, 1, 1.0, mu1 / 2.0),
            row(2, 1, 1, 1, 1.0, mu2 / 2.0),
        ],
        vec![],
        None,
        false,
    ))
}

fn brain_blatz_ko(p: &Params) -> Result<MaterialSpec> {
    let mu = p.get(
        "mu",
        if p.preset.ends_with("gray") {
            1.9043
        } else {
            0.9556
        },
    );
    p.finish()?;
    Ok(spec(
        p.preset,
        "kPa",
        0,
        vec![row(2, 1, 1, 1, 1.0, mu / 2.0)],
        vec![],
        None,
        false,
    ))
}

fn brain_six_term(p: &Params) -> Result<MaterialSpec> {
    // second-invariant terms: linear/exp/log on (I2-3) and on (I2-3)^2;
    // only the non-zero calibrated terms survive in each tissue fit
    let gray = p.preset.ends_with("gray");
    let defaults: [f64; 10] = if gray {
        // mu1, a1, b1, alpha1, beta1, mu2, a2, b2, alpha2, beta2
        [
            0.0, 0.0, 0.0, 1.2520, 0.9875, 3.8007, 6.2285, 1.6495, 4.6743, 1.6663,
        ]
    } else {
        [
            0.2215, 0.2350, 0.2398, 0.0, 0.0, 0.0, 6.3703, 1.8893, 4.5065, 1.1789,
        ]
    };
    let names = [
        "mu1", "a1", "b1", "alpha1", "beta1", "mu2", "a2", "b2", "alpha2", "beta2",
    ];
    let v: Vec<f64> = names
        .iter()
        .zip(defaults)
        .map(|(n, d)| p.get(n, d))
        .collect();
    p.finish()?;
    let (mu1, a1, b1, alpha1, beta1, mu2, a2, b2, alpha2, beta2) =
        (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]);

    let mut rows = Vec::new();
    if mu1 != 0.0 {
        rows.push(row(2, 1, 1, 1, 1.0, mu1));
    }
    if a1 != 0.0 {
        rows.push(row(2, 1, 1, 2, positive("b1", b1)?, a1 / (2.0 * b1)));
    }
    if alpha1 != 0.0 {
        rows.push(row(
            2,
            1,
            1,
            3,
            positive("beta1", beta1)?,
            alpha1 / (2.0 * beta1),
        ));
    }
    if mu2 != 0.0 {
        rows.push(row(2, 1, 2, 1, 1.0, mu2));
    }
    if a2 != 0.0 {
        rows.push(row(2, 1, 2, 2, positive("b2", b2)?, a2 / (2.0 * b2)));
    }
    if alpha2 != 0.0 {
        rows.push(row(
            2,
            1,
            2,
            3,
            positive("beta2", beta2)?,
            alpha2 / (2.0 * beta2),
        ));
    }
    Ok(spec(p.preset, "kPa", 0, rows, vec![], None, false))
}

// ---------------------------------------------------------------------------
// skin
// ---------------------------------------------------------------------------

fn skin_neohooke_holzapfel(p: &Params) -> Result<MaterialSpec> {
    let mu = p.get("mu", 0.2492);
    let a4 = p.get("a4", 0.1054);
    let b4 = positive("b4", p.get("b4", 10.7914))?;
    p.finish()?;
    Ok(spec(
        "skin_neohooke_holzapfel",
        "MPa",
        1,
        vec![
            row(1, 1, 1, 1, 1.0, mu),
            row(4, 2, 2, 2, b4, a4 / (2.0 * b4)),
        ],
        vec![],
        None,
        false,
    ))
}

fn skin_discovered(p: &Params) -> Result<MaterialSpec> {
    let a1 = p.get("a1", 1.3291);
    let b1 = positive("b1", p.get("b1", 0.8207))?;
    let a4 = p.get("a4", 0.2656);
    let b4 = positive("b4", p.get("b4", 0.3921))?;
    p.finish()?;
    Ok(spec(
        "skin_discovered",
        "MPa",
        1,
        vec![
            row(1, 1, 2, 2, b1, a1 / (2.0 * b1)),
            row(4, 2, 2, 2, b4, a4 / (2.0 * b4)),
        ],
        vec![],
        None,
        false,
    ))
}

// ---------------------------------------------------------------------------
// artery (two symmetric fiber families at +/- angle from circumferential)
// ---------------------------------------------------------------------------

fn artery_fibers(angle_deg: f64) -> Result<FiberSet> {
    FiberSet::from_angles_deg(&[angle_deg, -angle_deg])
}

fn artery_discovered(p: &Params) -> Result<MaterialSpec> {
    let media = p.preset.ends_with("media");
    let (mu1_d, a_d, b_d, mu5_d, ang_d) = if media {
        (33.45, 3.74, 6.66, 2.17, 7.00)
    } else {
        (8.30, 1.42, 6.34, 0.49, 66.78)
    };
    let mu1 = p.get("mu1", mu1_d);
    let a = p.get("a", a_d);
    let b = positive("b", p.get("b", b_d))?;
    let mu5 = p.get("mu5", mu5_d);
    let angle = p.get("angle_deg", ang_d);
    p.finish()?;
    Ok(spec(
        p.preset,
        "kPa",
        2,
        vec![
            row(1, 1, 1, 1, 1.0, mu1 / 2.0),
            row(1, 1, 1, 2, b, a / (2.0 * b)),
            row(5, 2, 2, 1, 1.0, mu5 / 2.0),
            row(9, 2, 2, 1, 1.0, mu5 / 2.0),
        ],
        vec![],
        Some(artery_fibers(angle)?),
        false,
    ))
}

fn artery_goh(p: &Params) -> Result<MaterialSpec> {
    let media = p.preset.ends_with("media");
    let (mu_d, a_d, b_d, kappa_d, ang_d) = if media {
        (48.68, 6.67, 23.17, 0.074, 7.00)
    } else {
        (13.22, 0.93, 12.06, 0.091, 66.78)
    };
    let mu = p.get("mu", mu_d);
    let a = p.get("a", a_d);
    let b = positive("b", p.get("b", b_d))?;
    let kappa = p.get("kappa", kappa_d);
    let angle = p.get("angle_deg", ang_d);
    p.finish()?;
    Ok(spec(
        p.preset,
        "kPa",
        2,
        vec![
            row(1, 1, 1, 1, 1.0, mu / 2.0),
            row(101, 2, 2, 2, b, a / (2.0 * b)),
            row(102, 2, 2, 2, b, a / (2.0 * b)),
        ],
        goh_mixed_rows(kappa),
        Some(artery_fibers(angle)?),
        false,
    ))
}

// ---------------------------------------------------------------------------
// valve
// ---------------------------------------------------------------------------

fn valve_fung(p: &Params) -> Result<MaterialSpec> {
    let (c1_d, c2_d) = match p.preset {
        "valve_fung_anterior" => (0.124, 4.57),
        "valve_fung_posterior" => (0.188, 14.86),
        _ => (0.191, 17.75),
    };
    let c0 = p.get("c0", 1.0);
    let c1 = p.get("c1", c1_d);
    let c2 = positive("c2", p.get("c2", c2_d))?;
    p.finish()?;
    Ok(spec(
        p.preset,
        "kPa",
        0,
        vec![
            row(1, 1, 1, 1, 1.0, c0 / 2.0),
            row(1, 1, 2, 2, c2, c1 / 2.0),
        ],
        vec![],
        None,
        false,
    ))
}

// ---------------------------------------------------------------------------
// heart (fiber, sheet, normal = e1, e2, e3 by default)
// ---------------------------------------------------------------------------

fn heart_guan(p: &Params) -> Result<MaterialSpec> {
    let a = p.get("a", 0.782);
    let b = positive("b", p.get("b", 7.248))?;
    let a_f = p.get("a_f", 4.488);
    let b_f = positive("b_f", p.get("b_f", 14.571))?;
    let a_n = p.get("a_n", 2.513);
    let b_n = positive("b_n", p.get("b_n", 10.929))?;
    let a_fs = p.get("a_fs", 0.436);
    let b_fs = positive("b_fs", p.get("b_fs", 4.959))?;
    p.finish()?;
    Ok(spec(
        "heart_guan",
        "kPa",
        3,
        vec![
            row(1, 1, 1, 2, b, a / (2.0 * b)),
            row(4, 2, 2, 2, b_f, a_f / (2.0 * b_f)),
            row(14, 2, 2, 2, b_n, a_n / (2.0 * b_n)),
            row(6, 1, 2, 2, b_fs, a_fs / (2.0 * b_fs)),
        ],
        vec![],
        None,
        false,
    ))
}

fn heart_generalized_holzapfel(p: &Params) -> Result<MaterialSpec> {
    let a = p.get("a", 0.950);
    let b = positive("b", p.get("b", 5.457))?;
    let a_f = p.get("a_f", 3.318);
    let b_f = positive("b_f", p.get("b_f", 23.701))?;
    let a_s = p.get("a_s", 1.405);
    let b_s = positive("b_s", p.get("b_s", 20.067))?;
    let a_n = p.get("a_n", 2.037);
    let b_n = positive("b_n", p.get("b_n", 16.976))?;
    let a_fs = p.get("a_fs", 0.586);
    let b_fs = positive("b_fs", p.get("b_fs", 1.081))?;
    let a_sn = p.get("a_sn", 0.047);
    let b_sn = positive("b_sn", p.get("b_sn", 11.842))?;
    p.finish()?;
    Ok(spec(
        "heart_generalized_holzapfel",
        "kPa",
        3,
        vec![
            row(1, 1, 1, 2, b, a / (2.0 * b)),
            row(4, 2, 2, 2, b_f, a_f / (2.0 * b_f)),
            row(8, 2, 2, 2, b_s, a_s / (2.0 * b_s)),
            row(14, 2, 2, 2, b_n, a_n / (2.0 * b_n)),
            row(6, 1, 2, 2, b_fs, a_fs / (2.0 * b_fs)),
            row(12, 1, 2, 2, b_sn, a_sn / (2.0 * b_sn)),
        ],
        vec![],
        None,
        false,
    ))
}

fn heart_discovered(p: &Params) -> Result<MaterialSpec> {
    let mu = p.get("mu", 5.162);
    let a_f = p.get("a_f", 3.426);
    let b_f = positive("b_f", p.get("b_f", 21.151))?;
    let a_n = p.get("a_n", 2.754);
    let b_n = positive("b_n", p.get("b_n", 4.371))?;
    let a_fs = p.get("a_fs", 0.494);
    let b_fs = positive("b_fs", p.get("b_fs", 0.508))?;
    p.finish()?;
    Ok(spec(
        "heart_discovered",
        "kPa",
        3,
        vec![
            row(2, 1, 1, 2, 1.0, mu / 2.0),
            row(4, 2, 2, 2, b_f, a_f / (2.0 * b_f)),
            row(14, 2, 2, 2, b_n, a_n / (2.0 * b_n)),
            row(6, 1, 2, 2, b_fs, a_fs / (2.0 * b_fs)),
        ],
        vec![],
        None,
        false,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deck::{parse_deck, serialize_deck};

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(matches!(
            build_preset("ogden", &[]),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        assert!(matches!(
            build_preset("neo_hooke", &[("c11", 1.0)]),
            Err(Error::UnknownParameter { .. })
        ));
    }

    #[test]
    fn non_positive_exponential_weight_is_rejected() {
        assert!(matches!(
            build_preset("holzapfel_two_fiber", &[("k2", -1.0)]),
            Err(Error::NonPositiveModulus { .. })
        ));
        assert!(matches!(
            build_preset("heart_guan", &[("b_f", 0.0)]),
            Err(Error::NonPositiveModulus { .. })
        ));
    }

    #[test]
    fn brain_gray_weights() {
        let s = default_spec("brain_mooney_rivlin_gray").unwrap();
        assert_eq!(s.table.rows.len(), 2);
        assert_eq!(s.table.rows[0].w2, 0.00105);
        assert_eq!(s.table.rows[1].w2, 0.94085);
        assert_eq!(s.units, "kPa");
        assert_eq!(s.table.material_type, MaterialType::Incompressible);
    }

    #[test]
    fn skin_discovered_rows() {
        let s = build_preset(
            "skin_discovered",
            &[
                ("a1", 1.3291),
                ("b1", 0.8207),
                ("a4", 0.2656),
                ("b4", 0.3921),
            ],
        )
        .unwrap();
        let r = &s.table.rows[0];
        assert_eq!(
            (r.slot, r.gate.code(), r.power, r.outer.code(), r.w1),
            (1, 1, 2, 2, 0.8207)
        );
        assert!((r.w2 - 1.3291 / (2.0 * 0.8207)).abs() < 1e-15);
        let r = &s.table.rows[1];
        assert_eq!(
            (r.slot, r.gate.code(), r.power, r.outer.code(), r.w1),
            (4, 2, 2, 2, 0.3921)
        );
        assert!((r.w2 - 0.2656 / (2.0 * 0.3921)).abs() < 1e-15);
    }

    #[test]
    fn heart_slot_assignments() {
        let slots = |name: &str| -> Vec<u32> {
            default_spec(name)
                .unwrap()
                .table
                .rows
                .iter()
                .map(|r| r.slot)
                .collect()
        };
        assert_eq!(slots("heart_guan"), vec![1, 4, 14, 6]);
        assert_eq!(
            slots("heart_generalized_holzapfel"),
            vec![1, 4, 8, 14, 6, 12]
        );
        assert_eq!(slots("heart_discovered"), vec![2, 4, 14, 6]);
    }

    #[test]
    fn heart_discovered_weights() {
        let s = default_spec("heart_discovered").unwrap();
        assert_eq!(s.table.rows[0].w2, 5.162 / 2.0);
        assert!((s.table.rows[1].w2 - 3.426 / (2.0 * 21.151)).abs() < 1e-15);
        assert_eq!(s.table.rows[1].w1, 21.151);
        assert_eq!(s.table.rows[3].w1, 0.508);
    }

    #[test]
    fn brain_six_term_drops_zero_weight_rows() {
        let gray = default_spec("brain_discovered_six_term_gray").unwrap();
        assert_eq!(gray.table.rows.len(), 4);
        assert!(gray.table.rows.iter().all(|r| r.slot == 2));
        // ln, quadratic, exp-quadratic, ln-quadratic pattern
        let kinds: Vec<(u32, u32)> = gray
            .table
            .rows
            .iter()
            .map(|r| (r.power, r.outer.code()))
            .collect();
        assert_eq!(kinds, vec![(1, 3), (2, 1), (2, 2), (2, 3)]);
        let white = default_spec("brain_discovered_six_term_white").unwrap();
        assert_eq!(white.table.rows.len(), 4);
        let kinds: Vec<(u32, u32)> = white
            .table
            .rows
            .iter()
            .map(|r| (r.power, r.outer.code()))
            .collect();
        assert_eq!(kinds, vec![(1, 1), (1, 2), (2, 2), (2, 3)]);
    }

    #[test]
    fn artery_goh_mixed_structure() {
        let s = default_spec("artery_goh_media").unwrap();
        assert_eq!(s.table.mixed.len(), 2);
        assert_eq!(s.table.mixed[0].index, 101);
        assert_eq!(s.table.mixed[0].kappa[0], 0.074);
        assert!((s.table.mixed[0].kappa[3] - (1.0 - 3.0 * 0.074)).abs() < 1e-15);
        assert_eq!(s.table.mixed[1].kappa[7], s.table.mixed[0].kappa[3]);
        let fibers = s.fibers.as_ref().unwrap();
        assert_eq!(fibers.ndir(), 2);
        // +/- 7 degrees: mirrored y components
        let d = fibers.directions();
        assert!((d[0].y + d[1].y).abs() < 1e-15);
    }

    #[test]
    fn neo_hooke_compressibility_follows_d1() {
        let inc = default_spec("neo_hooke").unwrap();
        assert_eq!(inc.table.material_type, MaterialType::Incompressible);
        assert_eq!(inc.table.rows.len(), 1);
        let comp = build_preset("neo_hooke", &[("c10", 0.5), ("d1", 0.25)]).unwrap();
        assert_eq!(comp.table.material_type, MaterialType::Compressible);
        assert_eq!(comp.table.rows.len(), 2);
        assert_eq!(comp.table.rows[1].w2, 4.0);
    }

    #[test]
    fn holzapfel_prints_the_six_line_table() {
        let s = build_preset(
            "holzapfel_two_fiber",
            &[("c10", 0.5), ("k1", 1.2), ("k2", 3.4), ("d", 0.5)],
        )
        .unwrap();
        let pat: Vec<(u32, u32, u32, u32)> = s
            .table
            .rows
            .iter()
            .map(|r| (r.slot, r.gate.code(), r.power, r.outer.code()))
            .collect();
        assert_eq!(
            pat,
            vec![
                (1, 1, 1, 1),
                (4, 2, 2, 2),
                (8, 2, 2, 2),
                (3, 1, 1, 1),
                (3, 1, 2, 1),
                (3, 1, 1, 3),
            ]
        );
        assert_eq!(s.table.rows[4].w1, 0.5);
        assert_eq!(s.table.rows[5].w1, -1.0);
    }

    #[test]
    fn every_default_preset_round_trips_through_the_deck() {
        for name in PRESET_NAMES {
            let s = default_spec(name).unwrap();
            let text = serialize_deck(&s);
            let back = parse_deck(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s, back, "{name} deck round trip");
            assert!(
                preset_description(name).is_some(),
                "{name} missing description"
            );
        }
    }
}
