//! Sign gauges on K-hexahedron fields: three sign sequences indexed by
//! coordinate lines act on face values, leaving the vertex restriction and
//! the K-hexahedron equations intact. Two fields agreeing on the integer
//! lattice differ by such a gauge exactly when their face-sign ratios lie in
//! the kernel of the per-cube sign product.

use super::{FaceKey, KHexField3, KashaevError, Point3};
use crate::gf2::BitMatrix;
use crate::scalar::ToleranceContext;
use std::collections::BTreeMap;

/// Sign sequences alpha, beta, gamma indexed by the first, second, and third
/// coordinate. Missing entries default to +1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gauge {
    pub alpha: BTreeMap<i64, i8>,
    pub beta: BTreeMap<i64, i8>,
    pub gamma: BTreeMap<i64, i8>,
}

fn sign_of(map: &BTreeMap<i64, i8>, coord: i64) -> i8 {
    *map.get(&coord).unwrap_or(&1)
}

impl Gauge {
    pub fn identity() -> Self {
        Gauge::default()
    }

    /// The sign multiplying the face at `key`: beta*gamma, alpha*gamma, or
    /// alpha*beta depending on the face axis.
    pub fn face_sign(&self, key: &FaceKey) -> i8 {
        let b = key.base;
        match key.axis {
            1 => sign_of(&self.beta, b[1]) * sign_of(&self.gamma, b[2]),
            2 => sign_of(&self.alpha, b[0]) * sign_of(&self.gamma, b[2]),
            _ => sign_of(&self.alpha, b[0]) * sign_of(&self.beta, b[1]),
        }
    }
}

/// Apply a gauge: vertices unchanged, each face multiplied by its sign.
pub fn gauge_transform(field: &KHexField3, gauge: &Gauge) -> KHexField3 {
    let faces = field
        .faces
        .iter()
        .map(|(key, value)| {
            let v = if gauge.face_sign(key) < 0 { -value } else { value.clone() };
            (*key, v)
        })
        .collect();
    KHexField3 {
        vertices: field.vertices.clone(),
        faces,
    }
}

/// Why two vertex-identical fields fail to be gauge-related.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaugeWitness {
    /// A face whose values are not equal up to sign.
    Face(FaceKey),
    /// A sign class whose member faces carry inconsistent signs.
    Class((u8, i64, i64)),
    /// A cube at whose faces the sign product is -1 (not in the kernel).
    Cube(Point3),
    /// The per-class signs admit no line-indexed factorization.
    Unsolvable,
}

#[derive(Debug, Clone)]
pub enum GaugeOutcome {
    Gauge(Gauge),
    Obstruction(GaugeWitness),
}

/// Recover the gauge carrying `f1` to `f2`, or report the obstruction.
/// Both fields must have the same support and equal vertex values.
pub fn gauge_compare(
    f1: &KHexField3,
    f2: &KHexField3,
    ctx: &ToleranceContext,
) -> Result<GaugeOutcome, KashaevError> {
    for (p, v) in f1.vertices.iter() {
        match f2.vertices.get(*p) {
            Some(w) if v.approx_eq_coerced(w, ctx) => {}
            _ => return Err(KashaevError::VertexMismatch(*p)),
        }
    }
    if f1.faces.len() != f2.faces.len() {
        return Err(KashaevError::InvalidField(
            "face supports differ".into(),
        ));
    }

    // per-class sign from the face ratios
    let mut class_sign: BTreeMap<(u8, i64, i64), (i8, FaceKey)> = BTreeMap::new();
    for (key, x) in &f1.faces {
        let Some(y) = f2.face(key) else {
            return Err(KashaevError::InvalidField(format!(
                "face {key:?} missing from second field"
            )));
        };
        let sign = if y.approx_eq_coerced(x, ctx) {
            1i8
        } else if y.approx_eq_coerced(&-x, ctx) {
            -1i8
        } else {
            return Ok(GaugeOutcome::Obstruction(GaugeWitness::Face(*key)));
        };
        match class_sign.get(&key.class()) {
            Some((s, _)) if *s != sign => {
                return Ok(GaugeOutcome::Obstruction(GaugeWitness::Class(key.class())));
            }
            Some(_) => {}
            None => {
                class_sign.insert(key.class(), (sign, *key));
            }
        }
    }

    // kernel condition: the three class signs multiply to +1 on every cube
    for base in f1.vertices.complete_cube_bases() {
        let mut prod = 1i8;
        let mut all_present = true;
        for a in 1..=3u8 {
            match class_sign.get(&FaceKey::new(a, base).class()) {
                Some((s, _)) => prod *= s,
                None => {
                    all_present = false;
                    break;
                }
            }
        }
        if all_present && prod < 0 {
            return Ok(GaugeOutcome::Obstruction(GaugeWitness::Cube(base)));
        }
    }

    // factor the class signs as line signs: one GF(2) unknown per coordinate
    let mut var_ids: BTreeMap<(u8, i64), usize> = BTreeMap::new();
    let var = |ids: &mut BTreeMap<(u8, i64), usize>, axis: u8, coord: i64| -> usize {
        let next = ids.len();
        *ids.entry((axis, coord)).or_insert(next)
    };
    let mut rows: Vec<(Vec<(u8, i64)>, bool)> = Vec::new();
    for ((axis, t1, t2), (sign, _)) in &class_sign {
        // axis 1 faces span coords (b, c) -> beta_b * gamma_c, etc.
        let vars = match axis {
            1 => vec![(2u8, *t1), (3u8, *t2)],
            2 => vec![(1u8, *t1), (3u8, *t2)],
            _ => vec![(1u8, *t1), (2u8, *t2)],
        };
        for &(series, coord) in &vars {
            var(&mut var_ids, series, coord);
        }
        rows.push((vars, *sign < 0));
    }
    let mut system = BitMatrix::zero(0, var_ids.len());
    let mut rhs = Vec::with_capacity(rows.len());
    for (vars, bit) in &rows {
        let cols: Vec<usize> = vars.iter().map(|v| var_ids[v]).collect();
        system.push_row(&cols);
        rhs.push(*bit);
    }
    let Some(solution) = system.solve(&rhs) else {
        return Ok(GaugeOutcome::Obstruction(GaugeWitness::Unsolvable));
    };
    let mut gauge = Gauge::identity();
    for ((series, coord), id) in &var_ids {
        if solution[*id] {
            let map = match series {
                1 => &mut gauge.alpha,
                2 => &mut gauge.beta,
                _ => &mut gauge.gamma,
            };
            map.insert(*coord, -1);
        }
    }
    Ok(GaugeOutcome::Gauge(gauge))
}
