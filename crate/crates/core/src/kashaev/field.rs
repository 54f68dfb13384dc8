//! Lattice fields on finite windows and the per-cube / per-vertex checks.

use super::{cube_roots, kashaev_k_sides, kashaev_kv, KashaevError};
use crate::exec;
use crate::report::{Finding, NumericMode, Report};
use crate::scalar::{Scalar, ToleranceContext};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Point3 = [i64; 3];

pub const E: [Point3; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

pub fn padd(p: Point3, q: Point3) -> Point3 {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

pub fn pneg(p: Point3) -> Point3 {
    [-p[0], -p[1], -p[2]]
}

fn offset(bits: usize) -> Point3 {
    [(bits & 1) as i64, (bits >> 1 & 1) as i64, (bits >> 2 & 1) as i64]
}

/// Inclusive axis-aligned box in Z^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window3 {
    pub lo: Point3,
    pub hi: Point3,
}

impl Window3 {
    pub fn new(lo: Point3, hi: Point3) -> Self {
        assert!((0..3).all(|a| lo[a] <= hi[a]), "empty window");
        Window3 { lo, hi }
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|a| self.lo[a] <= p[a] && p[a] <= self.hi[a])
    }

    pub fn hull_with(&self, p: Point3) -> Window3 {
        let mut w = *self;
        for a in 0..3 {
            w.lo[a] = w.lo[a].min(p[a]);
            w.hi[a] = w.hi[a].max(p[a]);
        }
        w
    }
}

/// Key of a unit-square face: the axis it is perpendicular to (1, 2, or 3)
/// plus its lowest corner. Integer-only keys stand in for the half-integer
/// face centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceKey {
    pub axis: u8,
    pub base: Point3,
}

impl FaceKey {
    pub fn new(axis: u8, base: Point3) -> Self {
        assert!((1..=3).contains(&axis));
        FaceKey { axis, base }
    }

    /// The two in-plane axes (0-indexed), in increasing order.
    pub fn spans(&self) -> (usize, usize) {
        match self.axis {
            1 => (1, 2),
            2 => (0, 2),
            _ => (0, 1),
        }
    }

    /// Corners in cyclic order: base, base+e_b, base+e_b+e_c, base+e_c.
    pub fn corners(&self) -> [Point3; 4] {
        let (b, c) = self.spans();
        [
            self.base,
            padd(self.base, E[b]),
            padd(padd(self.base, E[b]), E[c]),
            padd(self.base, E[c]),
        ]
    }

    /// Line class of the face in Z^3_boxdot: the axis plus the two
    /// transverse coordinates.
    pub fn class(&self) -> (u8, i64, i64) {
        let (b, c) = self.spans();
        (self.axis, self.base[b], self.base[c])
    }

    pub fn reversed(&self) -> FaceKey {
        let (b, c) = self.spans();
        let mut base = pneg(self.base);
        base[b] -= 1;
        base[c] -= 1;
        FaceKey { axis: self.axis, base }
    }
}

/// Scalar values on the integer points of a window. Values may cover the
/// whole window (fully populated) or a sub-support, e.g. the computable
/// region of a recurrence run.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField3 {
    pub window: Window3,
    values: BTreeMap<Point3, Scalar>,
}

impl VertexField3 {
    pub fn new(window: Window3, values: BTreeMap<Point3, Scalar>) -> Result<Self, KashaevError> {
        for p in values.keys() {
            if !window.contains(*p) {
                return Err(KashaevError::InvalidField(format!(
                    "vertex {p:?} outside window"
                )));
            }
        }
        if values.is_empty() {
            return Err(KashaevError::InvalidField("no vertex values".into()));
        }
        Ok(VertexField3 { window, values })
    }

    pub fn from_fn(window: Window3, f: impl Fn(Point3) -> Scalar) -> Self {
        let mut values = BTreeMap::new();
        for i in window.lo[0]..=window.hi[0] {
            for j in window.lo[1]..=window.hi[1] {
                for k in window.lo[2]..=window.hi[2] {
                    values.insert([i, j, k], f([i, j, k]));
                }
            }
        }
        VertexField3 { window, values }
    }

    pub fn get(&self, p: Point3) -> Option<&Scalar> {
        self.values.get(&p)
    }

    pub fn require(&self, p: Point3) -> Result<&Scalar, KashaevError> {
        self.values.get(&p).ok_or(KashaevError::MissingValue(p))
    }

    pub fn insert(&mut self, p: Point3, v: Scalar) {
        self.window = self.window.hull_with(p);
        self.values.insert(p, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point3, &Scalar)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mode(&self) -> NumericMode {
        if self.values.values().all(|v| v.is_exact()) {
            NumericMode::Exact
        } else {
            NumericMode::Float
        }
    }

    pub fn corners_at(&self, base: Point3) -> Option<[Scalar; 8]> {
        let mut out: [Scalar; 8] = std::array::from_fn(|_| Scalar::zero());
        for (b, slot) in out.iter_mut().enumerate() {
            *slot = self.values.get(&padd(base, offset(b)))?.clone();
        }
        Some(out)
    }

    /// Bases of all unit cubes whose 8 corners carry values, in order.
    pub fn complete_cube_bases(&self) -> Vec<Point3> {
        self.values
            .keys()
            .filter(|&&p| (0..8).all(|b| self.values.contains_key(&padd(p, offset(b)))))
            .copied()
            .collect()
    }

    /// Value of the face-condition expression `x_{v1}x_{v3} + x_{v2}x_{v4}`
    /// over a face, when all four corners are present.
    pub fn face_expression(&self, key: &FaceKey) -> Option<Scalar> {
        let [p0, p1, p2, p3] = key.corners();
        let v0 = self.values.get(&p0)?;
        let v1 = self.values.get(&p1)?;
        let v2 = self.values.get(&p2)?;
        let v3 = self.values.get(&p3)?;
        Some(&(v0 * v2) + &(v1 * v3))
    }

    /// Point reflection p -> -p. Preserves every per-cube verdict.
    pub fn reversed(&self) -> VertexField3 {
        let values: BTreeMap<Point3, Scalar> =
            self.values.iter().map(|(p, v)| (pneg(*p), v.clone())).collect();
        VertexField3 {
            window: Window3::new(pneg(self.window.hi), pneg(self.window.lo)),
            values,
        }
    }
}

/// A vertex field together with face values keyed by (axis, base vertex).
#[derive(Debug, Clone, PartialEq)]
pub struct KHexField3 {
    pub vertices: VertexField3,
    pub faces: BTreeMap<FaceKey, Scalar>,
}

impl KHexField3 {
    pub fn face(&self, key: &FaceKey) -> Option<&Scalar> {
        self.faces.get(key)
    }

    pub fn mode(&self) -> NumericMode {
        if self.vertices.mode() == NumericMode::Exact
            && self.faces.values().all(|v| v.is_exact())
        {
            NumericMode::Exact
        } else {
            NumericMode::Float
        }
    }

    /// The three lower faces of the cube at `base`, axis order.
    pub fn lower_faces(&self, base: Point3) -> Option<[Scalar; 3]> {
        let mut out: [Scalar; 3] = std::array::from_fn(|_| Scalar::zero());
        for a in 0..3 {
            out[a] = self.faces.get(&FaceKey::new(a as u8 + 1, base))?.clone();
        }
        Some(out)
    }

    pub fn reversed(&self) -> KHexField3 {
        KHexField3 {
            vertices: self.vertices.reversed(),
            faces: self
                .faces
                .iter()
                .map(|(k, v)| (k.reversed(), v.clone()))
                .collect(),
        }
    }
}

fn loc_cube(base: Point3) -> String {
    format!("cube({},{},{})", base[0], base[1], base[2])
}

fn loc_face(key: &FaceKey) -> String {
    format!(
        "face(axis{},{},{},{})",
        key.axis, key.base[0], key.base[1], key.base[2]
    )
}

/// Check the Kashaev equation on every complete cube of the window. The
/// report lists each violating cube with its residual.
pub fn check_kashaev(field: &VertexField3, ctx: &ToleranceContext) -> Report {
    let bases = field.complete_cube_bases();
    let findings: Vec<Option<Finding>> = exec::map_collect(&bases, |&base| {
        let corners = field.corners_at(base).expect("complete cube");
        let (lhs, rhs) = kashaev_k_sides(&corners);
        if lhs.approx_eq_coerced(&rhs, ctx) {
            None
        } else {
            Some(Finding::mismatch("kashaev", loc_cube(base), lhs, rhs))
        }
    });
    Report::new(field.mode(), findings.into_iter().flatten().collect())
}

/// Outcome of the coherence test at one vertex: the product of the eight
/// `K^C_v` over incident cubes against the product of the twelve incident
/// face expressions, plus the even/odd diagonal split of the cube product.
#[derive(Debug, Clone)]
pub struct CoherenceCheck {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub even_product: Scalar,
    pub odd_product: Scalar,
    pub ok: bool,
}

/// Coherence at `v` requires the full 3x3x3 neighborhood. Assumes the field
/// already passes the Kashaev check there.
pub fn check_coherence(
    field: &VertexField3,
    v: Point3,
    ctx: &ToleranceContext,
) -> Result<CoherenceCheck, KashaevError> {
    for di in -1..=1 {
        for dj in -1..=1 {
            for dk in -1..=1 {
                let p = padd(v, [di, dj, dk]);
                if field.get(p).is_none() {
                    return Err(KashaevError::NeighborhoodIncomplete(v));
                }
            }
        }
    }
    let mut even = Scalar::one();
    let mut odd = Scalar::one();
    for signs in 0..8u32 {
        let i = [
            if signs & 1 == 1 { -1 } else { 1 },
            if signs >> 1 & 1 == 1 { -1 } else { 1 },
            if signs >> 2 & 1 == 1 { -1 } else { 1 },
        ];
        let base = [
            v[0] + i[0].min(0),
            v[1] + i[1].min(0),
            v[2] + i[2].min(0),
        ];
        let corners = field.corners_at(base).expect("neighborhood complete");
        let mut idx = 0usize;
        for a in 0..3 {
            if i[a] < 0 {
                idx |= 1 << a;
            }
        }
        let kv = kashaev_kv(&corners, idx);
        if i[0] * i[1] * i[2] > 0 {
            even = &even * &kv;
        } else {
            odd = &odd * &kv;
        }
    }
    let mut rhs = Scalar::one();
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let p1 = padd(v, [E[a][0] * sa, E[a][1] * sa, E[a][2] * sa]);
            let p3 = padd(v, [E[b][0] * sb, E[b][1] * sb, E[b][2] * sb]);
            let p2 = padd(p1, [E[b][0] * sb, E[b][1] * sb, E[b][2] * sb]);
            let term = &(field.get(v).unwrap() * field.get(p2).unwrap())
                + &(field.get(p1).unwrap() * field.get(p3).unwrap());
            rhs = &rhs * &term;
        }
    }
    let lhs = &even * &odd;
    let ok = lhs.approx_eq_coerced(&rhs, ctx);
    Ok(CoherenceCheck {
        lhs,
        rhs,
        even_product: even,
        odd_product: odd,
        ok,
    })
}

/// Run the positive Kashaev recurrence: repeatedly fill the top corner of
/// every cube whose seven lower corners are known, always taking the larger
/// root. `steps` bounds the number of height layers added. Output keeps the
/// input values bit-for-bit and is restricted to computable points.
pub fn run_positive_kashaev(
    init: &VertexField3,
    steps: usize,
) -> Result<VertexField3, KashaevError> {
    for (p, v) in init.iter() {
        if v.to_f64() <= 0.0 {
            return Err(KashaevError::PositivityRequired(*p));
        }
    }
    let mut field = VertexField3 {
        window: init.window,
        values: init.iter().map(|(p, v)| (*p, v.to_float())).collect(),
    };
    for _ in 0..steps {
        let candidates: Vec<Point3> = field
            .values
            .keys()
            .filter_map(|&p| {
                let top = padd(p, [1, 1, 1]);
                let have_lower =
                    (0..7).all(|b| field.values.contains_key(&padd(p, offset(b))));
                (have_lower && !field.values.contains_key(&top)).then_some(p)
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        let tops: Vec<(Point3, Scalar)> = exec::map_collect(&candidates, |&base| {
            let lower: [Scalar; 7] =
                std::array::from_fn(|b| field.values.get(&padd(base, offset(b))).unwrap().clone());
            let roots = cube_roots(&lower).expect("positive values");
            (padd(base, [1, 1, 1]), roots.root_plus)
        });
        for (p, v) in tops {
            field.insert(p, v);
        }
    }
    Ok(field)
}

/// Verify the K-hexahedron equations on every complete cube and the face
/// condition on every stored face with complete corners. All vertex values
/// must be nonzero.
pub fn check_khex(field: &KHexField3, ctx: &ToleranceContext) -> Result<Report, KashaevError> {
    for (p, v) in field.vertices.iter() {
        if v.is_zero() {
            return Err(KashaevError::ZeroVertexValue(*p));
        }
    }
    let mut findings = Vec::new();

    let faces: Vec<(FaceKey, Scalar)> =
        field.faces.iter().map(|(k, v)| (*k, v.clone())).collect();
    let face_findings: Vec<Option<Finding>> = exec::map_collect(&faces, |(key, value)| {
        let expr = field.vertices.face_expression(key)?;
        let sq = value.square();
        (!sq.approx_eq_coerced(&expr, ctx))
            .then(|| Finding::mismatch("face-square", loc_face(key), sq, expr))
    });
    findings.extend(face_findings.into_iter().flatten());

    let bases: Vec<Point3> = field
        .vertices
        .complete_cube_bases()
        .into_iter()
        .filter(|&b| {
            (1..=3u8).all(|a| {
                field.faces.contains_key(&FaceKey::new(a, b))
                    && field
                        .faces
                        .contains_key(&FaceKey::new(a, padd(b, E[a as usize - 1])))
            })
        })
        .collect();
    let cube_findings: Vec<Vec<Finding>> = exec::map_collect(&bases, |&base| {
        let mut out = Vec::new();
        let corners = field.vertices.corners_at(base).expect("complete");
        let lower: [Scalar; 7] = std::array::from_fn(|b| corners[b].clone());
        let faces = field.lower_faces(base).expect("checked");
        let z0 = &lower[0];
        // upper-face equations, cross-multiplied by the base value
        for a in 0..3usize {
            let upper = field
                .faces
                .get(&FaceKey::new(a as u8 + 1, padd(base, E[a])))
                .expect("checked");
            let (f_self, f_o1, f_o2, corner) = match a {
                0 => (&faces[0], &faces[1], &faces[2], &lower[1]),
                1 => (&faces[1], &faces[0], &faces[2], &lower[2]),
                _ => (&faces[2], &faces[0], &faces[1], &lower[4]),
            };
            let lhs = upper * z0;
            let rhs = &(f_o1 * f_o2) + &(f_self * corner);
            if !lhs.approx_eq_coerced(&rhs, ctx) {
                out.push(Finding::mismatch(
                    &format!("khex-face{}", a + 1),
                    loc_cube(base),
                    lhs,
                    rhs,
                ));
            }
        }
        let (a_val, _) = super::cube_a_d(&lower);
        let two = Scalar::from_int(2);
        let lhs = &corners[7] * &z0.square();
        let rhs = &a_val + &(&two * &(&(&faces[0] * &faces[1]) * &faces[2]));
        if !lhs.approx_eq_coerced(&rhs, ctx) {
            out.push(Finding::mismatch("khex-top", loc_cube(base), lhs, rhs));
        }
        out
    });
    findings.extend(cube_findings.into_iter().flatten());
    Ok(Report::new(field.mode(), findings))
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    p: Point3,
    v: Scalar,
}

#[derive(Serialize, Deserialize)]
struct FaceEntry {
    axis: u8,
    base: Point3,
    v: Scalar,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    window: [Point3; 2],
    vertices: Vec<VertexEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    faces: Vec<FaceEntry>,
}

impl Serialize for VertexField3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldJson {
            window: [self.window.lo, self.window.hi],
            vertices: self
                .iter()
                .map(|(p, v)| VertexEntry { p: *p, v: v.clone() })
                .collect(),
            faces: Vec::new(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexField3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = FieldJson::deserialize(d)?;
        let values = raw.vertices.into_iter().map(|e| (e.p, e.v)).collect();
        VertexField3::new(Window3::new(raw.window[0], raw.window[1]), values)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for KHexField3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldJson {
            window: [self.vertices.window.lo, self.vertices.window.hi],
            vertices: self
                .vertices
                .iter()
                .map(|(p, v)| VertexEntry { p: *p, v: v.clone() })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|(k, v)| FaceEntry {
                    axis: k.axis,
                    base: k.base,
                    v: v.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KHexField3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = FieldJson::deserialize(d)?;
        let values = raw.vertices.into_iter().map(|e| (e.p, e.v)).collect();
        let vertices = VertexField3::new(Window3::new(raw.window[0], raw.window[1]), values)
            .map_err(serde::de::Error::custom)?;
        let faces = raw
            .faces
            .into_iter()
            .map(|e| (FaceKey::new(e.axis, e.base), e.v))
            .collect();
        Ok(KHexField3 { vertices, faces })
    }
}

/// Diagonal slab of positive values: heights `0..=2` (height = i+j+k) over
/// the given shadow grid, the standard seed for the positive recurrence.
pub fn positive_slab(
    shadow: (i64, i64),
    mut value: impl FnMut(Point3) -> f64,
) -> VertexField3 {
    let mut values = BTreeMap::new();
    let mut window = Window3::new([0, 0, -shadow.0 - shadow.1], [0, 0, 2]);
    for i in 0..shadow.0 {
        for j in 0..shadow.1 {
            for h in 0..3i64 {
                let p = [i, j, h - i - j];
                values.insert(p, Scalar::from_f64(value(p)));
                window = window.hull_with(p);
            }
        }
    }
    VertexField3 { window, values }
}
