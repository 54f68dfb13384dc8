//! Generalized box-shaped recurrences: a polynomial `f` on the integer
//! points of an `a₁ x ... x a_d` box, quadratic in the top corner with a
//! discriminant that factors as `f₁ ⋯ f_d`, together with face-update
//! rules `r_i` adapted to that factorization and the propagation signs
//! relating the top-corner derivative to face products in each of the `2^d`
//! orientations.
//!
//! Four families are built in: the Kashaev cube, the square equation from
//! s-holomorphicity, a one-dimensional cubic family with three parameters,
//! and a 1x2-box family with two parameters.

use crate::exec;
use crate::report::{Finding, NumericMode, Report};
use crate::scalar::{Scalar, ScalarError, ToleranceContext};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type PointD = Vec<i64>;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum GenError {
    #[error("unknown instance id {0:?}")]
    UnknownInstance(String),
    #[error("instance {0:?} takes {1} parameters")]
    BadParams(String, usize),
    #[error("leading coefficient g vanishes at box {0:?}")]
    ZeroG(PointD),
    #[error("face-update denominator vanishes at box {0:?}")]
    ZeroDenominator(PointD),
    #[error("missing vertex value at {0:?}")]
    MissingValue(PointD),
    #[error("missing face value at axis {0}, base {1:?}")]
    MissingFace(usize, PointD),
    #[error("neighborhood of {0:?} is incomplete")]
    NeighborhoodIncomplete(PointD),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Box dimensions `a = (a_1, ..., a_d)`, all at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxShape(pub Vec<i64>);

impl BoxShape {
    pub fn d(&self) -> usize {
        self.0.len()
    }
}

/// Values on the integer points of one box, keyed by offset multi-index.
#[derive(Debug, Clone)]
pub struct BoxVals {
    vals: BTreeMap<PointD, Scalar>,
}

impl BoxVals {
    pub fn new(vals: BTreeMap<PointD, Scalar>) -> Self {
        BoxVals { vals }
    }

    /// Value at the given offset; panics when absent (construction
    /// guarantees presence for well-formed boxes).
    pub fn z(&self, idx: &[i64]) -> &Scalar {
        self.vals
            .get(idx)
            .unwrap_or_else(|| panic!("box value at {idx:?} missing"))
    }
}

/// Iterate all integer points of the box `[0, dims]` (inclusive).
pub fn box_points(dims: &[i64]) -> Vec<PointD> {
    let mut out = vec![vec![]];
    for &extent in dims {
        let mut next = Vec::with_capacity(out.len() * (extent as usize + 1));
        for p in &out {
            for c in 0..=extent {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn points_between(lo: &[i64], hi: &[i64]) -> Vec<PointD> {
    let dims: Vec<i64> = lo.iter().zip(hi).map(|(l, h)| h - l).collect();
    box_points(&dims)
        .into_iter()
        .map(|p| p.iter().zip(lo).map(|(c, l)| c + l).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    Kashaev3d,
    Sholo2d,
    Cubic1d,
    Box2d,
}

impl InstanceKind {
    pub fn id(&self) -> &'static str {
        match self {
            InstanceKind::Kashaev3d => "kashaev3d",
            InstanceKind::Sholo2d => "sholo2d",
            InstanceKind::Cubic1d => "cubic1d",
            InstanceKind::Box2d => "box2d",
        }
    }
}

/// A generalized-recurrence descriptor: box shape, parameters, evaluators,
/// and the hardcoded propagation-sign table. `negate_r[i]` rebuilds the
/// instance with `r_i` replaced by `-r_i`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub kind: InstanceKind,
    pub params: Vec<Scalar>,
    pub negate_r: Vec<bool>,
    shape: BoxShape,
}

/// Construct one of the four built-in instances. Parameter arities:
/// `kashaev3d` and `sholo2d` take none, `cubic1d` takes three, `box2d` two.
pub fn make_instance(id: &str, params: &[Scalar]) -> Result<Instance, GenError> {
    let (kind, arity, shape) = match id {
        "kashaev3d" => (InstanceKind::Kashaev3d, 0, vec![1, 1, 1]),
        "sholo2d" => (InstanceKind::Sholo2d, 0, vec![1, 1]),
        "cubic1d" => (InstanceKind::Cubic1d, 3, vec![3]),
        "box2d" => (InstanceKind::Box2d, 2, vec![1, 2]),
        other => return Err(GenError::UnknownInstance(other.to_string())),
    };
    if params.len() != arity {
        return Err(GenError::BadParams(id.to_string(), arity));
    }
    let d = shape.len();
    Ok(Instance {
        kind,
        params: params.to_vec(),
        negate_r: vec![false; d],
        shape: BoxShape(shape),
    })
}

impl Instance {
    pub fn d(&self) -> usize {
        self.shape.d()
    }

    pub fn a(&self) -> &[i64] {
        &self.shape.0
    }

    pub fn with_negated_r(&self, axis: usize) -> Instance {
        let mut out = self.clone();
        out.negate_r[axis] = !out.negate_r[axis];
        out
    }

    fn p(&self, i: usize) -> &Scalar {
        &self.params[i]
    }

    /// The defining polynomial on one box of values.
    pub fn f(&self, v: &BoxVals) -> Scalar {
        match self.kind {
            InstanceKind::Kashaev3d => {
                let corners: [Scalar; 8] = std::array::from_fn(|b| {
                    v.z(&[b as i64 & 1, b as i64 >> 1 & 1, b as i64 >> 2 & 1])
                        .clone()
                });
                crate::kashaev::kashaev_k(&corners)
            }
            InstanceKind::Sholo2d => {
                let (z00, z10, z01, z11) = (v.z(&[0, 0]), v.z(&[1, 0]), v.z(&[0, 1]), v.z(&[1, 1]));
                let two = Scalar::from_int(2);
                let six = Scalar::from_int(6);
                let sq = &(&(&z00.square() + &z10.square()) + &z01.square()) + &z11.square();
                let adj = &(&(z00 * z10) + &(z10 * z11)) + &(&(z11 * z01) + &(z01 * z00));
                let diag = &(z00 * z11) + &(z10 * z01);
                &(&sq - &(&two * &adj)) - &(&six * &diag)
            }
            InstanceKind::Cubic1d => {
                let (z0, z1, z2, z3) = (v.z(&[0]), v.z(&[1]), v.z(&[2]), v.z(&[3]));
                let (a1, a2, a3) = (self.p(0), self.p(1), self.p(2));
                let t1 = &(z0 * z3).square() * &Scalar::one();
                let t2 = a1 * &(z1 * z2).square();
                let t3 = &(a2 * &(z0 * z1)) * &(z2 * z3);
                let t4 = a3 * &(&(z0 * &(z2 * &z2.square())) + &(&(z1 * &z1.square()) * z3));
                &(&(&t1 + &t2) + &t3) + &t4
            }
            InstanceKind::Box2d => {
                let z = |i: i64, j: i64| v.z(&[i, j]);
                let (a1, a2) = (self.p(0), self.p(1));
                let quarter = Scalar::from_ratio(1, 4);
                let coef = &(&(a2 * a2) - &(a1 * a1)) * &quarter;
                let two = Scalar::from_int(2);
                let t1 = (z(0, 0) * z(1, 2)).square();
                let t2 = (z(1, 0) * z(0, 2)).square();
                let t3 = &coef * &(z(0, 1) * z(1, 1)).square();
                let t4 = a1 * &(&(&(z(0, 0) * z(0, 2)) * &z(1, 1).square())
                    + &(&(z(1, 0) * z(1, 2)) * &z(0, 1).square()));
                let t5 = &two * &(&(z(0, 0) * z(1, 0)) * &(z(0, 2) * z(1, 2)));
                let t6 = a2 * &(&(&(z(0, 0) * z(1, 2)) * &(z(0, 1) * z(1, 1)))
                    + &(&(z(1, 0) * z(0, 2)) * &(z(0, 1) * z(1, 1))));
                &(&(&(&t1 + &t2) + &t3) - &t4) - &(&t5 + &t6)
            }
        }
    }

    /// Coefficient of the squared top-corner variable (does not read the top
    /// slot).
    pub fn g(&self, v: &BoxVals) -> Scalar {
        match self.kind {
            InstanceKind::Kashaev3d => v.z(&[0, 0, 0]).square(),
            InstanceKind::Sholo2d => Scalar::one(),
            InstanceKind::Cubic1d => v.z(&[0]).square(),
            InstanceKind::Box2d => v.z(&[0, 0]).square(),
        }
    }

    /// Coefficient of the linear top-corner variable (does not read the top
    /// slot).
    pub fn h(&self, v: &BoxVals) -> Scalar {
        let two = Scalar::from_int(2);
        match self.kind {
            InstanceKind::Kashaev3d => {
                let z = |i: i64, j: i64, k: i64| v.z(&[i, j, k]);
                let sum = &(&(z(1, 0, 0) * z(0, 1, 1)) + &(z(0, 1, 0) * z(1, 0, 1)))
                    + &(z(0, 0, 1) * z(1, 1, 0));
                let four = Scalar::from_int(4);
                -&(&(&(&two * z(0, 0, 0)) * &sum)
                    + &(&four * &(&(z(1, 0, 0) * z(0, 1, 0)) * z(0, 0, 1))))
            }
            InstanceKind::Sholo2d => {
                let three = Scalar::from_int(3);
                -&(&two * &(&(v.z(&[1, 0]) + v.z(&[0, 1])) + &(&three * v.z(&[0, 0]))))
            }
            InstanceKind::Cubic1d => {
                let (z0, z1, z2) = (v.z(&[0]), v.z(&[1]), v.z(&[2]));
                &(&(self.p(1) * z0) * &(z1 * z2)) + &(self.p(2) * &(z1 * &z1.square()))
            }
            InstanceKind::Box2d => {
                let z = |i: i64, j: i64| v.z(&[i, j]);
                let (a1, a2) = (self.p(0), self.p(1));
                -&(&(&(a1 * z(1, 0)) * &z(0, 1).square())
                    + &(&(&(&two * z(0, 0)) * &(z(1, 0) * z(0, 2)))
                        + &(&(a2 * z(0, 0)) * &(z(0, 1) * z(1, 1)))))
            }
        }
    }

    /// `∂f/∂z_a = 2 g z_a + h`; reads the top slot.
    pub fn dfdza(&self, v: &BoxVals) -> Scalar {
        let top = v.z(self.a());
        &(&(&Scalar::from_int(2) * &self.g(v)) * top) + &self.h(v)
    }

    /// The discriminant factor `f_{axis+1}` on values of an `[a - 1_axis]`
    /// box.
    pub fn face_poly(&self, axis: usize, v: &BoxVals) -> Scalar {
        match (self.kind, axis) {
            (InstanceKind::Kashaev3d, 0) => {
                let z = |j: i64, k: i64| v.z(&[0, j, k]);
                &Scalar::from_int(16) * &(&(z(0, 0) * z(1, 1)) + &(z(1, 0) * z(0, 1)))
            }
            (InstanceKind::Kashaev3d, 1) => {
                let z = |i: i64, k: i64| v.z(&[i, 0, k]);
                &(z(0, 0) * z(1, 1)) + &(z(1, 0) * z(0, 1))
            }
            (InstanceKind::Kashaev3d, _) => {
                let z = |i: i64, j: i64| v.z(&[i, j, 0]);
                &(z(0, 0) * z(1, 1)) + &(z(1, 0) * z(0, 1))
            }
            (InstanceKind::Sholo2d, 0) => {
                &Scalar::from_int(32) * &(v.z(&[0, 0]) + v.z(&[0, 1]))
            }
            (InstanceKind::Sholo2d, _) => v.z(&[0, 0]) + v.z(&[1, 0]),
            (InstanceKind::Cubic1d, _) => {
                let (z0, z1, z2) = (v.z(&[0]), v.z(&[1]), v.z(&[2]));
                let (a1, a2, a3) = (self.p(0), self.p(1), self.p(2));
                let z1sq = z1.square();
                let z1cu = z1 * &z1sq;
                let four = Scalar::from_int(4);
                let t1 = &(a3 * a3) * &z1cu.square();
                let t2 = &(&(&Scalar::from_int(2) * &(a2 * a3)) * &(z0 * z2)) * &(&z1sq * &z1sq);
                let t3 = &(&(&(a2 * a2) - &(&four * a1)) * &(z0 * z2).square()) * &z1sq;
                let t4 = &(&(&four * a3) * &(z0 * &z0.square())) * &(z2 * &z2.square());
                &(&(&t1 + &t2) + &t3) - &t4
            }
            (InstanceKind::Box2d, 0) => {
                let z = |j: i64| v.z(&[0, j]);
                &(self.p(0) * &z(1).square()) + &(&Scalar::from_int(4) * &(z(0) * z(2)))
            }
            (InstanceKind::Box2d, _) => {
                let z = |i: i64, j: i64| v.z(&[i, j]);
                let (a1, a2) = (self.p(0), self.p(1));
                &(a1 * &(&(z(0, 0) * z(1, 1)).square() + &(z(0, 1) * z(1, 0)).square()))
                    + &(&(&Scalar::from_int(2) * a2)
                        * &(&(z(0, 0) * z(0, 1)) * &(z(1, 0) * z(1, 1))))
            }
        }
    }

    /// The adapted face update `r_{axis+1}` from the lower box values (all
    /// of `[a]` except the top corner) and the `d` face values at the base.
    pub fn r(&self, axis: usize, v: &BoxVals, faces: &[Scalar]) -> Result<Scalar, GenError> {
        let raw = match (self.kind, axis) {
            (InstanceKind::Kashaev3d, 0) => {
                let z0 = v.z(&[0, 0, 0]);
                if z0.is_zero() {
                    return Err(GenError::ZeroDenominator(vec![0, 0, 0]));
                }
                let four = Scalar::from_int(4);
                &(&(&four * &(&faces[1] * &faces[2])) + &(&faces[0] * v.z(&[1, 0, 0]))) / z0
            }
            (InstanceKind::Kashaev3d, 1) => {
                let z0 = v.z(&[0, 0, 0]);
                if z0.is_zero() {
                    return Err(GenError::ZeroDenominator(vec![0, 0, 0]));
                }
                let four = Scalar::from_int(4);
                &(&(&faces[0] * &faces[2]) + &(&four * &(&faces[1] * v.z(&[0, 1, 0]))))
                    / &(&four * z0)
            }
            (InstanceKind::Kashaev3d, _) => {
                let z0 = v.z(&[0, 0, 0]);
                if z0.is_zero() {
                    return Err(GenError::ZeroDenominator(vec![0, 0, 0]));
                }
                let four = Scalar::from_int(4);
                &(&(&faces[0] * &faces[1]) + &(&four * &(&faces[2] * v.z(&[0, 0, 1]))))
                    / &(&four * z0)
            }
            (InstanceKind::Sholo2d, 0) => &faces[0] + &(&Scalar::from_int(8) * &faces[1]),
            (InstanceKind::Sholo2d, _) => {
                &faces[1] + &(&Scalar::from_ratio(1, 4) * &faces[0])
            }
            (InstanceKind::Cubic1d, _) => {
                let (z0, z1, z2) = (v.z(&[0]), v.z(&[1]), v.z(&[2]));
                let (a2, a3) = (self.p(1), self.p(2));
                if z0.is_zero() {
                    return Err(GenError::ZeroDenominator(vec![0]));
                }
                let w = &faces[0];
                let z1cu = z1 * &z1.square();
                let t1 = &(a3 * a3) * &z1cu.square();
                let t2 = &(&(a2 * a3) * &(z0 * z2)) * &(&z1.square() * &z1.square());
                let t3 = &(&(&Scalar::from_int(2) * a3) * &(z0 * &z0.square()))
                    * &(z2 * &z2.square());
                let t4 = w.square();
                let t5 = &(-&(&(&Scalar::from_int(2) * a3) * &z1cu)
                    - &(&(a2 * z0) * &(z1 * z2)))
                    * w;
                &(&(&(&(&t1 + &t2) + &t3) + &t4) + &t5)
                    / &(&Scalar::from_int(2) * &(z0 * &z0.square()))
            }
            (InstanceKind::Box2d, 0) => {
                let z00 = v.z(&[0, 0]);
                if z00.is_zero() {
                    return Err(GenError::ZeroDenominator(vec![0, 0]));
                }
                &(&(v.z(&[1, 0]) * &faces[0]) + &faces[1]) / z00
            }
            (InstanceKind::Box2d, _) => {
                let z = |i: i64, j: i64| v.z(&[i, j]);
                let (a1, a2) = (self.p(0), self.p(1));
                if z(0, 0).is_zero() {
                    return Err(GenError::ZeroDenominator(vec![0, 0]));
                }
                let t1 = &(z(0, 1) * &(&(a1 * &(z(0, 1) * z(1, 0))) + &(a2 * &(z(0, 0) * z(1, 1)))))
                    * &faces[0];
                let t2 = &(&(a1 * &z(0, 1).square())
                    + &(&Scalar::from_int(2) * &(z(0, 0) * z(0, 2))))
                    * &faces[1];
                &(&t1 + &t2) / &(&Scalar::from_int(2) * &z(0, 0).square())
            }
        };
        Ok(if self.negate_r[axis] { -&raw } else { raw })
    }

    /// Propagation sign for orientation `alpha` in {-1, +1}^d, including the
    /// flips induced by negated `r_i`.
    pub fn gamma(&self, alpha: &[i8]) -> i8 {
        let all_plus = alpha.iter().all(|&s| s > 0);
        let all_minus = alpha.iter().all(|&s| s < 0);
        let base = match self.kind {
            InstanceKind::Kashaev3d | InstanceKind::Box2d => {
                if all_plus || all_minus {
                    1
                } else {
                    -1
                }
            }
            InstanceKind::Sholo2d => {
                if all_plus {
                    1
                } else {
                    -1
                }
            }
            InstanceKind::Cubic1d => 1,
        };
        let mut sign = base;
        for (i, &neg) in self.negate_r.iter().enumerate() {
            if neg && alpha[i] < 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// Product of the propagation signs over all 2^d orientations; the sign
    /// appearing in the coherence identity.
    pub fn gamma_product(&self) -> i8 {
        let d = self.d();
        let mut prod = 1i8;
        for mask in 0..1u32 << d {
            let alpha: Vec<i8> = (0..d)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            prod *= self.gamma(&alpha);
        }
        prod
    }
}

/// Grid values: vertices on a window of Z^d plus face values keyed by
/// (axis, base) for boxes of shape `a - 1_axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub lo: PointD,
    pub hi: PointD,
    pub verts: BTreeMap<PointD, Scalar>,
    pub faces: BTreeMap<(usize, PointD), Scalar>,
}

impl GridField {
    pub fn vertex(&self, p: &[i64]) -> Result<&Scalar, GenError> {
        self.verts
            .get(p)
            .ok_or_else(|| GenError::MissingValue(p.to_vec()))
    }

    pub fn face(&self, axis: usize, base: &[i64]) -> Result<&Scalar, GenError> {
        self.faces
            .get(&(axis, base.to_vec()))
            .ok_or_else(|| GenError::MissingFace(axis, base.to_vec()))
    }

    pub fn mode(&self) -> NumericMode {
        if self.verts.values().chain(self.faces.values()).all(|v| v.is_exact()) {
            NumericMode::Exact
        } else {
            NumericMode::Float
        }
    }
}

fn face_dims(a: &[i64], axis: usize) -> Vec<i64> {
    let mut dims = a.to_vec();
    dims[axis] -= 1;
    dims
}

/// Collect the values of the box at `base` with the given per-axis
/// orientation (`+1` or `-1`), shaped `dims`.
fn oriented_box(
    field: &GridField,
    base: &[i64],
    orient: &[i8],
    dims: &[i64],
) -> Result<BoxVals, GenError> {
    let mut vals = BTreeMap::new();
    for idx in box_points(dims) {
        let p: PointD = base
            .iter()
            .zip(&idx)
            .zip(orient)
            .map(|((b, i), o)| b + i * *o as i64)
            .collect();
        vals.insert(idx, field.vertex(&p)?.clone());
    }
    Ok(BoxVals::new(vals))
}

/// Lower box at `base`: all points of `base + [a]` except the top corner.
fn lower_box(field: &GridField, inst: &Instance, base: &[i64]) -> Result<BoxVals, GenError> {
    let mut vals = BTreeMap::new();
    for idx in box_points(inst.a()) {
        if idx == inst.a() {
            continue;
        }
        let p: PointD = base.iter().zip(&idx).map(|(b, i)| b + i).collect();
        vals.insert(idx, field.vertex(&p)?.clone());
    }
    Ok(BoxVals::new(vals))
}

fn full_box(field: &GridField, inst: &Instance, base: &[i64]) -> Result<BoxVals, GenError> {
    let mut vals = BTreeMap::new();
    for idx in box_points(inst.a()) {
        let p: PointD = base.iter().zip(&idx).map(|(b, i)| b + i).collect();
        vals.insert(idx, field.vertex(&p)?.clone());
    }
    Ok(BoxVals::new(vals))
}

/// One recurrence step on the box at `base`: the new top vertex
/// `(-h + ∏ faces) / (2g)` and the `d` new face values `r_i`.
pub fn gen_step(
    inst: &Instance,
    lower: &BoxVals,
    faces: &[Scalar],
    base: &[i64],
) -> Result<(Scalar, Vec<Scalar>), GenError> {
    let g = inst.g(lower);
    if g.is_zero() {
        return Err(GenError::ZeroG(base.to_vec()));
    }
    let prod = faces.iter().fold(Scalar::one(), |acc, f| &acc * f);
    let top = &(&prod - &inst.h(lower)) / &(&Scalar::from_int(2) * &g);
    let mut new_faces = Vec::with_capacity(inst.d());
    for axis in 0..inst.d() {
        new_faces.push(inst.r(axis, lower, faces)?);
    }
    Ok((top, new_faces))
}

/// Sweep the recurrence over the window `[lo, hi]` from seeded boundary
/// data: vertex values wherever some coordinate is below `lo + a`, and face
/// values on the base walls. `wall_face` either supplies an explicit value
/// or, given the face polynomial value, defaults to its principal root.
pub fn sweep(
    inst: &Instance,
    lo: &[i64],
    hi: &[i64],
    mut vertex_seed: impl FnMut(&[i64]) -> Scalar,
    mut wall_face: impl FnMut(usize, &[i64], &Scalar) -> Result<Scalar, GenError>,
) -> Result<GridField, GenError> {
    let d = inst.d();
    let a = inst.a().to_vec();
    let mut field = GridField {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        verts: BTreeMap::new(),
        faces: BTreeMap::new(),
    };
    for p in points_between(lo, hi) {
        if (0..d).any(|i| p[i] < lo[i] + a[i]) {
            field.verts.insert(p.clone(), vertex_seed(&p));
        }
    }
    for axis in 0..d {
        let dims = face_dims(&a, axis);
        let face_hi: Vec<i64> = (0..d)
            .map(|j| if j == axis { lo[j] } else { hi[j] - dims[j] })
            .collect();
        let face_lo: Vec<i64> = lo.to_vec();
        for base in points_between(&face_lo, &face_hi) {
            let vals = oriented_box(&field, &base, &vec![1; d], &dims)?;
            let poly = inst.face_poly(axis, &vals);
            let value = wall_face(axis, &base, &poly)?;
            field.faces.insert((axis, base), value);
        }
    }
    let top_hi: Vec<i64> = (0..d).map(|j| hi[j] - a[j]).collect();
    if (0..d).any(|j| top_hi[j] < lo[j]) {
        return Ok(field);
    }
    for base in points_between(lo, &top_hi) {
        let lower = lower_box(&field, inst, &base)?;
        let faces: Vec<Scalar> = (0..d)
            .map(|axis| field.face(axis, &base).cloned())
            .collect::<Result<_, _>>()?;
        let (top, new_faces) = gen_step(inst, &lower, &faces, &base)?;
        let top_p: PointD = base.iter().zip(&a).map(|(b, ai)| b + ai).collect();
        field.verts.insert(top_p, top);
        for (axis, value) in new_faces.into_iter().enumerate() {
            let mut fb = base.clone();
            fb[axis] += 1;
            field.faces.insert((axis, fb), value);
        }
    }
    Ok(field)
}

/// Sweep taking the principal root on every wall face.
pub fn sweep_plus_roots(
    inst: &Instance,
    lo: &[i64],
    hi: &[i64],
    vertex_seed: impl FnMut(&[i64]) -> Scalar,
) -> Result<GridField, GenError> {
    sweep(inst, lo, hi, vertex_seed, |_, _, poly| {
        Ok(poly.sqrt_principal()?)
    })
}

/// Verify the defining polynomial, the face condition, and both recurrence
/// equations on every complete box of the field.
pub fn check_gen(inst: &Instance, field: &GridField, ctx: &ToleranceContext) -> Report {
    let d = inst.d();
    let a = inst.a().to_vec();
    let mut findings = Vec::new();

    let top_hi: Vec<i64> = (0..d).map(|j| field.hi[j] - a[j]).collect();
    let bases: Vec<PointD> = if (0..d).all(|j| top_hi[j] >= field.lo[j]) {
        points_between(&field.lo, &top_hi)
    } else {
        Vec::new()
    };
    let box_findings: Vec<Vec<Finding>> = exec::map_collect(&bases, |base| {
        let mut out = Vec::new();
        let Ok(full) = full_box(field, inst, base) else {
            return out;
        };
        let fval = inst.f(&full);
        if !fval.approx_eq_coerced(&Scalar::zero(), ctx) {
            // compare the two quadratic sides for a scale-aware verdict
            let g = inst.g(&full);
            let top = field.vertex(&top_point(base, &a)).unwrap();
            let lhs = &(&g * &top.square()) + &(&inst.h(&full) * top);
            let rhs = &lhs - &fval;
            if !lhs.approx_eq_coerced(&rhs, ctx) {
                out.push(Finding::mismatch(
                    "f-residual",
                    format!("box{base:?}"),
                    lhs,
                    rhs,
                ));
            }
        }
        // recurrence equations when the incident faces are stored
        let lower = lower_box(field, inst, base).expect("full box implies lower box");
        let faces: Option<Vec<Scalar>> = (0..d)
            .map(|axis| field.face(axis, base).ok().cloned())
            .collect();
        if let Some(faces) = faces {
            let g = inst.g(&lower);
            if !g.is_zero() {
                let top = field.vertex(&top_point(base, &a)).unwrap();
                let lhs = &(&(&Scalar::from_int(2) * &g) * top) + &inst.h(&lower);
                let rhs = faces.iter().fold(Scalar::one(), |acc, f| &acc * f);
                if !lhs.approx_eq_coerced(&rhs, ctx) {
                    out.push(Finding::mismatch(
                        "gen-top",
                        format!("box{base:?}"),
                        lhs,
                        rhs,
                    ));
                }
                for axis in 0..d {
                    let mut fb = base.clone();
                    fb[axis] += 1;
                    if let Ok(stored) = field.face(axis, &fb) {
                        if let Ok(expected) = inst.r(axis, &lower, &faces) {
                            if !stored.approx_eq_coerced(&expected, ctx) {
                                out.push(Finding::mismatch(
                                    &format!("gen-face{}", axis + 1),
                                    format!("box{base:?}"),
                                    stored.clone(),
                                    expected,
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    });
    findings.extend(box_findings.into_iter().flatten());

    let face_items: Vec<(usize, PointD, Scalar)> = field
        .faces
        .iter()
        .map(|((axis, base), v)| (*axis, base.clone(), v.clone()))
        .collect();
    let face_findings: Vec<Option<Finding>> = exec::map_collect(&face_items, |(axis, base, value)| {
        let dims = face_dims(&a, *axis);
        let vals = oriented_box(field, base, &vec![1; d], &dims).ok()?;
        let poly = inst.face_poly(*axis, &vals);
        let sq = value.square();
        (!sq.approx_eq_coerced(&poly, ctx)).then(|| {
            Finding::mismatch(
                "face-square",
                format!("face(axis{},{base:?})", axis + 1),
                sq,
                poly,
            )
        })
    });
    findings.extend(face_findings.into_iter().flatten());
    Report::new(field.mode(), findings)
}

fn top_point(base: &[i64], a: &[i64]) -> PointD {
    base.iter().zip(a).map(|(b, ai)| b + ai).collect()
}

/// Coherence data at one vertex of a generalized field.
#[derive(Debug, Clone)]
pub struct GenCoherence {
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub even_product: Scalar,
    pub odd_product: Scalar,
    pub ok: bool,
    pub split_ok: bool,
}

/// The generalized coherence identity at `v`: the product of the top-corner
/// derivative over all `2^d` boxes containing `v + [a - 1]` equals the
/// gamma product times the product of the `f_i` over the shifted face boxes.
/// Also evaluates the even/odd split form.
pub fn check_gen_coherence(
    inst: &Instance,
    field: &GridField,
    v: &[i64],
    ctx: &ToleranceContext,
) -> Result<GenCoherence, GenError> {
    let d = inst.d();
    let a = inst.a().to_vec();
    let mut even = Scalar::one();
    let mut odd = Scalar::one();
    for mask in 0..1u32 << d {
        // alpha in {-1, 0}^d marks which axes look backward
        let alpha: Vec<i64> = (0..d)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 0 })
            .collect();
        let base: PointD = (0..d)
            .map(|i| v[i] - (a[i] - 1) * alpha[i])
            .collect();
        let orient: Vec<i8> = alpha.iter().map(|&x| (1 + 2 * x) as i8).collect();
        let vals = oriented_box(field, &base, &orient, &a)
            .map_err(|_| GenError::NeighborhoodIncomplete(v.to_vec()))?;
        let deriv = inst.dfdza(&vals);
        if alpha.iter().filter(|&&x| x < 0).count() % 2 == 0 {
            even = &even * &deriv;
        } else {
            odd = &odd * &deriv;
        }
    }
    let lhs = &even * &odd;
    let mut rhs = Scalar::one();
    for axis in 0..d {
        let dims = face_dims(&a, axis);
        for mask in 0..1u32 << d {
            let beta: Vec<i64> = (0..d)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 0 })
                .collect();
            if beta[axis] != 0 {
                continue;
            }
            let base: PointD = (0..d).map(|i| v[i] + beta[i]).collect();
            let vals = oriented_box(field, &base, &vec![1; d], &dims)
                .map_err(|_| GenError::NeighborhoodIncomplete(v.to_vec()))?;
            rhs = &rhs * &inst.face_poly(axis, &vals);
        }
    }
    if inst.gamma_product() < 0 {
        rhs = -&rhs;
    }
    let ok = lhs.approx_eq_coerced(&rhs, ctx);
    // split form: even = gamma_product * odd
    let signed_odd = if inst.gamma_product() < 0 { -&odd } else { odd.clone() };
    let split_ok = even.approx_eq_coerced(&signed_odd, ctx);
    Ok(GenCoherence {
        lhs,
        rhs,
        even_product: even,
        odd_product: odd,
        ok,
        split_ok,
    })
}

/// Empirically derive the propagation sign for every orientation from a
/// swept field and compare against the hardcoded table. Returns the list of
/// disagreeing orientations (empty on success).
pub fn verify_propagation_signs(
    inst: &Instance,
    field: &GridField,
    v: &[i64],
    ctx: &ToleranceContext,
) -> Result<Vec<Vec<i8>>, GenError> {
    let d = inst.d();
    let a = inst.a().to_vec();
    let mut bad = Vec::new();
    for mask in 0..1u32 << d {
        let orient: Vec<i8> = (0..d)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let vals = oriented_box(field, v, &orient, &a)?;
        let deriv = inst.dfdza(&vals);
        let mut prod = Scalar::one();
        for axis in 0..d {
            let dims = face_dims(&a, axis);
            // canonical (lowest-corner) base of the oriented face box
            let base: PointD = (0..d)
                .map(|i| v[i] + (orient[i] as i64).min(0) * dims[i])
                .collect();
            prod = &prod * field.face(axis, &base)?;
        }
        if prod.is_zero() {
            return Err(GenError::ZeroDenominator(v.to_vec()));
        }
        let ratio = &deriv / &prod;
        let expect = Scalar::from_f64(inst.gamma(&orient) as f64);
        if !ratio.to_float().approx_eq_coerced(&expect, ctx) {
            bad.push(orient);
        }
    }
    Ok(bad)
}

#[derive(Serialize, Deserialize)]
struct GridVertexEntry {
    p: PointD,
    v: Scalar,
}

#[derive(Serialize, Deserialize)]
struct GridFaceEntry {
    axis: usize,
    base: PointD,
    v: Scalar,
}

/// JSON exchange format: the lattice field layout plus the `d`/`a` header.
#[derive(Serialize, Deserialize)]
struct GridJson {
    d: usize,
    a: Vec<i64>,
    window: [PointD; 2],
    vertices: Vec<GridVertexEntry>,
    #[serde(default)]
    faces: Vec<GridFaceEntry>,
}

impl GridField {
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        serde_json::to_value(GridJson {
            d: inst.d(),
            a: inst.a().to_vec(),
            window: [self.lo.clone(), self.hi.clone()],
            vertices: self
                .verts
                .iter()
                .map(|(p, v)| GridVertexEntry {
                    p: p.clone(),
                    v: v.clone(),
                })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|((axis, base), v)| GridFaceEntry {
                    axis: axis + 1,
                    base: base.clone(),
                    v: v.clone(),
                })
                .collect(),
        })
        .expect("grid serialization")
    }

    pub fn from_json(inst: &Instance, value: &serde_json::Value) -> Result<Self, String> {
        let raw: GridJson = serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        if raw.d != inst.d() || raw.a != inst.a() {
            return Err(format!(
                "grid header (d={}, a={:?}) does not match instance (d={}, a={:?})",
                raw.d,
                raw.a,
                inst.d(),
                inst.a()
            ));
        }
        let verts = raw.vertices.into_iter().map(|e| (e.p, e.v)).collect();
        let faces = raw
            .faces
            .into_iter()
            .map(|e| {
                if e.axis == 0 || e.axis > raw.d {
                    Err(format!("face axis {} out of range", e.axis))
                } else {
                    Ok(((e.axis - 1, e.base), e.v))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(GridField {
            lo: raw.window[0].clone(),
            hi: raw.window[1].clone(),
            verts,
            faces,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational_stream(seed: i64) -> impl FnMut() -> Scalar {
        let mut state = seed;
        move || {
            state = state.wrapping_mul(6364136223).wrapping_add(1442695);
            let p = state.rem_euclid(9) - 4;
            let q = state.rem_euclid(3) + 1;
            Scalar::from_ratio(if p == 0 { 5 } else { p }, q)
        }
    }

    fn all_instances() -> Vec<Instance> {
        vec![
            make_instance("kashaev3d", &[]).unwrap(),
            make_instance("sholo2d", &[]).unwrap(),
            make_instance(
                "cubic1d",
                &[Scalar::zero(), Scalar::zero(), Scalar::from_int(-4)],
            )
            .unwrap(),
            make_instance("box2d", &[Scalar::from_int(4), Scalar::from_int(4)]).unwrap(),
        ]
    }

    fn random_box(inst: &Instance, next: &mut impl FnMut() -> Scalar) -> BoxVals {
        let mut vals = BTreeMap::new();
        for idx in box_points(inst.a()) {
            vals.insert(idx, next());
        }
        BoxVals::new(vals)
    }

    #[test]
    fn make_instance_arities() {
        assert!(make_instance("cubic1d", &[]).is_err());
        assert!(make_instance("box2d", &[Scalar::one()]).is_err());
        assert!(make_instance("nope", &[]).is_err());
    }

    /// D = f_1 ... f_d as an exact polynomial identity: evaluate
    /// (df/dz_a)^2 - 4 f g against the product of the face polynomials at
    /// random rational points.
    #[test]
    fn discriminant_factorization_identity() {
        for inst in all_instances() {
            let mut next = rational_stream(17 + inst.d() as i64);
            for _ in 0..40 {
                let full = random_box(&inst, &mut next);
                let deriv = inst.dfdza(&full);
                let lhs = &deriv.square()
                    - &(&(&Scalar::from_int(4) * &inst.f(&full)) * &inst.g(&full));
                let mut rhs = Scalar::one();
                for axis in 0..inst.d() {
                    let dims = face_dims(inst.a(), axis);
                    let mut sub = BTreeMap::new();
                    for idx in box_points(&dims) {
                        sub.insert(idx.clone(), full.z(&idx).clone());
                    }
                    rhs = &rhs * &inst.face_poly(axis, &BoxVals::new(sub));
                }
                assert_eq!(lhs, rhs, "instance {:?}", inst.kind);
            }
        }
    }

    /// Condition (1): f and every f_i are invariant under the index flips.
    #[test]
    fn flip_invariance() {
        for inst in all_instances() {
            let mut next = rational_stream(5);
            for _ in 0..64 {
                let full = random_box(&inst, &mut next);
                let f0 = inst.f(&full);
                for axis in 0..inst.d() {
                    let flipped = BoxVals::new(
                        box_points(inst.a())
                            .into_iter()
                            .map(|idx| {
                                let mut src = idx.clone();
                                src[axis] = inst.a()[axis] - idx[axis];
                                (idx, full.z(&src).clone())
                            })
                            .collect(),
                    );
                    assert_eq!(inst.f(&flipped), f0, "pi_{{a,{axis}}} on f");
                }
                for i in 0..inst.d() {
                    let dims = face_dims(inst.a(), i);
                    let sub = BoxVals::new(
                        box_points(&dims)
                            .into_iter()
                            .map(|idx| (idx.clone(), full.z(&idx).clone()))
                            .collect(),
                    );
                    let fi0 = inst.face_poly(i, &sub);
                    for axis in 0..inst.d() {
                        let flipped = BoxVals::new(
                            box_points(&dims)
                                .into_iter()
                                .map(|idx| {
                                    let mut src = idx.clone();
                                    src[axis] = dims[axis] - idx[axis];
                                    (idx, sub.z(&src).clone())
                                })
                                .collect(),
                        );
                        assert_eq!(inst.face_poly(i, &flipped), fi0, "pi on f_{i}");
                    }
                }
            }
        }
    }

    #[test]
    fn cubic1d_discriminant_example() {
        // (0, 0, -4): D = 16 z1^6 + 16 z0^3 z2^3
        let inst = make_instance(
            "cubic1d",
            &[Scalar::zero(), Scalar::zero(), Scalar::from_int(-4)],
        )
        .unwrap();
        let vals = BoxVals::new(
            [
                (vec![0], Scalar::from_int(2)),
                (vec![1], Scalar::from_int(3)),
                (vec![2], Scalar::from_int(5)),
            ]
            .into(),
        );
        let d = inst.face_poly(0, &vals);
        let expect = Scalar::from_int(16 * (729 + 8 * 125));
        assert_eq!(d, expect);
    }

    #[test]
    fn sholo_f1_f2_product_shape() {
        let inst = make_instance("sholo2d", &[]).unwrap();
        let vals = BoxVals::new(
            [
                (vec![0, 0], Scalar::from_int(1)),
                (vec![0, 1], Scalar::from_int(2)),
            ]
            .into(),
        );
        assert_eq!(inst.face_poly(0, &vals), Scalar::from_int(96));
        let vals2 = BoxVals::new(
            [
                (vec![0, 0], Scalar::from_int(1)),
                (vec![1, 0], Scalar::from_int(2)),
            ]
            .into(),
        );
        assert_eq!(inst.face_poly(1, &vals2), Scalar::from_int(3));
    }

    #[test]
    fn gen_step_matches_sholo_closed_form() {
        // z00 = z10 = z01 = 1 with instance-scaled faces: the top value is
        // the positive root 5 + 4*sqrt(2)
        let inst = make_instance("sholo2d", &[]).unwrap();
        let lower = BoxVals::new(
            [
                (vec![0, 0], Scalar::from_f64(1.0)),
                (vec![1, 0], Scalar::from_f64(1.0)),
                (vec![0, 1], Scalar::from_f64(1.0)),
            ]
            .into(),
        );
        let f1 = 8.0f64; // sqrt(32 * 2)
        let f2 = 2.0f64.sqrt();
        let (top, _) = gen_step(
            &inst,
            &lower,
            &[Scalar::from_f64(f1), Scalar::from_f64(f2)],
            &[0, 0],
        )
        .unwrap();
        let ctx = ToleranceContext::default();
        assert!(top
            .approx_eq(&Scalar::from_f64(5.0 + 4.0 * 2.0f64.sqrt()), &ctx)
            .unwrap());
    }

    #[test]
    fn cubic1d_step_example() {
        // (0,0,-4) at z0 = z1 = z2 = 1 with w1 = sqrt(32): z3 = 2 + 2 sqrt(2)
        let inst = make_instance(
            "cubic1d",
            &[Scalar::zero(), Scalar::zero(), Scalar::from_int(-4)],
        )
        .unwrap();
        let lower = BoxVals::new(
            [
                (vec![0], Scalar::from_f64(1.0)),
                (vec![1], Scalar::from_f64(1.0)),
                (vec![2], Scalar::from_f64(1.0)),
            ]
            .into(),
        );
        let w1 = Scalar::from_f64(32.0f64.sqrt());
        let (top, _) = gen_step(&inst, &lower, &[w1], &[0]).unwrap();
        let ctx = ToleranceContext::default();
        assert!(top
            .approx_eq(&Scalar::from_f64(2.0 + 2.0 * 2.0f64.sqrt()), &ctx)
            .unwrap());
    }

    #[test]
    fn top_depends_on_face_product_only() {
        for inst in all_instances() {
            if inst.d() < 2 {
                continue;
            }
            let mut next = rational_stream(31);
            let lower = {
                let mut vals = BTreeMap::new();
                for idx in box_points(inst.a()) {
                    if idx != inst.a() {
                        vals.insert(idx, next());
                    }
                }
                BoxVals::new(vals)
            };
            let faces: Vec<Scalar> = (0..inst.d()).map(|_| next()).collect();
            let mut negated = faces.clone();
            negated[0] = -&negated[0];
            negated[1] = -&negated[1];
            let (top, _) = gen_step(&inst, &lower, &faces, &[0, 0, 0]).unwrap();
            let (top2, _) = gen_step(&inst, &lower, &negated, &[0, 0, 0]).unwrap();
            assert_eq!(top, top2);
        }
    }

    #[test]
    fn sweep_and_check_all_instances() {
        let ctx = ToleranceContext::default();
        for inst in all_instances() {
            let d = inst.d();
            let lo = vec![0i64; d];
            let hi: Vec<i64> = inst.a().iter().map(|ai| ai * 2 + 2).collect();
            let mut state = 1i64;
            let field = sweep_plus_roots(&inst, &lo, &hi, |_| {
                state = state.wrapping_mul(48271).rem_euclid(65537);
                Scalar::from_f64(1.0 + (state % 100) as f64 / 100.0)
            })
            .unwrap();
            let report = check_gen(&inst, &field, &ctx);
            assert!(
                report.passed(),
                "instance {:?}: {:?}",
                inst.kind,
                report.findings.first()
            );
        }
    }

    #[test]
    fn coherence_on_plus_root_sweeps() {
        let ctx = ToleranceContext::default();
        for inst in all_instances() {
            let d = inst.d();
            let lo = vec![0i64; d];
            let hi: Vec<i64> = inst.a().iter().map(|ai| ai * 2).collect();
            let mut state = 9i64;
            let field = sweep_plus_roots(&inst, &lo, &hi, |_| {
                state = state.wrapping_mul(48271).rem_euclid(65537);
                Scalar::from_f64(1.0 + (state % 100) as f64 / 100.0)
            })
            .unwrap();
            let v: Vec<i64> = inst.a().to_vec();
            let coh = check_gen_coherence(&inst, &field, &v, &ctx).unwrap();
            assert!(coh.ok, "instance {:?}: {} vs {}", inst.kind, coh.lhs, coh.rhs);
            assert!(coh.split_ok);
        }
    }

    #[test]
    fn propagation_signs_match_tables() {
        let ctx = ToleranceContext::default();
        for inst in all_instances() {
            let d = inst.d();
            let lo = vec![0i64; d];
            let hi: Vec<i64> = inst.a().iter().map(|ai| ai * 2).collect();
            let mut state = 23i64;
            let field = sweep_plus_roots(&inst, &lo, &hi, |_| {
                state = state.wrapping_mul(48271).rem_euclid(65537);
                Scalar::from_f64(1.0 + (state % 90) as f64 / 90.0)
            })
            .unwrap();
            let v: Vec<i64> = inst.a().to_vec();
            let bad = verify_propagation_signs(&inst, &field, &v, &ctx).unwrap();
            assert!(bad.is_empty(), "instance {:?}: {:?}", inst.kind, bad);
        }
    }

    /// Negating one r_i flips exactly the signs with alpha_i = -1, leaving
    /// the gamma product unchanged.
    #[test]
    fn negated_r_flips_signs() {
        let ctx = ToleranceContext::default();
        for base_inst in all_instances() {
            if base_inst.d() < 2 {
                continue;
            }
            let inst = base_inst.with_negated_r(0);
            assert_eq!(inst.gamma_product(), base_inst.gamma_product());
            let d = inst.d();
            let lo = vec![0i64; d];
            let hi: Vec<i64> = inst.a().iter().map(|ai| ai * 2).collect();
            let mut state = 37i64;
            let field = sweep(
                &inst,
                &lo,
                &hi,
                |_| {
                    state = state.wrapping_mul(48271).rem_euclid(65537);
                    Scalar::from_f64(1.0 + (state % 80) as f64 / 80.0)
                },
                |_, _, poly| Ok(poly.sqrt_principal()?),
            )
            .unwrap();
            let v: Vec<i64> = inst.a().to_vec();
            let bad = verify_propagation_signs(&inst, &field, &v, &ctx).unwrap();
            assert!(bad.is_empty(), "instance {:?}: {:?}", inst.kind, bad);
            let coh = check_gen_coherence(&inst, &field, &v, &ctx).unwrap();
            assert!(coh.ok);
        }
    }

    /// The kashaev3d instance reproduces the lattice module's values after
    /// the documented x4 rescaling of the axis-1 faces.
    #[test]
    fn kashaev_instance_cross_module() {
        let ctx = ToleranceContext::default();
        let inst = make_instance("kashaev3d", &[]).unwrap();
        let field = sweep_plus_roots(&inst, &[0, 0, 0], &[3, 3, 3], |_| Scalar::from_f64(1.0))
            .unwrap();
        // all-ones data: heights fill with the same values as the positive
        // Kashaev recurrence
        let s2 = 2.0f64.sqrt();
        assert!(field
            .vertex(&[1, 1, 1])
            .unwrap()
            .approx_eq(&Scalar::from_f64(5.0 + 4.0 * s2), &ctx)
            .unwrap());
        // axis-1 wall faces carry 4x the K-hexahedron value sqrt(2)
        assert!(field
            .face(0, &[0, 0, 0])
            .unwrap()
            .approx_eq(&Scalar::from_f64(4.0 * s2), &ctx)
            .unwrap());
        assert!(field
            .face(1, &[0, 0, 0])
            .unwrap()
            .approx_eq(&Scalar::from_f64(s2), &ctx)
            .unwrap());
    }

    #[test]
    fn grid_json_round_trip() {
        let inst = make_instance("sholo2d", &[]).unwrap();
        let field = sweep_plus_roots(&inst, &[0, 0], &[3, 3], |_| Scalar::from_f64(1.5)).unwrap();
        let json = field.to_json(&inst);
        let back = GridField::from_json(&inst, &json).unwrap();
        assert_eq!(back, field);
    }

    /// Exact rational-face trajectory for cubic1d at (0,0,-4): the seed
    /// (1,1,2) has a perfect-square discriminant, so the whole trajectory is
    /// rational and the coherence identity z0^2 z3 = z_{-1} z2^2 is exact.
    #[test]
    fn cubic1d_exact_trajectory() {
        let inst = make_instance(
            "cubic1d",
            &[Scalar::zero(), Scalar::zero(), Scalar::from_int(-4)],
        )
        .unwrap();
        let seed = [Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(2)];
        // oracle first: the face polynomial at the seed must be a square
        let fvals = BoxVals::new(
            seed.iter()
                .enumerate()
                .map(|(i, v)| (vec![i as i64], v.clone()))
                .collect(),
        );
        let d_val = inst.face_poly(0, &fvals);
        let w = d_val.sqrt_principal().expect("seed gives a square discriminant");
        assert_eq!(w, Scalar::from_int(12));

        let field = sweep(
            &inst,
            &[0],
            &[8],
            |p| seed[p[0] as usize].clone(),
            |_, _, poly| Ok(poly.sqrt_principal()?),
        )
        .unwrap();
        assert_eq!(field.mode(), NumericMode::Exact);
        let ctx = ToleranceContext::default();
        assert!(check_gen(&inst, &field, &ctx).passed());
        // z0^2 z3 = z_{-1} z2^2 at every checkable position, exactly
        for v in 1..=4i64 {
            let z = |i: i64| field.vertex(&[v + i]).unwrap();
            assert_eq!(&z(0).square() * z(3), z(-1) * &z(2).square());
            let coh = check_gen_coherence(&inst, &field, &[v], &ctx).unwrap();
            assert!(coh.ok && coh.split_ok);
            assert_eq!(coh.lhs, coh.rhs);
        }
    }
}
