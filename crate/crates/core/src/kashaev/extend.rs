//! Extension of coherent Kashaev vertex arrays to K-hexahedron arrays, and a
//! deterministic sweep that builds K-hexahedron fields from free wall data.

use super::field::{padd, E};
use super::{
    check_coherence, check_kashaev, khex_step, FaceKey, KHexField3, KashaevError, Point3,
    VertexField3, Window3,
};
use crate::gf2::BitMatrix;
use crate::scalar::{Scalar, ToleranceContext};
use std::collections::{BTreeMap, BTreeSet};

fn psub(p: Point3, q: Point3) -> Point3 {
    [p[0] - q[0], p[1] - q[1], p[2] - q[2]]
}

/// Extend a coherent Kashaev solution to a field satisfying the K-hexahedron
/// equations, with the vertex restriction equal to the input bit-for-bit.
///
/// Square roots are taken only on the initial faces (those not produced by
/// any cube of the support); every later face comes out of the rational
/// K-hexahedron step. Whenever the swept top value lands on the wrong root,
/// the offending cube is repaired by flipping a set of face sign-classes
/// solved for over GF(2), and the sweep restarts.
pub fn extend_to_khex(
    field: &VertexField3,
    ctx: &ToleranceContext,
) -> Result<KHexField3, KashaevError> {
    for (p, v) in field.iter() {
        if v.is_zero() {
            return Err(KashaevError::ZeroVertexValue(*p));
        }
    }
    let kash = check_kashaev(field, ctx);
    if !kash.passed() {
        return Err(KashaevError::NotCoherent(format!(
            "Kashaev equation fails at {}",
            kash.findings[0].location
        )));
    }
    for (p, _) in field.iter() {
        if let Ok(check) = check_coherence(field, *p, ctx) {
            if !check.ok {
                return Err(KashaevError::NotCoherent(format!(
                    "coherence fails at {p:?}"
                )));
            }
        }
    }

    let mut bases = field.complete_cube_bases();
    bases.sort_by_key(|b| (b[0] + b[1] + b[2], *b));
    if bases.is_empty() {
        return Err(KashaevError::InvalidField(
            "no complete cubes to extend across".into(),
        ));
    }
    let cube_set: BTreeSet<Point3> = bases.iter().copied().collect();

    let mut initial: BTreeMap<FaceKey, Scalar> = BTreeMap::new();
    for &b in &bases {
        for a in 0..3usize {
            let key = FaceKey::new(a as u8 + 1, b);
            if !cube_set.contains(&psub(b, E[a])) && !initial.contains_key(&key) {
                let expr = field.face_expression(&key).expect("complete cube");
                if expr.is_zero() {
                    return Err(KashaevError::ZeroFaceExpression(format!("{key:?}")));
                }
                initial.insert(key, expr.sqrt_principal()?);
            }
        }
    }

    let mut class_ids: BTreeMap<(u8, i64, i64), usize> = BTreeMap::new();
    for &b in &bases {
        for a in 0..3usize {
            let class = FaceKey::new(a as u8 + 1, b).class();
            let next = class_ids.len();
            class_ids.entry(class).or_insert(next);
        }
    }

    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > bases.len() + 2 {
            return Err(KashaevError::NonConvergent(
                "repair rounds exceeded cube count".into(),
            ));
        }
        let mut faces = initial.clone();
        let mut mismatch = None;
        for (idx, &b) in bases.iter().enumerate() {
            let corners = field.corners_at(b).expect("complete cube");
            let lower: [Scalar; 7] = std::array::from_fn(|i| corners[i].clone());
            let lf: [Scalar; 3] = std::array::from_fn(|a| {
                faces
                    .get(&FaceKey::new(a as u8 + 1, b))
                    .expect("lower face available by sweep order")
                    .clone()
            });
            let (upper, top) = khex_step(&lower, &lf)?;
            for (a, value) in upper.into_iter().enumerate() {
                faces.insert(FaceKey::new(a as u8 + 1, padd(b, E[a])), value);
            }
            if !top.approx_eq_coerced(&corners[7], ctx) {
                mismatch = Some(idx);
                break;
            }
        }
        let Some(k) = mismatch else {
            return Ok(KHexField3 {
                vertices: field.clone(),
                faces,
            });
        };
        // flip sign classes so that exactly cube k switches root
        let mut system = BitMatrix::zero(0, class_ids.len());
        let mut rhs = Vec::with_capacity(k + 1);
        for (idx, &b) in bases.iter().enumerate().take(k + 1) {
            let row: Vec<usize> = (0..3usize)
                .map(|a| class_ids[&FaceKey::new(a as u8 + 1, b).class()])
                .collect();
            system.push_row(&row);
            rhs.push(idx == k);
        }
        let solution = system.solve(&rhs).ok_or_else(|| {
            KashaevError::NonConvergent(format!(
                "no sign-class assignment repairs cube {:?}",
                bases[k]
            ))
        })?;
        for (key, value) in initial.iter_mut() {
            if solution[class_ids[&key.class()]] {
                *value = -&*value;
            }
        }
    }
}

/// Build a K-hexahedron field on a box window from freely chosen data on the
/// three low walls: the corner edge-lines of vertices and one value per wall
/// face. The remaining wall vertices are solved linearly from the face
/// condition and the interior is filled by the K-hexahedron step, so the
/// result is exact on exact seeds.
///
/// Fails with `ZeroBaseVertex` when a division pivot vanishes; callers with
/// random seeds should retry.
pub fn khex_sweep_from_walls(
    window: Window3,
    mut vertex_seed: impl FnMut(Point3) -> Scalar,
    mut face_seed: impl FnMut(&FaceKey) -> Scalar,
) -> Result<KHexField3, KashaevError> {
    let lo = window.lo;
    let hi = window.hi;
    let mut verts: BTreeMap<Point3, Scalar> = BTreeMap::new();
    let mut faces: BTreeMap<FaceKey, Scalar> = BTreeMap::new();

    let seed = |verts: &mut BTreeMap<Point3, Scalar>, p: Point3, f: &mut dyn FnMut(Point3) -> Scalar| {
        verts.entry(p).or_insert_with(|| f(p));
    };
    // the three edge lines through the low corner
    for x in lo[0]..=hi[0] {
        seed(&mut verts, [x, lo[1], lo[2]], &mut vertex_seed);
    }
    for y in lo[1]..=hi[1] {
        seed(&mut verts, [lo[0], y, lo[2]], &mut vertex_seed);
    }
    for z in lo[2]..=hi[2] {
        seed(&mut verts, [lo[0], lo[1], z], &mut vertex_seed);
    }

    // each wall face determines its far corner from the other three
    let solve_wall = |axis: u8,
                          verts: &mut BTreeMap<Point3, Scalar>,
                          faces: &mut BTreeMap<FaceKey, Scalar>,
                          face_seed: &mut dyn FnMut(&FaceKey) -> Scalar|
     -> Result<(), KashaevError> {
        let (b_ax, c_ax) = FaceKey::new(axis, lo).spans();
        for b in lo[b_ax]..hi[b_ax] {
            for c in lo[c_ax]..hi[c_ax] {
                let mut base = lo;
                base[b_ax] = b;
                base[c_ax] = c;
                let key = FaceKey::new(axis, base);
                let [p0, p1, p2, p3] = key.corners();
                let value = face_seed(&key);
                let x0 = verts.get(&p0).expect("sweep order").clone();
                if x0.is_zero() {
                    return Err(KashaevError::ZeroBaseVertex);
                }
                let x1 = verts.get(&p1).expect("sweep order").clone();
                let x3 = verts.get(&p3).expect("sweep order").clone();
                // value^2 = x0*x2 + x1*x3
                let x2 = &(&value.square() - &(&x1 * &x3)) / &x0;
                verts.insert(p2, x2);
                faces.insert(key, value);
            }
        }
        Ok(())
    };
    solve_wall(1, &mut verts, &mut faces, &mut face_seed)?;
    solve_wall(2, &mut verts, &mut faces, &mut face_seed)?;
    solve_wall(3, &mut verts, &mut faces, &mut face_seed)?;

    // interior by the K-hexahedron step, cube bases in lexicographic order
    for i in lo[0]..hi[0] {
        for j in lo[1]..hi[1] {
            for k in lo[2]..hi[2] {
                let b = [i, j, k];
                let lower: [Scalar; 7] = std::array::from_fn(|bit| {
                    let p = padd(
                        b,
                        [
                            (bit & 1) as i64,
                            (bit >> 1 & 1) as i64,
                            (bit >> 2 & 1) as i64,
                        ],
                    );
                    verts.get(&p).expect("sweep order").clone()
                });
                let lf: [Scalar; 3] = std::array::from_fn(|a| {
                    faces
                        .get(&FaceKey::new(a as u8 + 1, b))
                        .expect("sweep order")
                        .clone()
                });
                let (upper, top) = khex_step(&lower, &lf)?;
                for (a, value) in upper.into_iter().enumerate() {
                    faces.insert(FaceKey::new(a as u8 + 1, padd(b, E[a])), value);
                }
                verts.insert(padd(b, [1, 1, 1]), top);
            }
        }
    }
    let vertices = VertexField3::new(window, verts)?;
    Ok(KHexField3 { vertices, faces })
}
