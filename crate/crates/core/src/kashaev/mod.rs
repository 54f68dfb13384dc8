//! The cubic-lattice engine: Kashaev equation, positive Kashaev recurrence,
//! K-hexahedron equations, coherence, sign gauges, and extension of coherent
//! vertex arrays to vertex-and-face arrays.
//!
//! Cube corners are indexed by bits: corner `(i, j, k)` of a unit cube maps
//! to index `i | j << 1 | k << 2`, so the antipode of corner `b` is `b ^ 7`
//! and its neighbors are `b ^ 1`, `b ^ 2`, `b ^ 4`.

mod extend;
mod field;
mod gauge;

pub use extend::{extend_to_khex, khex_sweep_from_walls};
pub use field::{
    check_coherence, check_kashaev, check_khex, positive_slab, run_positive_kashaev,
    CoherenceCheck, FaceKey, KHexField3, Point3, VertexField3, Window3,
};
pub use gauge::{gauge_compare, gauge_transform, Gauge, GaugeOutcome, GaugeWitness};

use crate::scalar::{Scalar, ScalarError};

/// Errors for lattice-field operations.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum KashaevError {
    #[error("base vertex value is zero")]
    ZeroBaseVertex,
    #[error("vertex value at {0:?} is zero")]
    ZeroVertexValue(Point3),
    #[error("face expression vanishes at {0}")]
    ZeroFaceExpression(String),
    #[error("3x3x3 neighborhood of {0:?} is not fully contained in the field")]
    NeighborhoodIncomplete(Point3),
    #[error("field is not a coherent Kashaev solution ({0})")]
    NotCoherent(String),
    #[error("sign-class repair did not converge: {0}")]
    NonConvergent(String),
    #[error("fields disagree on the integer lattice at {0:?}")]
    VertexMismatch(Point3),
    #[error("missing value at {0:?}")]
    MissingValue(Point3),
    #[error("initial values must be positive, found nonpositive at {0:?}")]
    PositivityRequired(Point3),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Left-hand side of the Kashaev equation for one cube:
/// `2(a² + b² + c² + d²) − (a + b + c + d)² − 4(s + t)`,
/// with `a..d` the four antipodal-pair products and `s`, `t` the two
/// inscribed-tetrahedron products. Invariant under all 48 cube symmetries.
pub fn kashaev_k(corners: &[Scalar; 8]) -> Scalar {
    let (lhs, rhs) = kashaev_k_sides(corners);
    &lhs - &rhs
}

/// The two sides `2(a²+b²+c²+d²)` and `(a+b+c+d)² + 4(s+t)` separately,
/// for scale-aware float comparisons.
pub fn kashaev_k_sides(corners: &[Scalar; 8]) -> (Scalar, Scalar) {
    let pair = |b: usize| &corners[b] * &corners[b ^ 7];
    let a = pair(0);
    let b = pair(1);
    let c = pair(2);
    let d = pair(4);
    let s = &(&corners[0] * &corners[3]) * &(&corners[5] * &corners[6]);
    let t = &(&corners[1] * &corners[2]) * &(&corners[4] * &corners[7]);
    let two = Scalar::from_int(2);
    let four = Scalar::from_int(4);
    let sum_sq = &(&(&a * &a) + &(&b * &b)) + &(&(&c * &c) + &(&d * &d));
    let sum = &(&a + &b) + &(&c + &d);
    (&two * &sum_sq, &(&sum * &sum) + &(&four * &(&s + &t)))
}

/// `K^C_v`: one quarter of the partial derivative of the cube's Kashaev
/// polynomial with respect to the value opposite corner `v`:
/// `½(z_w z_v² − z_v Σ) − n₁n₂n₃`, where `Σ` sums each `v`-neighbor times
/// its antipode and `n₁n₂n₃` is the product of the neighbors of `v`.
pub fn kashaev_kv(corners: &[Scalar; 8], v: usize) -> Scalar {
    assert!(v < 8);
    let zv = &corners[v];
    let zw = &corners[v ^ 7];
    let n = [&corners[v ^ 1], &corners[v ^ 2], &corners[v ^ 4]];
    let sigma = &(&(n[0] * &corners[v ^ 6]) + &(n[1] * &corners[v ^ 5])) + &(n[2] * &corners[v ^ 3]);
    let half = Scalar::from_ratio(1, 2);
    &(&half * &(&(zw * &(zv * zv)) - &(zv * &sigma))) - &(&(n[0] * n[1]) * n[2])
}

/// Product of the three face expressions at corner `v`:
/// `∏ over the 3 squares at v of (z_v z_diag + z_n1 z_n2)`.
/// `(K^C_v)² − (z_v²/4)·K^C` equals this product identically.
pub fn corner_face_product(corners: &[Scalar; 8], v: usize) -> Scalar {
    let zv = &corners[v];
    let mut prod = Scalar::one();
    for (p, q) in [(1, 2), (1, 4), (2, 4)] {
        let term = &(zv * &corners[v ^ p ^ q]) + &(&corners[v ^ p] * &corners[v ^ q]);
        prod = &prod * &term;
    }
    prod
}

/// Result of solving the Kashaev equation for the top corner: the
/// polynomial quantities `A`, `D`, and the two candidate roots
/// `(A ± 2√D)/z₀₀₀²`.
#[derive(Debug, Clone)]
pub struct CubeRoots {
    pub a: Scalar,
    pub d: Scalar,
    pub root_plus: Scalar,
    pub root_minus: Scalar,
}

/// Solve for `z₁₁₁` given the seven lower corners, indexed by bits `0..=6`.
pub fn cube_roots(lower: &[Scalar; 7]) -> Result<CubeRoots, KashaevError> {
    let (a, d) = cube_a_d(lower);
    if lower[0].is_zero() {
        return Err(KashaevError::ZeroBaseVertex);
    }
    let sqrt_d = d.sqrt_principal()?;
    let z0_sq = lower[0].square();
    let two = Scalar::from_int(2);
    let shift = &two * &sqrt_d;
    Ok(CubeRoots {
        root_plus: &(&a + &shift) / &z0_sq,
        root_minus: &(&a - &shift) / &z0_sq,
        a,
        d,
    })
}

/// The quantities `A = 2 z₁₀₀z₀₁₀z₀₀₁ + z₀₀₀(z₁₀₀z₀₁₁ + z₀₁₀z₁₀₁ + z₀₀₁z₁₁₀)`
/// and `D = (z₀₀₀z₀₁₁ + z₀₁₀z₀₀₁)(z₀₀₀z₁₀₁ + z₁₀₀z₀₀₁)(z₀₀₀z₁₁₀ + z₁₀₀z₀₁₀)`.
pub fn cube_a_d(lower: &[Scalar; 7]) -> (Scalar, Scalar) {
    let z = lower;
    let two = Scalar::from_int(2);
    let a = &(&two * &(&(&z[1] * &z[2]) * &z[4]))
        + &(&z[0] * &(&(&(&z[1] * &z[6]) + &(&z[2] * &z[5])) + &(&z[4] * &z[3])));
    let d = &(&(&(&z[0] * &z[6]) + &(&z[2] * &z[4])) * &(&(&z[0] * &z[5]) + &(&z[1] * &z[4])))
        * &(&(&z[0] * &z[3]) + &(&z[1] * &z[2]));
    (a, d)
}

/// One K-hexahedron step: from the seven lower corners (bit-indexed) and the
/// three lower face values, produce the three upper face values and the top
/// corner. Axis `i` face value is the one on the square not containing the
/// `e_i` edge direction.
pub fn khex_step(
    lower: &[Scalar; 7],
    faces: &[Scalar; 3],
) -> Result<([Scalar; 3], Scalar), KashaevError> {
    if lower[0].is_zero() {
        return Err(KashaevError::ZeroBaseVertex);
    }
    let z0 = &lower[0];
    let (f1, f2, f3) = (&faces[0], &faces[1], &faces[2]);
    let u1 = &(&(f2 * f3) + &(f1 * &lower[1])) / z0;
    let u2 = &(&(f1 * f3) + &(f2 * &lower[2])) / z0;
    let u3 = &(&(f1 * f2) + &(f3 * &lower[4])) / z0;
    let (a, _) = cube_a_d(lower);
    let two = Scalar::from_int(2);
    let top = &(&a + &(&two * &(&(f1 * f2) * f3))) / &z0.square();
    Ok(([u1, u2, u3], top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ToleranceContext;

    /// Independent 3x3 determinant by cofactor expansion; the M3 fixture
    /// values are recomputed here rather than trusted as constants.
    fn det3(m: &[[i64; 3]; 3]) -> i64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn det2(m: [[i64; 2]; 2]) -> i64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Signed principal-minor cube of [[2,1,1],[1,2,1],[1,1,2]]: corner S
    /// (bitmask over {1,2,3}) carries (-1)^{|S|/2 floor} times the principal
    /// minor on rows/cols S.
    pub(crate) fn fixture_m3_cube() -> [Scalar; 8] {
        let m = [[2i64, 1, 1], [1, 2, 1], [1, 1, 2]];
        let minor = |s: usize| -> i64 {
            let idx: Vec<usize> = (0..3).filter(|i| s >> i & 1 == 1).collect();
            match idx.len() {
                0 => 1,
                1 => m[idx[0]][idx[0]],
                2 => det2([
                    [m[idx[0]][idx[0]], m[idx[0]][idx[1]]],
                    [m[idx[1]][idx[0]], m[idx[1]][idx[1]]],
                ]),
                _ => det3(&m),
            }
        };
        std::array::from_fn(|s| {
            let sign = if (s.count_ones() / 2) % 2 == 0 { 1 } else { -1 };
            Scalar::from_int(sign * minor(s))
        })
    }

    #[test]
    fn m3_fixture_values() {
        let c = fixture_m3_cube();
        assert_eq!(c[0], Scalar::from_int(1));
        for b in [1, 2, 4] {
            assert_eq!(c[b], Scalar::from_int(2));
        }
        for b in [3, 5, 6] {
            assert_eq!(c[b], Scalar::from_int(-3));
        }
        assert_eq!(c[7], Scalar::from_int(-4));
    }

    #[test]
    fn kashaev_k_examples() {
        let zeros: [Scalar; 8] = std::array::from_fn(|_| Scalar::zero());
        assert!(kashaev_k(&zeros).is_zero());

        let ones: [Scalar; 8] = std::array::from_fn(|_| Scalar::one());
        assert_eq!(kashaev_k(&ones), Scalar::from_int(-16));

        assert!(kashaev_k(&fixture_m3_cube()).is_zero());
    }

    #[test]
    fn kashaev_kv_examples() {
        let cube = fixture_m3_cube();
        assert_eq!(kashaev_kv(&cube, 0), Scalar::from_int(-1));
        // corner labeled {2} is bit index 2
        assert_eq!(kashaev_kv(&cube, 2), Scalar::from_int(1));
        let zeros: [Scalar; 8] = std::array::from_fn(|_| Scalar::zero());
        for v in 0..8 {
            assert!(kashaev_kv(&zeros, v).is_zero());
        }
    }

    /// 4·K_v equals the central difference of K in the opposite corner; since
    /// K is quadratic in that variable, the central difference is exact even
    /// in rational arithmetic.
    #[test]
    fn kv_is_quarter_derivative() {
        let mut cube = fixture_m3_cube();
        for v in 0..8 {
            let w = v ^ 7;
            let orig = cube[w].clone();
            cube[w] = &orig + &Scalar::one();
            let k_plus = kashaev_k(&cube);
            cube[w] = &orig - &Scalar::one();
            let k_minus = kashaev_k(&cube);
            cube[w] = orig;
            let deriv = &(&k_plus - &k_minus) / &Scalar::from_int(2);
            assert_eq!(deriv, &Scalar::from_int(4) * &kashaev_kv(&cube, v));
        }
    }

    #[test]
    fn cube_roots_examples() {
        let ones: [Scalar; 7] = std::array::from_fn(|_| Scalar::from_f64(1.0));
        let r = cube_roots(&ones).unwrap();
        assert_eq!(r.a.to_f64(), 5.0);
        assert_eq!(r.d.to_f64(), 8.0);
        assert!((r.root_plus.to_f64() - 10.656_854_249_492_38).abs() < 1e-12);
        assert!((r.root_minus.to_f64() + 0.656_854_249_492_380_2).abs() < 1e-12);

        let m3 = fixture_m3_cube();
        let lower: [Scalar; 7] = std::array::from_fn(|b| m3[b].clone());
        let r = cube_roots(&lower).unwrap();
        assert_eq!(r.a, Scalar::from_int(-2));
        assert_eq!(r.d, Scalar::from_int(1));
        assert_eq!(r.root_plus, Scalar::from_int(0));
        assert_eq!(r.root_minus, Scalar::from_int(-4));

        let mut unit: [Scalar; 7] = std::array::from_fn(|_| Scalar::zero());
        unit[0] = Scalar::one();
        let r = cube_roots(&unit).unwrap();
        assert!(r.a.is_zero() && r.d.is_zero());
        assert!(r.root_plus.is_zero() && r.root_minus.is_zero());

        let mut zero_base: [Scalar; 7] = std::array::from_fn(|_| Scalar::one());
        zero_base[0] = Scalar::zero();
        assert!(matches!(
            cube_roots(&zero_base),
            Err(KashaevError::ZeroBaseVertex)
        ));
    }

    #[test]
    fn khex_step_examples() {
        // all corners 1, all faces sqrt(2)
        let lower: [Scalar; 7] = std::array::from_fn(|_| Scalar::from_f64(1.0));
        let s2 = Scalar::from_f64(2.0f64.sqrt());
        let faces = [s2.clone(), s2.clone(), s2.clone()];
        let (upper, top) = khex_step(&lower, &faces).unwrap();
        let ctx = ToleranceContext::default();
        for u in &upper {
            assert!(u
                .approx_eq(&Scalar::from_f64(2.0 + 2.0f64.sqrt()), &ctx)
                .unwrap());
        }
        assert!(top
            .approx_eq(&Scalar::from_f64(5.0 + 4.0 * 2.0f64.sqrt()), &ctx)
            .unwrap());

        // M3 lower data with faces (-1, +1, +1) realizes the minor value -4.
        let m3 = fixture_m3_cube();
        let lower: [Scalar; 7] = std::array::from_fn(|b| m3[b].clone());
        let faces = [Scalar::from_int(-1), Scalar::one(), Scalar::one()];
        let (_, top) = khex_step(&lower, &faces).unwrap();
        assert_eq!(top, Scalar::from_int(-4));

        // The top corner depends on the faces only through their product:
        // negate the first two faces pairwise.
        let flipped = [Scalar::from_int(1), Scalar::from_int(-1), Scalar::from_int(1)];
        let (_, top2) = khex_step(&lower, &flipped).unwrap();
        assert_eq!(top2, Scalar::from_int(-4));
    }

    /// The corner product lemma: (K_v)² − (z_v²/4)K equals the product of the
    /// three face expressions at v, as an identity in the 8 corner values.
    #[test]
    fn corner_lemma_identity_at_random_rationals() {
        let mut state = 0x9e37u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let p = (state >> 33) as i64 % 9 - 4;
            let q = ((state >> 17) as i64 % 4).abs() + 1;
            Scalar::from_ratio(if p == 0 { 1 } else { p }, q)
        };
        for _ in 0..32 {
            let cube: [Scalar; 8] = std::array::from_fn(|_| next());
            let k = kashaev_k(&cube);
            for v in 0..8 {
                let kv = kashaev_kv(&cube, v);
                let quarter = Scalar::from_ratio(1, 4);
                let lhs = &kv.square() - &(&(&quarter * &cube[v].square()) * &k);
                assert_eq!(lhs, corner_face_product(&cube, v));
            }
        }
    }

    /// Kashaev's polynomial is invariant under all 48 signed cube symmetries,
    /// realized here as XOR-translations composed with axis permutations.
    #[test]
    fn k_invariant_under_cube_symmetries() {
        let cube = fixture_m3_cube();
        let k0 = kashaev_k(&cube);
        let perms = [
            [0usize, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for x in 0..8usize {
            for perm in perms {
                let relabeled: [Scalar; 8] = std::array::from_fn(|b| {
                    let mut pb = 0usize;
                    for (to, from) in perm.iter().enumerate() {
                        if b >> to & 1 == 1 {
                            pb |= 1 << from;
                        }
                    }
                    cube[pb ^ x].clone()
                });
                assert_eq!(kashaev_k(&relabeled), k0);
            }
        }
    }
}
