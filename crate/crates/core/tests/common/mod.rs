//! Shared generators for the integration and acceptance suites: seeded
//! rationals, generic symmetric matrices, and exact K-hexahedron fields.

use kashaev::kashaev::{khex_sweep_from_walls, KHexField3, Window3};
use kashaev::minors::{l_term, signed_minor_tuple, MinorTuple, SymMatrix};
use kashaev::scalar::Scalar;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational with numerator in [-9, 9] and denominator in
/// [1, 4].
pub fn rand_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let mut num = 0i64;
    while num == 0 {
        num = rng.gen_range(-9..=9);
    }
    Scalar::from_ratio(num, rng.gen_range(1..=4))
}

/// Random symmetric rational matrix that is generic: all tuple entries are
/// nonzero and every L term is nonzero. Resamples until genericity holds.
pub fn random_generic_symmetric(rng: &mut ChaCha8Rng, n: usize) -> (SymMatrix, MinorTuple) {
    loop {
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = rand_rational(rng);
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        let m = SymMatrix::new(rows).expect("symmetric by construction");
        let t = signed_minor_tuple(&m);
        if is_generic(&t) {
            return (m, t);
        }
    }
}

#[allow(dead_code)]
pub fn is_generic(t: &MinorTuple) -> bool {
    let n = t.n();
    for label in 0..1u32 << n {
        if t.get(label).is_zero() {
            return false;
        }
        for i in 1..=n as u8 {
            for j in i + 1..=n as u8 {
                if l_term(t, label, i, j).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Exact K-hexahedron field on the given window with all values nonzero,
/// built from rational wall data; retries seeds until the sweep avoids zero
/// pivots.
#[allow(dead_code)]
pub fn exact_khex_field(rng: &mut ChaCha8Rng, window: Window3) -> KHexField3 {
    loop {
        let mut vseed: Vec<Scalar> = Vec::new();
        let mut fseed: Vec<Scalar> = Vec::new();
        for _ in 0..4096 {
            vseed.push(rand_rational(rng));
            fseed.push(rand_rational(rng));
        }
        let mut vi = 0usize;
        let mut fi = 0usize;
        let attempt = khex_sweep_from_walls(
            window,
            |_| {
                vi += 1;
                vseed[vi - 1].clone()
            },
            |_| {
                fi += 1;
                fseed[fi - 1].clone()
            },
        );
        if let Ok(field) = attempt {
            let nonzero = field.vertices.iter().all(|(_, v)| !v.is_zero())
                && field.faces.values().all(|v| !v.is_zero());
            if nonzero {
                return field;
            }
        }
    }
}
