//! Parallel vs sequential timing for the per-cube and per-identity inner
//! loops. The "par" benches go through the default rayon-backed check
//! functions; the "seq" benches run the same arithmetic through the plain
//! sequential iterator path.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use kashaev::exec::map_collect_seq;
use kashaev::kashaev::{
    check_kashaev, kashaev_k_sides, positive_slab, run_positive_kashaev, VertexField3,
};
use kashaev::minors::{realizability_test, signed_minor_tuple, SymMatrix};
use kashaev::scalar::{Scalar, ToleranceContext};

fn big_field() -> VertexField3 {
    let init = positive_slab((16, 16), |p| 1.0 + 0.01 * ((p[0] * 7 + p[1] * 3) % 13) as f64);
    run_positive_kashaev(&init, 10).expect("positive run")
}

fn sequential_kashaev(field: &VertexField3, ctx: &ToleranceContext) -> usize {
    let bases = field.complete_cube_bases();
    let results = map_collect_seq(&bases, |&base| {
        let corners = field.corners_at(base).expect("complete");
        let (lhs, rhs) = kashaev_k_sides(&corners);
        lhs.approx_eq_coerced(&rhs, ctx)
    });
    results.iter().filter(|ok| !**ok).count()
}

fn random_symmetric(n: usize, seed: &mut i64) -> SymMatrix {
    let mut next = || {
        *seed = seed.wrapping_mul(48271).rem_euclid(0x7fff_ffff);
        Scalar::from_ratio((*seed % 9) - 4 + 9, (*seed % 3).abs() + 1)
    };
    let mut rows = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = next();
            rows[i][j] = v.clone();
            rows[j][i] = v;
        }
    }
    SymMatrix::new(rows).expect("symmetric by construction")
}

fn bench_kashaev_check(c: &mut Criterion) {
    let field = big_field();
    let ctx = ToleranceContext::default();
    let mut group = c.benchmark_group("kashaev_check");
    group.bench_function("par", |b| {
        b.iter(|| {
            let report = check_kashaev(&field, &ctx);
            assert!(report.passed());
        })
    });
    group.bench_function("seq", |b| {
        b.iter(|| {
            assert_eq!(sequential_kashaev(&field, &ctx), 0);
        })
    });
    group.finish();
}

fn bench_realizability(c: &mut Criterion) {
    let mut seed = 12345i64;
    let m = random_symmetric(6, &mut seed);
    let t = signed_minor_tuple(&m);
    let mut group = c.benchmark_group("realizability_n6");
    group.sample_size(10);
    group.bench_function("par", |b| {
        b.iter_batched(
            || t.clone(),
            |t| realizability_test(&t).expect("generic").passed(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_kashaev_check, bench_realizability);
criterion_main!(benches);
