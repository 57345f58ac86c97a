use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use regge_core::complex::{build_complex, gale_facets_oracle};
use regge_core::conformal::cyclic_admissibility;
use regge_core::curvature::{cyclic_metric, functionals, report, CyclicLevels};

fn bench_build_complex(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_complex");
    for n in [10usize, 20, 30] {
        group.bench_function(format!("n{n}"), |b| {
            b.iter(|| build_complex(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_hull_oracle(c: &mut Criterion) {
    let params: Vec<f64> = (1..=12).map(|i| i as f64).collect();
    c.bench_function("gale_facets_oracle/n12", |b| {
        b.iter(|| gale_facets_oracle(black_box(12), black_box(&params)).unwrap())
    });
}

fn levels_for(m: usize) -> CyclicLevels {
    CyclicLevels::new((0..=m).map(|k| 1.0 + 0.03 * k as f64).collect()).unwrap()
}

fn bench_report(c: &mut Criterion) {
    let mut group = c.benchmark_group("report");
    for n in [10usize, 20] {
        let complex = build_complex(n).unwrap();
        let metric = cyclic_metric(&complex, &levels_for(complex.m())).unwrap();
        group.bench_function(format!("n{n}"), |b| {
            b.iter(|| report(black_box(&complex), black_box(&metric)).unwrap())
        });
    }
    group.finish();
}

fn bench_functionals(c: &mut Criterion) {
    let complex = build_complex(20).unwrap();
    let metric = cyclic_metric(&complex, &levels_for(complex.m())).unwrap();
    c.bench_function("functionals/n20", |b| {
        b.iter(|| functionals(black_box(&complex), black_box(&metric)).unwrap())
    });
}

fn bench_admissibility(c: &mut Criterion) {
    let complex = build_complex(20).unwrap();
    let base = vec![1.0; complex.edges().len()];
    c.bench_function("cyclic_admissibility/n20", |b| {
        b.iter(|| cyclic_admissibility(black_box(&complex), black_box(&base)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_build_complex,
    bench_hull_oracle,
    bench_report,
    bench_functionals,
    bench_admissibility
);
criterion_main!(benches);
