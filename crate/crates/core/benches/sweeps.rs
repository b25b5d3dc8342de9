use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use opmod::modulus::{doi_identity_residual, OperatorTriple};
use opmod::par::{self, Exec};
use opmod::schur::{hilbert_multiplier, mult_lower_search_exec, mult_norm_batch, SolverOptions};
use opmod::ScalarFn;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("rayon", Exec::Auto)];

fn hilbert_batch(c: &mut Criterion) {
    let problems: Vec<_> = (4..=24).step_by(4).map(hilbert_multiplier).collect();
    let opts = SolverOptions::default();
    let mut g = c.benchmark_group("hilbert_batch");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(mult_norm_batch(&problems, &opts, exec)))
        });
    }
    g.finish();
}

fn lower_search(c: &mut Criterion) {
    let p = hilbert_multiplier(16);
    let mut g = c.benchmark_group("lower_search");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(mult_lower_search_exec(&p, 64, 7, exec)))
        });
    }
    g.finish();
}

fn doi_triples(c: &mut Criterion) {
    let f = ScalarFn::Abs;
    let mut g = c.benchmark_group("doi_triples");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                black_box(par::map_range(exec, 32, |s| {
                    let t = OperatorTriple::random(8, (-1.0, 1.0), s as u64).unwrap();
                    doi_identity_residual(&f, &t).unwrap()
                }))
            })
        });
    }
    g.finish();
}

criterion_group!(benches, hilbert_batch, lower_search, doi_triples);
criterion_main!(benches);
