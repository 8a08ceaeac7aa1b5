use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qsymbol_bench::{lifted_symbol, realization};
use qsymbol_core::invariance::{check_direct, check_symbolic};
use qsymbol_core::norms::{haagerup_bound, schur_cb_norm};
use qsymbol_core::symbol::t_map;
use qsymbol_core::{random, FiniteGroup, RealizationKind};

const KINDS: [RealizationKind; 2] = [RealizationKind::Commutative, RealizationKind::Cocommutative];

fn dense_t_map(c: &mut Criterion) {
    let mut group = c.benchmark_group("t_map");
    group.sample_size(10);
    for kind in KINDS {
        for spec in ["S3", "D4"] {
            let r = realization(kind, spec).unwrap();
            let (_, lifted) = lifted_symbol(&r, 1).unwrap();
            group.bench_with_input(BenchmarkId::new(kind.as_str(), spec), &lifted, |b, psi| {
                b.iter(|| t_map(psi).unwrap())
            });
        }
    }
    group.finish();
}

fn membership_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    group.sample_size(10);
    for kind in KINDS {
        for spec in ["D4", "Z16"] {
            let r = realization(kind, spec).unwrap();
            let (chi, _) = lifted_symbol(&r, 2).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("symbolic/{}", kind.as_str()), spec), &chi, |b, chi| {
                b.iter(|| check_symbolic(&r, chi, 1e-9).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("direct/{}", kind.as_str()), spec), &chi, |b, chi| {
                b.iter(|| check_direct(&r, chi, 1e-9).unwrap())
            });
        }
    }
    group.finish();
}

fn norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("norms");
    group.sample_size(10);
    for n in [2, 4, 6] {
        let g = FiniteGroup::cyclic(n).unwrap();
        let phi = random::matrix(&mut random::rng(n as u64), n, n);
        group.bench_with_input(BenchmarkId::new("schur_cb", n), &phi, |b, phi| {
            b.iter(|| schur_cb_norm(&g, phi, 1e-3).unwrap())
        });
    }
    let r = realization(RealizationKind::Cocommutative, "D4").unwrap();
    let (chi, _) = lifted_symbol(&r, 3).unwrap();
    group.bench_function("haagerup/D4", |b| b.iter(|| haagerup_bound(&chi).unwrap()));
    group.finish();
}

criterion_group!(benches, dense_t_map, membership_checks, norms);
criterion_main!(benches);
