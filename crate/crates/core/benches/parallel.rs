use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use brauer_casimir::brauer::symmetrizer;
use brauer_casimir::casimir::{build_casimir, CasimirSpec, OmegaMode, Projector};
use brauer_casimir::exec::set_parallel;
use brauer_casimir::liealg::Enveloping;
use brauer_casimir::suites::{theorem_grid, theorem_suite};
use brauer_casimir::tensor::ActionConfig;

const MODES: [(&str, bool); 2] = [("sequential", false), ("parallel", true)];

fn brauer_product(c: &mut Criterion) {
    let s = symmetrizer(4).unwrap();
    let mut group = c.benchmark_group("symmetrizer-square");
    for (name, on) in MODES {
        set_parallel(on);
        group.bench_function(BenchmarkId::new(name, 4), |b| b.iter(|| black_box(s.mul(&s).unwrap())));
    }
    group.finish();
}

fn casimir_build(c: &mut Criterion) {
    let cfg = ActionConfig::orthogonal(5);
    let spec = CasimirSpec::theorem(cfg, Projector::Sym, 2);
    let mut group = c.benchmark_group("casimir-o5-sym-k2");
    group.sample_size(10);
    for (name, on) in MODES {
        set_parallel(on);
        group.bench_function(name, |b| {
            b.iter(|| {
                let env = Enveloping::for_config(cfg).unwrap();
                black_box(build_casimir(&spec, &env).unwrap())
            })
        });
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let instances = theorem_grid();
    let mut group = c.benchmark_group("theorem-grid");
    group.sample_size(10);
    for (name, on) in MODES {
        set_parallel(on);
        group.bench_function(name, |b| b.iter(|| black_box(theorem_suite(&instances, OmegaMode::Coupled))));
    }
    group.finish();
    set_parallel(true);
}

criterion_group!(benches, brauer_product, casimir_build, grid);
criterion_main!(benches);
