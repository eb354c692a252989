use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hk_core::groups::{coefficient_complex, resolution_for, GroupDesc, BAR_BUDGET};
use hk_core::gsets::{FiniteGSet, OdometerSpec};
use hk_core::hkpipeline::{groupoid_homology, hatted_homology, Options};
use hk_core::{CoeffRing, Exec};

fn dihedral_odometer(levels: usize) -> OdometerSpec {
    OdometerSpec {
        group: GroupDesc::InfiniteDihedral,
        odometer_indices: (1..=levels as u32).map(|k| 2u64.pow(k)).collect(),
        subgroups: None,
        truncation_level: levels,
    }
}

fn pipelines(c: &mut Criterion) {
    let mut g = c.benchmark_group("hatted_dihedral_odometer");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let opts = Options { depth: 4, exec, ..Options::default() };
        g.bench_with_input(BenchmarkId::new(format!("{exec:?}"), 8), &dihedral_odometer(8), |b, spec| {
            b.iter(|| hatted_homology(spec, &CoeffRing::Integers, &opts).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("groupoid_dihedral_odometer");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let opts = Options { depth: 4, exec, ..Options::default() };
        g.bench_with_input(BenchmarkId::new(format!("{exec:?}"), 8), &dihedral_odometer(8), |b, spec| {
            b.iter(|| groupoid_homology(spec, &CoeffRing::Integers, &opts).unwrap())
        });
    }
    g.finish();
}

fn bar_coefficients(c: &mut Criterion) {
    let s4 = hk_core::groups::Group::symmetric(4);
    let res = resolution_for(&s4, 3, BAR_BUDGET).unwrap();
    let x = FiniteGSet::regular(&s4).unwrap();
    let mut g = c.benchmark_group("s4_bar_regular");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| coefficient_complex(&res, &x, CoeffRing::Integers, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, pipelines, bar_coefficients);
criterion_main!(benches);
