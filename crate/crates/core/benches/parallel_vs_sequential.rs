use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentlab::orbit::{sample_group_word, sphere_survey_with};
use momentlab::{
    CasimirSpec, CatalogKind, Execution, MomentContext, Representation, StateVector, Tolerances,
};

fn modes() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Execution::Parallel),
    ]
}

fn context(kind: CatalogKind) -> MomentContext {
    MomentContext::new(
        Representation::catalog(&kind).unwrap(),
        Tolerances::default(),
    )
    .unwrap()
}

fn sphere_survey(c: &mut Criterion) {
    let ctx = context(CatalogKind::spin(4));
    let spec = CasimirSpec::su2_quadratic();
    let mut group = c.benchmark_group("sphere_survey_spin2_2000");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sphere_survey_with(exec, &ctx, &spec, 2000, 1).unwrap())
        });
    }
    group.finish();
}

fn cocycle(c: &mut Criterion) {
    let ctx = context(CatalogKind::HeisenbergTruncated { n: 16 });
    let mut group = c.benchmark_group("cocycle_heisenberg16_500");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ctx.cocycle_defect_with(exec, 500, 1).unwrap())
        });
    }
    group.finish();
}

fn equivariance(c: &mut Criterion) {
    let ctx = context(CatalogKind::spin(9));
    let g = sample_group_word(ctx.rep().algebra(), 3, 1.0, 2).unwrap();
    let states: Vec<StateVector> = (0..1000)
        .map(|i| {
            ctx.rep()
                .random_unit_state(&mut momentlab::rng::stream(3, i))
        })
        .collect();
    let mut group = c.benchmark_group("equivariance_spin9half_1000");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ctx.equivariance_defect_with(exec, &g, &states).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sphere_survey, cocycle, equivariance);
criterion_main!(benches);
