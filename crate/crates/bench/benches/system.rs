use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hdivsym::analysis::{inf_sup_constant, solve_saddle};
use hdivsym::assembly::{assemble_system, StressSpace};
use hdivsym::geometry::Mesh;
use hdivsym_bench::{kuhn_space, mms};

fn assembly(c: &mut Criterion) {
    let exact = mms(2, 3);
    let space = kuhn_space(2, 3, 8);
    c.bench_function("space_n2_k3_m8", |b| b.iter(|| StressSpace::new(Mesh::kuhn(2, black_box(8)).unwrap(), 3).unwrap()));
    c.bench_function("assemble_n2_k3_m8", |b| b.iter(|| assemble_system(black_box(&space), &exact.compliance, &exact.f)));
}

fn solvers(c: &mut Criterion) {
    let exact = mms(2, 3);
    let space = kuhn_space(2, 3, 8);
    let sys = assemble_system(&space, &exact.compliance, &exact.f);
    c.bench_function("solve_n2_k3_m8", |b| b.iter(|| solve_saddle(black_box(&sys)).unwrap()));

    let small = kuhn_space(2, 3, 2);
    let sys = assemble_system(&small, &exact.compliance, &exact.f);
    c.bench_function("infsup_n2_k3_m2", |b| b.iter(|| inf_sup_constant(black_box(&sys)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = assembly, solvers
}
criterion_main!(benches);
