use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mcalg_core::coalgebra::CdgCoalgebra;
use mcalg_core::convolution::ConvolutionAlgebra;
use mcalg_core::hopf::TargetModel;
use mcalg_core::linfty::{validate_linfty, TableLInfinity};
use mcalg_core::par::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn validate(c: &mut Criterion) {
    let mut group = c.benchmark_group("validate_linfty");
    let conv = ConvolutionAlgebra::new(CdgCoalgebra::sphere_product(2, 2), TableLInfinity::s2());
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("S2xS2", name), &exec, |b, &exec| {
            b.iter(|| validate_linfty(&conv, 4, exec).unwrap())
        });
    }
    group.finish();
}

fn transfer(c: &mut Criterion) {
    let mut group = c.benchmark_group("transfer");
    group.sample_size(10);
    let cp2 = CdgCoalgebra::cp2();
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("cobar(CP2)", name), &exec, |b, &exec| {
            b.iter(|| TargetModel::new(&cp2, 8, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, validate, transfer);
criterion_main!(benches);
