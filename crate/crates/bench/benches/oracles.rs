use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qbound::classical_binary::{inc_beta_reg, rate_curve, BinaryPair};
use qbound::exact_oracles::{beta_eps_exact, quantum_mixed_error_exact_with, Backend};
use qbound::linalg::{DensityMatrix, HermitianMatrix};

fn qubit(rows: [[f64; 2]; 2]) -> DensityMatrix {
    let m = HermitianMatrix::from_real_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap();
    DensityMatrix::new(m).unwrap()
}

fn mixed_error(c: &mut Criterion) {
    let rho = qubit([[0.7, 0.2], [0.2, 0.3]]);
    let sigma = qubit([[0.4, -0.1], [-0.1, 0.6]]);
    let mut group = c.benchmark_group("mixed_error_exact");
    for n in [4, 6, 8] {
        for (name, backend) in [("blocks", Backend::Auto), ("dense", Backend::Dense)] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| quantum_mixed_error_exact_with(&rho, &sigma, black_box(n), 0.0, backend).unwrap())
            });
        }
    }
    group.finish();
}

fn optimal_type_two(c: &mut Criterion) {
    let rho = qubit([[0.7, 0.2], [0.2, 0.3]]);
    let sigma = qubit([[0.4, -0.1], [-0.1, 0.6]]);
    c.bench_function("beta_eps_exact qubit n=10", |b| {
        b.iter(|| beta_eps_exact(&rho, &sigma, black_box(10), 0.2).unwrap())
    });
}

fn binary(c: &mut Criterion) {
    let bp = BinaryPair::new(0.001, 0.5).unwrap();
    c.bench_function("rate_curve n_max=300", |b| b.iter(|| rate_curve(&bp, 0.0, black_box(300)).unwrap()));
    c.bench_function("inc_beta_reg", |b| {
        b.iter(|| inc_beta_reg(black_box(0.37), black_box(41.5), black_box(17.25)).unwrap())
    });
}

criterion_group!(benches, mixed_error, optimal_type_two, binary);
criterion_main!(benches);
