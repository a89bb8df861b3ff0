//! Sequential vs parallel kernels. The parallel paths must return bitwise
//! identical results, so the only question criterion answers is where the
//! crossover pays off (see PAR_WORK_MIN in the linop module).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use proxnewton::{
    gaussian_kernel, gen_l0l2, make_config, solve_gcnm, BlurOperator, ConfigOverrides,
    DenseMatrix, GeneratedInstance, InstanceSpec,
};
use std::hint::black_box;

fn filled(len: usize, salt: usize) -> Vec<f64> {
    // deterministic non-constant data, no RNG needed at bench scale
    (0..len)
        .map(|i| ((i * 31 + salt * 17) % 97) as f64 / 48.5 - 1.0)
        .collect()
}

fn dense_matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_matvec");
    for &n in &[128usize, 512] {
        let a = DenseMatrix::from_row_major(n, n, filled(n * n, 3));
        let x = filled(n, 5);
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |b, _| {
            b.iter(|| black_box(a.apply_seq(black_box(&x))))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &n, |b, _| {
            b.iter(|| black_box(a.apply_par(black_box(&x))))
        });
    }
    group.finish();
}

fn blur_correlate(c: &mut Criterion) {
    let mut group = c.benchmark_group("blur_128x128_9x9");
    let op = BlurOperator::new(gaussian_kernel(9, 4.0), 9, 128, 128);
    let img = filled(128 * 128, 7);
    group.bench_function("seq", |b| b.iter(|| black_box(op.apply_seq(black_box(&img)))));
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| b.iter(|| black_box(op.apply_par(black_box(&img)))));
    group.finish();
}

fn batch(seeds: std::ops::Range<u64>) -> Vec<GeneratedInstance> {
    seeds
        .map(|seed| {
            let spec = InstanceSpec::parse(&format!(
                "family = l0l2\nm = 20\nmu0 = 1e-2\nmu2 = 1e-2\nseed = {seed}"
            ))
            .unwrap();
            gen_l0l2(&spec).unwrap()
        })
        .collect()
}

fn solve_one(inst: &GeneratedInstance) -> usize {
    let problem = inst.build_problem();
    let overrides = ConfigOverrides { trace_vectors: Some(false), ..ConfigOverrides::default() };
    let config = make_config(&problem, &overrides).unwrap();
    solve_gcnm(&problem, &config, &inst.x0).totals.iterations
}

fn suite_execution(c: &mut Criterion) {
    let insts = batch(0..8);
    let mut group = c.benchmark_group("suite_8x_l0l2_n100");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| insts.iter().map(solve_one).collect::<Vec<_>>())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        use rayon::prelude::*;
        b.iter(|| insts.par_iter().map(solve_one).collect::<Vec<_>>())
    });
    group.finish();
}

criterion_group!(benches, dense_matvec, blur_correlate, suite_execution);
criterion_main!(benches);
