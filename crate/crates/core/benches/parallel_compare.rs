//! Parallel vs sequential throughput on the engine's batch workloads:
//! nondegeneracy sweeps over random QPs and Lefschetz decomposition of
//! expansion coefficients.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qpcluster::catalog;
use qpcluster::par::{par_map, seq_map};
use qpcluster::path_algebra::random_potential;
use qpcluster::positivity::lefschetz_decompose;
use qpcluster::qp::{check_nondegenerate, QP};
use qpcluster::quantum::{quantize, QCoeff, QuantumSeed};

fn nondeg_batch(c: &mut Criterion) {
    let q = catalog::somos5();
    let jobs: Vec<(QP, Vec<usize>)> = (0..24)
        .map(|seed| {
            let w = random_potential(&q, 5, seed);
            let qp = QP::ungraded(q.clone(), w);
            let seq = vec![
                (seed as usize % 5) + 1,
                ((seed as usize + 2) % 5) + 1,
            ];
            (qp, seq)
        })
        .collect();
    let run = |job: &(QP, Vec<usize>)| check_nondegenerate(&job.0, &job.1).is_ok();
    let mut group = c.benchmark_group("nondeg_batch");
    group.sample_size(10);
    group.bench_with_input(BenchmarkId::new("sequential", jobs.len()), &jobs, |b, jobs| {
        b.iter(|| seq_map(jobs, run))
    });
    group.bench_with_input(BenchmarkId::new("parallel", jobs.len()), &jobs, |b, jobs| {
        b.iter(|| par_map(jobs, run))
    });
    group.finish();
}

fn lefschetz_batch(c: &mut Criterion) {
    // Coefficients harvested from a real expansion: Kronecker at depth 4.
    let (qq, lambda) = quantize(&catalog::kronecker()).unwrap();
    let seed = QuantumSeed::initial(qq.exchange_matrix(), lambda).unwrap();
    let mutated = seed.mutate_sequence(&[1, 2, 1, 2]).unwrap();
    let expansion = mutated.expand_monomial(&[1, 0, 0, 0]).unwrap();
    let coeffs: Vec<QCoeff> = expansion.terms().map(|(_, c)| c.clone()).collect();
    // Replicate to a batch worth parallelizing.
    let batch: Vec<QCoeff> =
        std::iter::repeat(coeffs).take(64).flatten().collect();
    let run = |c: &QCoeff| lefschetz_decompose(c).is_ok();
    let mut group = c.benchmark_group("lefschetz_batch");
    group.bench_with_input(BenchmarkId::new("sequential", batch.len()), &batch, |b, batch| {
        b.iter(|| seq_map(batch, run))
    });
    group.bench_with_input(BenchmarkId::new("parallel", batch.len()), &batch, |b, batch| {
        b.iter(|| par_map(batch, run))
    });
    group.finish();
}

criterion_group!(benches, nondeg_batch, lefschetz_batch);
criterion_main!(benches);
