//! Data-parallel batch workloads vs the sequential fallback.
//!
//! Built with default features, `map_collect` fans out over rayon and
//! `map_collect_seq` is the single-threaded baseline; built with
//! `--no-default-features` both paths are sequential and the comparison
//! collapses, which is the expected fallback behavior.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hypertess::delaunay::delaunay_tessellation;
use hypertess::exec;
use hypertess::hull::HullOptions;
use hypertess::models::HPoint;
use hypertess::scalar::Rat;
use hypertess::verify;
use hypertess::voronoi::geometric_dual;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance_batch(count: usize, sites: usize, seed: u64) -> Vec<Vec<HPoint<Rat>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
            verify::random_instance(&mut r, sites)
        })
        .collect()
}

fn bench_delaunay_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("delaunay_batch");
    group.sample_size(10);
    for &count in &[16usize, 64] {
        let batch = instance_batch(count, 10, 7);
        group.bench_with_input(BenchmarkId::new("parallel", count), &batch, |b, batch| {
            b.iter(|| {
                exec::map_collect(batch.clone(), |sites| {
                    delaunay_tessellation(&sites, &HullOptions::default()).unwrap().cells.len()
                })
            })
        });
        group.bench_with_input(BenchmarkId::new("sequential", count), &batch, |b, batch| {
            b.iter(|| {
                exec::map_collect_seq(batch.clone(), |sites| {
                    delaunay_tessellation(&sites, &HullOptions::default()).unwrap().cells.len()
                })
            })
        });
    }
    group.finish();
}

fn bench_oracle_corpus(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_corpus");
    group.sample_size(10);
    let batch = instance_batch(24, 9, 11);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            exec::map_collect(batch.clone(), |sites| {
                verify::delaunay_oracle_report(&sites).unwrap().matched
            })
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            exec::map_collect_seq(batch.clone(), |sites| {
                verify::delaunay_oracle_report(&sites).unwrap().matched
            })
        })
    });
    group.finish();
}

fn bench_membership_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("membership_sampling");
    group.sample_size(10);
    let batch = instance_batch(8, 10, 13);
    let prepared: Vec<_> = batch
        .into_iter()
        .map(|sites| {
            let tess = delaunay_tessellation(&sites, &HullOptions::default()).unwrap();
            let dual = geometric_dual(&tess);
            (tess, dual)
        })
        .collect();
    let jobs: Vec<usize> = (0..prepared.len()).collect();
    group.bench_function("parallel", |b| {
        b.iter(|| {
            exec::map_collect(jobs.clone(), |i| {
                let (tess, dual) = &prepared[i];
                verify::voronoi_membership_oracle(tess, dual, 1000, i as u64).matched
            })
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            exec::map_collect_seq(jobs.clone(), |i| {
                let (tess, dual) = &prepared[i];
                verify::voronoi_membership_oracle(tess, dual, 1000, i as u64).matched
            })
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_delaunay_batch,
    bench_oracle_corpus,
    bench_membership_sampling
);
criterion_main!(benches);
