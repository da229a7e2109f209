use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use maxdist_bench::{circle_cloud, scatter};
use maxdist_core::energy::{energy, SigmaDistanceField};
use maxdist_core::geometry::Point;
use maxdist_core::minlab::{horseshoe, trimmed_tree};
use maxdist_core::optimizer::PenalizedObjective;
use maxdist_core::steiner::steiner_exact;

fn bench_energy(c: &mut Criterion) {
    let m = circle_cloud(5000);
    let (_, g, _) = horseshoe(5.0, 1.0, 5000).unwrap();
    c.bench_function("energy/horseshoe-5000x5000", |b| {
        b.iter(|| energy(&m, &g).unwrap().value)
    });

    let field = SigmaDistanceField::build(&g).unwrap();
    c.bench_function("energy/nearest-query", |b| {
        let q = Point::new(4.9, 0.3);
        b.iter(|| field.nearest(q).0)
    });
}

fn bench_steiner(c: &mut Criterion) {
    let mut group = c.benchmark_group("steiner_exact");
    for n in [3usize, 4, 5, 6] {
        let pts = scatter(n, 42);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| steiner_exact(pts).unwrap().length)
        });
    }
    group.finish();
}

fn bench_horseshoe(c: &mut Criterion) {
    c.bench_function("horseshoe/solve-5000", |b| {
        b.iter(|| horseshoe(5.0, 1.0, 5000).unwrap().2.total_length)
    });
}

fn bench_gradient(c: &mut Criterion) {
    let pts = scatter(500, 7);
    let m = maxdist_core::energy::PointCloud::finite(&pts).unwrap();
    let pos = scatter(40, 9);
    let edges: Vec<(usize, usize)> = (1..pos.len()).map(|i| (i - 1, i)).collect();
    let objective = PenalizedObjective {
        m: &m,
        r: 0.1,
        weight: 1e4,
        beta: 2e5,
    };
    c.bench_function("optimizer/gradient-500x40", |b| {
        b.iter(|| objective.gradient(&pos, &edges).len())
    });
}

fn bench_trim(c: &mut Criterion) {
    let pts = scatter(5, 11);
    let m = maxdist_core::energy::PointCloud::finite(&pts).unwrap();
    c.bench_function("minlab/trimmed-tree-5", |b| {
        b.iter(|| trimmed_tree(&m, 0.01).map(|g| g.total_length()))
    });
}

criterion_group!(
    benches,
    bench_energy,
    bench_steiner,
    bench_horseshoe,
    bench_gradient,
    bench_trim
);
criterion_main!(benches);
