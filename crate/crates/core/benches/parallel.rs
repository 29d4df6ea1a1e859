use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use neumann_spectra::exec::{par_map, seq_map};
use neumann_spectra::fem::{assemble, assemble_sequential, solve_level};
use neumann_spectra::geometry::examples::{square_with_disk_hole, two_hole_disk};
use neumann_spectra::geometry::mesh;

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    for h in [0.04, 0.02, 0.01] {
        let m = mesh(&two_hole_disk(), h).unwrap();
        let n = m.triangles.len();
        g.bench_with_input(BenchmarkId::new("parallel", n), &m, |b, m| b.iter(|| assemble(m).unwrap()));
        g.bench_with_input(BenchmarkId::new("sequential", n), &m, |b, m| b.iter(|| assemble_sequential(m).unwrap()));
    }
    g.finish();
}

fn refinement_levels(c: &mut Criterion) {
    let d = square_with_disk_hole(2.0, 0.3);
    let hs = [0.16, 0.08, 0.04];
    let mut g = c.benchmark_group("refinement-levels");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| par_map(&hs, |&h| solve_level(&d, h, 6).unwrap())));
    g.bench_function("sequential", |b| b.iter(|| seq_map(&hs, |&h| solve_level(&d, h, 6).unwrap())));
    g.finish();
}

criterion_group!(benches, assembly, refinement_levels);
criterion_main!(benches);
