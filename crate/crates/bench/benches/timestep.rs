//! Whole time steps: assemble plus Newton solve, the unit of work the
//! transient driver repeats.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hygrotherm::assembly;
use hygrotherm::mesh::Mesh;
use hygrotherm::scenario::Scenario;
use hygrotherm::solver;
use hygrotherm::sparse::DirectSolver;

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("timestep");
    group.sample_size(10);
    for n in [10usize, 20, 40] {
        let mut s = Scenario::default();
        s.mesh.nx = n;
        s.mesh.ny = n;
        let mesh = Mesh::structured(s.domain.lx, s.domain.ly, n, n, s.boundary.sides()).unwrap();
        let m = s.constitutive_model().unwrap();
        // March 60 s in so the step under test does real Newton work.
        s.solver.t_end = 60.0;
        s.output.snapshot_every = 0.0;
        let outcome = solver::run(&mesh, &m, &s, &s.solver, |_| {});
        assert!(outcome.failure.is_none());
        let (_, x_n) = outcome.trajectory.snapshots.last().unwrap();

        let bc = s.boundary_params();
        let bv = s.boundary_values(60.0 + s.solver.dt);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n}x{n}")), &n, |b, _| {
            b.iter(|| {
                let sys =
                    assembly::assemble(&mesh, &m, bc, bv, black_box(x_n), s.solver.dt).unwrap();
                let mut linear = DirectSolver::new();
                solver::newton_solve(x_n, &sys, &s.solver, &mut linear).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, step);
criterion_main!(benches);
