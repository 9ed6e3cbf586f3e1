use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use warpflow::diagnostics::{diagnose, snapshots, DiagnosticsOptions};
use warpflow::flow::{evolve, Trajectory};
use warpflow::io::{emit_trajectory, parse_config, OutputDir};
use warpflow::par::Execution;
use warpflow::residuals::{catalog, evaluate_trajectory, ResidualOptions};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn trajectory(record_every: usize) -> Trajectory {
    let cfg = parse_config(&format!(
        "preset=hyperbolic\nM=256\nt_end=0.25\nrecord_every={record_every}"
    ))
    .unwrap();
    evolve(&cfg).unwrap()
}

fn bench(c: &mut Criterion) {
    let traj = trajectory(10);
    let dense = trajectory(1);
    let specs = catalog(dense.config.n);

    let mut g = c.benchmark_group("diagnostics");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("snapshots", name), &exec, |b, &exec| {
            b.iter(|| snapshots(&traj, exec).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("diagnose", name), &exec, |b, &exec| {
            let opts = DiagnosticsOptions {
                exec,
                ..DiagnosticsOptions::default()
            };
            b.iter(|| diagnose(&traj, &opts).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("residuals");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("evaluate", name), &exec, |b, &exec| {
            let opts = ResidualOptions {
                exec,
                ..ResidualOptions::default()
            };
            b.iter(|| evaluate_trajectory(&dense, &specs, &opts).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("output");
    g.sample_size(10);
    let tmp = tempfile::tempdir().unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("emit_trajectory", name), &exec, |b, &exec| {
            b.iter(|| {
                let mut out = OutputDir::create(tmp.path().join(name)).unwrap();
                emit_trajectory(&mut out, &traj, exec).unwrap();
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
