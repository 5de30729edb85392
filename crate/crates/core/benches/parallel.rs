//! Rayon vs sequential benches for the data-parallel inner loops: the
//! 1024-ray scan, the repulsive force sum, and a short end-to-end run.
//!
//! The parallel variants only exist with the default `parallel` feature;
//! `cargo bench` compares both, `--no-default-features` benches only the
//! sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::Vector3;

use spoofsim::avoidance::compute_repulsive_seq;
use spoofsim::scenario::ScenarioConfig;
use spoofsim::sensors::{lidar_scan_seq, LaserScan, LidarConfig};
use spoofsim::world::{Obstacle, VehicleState, World};
use spoofsim::Simulation;

fn world_with_discs(n: usize) -> World {
    let mut obstacles = Vec::with_capacity(n);
    for i in 0..n {
        let angle = i as f64 * 0.61803398875 * std::f64::consts::TAU;
        let r = 4.0 + (i % 17) as f64;
        obstacles.push(Obstacle {
            center: [r * angle.cos(), r * angle.sin()],
            radius: 0.4 + (i % 5) as f64 * 0.3,
        });
    }
    World { obstacles }
}

fn bench_scan(c: &mut Criterion) {
    let cfg = LidarConfig::default();
    let pose = VehicleState::new(Vector3::new(0.0, 0.0, 2.0), 0.3);
    let mut group = c.benchmark_group("lidar_scan");
    for n in [1usize, 16, 128] {
        let world = world_with_discs(n);
        group.bench_with_input(BenchmarkId::new("seq", n), &world, |b, w| {
            b.iter(|| lidar_scan_seq(w, &pose, &cfg))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", n), &world, |b, w| {
            b.iter(|| spoofsim::sensors::lidar_scan_par(w, &pose, &cfg))
        });
    }
    group.finish();
}

fn bench_repulsive(c: &mut Criterion) {
    let mut scan = LaserScan::uniform(30.0, &LidarConfig::default());
    for i in (0..1024).step_by(2) {
        scan.ranges[i] = 0.5 + (i % 25) as f64 * 0.1;
    }
    let mut group = c.benchmark_group("repulsive_force");
    group.bench_function("seq", |b| {
        b.iter(|| compute_repulsive_seq(&scan, 0.4, 0.0, 1.0, 3.0))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| spoofsim::avoidance::compute_repulsive_par(&scan, 0.4, 0.0, 1.0, 3.0))
    });
    group.finish();
}

fn bench_short_run(c: &mut Criterion) {
    let cfg = ScenarioConfig::from_toml_str(
        r#"
id = "bench"
duration_ticks = 5000

[mission]
frame_init_samples = 3

[[world.obstacles]]
x = 2.0
y = 8.0
radius = 1.0

[[mission.waypoints]]
x = 0.0
y = 4.0
z = 3.0

[[checks]]
kind = "no-collision"
"#,
    )
    .unwrap();
    c.bench_function("run_5000_ticks", |b| {
        b.iter(|| Simulation::new(&cfg, 100).run())
    });
}

criterion_group!(benches, bench_scan, bench_repulsive, bench_short_run);
criterion_main!(benches);
