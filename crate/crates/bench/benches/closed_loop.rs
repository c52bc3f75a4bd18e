use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mecanum_ekf::{run_closed_loop, EstimatorMode, ScenarioConfig};

fn trials(c: &mut Criterion) {
    let figure7 = ScenarioConfig::figure7();
    let mut group = c.benchmark_group("figure7_trial");
    group.sample_size(20);
    for mode in [EstimatorMode::Odo, EstimatorMode::Fused, EstimatorMode::FusedCamera] {
        group.bench_function(mode.as_str(), |b| b.iter(|| run_closed_loop(&figure7, mode, black_box(1))));
    }
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
