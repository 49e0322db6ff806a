use std::path::Path;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use eonsim::config::load_config;
use eonsim::qot::{derive_coefficients, route_snr, LinkSpectralState, PhysicalParams, SpectralChannel};
use eonsim::sweep::{run_sweep_with, Execution};

fn sweep_execution(c: &mut Criterion) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/single_link.toml");
    let mut scenario = load_config(&path).unwrap();
    scenario.request_count = 5_000;
    scenario.seeds = (1..=4).collect();
    scenario.epsilon_sweep.step = 1.0;

    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, mode) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| run_sweep_with(black_box(&scenario), mode).unwrap())
        });
    }
    group.finish();
}

fn loaded_link_snr(c: &mut Criterion) {
    let p = PhysicalParams::default();
    let coeff = derive_coefficients(&p).unwrap();
    let mut link = LinkSpectralState::new(2).unwrap();
    let mut start = 0;
    let mut channels = Vec::new();
    while start + 4 <= 320 {
        let width = 1 + (start / 7) % 4;
        let eps = if (140..150).contains(&start) { 2.0 } else { 0.0 };
        let ch = SpectralChannel::new(start, width, eps, &p).unwrap();
        link.insert(ch).unwrap();
        channels.push(ch);
        start += width + 2;
    }
    let victim = channels[channels.len() / 2];
    c.bench_function("route_snr/full_link", |b| {
        b.iter(|| route_snr(black_box(&victim), [&link], &coeff, &p).unwrap())
    });
}

criterion_group!(benches, sweep_execution, loaded_link_snr);
criterion_main!(benches);
