use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qkdlab::harness::{run_campaign_with, CampaignConfig, Execution, ProtocolKind};

fn backends(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for protocol in [ProtocolKind::P2, ProtocolKind::Pop] {
        let config = CampaignConfig::new(protocol, 200_000, 1.0, 42);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(format!("{protocol:?}"), format!("{exec:?}"));
            group.bench_with_input(id, &config, |b, cfg| b.iter(|| run_campaign_with(cfg, exec).unwrap()));
        }
    }
    group.finish();
}

criterion_group!(benches, backends);
criterion_main!(benches);
