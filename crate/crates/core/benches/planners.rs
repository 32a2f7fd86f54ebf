use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gridplan::descriptors::{parse_assembly, Objective, UserGoal};
use gridplan::planner::{plan_many, Exhaustive, Planner, PlannerKind, PlanningProblem};
use gridplan::resources::parse_catalog;
use serde_json::{json, Value};

/// `sites` sites of `per_site` nodes and a chain of `components`
/// components with loose latency bounds.
fn problem(components: usize, sites: usize, per_site: usize, salt: usize) -> PlanningProblem {
    let groups: Vec<Value> = (0..sites)
        .map(|s| {
            let nodes: Vec<Value> = (0..per_site)
                .map(|n| {
                    json!({"id": format!("s{s}n{n}"), "arch": "x86_64", "os": "linux", "cpuCount": 4,
                           "cpuSpeedMHz": 2000, "memoryMB": 1024 + 256 * ((n + s + salt) % 3), "storageGB": 10})
                })
                .collect();
            json!({"id": format!("site{s}"), "internal": {"latencyMs": 0.125 * (1 + (s + salt) % 4) as f64, "bandwidthMbps": 1000},
                   "uplink": {"latencyMs": 2 + (s * 3 + salt) % 5, "bandwidthMbps": 100}, "nodes": nodes})
        })
        .collect();
    let catalog = json!({"formatVersion": 1, "group": {"id": "root", "internal": {"latencyMs": 0.5, "bandwidthMbps": 10000}, "groups": groups}});
    let comps: Vec<Value> = (0..components)
        .map(|i| {
            json!({"id": format!("c{i}"), "implementations": [{"arch": "x86_64", "os": "linux", "memoryMB": 300 + 50 * ((i + salt) % 5)}],
                   "provides": ["out"], "uses": ["in"]})
        })
        .collect();
    let links: Vec<Value> = (1..components)
        .map(|i| {
            json!({"id": format!("l{i}"), "from": {"component": format!("c{}", i - 1), "port": "out"},
                   "to": {"component": format!("c{i}"), "port": "in"}, "maxLatencyMs": 20})
        })
        .collect();
    let app = json!({"formatVersion": 1, "name": "bench", "components": comps, "connections": links});
    PlanningProblem::new(
        parse_assembly(&serde_json::to_vec(&app).unwrap()).unwrap(),
        parse_catalog(&serde_json::to_vec(&catalog).unwrap()).unwrap(),
        UserGoal::with_objective(Objective::MinimizeTotalLatency),
    )
    .unwrap()
}

fn exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive");
    group.sample_size(10);
    for (components, sites, per_site) in [(5, 2, 3), (6, 3, 2), (7, 2, 3)] {
        let p = problem(components, sites, per_site, 0);
        let label = format!("{components}x{}", sites * per_site);
        group.bench_with_input(BenchmarkId::new("sequential", &label), &p, |b, p| {
            b.iter(|| Exhaustive::sequential().plan(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", &label), &p, |b, p| {
            b.iter(|| Exhaustive::parallel().plan(black_box(p)))
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let problems: Vec<PlanningProblem> = (0..64).map(|salt| problem(5, 2, 3, salt)).collect();
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    for kind in [PlannerKind::Constrained, PlannerKind::Exhaustive] {
        group.bench_function(BenchmarkId::new("sequential", kind.as_str()), |b| {
            b.iter(|| plan_many(kind, black_box(&problems), false))
        });
        group.bench_function(BenchmarkId::new("parallel", kind.as_str()), |b| {
            b.iter(|| plan_many(kind, black_box(&problems), true))
        });
    }
    group.finish();
}

criterion_group!(benches, exhaustive, batch);
criterion_main!(benches);
