mod common;

use common::{random_tree, OracleTree};
use gridplan::resources::{hierarchy_findings, path_metrics, Bandwidth, GridCatalog, LinkMetrics};
use proptest::prelude::*;
use rand::Rng;

const EPS: f64 = 1e-9;

fn oracle_metrics(tree: &OracleTree, a: usize, b: usize) -> LinkMetrics {
    let (latency_ms, bw) = tree.path(a, b);
    LinkMetrics {
        latency_ms,
        bandwidth: bw.map_or(Bandwidth::Unbounded, Bandwidth::Mbps),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_metrics_match_the_tree_walk(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let hierarchical = rng.random_bool(0.5);
        let nodes = rng.random_range(1..=50);
        let root = random_tree(&mut rng, nodes, 8, hierarchical);
        let catalog = GridCatalog::from_root(root.clone()).unwrap();
        let tree = OracleTree::new(&root);
        for _ in 0..200 {
            let (a, b) = (rng.random_range(0..nodes), rng.random_range(0..nodes));
            let (ia, ib) = (&tree.nodes[a].id, &tree.nodes[b].id);
            prop_assert_eq!(path_metrics(&catalog, ia, ib).unwrap(), oracle_metrics(&tree, a, b));
        }
    }

    #[test]
    fn metric_laws_on_hierarchical_trees(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let nodes = rng.random_range(1..=50);
        let catalog = GridCatalog::from_root(random_tree(&mut rng, nodes, 8, true)).unwrap();
        prop_assert!(hierarchy_findings(&catalog).is_empty());
        let ids: Vec<&str> = catalog.nodes().iter().map(|n| n.id.as_str()).collect();
        let m = |a: &str, b: &str| path_metrics(&catalog, a, b).unwrap();
        for _ in 0..200 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| ids[rng.random_range(0..ids.len())];
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let (ab, ba, bc, ac) = (m(a, b), m(b, a), m(b, c), m(a, c));
            prop_assert_eq!(ab.latency_ms.to_bits(), ba.latency_ms.to_bits());
            prop_assert_eq!(ab.bandwidth, ba.bandwidth);
            prop_assert_eq!(m(a, a), LinkMetrics::IDENTITY);
            prop_assert!(ac.latency_ms <= ab.latency_ms + bc.latency_ms + EPS);
            prop_assert!(ac.bandwidth >= ab.bandwidth.min(bc.bandwidth));
        }
    }

    #[test]
    fn hierarchy_warnings_flag_exactly_the_offending_groups(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let root = random_tree(&mut rng, 6, 6, false);
        let catalog = GridCatalog::from_root(root.clone()).unwrap();
        let mut expected = Vec::new();
        let mut stack = vec![&root];
        while let Some(g) = stack.pop() {
            if let Some(up) = &g.uplink {
                let slow = g.internal.latency_ms > 2.0 * up.latency_ms;
                let thin = match (g.internal.bandwidth, up.bandwidth) {
                    (Bandwidth::Mbps(i), Bandwidth::Mbps(u)) => i < u,
                    (Bandwidth::Mbps(_), Bandwidth::Unbounded) => true,
                    _ => false,
                };
                if slow || thin {
                    expected.push(g.id.clone());
                }
            }
            stack.extend(&g.groups);
        }
        expected.sort();
        let mut flagged: Vec<String> = hierarchy_findings(&catalog).findings().iter().map(|f| f.subject.clone()).collect();
        flagged.dedup();
        prop_assert_eq!(flagged, expected);
    }
}

#[test]
fn non_hierarchical_groups_can_break_the_triangle() {
    let doc = br#"{"formatVersion":1,"group":{"id":"root","internal":{"latencyMs":1,"bandwidthMbps":1000},
        "groups":[{"id":"slow","internal":{"latencyMs":50,"bandwidthMbps":1000},"uplink":{"latencyMs":1,"bandwidthMbps":1000},
                   "nodes":[{"id":"a","arch":"x86_64","os":"linux","cpuCount":1,"cpuSpeedMHz":1,"memoryMB":1,"storageGB":1},
                            {"id":"c","arch":"x86_64","os":"linux","cpuCount":1,"cpuSpeedMHz":1,"memoryMB":1,"storageGB":1}]}],
        "nodes":[{"id":"b","arch":"x86_64","os":"linux","cpuCount":1,"cpuSpeedMHz":1,"memoryMB":1,"storageGB":1}]}}"#;
    let catalog = gridplan::resources::parse_catalog(doc).unwrap();
    let lat = |x, y| path_metrics(&catalog, x, y).unwrap().latency_ms;
    assert_eq!(lat("a", "c"), 50.0);
    assert_eq!(lat("a", "b") + lat("b", "c"), 4.0);
    assert_eq!(hierarchy_findings(&catalog).len(), 1);
}
