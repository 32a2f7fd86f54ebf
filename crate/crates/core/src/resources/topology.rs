use super::catalog::{CatalogError, GridCatalog};
use super::metrics::{Bandwidth, LinkMetrics};
use crate::report::{Finding, FindingCode, ValidationReport};

/// Effective metrics of the unique tree path between two nodes.
///
/// Climbing from a group to its parent crosses the group's uplink; stepping
/// between two direct members of the lowest common group crosses that
/// group's internal link once. Latency adds up along the path and bandwidth
/// is the path minimum.
pub fn path_metrics(catalog: &GridCatalog, a: &str, b: &str) -> Result<LinkMetrics, CatalogError> {
    let pa = catalog
        .node_position(a)
        .ok_or_else(|| CatalogError::UnknownNode(a.to_string()))?;
    let pb = catalog
        .node_position(b)
        .ok_or_else(|| CatalogError::UnknownNode(b.to_string()))?;
    Ok(path_between(catalog, pa, pb))
}

/// Same as [`path_metrics`] on node positions. Panics on out-of-range positions.
pub(crate) fn path_between(catalog: &GridCatalog, a: usize, b: usize) -> LinkMetrics {
    if a == b {
        return LinkMetrics::IDENTITY;
    }
    // Walk from the lower position so that (a, b) and (b, a) add the same
    // floats in the same order.
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let groups = &catalog.groups;
    let mut ga = catalog.node_group[a];
    let mut gb = catalog.node_group[b];

    let mut near = Vec::new();
    let mut far = Vec::new();
    let uplink = |g: usize| groups[g].uplink.expect("non-root groups carry an uplink");
    while groups[ga].depth > groups[gb].depth {
        near.push(uplink(ga));
        ga = groups[ga].parent.expect("deeper group has a parent");
    }
    while groups[gb].depth > groups[ga].depth {
        far.push(uplink(gb));
        gb = groups[gb].parent.expect("deeper group has a parent");
    }
    while ga != gb {
        near.push(uplink(ga));
        far.push(uplink(gb));
        ga = groups[ga].parent.expect("distinct groups at equal depth are not both root");
        gb = groups[gb].parent.expect("distinct groups at equal depth are not both root");
    }

    let mut latency = 0.0;
    let mut bandwidth = Bandwidth::Unbounded;
    let edges = near
        .iter()
        .chain(std::iter::once(&groups[ga].internal))
        .chain(far.iter().rev());
    for edge in edges {
        latency += edge.latency_ms;
        bandwidth = bandwidth.min(edge.bandwidth);
    }
    LinkMetrics {
        latency_ms: latency,
        bandwidth,
    }
}

/// Flags groups whose internal link is worse than leaving the group and
/// coming back: internal latency above twice the uplink latency, or internal
/// bandwidth below the uplink bandwidth.
///
/// On catalogs without such groups the path metric satisfies the latency
/// triangle inequality and bandwidth monotonicity; with them it may not.
pub fn hierarchy_findings(catalog: &GridCatalog) -> ValidationReport {
    let mut findings = Vec::new();
    for group in &catalog.groups {
        let Some(uplink) = group.uplink else { continue };
        if group.internal.latency_ms > 2.0 * uplink.latency_ms {
            findings.push(Finding::warning(
                FindingCode::NonHierarchicalLink,
                group.id.clone(),
                format!(
                    "internal latency {} ms exceeds twice the uplink latency {} ms",
                    group.internal.latency_ms, uplink.latency_ms
                ),
            ));
        }
        if group.internal.bandwidth < uplink.bandwidth {
            findings.push(Finding::warning(
                FindingCode::NonHierarchicalLink,
                group.id.clone(),
                format!(
                    "internal bandwidth {} Mbps is below the uplink bandwidth {} Mbps",
                    group.internal.bandwidth, uplink.bandwidth
                ),
            ));
        }
    }
    ValidationReport::new(findings)
}
