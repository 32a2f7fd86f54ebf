//! Grid resource catalog: compute nodes placed in a tree of network groups.

mod catalog;
mod locator;
mod metrics;
mod topology;

pub use catalog::{
    canonical_catalog, nodes_in_group, parse_catalog, serialize_catalog, CatalogError,
    ComputeNode, GridCatalog, NetworkGroup, RawNode,
};
pub use locator::{fetch_catalog, CatalogFetcher, CatalogLocator, FetchError, FileFetcher, LocatorScheme};
pub use metrics::{format_quantity, Bandwidth, LinkMetrics};
pub use topology::{hierarchy_findings, path_metrics};

pub(crate) use topology::path_between;
