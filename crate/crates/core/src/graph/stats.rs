use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size and sparsity summary of a graph.
///
/// Average degree is `E / N` (edges per node, not `2E / N`). Density is
/// `E / (N (N - 1))`, i.e. raw edge count over ordered node pairs; parallel
/// edges and self-loops are counted in `E` and the denominator is not adjusted
/// for them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub node_count: u64,
    pub edge_count: u64,
    pub average_degree: f64,
    pub node_density: f64,
}

impl GraphStats {
    pub fn from_counts(node_count: u64, edge_count: u64) -> Self {
        let n = node_count as f64;
        let e = edge_count as f64;
        let average_degree = if node_count > 0 { e / n } else { 0.0 };
        let node_density = if node_count > 1 {
            e / (n * (n - 1.0))
        } else {
            0.0
        };
        GraphStats {
            node_count,
            edge_count,
            average_degree,
            node_density,
        }
    }
}

/// Per-field relative change, in percent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercentChange {
    pub node_count: f64,
    pub edge_count: f64,
    pub average_degree: f64,
    pub node_density: f64,
}

pub fn percent_change(before: &GraphStats, after: &GraphStats) -> Result<PercentChange> {
    fn pct(field: &'static str, b: f64, a: f64) -> Result<f64> {
        if b == 0.0 {
            return Err(Error::UndefinedChange(field));
        }
        Ok(100.0 * (a - b) / b)
    }
    Ok(PercentChange {
        node_count: pct(
            "node_count",
            before.node_count as f64,
            after.node_count as f64,
        )?,
        edge_count: pct(
            "edge_count",
            before.edge_count as f64,
            after.edge_count as f64,
        )?,
        average_degree: pct(
            "average_degree",
            before.average_degree,
            after.average_degree,
        )?,
        node_density: pct("node_density", before.node_density, after.node_density)?,
    })
}
