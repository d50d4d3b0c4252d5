//! Bipartite encoding of a FRAM model and degree prestige centrality.
//!
//! Every relationship becomes a node sitting between its two functions: the
//! relationship `r = {o, d, a, qn}` with weight `w` yields the edges
//! `o -> r` and `r -> d`, both weighted `w`. Functions never connect directly
//! to functions, nor relationships to relationships.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::ids::compare_ids;
use crate::model::{DanglingReference, FramModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("model is inconsistent: {} dangling reference(s), first is relationship `{}` -> `{}`",
        .0.len(), .0[0].relationship, .0[0].function)]
    InvalidModel(Vec<DanglingReference>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Function,
    Relationship,
}

impl NodeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Function => "function",
            NodeClass::Relationship => "relationship",
        }
    }
}

/// Dense adjacency matrix over `functions ++ relationships`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteMatrix {
    ids: Vec<String>,
    function_count: usize,
    entries: Vec<f64>,
}

impl BipartiteMatrix {
    pub fn dim(&self) -> usize {
        self.ids.len()
    }

    pub fn function_count(&self) -> usize {
        self.function_count
    }

    pub fn node_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn class_of(&self, index: usize) -> NodeClass {
        if index < self.function_count {
            NodeClass::Function
        } else {
            NodeClass::Relationship
        }
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|n| n == id)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    /// Nonzero entries as `(from, to, weight)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.dim();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(move |(k, w)| (k / n, k % n, *w))
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Sum of column `col`: the weight of all edges ending at that node.
    pub fn in_weight(&self, col: usize) -> f64 {
        let n = self.dim();
        (0..n).map(|row| self.entries[row * n + col]).sum()
    }
}

/// Builds the bipartite adjacency matrix. Parallel relationships between the
/// same pair of functions stay separate nodes.
pub fn encode_bipartite(model: &FramModel) -> Result<BipartiteMatrix, GraphError> {
    let report = model.validate();
    if !report.is_consistent() {
        return Err(GraphError::InvalidModel(report.dangling));
    }
    let function_count = model.functions().len();
    let ids: Vec<String> = model
        .functions()
        .iter()
        .map(|f| f.id.clone())
        .chain(model.relationships().iter().map(|r| r.id.clone()))
        .collect();
    let n = ids.len();
    let mut entries = vec![0.0; n * n];
    for (k, r) in model.relationships().iter().enumerate() {
        let node = function_count + k;
        // Both ends were checked by validate().
        let origin = model.function_index(&r.origin).expect("origin exists");
        let destination = model.function_index(&r.destination).expect("destination exists");
        entries[origin * n + node] = r.weight;
        entries[node * n + destination] = r.weight;
    }
    Ok(BipartiteMatrix {
        ids,
        function_count,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrestigeEntry {
    pub id: String,
    pub class: NodeClass,
    /// Sum of inbound edge weights.
    pub raw: f64,
    /// `raw` divided by the total edge weight of the graph.
    pub normalized: f64,
    /// 1-based position in the full ranking.
    pub rank: usize,
}

/// Degree prestige of every node, sorted by descending raw value with ties
/// broken by ascending node id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrestigeTable {
    pub total_weight: f64,
    pub entries: Vec<PrestigeEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Functions,
    Relationships,
    All,
}

impl Scope {
    fn admits(self, class: NodeClass) -> bool {
        match self {
            Scope::All => true,
            Scope::Functions => class == NodeClass::Function,
            Scope::Relationships => class == NodeClass::Relationship,
        }
    }
}

impl std::str::FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "functions" => Ok(Scope::Functions),
            "relationships" => Ok(Scope::Relationships),
            "all" => Ok(Scope::All),
            other => Err(format!(
                "unknown scope `{other}` (expected functions|relationships|all)"
            )),
        }
    }
}

fn by_prestige(a: &PrestigeEntry, b: &PrestigeEntry) -> Ordering {
    b.raw
        .partial_cmp(&a.raw)
        .unwrap_or(Ordering::Equal)
        .then_with(|| compare_ids(&a.id, &b.id))
}

pub fn degree_prestige(model: &FramModel) -> Result<PrestigeTable, GraphError> {
    let matrix = encode_bipartite(model)?;
    Ok(prestige_from_matrix(&matrix))
}

/// Column sums of the adjacency matrix.
pub fn prestige_from_matrix(matrix: &BipartiteMatrix) -> PrestigeTable {
    let total_weight = matrix.total_weight();
    let mut entries: Vec<PrestigeEntry> = (0..matrix.dim())
        .map(|col| {
            let raw = matrix.in_weight(col);
            PrestigeEntry {
                id: matrix.node_ids()[col].clone(),
                class: matrix.class_of(col),
                raw,
                normalized: if total_weight > 0.0 { raw / total_weight } else { 0.0 },
                rank: 0,
            }
        })
        .collect();
    entries.sort_by(by_prestige);
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    PrestigeTable {
        total_weight,
        entries,
    }
}

impl PrestigeTable {
    pub fn get(&self, id: &str) -> Option<&PrestigeEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// Nodes of `scope` in ranking order, re-ranked from 1 within the scope.
pub fn rank_nodes(table: &PrestigeTable, scope: Scope) -> Vec<PrestigeEntry> {
    let mut ranked: Vec<PrestigeEntry> = table
        .entries
        .iter()
        .filter(|e| scope.admits(e.class))
        .cloned()
        .collect();
    ranked.sort_by(by_prestige);
    for (i, e) in ranked.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandAssignment {
    pub id: String,
    pub class: NodeClass,
    pub rank: usize,
    pub normalized: f64,
    /// 0 is the innermost ring (highest prestige).
    pub band: usize,
}

/// Concentric ring assignment for external renderers: the normalized prestige
/// range of the ranked nodes is split into `bands` equal-width rings, highest
/// prestige innermost.
pub fn concentric_bands(ranked: &[PrestigeEntry], bands: usize) -> Vec<BandAssignment> {
    let bands = bands.max(1);
    let max = ranked.iter().map(|e| e.normalized).fold(0.0_f64, f64::max);
    ranked
        .iter()
        .map(|e| {
            let band = if max > 0.0 {
                let depth = (1.0 - e.normalized / max) * bands as f64;
                (depth.floor() as usize).min(bands - 1)
            } else {
                bands - 1
            };
            BandAssignment {
                id: e.id.clone(),
                class: e.class,
                rank: e.rank,
                normalized: e.normalized,
                band,
            }
        })
        .collect()
}
