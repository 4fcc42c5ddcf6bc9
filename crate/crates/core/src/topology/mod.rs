//! Degree-`k` topologies stored as `k` switch-layer permutations, their
//! generators, and structural metrics.

mod build;
mod contract;
mod matching;
mod metrics;
mod shift;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::NetworkParams;

pub use build::{build_circulant, build_cycle, build_generalized_kautz, choose_circulant_offsets, genkautz_edges};
pub use contract::{contract_sequence, ContractionChain, ContractionStep};
pub use matching::{decompose_regular, max_bipartite_matching};
pub(crate) use metrics::UNREACHABLE;
pub use metrics::{
    diameter, expansion_profile, is_node_symmetric, is_strongly_connected, translation_offsets, DistanceTable,
    ExpansionProfile,
};
pub use shift::{
    build_shift_sequence, build_shift_sequence_with, shift_list_power_sum, shift_order, shift_power_sums,
    shift_sequence_from, ShiftOrder,
};

/// How a topology was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "familyParams", rename_all = "lowercase")]
pub enum Family {
    Cycle,
    Circulant {
        offsets: Vec<usize>,
    },
    #[serde(rename = "genkautz")]
    GenKautz,
    Contracted {
        /// Stage and round of the schedule whose flows became direct edges.
        stage: usize,
        round: usize,
        hops: usize,
    },
    Custom,
}

/// A size-`n` degree-`k` directed graph realized by `k` switches.
///
/// `layers[j][u]` is the out-neighbor of `u` through switch `j`. Every layer
/// is a fixed-point-free permutation, so each node has exactly one in and one
/// out link per switch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr", into = "TopologyRepr")]
pub struct Topology {
    params: NetworkParams,
    layers: Vec<Vec<usize>>,
    family: Family,
}

#[derive(Clone, Serialize, Deserialize)]
struct TopologyRepr {
    n: usize,
    k: usize,
    layers: Vec<Vec<usize>>,
    #[serde(flatten)]
    family: Family,
}

impl TryFrom<TopologyRepr> for Topology {
    type Error = Error;

    fn try_from(r: TopologyRepr) -> Result<Self> {
        if r.layers.len() != r.k {
            return Err(Error::InvalidTopology(format!("expected {} layers, found {}", r.k, r.layers.len())));
        }
        Topology::new(NetworkParams::new(r.n, r.k)?, r.layers, r.family)
    }
}

impl From<Topology> for TopologyRepr {
    fn from(t: Topology) -> Self {
        TopologyRepr { n: t.params.n, k: t.params.k, layers: t.layers, family: t.family }
    }
}

impl Topology {
    pub fn new(params: NetworkParams, layers: Vec<Vec<usize>>, family: Family) -> Result<Self> {
        if layers.len() != params.k {
            return Err(Error::InvalidTopology(format!("expected {} layers, found {}", params.k, layers.len())));
        }
        for (j, layer) in layers.iter().enumerate() {
            check_layer(params.n, layer).map_err(|e| Error::InvalidTopology(format!("layer {j}: {e}")))?;
        }
        Ok(Topology { params, layers, family })
    }

    pub fn params(&self) -> NetworkParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn successor(&self, node: usize, layer: usize) -> usize {
        self.layers[layer][node]
    }

    /// `(layer, neighbor)` pairs leaving `node`, in layer order.
    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layers.iter().enumerate().map(move |(j, l)| (j, l[node]))
    }

    /// Entry `(u, v)` counts the layers wiring `u` to `v`.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let mut m = vec![vec![0u32; n]; n];
        for layer in &self.layers {
            for (u, &v) in layer.iter().enumerate() {
                m[u][v] += 1;
            }
        }
        m
    }

    /// Physical node `perm[x]` takes the role of node `x`.
    pub fn relabeled(&self, perm: &[usize]) -> Topology {
        let n = self.n();
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                let mut out = vec![0; n];
                for (x, &y) in layer.iter().enumerate() {
                    out[perm[x]] = perm[y];
                }
                out
            })
            .collect();
        Topology { params: self.params, layers, family: self.family.clone() }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph topology {\n");
        for u in 0..self.n() {
            s.push_str(&format!("  {u};\n"));
        }
        for (j, layer) in self.layers.iter().enumerate() {
            for (u, &v) in layer.iter().enumerate() {
                s.push_str(&format!("  {u} -> {v} [label=\"{j}\"];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

fn check_layer(n: usize, layer: &[usize]) -> std::result::Result<(), String> {
    if layer.len() != n {
        return Err(format!("has {} entries, expected {n}", layer.len()));
    }
    let mut seen = vec![false; n];
    for (u, &v) in layer.iter().enumerate() {
        if v >= n {
            return Err(format!("node {u} maps out of range to {v}"));
        }
        if v == u {
            return Err(format!("node {u} maps to itself"));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(format!("node {v} has two in-links"));
        }
    }
    Ok(())
}

/// Ordered topologies sharing one set of network parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TopologySequence {
    pub topologies: Vec<Topology>,
    pub generation_trace: Vec<String>,
}

impl TopologySequence {
    pub fn new(topologies: Vec<Topology>, generation_trace: Vec<String>) -> Result<Self> {
        let Some(first) = topologies.first() else {
            return Err(Error::InvalidTopology("empty topology sequence".into()));
        };
        if topologies.iter().any(|t| t.params() != first.params()) {
            return Err(Error::InvalidTopology("topologies in a sequence must share n and k".into()));
        }
        if topologies.windows(2).any(|w| w[0].layers == w[1].layers) {
            return Err(Error::InvalidTopology("consecutive topologies are identical".into()));
        }
        Ok(TopologySequence { topologies, generation_trace })
    }

    pub fn len(&self) -> usize {
        self.topologies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topologies.is_empty()
    }
}

/// Completes a partial fixed-point-free permutation.
///
/// `partial[s] = Some(t)` entries are kept. Every free source is matched to a
/// free target, highest `score(s, t)` first; `score` returning `None` marks a
/// target the caller wants to avoid unless nothing else is left. Self-loops
/// are never produced; when only a loop would remain, one kept entry is
/// swapped to make room.
pub(crate) fn complete_permutation(
    partial: &[Option<usize>],
    mut score: impl FnMut(usize, usize) -> Option<i64>,
) -> Vec<usize> {
    let n = partial.len();
    let mut taken = vec![false; n];
    for t in partial.iter().flatten() {
        taken[*t] = true;
    }
    let mut out: Vec<Option<usize>> = partial.to_vec();
    for s in 0..n {
        if out[s].is_some() {
            continue;
        }
        let mut best: Option<(Option<i64>, usize)> = None;
        for t in (0..n).filter(|&t| !taken[t] && t != s) {
            let sc = score(s, t);
            if best.is_none_or(|(b, _)| sc > b) {
                best = Some((sc, t));
            }
        }
        match best {
            Some((_, t)) => {
                out[s] = Some(t);
                taken[t] = true;
            }
            None => {
                // Only `s` itself is free: steal the target of an earlier free
                // source `r` and hand `s` to it.
                let r = (0..s)
                    .find(|&r| partial[r].is_none() && out[r].is_some_and(|t| t != s))
                    .or_else(|| (0..n).find(|&r| r != s && out[r].is_some_and(|t| t != s)))
                    .expect("n >= 2 leaves a swap partner");
                out[s] = out[r];
                out[r] = Some(s);
                taken[s] = true;
            }
        }
    }
    out.into_iter().map(|t| t.expect("every source assigned")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_fixed_points_and_non_bijections() {
        let p = NetworkParams::new(3, 1).unwrap();
        assert!(Topology::new(p, vec![vec![0, 2, 1]], Family::Custom).is_err());
        assert!(Topology::new(p, vec![vec![1, 1, 0]], Family::Custom).is_err());
        assert!(Topology::new(p, vec![vec![1, 2, 0]], Family::Custom).is_ok());
    }

    #[test]
    fn json_shape_and_round_trip() {
        let t = build_circulant(8, &[1, 3]).unwrap();
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["n"], 8);
        assert_eq!(json["k"], 2);
        assert_eq!(json["family"], "circulant");
        assert_eq!(json["familyParams"]["offsets"], serde_json::json!([1, 3]));
        let back: Topology = serde_json::from_value(json).unwrap();
        assert_eq!(back, t);

        let gk = build_generalized_kautz(8, 2).unwrap();
        let back: Topology = serde_json::from_str(&serde_json::to_string(&gk).unwrap()).unwrap();
        assert_eq!(back, gk);
    }

    #[test]
    fn json_rejects_bad_layers() {
        let bad = r#"{"n":3,"k":1,"layers":[[0,2,1]],"family":"custom"}"#;
        assert!(serde_json::from_str::<Topology>(bad).is_err());
    }

    #[test]
    fn relabel_preserves_structure() {
        let t = build_cycle(5).unwrap();
        let r = t.relabeled(&[4, 2, 0, 1, 3]);
        // 0->1 becomes 4->2
        assert_eq!(r.successor(4, 0), 2);
        let rows: Vec<u32> = r.adjacency_matrix().iter().map(|row| row.iter().sum()).collect();
        assert!(rows.iter().all(|&s| s == 1));
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = build_circulant(4, &[1, 2]).unwrap().to_dot();
        assert_eq!(dot.matches("->").count(), 8);
        assert!(dot.contains("0 -> 2 [label=\"1\"]"));
    }

    #[test]
    fn completion_never_loops() {
        for n in 2..9 {
            let partial = vec![None; n];
            let p = complete_permutation(&partial, |s, t| Some(((t + n - s) % n) as i64));
            let mut seen = vec![false; n];
            for (s, &t) in p.iter().enumerate() {
                assert_ne!(s, t);
                assert!(!std::mem::replace(&mut seen[t], true));
            }
        }
        // Forced swap: only node 2 is free on both sides.
        let p = complete_permutation(&[Some(1), Some(0), None], |_, _| Some(0));
        assert!(p.iter().enumerate().all(|(s, &t)| s != t));
    }
}
