use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::Strategy;
use crate::topology::Topology;
use crate::traffic::TrafficMatrix;

/// The flows of one round that share a hop count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionTerm {
    pub stage: usize,
    pub round: usize,
    pub group: usize,
    pub hops: usize,
    /// Nonzero mask entries with the chunks each serves.
    pub entries: Vec<(usize, usize, u64)>,
}

impl DecompositionTerm {
    /// Dense 0/1 mask.
    pub fn mask(&self, n: usize) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; n]; n];
        for &(s, d, _) in &self.entries {
            m[s][d] = 1;
        }
        m
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub terms: Vec<DecompositionTerm>,
}

impl Decomposition {
    /// `sum over terms of chunk-weighted masks`.
    pub fn reconstruct(&self, n: usize) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; n]; n];
        for t in &self.terms {
            for &(s, d, c) in &t.entries {
                m[s][d] += c;
            }
        }
        m
    }
}

/// Nodes reachable from `src` by walks of exactly `h` hops.
fn exact_walk_targets(topo: &Topology, src: usize, h: usize) -> Vec<bool> {
    let n = topo.n();
    let mut frontier = vec![false; n];
    frontier[src] = true;
    for _ in 0..h {
        let mut next = vec![false; n];
        for u in (0..n).filter(|&u| frontier[u]) {
            for (_, v) in topo.out_edges(u) {
                next[v] = true;
            }
        }
        frontier = next;
    }
    frontier
}

/// Rebuilds the masks of `strategy` and checks that every masked entry is an
/// `h`-hop walk on its stage's topology and that served chunks equal `a`.
/// Fails on the first violated term or pair.
pub fn verify_decomposition(strategy: &Strategy, a: &TrafficMatrix) -> Result<Decomposition> {
    let n = a.n();
    if strategy.n != n {
        return Err(Error::InvalidTraffic(format!("matrix is {n}x{n}, strategy has n={}", strategy.n)));
    }
    let mut terms = Vec::new();
    let mut walk_cache: BTreeMap<(usize, usize, usize), Vec<bool>> = BTreeMap::new();
    for (i, stage) in strategy.stages.iter().enumerate() {
        if stage.topology.n() != n {
            return Err(Error::InvalidTopology(format!("stage {i} has n={}", stage.topology.n())));
        }
        for (j, round) in stage.schedule.rounds.iter().enumerate() {
            let mut groups: BTreeMap<usize, Vec<(usize, usize, u64)>> = BTreeMap::new();
            for e in &round.entries {
                if e.src >= n || e.dst >= n || e.src == e.dst {
                    return Err(Error::InvalidPath { src: e.src, dst: e.dst, reason: "not a flow of this network".into() });
                }
                e.path.validate(&stage.topology, e.src, e.dst)?;
                let h = e.hops();
                let reach = walk_cache.entry((i, e.src, h)).or_insert_with(|| exact_walk_targets(&stage.topology, e.src, h));
                if !reach[e.dst] {
                    return Err(Error::InvalidPath { src: e.src, dst: e.dst, reason: format!("no {h}-hop walk in stage {i}") });
                }
                groups.entry(h).or_default().push((e.src, e.dst, e.size_chunks));
            }
            for (l, (hops, entries)) in groups.into_iter().enumerate() {
                terms.push(DecompositionTerm { stage: i, round: j, group: l, hops, entries });
            }
        }
    }
    let decomposition = Decomposition { terms };
    let served = decomposition.reconstruct(n);
    for src in 0..n {
        for dst in 0..n {
            let demanded = a.get(src, dst);
            if served[src][dst] != demanded {
                return Err(Error::Conservation { src, dst, served: served[src][dst], demanded });
            }
        }
    }
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::cross_topology_assign;
    use crate::topology::{shift_sequence_from, TopologySequence};

    fn adjacency_power(topo: &Topology, h: usize) -> Vec<Vec<u64>> {
        let n = topo.n();
        let a: Vec<Vec<u64>> = topo.adjacency_matrix().iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
        let mut p: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for _ in 0..h {
            p = (0..n).map(|i| (0..n).map(|j| (0..n).map(|m| p[i][m] * a[m][j]).sum()).collect()).collect();
        }
        p
    }

    #[test]
    fn ring_is_sum_of_powers() {
        let seq = shift_sequence_from(8, &[1]).unwrap();
        let a = TrafficMatrix::uniform(8, 1);
        let s = cross_topology_assign(&seq, &a).unwrap();
        let dec = verify_decomposition(&s, &a).unwrap();
        assert_eq!(dec.terms.len(), 7);
        for t in &dec.terms {
            // Each mask is the full h-th power of the cycle.
            assert_eq!(t.mask(8), adjacency_power(&seq.topologies[0], t.hops).iter().map(|r| r.iter().map(|&x| x as u8).collect()).collect::<Vec<Vec<u8>>>());
        }
    }

    #[test]
    fn two_shift_decomposition() {
        let seq = shift_sequence_from(8, &[1, 7]).unwrap();
        let a = TrafficMatrix::uniform(8, 1);
        let s = cross_topology_assign(&seq, &a).unwrap();
        let dec = verify_decomposition(&s, &a).unwrap();
        let mut shape: Vec<(usize, usize)> = dec.terms.iter().map(|t| (t.stage, t.hops)).collect();
        shape.sort();
        assert_eq!(shape, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 1), (1, 2), (1, 3)]);
        for t in &dec.terms {
            let p = adjacency_power(&seq.topologies[t.stage], t.hops);
            for &(s, d, _) in &t.entries {
                assert!(p[s][d] >= 1);
            }
        }
    }

    #[test]
    fn missing_flow_named() {
        let seq = TopologySequence::new(vec![crate::topology::build_cycle(8).unwrap()], vec![]).unwrap();
        let a = TrafficMatrix::uniform(8, 1);
        let mut s = cross_topology_assign(&seq, &a).unwrap();
        for r in &mut s.stages[0].schedule.rounds {
            r.entries.retain(|e| (e.src, e.dst) != (0, 3));
        }
        match verify_decomposition(&s, &a) {
            Err(Error::Conservation { src: 0, dst: 3, served: 0, demanded: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicated_flow_named() {
        let seq = TopologySequence::new(vec![crate::topology::build_cycle(5).unwrap()], vec![]).unwrap();
        let a = TrafficMatrix::uniform(5, 1);
        let mut s = cross_topology_assign(&seq, &a).unwrap();
        let dup = s.stages[0].schedule.rounds[1].entries[0].clone();
        s.stages[0].schedule.rounds[1].entries.push(dup.clone());
        match verify_decomposition(&s, &a) {
            Err(Error::Conservation { src, dst, served: 2, .. }) => assert_eq!((src, dst), (dup.src, dup.dst)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
