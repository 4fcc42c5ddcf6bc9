use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Topology;

pub const UNREACHABLE: u32 = u32::MAX;

/// All-pairs hop distances by BFS from every node.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceTable {
    pub fn new(topo: &Topology) -> Self {
        let n = topo.n();
        let mut dist = vec![UNREACHABLE; n * n];
        for src in 0..n {
            bfs_into(topo, src, &mut dist[src * n..(src + 1) * n]);
        }
        DistanceTable { n, dist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hop distance, or `None` when `dst` is unreachable from `src`.
    pub fn get(&self, src: usize, dst: usize) -> Option<u32> {
        let d = self.dist[src * self.n + dst];
        (d != UNREACHABLE).then_some(d)
    }

    pub(crate) fn raw(&self, src: usize, dst: usize) -> u32 {
        self.dist[src * self.n + dst]
    }

    pub fn diameter(&self) -> Option<usize> {
        if self.dist.contains(&UNREACHABLE) {
            return None;
        }
        self.dist.iter().max().map(|&d| d as usize)
    }
}

pub(crate) fn bfs_from(topo: &Topology, src: usize) -> Vec<u32> {
    let mut out = vec![UNREACHABLE; topo.n()];
    bfs_into(topo, src, &mut out);
    out
}

fn bfs_into(topo: &Topology, src: usize, dist: &mut [u32]) {
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(u) = queue.pop_front() {
        for (_, v) in topo.out_edges(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

pub fn is_strongly_connected(topo: &Topology) -> bool {
    // Reachability from 0 in the graph and in its reverse.
    let n = topo.n();
    if bfs_from(topo, 0).contains(&UNREACHABLE) {
        return false;
    }
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for layer in topo.layers() {
        for (u, &v) in layer.iter().enumerate() {
            rev[v].push(u);
        }
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &w in &rev[u] {
            if !std::mem::replace(&mut seen[w], true) {
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn diameter(topo: &Topology) -> Option<usize> {
    let mut worst = 0;
    for src in 0..topo.n() {
        let d = bfs_from(topo, src);
        worst = worst.max(*d.iter().max().expect("n >= 2"));
        if worst == UNREACHABLE {
            return None;
        }
    }
    Some(worst as usize)
}

/// True iff `i -> i+1 mod n` maps the edge multiset onto itself.
pub fn is_node_symmetric(topo: &Topology) -> bool {
    let n = topo.n();
    let offsets_at = |u: usize| {
        let mut o: Vec<usize> = topo.out_edges(u).map(|(_, v)| (v + n - u) % n).collect();
        o.sort_unstable();
        o
    };
    let reference = offsets_at(0);
    (1..n).all(|u| offsets_at(u) == reference)
}

/// Per-layer offsets when every layer is a translation `u -> u + c`.
pub fn translation_offsets(topo: &Topology) -> Option<Vec<usize>> {
    let n = topo.n();
    topo.layers()
        .iter()
        .map(|layer| {
            let c = layer[0];
            layer.iter().enumerate().all(|(u, &v)| v == (u + c) % n).then_some(c)
        })
        .collect()
}

/// Number of distinct nodes reachable within `h` hops, `h = 1..=diameter`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpansionProfile {
    /// One row when the topology is node-symmetric, otherwise one per node.
    /// `reach_counts[row][h - 1]` excludes the source itself.
    pub reach_counts: Vec<Vec<usize>>,
}

impl ExpansionProfile {
    pub fn reach(&self, node: usize, h: usize) -> usize {
        let row = if self.reach_counts.len() == 1 { &self.reach_counts[0] } else { &self.reach_counts[node] };
        if h == 0 {
            return 0;
        }
        *row.get(h - 1).or(row.last()).unwrap_or(&0)
    }

    pub fn is_collapsed(&self) -> bool {
        self.reach_counts.len() == 1
    }
}

pub fn expansion_profile(topo: &Topology) -> ExpansionProfile {
    let sources: Vec<usize> = if is_node_symmetric(topo) { vec![0] } else { (0..topo.n()).collect() };
    let dists: Vec<Vec<u32>> = sources.iter().map(|&s| bfs_from(topo, s)).collect();
    let horizon = dists.iter().flatten().filter(|&&d| d != UNREACHABLE).max().copied().unwrap_or(0) as usize;
    let reach_counts = dists
        .iter()
        .map(|d| {
            (1..=horizon.max(1))
                .map(|h| d.iter().filter(|&&x| x != 0 && x != UNREACHABLE && x as usize <= h).count())
                .collect()
        })
        .collect();
    ExpansionProfile { reach_counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_circulant, build_cycle};

    #[test]
    fn ring_profile() {
        let c = build_cycle(8).unwrap();
        let p = expansion_profile(&c);
        assert!(p.is_collapsed());
        for h in 1..=7 {
            assert_eq!(p.reach(0, h), h);
        }
        assert_eq!(p.reach(3, 3), 3);
        assert!(is_node_symmetric(&c));
        assert_eq!(diameter(&c), Some(7));
    }

    #[test]
    fn disconnected_circulant() {
        let c = build_circulant(8, &[2]).unwrap();
        assert!(!is_strongly_connected(&c));
        assert_eq!(diameter(&c), None);
        assert_eq!(DistanceTable::new(&c).get(0, 1), None);
        assert_eq!(expansion_profile(&c).reach(0, 10), 3);
    }

    #[test]
    fn translations_detected() {
        let c = build_circulant(8, &[3, 1]).unwrap();
        assert_eq!(translation_offsets(&c), Some(vec![3, 1]));
        let r = c.relabeled(&[1, 0, 2, 3, 4, 5, 6, 7]);
        assert_eq!(translation_offsets(&r), None);
    }
}
