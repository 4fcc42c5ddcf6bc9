use std::collections::{HashSet, VecDeque};

use super::merge::merge_rounds;
use super::realize::realize_schedule;
use super::{Path, Round, RoundEntry, Schedule};
use crate::error::{Error, Result};
use crate::topology::{is_node_symmetric, translation_offsets, Topology, UNREACHABLE};
use crate::traffic::TrafficMatrix;

const CANDIDATE_CAP: usize = 16;

/// Hop distance from 0 to every residue on the circulant with `offsets`.
pub(crate) fn class_distances(n: usize, offsets: &[usize]) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; n];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &c in offsets {
            let y = (x + c) % n;
            if dist[y] == UNREACHABLE {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Shortest layer sequences reaching class `t` from 0, in lex layer order.
fn class_candidates(n: usize, offsets: &[usize], dist: &[u32], t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut seq = Vec::new();
    fn dfs(
        n: usize,
        offsets: &[usize],
        dist: &[u32],
        t: usize,
        at: usize,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= CANDIDATE_CAP {
            return;
        }
        let remaining = dist[(t + n - at) % n];
        if remaining == 0 {
            out.push(seq.clone());
            return;
        }
        for (j, &c) in offsets.iter().enumerate() {
            let next = (at + c) % n;
            if dist[(t + n - next) % n] + 1 == remaining {
                seq.push(j);
                dfs(n, offsets, dist, t, next, seq, out);
                seq.pop();
            }
        }
    }
    dfs(n, offsets, dist, t, 0, &mut seq, &mut out);
    out
}

/// Groups classes into rounds. Rotation invariance makes a class's link use
/// the same `(hop, layer)` pairs at every node, so two classes conflict iff
/// they share one.
/// A shift class with its layer sequence.
type ClassRoute = (usize, Vec<usize>);

fn pack_classes(n: usize, offsets: &[usize], classes: &[usize]) -> Option<Vec<Vec<ClassRoute>>> {
    let dist = class_distances(n, offsets);
    let mut order: Vec<usize> = classes.to_vec();
    if order.iter().any(|&t| dist[t] == UNREACHABLE) {
        return None;
    }
    order.sort_by_key(|&t| (dist[t], t));
    let mut rounds: Vec<(HashSet<_>, Vec<ClassRoute>)> = Vec::new();
    for t in order {
        let cands = class_candidates(n, offsets, &dist, t);
        let uses = |seq: &[usize]| seq.iter().enumerate().map(|(p, &j)| (p, j)).collect::<Vec<_>>();
        let placed = rounds.iter_mut().find_map(|(used, members)| {
            let seq = cands.iter().find(|s| uses(s).iter().all(|u| !used.contains(u)))?;
            used.extend(uses(seq));
            members.push((t, seq.clone()));
            Some(())
        });
        if placed.is_none() {
            let seq = cands[0].clone();
            rounds.push((uses(&seq).into_iter().collect(), vec![(t, seq)]));
        }
    }
    Some(rounds.into_iter().map(|(_, m)| m).collect())
}

/// Hop total of the symmetric schedule of the circulant with `offsets`, or
/// `None` when the graph is disconnected.
pub fn symmetric_power_sum(n: usize, offsets: &[usize]) -> Option<u64> {
    let classes: Vec<usize> = (1..n).collect();
    let rounds = pack_classes(n, offsets, &classes)?;
    Some(rounds.iter().map(|r| r.iter().map(|(_, s)| s.len() as u64).max().unwrap_or(0)).sum())
}

/// Unit-demand schedule serving every `u -> u + t` for `t` in `classes`
/// (all classes when `None`), packed at node 0 and rotated to every node.
pub fn symmetric_template(topo: &Topology, classes: Option<&[usize]>) -> Result<Schedule> {
    let n = topo.n();
    let Some(offsets) = translation_offsets(topo) else {
        if is_node_symmetric(topo) {
            return Err(Error::Unsupported("node-symmetric topology whose layers are not translations".into()));
        }
        return Err(Error::Asymmetric);
    };
    let all: Vec<usize> = (1..n).collect();
    let classes = classes.unwrap_or(&all);
    let Some(packed) = pack_classes(n, &offsets, classes) else {
        let dist = class_distances(n, &offsets);
        let t = *classes.iter().find(|&&t| dist[t] == UNREACHABLE).expect("some class unreachable");
        return Err(Error::Unserved { src: 0, dst: t });
    };
    let rounds = packed
        .into_iter()
        .map(|members| {
            let mut entries = Vec::with_capacity(members.len() * n);
            for (t, seq) in &members {
                for src in 0..n {
                    entries.push(RoundEntry {
                        src,
                        dst: (src + t) % n,
                        size_chunks: 1,
                        path: Path::from_layers(topo, src, seq),
                    });
                }
            }
            Round { entries }
        })
        .collect();
    Ok(merge_rounds(&Schedule { rounds }))
}

/// Symmetric schedule for demand `a`: the all-class template with each
/// entry resized to its demand and zero-demand entries dropped.
pub fn schedule_symmetric(topo: &Topology, a: &TrafficMatrix) -> Result<Schedule> {
    if a.n() != topo.n() {
        return Err(Error::InvalidTraffic(format!("matrix is {}x{}, topology has n={}", a.n(), a.n(), topo.n())));
    }
    Ok(realize_schedule(&symmetric_template(topo, None)?, a))
}
