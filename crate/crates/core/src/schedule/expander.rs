use std::collections::{BTreeMap, HashSet};

use super::merge::merge_rounds;
use super::realize::realize_schedule;
use super::{LinkSlot, Path, Round, RoundEntry, Schedule};
use crate::error::{Error, Result};
use crate::topology::{DistanceTable, Topology};
use crate::traffic::TrafficMatrix;

const CANDIDATE_CAP: usize = 16;

/// Shortest paths `src -> dst`, depth-first in layer order, at most
/// `CANDIDATE_CAP` of them.
pub(crate) fn shortest_paths(topo: &Topology, dt: &DistanceTable, src: usize, dst: usize) -> Vec<Vec<usize>> {
    fn dfs(
        topo: &Topology,
        dt: &DistanceTable,
        at: usize,
        dst: usize,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= CANDIDATE_CAP {
            return;
        }
        let remaining = dt.raw(at, dst);
        if remaining == 0 {
            out.push(seq.clone());
            return;
        }
        for (j, v) in topo.out_edges(at) {
            if dt.raw(v, dst).wrapping_add(1) == remaining {
                seq.push(j);
                dfs(topo, dt, v, dst, seq, out);
                seq.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(topo, dt, src, dst, &mut Vec::new(), &mut out);
    out
}

/// Unit-demand schedule for `pairs` on an arbitrary strongly connected
/// topology: flows grouped by shortest-path length, first-fit packed under
/// the per-hop link rule, then merged.
pub fn expander_template(topo: &Topology, dt: &DistanceTable, pairs: &[(usize, usize)]) -> Result<Schedule> {
    let mut groups: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for &(src, dst) in pairs {
        let h = dt.get(src, dst).ok_or(Error::Unserved { src, dst })?;
        groups.entry(h).or_default().push((src, dst));
    }
    let mut rounds = Vec::new();
    for (_, mut flows) in groups {
        flows.sort_unstable();
        let mut packed: Vec<(HashSet<LinkSlot>, Vec<RoundEntry>)> = Vec::new();
        for (src, dst) in flows {
            let cands: Vec<Path> =
                shortest_paths(topo, dt, src, dst).iter().map(|seq| Path::from_layers(topo, src, seq)).collect();
            let keys = |p: &Path| p.hops.iter().enumerate().map(|(i, h)| (h.from, h.layer, i + 1)).collect::<Vec<_>>();
            let entry = |path: Path| RoundEntry { src, dst, size_chunks: 1, path };
            let placed = packed.iter_mut().find_map(|(used, entries)| {
                let path = cands.iter().find(|p| keys(p).iter().all(|k| !used.contains(k)))?;
                used.extend(keys(path));
                entries.push(entry(path.clone()));
                Some(())
            });
            if placed.is_none() {
                let path = cands[0].clone();
                packed.push((keys(&path).into_iter().collect(), vec![entry(path)]));
            }
        }
        rounds.extend(packed.into_iter().map(|(_, entries)| Round { entries }));
    }
    Ok(merge_rounds(&Schedule { rounds }))
}

/// Expander schedule for demand `a` on `topo`.
pub fn schedule_expander(topo: &Topology, a: &TrafficMatrix) -> Result<Schedule> {
    if a.n() != topo.n() {
        return Err(Error::InvalidTraffic(format!("matrix is {}x{}, topology has n={}", a.n(), a.n(), topo.n())));
    }
    let dt = DistanceTable::new(topo);
    let pairs: Vec<(usize, usize)> = a.flows().map(|(s, d, _)| (s, d)).collect();
    Ok(realize_schedule(&expander_template(topo, &dt, &pairs)?, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{check_schedule, schedule_symmetric};
    use crate::topology::{build_cycle, build_generalized_kautz};

    #[test]
    fn genkautz_uses_shortest_paths() {
        let g = build_generalized_kautz(8, 2).unwrap();
        let dt = DistanceTable::new(&g);
        let s = schedule_expander(&g, &TrafficMatrix::uniform(8, 1)).unwrap();
        assert!(check_schedule(&s).is_clean());
        let mut served = 0;
        for r in &s.rounds {
            for e in &r.entries {
                assert!(e.hops() <= 3);
                assert_eq!(e.hops() as u32, dt.get(e.src, e.dst).unwrap());
                e.path.validate(&g, e.src, e.dst).unwrap();
                served += 1;
            }
        }
        assert_eq!(served, 56);
    }

    #[test]
    fn direct_edges_fill_one_round() {
        let g = build_generalized_kautz(8, 2).unwrap();
        let mut a = TrafficMatrix::zeros(8);
        for u in 0..8 {
            for (_, v) in g.out_edges(u) {
                a.set(u, v, 1).unwrap();
            }
        }
        let s = schedule_expander(&g, &a).unwrap();
        assert_eq!(s.rounds.len(), 1);
        assert_eq!(s.rounds[0].entries.len(), 16);
    }

    #[test]
    fn ring_matches_symmetric() {
        let c = build_cycle(8).unwrap();
        let a = TrafficMatrix::uniform(8, 1);
        let e = schedule_expander(&c, &a).unwrap();
        let s = schedule_symmetric(&c, &a).unwrap();
        let shape = |s: &Schedule| {
            s.rounds
                .iter()
                .map(|r| {
                    let mut v: Vec<(usize, usize, usize)> = r.entries.iter().map(|e| (e.src, e.dst, e.hops())).collect();
                    v.sort();
                    v
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(shape(&e), shape(&s));
    }

    #[test]
    fn unreachable_pair_is_reported() {
        let c = crate::topology::build_circulant(6, &[2]).unwrap();
        let dt = DistanceTable::new(&c);
        assert!(matches!(expander_template(&c, &dt, &[(0, 1)]), Err(Error::Unserved { src: 0, dst: 1 })));
    }
}
