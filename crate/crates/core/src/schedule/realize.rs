//! Turning unit-demand templates into schedules for arbitrary chunk counts.
//!
//! A template round is contention-free under the per-hop rule. For demand
//! sizes `c_e` it is realized as `L` unit-chunk copies (copy `l` carries the
//! entries with `c_e > l`), followed by link-disjoint groups carrying the
//! remaining `c_e - L` chunks of each entry pipelined. `L` ranges over zero
//! and the distinct sizes; the cheapest choice wins, ties to the smaller `L`.

use super::{Round, RoundEntry, Schedule, Strategy};
use crate::traffic::TrafficMatrix;

struct RoundPlan {
    unit_copies: u64,
    /// Entry indices of each pipelined group.
    groups: Vec<Vec<usize>>,
    slots: u64,
}

fn plan_round(round: &Round, sizes: &[u64]) -> Option<RoundPlan> {
    let active: Vec<usize> = (0..round.entries.len()).filter(|&i| sizes[i] > 0).collect();
    if active.is_empty() {
        return None;
    }
    let mut distinct: Vec<u64> = active.iter().map(|&i| sizes[i]).collect();
    distinct.sort_unstable();
    distinct.dedup();

    let hops = |i: usize| round.entries[i].hops() as u64;
    let links = LinkIndex::new(round);
    // Pure unit copies: an upper bound every other level must beat.
    let all_copies: u64 = {
        let (mut total, mut prev) = (0, 0);
        for &level in &distinct {
            total += (level - prev) * active.iter().filter(|&&i| sizes[i] >= level).map(|&i| hops(i)).max().unwrap_or(0);
            prev = level;
        }
        total
    };
    let mut best: Option<RoundPlan> = None;
    let mut layered = 0u64;
    let mut prev = 0u64;
    for level in std::iter::once(0).chain(distinct.iter().copied()) {
        if level > 0 {
            let longest = active.iter().filter(|&&i| sizes[i] >= level).map(|&i| hops(i)).max().unwrap_or(0);
            layered += (level - prev) * longest;
            prev = level;
        }
        let rest: Vec<usize> = active.iter().copied().filter(|&i| sizes[i] > level).collect();
        let bound = layered + links.busiest(round, &rest, |i| sizes[i] - level);
        if best.as_ref().is_some_and(|b| bound >= b.slots) || bound > all_copies {
            continue;
        }
        let (groups, rest_slots) = group_pipelined(round, &links, &rest, |i| sizes[i] - level);
        let total = layered + rest_slots;
        if best.as_ref().is_none_or(|b| total < b.slots) {
            best = Some(RoundPlan { unit_copies: level, groups, slots: total });
        }
    }
    best
}

/// Dense numbering of a round's `(node, layer)` links.
struct LinkIndex {
    stride: usize,
    count: usize,
}

impl LinkIndex {
    fn new(round: &Round) -> Self {
        let (mut nodes, mut layers) = (0, 0);
        for h in round.entries.iter().flat_map(|e| &e.path.hops) {
            nodes = nodes.max(h.from + 1);
            layers = layers.max(h.layer + 1);
        }
        LinkIndex { stride: layers, count: nodes * layers }
    }

    fn of<'a>(&self, e: &'a RoundEntry) -> impl Iterator<Item = usize> + 'a {
        let stride = self.stride;
        e.path.hops.iter().map(move |h| h.from * stride + h.layer)
    }

    /// Largest total pipelined duration of the members sharing one link.
    /// Those members must sit in distinct groups, so this bounds the
    /// grouped duration from below.
    fn busiest(&self, round: &Round, members: &[usize], size: impl Fn(usize) -> u64) -> u64 {
        if members.is_empty() {
            return 0;
        }
        let mut load = vec![0u64; self.count];
        for &i in members {
            let e = &round.entries[i];
            let d = e.hops() as u64 + size(i) - 1;
            for l in self.of(e) {
                load[l] += d;
            }
        }
        load.into_iter().max().unwrap_or(0)
    }
}

/// First-fit link-disjoint grouping, longest paths first.
fn group_pipelined(round: &Round, links: &LinkIndex, members: &[usize], size: impl Fn(usize) -> u64) -> (Vec<Vec<usize>>, u64) {
    if members.is_empty() {
        return (Vec::new(), 0);
    }
    if members.iter().all(|&i| size(i) == 1) {
        // A sub-round of a per-hop contention-free round stays contention-free.
        let longest = members.iter().map(|&i| round.entries[i].hops() as u64).max().unwrap_or(0);
        return (vec![members.to_vec()], longest);
    }
    let mut order = members.to_vec();
    order.sort_by_key(|&i| std::cmp::Reverse(round.entries[i].hops()));
    let words = links.count.div_ceil(64);
    let mut groups: Vec<(Vec<u64>, Vec<usize>)> = Vec::new();
    for i in order {
        let own: Vec<usize> = links.of(&round.entries[i]).collect();
        let free = |used: &Vec<u64>| own.iter().all(|&l| used[l / 64] & (1 << (l % 64)) == 0);
        let g = match groups.iter().position(|(used, _)| free(used)) {
            Some(g) => g,
            None => {
                groups.push((vec![0; words], Vec::new()));
                groups.len() - 1
            }
        };
        for &l in &own {
            groups[g].0[l / 64] |= 1 << (l % 64);
        }
        groups[g].1.push(i);
    }
    let slots = groups
        .iter()
        .map(|(_, idx)| idx.iter().map(|&i| round.entries[i].hops() as u64 + size(i) - 1).max().unwrap_or(0))
        .sum();
    (groups.into_iter().map(|(_, idx)| idx).collect(), slots)
}

fn realize_round(round: &Round, sizes: &[u64], out: &mut Vec<Round>) {
    let Some(plan) = plan_round(round, sizes) else {
        return;
    };
    let resized = |i: usize, c: u64| RoundEntry { size_chunks: c, ..round.entries[i].clone() };
    for level in 0..plan.unit_copies {
        let entries = (0..round.entries.len()).filter(|&i| sizes[i] > level).map(|i| resized(i, 1)).collect();
        out.push(Round { entries });
    }
    for group in plan.groups {
        let mut group = group;
        group.sort_unstable();
        out.push(Round { entries: group.into_iter().map(|i| resized(i, sizes[i] - plan.unit_copies)).collect() });
    }
}

fn sizes_of(round: &Round, a: &TrafficMatrix, perm: Option<&[usize]>) -> Vec<u64> {
    round
        .entries
        .iter()
        .map(|e| match perm {
            Some(p) => a.get(p[e.src], p[e.dst]),
            None => a.get(e.src, e.dst),
        })
        .collect()
}

pub(crate) fn realize_schedule(template: &Schedule, a: &TrafficMatrix) -> Schedule {
    let mut rounds = Vec::new();
    for r in &template.rounds {
        realize_round(r, &sizes_of(r, a, None), &mut rounds);
    }
    Schedule { rounds }
}

/// Serves demand `a` with the rounds of a unit-demand template strategy.
/// Entries whose pair has zero demand are dropped, as are emptied rounds.
pub fn realize(template: &Strategy, a: &TrafficMatrix) -> Strategy {
    let mut out = template.clone();
    for stage in &mut out.stages {
        stage.schedule = realize_schedule(&stage.schedule, a);
    }
    out
}

/// Transmission slots of `realize(template, a')` for the relabeled demand
/// `a'[x][y] = a[perm[x]][perm[y]]`, without building it.
pub fn predicted_slots(template: &Strategy, a: &TrafficMatrix, perm: &[usize]) -> u64 {
    template
        .stages
        .iter()
        .flat_map(|s| s.schedule.rounds.iter())
        .filter_map(|r| plan_round(r, &sizes_of(r, a, Some(perm))).map(|p| p.slots))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{check_schedule, symmetric_template, Stage};
    use crate::topology::{build_circulant, build_cycle};

    fn template(topo: crate::topology::Topology) -> Strategy {
        let schedule = symmetric_template(&topo, None).unwrap();
        Strategy { n: topo.n(), k: topo.k(), stages: vec![Stage { topology: topo, schedule }], provenance: Default::default() }
    }

    #[test]
    fn unit_demand_is_identity() {
        let t = template(build_cycle(8).unwrap());
        let r = realize(&t, &TrafficMatrix::uniform(8, 1));
        assert_eq!(r, t);
        assert_eq!(predicted_slots(&t, &TrafficMatrix::uniform(8, 1), &(0..8).collect::<Vec<_>>()), 28);
    }

    #[test]
    fn uniform_multi_chunk_ring() {
        // Class t: layered copies cost c*t; pipelining needs at least t
        // groups of t + c - 1 each.
        let t = template(build_cycle(8).unwrap());
        for c in 1..6u64 {
            let a = TrafficMatrix::uniform(8, c);
            let r = realize(&t, &a);
            assert_eq!(r.served(), a.rows().to_vec());
            assert_eq!(r.slots(), 28 * c);
            assert_eq!(predicted_slots(&t, &a, &(0..8).collect::<Vec<_>>()), 28 * c);
            assert!(check_schedule(&r.stages[0].schedule).is_clean());
        }
    }

    #[test]
    fn one_hop_round_pipelines() {
        let t = template(build_circulant(6, &[1, 2]).unwrap());
        let mut a = TrafficMatrix::zeros(6);
        for u in 0..6 {
            a.set(u, (u + 1) % 6, 5).unwrap();
        }
        let r = realize(&t, &a);
        assert_eq!(r.round_count(), 1);
        assert_eq!(r.slots(), 5);
    }

    #[test]
    fn prediction_matches_realization_under_relabel() {
        let t = template(build_circulant(9, &[1, 3]).unwrap());
        let mut a = TrafficMatrix::uniform(9, 1);
        for (i, (s, d)) in [(0, 4), (2, 7), (5, 1), (8, 3), (6, 0)].into_iter().enumerate() {
            a.set(s, d, 3 + 2 * i as u64).unwrap();
        }
        let perm = vec![3, 1, 4, 0, 8, 5, 2, 7, 6];
        let realized = realize(&t, &a.conjugated(&perm)).relabeled(&perm);
        assert_eq!(realized.served(), a.rows().to_vec());
        assert_eq!(realized.slots(), predicted_slots(&t, &a, &perm));
        for st in &realized.stages {
            assert!(check_schedule(&st.schedule).is_clean());
            for r in &st.schedule.rounds {
                for e in &r.entries {
                    e.path.validate(&st.topology, e.src, e.dst).unwrap();
                }
            }
        }
    }

    #[test]
    fn zero_demand_dropped() {
        let t = template(build_cycle(4).unwrap());
        let r = realize(&t, &TrafficMatrix::zeros(4));
        assert_eq!(r.round_count(), 0);
    }
}
