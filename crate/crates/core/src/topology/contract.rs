//! Contraction sequences: each new topology wires the flows of one scheduled
//! multi-hop round directly, collapsing that round to a single hop.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::build::translation;
use super::matching::decompose_regular;
use super::{complete_permutation, translation_offsets, Family, Topology, TopologySequence};
use crate::error::Result;
use crate::schedule::{assign_template, Path, Round, RoundEntry, Schedule, Stage, Strategy, TemplateScheduler};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContractionStep {
    pub stage: usize,
    pub round: usize,
    /// Longest path of the contracted round before contraction.
    pub hops: usize,
    pub contracted_flows: usize,
    /// Hop saving promised by dropping the round for a one-hop round.
    pub guaranteed_saving: u64,
    pub power_sum_before: u64,
    pub power_sum_after: u64,
    /// Whether the full reassignment beat keeping the old schedule and adding
    /// a one-hop stage.
    pub reassigned: bool,
}

/// Unit-demand plans for every prefix of a contraction sequence.
#[derive(Clone, Debug)]
pub struct ContractionChain {
    pub sequence: TopologySequence,
    /// `plans[m - 1]` schedules the first `m` topologies.
    pub plans: Vec<Strategy>,
    pub steps: Vec<ContractionStep>,
    /// Fewer than the requested topologies: no round could be contracted
    /// with a net saving.
    pub truncated: bool,
}

struct Candidate {
    stage: usize,
    round: usize,
    hops: usize,
    accepted: Vec<usize>,
    saving: usize,
    weight: usize,
}

/// Greedy degree-`k` subset of a round's flows, longest paths first.
fn contractable(round: &Round, n: usize, k: usize) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..round.entries.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(round.entries[i].hops()));
    let (mut out_deg, mut in_deg) = (vec![0usize; n], vec![0usize; n]);
    let mut accepted = Vec::new();
    let mut rest_max = 0;
    for i in order {
        let e = &round.entries[i];
        if e.hops() >= 2 && out_deg[e.src] < k && in_deg[e.dst] < k {
            out_deg[e.src] += 1;
            in_deg[e.dst] += 1;
            accepted.push(i);
        } else {
            rest_max = rest_max.max(e.hops());
        }
    }
    (accepted, rest_max)
}

fn pick_round(plan: &Strategy) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for (i, stage) in plan.stages.iter().enumerate() {
        for (j, round) in stage.schedule.rounds.iter().enumerate() {
            let hops = round.max_hops();
            if hops < 2 {
                continue;
            }
            let (accepted, rest_max) = contractable(round, plan.n, plan.k);
            if accepted.is_empty() || hops <= rest_max + 1 {
                continue;
            }
            let saving = hops - rest_max - 1;
            let weight = accepted.iter().map(|&e| round.entries[e].hops()).sum();
            let better = best.as_ref().is_none_or(|b| (saving, weight) > (b.saving, b.weight));
            if better {
                best = Some(Candidate { stage: i, round: j, hops, accepted, saving, weight });
            }
        }
    }
    best
}

/// Shortest hop count per ordered pair under a full unit template.
fn best_hops(plan: &Strategy) -> Vec<Vec<usize>> {
    let mut h = vec![vec![usize::MAX; plan.n]; plan.n];
    for e in plan.entries() {
        h[e.src][e.dst] = h[e.src][e.dst].min(e.hops());
    }
    h
}

/// Builds a topology containing `edges` (each node at most `k` out and `k`
/// in). Free ports go to the targets that are currently farthest, then to
/// the smallest forward offset.
fn wire(n: usize, k: usize, edges: &[(usize, usize)], far: &[Vec<usize>], family: Family, circulant: bool) -> Result<Topology> {
    let params = crate::params::NetworkParams::new(n, k)?;
    let offset = |s: usize, t: usize| (t + n - s) % n;
    if circulant {
        let mut offsets: Vec<usize> = edges.iter().map(|&(s, t)| offset(s, t)).collect();
        offsets.sort_unstable();
        offsets.dedup();
        while offsets.len() < k {
            let t = (1..n)
                .filter(|t| !offsets.contains(t))
                .max_by_key(|&t| (far[0][t], std::cmp::Reverse(t)))
                .expect("k < n leaves a free offset");
            offsets.push(t);
        }
        let layers = offsets.iter().map(|&c| translation(n, c)).collect();
        return Topology::new(params, layers, family);
    }

    // Pad to a k-regular bipartite multigraph, split it into k perfect
    // matchings, then drop the padding to get k partial layers.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_deg = vec![0usize; n];
    for &(s, t) in edges {
        adj[s].push(t);
        in_deg[t] += 1;
    }
    let mut in_free: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k - in_deg[v])).collect();
    for row in adj.iter_mut() {
        while row.len() < k {
            row.push(in_free.pop().expect("degree sums match"));
        }
    }
    let matchings = decompose_regular(n, k, &adj)?;
    let mut wanted: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let partial: Vec<Vec<Option<usize>>> = matchings
        .iter()
        .map(|m| m.iter().enumerate().map(|(s, &t)| wanted.remove(&(s, t)).then_some(t)).collect())
        .collect();

    let mut adjacent: HashSet<(usize, usize)> = edges.iter().copied().collect();
    let mut layers = Vec::with_capacity(k);
    for p in partial {
        let layer = complete_permutation(&p, |s, t| {
            (!adjacent.contains(&(s, t))).then(|| (far[s][t].min(n) * n + (n - 1 - offset(s, t))) as i64)
        });
        adjacent.extend(layer.iter().enumerate().map(|(s, &t)| (s, t)));
        layers.push(layer);
    }
    Topology::new(params, layers, family)
}

/// Grows `base` into a sequence of up to `d` topologies by repeated
/// contraction of the round with the largest guaranteed hop saving.
pub fn contract_sequence(base: &Topology, d: usize, scheduler: TemplateScheduler) -> Result<ContractionChain> {
    let (n, k) = (base.n(), base.k());
    let mut sequence = TopologySequence::new(vec![base.clone()], vec![format!("base {:?}", base.family())])?;
    let mut plans = vec![assign_template(&sequence, scheduler)?];
    let mut steps = Vec::new();
    let mut truncated = false;
    while sequence.len() < d {
        let plan = plans.last().expect("nonempty");
        let Some(cand) = pick_round(plan) else {
            truncated = true;
            break;
        };
        let round = &plan.stages[cand.stage].schedule.rounds[cand.round];
        let edges: Vec<(usize, usize)> = cand.accepted.iter().map(|&e| (round.entries[e].src, round.entries[e].dst)).collect();
        let all_translations = sequence.topologies.iter().all(|t| translation_offsets(t).is_some());
        let whole = cand.accepted.len() == round.entries.len() && {
            let classes: HashSet<usize> = edges.iter().map(|&(s, t)| (t + n - s) % n).collect();
            classes.len() <= k && round.entries.len() == classes.len() * n
        };
        let far = best_hops(plan);
        let family = Family::Contracted { stage: cand.stage, round: cand.round, hops: cand.hops };
        let topo = wire(n, k, &edges, &far, family, all_translations && whole)?;

        let mut topologies = sequence.topologies.clone();
        topologies.push(topo.clone());
        let mut trace = sequence.generation_trace.clone();
        trace.push(format!("contract stage {} round {} ({} hops, {} flows)", cand.stage, cand.round, cand.hops, edges.len()));
        let next_seq = TopologySequence::new(topologies, trace)?;

        let full = assign_template(&next_seq, scheduler)?;
        let incremental = incremental_plan(plan, &cand, &topo);
        let before = plan.power_sum();
        let (next_plan, reassigned) = match incremental {
            Some(inc) if inc.power_sum() < full.power_sum() => (inc, false),
            _ => (full, true),
        };
        if next_plan.power_sum() >= before {
            truncated = true;
            break;
        }
        steps.push(ContractionStep {
            stage: cand.stage,
            round: cand.round,
            hops: cand.hops,
            contracted_flows: edges.len(),
            guaranteed_saving: cand.saving as u64,
            power_sum_before: before,
            power_sum_after: next_plan.power_sum(),
            reassigned,
        });
        sequence = next_seq;
        plans.push(next_plan);
    }
    Ok(ContractionChain { sequence, plans, steps, truncated })
}

/// The old plan minus the contracted flows, plus a stage sending them over
/// their new direct links.
fn incremental_plan(plan: &Strategy, cand: &Candidate, topo: &Topology) -> Option<Strategy> {
    let round = &plan.stages[cand.stage].schedule.rounds[cand.round];
    let mut direct = Vec::new();
    let mut moved = HashSet::new();
    let mut used_links = HashSet::new();
    for &i in &cand.accepted {
        let e = &round.entries[i];
        // A port may have had to give way while completing the layers.
        let layer = topo.out_edges(e.src).find(|&(j, v)| v == e.dst && !used_links.contains(&(e.src, j)))?.0;
        used_links.insert((e.src, layer));
        moved.insert(i);
        direct.push(RoundEntry { src: e.src, dst: e.dst, size_chunks: 1, path: Path::from_layers(topo, e.src, &[layer]) });
    }
    let mut out = plan.clone();
    let rounds = &mut out.stages[cand.stage].schedule.rounds;
    let kept: Vec<RoundEntry> =
        round.entries.iter().enumerate().filter(|(i, _)| !moved.contains(i)).map(|(_, e)| e.clone()).collect();
    if kept.is_empty() {
        rounds.remove(cand.round);
    } else {
        rounds[cand.round] = Round { entries: kept };
    }
    out.stages.push(Stage { topology: topo.clone(), schedule: Schedule { rounds: vec![Round { entries: direct }] } });
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::check_strategy;
    use crate::topology::{build_circulant, build_generalized_kautz, is_node_symmetric};

    fn all_pairs_served(s: &Strategy) -> bool {
        let served = s.served();
        (0..s.n).all(|u| (0..s.n).all(|v| served[u][v] == u64::from(u != v)))
    }

    #[test]
    fn single_is_base() {
        let base = build_circulant(8, &[1, 3]).unwrap();
        let chain = contract_sequence(&base, 1, TemplateScheduler::Auto).unwrap();
        assert_eq!(chain.sequence.topologies, vec![base]);
        assert_eq!(chain.plans.len(), 1);
    }

    #[test]
    fn circulant_chain_contracts_whole_rounds() {
        let base = build_circulant(8, &[1, 3]).unwrap();
        let chain = contract_sequence(&base, 4, TemplateScheduler::Auto).unwrap();
        let sums: Vec<u64> = chain.plans.iter().map(Strategy::power_sum).collect();
        assert_eq!(sums[0], 9);
        assert!(sums.windows(2).all(|w| w[1] < w[0]), "{sums:?}");
        let second = &chain.sequence.topologies[1];
        assert!(is_node_symmetric(second));
        let step = &chain.steps[0];
        let contracted = &chain.plans[0].stages[step.stage].schedule.rounds[step.round];
        for e in &contracted.entries {
            assert!(second.out_edges(e.src).any(|(_, v)| v == e.dst));
        }
        for p in &chain.plans {
            assert!(check_strategy(p).is_clean());
            assert!(all_pairs_served(p));
        }
    }

    #[test]
    fn genkautz_second_topology_helps() {
        let base = build_generalized_kautz(8, 2).unwrap();
        let chain = contract_sequence(&base, 2, TemplateScheduler::Auto).unwrap();
        assert_eq!(chain.plans.len(), 2);
        assert!(chain.plans[1].power_sum() < chain.plans[0].power_sum());
        let step = &chain.steps[0];
        assert!(step.guaranteed_saving >= 1);
        assert!(step.power_sum_before - step.power_sum_after >= step.guaranteed_saving);
    }

    #[test]
    fn savings_guarantee_holds_along_chains() {
        for (n, k) in [(12usize, 2usize), (16, 2), (13, 3), (20, 4)] {
            for base in [build_generalized_kautz(n, k).unwrap(), build_circulant(n, &(1..=k).collect::<Vec<_>>()).unwrap()] {
                let chain = contract_sequence(&base, (n - 1).div_ceil(k), TemplateScheduler::Auto).unwrap();
                for (step, plan) in chain.steps.iter().zip(&chain.plans[1..]) {
                    assert!(step.power_sum_before - step.power_sum_after >= step.guaranteed_saving);
                    assert!(check_strategy(plan).is_clean());
                    assert!(all_pairs_served(plan));
                    for st in &plan.stages {
                        for r in &st.schedule.rounds {
                            for e in &r.entries {
                                e.path.validate(&st.topology, e.src, e.dst).unwrap();
                            }
                        }
                    }
                }
            }
        }
    }
}
