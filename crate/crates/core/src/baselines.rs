//! Comparison strategies: never reconfigure, reconfigure for every
//! destination offset, and a greedy Birkhoff-von Neumann circuit schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::NetworkParams;
use crate::schedule::{assign_template, realize, Path, Provenance, Round, RoundEntry, Schedule, Stage, Strategy, TemplateScheduler};
use crate::topology::{
    build_circulant, build_cycle, build_generalized_kautz, choose_circulant_offsets, complete_permutation,
    max_bipartite_matching, Family, Topology, TopologySequence,
};
use crate::traffic::TrafficMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BaselineKind {
    StaticShortestPath,
    DirectCircuits,
    GreedyBvn,
}

/// Base topology family for the never-reconfigure baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StaticFamily {
    Cycle,
    Circulant,
    #[serde(rename = "genkautz")]
    GenKautz,
}

impl StaticFamily {
    pub fn name(self) -> &'static str {
        match self {
            StaticFamily::Cycle => "cycle",
            StaticFamily::Circulant => "circulant",
            StaticFamily::GenKautz => "genkautz",
        }
    }

    /// The family's degree-`k` base topology.
    pub fn base(self, params: NetworkParams) -> Result<Topology> {
        match self {
            StaticFamily::Cycle if params.k == 1 => build_cycle(params.n),
            StaticFamily::Cycle => Err(Error::InvalidParams(format!("the cycle has degree 1, not {}", params.k))),
            StaticFamily::Circulant => build_circulant(params.n, &choose_circulant_offsets(params.n, params.k)),
            StaticFamily::GenKautz => build_generalized_kautz(params.n, params.k),
        }
    }
}

fn check_demand(params: NetworkParams, a: &TrafficMatrix) -> Result<()> {
    if a.n() != params.n {
        return Err(Error::InvalidTraffic(format!("matrix is {}x{}, network has n={}", a.n(), a.n(), params.n)));
    }
    Ok(())
}

/// One topology for the whole collective, every flow on shortest paths.
pub fn static_shortest_path(params: NetworkParams, a: &TrafficMatrix, family: StaticFamily) -> Result<Strategy> {
    check_demand(params, a)?;
    let base = family.base(params)?;
    let seq = TopologySequence::new(vec![base], vec![format!("static {}", family.name())])?;
    let mut s = realize(&assign_template(&seq, TemplateScheduler::Auto)?, a);
    s.provenance = Provenance { family: format!("static-{}", family.name()), ..Default::default() };
    Ok(s)
}

/// The cheapest static baseline over the families available at degree `k`.
pub fn best_static(params: NetworkParams, a: &TrafficMatrix) -> Result<Strategy> {
    let families: &[StaticFamily] =
        if params.k == 1 { &[StaticFamily::Cycle] } else { &[StaticFamily::Circulant, StaticFamily::GenKautz] };
    let mut best: Option<Strategy> = None;
    for &f in families {
        let s = static_shortest_path(params, a, f)?;
        if best.as_ref().is_none_or(|b| s.slots() < b.slots()) {
            best = Some(s);
        }
    }
    Ok(best.expect("at least one family"))
}

/// Offsets carried by each direct-circuit topology: `r*k + j + 1` for layer
/// `j`, with the last topology's spare layers given the smallest offsets it
/// does not already carry.
fn direct_offsets(params: NetworkParams) -> Vec<(Vec<usize>, usize)> {
    let NetworkParams { n, k } = params;
    (0..params.max_reconfigurations())
        .map(|r| {
            let mut offsets: Vec<usize> = (0..k).map(|j| r * k + j + 1).filter(|&o| o < n).collect();
            let real = offsets.len();
            let mut spare = (1..n).filter(|o| !offsets.contains(o)).collect::<Vec<_>>().into_iter();
            while offsets.len() < k {
                offsets.push(spare.next().expect("k < n leaves spare offsets"));
            }
            (offsets, real)
        })
        .collect()
}

/// Unit-demand template in which every flow crosses one direct circuit.
pub fn direct_template(params: NetworkParams) -> Result<Strategy> {
    let n = params.n;
    let mut stages = Vec::new();
    let mut trace = Vec::new();
    for (offsets, real) in direct_offsets(params) {
        let topo = build_circulant(n, &offsets)?;
        let entries = (0..real)
            .flat_map(|j| {
                let topo = &topo;
                (0..n).map(move |u| RoundEntry {
                    src: u,
                    dst: topo.successor(u, j),
                    size_chunks: 1,
                    path: Path::from_layers(topo, u, &[j]),
                })
            })
            .collect();
        trace.push(format!("direct offsets {:?}", &offsets[..real]));
        stages.push(Stage { topology: topo, schedule: Schedule { rounds: vec![Round::new(entries)] } });
    }
    Ok(Strategy {
        n,
        k: params.k,
        stages,
        provenance: Provenance { family: "direct".into(), trace, ..Default::default() },
    })
}

/// `ceil((n-1)/k)` topologies, each flow sent over its own direct circuit.
pub fn direct_circuits(params: NetworkParams, a: &TrafficMatrix) -> Result<Strategy> {
    check_demand(params, a)?;
    let template = direct_template(params)?;
    let provenance = template.provenance.clone();
    let mut s = realize(&template, a);
    s.provenance = provenance;
    Ok(s)
}

/// A circuit configuration and the chunks it carries on each of its pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BvnTerm {
    /// Fixed-point-free permutation realized by one switch.
    pub perm: Vec<usize>,
    /// Whether `u -> perm[u]` carries demand in this term.
    pub carries: Vec<bool>,
    pub weight: u64,
}

/// Greedy decomposition of `a` into weighted circuit configurations:
/// repeatedly take a maximum matching on the residual support, complete it
/// into a permutation, and subtract the smallest carried residual.
/// `sum(weight * carried pairs) == a` holds exactly.
pub fn greedy_bvn(a: &TrafficMatrix) -> Result<Vec<BvnTerm>> {
    let n = a.n();
    let mut residual: Vec<Vec<u64>> = a.rows().to_vec();
    if (0..n).any(|u| residual[u][u] != 0) {
        return Err(Error::InvalidTraffic("diagonal must be zero".into()));
    }
    let mut terms = Vec::new();
    loop {
        let adj: Vec<Vec<usize>> = (0..n).map(|u| (0..n).filter(|&v| residual[u][v] > 0).collect()).collect();
        if adj.iter().all(Vec::is_empty) {
            break;
        }
        let matching = max_bipartite_matching(n, &adj);
        let perm = complete_permutation(&matching, |s, t| Some(-(((t + n - s) % n) as i64)));
        // Completion may have re-routed one matched source to avoid a loop.
        let carries: Vec<bool> = (0..n).map(|u| matching[u] == Some(perm[u])).collect();
        let weight = (0..n).filter(|&u| carries[u]).map(|u| residual[u][perm[u]]).min().expect("a matched pair survives");
        for u in (0..n).filter(|&u| carries[u]) {
            residual[u][perm[u]] -= weight;
        }
        terms.push(BvnTerm { perm, carries, weight });
    }
    Ok(terms)
}

/// Greedy BvN terms, heaviest first, `k` per topology: one switch per term,
/// one single-hop round per topology.
pub fn bvn_strategy(params: NetworkParams, a: &TrafficMatrix) -> Result<Strategy> {
    check_demand(params, a)?;
    let mut terms = greedy_bvn(a)?;
    terms.sort_by_key(|t| std::cmp::Reverse(t.weight));
    let mut stages = Vec::new();
    for group in terms.chunks(params.k) {
        let mut layers: Vec<Vec<usize>> = group.iter().map(|t| t.perm.clone()).collect();
        while layers.len() < params.k {
            layers.push(layers[0].clone());
        }
        let topo = Topology::new(params, layers, Family::Custom)?;
        let mut entries = Vec::new();
        for (j, t) in group.iter().enumerate() {
            for u in (0..params.n).filter(|&u| t.carries[u]) {
                entries.push(RoundEntry { src: u, dst: t.perm[u], size_chunks: t.weight, path: Path::from_layers(&topo, u, &[j]) });
            }
        }
        stages.push(Stage { topology: topo, schedule: Schedule { rounds: vec![Round::new(entries)] } });
    }
    Ok(Strategy {
        n: params.n,
        k: params.k,
        stages,
        provenance: Provenance { family: "bvn".into(), ..Default::default() },
    })
}

pub fn baseline(kind: BaselineKind, params: NetworkParams, a: &TrafficMatrix) -> Result<Strategy> {
    match kind {
        BaselineKind::StaticShortestPath => best_static(params, a),
        BaselineKind::DirectCircuits => direct_circuits(params, a),
        BaselineKind::GreedyBvn => bvn_strategy(params, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{strategy_cost, verify_decomposition};
    use crate::params::CostModel;
    use crate::schedule::check_strategy;
    use crate::workload::{gen_traffic, WorkloadKind, WorkloadSpec};

    fn p(n: usize, k: usize) -> NetworkParams {
        NetworkParams::new(n, k).unwrap()
    }

    fn sound(s: &Strategy, a: &TrafficMatrix) {
        assert!(check_strategy(s).is_clean());
        verify_decomposition(s, a).unwrap();
    }

    #[test]
    fn static_ring() {
        let a = TrafficMatrix::uniform(8, 1);
        let s = static_shortest_path(p(8, 1), &a, StaticFamily::Cycle).unwrap();
        let c = strategy_cost(&s, &CostModel::from_t(1.0, 5.0)).unwrap();
        assert_eq!((c.d, c.transmit_slots), (1, 28));
        assert_eq!(s.slots(), static_shortest_path(p(8, 1), &a, StaticFamily::Circulant).unwrap().slots());
        let two = static_shortest_path(p(2, 1), &TrafficMatrix::uniform(2, 1), StaticFamily::Cycle).unwrap();
        assert_eq!((two.d(), two.slots()), (1, 1));
        sound(&s, &a);
    }

    #[test]
    fn direct_counts() {
        let s = direct_circuits(p(8, 1), &TrafficMatrix::uniform(8, 1)).unwrap();
        assert_eq!((s.d(), s.power_sum()), (7, 7));
        let a = TrafficMatrix::uniform(8, 1);
        let s2 = direct_circuits(p(8, 2), &a).unwrap();
        assert_eq!((s2.d(), s2.power_sum()), (4, 4));
        assert_eq!(s2.stages[3].schedule.rounds[0].entries.len(), 8);
        sound(&s2, &a);
        for (n, k) in [(9, 2), (16, 3), (5, 4)] {
            let s = direct_circuits(p(n, k), &TrafficMatrix::uniform(n, 1)).unwrap();
            assert_eq!(s.power_sum() as usize, (n - 1).div_ceil(k));
            sound(&s, &TrafficMatrix::uniform(n, 1));
        }
    }

    fn reconstruct(n: usize, terms: &[BvnTerm]) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0; n]; n];
        for t in terms {
            for u in (0..n).filter(|&u| t.carries[u]) {
                out[u][t.perm[u]] += t.weight;
            }
        }
        out
    }

    #[test]
    fn bvn_uniform_and_permutation() {
        let a = TrafficMatrix::uniform(8, 3);
        let terms = greedy_bvn(&a).unwrap();
        assert_eq!(terms.len(), 7);
        assert!(terms.iter().all(|t| t.weight == 3 && t.carries.iter().all(|&c| c)));
        assert_eq!(reconstruct(8, &terms), a.rows());

        let mut shift = TrafficMatrix::zeros(6);
        for u in 0..6 {
            shift.set(u, (u + 2) % 6, 5).unwrap();
        }
        assert_eq!(greedy_bvn(&shift).unwrap().len(), 1);
    }

    #[test]
    fn bvn_random_reconstructs() {
        for seed in 0..5 {
            for kind in [WorkloadKind::Random, WorkloadKind::Zipf] {
                let a = gen_traffic(&WorkloadSpec::new(kind, 9, 4).with_seed(seed)).unwrap();
                let terms = greedy_bvn(&a).unwrap();
                assert!(terms.len() <= 81);
                assert_eq!(reconstruct(9, &terms), a.rows());
                for k in [1, 2] {
                    sound(&bvn_strategy(p(9, k), &a).unwrap(), &a);
                }
            }
        }
    }

    #[test]
    fn sparse_demand_forces_completion() {
        // Only 0 -> 1 has demand; every other circuit is filler.
        let mut a = TrafficMatrix::zeros(5);
        a.set(0, 1, 2).unwrap();
        a.set(2, 1, 1).unwrap();
        let s = bvn_strategy(p(5, 1), &a).unwrap();
        sound(&s, &a);
    }
}
