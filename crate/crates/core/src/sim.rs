//! Deterministic store-and-forward replay of a strategy, chunk by chunk.
//!
//! Time is kept in integer ticks of `T`: a link carries one chunk at a time
//! and holds it for exactly one tick. Rounds run back to back, and each stage
//! starts with a reconfiguration of length `R` during which nothing moves.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::CostModel;
use crate::schedule::{Round, Strategy};
use crate::traffic::TrafficMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimConfig {
    pub cost_model: CostModel,
    /// Serve the lowest chunk index first at a contended link; otherwise
    /// first come, first served.
    pub chunk_priority: bool,
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(cost_model: CostModel) -> Self {
        SimConfig { cost_model, chunk_priority: true, record_trace: false }
    }
}

/// A chunk left waiting at a link while another flow's chunk used it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimViolation {
    pub stage: usize,
    pub round: usize,
    pub tick: u64,
    pub node: usize,
    pub layer: usize,
    pub waiting: (usize, usize),
    pub sending: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEvent {
    pub time_s: f64,
    pub event: TraceKind,
    pub node: usize,
    pub layer: Option<usize>,
    pub flow: (usize, usize),
    pub chunk_index: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Send,
    Deliver,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReport {
    pub per_round_seconds: Vec<f64>,
    pub per_stage_seconds: Vec<f64>,
    pub total_seconds: f64,
    /// `(start time, stage index)` of every reconfiguration.
    pub reconfig_events: Vec<(f64, usize)>,
    pub violations: Vec<SimViolation>,
    pub total_ticks: u64,
    pub delivered_chunks: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceEvent>,
}

struct RoundOutcome {
    ticks: u64,
    delivered: u64,
    violations: Vec<(u64, usize, usize, usize, usize)>,
    trace: Vec<(u64, TraceKind, usize, Option<usize>, usize, u64)>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    Arrive = 0,
    Dispatch = 1,
}

/// Chunk `index` of entry `entry`, having completed `hop` hops.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Chunk {
    entry: usize,
    index: u64,
    hop: usize,
}

/// `(tick, phase, sequence, chunk, link)`, popped smallest first.
type Event = Reverse<(u64, Phase, u64, Option<Chunk>, (usize, usize))>;

fn run_round(round: &Round, cfg: &SimConfig) -> Result<RoundOutcome> {
    // Event key: (tick, phase, sequence). Arrivals at a tick are processed
    // before dispatch so they compete fairly for the link.
    let mut events: BinaryHeap<Event> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut queues: BTreeMap<(usize, usize), VecDeque<(u64, Chunk)>> = BTreeMap::new();
    let mut busy_until: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut dispatch_pending: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut out = RoundOutcome { ticks: 0, delivered: 0, violations: Vec::new(), trace: Vec::new() };
    let total: u64 = round.entries.iter().map(|e| e.size_chunks).sum();

    let link_of = |c: &Chunk| {
        let h = &round.entries[c.entry].path.hops[c.hop];
        (h.from, h.layer)
    };
    for (entry, e) in round.entries.iter().enumerate() {
        if e.path.hops.is_empty() {
            return Err(Error::InvalidPath { src: e.src, dst: e.dst, reason: "path has no hops".into() });
        }
        for index in 0..e.size_chunks {
            events.push(Reverse((0, Phase::Arrive, seq, Some(Chunk { entry, index, hop: 0 }), (0, 0))));
            seq += 1;
        }
    }

    while let Some(Reverse((tick, phase, _, chunk, link))) = events.pop() {
        match phase {
            Phase::Arrive => {
                let c = chunk.expect("arrivals carry a chunk");
                let e = &round.entries[c.entry];
                if c.hop == e.path.hops.len() {
                    out.delivered += 1;
                    out.ticks = out.ticks.max(tick);
                    if cfg.record_trace {
                        out.trace.push((tick, TraceKind::Deliver, e.dst, None, c.entry, c.index));
                    }
                    continue;
                }
                let l = link_of(&c);
                queues.entry(l).or_default().push_back((seq, c));
                seq += 1;
                let free_at = busy_until.get(&l).copied().unwrap_or(0).max(tick);
                if dispatch_pending.get(&l) != Some(&free_at) {
                    dispatch_pending.insert(l, free_at);
                    events.push(Reverse((free_at, Phase::Dispatch, seq, None, l)));
                    seq += 1;
                }
            }
            Phase::Dispatch => {
                if busy_until.get(&link).is_some_and(|&b| b > tick) {
                    continue;
                }
                dispatch_pending.remove(&link);
                let Some(queue) = queues.get_mut(&link) else { continue };
                let pick = if cfg.chunk_priority {
                    (0..queue.len()).min_by_key(|&i| (queue[i].1.index, queue[i].1.entry, queue[i].0))
                } else {
                    (0..queue.len()).min_by_key(|&i| queue[i].0)
                };
                let Some(pick) = pick else { continue };
                let (_, c) = queue.remove(pick).expect("index in range");
                if let Some(&(_, other)) = queue.iter().find(|(_, o)| o.entry != c.entry) {
                    out.violations.push((tick, link.0, link.1, other.entry, c.entry));
                }
                if cfg.record_trace {
                    out.trace.push((tick, TraceKind::Send, link.0, Some(link.1), c.entry, c.index));
                }
                busy_until.insert(link, tick + 1);
                events.push(Reverse((tick + 1, Phase::Arrive, seq, Some(Chunk { hop: c.hop + 1, ..c }), (0, 0))));
                seq += 1;
                if !queue.is_empty() {
                    dispatch_pending.insert(link, tick + 1);
                    events.push(Reverse((tick + 1, Phase::Dispatch, seq, None, link)));
                    seq += 1;
                }
            }
        }
    }
    if out.delivered != total {
        return Err(Error::Deadlock { pending: (total - out.delivered) as usize });
    }
    Ok(out)
}

/// Replays `strategy` and checks that exactly `a` is delivered.
pub fn simulate(strategy: &Strategy, a: &TrafficMatrix, cfg: &SimConfig) -> Result<SimReport> {
    cfg.cost_model.validate()?;
    let served = strategy.served();
    for src in 0..a.n() {
        for dst in 0..a.n() {
            let s = served.get(src).and_then(|r| r.get(dst)).copied().unwrap_or(0);
            if s != a.get(src, dst) {
                return Err(Error::Conservation { src, dst, served: s, demanded: a.get(src, dst) });
            }
        }
    }
    let t = cfg.cost_model.t();
    let r = cfg.cost_model.reconfig_delay;
    let mut report = SimReport {
        per_round_seconds: Vec::new(),
        per_stage_seconds: Vec::new(),
        total_seconds: 0.0,
        reconfig_events: Vec::new(),
        violations: Vec::new(),
        total_ticks: 0,
        delivered_chunks: 0,
        trace: Vec::new(),
    };
    let mut clock = 0.0;
    for (i, stage) in strategy.stages.iter().enumerate() {
        report.reconfig_events.push((clock, i));
        clock += r;
        let mut stage_ticks = 0;
        for (j, round) in stage.schedule.rounds.iter().enumerate() {
            let outcome = run_round(round, cfg)?;
            for (tick, node, layer, waiting, sending) in outcome.violations {
                let flow = |e: usize| (round.entries[e].src, round.entries[e].dst);
                report.violations.push(SimViolation {
                    stage: i,
                    round: j,
                    tick,
                    node,
                    layer,
                    waiting: flow(waiting),
                    sending: flow(sending),
                });
            }
            for (tick, event, node, layer, entry, chunk_index) in outcome.trace {
                let e = &round.entries[entry];
                report.trace.push(TraceEvent {
                    time_s: clock + tick as f64 * t,
                    event,
                    node,
                    layer,
                    flow: (e.src, e.dst),
                    chunk_index,
                });
            }
            report.per_round_seconds.push(outcome.ticks as f64 * t);
            report.delivered_chunks += outcome.delivered;
            stage_ticks += outcome.ticks;
            clock += outcome.ticks as f64 * t;
        }
        report.per_stage_seconds.push(stage_ticks as f64 * t);
        report.total_ticks += stage_ticks;
    }
    report.total_seconds = report.total_ticks as f64 * t + strategy.d() as f64 * r;
    Ok(report)
}

/// `|simulated - modeled| / modeled`, with the model evaluated without its
/// contention check so contended strategies can be compared too.
pub fn compare_abstract_vs_sim(strategy: &Strategy, a: &TrafficMatrix, cfg: &SimConfig) -> Result<f64> {
    let cm = &cfg.cost_model;
    let modeled = strategy.d() as f64 * cm.reconfig_delay + strategy.slots() as f64 * cm.t();
    let simulated = simulate(strategy, a, cfg)?.total_seconds;
    Ok((simulated - modeled).abs() / modeled)
}

/// CSV with header `time_s,event,link,flow,chunk_index`.
pub fn trace_csv(report: &SimReport) -> String {
    let mut s = String::from("time_s,event,link,flow,chunk_index\n");
    for e in &report.trace {
        let kind = match e.event {
            TraceKind::Send => "send",
            TraceKind::Deliver => "deliver",
        };
        let link = match e.layer {
            Some(l) => format!("{}:{}", e.node, l),
            None => format!("{}", e.node),
        };
        s.push_str(&format!("{:.12e},{kind},{link},{}->{},{}\n", e.time_s, e.flow.0, e.flow.1, e.chunk_index));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{cross_topology_assign, Hop, Path, RoundEntry, Schedule, Stage};
    use crate::topology::{build_cycle, shift_sequence_from};

    fn single(len: usize, c: u64) -> (Strategy, TrafficMatrix) {
        let topo = build_cycle(len + 1).unwrap();
        let entry = RoundEntry { src: 0, dst: len, size_chunks: c, path: Path::from_layers(&topo, 0, &vec![0; len]) };
        let mut a = TrafficMatrix::zeros(len + 1);
        a.set(0, len, c).unwrap();
        let s = Strategy {
            n: len + 1,
            k: 1,
            stages: vec![Stage { topology: topo, schedule: Schedule { rounds: vec![Round::new(vec![entry])] } }],
            provenance: Default::default(),
        };
        (s, a)
    }

    #[test]
    fn pipeline_of_four_chunks_over_three_hops() {
        let (s, a) = single(3, 4);
        let cfg = SimConfig::new(CostModel::from_t(1.0, 0.0));
        let r = simulate(&s, &a, &cfg).unwrap();
        assert_eq!(r.total_ticks, 6);
        assert!(r.violations.is_empty());
        assert_eq!(r.delivered_chunks, 4);
    }

    #[test]
    fn motivating_strategies_exact() {
        let t = 3.0;
        let rr = 11.0;
        let cfg = SimConfig::new(CostModel::from_t(t, rr));
        let a = TrafficMatrix::uniform(8, 1);
        for (shifts, hops) in [(vec![1], 28u64), (vec![1, 7], 16), ((1..8).collect::<Vec<_>>(), 7)] {
            let s = cross_topology_assign(&shift_sequence_from(8, &shifts).unwrap(), &a).unwrap();
            let r = simulate(&s, &a, &cfg).unwrap();
            assert_eq!(r.total_ticks, hops);
            assert_eq!(r.total_seconds, hops as f64 * t + shifts.len() as f64 * rr);
            assert_eq!(compare_abstract_vs_sim(&s, &a, &cfg).unwrap(), 0.0);
            assert_eq!(r.reconfig_events.len(), shifts.len());
        }
    }

    #[test]
    fn injected_contention_is_seen() {
        let topo = build_cycle(4).unwrap();
        let e1 = RoundEntry { src: 0, dst: 2, size_chunks: 1, path: Path::from_layers(&topo, 0, &[0, 0]) };
        // Forces a second flow onto link 1->2 at the same moment.
        let e2 = RoundEntry { src: 1, dst: 3, size_chunks: 1, path: Path::from_layers(&topo, 1, &[0, 0]) };
        let e3 = RoundEntry { src: 1, dst: 2, size_chunks: 1, path: Path { hops: vec![Hop { from: 1, to: 2, layer: 0 }] } };
        let mut a = TrafficMatrix::zeros(4);
        for e in [&e1, &e2, &e3] {
            a.set(e.src, e.dst, 1).unwrap();
        }
        let s = Strategy {
            n: 4,
            k: 1,
            stages: vec![Stage { topology: topo, schedule: Schedule { rounds: vec![Round::new(vec![e1, e2, e3])] } }],
            provenance: Default::default(),
        };
        let cfg = SimConfig::new(CostModel::from_t(1.0, 1.0));
        let r = simulate(&s, &a, &cfg).unwrap();
        assert!(!r.violations.is_empty());
        assert!(compare_abstract_vs_sim(&s, &a, &cfg).unwrap() > 0.0);
    }

    #[test]
    fn deterministic_with_trace() {
        let a = TrafficMatrix::uniform(6, 3);
        let s = cross_topology_assign(&shift_sequence_from(6, &[1, 5]).unwrap(), &a).unwrap();
        let cfg = SimConfig { record_trace: true, ..SimConfig::new(CostModel::from_t(1.0, 2.0)) };
        let r1 = simulate(&s, &a, &cfg).unwrap();
        let r2 = simulate(&s, &a, &cfg).unwrap();
        assert_eq!(r1, r2);
        let delivered = r1.trace.iter().filter(|e| e.event == TraceKind::Deliver).count() as u64;
        assert_eq!(delivered, a.total_chunks());
        assert!(trace_csv(&r1).starts_with("time_s,event,link,flow,chunk_index\n"));
        // No chunk moves during a reconfiguration window.
        for &(start, _) in &r1.reconfig_events {
            assert!(r1.trace.iter().all(|e| e.event != TraceKind::Send || e.time_s < start || e.time_s >= start + 2.0));
        }
    }

    #[test]
    fn wrong_demand_rejected() {
        let (s, _) = single(2, 2);
        let cfg = SimConfig::new(CostModel::from_t(1.0, 0.0));
        assert!(matches!(simulate(&s, &TrafficMatrix::zeros(3), &cfg), Err(Error::Conservation { .. })));
    }
}
