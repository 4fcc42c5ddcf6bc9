//! Strategies, contention-free round schedules, and the schedulers that
//! build them.

mod assign;
mod contention;
mod expander;
mod merge;
mod realize;
mod relabel;
mod symmetric;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::Topology;

/// A link `(node, layer)` at a hop position; the position is 0 in
/// multi-chunk rounds, where a link is held for the whole round.
pub(crate) type LinkSlot = (usize, usize, usize);

pub use assign::{assign_template, cross_topology_assign, TemplateScheduler};
pub use contention::{check_round, check_schedule, check_strategy, ContentionReport, Violation};
pub use expander::{expander_template, schedule_expander};
pub use merge::merge_rounds;
pub use realize::{predicted_slots, realize};
pub use relabel::{relabel_for_sizes, Relabeling, RelabelOptions};
pub use symmetric::{schedule_symmetric, symmetric_power_sum, symmetric_template};
pub use table::round_table;

/// One link traversal: `from -> to` through switch `layer`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hop {
    pub from: usize,
    pub to: usize,
    pub layer: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Path {
    pub hops: Vec<Hop>,
}

impl Path {
    /// Walks `layers` from `src`.
    pub fn from_layers(topo: &Topology, src: usize, layers: &[usize]) -> Path {
        let mut at = src;
        let hops = layers
            .iter()
            .map(|&layer| {
                let to = topo.successor(at, layer);
                let hop = Hop { from: at, to, layer };
                at = to;
                hop
            })
            .collect();
        Path { hops }
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Checks that the path runs `src -> dst` over edges of `topo`.
    pub fn validate(&self, topo: &Topology, src: usize, dst: usize) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidPath { src, dst, reason });
        let Some(first) = self.hops.first() else {
            return fail("path has no hops".into());
        };
        if first.from != src {
            return fail(format!("starts at {} instead of {src}", first.from));
        }
        for (p, hop) in self.hops.iter().enumerate() {
            if hop.layer >= topo.k() || hop.from >= topo.n() {
                return fail(format!("hop {p} names a missing link ({}, layer {})", hop.from, hop.layer));
            }
            if topo.successor(hop.from, hop.layer) != hop.to {
                return fail(format!("hop {p}: layer {} does not wire {} -> {}", hop.layer, hop.from, hop.to));
            }
            if p > 0 && self.hops[p - 1].to != hop.from {
                return fail(format!("hop {p} does not continue from {}", self.hops[p - 1].to));
            }
        }
        let end = self.hops.last().expect("nonempty").to;
        if end != dst {
            return fail(format!("ends at {end}"));
        }
        Ok(())
    }

    pub(crate) fn relabeled(&self, perm: &[usize]) -> Path {
        Path {
            hops: self.hops.iter().map(|h| Hop { from: perm[h.from], to: perm[h.to], layer: h.layer }).collect(),
        }
    }
}

/// `size_chunks` chunks of flow `src -> dst` sent along `path`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundEntry {
    pub src: usize,
    pub dst: usize,
    pub size_chunks: u64,
    #[serde(flatten)]
    pub path: Path,
}

impl RoundEntry {
    pub fn hops(&self) -> usize {
        self.path.len()
    }

    /// Store-and-forward completion time in per-hop slots: `h + c - 1`.
    pub fn slots(&self) -> u64 {
        self.path.len() as u64 + self.size_chunks.saturating_sub(1)
    }
}

/// Entries sent together on one topology.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Round {
    pub entries: Vec<RoundEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RoundRepr {
    #[serde(default)]
    unit_chunks: Option<bool>,
    entries: Vec<RoundEntry>,
}

impl Serialize for Round {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RoundRepr { unit_chunks: Some(self.unit_chunks()), entries: self.entries.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Round {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // unitChunks is derived from the entries; a stored value is ignored.
        let repr = RoundRepr::deserialize(d)?;
        Ok(Round { entries: repr.entries })
    }
}

impl Round {
    pub fn new(entries: Vec<RoundEntry>) -> Self {
        Round { entries }
    }

    pub fn unit_chunks(&self) -> bool {
        self.entries.iter().all(|e| e.size_chunks == 1)
    }

    pub fn max_hops(&self) -> usize {
        self.entries.iter().map(RoundEntry::hops).max().unwrap_or(0)
    }

    pub fn total_hops(&self) -> usize {
        self.entries.iter().map(RoundEntry::hops).sum()
    }

    /// Round duration in units of `T`.
    pub fn slots(&self) -> u64 {
        self.entries.iter().map(RoundEntry::slots).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub rounds: Vec<Round>,
}

impl Schedule {
    pub fn slots(&self) -> u64 {
        self.rounds.iter().map(Round::slots).sum()
    }

    pub fn power_sum(&self) -> u64 {
        self.rounds.iter().map(|r| r.max_hops() as u64).sum()
    }
}

/// One topology and the rounds run on it before the next reconfiguration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub topology: Topology,
    #[serde(flatten)]
    pub schedule: Schedule,
}

/// Where a strategy came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Provenance {
    pub family: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub offsets: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relabeling: Option<Vec<usize>>,
    /// Set when fewer topologies than requested could be generated.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

/// A sequence of topologies with their schedules. `stages.len()` is the
/// reconfiguration count `d`, the initial topology included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub n: usize,
    pub k: usize,
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Strategy {
    pub fn d(&self) -> usize {
        self.stages.len()
    }

    /// Sum over rounds of the longest path, in hops.
    pub fn power_sum(&self) -> u64 {
        self.stages.iter().map(|s| s.schedule.power_sum()).sum()
    }

    /// Total transmission time in units of `T`.
    pub fn slots(&self) -> u64 {
        self.stages.iter().map(|s| s.schedule.slots()).sum()
    }

    pub fn round_count(&self) -> usize {
        self.stages.iter().map(|s| s.schedule.rounds.len()).sum()
    }

    /// Served chunks per `(src, dst)`.
    pub fn served(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.n]; self.n];
        for e in self.entries() {
            out[e.src][e.dst] += e.size_chunks;
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = &RoundEntry> {
        self.stages.iter().flat_map(|s| s.schedule.rounds.iter().flat_map(|r| r.entries.iter()))
    }

    /// Renames template node `x` to `perm[x]` everywhere.
    pub fn relabeled(&self, perm: &[usize]) -> Strategy {
        let stages = self
            .stages
            .iter()
            .map(|st| Stage {
                topology: st.topology.relabeled(perm),
                schedule: Schedule {
                    rounds: st
                        .schedule
                        .rounds
                        .iter()
                        .map(|r| Round {
                            entries: r
                                .entries
                                .iter()
                                .map(|e| RoundEntry {
                                    src: perm[e.src],
                                    dst: perm[e.dst],
                                    size_chunks: e.size_chunks,
                                    path: e.path.relabeled(perm),
                                })
                                .collect(),
                        })
                        .collect(),
                },
            })
            .collect();
        Strategy { n: self.n, k: self.k, stages, provenance: self.provenance.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::build_cycle;

    #[test]
    fn path_validation() {
        let c = build_cycle(5).unwrap();
        let p = Path::from_layers(&c, 3, &[0, 0]);
        assert_eq!(p.hops.last().unwrap().to, 0);
        assert!(p.validate(&c, 3, 0).is_ok());
        assert!(p.validate(&c, 3, 1).is_err());
        let broken = Path { hops: vec![Hop { from: 3, to: 4, layer: 0 }, Hop { from: 0, to: 1, layer: 0 }] };
        assert!(broken.validate(&c, 3, 1).is_err());
        let wrong_edge = Path { hops: vec![Hop { from: 3, to: 0, layer: 0 }] };
        assert!(wrong_edge.validate(&c, 3, 0).is_err());
        assert!(Path::default().validate(&c, 0, 1).is_err());
    }

    #[test]
    fn entry_json_field_names() {
        let c = build_cycle(4).unwrap();
        let e = RoundEntry { src: 0, dst: 2, size_chunks: 3, path: Path::from_layers(&c, 0, &[0, 0]) };
        let round = Round::new(vec![e]);
        let v = serde_json::to_value(&round).unwrap();
        assert_eq!(v["unitChunks"], false);
        assert_eq!(v["entries"][0]["sizeChunks"], 3);
        assert_eq!(v["entries"][0]["hops"][1], serde_json::json!({"from": 1, "to": 2, "layer": 0}));
        let back: Round = serde_json::from_value(v).unwrap();
        assert_eq!(back, round);
        assert_eq!(round.slots(), 4);
    }
}
