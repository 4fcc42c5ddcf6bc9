use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Round, Schedule, Strategy};

/// Two entries of one round claiming the same link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    pub round: usize,
    pub node: usize,
    pub layer: usize,
    /// 1-based hop index for unit-chunk rounds; `None` for multi-chunk
    /// rounds, where any shared link conflicts.
    pub hop: Option<usize>,
    pub first: (usize, usize),
    pub second: (usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContentionReport {
    pub violations: Vec<Violation>,
}

impl ContentionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Unit-chunk rounds may reuse a link at different hop indices; multi-chunk
/// rounds may not share a link at all.
pub fn check_round(round: &Round, round_index: usize) -> Vec<Violation> {
    let unit = round.unit_chunks();
    let mut owner: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut out = Vec::new();
    for (i, e) in round.entries.iter().enumerate() {
        for (p, hop) in e.path.hops.iter().enumerate() {
            let slot = if unit { p + 1 } else { 0 };
            match owner.get(&(hop.from, hop.layer, slot)) {
                Some(&j) if j != i => {
                    let other = &round.entries[j];
                    out.push(Violation {
                        stage: None,
                        round: round_index,
                        node: hop.from,
                        layer: hop.layer,
                        hop: unit.then_some(p + 1),
                        first: (other.src, other.dst),
                        second: (e.src, e.dst),
                    });
                }
                Some(_) => {}
                None => {
                    owner.insert((hop.from, hop.layer, slot), i);
                }
            }
        }
    }
    out
}

pub fn check_schedule(schedule: &Schedule) -> ContentionReport {
    ContentionReport { violations: schedule.rounds.iter().enumerate().flat_map(|(j, r)| check_round(r, j)).collect() }
}

pub fn check_strategy(strategy: &Strategy) -> ContentionReport {
    let mut violations = Vec::new();
    for (i, stage) in strategy.stages.iter().enumerate() {
        for mut v in check_schedule(&stage.schedule).violations {
            v.stage = Some(i);
            violations.push(v);
        }
    }
    ContentionReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{Hop, Path, RoundEntry};

    fn entry(src: usize, dst: usize, c: u64, hops: &[(usize, usize)]) -> RoundEntry {
        RoundEntry {
            src,
            dst,
            size_chunks: c,
            path: Path { hops: hops.iter().map(|&(from, to)| Hop { from, to, layer: 0 }).collect() },
        }
    }

    #[test]
    fn forced_collision() {
        let a = entry(0, 2, 1, &[(1, 2)]);
        let b = entry(1, 2, 1, &[(1, 2)]);
        let r = Round::new(vec![a, b]);
        let v = check_round(&r, 0);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].node, v[0].hop, v[0].first, v[0].second), (1, Some(1), (0, 2), (1, 2)));
    }

    #[test]
    fn unit_vs_multi_rule() {
        let a = entry(0, 2, 1, &[(0, 1), (1, 2)]);
        let b = entry(1, 2, 1, &[(1, 2)]);
        let unit = Round::new(vec![a.clone(), b.clone()]);
        assert!(check_round(&unit, 0).is_empty());
        let multi = Round::new(vec![RoundEntry { size_chunks: 2, ..a }, b]);
        assert_eq!(check_round(&multi, 3)[0].hop, None);
        assert_eq!(check_round(&multi, 3)[0].round, 3);
    }

    #[test]
    fn single_entry_clean() {
        let r = Round::new(vec![entry(0, 3, 5, &[(0, 1), (1, 2), (2, 3)])]);
        assert!(check_round(&r, 0).is_empty());
    }
}
