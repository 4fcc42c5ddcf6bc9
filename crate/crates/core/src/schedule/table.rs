use std::fmt::Write;

use super::Strategy;

const LISTED_FLOWS: usize = 8;

/// Plain-text listing of every round: stage, round, longest path, duration
/// in `T`, entry count, and the first few flows.
pub fn round_table(strategy: &Strategy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>5} {:>5} {:>5} {:>7} {:>7}  flows", "stage", "round", "hops", "slots", "entries");
    for (i, stage) in strategy.stages.iter().enumerate() {
        for (j, round) in stage.schedule.rounds.iter().enumerate() {
            let mut flows: Vec<String> = round
                .entries
                .iter()
                .take(LISTED_FLOWS)
                .map(|e| {
                    if e.size_chunks == 1 {
                        format!("{}->{}", e.src, e.dst)
                    } else {
                        format!("{}->{}x{}", e.src, e.dst, e.size_chunks)
                    }
                })
                .collect();
            if round.entries.len() > LISTED_FLOWS {
                flows.push("...".into());
            }
            let _ = writeln!(
                out,
                "{i:>5} {j:>5} {:>5} {:>7} {:>7}  {}",
                round.max_hops(),
                round.slots(),
                round.entries.len(),
                flows.join(" ")
            );
        }
    }
    let _ = writeln!(out, "d = {}, power sum = {}, slots = {}", strategy.d(), strategy.power_sum(), strategy.slots());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::cross_topology_assign;
    use crate::topology::shift_sequence_from;
    use crate::traffic::TrafficMatrix;

    #[test]
    fn lists_rounds() {
        let s = cross_topology_assign(&shift_sequence_from(8, &[1, 7]).unwrap(), &TrafficMatrix::uniform(8, 1)).unwrap();
        let t = round_table(&s);
        assert_eq!(t.lines().count(), 1 + s.round_count() + 1);
        assert!(t.ends_with("d = 2, power sum = 16, slots = 16\n"));
    }
}
