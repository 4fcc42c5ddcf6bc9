use std::collections::HashSet;

use super::{LinkSlot, Round, Schedule};

/// Link keys a round occupies: `(node, layer, hop)` for unit-chunk rounds,
/// `(node, layer, 0)` otherwise.
fn footprint(round: &Round) -> HashSet<LinkSlot> {
    let unit = round.unit_chunks();
    round
        .entries
        .iter()
        .flat_map(|e| e.path.hops.iter().enumerate().map(move |(p, h)| (h.from, h.layer, if unit { p + 1 } else { 0 })))
        .collect()
}

/// Greedy pairwise merge: each round absorbs every later round it does not
/// contend with. Only rounds of the same chunk kind are combined.
pub fn merge_rounds(schedule: &Schedule) -> Schedule {
    let mut slots: Vec<Option<(bool, HashSet<LinkSlot>, Round)>> =
        schedule.rounds.iter().map(|r| Some((r.unit_chunks(), footprint(r), r.clone()))).collect();
    let mut out = Vec::with_capacity(slots.len());
    for i in 0..slots.len() {
        let Some((unit, mut used, mut round)) = slots[i].take() else {
            continue;
        };
        for slot in slots.iter_mut().skip(i + 1) {
            let fits = matches!(slot, Some((u, fp, _)) if *u == unit && fp.is_disjoint(&used));
            if fits {
                let (_, fp, other) = slot.take().expect("checked above");
                used.extend(fp);
                round.entries.extend(other.entries);
            }
        }
        out.push(round);
    }
    Schedule { rounds: out }
}
