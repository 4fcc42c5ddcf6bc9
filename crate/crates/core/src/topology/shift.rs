use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::build::{build_circulant, build_cycle};
use super::TopologySequence;
use crate::error::{Error, Result};

/// Order in which shifted cycles are appended after the base `n`-cycle and
/// the `(n-1)`-shift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ShiftOrder {
    /// Next shift is the one that lowers the class hop total the most; ties
    /// prefer shifts coprime with `n`, then the smaller shift.
    #[default]
    Greedy,
    /// Ascending coprime shifts, then the remaining ones.
    CoprimeFirst,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Calls `f(t, h)` for every class `t` reachable on the `s`-shifted cycle,
/// where `h` is the smallest hop count with `h*s = t mod n`.
fn for_each_class(n: usize, s: usize, mut f: impl FnMut(usize, u64)) {
    let mut x = s % n;
    let mut h = 1;
    while x != 0 {
        f(x, h);
        x = (x + s) % n;
        h += 1;
    }
}

fn gain(n: usize, s: usize, best: &[u64]) -> u64 {
    let mut g = 0;
    for_each_class(n, s, |t, h| g += best[t].saturating_sub(h));
    g
}

fn apply(n: usize, s: usize, best: &mut [u64]) {
    for_each_class(n, s, |t, h| best[t] = best[t].min(h));
}

fn prefix(n: usize) -> Vec<usize> {
    if n > 2 {
        vec![1, n - 1]
    } else {
        vec![1]
    }
}

/// The full shift order (length `n - 1`) plus the class hop total after
/// each prefix: `(shifts, power_sums)` with `power_sums[d - 1]` for `d` shifts.
fn order_with_sums(n: usize, order: ShiftOrder) -> (Vec<usize>, Vec<u64>) {
    let mut best = vec![u64::MAX; n];
    best[0] = 0;
    let mut shifts = Vec::with_capacity(n - 1);
    let mut sums = Vec::with_capacity(n - 1);
    let mut push = |s: usize, best: &mut Vec<u64>, shifts: &mut Vec<usize>| {
        apply(n, s, best);
        shifts.push(s);
        sums.push(best[1..].iter().sum::<u64>());
    };
    let head = prefix(n);
    for &s in &head {
        push(s, &mut best, &mut shifts);
    }
    match order {
        ShiftOrder::CoprimeFirst => {
            let rest: Vec<usize> = (2..n.saturating_sub(1))
                .filter(|&s| gcd(s, n) == 1)
                .chain((2..n.saturating_sub(1)).filter(|&s| gcd(s, n) != 1))
                .collect();
            for s in rest {
                push(s, &mut best, &mut shifts);
            }
        }
        ShiftOrder::Greedy => {
            // Gains only shrink as `best` improves, so a stale heap key is an
            // upper bound and the first fresh key popped is the true maximum.
            let key = |g: u64, s: usize| (g, Reverse(gcd(s, n) != 1), Reverse(s));
            let mut heap: BinaryHeap<(_, usize)> = (2..n.saturating_sub(1))
                .map(|s| (key(gain(n, s, &best), s), 0))
                .collect();
            let mut step = 0;
            while let Some((k, stamp)) = heap.pop() {
                let s = k.2 .0;
                if stamp == step {
                    push(s, &mut best, &mut shifts);
                    step += 1;
                } else {
                    heap.push((key(gain(n, s, &best), s), step));
                }
            }
        }
    }
    (shifts, sums)
}

/// First `d` shifts of the given order.
pub fn shift_order(n: usize, d: usize, order: ShiftOrder) -> Result<Vec<usize>> {
    if n < 2 || d == 0 || d > n - 1 {
        return Err(Error::InvalidParams(format!("shift count d={d} outside [1, {}]", n.saturating_sub(1))));
    }
    let (mut shifts, _) = order_with_sums(n, order);
    shifts.truncate(d);
    Ok(shifts)
}

/// Class hop totals of the shift-sequence strategies for every `d` in
/// `1..=n-1`: entry `d - 1` is `sum_t min_i h_i(t)` over the first `d` shifts.
pub fn shift_power_sums(n: usize, order: ShiftOrder) -> Vec<u64> {
    order_with_sums(n, order).1
}

/// Class hop total for an explicit shift list, or `None` if some class is
/// unreachable.
pub fn shift_list_power_sum(n: usize, shifts: &[usize]) -> Option<u64> {
    let mut best = vec![u64::MAX; n];
    best[0] = 0;
    for &s in shifts {
        apply(n, s, &mut best);
    }
    best.iter().all(|&b| b != u64::MAX).then(|| best.iter().sum())
}

pub fn build_shift_sequence(n: usize, d: usize) -> Result<TopologySequence> {
    build_shift_sequence_with(n, d, ShiftOrder::default())
}

pub fn build_shift_sequence_with(n: usize, d: usize, order: ShiftOrder) -> Result<TopologySequence> {
    let shifts = shift_order(n, d, order)?;
    shift_sequence_from(n, &shifts)
}

/// Base cycle followed by the given shifted cycles.
pub fn shift_sequence_from(n: usize, shifts: &[usize]) -> Result<TopologySequence> {
    let topologies = shifts
        .iter()
        .map(|&s| if s == 1 { build_cycle(n) } else { build_circulant(n, &[s]) })
        .collect::<Result<Vec<_>>>()?;
    let trace = shifts.iter().map(|s| format!("shift {s}")).collect();
    TopologySequence::new(topologies, trace)
}
