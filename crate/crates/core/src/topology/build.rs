use super::matching::decompose_regular;
use super::{Family, Topology};
use crate::error::{Error, Result};
use crate::params::NetworkParams;
use crate::schedule::symmetric_power_sum;

/// The `n`-cycle `i -> i+1 mod n`.
pub fn build_cycle(n: usize) -> Result<Topology> {
    let params = NetworkParams::new(n, 1)?;
    Topology::new(params, vec![translation(n, 1)], Family::Cycle)
}

/// Circulant graph with one translation layer per offset.
pub fn build_circulant(n: usize, offsets: &[usize]) -> Result<Topology> {
    let params = NetworkParams::new(n, offsets.len())?;
    for (i, &c) in offsets.iter().enumerate() {
        if c == 0 || c >= n {
            return Err(Error::InvalidParams(format!("offset {c} outside [1, {}]", n - 1)));
        }
        if offsets[..i].contains(&c) {
            return Err(Error::InvalidParams(format!("duplicate offset {c}")));
        }
    }
    let layers = offsets.iter().map(|&c| translation(n, c)).collect();
    Topology::new(params, layers, Family::Circulant { offsets: offsets.to_vec() })
}

pub(crate) fn translation(n: usize, offset: usize) -> Vec<usize> {
    (0..n).map(|u| (u + offset) % n).collect()
}

/// Candidate loop-repair partners tried per self-loop.
const REPAIR_CANDIDATES: usize = 8;

/// Eccentricity maximum of the digraph `succ`, `usize::MAX` if disconnected.
fn succ_diameter(succ: &[Vec<usize>]) -> usize {
    let n = succ.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    let mut worst = 0;
    for s in 0..n {
        dist.fill(usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        let mut seen = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &succ[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    worst = worst.max(dist[v]);
                    seen += 1;
                    queue.push_back(v);
                }
            }
        }
        if seen < n {
            return usize::MAX;
        }
    }
    worst
}

/// Out-neighbor lists `u -> (-k*u - j) mod n`, `j = 1..=k`, with self-loops
/// swapped away.
pub fn genkautz_edges(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut succ: Vec<Vec<usize>> = (0..n)
        .map(|u| (1..=k).map(|j| (n * (k + 1) - (k * u) % n - j) % n).collect())
        .collect();
    for u in 0..n {
        for slot in 0..k {
            if succ[u][slot] != u {
                continue;
            }
            // Swap targets with an edge v->w in the same slot. Partners that
            // leave no parallel edge come first; among the first few, the one
            // keeping the diameter smallest wins.
            let swappable = |succ: &[Vec<usize>], v: usize, strict: bool| {
                let w = succ[v][slot];
                v != u && w != u && w != v && (!strict || (!succ[u].contains(&w) && !succ[v].contains(&u)))
            };
            let mut partners: Vec<usize> = (0..n).filter(|&v| swappable(&succ, v, true)).take(REPAIR_CANDIDATES).collect();
            if partners.is_empty() {
                partners = (0..n).filter(|&v| swappable(&succ, v, false)).take(REPAIR_CANDIDATES).collect();
            }
            let swap = |succ: &mut Vec<Vec<usize>>, v: usize| {
                let w = succ[v][slot];
                succ[u][slot] = w;
                succ[v][slot] = u;
            };
            let best = partners.into_iter().min_by_key(|&v| {
                let mut trial = succ.clone();
                swap(&mut trial, v);
                succ_diameter(&trial)
            });
            if let Some(v) = best {
                swap(&mut succ, v);
            }
        }
    }
    succ
}

/// Generalized Kautz digraph, split into `k` switch layers. Falls back to
/// the cycle for `k = 1`.
pub fn build_generalized_kautz(n: usize, k: usize) -> Result<Topology> {
    let params = NetworkParams::new(n, k)?;
    if k == 1 {
        return build_cycle(n);
    }
    let succ = genkautz_edges(n, k);
    if succ.iter().enumerate().any(|(u, s)| s.contains(&u)) {
        return Err(Error::InvalidTopology(format!("self-loop repair failed for n={n}, k={k}")));
    }
    let layers = decompose_regular(n, k, &succ)?;
    Topology::new(params, layers, Family::GenKautz)
}

/// Offsets (always containing 1) for a degree-`k` circulant base that
/// minimize the symmetric schedule's hop total. Exhaustive for `n <= 64`,
/// seeded local search above.
pub fn choose_circulant_offsets(n: usize, k: usize) -> Vec<usize> {
    if k == 1 || n <= 2 {
        return vec![1];
    }
    if n <= 64 {
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut combo: Vec<usize> = (2..k + 1).collect();
        loop {
            let mut offsets = vec![1];
            offsets.extend_from_slice(&combo);
            if let Some(cost) = symmetric_power_sum(n, &offsets) {
                if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    best = Some((cost, offsets));
                }
            }
            if !next_combination(&mut combo, n - 1) {
                break;
            }
        }
        return best.expect("offsets {1, ...} always connect").1;
    }
    let mut offsets: Vec<usize> = vec![1];
    for i in 1..k {
        let mut c = (n as f64).powf(i as f64 / k as f64).ceil() as usize;
        while offsets.contains(&c) || c >= n {
            c = if c >= n { 2 } else { c + 1 };
        }
        offsets.push(c);
    }
    let mut cost = symmetric_power_sum(n, &offsets).unwrap_or(u64::MAX);
    loop {
        let mut improved = false;
        for i in 1..k {
            for delta in [-2i64, -1, 1, 2] {
                let c = offsets[i] as i64 + delta;
                if c < 2 || c >= n as i64 || offsets.contains(&(c as usize)) {
                    continue;
                }
                let mut trial = offsets.clone();
                trial[i] = c as usize;
                if let Some(tc) = symmetric_power_sum(n, &trial) {
                    if tc < cost {
                        cost = tc;
                        offsets = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    offsets
}

/// Advances a strictly increasing combination over `[2, max]` in lex order.
fn next_combination(combo: &mut [usize], max: usize) -> bool {
    let m = combo.len();
    for i in (0..m).rev() {
        if combo[i] < max - (m - 1 - i) {
            combo[i] += 1;
            for j in i + 1..m {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{diameter, expansion_profile, is_node_symmetric, is_strongly_connected};

    #[test]
    fn cycle_edges() {
        let c = build_cycle(8).unwrap();
        assert_eq!(c.layers()[0], vec![1, 2, 3, 4, 5, 6, 7, 0]);
        assert_eq!(build_cycle(2).unwrap().layers()[0], vec![1, 0]);
        let adj = c.adjacency_matrix();
        for u in 0..8 {
            for v in 0..8 {
                assert_eq!(adj[u][v], u32::from(v == (u + 1) % 8));
            }
        }
    }

    #[test]
    fn circulant_neighbors() {
        let c = build_circulant(8, &[1, 2]).unwrap();
        let adj = c.adjacency_matrix();
        for u in 0..8 {
            let cols: Vec<usize> = (0..8).filter(|&v| adj[u][v] == 1).collect();
            let mut expect = vec![(u + 1) % 8, (u + 2) % 8];
            expect.sort();
            assert_eq!(cols, expect);
        }
        let c = build_circulant(8, &[1, 3]).unwrap();
        assert_eq!(c.out_edges(0).map(|(_, v)| v).collect::<Vec<_>>(), vec![1, 3]);
        assert!(is_node_symmetric(&c));
        assert!(build_circulant(8, &[1, 1]).is_err());
        assert!(build_circulant(8, &[0, 1]).is_err());
    }

    #[test]
    fn genkautz_8_2() {
        let g = build_generalized_kautz(8, 2).unwrap();
        assert_eq!(diameter(&g), Some(3));
        let adj = g.adjacency_matrix();
        for u in 0..8 {
            assert_eq!(adj[u].iter().sum::<u32>(), 2);
            assert_eq!((0..8).map(|v| adj[v][u]).sum::<u32>(), 2);
        }
        let p = expansion_profile(&g);
        for u in 0..8 {
            assert_eq!(p.reach(u, 1), 2);
            assert!(p.reach(u, 2) <= 6);
            assert_eq!(p.reach(u, 3), 7);
        }
        assert!(!is_node_symmetric(&g));
        assert_eq!(build_generalized_kautz(8, 1).unwrap(), build_cycle(8).unwrap());
    }

    #[test]
    fn genkautz_12_2_diameter() {
        let g = build_generalized_kautz(12, 2).unwrap();
        assert!(diameter(&g).unwrap() <= 4);
    }

    #[test]
    fn genkautz_diameter_bound_sample() {
        for k in [2usize, 4] {
            for n in (k + 1..=160).chain([255, 256, 257, 500, 1000, 1024]) {
                let g = build_generalized_kautz(n, k).unwrap();
                assert!(is_strongly_connected(&g), "n={n} k={k}");
                let mut log = 0;
                while k.pow(log) < n {
                    log += 1;
                }
                assert!(diameter(&g).unwrap() <= log as usize + 1, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn combinations_in_lex_order() {
        let mut c = vec![2, 3];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 5) {
            all.push(c.clone());
        }
        assert_eq!(all, vec![vec![2, 3], vec![2, 4], vec![2, 5], vec![3, 4], vec![3, 5], vec![4, 5]]);
    }

    // Oracle: direct BFS hop totals over every {1, s}.
    fn pair_hop_total(n: usize, s: usize) -> u64 {
        let g = build_circulant(n, &[1, s]).unwrap();
        let m = crate::schedule::schedule_symmetric(&g, &crate::traffic::TrafficMatrix::uniform(n, 1)).unwrap();
        m.rounds.iter().map(|r| r.max_hops() as u64).sum()
    }

    #[test]
    fn chosen_offsets_win_brute_force() {
        for n in [8usize, 16] {
            let chosen = choose_circulant_offsets(n, 2);
            let chosen_cost = pair_hop_total(n, chosen[1]);
            let best = (2..n).map(|s| pair_hop_total(n, s)).min().unwrap();
            assert_eq!(chosen_cost, best, "n={n}");
        }
        assert_eq!(choose_circulant_offsets(8, 1), vec![1]);
        assert!(pair_hop_total(16, choose_circulant_offsets(16, 2)[1]) < pair_hop_total(16, 2));
    }
}
