use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::realize::predicted_slots;
use super::Strategy;
use crate::error::{Error, Result};
use crate::traffic::TrafficMatrix;

/// Template node `x` is played by physical node `perm[x]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabeling {
    pub perm: Vec<usize>,
}

impl Relabeling {
    pub fn identity(n: usize) -> Self {
        Relabeling { perm: (0..n).collect() }
    }

    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParams("relabeling is not a bijection".into()));
            }
        }
        Ok(Relabeling { perm })
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RelabelOptions {
    pub seed: u64,
    /// Cap on hill-climbing cost evaluations.
    pub budget: usize,
}

impl Default for RelabelOptions {
    fn default() -> Self {
        RelabelOptions { seed: 0, budget: 20_000 }
    }
}

/// Template hop count per ordered pair; `usize::MAX` where the template has
/// no entry.
fn hop_table(template: &Strategy) -> Vec<Vec<usize>> {
    let mut h = vec![vec![usize::MAX; template.n]; template.n];
    for e in template.entries() {
        h[e.src][e.dst] = h[e.src][e.dst].min(e.hops());
    }
    h
}

/// Heaviest physical pairs are placed first on the cheapest free template
/// pairs.
fn greedy_seed(template: &Strategy, a: &TrafficMatrix) -> Vec<usize> {
    let n = a.n();
    let hops = hop_table(template);
    let mut pairs: Vec<(usize, usize, u64)> = a.flows().collect();
    pairs.sort_by_key(|&(s, d, c)| (std::cmp::Reverse(c), s, d));
    // role[u] = template node played by physical node u.
    let mut role: Vec<Option<usize>> = vec![None; n];
    let mut free = vec![true; n];
    for (u, v, _) in pairs {
        match (role[u], role[v]) {
            (Some(_), Some(_)) => {}
            (Some(x), None) => {
                if let Some(y) = (0..n).filter(|&y| free[y] && y != x).min_by_key(|&y| hops[x][y]) {
                    role[v] = Some(y);
                    free[y] = false;
                }
            }
            (None, Some(y)) => {
                if let Some(x) = (0..n).filter(|&x| free[x] && x != y).min_by_key(|&x| hops[x][y]) {
                    role[u] = Some(x);
                    free[x] = false;
                }
            }
            (None, None) => {
                let best = (0..n)
                    .filter(|&x| free[x])
                    .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
                    .filter(|&(_, y)| free[y])
                    .min_by_key(|&(x, y)| hops[x][y]);
                if let Some((x, y)) = best {
                    role[u] = Some(x);
                    role[v] = Some(y);
                    free[x] = false;
                    free[y] = false;
                }
            }
        }
    }
    let mut spare = (0..n).filter(|&x| free[x]);
    let role: Vec<usize> = role.into_iter().map(|r| r.unwrap_or_else(|| spare.next().expect("counts match"))).collect();
    let mut perm = vec![0; n];
    for (u, x) in role.into_iter().enumerate() {
        perm[x] = u;
    }
    perm
}

/// Node permutation lowering the predicted transmission time of `template`
/// on demand `a`: a greedy seed, then first-improvement hill climbing over
/// transpositions in a seeded order. Identity is kept unless beaten.
pub fn relabel_for_sizes(a: &TrafficMatrix, template: &Strategy, opts: RelabelOptions) -> Relabeling {
    let n = a.n();
    let identity: Vec<usize> = (0..n).collect();
    if a.is_uniform() {
        return Relabeling { perm: identity };
    }
    let mut best_cost = predicted_slots(template, a, &identity);
    let mut perm = identity;
    let seed = greedy_seed(template, a);
    let seed_cost = predicted_slots(template, a, &seed);
    if seed_cost < best_cost {
        best_cost = seed_cost;
        perm = seed;
    }

    let mut swaps: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    swaps.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
    let mut evals = 0;
    'climb: loop {
        let mut improved = false;
        for &(i, j) in &swaps {
            if evals >= opts.budget {
                break 'climb;
            }
            perm.swap(i, j);
            evals += 1;
            let c = predicted_slots(template, a, &perm);
            if c < best_cost {
                best_cost = c;
                improved = true;
            } else {
                perm.swap(i, j);
            }
        }
        if !improved {
            break;
        }
    }
    Relabeling { perm }
}
