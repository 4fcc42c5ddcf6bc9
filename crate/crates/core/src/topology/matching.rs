use crate::error::{Error, Result};

/// Maximum-cardinality bipartite matching by augmenting paths.
///
/// `adj[u]` lists the right vertices adjacent to left vertex `u`; candidates
/// are tried in list order, so the result is deterministic. Returns the
/// partner of each left vertex.
pub fn max_bipartite_matching(n_right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; n_right];
    let mut visited = vec![usize::MAX; n_right];
    for u in 0..adj.len() {
        augment(u, u, adj, &mut match_right, &mut visited);
    }
    let mut match_left = vec![None; adj.len()];
    for (v, u) in match_right.iter().enumerate() {
        if let Some(u) = *u {
            match_left[u] = Some(v);
        }
    }
    match_left
}

// Iterative DFS so long augmenting chains at large n cannot overflow the stack.
fn augment(
    root: usize,
    stamp: usize,
    adj: &[Vec<usize>],
    match_right: &mut [Option<usize>],
    visited: &mut [usize],
) -> bool {
    // Stack frames: (left vertex, next adjacency index, right vertex used to reach it).
    let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(root, 0, None)];
    while let Some(&mut (u, ref mut next, _)) = stack.last_mut() {
        if *next >= adj[u].len() {
            stack.pop();
            continue;
        }
        let v = adj[u][*next];
        *next += 1;
        if visited[v] == stamp {
            continue;
        }
        visited[v] = stamp;
        match match_right[v] {
            None => {
                // Flip the alternating path recorded on the stack.
                let mut right = v;
                while let Some((left, _, via)) = stack.pop() {
                    match_right[right] = Some(left);
                    match via {
                        Some(r) => right = r,
                        None => break,
                    }
                }
                return true;
            }
            Some(w) => stack.push((w, 0, Some(v))),
        }
    }
    false
}

/// Splits a `k`-regular bipartite multigraph on `n + n` vertices into `k`
/// perfect matchings. `adj[u]` lists right endpoints with multiplicity.
pub fn decompose_regular(n: usize, k: usize, adj: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut remaining: Vec<Vec<usize>> = adj.to_vec();
    let mut in_deg = vec![0usize; n];
    for row in &remaining {
        if row.len() != k {
            return Err(Error::InvalidTopology(format!("left degree {} is not {k}", row.len())));
        }
        for &v in row {
            in_deg[v] += 1;
        }
    }
    if in_deg.iter().any(|&d| d != k) {
        return Err(Error::InvalidTopology(format!("right degrees are not all {k}")));
    }
    let mut layers = Vec::with_capacity(k);
    for _ in 0..k {
        let mut candidates: Vec<Vec<usize>> = remaining.clone();
        for row in &mut candidates {
            row.sort_unstable();
            row.dedup();
        }
        let matching = max_bipartite_matching(n, &candidates);
        let mut layer = Vec::with_capacity(n);
        for (u, m) in matching.into_iter().enumerate() {
            let v = m.ok_or_else(|| Error::InvalidTopology("regular bipartite graph lacks a perfect matching".into()))?;
            let pos = remaining[u].iter().position(|&x| x == v).expect("matched edge exists");
            remaining[u].swap_remove(pos);
            layer.push(v);
        }
        layers.push(layer);
    }
    Ok(layers)
}
