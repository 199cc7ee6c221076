//! Minimum-cost 2-regular bipartite subgraph (simple 2-matching) by
//! successive shortest paths with Johnson potentials.
//!
//! Network: source → item (capacity = remaining degree), item → placeholder
//! (capacity 1, edge cost), placeholder → sink (capacity = remaining degree).
//! Forced edges are pre-selected and reduce the remaining degrees.

use super::EdgeState;

pub(crate) struct TwoFactor {
    /// Selected edges, forced ones included, indexed `i * n + p`.
    pub used: Vec<bool>,
    /// Total cost of the selected edges.
    pub value: f64,
    /// Lower bound on the value increase from flipping each free edge:
    /// forcing it when unused, forbidding it when used. Zero elsewhere.
    pub flip_bound: Vec<f64>,
}

pub(crate) fn min_two_factor(n: usize, cost: &[f64], state: &[EdgeState]) -> Option<TwoFactor> {
    let mut need = vec![2i32; 2 * n];
    let mut used = vec![false; n * n];
    for i in 0..n {
        for p in 0..n {
            if state[i * n + p] == EdgeState::Forced {
                used[i * n + p] = true;
                need[i] -= 1;
                need[n + p] -= 1;
            }
        }
    }
    if need.iter().any(|&d| d < 0) {
        return None;
    }

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut shift = 0.0f64;
    for i in 0..n {
        if need[i] == 0 {
            continue;
        }
        for p in 0..n {
            let e = i * n + p;
            if state[e] == EdgeState::Free && need[n + p] > 0 {
                adj[i].push(p);
                shift = shift.min(cost[e]);
            }
        }
    }
    let shifted = |e: usize| cost[e] - shift;

    let s = 2 * n;
    let t = 2 * n + 1;
    let nodes = 2 * n + 2;
    let mut supply: Vec<i32> = need[..n].to_vec();
    let mut demand: Vec<i32> = need[n..].to_vec();
    // items currently sending flow into each placeholder through free edges
    let mut inflow: Vec<[usize; 2]> = vec![[usize::MAX; 2]; n];
    let mut pot = vec![0.0f64; nodes];
    let mut dist = vec![f64::INFINITY; nodes];
    let mut prev = vec![usize::MAX; nodes];
    let mut done = vec![false; nodes];

    let units: i32 = supply.iter().sum();
    for _ in 0..units {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        prev.iter_mut().for_each(|v| *v = usize::MAX);
        done.iter_mut().for_each(|d| *d = false);
        dist[s] = 0.0;
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX || u == t {
                break;
            }
            done[u] = true;
            let du = dist[u];
            if u == s {
                for i in 0..n {
                    if supply[i] > 0 && !done[i] {
                        let w = du + pot[s] - pot[i];
                        if w < dist[i] {
                            dist[i] = w;
                            prev[i] = s;
                        }
                    }
                }
            } else if u < n {
                let i = u;
                for &p in &adj[i] {
                    let e = i * n + p;
                    let v = n + p;
                    if used[e] || done[v] {
                        continue;
                    }
                    let w = du + shifted(e) + pot[i] - pot[v];
                    if w < dist[v] {
                        dist[v] = w;
                        prev[v] = i;
                    }
                }
            } else {
                let p = u - n;
                for &i in &inflow[p] {
                    if i == usize::MAX || done[i] {
                        continue;
                    }
                    let w = du - shifted(i * n + p) + pot[u] - pot[i];
                    if w < dist[i] {
                        dist[i] = w;
                        prev[i] = u;
                    }
                }
                if demand[p] > 0 {
                    let w = du + pot[u] - pot[t];
                    if w < dist[t] {
                        dist[t] = w;
                        prev[t] = u;
                    }
                }
            }
        }
        if !dist[t].is_finite() {
            return None;
        }

        let mut v = t;
        while v != s {
            let u = prev[v];
            if v == t {
                demand[u - n] -= 1;
            } else if u == s {
                supply[v] -= 1;
            } else if u < n {
                // item u -> placeholder v
                let p = v - n;
                used[u * n + p] = true;
                let slot = inflow[p].iter().position(|&x| x == usize::MAX).expect("placeholder capacity");
                inflow[p][slot] = u;
            } else {
                // placeholder u -> item v cancels flow on (v, u)
                let p = u - n;
                used[v * n + p] = false;
                let slot = inflow[p].iter().position(|&x| x == v).expect("flow to cancel");
                inflow[p][slot] = usize::MAX;
            }
            v = u;
        }
        let cap = dist[t];
        for v in 0..nodes {
            pot[v] += dist[v].min(cap);
        }
    }

    let mut value = 0.0;
    let mut flip_bound = vec![0.0; n * n];
    for i in 0..n {
        for p in 0..n {
            let e = i * n + p;
            if used[e] {
                value += cost[e];
            }
        }
        if need[i] == 0 {
            continue;
        }
        for &p in &adj[i] {
            let e = i * n + p;
            let rc = shifted(e) + pot[i] - pot[n + p];
            flip_bound[e] = if used[e] { (-rc).max(0.0) } else { rc.max(0.0) };
        }
    }
    Some(TwoFactor {
        used,
        value,
        flip_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates every 0/1 selection with all degrees 2 (n ≤ 4).
    fn brute(n: usize, cost: &[f64], state: &[EdgeState]) -> Option<f64> {
        let m = n * n;
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != 2 * n {
                continue;
            }
            let mut deg = vec![0; 2 * n];
            let mut ok = true;
            let mut total = 0.0;
            for e in 0..m {
                let on = mask >> e & 1 == 1;
                match (state[e], on) {
                    (EdgeState::Forced, false) | (EdgeState::Forbidden, true) => ok = false,
                    _ => {}
                }
                if on {
                    deg[e / n] += 1;
                    deg[n + e % n] += 1;
                    total += cost[e];
                }
            }
            if ok && deg.iter().all(|&d| d == 2) {
                best = Some(best.map_or(total, |b: f64| b.min(total)));
            }
        }
        best
    }

    #[test]
    fn matches_enumeration_on_small_cases() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            for _ in 0..40 {
                let cost: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..3.0)).collect();
                let state: Vec<EdgeState> = (0..n * n)
                    .map(|_| match rng.gen_range(0..10) {
                        0 => EdgeState::Forced,
                        1 | 2 => EdgeState::Forbidden,
                        _ => EdgeState::Free,
                    })
                    .collect();
                let got = min_two_factor(n, &cost, &state).map(|s| s.value);
                let want = brute(n, &cost, &state);
                match (got, want) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "{a} vs {b}"),
                    (None, None) => {}
                    other => panic!("mismatch {other:?}"),
                }
            }
        }
    }

    #[test]
    fn flip_bounds_are_valid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in 3..=4 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..2.0)).collect();
                let state = vec![EdgeState::Free; n * n];
                let sol = min_two_factor(n, &cost, &state).unwrap();
                for e in 0..n * n {
                    let mut st = state.clone();
                    st[e] = if sol.used[e] { EdgeState::Forbidden } else { EdgeState::Forced };
                    if let Some(v) = brute(n, &cost, &st) {
                        assert!(v + 1e-9 >= sol.value + sol.flip_bound[e]);
                    }
                }
            }
        }
    }
}
