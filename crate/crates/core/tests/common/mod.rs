//! Independent oracles shared by the integration tests. Nothing here calls
//! into the solver paths being checked.

#![allow(dead_code)]

use jra::{Edge, EdgeSet, Instance, NodeId, Tour};
use rand::seq::SliceRandom;
use rand::Rng;

/// All permutations of `v`, in lexicographic order of positions.
pub fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Visits every alternating Hamiltonian cycle over the given ids, each
/// undirected cycle exactly twice (once per direction). The first item is
/// pinned to remove rotations.
pub fn for_each_cycle(items: &[NodeId], placeholders: &[NodeId], mut f: impl FnMut(&[Edge])) {
    let m = items.len();
    let rest: Vec<usize> = (1..m).collect();
    let all: Vec<usize> = (0..m).collect();
    let item_orders = permutations(&rest);
    let ph_orders = permutations(&all);
    let mut edges = Vec::with_capacity(2 * m);
    for io in &item_orders {
        let seq_items: Vec<NodeId> = std::iter::once(items[0]).chain(io.iter().map(|&k| items[k])).collect();
        for po in &ph_orders {
            edges.clear();
            for k in 0..m {
                let next = placeholders[po[k]];
                let prev = placeholders[po[(k + m - 1) % m]];
                edges.push(Edge::new(seq_items[k], next));
                edges.push(Edge::new(seq_items[k], prev));
            }
            f(&edges);
        }
    }
}

/// Minimum tour cost over all alternating Hamiltonian cycles honouring the
/// instance's fixed pair.
pub fn brute_force_optimum(inst: &Instance) -> f64 {
    let n = inst.n();
    let items: Vec<NodeId> = (0..n).map(|k| inst.item_id(k)).collect();
    let phs: Vec<NodeId> = (0..n).map(|k| inst.placeholder_id(k)).collect();
    let fixed = inst.fixed_edge().map(|(i, p)| Edge::new(i, p));
    let mut best = f64::INFINITY;
    for_each_cycle(&items, &phs, |edges| {
        if let Some(f) = fixed {
            if !edges.contains(&f) {
                return;
            }
        }
        let c: f64 = edges
            .iter()
            .map(|e| inst.coord(e.item).distance(&inst.coord(e.placeholder)))
            .sum();
        if c < best {
            best = c;
        }
    });
    best
}

/// Constrained brute force with an arbitrary edge cost. Returns the best
/// cost and one minimizing edge set.
pub fn brute_force_constrained(
    items: &[NodeId],
    placeholders: &[NodeId],
    cost: impl Fn(&Edge) -> f64,
    forced: &EdgeSet,
    forbidden: &EdgeSet,
    retain: Option<(&EdgeSet, usize, bool)>,
) -> Option<(f64, EdgeSet)> {
    let mut best: Option<(f64, EdgeSet)> = None;
    for_each_cycle(items, placeholders, |edges| {
        if forced.iter().any(|e| !edges.contains(e)) || edges.iter().any(|e| forbidden.contains(e)) {
            return;
        }
        if let Some((set, min, exact)) = retain {
            let kept = edges.iter().filter(|e| set.contains(e)).count();
            if (exact && kept != min) || (!exact && kept < min) {
                return;
            }
        }
        let c: f64 = edges.iter().map(&cost).sum();
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, edges.iter().copied().collect()));
        }
    });
    best
}

/// n!·(n−1)!/2 distinct cycles for n pairs.
pub fn cycle_count(n: usize) -> usize {
    let f = |k: usize| (1..=k).product::<usize>();
    f(n) * f(n - 1) / 2
}

/// Uniformly shuffled item and placeholder orders.
pub fn random_tour(n: usize, rng: &mut impl Rng) -> Tour {
    let mut items: Vec<NodeId> = (1..=n as u32).map(NodeId).collect();
    let mut phs: Vec<NodeId> = (n as u32 + 1..=2 * n as u32).map(NodeId).collect();
    items.shuffle(rng);
    phs.shuffle(rng);
    Tour::new(items, phs)
}

/// A random tour that contains the instance's fixed pair when enabled.
pub fn random_valid_tour(inst: &Instance, rng: &mut impl Rng) -> Tour {
    let mut t = random_tour(inst.n(), rng);
    if let Some((i, p)) = inst.fixed_edge() {
        let k = t.items.iter().position(|&v| v == i).unwrap();
        let j = t.placeholders.iter().position(|&v| v == p).unwrap();
        t.placeholders.swap(k, j);
    }
    t
}
