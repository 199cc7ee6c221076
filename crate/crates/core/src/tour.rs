//! Tours as ordered item/placeholder sequences, their edge sets, and the
//! reconstruction of a tour from an edge set.
//!
//! A tour `(q_I, q_P)` induces the edges `(q_I[k], q_P[k])` and
//! `(q_I[k], q_P[k-1])` with cyclic indexing, so each item sits between the
//! placeholder before it and the placeholder after it.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId};

/// Absolute tolerance for cost comparisons.
pub const COST_EPS: f64 = 1e-9;

/// Undirected item–placeholder edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub item: NodeId,
    pub placeholder: NodeId,
}

impl Edge {
    pub fn new(item: NodeId, placeholder: NodeId) -> Self {
        Self { item, placeholder }
    }

    /// Builds an edge from two endpoints in either order, checking the
    /// bipartition for a problem with `n` pairs.
    pub fn between(a: NodeId, b: NodeId, n: usize) -> Result<Self> {
        let is_item = |v: NodeId| v.0 >= 1 && v.index() <= n;
        let is_ph = |v: NodeId| v.index() > n && v.index() <= 2 * n;
        if is_item(a) && is_ph(b) {
            Ok(Self::new(a, b))
        } else if is_ph(a) && is_item(b) {
            Ok(Self::new(b, a))
        } else {
            Err(Error::NonConnectable(a, b))
        }
    }

    pub fn cost(&self, inst: &Instance) -> f64 {
        inst.coord(self.item).distance(&inst.coord(self.placeholder))
    }

    pub fn touches(&self, v: NodeId) -> bool {
        self.item == v || self.placeholder == v
    }
}

/// Set of item–placeholder edges with deterministic iteration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(BTreeSet<Edge>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: &Edge) -> bool {
        self.0.remove(e)
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.0.iter()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.0.difference(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn cost(&self, inst: &Instance) -> f64 {
        self.0.iter().map(|e| e.cost(inst)).sum()
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<T: IntoIterator<Item = Edge>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Extend<Edge> for EdgeSet {
    fn extend<T: IntoIterator<Item = Edge>>(&mut self, iter: T) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a Edge;
    type IntoIter = std::collections::btree_set::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Symmetric-difference size `|a \ b| + |b \ a|` (the N_d statistic).
pub fn edge_difference(a: &EdgeSet, b: &EdgeSet) -> usize {
    a.0.symmetric_difference(&b.0).count()
}

/// A closed alternating cycle over a subset of the nodes. Uses the same
/// edge convention as [`Tour`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub items: Vec<NodeId>,
    pub placeholders: Vec<NodeId>,
}

impl Cycle {
    pub fn pairs(&self) -> usize {
        self.items.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        cyclic_edges(&self.items, &self.placeholders)
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges().collect()
    }

    pub fn min_item(&self) -> NodeId {
        self.items.iter().copied().min().expect("cycle has at least one item")
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.items.iter().chain(&self.placeholders).copied()
    }
}

fn cyclic_edges<'a>(items: &'a [NodeId], placeholders: &'a [NodeId]) -> impl Iterator<Item = Edge> + 'a {
    let m = items.len();
    (0..m).flat_map(move |k| {
        let prev = placeholders[(k + m - 1) % m];
        [Edge::new(items[k], placeholders[k]), Edge::new(items[k], prev)]
    })
}

/// A Hamiltonian alternating cycle over all `2n` nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    #[serde(rename = "q_I")]
    pub items: Vec<NodeId>,
    #[serde(rename = "q_P")]
    pub placeholders: Vec<NodeId>,
}

#[derive(Serialize, Deserialize)]
struct TourFile {
    #[serde(rename = "q_I")]
    items: Vec<NodeId>,
    #[serde(rename = "q_P")]
    placeholders: Vec<NodeId>,
    cost: f64,
}

impl Tour {
    pub fn new(items: Vec<NodeId>, placeholders: Vec<NodeId>) -> Self {
        Self { items, placeholders }
    }

    /// The tour `1, n+1, 2, n+2, ...`.
    pub fn identity(n: usize) -> Self {
        Self {
            items: (1..=n as u32).map(NodeId).collect(),
            placeholders: (n as u32 + 1..=2 * n as u32).map(NodeId).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        cyclic_edges(&self.items, &self.placeholders)
    }

    /// The `2n` induced edges.
    pub fn edge_set(&self) -> EdgeSet {
        self.edges().collect()
    }

    /// Same cycle traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut items = self.items.clone();
        items.reverse();
        // item k is now followed by what used to precede it
        let m = self.placeholders.len();
        let placeholders = (0..m)
            .map(|k| self.placeholders[(2 * m - 2 - k) % m])
            .collect();
        Self { items, placeholders }
    }

    /// Rotates the sequence so that it starts at position `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut items = self.items.clone();
        let mut placeholders = self.placeholders.clone();
        items.rotate_left(k);
        placeholders.rotate_left(k);
        Self { items, placeholders }
    }

    /// Checks the permutation, alternation and fixed-pair invariants.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let n = inst.n();
        if self.items.len() != n || self.placeholders.len() != n {
            return Err(Error::InvalidTour(format!(
                "expected {n} items and {n} placeholders, got {} and {}",
                self.items.len(),
                self.placeholders.len()
            )));
        }
        let mut seen = vec![false; 2 * n + 1];
        for &v in &self.items {
            if !inst.is_item(v) {
                return Err(Error::InvalidTour(format!("q_I contains non-item {v}")));
            }
            if std::mem::replace(&mut seen[v.index()], true) {
                return Err(Error::InvalidTour(format!("item {v} visited twice")));
            }
        }
        for &v in &self.placeholders {
            if !inst.is_placeholder(v) {
                return Err(Error::InvalidTour(format!("q_P contains non-placeholder {v}")));
            }
            if std::mem::replace(&mut seen[v.index()], true) {
                return Err(Error::InvalidTour(format!("placeholder {v} visited twice")));
            }
        }
        if let Some((i, p)) = inst.fixed_edge() {
            if !self.edges().any(|e| e == Edge::new(i, p)) {
                return Err(Error::InvalidTour(format!("fixed pair ({i}, {p}) is not an edge")));
            }
        }
        Ok(())
    }

    /// Sum of the `2n` edge costs. Fails on an invalid tour.
    pub fn cost(&self, inst: &Instance) -> Result<f64> {
        self.validate(inst)?;
        Ok(self.edges().map(|e| e.cost(inst)).sum())
    }

    /// Start at item 1, with the smaller neighbouring placeholder first.
    pub fn canonical(&self) -> Self {
        let n = self.n();
        cycle_path(&self.edge_set(), n).expect("a tour's edge set is a single cycle")
    }

    pub fn to_json(&self, inst: &Instance) -> Result<String> {
        let file = TourFile {
            items: self.items.clone(),
            placeholders: self.placeholders.clone(),
            cost: self.cost(inst)?,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses a tour file; the stored cost is informational and ignored.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TourFile = serde_json::from_str(text)?;
        Ok(Self::new(file.items, file.placeholders))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json(inst)? + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Total cost of a tour; convenience over [`Tour::cost`].
pub fn tour_cost(inst: &Instance, t: &Tour) -> Result<f64> {
    t.cost(inst)
}

/// Splits a 2-regular bipartite edge set on nodes `1..=2n` into its cycles,
/// each canonically oriented and sorted by smallest item id.
pub fn decompose(edges: &EdgeSet, n: usize) -> Result<Vec<Cycle>> {
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::with_capacity(2); 2 * n + 1];
    for e in edges {
        Edge::between(e.item, e.placeholder, n)?;
        if e.item.index() > n {
            return Err(Error::NonConnectable(e.item, e.placeholder));
        }
        adj[e.item.index()].push(e.placeholder);
        adj[e.placeholder.index()].push(e.item);
    }
    for (v, nb) in adj.iter().enumerate().skip(1) {
        if nb.len() != 2 {
            return Err(Error::Degree {
                node: NodeId(v as u32),
                degree: nb.len(),
            });
        }
    }
    for nb in adj.iter_mut() {
        nb.sort();
    }

    let mut visited = vec![false; 2 * n + 1];
    let mut cycles = Vec::new();
    for start in 1..=n {
        if visited[start] {
            continue;
        }
        let start = NodeId(start as u32);
        let mut items = vec![start];
        let mut placeholders = Vec::new();
        visited[start.index()] = true;
        let mut prev_item = start;
        let mut ph = adj[start.index()][0];
        loop {
            visited[ph.index()] = true;
            placeholders.push(ph);
            let [a, b] = [adj[ph.index()][0], adj[ph.index()][1]];
            let next = if a == prev_item { b } else { a };
            if next == start {
                break;
            }
            visited[next.index()] = true;
            items.push(next);
            let [c, d] = [adj[next.index()][0], adj[next.index()][1]];
            let next_ph = if c == ph { d } else { c };
            prev_item = next;
            ph = next_ph;
        }
        cycles.push(Cycle { items, placeholders });
    }
    Ok(cycles)
}

/// Rebuilds the ordered tour from a Hamiltonian edge set, in canonical form.
pub fn cycle_path(edges: &EdgeSet, n: usize) -> Result<Tour> {
    let cycles = decompose(edges, n)?;
    if cycles.len() != 1 {
        return Err(Error::Subtour(cycles.iter().map(Cycle::pairs).collect()));
    }
    let c = cycles.into_iter().next().unwrap();
    Ok(Tour::new(c.items, c.placeholders))
}
