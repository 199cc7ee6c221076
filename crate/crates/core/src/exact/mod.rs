//! Exact solver for the alternating Hamiltonian cycle model.
//!
//! Binary edge variables on the complete bipartite graph, degree two at every
//! node, optional forced/forbidden edges, an optional cardinality constraint
//! on a retained edge set, and subtour elimination constraints added lazily.
//!
//! The bound at every search node is the cheapest 2-regular bipartite
//! subgraph under Lagrangian prices: each subtour cut in the pool and the
//! retain constraint carry a multiplier, tuned by subgradient steps. When the
//! relaxed solution splits into several cycles the smallest one yields a new
//! cut `Σ_{i,j∈S} x_ij ≤ |S| − 1`. Branching fixes one edge to 1 or 0.

mod lp;
mod matching;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use log::{debug, info};
use serde::{Deserialize, Serialize};

pub use lp::export_lp;

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, Instance, NodeId};
use crate::tour::{Edge, EdgeSet, Tour};
use matching::min_two_factor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EdgeState {
    Free,
    Forced,
    Forbidden,
}

/// Search configuration and side constraints.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    pub forced_edges: EdgeSet,
    pub forbidden_edges: EdgeSet,
    /// Incumbent edges of which at least `retain_min` must be kept.
    pub retain_set: Option<EdgeSet>,
    pub retain_min: Option<usize>,
    /// Keep exactly `retain_min` edges of the retain set instead of at least.
    pub retain_exact: bool,
    pub warm_start: Option<Tour>,
    /// Relative optimality gap at which search stops; 0 proves optimality.
    pub gap_tolerance: f64,
}

impl SolveOptions {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    FeasibleTimeLimit,
    Infeasible,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub branch_nodes: usize,
    pub subtour_cuts_added: usize,
    pub wall_time: f64,
    /// Best proven lower bound when the search stopped.
    pub lower_bound: f64,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub edges: EdgeSet,
    pub cost: f64,
    pub status: SolveStatus,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_feasible(&self) -> bool {
        self.status != SolveStatus::Infeasible
    }
}

/// Costs for a problem whose items and placeholders carry arbitrary ids.
#[derive(Debug, Clone)]
pub struct Model {
    pub costs: CostMatrix,
    pub item_ids: Vec<NodeId>,
    pub placeholder_ids: Vec<NodeId>,
}

impl Model {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            costs: inst.cost_matrix(),
            item_ids: (0..inst.n()).map(|k| inst.item_id(k)).collect(),
            placeholder_ids: (0..inst.n()).map(|k| inst.placeholder_id(k)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.costs.n()
    }
}

/// Solves the full instance; the fixed pair is forced when enabled.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveResult> {
    let mut opts = opts.clone();
    if let Some((i, p)) = inst.fixed_edge() {
        opts.forced_edges.insert(Edge::new(i, p));
    }
    let warm = match &opts.warm_start {
        Some(t) => {
            t.validate(inst)?;
            Some(t.edge_set())
        }
        None => None,
    };
    solve_model(&Model::from_instance(inst), &opts, warm.as_ref())
}

/// Re-optimizes around `incumbent`, keeping at least `⌈2n(1−α)⌉` of its edges.
pub fn solve_large_alpha(
    inst: &Instance,
    incumbent: &Tour,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    incumbent.validate(inst)?;
    let opts = SolveOptions {
        retain_set: Some(incumbent.edge_set()),
        retain_min: Some(retain_min(inst.n(), alpha)),
        retain_exact: false,
        warm_start: Some(incumbent.clone()),
        ..opts.clone()
    };
    solve(inst, &opts)
}

/// `⌈2n(1−α)⌉`, robust to the rounding of `1 − α`.
pub fn retain_min(n: usize, alpha: f64) -> usize {
    let x = 2.0 * n as f64 * (1.0 - alpha);
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Solves an explicit model. `warm` is an edge set in the model's ids.
pub fn solve_model(model: &Model, opts: &SolveOptions, warm: Option<&EdgeSet>) -> Result<SolveResult> {
    let start = Instant::now();
    let n = model.n();
    if n < 2 {
        return Err(Error::InvalidInstance(format!("model needs at least 2 pairs, got {n}")));
    }
    let index = IdIndex::new(model);
    let mut root = vec![EdgeState::Free; n * n];
    for e in &opts.forbidden_edges {
        root[index.edge(e)?] = EdgeState::Forbidden;
    }
    let mut deg = vec![0usize; 2 * n];
    for e in &opts.forced_edges {
        let k = index.edge(e)?;
        if root[k] == EdgeState::Forbidden {
            return Err(Error::Infeasible(format!(
                "edge ({}, {}) is both forced and forbidden",
                e.item, e.placeholder
            )));
        }
        root[k] = EdgeState::Forced;
        deg[k / n] += 1;
        deg[n + k % n] += 1;
    }
    if let Some(v) = deg.iter().position(|&d| d > 2) {
        return Err(Error::Infeasible(format!(
            "forced edges give node {} degree {}",
            index.id(v),
            deg[v]
        )));
    }

    let retain = match (&opts.retain_set, opts.retain_min) {
        (Some(set), Some(min)) => {
            if min > set.len() {
                return Err(Error::Infeasible(format!(
                    "retain_min {min} exceeds the retain set size {}",
                    set.len()
                )));
            }
            let mut mask = vec![false; n * n];
            for e in set {
                mask[index.edge(e)?] = true;
            }
            Some(Retain {
                mask,
                target: min,
                exact: opts.retain_exact,
            })
        }
        (None, None) => None,
        _ => return Err(Error::Domain("retain_set and retain_min must be given together".into())),
    };

    let mut search = Search {
        n,
        costs: &model.costs,
        root_state: root.clone(),
        retain,
        cuts: Vec::new(),
        cut_keys: HashSet::new(),
        ub: f64::INFINITY,
        incumbent: None,
        gap: opts.gap_tolerance.max(0.0),
        start,
        deadline: opts.time_limit.map(|d| start + d),
        timed_out: false,
        open_bound: f64::INFINITY,
        stats: SolveStats::default(),
    };
    if let Some(w) = warm {
        let mut used = vec![false; n * n];
        let mut ok = w.len() == 2 * n;
        for e in w {
            match index.edge(e) {
                Ok(k) => used[k] = true,
                Err(_) => ok = false,
            }
        }
        if ok && search.is_feasible(&used, &root) {
            let c = search.true_cost(&used);
            search.offer(used, c);
        } else {
            debug!("warm start violates the model constraints; ignored");
        }
    }

    let outcome = search.run(root);
    let mut stats = search.stats.clone();
    stats.wall_time = start.elapsed().as_secs_f64();
    stats.timed_out = search.timed_out;
    stats.lower_bound = outcome.min(search.ub);

    let (edges, cost, status) = match &search.incumbent {
        Some(used) => {
            let edges = (0..n * n)
                .filter(|&k| used[k])
                .map(|k| Edge::new(model.item_ids[k / n], model.placeholder_ids[k % n]))
                .collect();
            let status = if search.timed_out {
                SolveStatus::FeasibleTimeLimit
            } else {
                SolveStatus::Optimal
            };
            (edges, search.ub, status)
        }
        None => (EdgeSet::new(), f64::INFINITY, SolveStatus::Infeasible),
    };
    Ok(SolveResult {
        edges,
        cost,
        status,
        stats,
    })
}

struct IdIndex {
    n: usize,
    items: std::collections::HashMap<NodeId, usize>,
    placeholders: std::collections::HashMap<NodeId, usize>,
    ids: Vec<NodeId>,
}

impl IdIndex {
    fn new(model: &Model) -> Self {
        Self {
            n: model.n(),
            items: model.item_ids.iter().enumerate().map(|(k, &v)| (v, k)).collect(),
            placeholders: model.placeholder_ids.iter().enumerate().map(|(k, &v)| (v, k)).collect(),
            ids: model.item_ids.iter().chain(&model.placeholder_ids).copied().collect(),
        }
    }

    fn edge(&self, e: &Edge) -> Result<usize> {
        match (self.items.get(&e.item), self.placeholders.get(&e.placeholder)) {
            (Some(&i), Some(&p)) => Ok(i * self.n + p),
            _ => Err(Error::InvalidInstance(format!(
                "edge ({}, {}) is not part of the model",
                e.item, e.placeholder
            ))),
        }
    }

    fn id(&self, local: usize) -> NodeId {
        self.ids[local]
    }
}

struct Retain {
    mask: Vec<bool>,
    target: usize,
    exact: bool,
}

struct Cut {
    items: Vec<usize>,
    placeholders: Vec<usize>,
    rhs: f64,
}

struct Node {
    state: Vec<EdgeState>,
    lambda: Vec<f64>,
    mu: f64,
    lb: f64,
    depth: usize,
    seq: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: smallest bound first, newest node among equals
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lb
            .total_cmp(&self.lb)
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

enum Outcome {
    Pruned,
    Branch(Node, usize),
}

const ROOT_ITERATIONS: usize = 300;
const NODE_ITERATIONS: usize = 40;
const MAX_CUTS: usize = 4000;

struct Search<'a> {
    n: usize,
    costs: &'a CostMatrix,
    root_state: Vec<EdgeState>,
    retain: Option<Retain>,
    cuts: Vec<Cut>,
    cut_keys: HashSet<Vec<usize>>,
    ub: f64,
    incumbent: Option<Vec<bool>>,
    gap: f64,
    start: Instant,
    deadline: Option<Instant>,
    timed_out: bool,
    /// Bound of nodes abandoned at the time limit.
    open_bound: f64,
    stats: SolveStats,
}

impl Search<'_> {
    fn tolerance(&self) -> f64 {
        let scale = if self.ub.is_finite() { self.ub.abs().max(1.0) } else { 1.0 };
        1e-10 * scale + self.gap * self.ub.abs().min(f64::MAX)
    }

    fn prunable(&self, lb: f64) -> bool {
        self.ub.is_finite() && lb >= self.ub - self.tolerance()
    }

    fn out_of_time(&mut self) -> bool {
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    fn true_cost(&self, used: &[bool]) -> f64 {
        let n = self.n;
        (0..n * n).filter(|&k| used[k]).map(|k| self.costs.get(k / n, k % n)).sum()
    }

    fn offer(&mut self, used: Vec<bool>, cost: f64) {
        if cost < self.ub - 1e-12 || self.incumbent.is_none() {
            self.ub = cost;
            self.incumbent = Some(used);
            info!("incumbent {:.6} @ {:.3}s", cost, self.start.elapsed().as_secs_f64());
        }
    }

    fn retained(&self, used: &[bool]) -> usize {
        self.retain
            .as_ref()
            .map_or(0, |r| used.iter().zip(&r.mask).filter(|(u, m)| **u && **m).count())
    }

    fn retain_ok(&self, used: &[bool]) -> bool {
        match &self.retain {
            None => true,
            Some(r) => {
                let k = self.retained(used);
                if r.exact {
                    k == r.target
                } else {
                    k >= r.target
                }
            }
        }
    }

    /// Degree, state, connectivity and retain checks.
    fn is_feasible(&self, used: &[bool], state: &[EdgeState]) -> bool {
        let n = self.n;
        let mut deg = vec![0; 2 * n];
        for k in 0..n * n {
            match (state[k], used[k]) {
                (EdgeState::Forced, false) | (EdgeState::Forbidden, true) => return false,
                _ => {}
            }
            if used[k] {
                deg[k / n] += 1;
                deg[n + k % n] += 1;
            }
        }
        deg.iter().all(|&d| d == 2) && components(n, used).len() == 1 && self.retain_ok(used)
    }

    fn run(&mut self, root: Vec<EdgeState>) -> f64 {
        let mut heap = BinaryHeap::new();
        let mut seq = 0;
        heap.push(Node {
            state: root,
            lambda: Vec::new(),
            mu: 0.0,
            lb: f64::NEG_INFINITY,
            depth: 0,
            seq,
        });
        while let Some(node) = heap.pop() {
            if self.prunable(node.lb) {
                continue;
            }
            if self.out_of_time() {
                return heap.iter().map(|x| x.lb).fold(node.lb.min(self.open_bound), f64::min);
            }
            self.stats.branch_nodes += 1;
            match self.process(node) {
                Outcome::Pruned => {}
                Outcome::Branch(node, e) => {
                    for fix in [EdgeState::Forbidden, EdgeState::Forced] {
                        let mut state = node.state.clone();
                        state[e] = fix;
                        if !self.structurally_feasible(&state) {
                            continue;
                        }
                        seq += 1;
                        heap.push(Node {
                            state,
                            lambda: node.lambda.clone(),
                            mu: node.mu,
                            lb: node.lb,
                            depth: node.depth + 1,
                            seq,
                        });
                    }
                }
            }
        }
        if self.timed_out {
            self.open_bound
        } else {
            self.ub
        }
    }

    /// Forced degrees ≤ 2, forced edges close no short cycle, and the retain
    /// count is still reachable.
    fn structurally_feasible(&self, state: &[EdgeState]) -> bool {
        let n = self.n;
        let mut deg = vec![0; 2 * n];
        let mut dsu = Dsu::new(2 * n);
        let mut forced = 0;
        for k in (0..n * n).filter(|&k| state[k] == EdgeState::Forced) {
            let (a, b) = (k / n, n + k % n);
            deg[a] += 1;
            deg[b] += 1;
            if deg[a] > 2 || deg[b] > 2 {
                return false;
            }
            forced += 1;
            if !dsu.union(a, b) && forced < 2 * n {
                return false;
            }
        }
        if let Some(r) = &self.retain {
            let fixed_in = (0..n * n).filter(|&k| r.mask[k] && state[k] == EdgeState::Forced).count();
            let possible = (0..n * n).filter(|&k| r.mask[k] && state[k] != EdgeState::Forbidden).count();
            if possible < r.target || (r.exact && fixed_in > r.target) {
                return false;
            }
        }
        true
    }

    fn process(&mut self, mut node: Node) -> Outcome {
        let n = self.n;
        let root = node.depth == 0;
        let iterations = if root { ROOT_ITERATIONS } else { NODE_ITERATIONS };
        let mut theta = if root { 2.0 } else { 1.0 };
        let mut stall = 0;
        let mut best_lb = node.lb;
        let mut best_lambda = node.lambda.clone();
        let mut best_mu = node.mu;
        let mut lambda = std::mem::take(&mut node.lambda);
        lambda.resize(self.cuts.len(), 0.0);
        let mut mu = node.mu;
        let mut last_used: Option<Vec<bool>> = None;
        let mut adjusted = vec![0.0; n * n];

        for it in 0..iterations {
            if self.out_of_time() {
                break;
            }
            lambda.resize(self.cuts.len(), 0.0);
            let mut constant = 0.0;
            for i in 0..n {
                adjusted[i * n..(i + 1) * n].copy_from_slice(self.costs.row(i));
            }
            for (cut, &l) in self.cuts.iter().zip(&lambda) {
                if l == 0.0 {
                    continue;
                }
                constant -= l * cut.rhs;
                for &i in &cut.items {
                    for &p in &cut.placeholders {
                        adjusted[i * n + p] += l;
                    }
                }
            }
            if let Some(r) = &self.retain {
                constant += mu * r.target as f64;
                for (k, &m) in r.mask.iter().enumerate() {
                    if m {
                        adjusted[k] -= mu;
                    }
                }
            }

            let Some(sol) = min_two_factor(n, &adjusted, &node.state) else {
                return Outcome::Pruned;
            };
            let bound = sol.value + constant;
            if bound > best_lb + 1e-12 {
                best_lb = bound;
                best_lambda = lambda.clone();
                best_mu = mu;
                stall = 0;
            } else {
                stall += 1;
            }
            if self.prunable(best_lb) {
                return Outcome::Pruned;
            }

            let comps = components(n, &sol.used);
            if comps.len() == 1 && self.retain_ok(&sol.used) {
                let c = self.true_cost(&sol.used);
                self.offer(sol.used.clone(), c);
                if c <= bound + self.tolerance() {
                    return Outcome::Pruned;
                }
            } else if comps.len() > 1 {
                if root || it == 0 {
                    self.patch(&comps);
                }
                self.add_cut(&comps);
                lambda.resize(self.cuts.len(), 0.0);
            }

            // reduced-cost fixing against the incumbent
            if self.ub.is_finite() {
                let limit = self.ub - self.tolerance();
                for k in 0..n * n {
                    if node.state[k] == EdgeState::Free && bound + sol.flip_bound[k] > limit {
                        node.state[k] = if sol.used[k] { EdgeState::Forced } else { EdgeState::Forbidden };
                    }
                }
                if !self.structurally_feasible(&node.state) {
                    return Outcome::Pruned;
                }
            }

            // subgradient step
            let mut norm = 0.0;
            let mut grads = Vec::with_capacity(self.cuts.len());
            for (c, cut) in self.cuts.iter().enumerate() {
                let inside: usize = cut
                    .items
                    .iter()
                    .map(|&i| cut.placeholders.iter().filter(|&&p| sol.used[i * n + p]).count())
                    .sum();
                let g = inside as f64 - cut.rhs;
                let g = if lambda[c] <= 0.0 && g < 0.0 { 0.0 } else { g };
                norm += g * g;
                grads.push(g);
            }
            let g_mu = match &self.retain {
                Some(r) => {
                    let g = r.target as f64 - self.retained(&sol.used) as f64;
                    if !r.exact && mu <= 0.0 && g < 0.0 {
                        0.0
                    } else {
                        g
                    }
                }
                None => 0.0,
            };
            norm += g_mu * g_mu;
            last_used = Some(sol.used);
            if norm == 0.0 {
                break;
            }
            let target = if self.ub.is_finite() {
                self.ub
            } else {
                bound.abs() * 1.05 + 1e-3
            };
            let step = theta * (target - bound).max(1e-9) / norm;
            for (l, g) in lambda.iter_mut().zip(&grads) {
                *l = (*l + step * g).max(0.0);
            }
            mu += step * g_mu;
            if self.retain.as_ref().is_some_and(|r| !r.exact) {
                mu = mu.max(0.0);
            }
            if stall >= 4 {
                theta *= 0.5;
                stall = 0;
            }
            if theta < 1e-3 {
                break;
            }
        }

        if self.timed_out {
            self.open_bound = self.open_bound.min(best_lb);
            return Outcome::Pruned;
        }
        let Some(used) = last_used else {
            return Outcome::Pruned;
        };
        node.lambda = best_lambda;
        node.mu = best_mu;
        node.lb = best_lb;
        match self.branch_edge(&used, &node.state) {
            Some(e) => Outcome::Branch(node, e),
            None => {
                // every selected edge is fixed: the selection is the only completion
                if self.is_feasible(&used, &node.state) {
                    let c = self.true_cost(&used);
                    self.offer(used, c);
                }
                Outcome::Pruned
            }
        }
    }

    /// Undecided edge to branch on: taken from the smallest subtour if the
    /// relaxation is disconnected, otherwise from the whole selection;
    /// the most expensive edge wins, ties go to the lowest index.
    fn branch_edge(&self, used: &[bool], state: &[EdgeState]) -> Option<usize> {
        let n = self.n;
        let comps = components(n, used);
        let pick = |pool: &mut dyn Iterator<Item = usize>| -> Option<usize> {
            let mut best: Option<(f64, usize)> = None;
            for k in pool {
                if state[k] != EdgeState::Free {
                    continue;
                }
                let c = self.costs.get(k / n, k % n);
                if best.is_none_or(|(bc, bk)| c > bc || (c == bc && k < bk)) {
                    best = Some((c, k));
                }
            }
            best.map(|(_, k)| k)
        };
        if comps.len() > 1 {
            let smallest = comps.iter().min_by_key(|c| (c.len(), c[0])).unwrap();
            if let Some(k) = pick(&mut smallest.iter().copied()) {
                return Some(k);
            }
        }
        if let Some(r) = &self.retain {
            if !self.retain_ok(used) {
                let under = self.retained(used) < r.target;
                let mut pool = (0..n * n).filter(|&k| used[k] && (r.mask[k] != under));
                if let Some(k) = pick(&mut pool) {
                    return Some(k);
                }
            }
        }
        pick(&mut (0..n * n).filter(|&k| used[k]))
    }

    fn add_cut(&mut self, comps: &[Vec<usize>]) {
        if self.cuts.len() >= MAX_CUTS {
            return;
        }
        let n = self.n;
        let smallest = comps.iter().min_by_key(|c| (c.len(), c[0])).unwrap();
        let mut items: Vec<usize> = smallest.iter().map(|&k| k / n).collect();
        let mut placeholders: Vec<usize> = smallest.iter().map(|&k| k % n).collect();
        items.sort_unstable();
        items.dedup();
        placeholders.sort_unstable();
        placeholders.dedup();
        let key: Vec<usize> = items.iter().copied().chain(placeholders.iter().map(|&p| n + p)).collect();
        if self.cut_keys.insert(key) {
            let size = items.len() + placeholders.len();
            debug!("cut added |S|={size}");
            self.stats.subtour_cuts_added += 1;
            self.cuts.push(Cut {
                items,
                placeholders,
                rhs: size as f64 - 1.0,
            });
        }
    }

    /// Greedy cycle patching of a 2-factor into a tour, respecting the root
    /// constraints. Offers the result as an incumbent.
    fn patch(&mut self, comps: &[Vec<usize>]) {
        let n = self.n;
        let mut cycles: Vec<Vec<usize>> = comps.to_vec();
        let cost = |k: usize| self.costs.get(k / n, k % n);
        while cycles.len() > 1 {
            let mut best: Option<(f64, usize, usize, usize, usize)> = None;
            for a in 0..cycles.len() {
                for b in a + 1..cycles.len() {
                    for &ea in &cycles[a] {
                        if self.root_state[ea] == EdgeState::Forced {
                            continue;
                        }
                        let (ia, pa) = (ea / n, ea % n);
                        for &eb in &cycles[b] {
                            if self.root_state[eb] == EdgeState::Forced {
                                continue;
                            }
                            let (ib, pb) = (eb / n, eb % n);
                            let x1 = ia * n + pb;
                            let x2 = ib * n + pa;
                            if self.root_state[x1] == EdgeState::Forbidden
                                || self.root_state[x2] == EdgeState::Forbidden
                            {
                                continue;
                            }
                            let delta = cost(x1) + cost(x2) - cost(ea) - cost(eb);
                            if best.is_none_or(|bst| delta < bst.0) {
                                best = Some((delta, a, b, ea, eb));
                            }
                        }
                    }
                }
            }
            let Some((_, a, b, ea, eb)) = best else {
                return;
            };
            let (ia, pa, ib, pb) = (ea / n, ea % n, eb / n, eb % n);
            let other = cycles.swap_remove(b);
            let merged = &mut cycles[a];
            merged.retain(|&k| k != ea);
            merged.extend(other.into_iter().filter(|&k| k != eb));
            merged.push(ia * n + pb);
            merged.push(ib * n + pa);
        }
        let mut tour = vec![false; n * n];
        for &k in &cycles[0] {
            tour[k] = true;
        }
        if self.retain_ok(&tour) {
            let c = self.true_cost(&tour);
            self.offer(tour, c);
        }
    }
}

/// Connected components of a 2-regular selection, as lists of edge indices
/// sorted ascending.
fn components(n: usize, used: &[bool]) -> Vec<Vec<usize>> {
    let mut dsu = Dsu::new(2 * n);
    for k in (0..n * n).filter(|&k| used[k]) {
        dsu.union(k / n, n + k % n);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in (0..n * n).filter(|&k| used[k]) {
        groups.entry(dsu.find(k / n)).or_default().push(k);
    }
    let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(size: usize) -> Self {
        Self {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Point;
    use crate::tour::cycle_path;

    fn square() -> Instance {
        Instance::from_coords(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)],
            vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            true,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn square_has_unique_cycle() {
        let res = solve(&square(), &SolveOptions::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.cost, 4.0);
        assert_eq!(res.edges.len(), 4);
    }

    #[test]
    fn retain_min_rounding() {
        assert_eq!(retain_min(300, 0.05), 570);
        assert_eq!(retain_min(300, 0.15), 510);
        assert_eq!(retain_min(12, 0.015), 24);
        assert_eq!(retain_min(5, 1.0), 0);
    }

    #[test]
    fn inconsistent_constraints_rejected() {
        let inst = Instance::generate(4, 0, 1.0).unwrap();
        let e = Edge::new(NodeId(1), NodeId(5));
        let opts = SolveOptions {
            forced_edges: [e].into_iter().collect(),
            forbidden_edges: [e].into_iter().collect(),
            ..Default::default()
        };
        assert!(matches!(solve(&inst, &opts), Err(Error::Infeasible(_))));

        let opts = SolveOptions {
            forced_edges: [5, 6, 7].into_iter().map(|p| Edge::new(NodeId(1), NodeId(p))).collect(),
            ..Default::default()
        };
        assert!(matches!(solve(&inst, &opts), Err(Error::Infeasible(_))));
    }

    #[test]
    fn forced_short_cycle_is_infeasible() {
        let inst = Instance::generate(4, 0, 1.0).unwrap().with_fixed_pair(false);
        let e = |i, p| Edge::new(NodeId(i), NodeId(p));
        let opts = SolveOptions {
            forced_edges: [e(1, 5), e(1, 6), e(2, 5), e(2, 6)].into_iter().collect(),
            ..Default::default()
        };
        let res = solve(&inst, &opts).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
    }

    #[test]
    fn result_is_a_single_cycle_with_fixed_pair() {
        for seed in 0..10 {
            let inst = Instance::generate(9, seed, 1.0).unwrap();
            let res = solve(&inst, &SolveOptions::default()).unwrap();
            assert_eq!(res.status, SolveStatus::Optimal);
            let t = cycle_path(&res.edges, 9).unwrap();
            t.validate(&inst).unwrap();
            assert!((t.cost(&inst).unwrap() - res.cost).abs() < 1e-9);
        }
    }

    #[test]
    fn alpha_one_matches_unconstrained() {
        let inst = Instance::generate(8, 4, 1.0).unwrap();
        let free = solve(&inst, &SolveOptions::default()).unwrap();
        let start = Tour::identity(8);
        start.validate(&inst).unwrap();
        let la = solve_large_alpha(&inst, &start, 1.0, &SolveOptions::default()).unwrap();
        assert!((la.cost - free.cost).abs() < 1e-9);
        assert!(solve_large_alpha(&inst, &start, 0.0, &SolveOptions::default()).is_err());
    }

    #[test]
    fn time_limit_reports_incumbent() {
        let inst = Instance::generate(30, 1, 1.0).unwrap();
        let opts = SolveOptions::default().with_time_limit(Duration::from_millis(1));
        let res = solve(&inst, &opts).unwrap();
        assert!(res.stats.timed_out || res.status == SolveStatus::Optimal);
    }
}
