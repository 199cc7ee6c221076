//! Partial path reconstruction.
//!
//! Breaking a tour around a node set removes every edge incident to the set.
//! What survives is a collection of alternating paths (segments). Each
//! segment is contracted to its two boundary nodes, which are joined by a
//! temporary edge, and the reduced problem over boundary and freed nodes is
//! solved exactly. Dropping the temporary edges from the reduced solution and
//! adding back the segment interiors yields the new tour:
//! `L* = (L_n \ L_t) ∪ L_r`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exact::{solve_model, Model, SolveOptions, SolveResult, SolveStatus, SolveStats};
use crate::instance::{CostMatrix, Instance, NodeId};
use crate::merging::NodeCollector;
use crate::tour::{cycle_path, Edge, EdgeSet, Tour, COST_EPS};

/// A maximal surviving path, oriented from its item end to its placeholder end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub items: Vec<NodeId>,
    pub placeholders: Vec<NodeId>,
    pub start_item: NodeId,
    pub end_placeholder: NodeId,
    pub interior_edges: EdgeSet,
    pub single_pair: bool,
}

impl Segment {
    /// The edge standing in for the segment in the reduced problem: the
    /// temporary edge, or the pair's own edge for a single pair.
    pub fn link(&self) -> Edge {
        Edge::new(self.start_item, self.end_placeholder)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedProblem {
    /// Pair count of the original instance.
    pub n: usize,
    pub segments: Vec<Segment>,
    /// Freed nodes, including any added to restore alternation.
    pub free_nodes: BTreeSet<NodeId>,
    pub reserved_edges: EdgeSet,
    pub temporary_edges: EdgeSet,
    /// Tour edges removed by the break.
    pub removed_edges: EdgeSet,
    /// Cost of the reserved edges, which the reduced objective leaves out.
    pub offset_cost: f64,
    /// Fixed pair to re-impose when the break cut it.
    pub fixed_edge: Option<Edge>,
}

impl ReducedProblem {
    pub fn items(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self
            .free_nodes
            .iter()
            .copied()
            .filter(|v| v.index() <= self.n)
            .chain(self.segments.iter().map(|s| s.start_item))
            .collect();
        v.sort();
        v
    }

    pub fn placeholders(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self
            .free_nodes
            .iter()
            .copied()
            .filter(|v| v.index() > self.n)
            .chain(self.segments.iter().map(|s| s.end_placeholder))
            .collect();
        v.sort();
        v
    }

    /// Number of item/placeholder pairs in the reduced problem.
    pub fn reduced_pairs(&self) -> usize {
        self.items().len()
    }

    /// Segment links that are forced in the reduced problem.
    pub fn links(&self) -> EdgeSet {
        self.segments.iter().map(Segment::link).collect()
    }

    /// The input tour's connection pattern expressed in the reduced problem.
    pub fn original_pattern(&self) -> EdgeSet {
        self.removed_edges.union(&self.links())
    }
}

/// Position of every node in the cyclic sequence `q_I[0], q_P[0], q_I[1], ...`.
fn tour_sequence(t: &Tour) -> Vec<NodeId> {
    t.items
        .iter()
        .zip(&t.placeholders)
        .flat_map(|(&i, &p)| [i, p])
        .collect()
}

/// Removes all edges incident to `selected` and contracts the surviving paths.
///
/// Paths whose two ends are of the same type lose one end (the larger id) to
/// the free set until every segment runs from an item to a placeholder. If
/// the fixed pair is enabled and either of its nodes is selected, both are
/// freed and the pair is forced in the reduced problem.
pub fn break_tour(inst: &Instance, t: &Tour, selected: &BTreeSet<NodeId>) -> Result<ReducedProblem> {
    t.validate(inst)?;
    if selected.is_empty() {
        return Err(Error::Degenerate("the selected node set is empty".into()));
    }
    if let Some(v) = selected.iter().find(|v| !inst.contains(**v)) {
        return Err(Error::InvalidInstance(format!("selected node {v} is not in the instance")));
    }
    let n = inst.n();
    let mut free = selected.clone();
    let fixed = inst.fixed_edge();
    if let Some((i, p)) = fixed {
        if free.contains(&i) || free.contains(&p) {
            free.insert(i);
            free.insert(p);
        }
    }

    let seq = tour_sequence(t);
    let len = seq.len();
    let runs = loop {
        let anchor = (0..len)
            .find(|&k| free.contains(&seq[k]))
            .expect("free set is non-empty");
        let mut runs: Vec<Vec<NodeId>> = Vec::new();
        let mut current: Vec<NodeId> = Vec::new();
        for step in 1..=len {
            let v = seq[(anchor + step) % len];
            if free.contains(&v) {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
            } else {
                current.push(v);
            }
        }
        let odd: Vec<NodeId> = runs
            .iter()
            .filter(|r| r.len() % 2 == 1)
            .map(|r| (*r.first().unwrap()).max(*r.last().unwrap()))
            .collect();
        if odd.is_empty() {
            break runs;
        }
        free.extend(odd);
    };

    let mut segments = Vec::with_capacity(runs.len());
    let mut reserved = EdgeSet::new();
    let mut temporary = EdgeSet::new();
    for mut run in runs {
        if inst.is_placeholder(run[0]) {
            run.reverse();
        }
        let interior: EdgeSet = run
            .windows(2)
            .map(|w| Edge::between(w[0], w[1], n))
            .collect::<Result<_>>()?;
        let items: Vec<NodeId> = run.iter().copied().step_by(2).collect();
        let placeholders: Vec<NodeId> = run.iter().copied().skip(1).step_by(2).collect();
        let seg = Segment {
            start_item: items[0],
            end_placeholder: *placeholders.last().unwrap(),
            single_pair: items.len() == 1,
            items,
            placeholders,
            interior_edges: interior,
        };
        reserved.extend(seg.interior_edges.iter().copied());
        if !seg.single_pair {
            temporary.insert(seg.link());
        }
        segments.push(seg);
    }

    let tour_edges = t.edge_set();
    let removed: EdgeSet = tour_edges.difference(&reserved);
    let fixed_edge = fixed
        .map(|(i, p)| Edge::new(i, p))
        .filter(|e| !reserved.contains(e));
    let rp = ReducedProblem {
        n,
        offset_cost: reserved.cost(inst),
        segments,
        free_nodes: free,
        reserved_edges: reserved,
        temporary_edges: temporary,
        removed_edges: removed,
        fixed_edge,
    };
    if rp.reduced_pairs() < 2 {
        return Err(Error::Degenerate(format!(
            "reduced problem has {} pair(s)",
            rp.reduced_pairs()
        )));
    }
    if rp.reduced_pairs() != rp.placeholders().len() {
        return Err(Error::Internal("reduced problem is unbalanced".into()));
    }
    Ok(rp)
}

/// Reduced solve outcome: `edges` is `L_n`, `result.cost` the reduced objective.
#[derive(Debug, Clone)]
pub struct ReducedSolution {
    pub edges: EdgeSet,
    pub result: SolveResult,
}

/// Solves the reduced problem exactly. Segment links are forced at zero
/// cost; the input tour's pattern is the warm start. Forced and forbidden
/// edges from `opts` are honoured, retain options are ignored.
pub fn solve_reduced(inst: &Instance, rp: &ReducedProblem, opts: &SolveOptions) -> Result<ReducedSolution> {
    let items = rp.items();
    let placeholders = rp.placeholders();
    let links = rp.links();
    let costs = CostMatrix::from_fn(items.len(), |i, p| {
        let e = Edge::new(items[i], placeholders[p]);
        if links.contains(&e) {
            0.0
        } else {
            e.cost(inst)
        }
    });
    let inside = |e: &Edge| items.contains(&e.item) && placeholders.contains(&e.placeholder);
    if let Some(e) = opts
        .forced_edges
        .iter()
        .find(|e| !inside(e) && !rp.reserved_edges.contains(e))
    {
        return Err(Error::Infeasible(format!(
            "forced edge ({}, {}) lies inside a segment but is not part of it",
            e.item, e.placeholder
        )));
    }
    let mut forced = links;
    forced.extend(rp.fixed_edge);
    forced.extend(opts.forced_edges.iter().copied().filter(|e| inside(e)));
    let forbidden: EdgeSet = opts.forbidden_edges.iter().copied().filter(|e| inside(e)).collect();
    let model = Model {
        costs,
        item_ids: items,
        placeholder_ids: placeholders,
    };
    let reduced_opts = SolveOptions {
        time_limit: opts.time_limit,
        forced_edges: forced,
        forbidden_edges: forbidden,
        gap_tolerance: opts.gap_tolerance,
        ..Default::default()
    };
    let warm = rp.original_pattern();
    let result = solve_model(&model, &reduced_opts, Some(&warm))?;
    if result.status == SolveStatus::Infeasible {
        return Err(Error::Infeasible("reduced problem has no solution".into()));
    }
    Ok(ReducedSolution {
        edges: result.edges.clone(),
        result,
    })
}

/// `cycle_path((L_n \ L_t) ∪ L_r)`.
pub fn recover(rp: &ReducedProblem, reduced_edges: &EdgeSet, n: usize) -> Result<Tour> {
    let full = reduced_edges
        .difference(&rp.temporary_edges)
        .union(&rp.reserved_edges);
    if full.len() != 2 * n {
        return Err(Error::Internal(format!(
            "recovered edge set has {} edges, expected {}",
            full.len(),
            2 * n
        )));
    }
    cycle_path(&full, n).map_err(|e| Error::Internal(format!("recovered edge set is not a tour: {e}")))
}

/// One break / solve / recover round.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub tour: Tour,
    pub cost_before: f64,
    pub cost_after: f64,
    pub reduced_pairs: usize,
    pub timed_out: bool,
    pub stats: SolveStats,
}

/// Breaks `t` around `selected`, re-solves and recovers. Never returns a
/// more expensive tour than `t`.
pub fn reconstruct(
    inst: &Instance,
    t: &Tour,
    selected: &BTreeSet<NodeId>,
    opts: &SolveOptions,
) -> Result<Reconstruction> {
    let cost_before = t.cost(inst)?;
    let rp = break_tour(inst, t, selected)?;
    let sol = solve_reduced(inst, &rp, opts)?;
    let tour = recover(&rp, &sol.edges, inst.n())?;
    let cost_after = tour.cost(inst)?;
    let expected = sol.result.cost + rp.offset_cost;
    if (cost_after - expected).abs() > 1e-6 * expected.max(1.0) {
        return Err(Error::Internal(format!(
            "recovered cost {cost_after} differs from reduced objective plus offset {expected}"
        )));
    }
    let timed_out = sol.result.status == SolveStatus::FeasibleTimeLimit;
    let (tour, cost_after) = if cost_after <= cost_before + COST_EPS {
        (tour, cost_after)
    } else {
        (t.clone(), cost_before)
    };
    Ok(Reconstruction {
        tour,
        cost_before,
        cost_after,
        reduced_pairs: rp.reduced_pairs(),
        timed_out,
        stats: sol.result.stats,
    })
}

/// Merge refinement: reconstruct around the nodes touched while merging.
pub fn refine_merge(
    inst: &Instance,
    t: &Tour,
    collector: &NodeCollector,
    opts: &SolveOptions,
) -> Result<Reconstruction> {
    if collector.is_empty() {
        let cost = t.cost(inst)?;
        return Ok(Reconstruction {
            tour: t.clone(),
            cost_before: cost,
            cost_after: cost,
            reduced_pairs: 0,
            timed_out: false,
            stats: SolveStats::default(),
        });
    }
    reconstruct(inst, t, &collector.nodes, opts)
}
