//! Greedy cycle merging with node collection.
//!
//! Each step removes one edge from each of two cycles and cross-links the
//! four endpoints so that item–placeholder alternation is kept, choosing the
//! globally cheapest such reconnection. The endpoints of every reconnection
//! are collected; they seed the partial path reconstruction refinement.

use std::collections::BTreeSet;

use crate::assignment::CycleSet;
use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId};
use crate::tour::{cycle_path, Edge, EdgeSet, Tour};

/// Nodes touched by at least one merge reconnection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeCollector {
    pub nodes: BTreeSet<NodeId>,
}

impl NodeCollector {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// One applied reconnection.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep {
    pub removed: [Edge; 2],
    pub added: [Edge; 2],
    pub delta: f64,
    /// Smallest delta among all other candidates of this step, if any.
    pub runner_up: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MergeOutcome {
    pub tour: Tour,
    pub collector: NodeCollector,
    pub steps: Vec<MergeStep>,
}

#[derive(Clone, Copy)]
struct Candidate {
    delta: f64,
    a: usize,
    b: usize,
    ea: Edge,
    eb: Edge,
}

impl Candidate {
    fn key(&self) -> (NodeId, NodeId, NodeId, NodeId) {
        (self.ea.item, self.ea.placeholder, self.eb.item, self.eb.placeholder)
    }

    fn better_than(&self, other: &Candidate) -> bool {
        self.delta < other.delta || (self.delta == other.delta && self.key() < other.key())
    }
}

/// Merges all cycles into a single tour.
pub fn merge_cycles(inst: &Instance, cs: &CycleSet) -> Result<MergeOutcome> {
    if cs.is_empty() {
        return Err(Error::InvalidTour("cannot merge an empty cycle set".into()));
    }
    let n = inst.n();
    let fixed = inst.fixed_edge().map(|(i, p)| Edge::new(i, p));
    let cost = |e: &Edge| inst.cost_local(e.item.index() - 1, e.placeholder.index() - n - 1);
    let cross = |a: &Edge, b: &Edge| {
        inst.cost_local(a.item.index() - 1, b.placeholder.index() - n - 1)
            + inst.cost_local(b.item.index() - 1, a.placeholder.index() - n - 1)
    };

    let mut cycles: Vec<Vec<Edge>> = cs.cycles.iter().map(|c| c.edges().collect()).collect();
    let mut collector = NodeCollector::default();
    let mut steps = Vec::with_capacity(cycles.len().saturating_sub(1));

    while cycles.len() > 1 {
        let mut best: Option<Candidate> = None;
        let mut second: Option<f64> = None;
        for a in 0..cycles.len() {
            for b in a + 1..cycles.len() {
                for ea in &cycles[a] {
                    if Some(*ea) == fixed {
                        continue;
                    }
                    let ca = cost(ea);
                    for eb in &cycles[b] {
                        if Some(*eb) == fixed {
                            continue;
                        }
                        let delta = cross(ea, eb) - ca - cost(eb);
                        let (ea, eb) = if ea <= eb { (*ea, *eb) } else { (*eb, *ea) };
                        let cand = Candidate { delta, a, b, ea, eb };
                        match best {
                            Some(ref cur) if !cand.better_than(cur) => {
                                second = Some(second.map_or(delta, |s: f64| s.min(delta)));
                            }
                            Some(cur) => {
                                second = Some(second.map_or(cur.delta, |s: f64| s.min(cur.delta)));
                                best = Some(cand);
                            }
                            None => best = Some(cand),
                        }
                    }
                }
            }
        }
        let Candidate { delta, a, b, ea, eb } = best.ok_or_else(|| {
            Error::Internal("no removable edge pair between cycles".into())
        })?;
        let added = [
            Edge::new(ea.item, eb.placeholder),
            Edge::new(eb.item, ea.placeholder),
        ];
        collector
            .nodes
            .extend([ea.item, ea.placeholder, eb.item, eb.placeholder]);

        let merged_b = cycles.swap_remove(b);
        let merged = &mut cycles[a];
        merged.retain(|e| *e != ea && *e != eb);
        merged.extend(merged_b.into_iter().filter(|e| *e != ea && *e != eb));
        merged.extend(added);
        steps.push(MergeStep {
            removed: [ea, eb],
            added,
            delta,
            runner_up: second,
        });
    }

    let edges: EdgeSet = cycles.pop().unwrap().into_iter().collect();
    let tour = cycle_path(&edges, n)?;
    Ok(MergeOutcome {
        tour,
        collector,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{detect_cycles, two_way_assign};

    #[test]
    fn single_cycle_is_untouched() {
        let inst = Instance::generate(4, 0, 1.0).unwrap();
        let t = Tour::identity(4);
        let t = Tour::new(
            t.items.clone(),
            vec![NodeId(6), NodeId(7), NodeId(8), NodeId(5)],
        );
        let cs = detect_cycles(&t.edge_set(), 4).unwrap();
        let out = merge_cycles(&inst, &cs).unwrap();
        assert!(out.collector.is_empty());
        assert!(out.steps.is_empty());
        assert_eq!(out.tour.edge_set(), t.edge_set());
    }

    #[test]
    fn empty_set_rejected() {
        let inst = Instance::generate(4, 0, 1.0).unwrap();
        assert!(merge_cycles(&inst, &CycleSet { cycles: vec![] }).is_err());
    }

    #[test]
    fn merge_count_and_validity() {
        for seed in 0..20 {
            let inst = Instance::generate(40, seed, 1.0).unwrap();
            let cs = two_way_assign(&inst).unwrap();
            let out = merge_cycles(&inst, &cs).unwrap();
            assert_eq!(out.steps.len(), cs.len() - 1);
            assert!(out.collector.len() <= 4 * (cs.len() - 1));
            out.tour.validate(&inst).unwrap();
            let base: f64 = cs.edge_set().cost(&inst);
            let total: f64 = base + out.steps.iter().map(|s| s.delta).sum::<f64>();
            assert!((out.tour.cost(&inst).unwrap() - total).abs() < 1e-9);
            for s in &out.steps {
                if let Some(r) = s.runner_up {
                    assert!(s.delta <= r);
                }
            }
        }
    }
}
