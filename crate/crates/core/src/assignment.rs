//! Hungarian assignment and the two-way (forward + backward) assignment that
//! splits the node set into disjoint alternating cycles.

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, Instance};
use crate::tour::{decompose, Cycle, Edge, EdgeSet};

/// Result of a square assignment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `row_to_col[r]` is the column assigned to row `r`.
    pub row_to_col: Vec<usize>,
    pub cost: f64,
}

/// Minimum-cost perfect assignment in `O(n³)` using row/column potentials.
///
/// `f64::INFINITY` cells are forbidden. Ties are resolved towards the lowest
/// column index.
pub fn hungarian(costs: &CostMatrix) -> Result<Assignment> {
    let n = costs.n();
    if n == 0 {
        return Ok(Assignment {
            row_to_col: Vec::new(),
            cost: 0.0,
        });
    }
    if (0..n).any(|i| costs.row(i).iter().any(|c| c.is_nan() || *c == f64::NEG_INFINITY)) {
        return Err(Error::Domain("cost matrix contains NaN or -inf".into()));
    }
    // 1-based with a dummy column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            let crow = costs.row(i0 - 1);
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = crow[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return Err(Error::Infeasible(format!(
                    "row {} cannot be matched with finite cost",
                    row - 1
                )));
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    let cost = row_to_col.iter().enumerate().map(|(r, &c)| costs.get(r, c)).sum();
    Ok(Assignment { row_to_col, cost })
}

/// Disjoint alternating cycles covering every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSet {
    pub cycles: Vec<Cycle>,
}

impl CycleSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.cycles.iter().flat_map(Cycle::edges).collect()
    }

    pub fn node_count(&self) -> usize {
        self.cycles.iter().map(|c| 2 * c.pairs()).sum()
    }
}

/// Partitions a 2-regular edge set into cycles sorted by smallest item id.
pub fn detect_cycles(edges: &EdgeSet, n: usize) -> Result<CycleSet> {
    Ok(CycleSet {
        cycles: decompose(edges, n)?,
    })
}

/// The two matchings produced by the forward and backward passes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWayPasses {
    pub forward: EdgeSet,
    pub backward: EdgeSet,
}

/// Forward pass: items to placeholders. Backward pass: placeholders to items
/// with every forward cell forbidden. With the fixed pair on, `(n, 2n)` is
/// the only admissible cell in its row and column of the forward pass.
pub fn two_way_passes(inst: &Instance) -> Result<TwoWayPasses> {
    let n = inst.n();
    let mut forward_costs = inst.cost_matrix();
    if inst.fixed_pair() {
        let last = n - 1;
        for k in 0..last {
            forward_costs.set(last, k, f64::INFINITY);
            forward_costs.set(k, last, f64::INFINITY);
        }
    }
    let fwd = hungarian(&forward_costs)?;

    let mut backward_costs = inst.cost_matrix().transpose();
    for (i, &p) in fwd.row_to_col.iter().enumerate() {
        backward_costs.set(p, i, f64::INFINITY);
    }
    let bwd = hungarian(&backward_costs)?;

    let forward = fwd
        .row_to_col
        .iter()
        .enumerate()
        .map(|(i, &p)| Edge::new(inst.item_id(i), inst.placeholder_id(p)))
        .collect();
    let backward = bwd
        .row_to_col
        .iter()
        .enumerate()
        .map(|(p, &i)| Edge::new(inst.item_id(i), inst.placeholder_id(p)))
        .collect();
    Ok(TwoWayPasses { forward, backward })
}

/// Union of both passes, split into cycles.
pub fn two_way_assign(inst: &Instance) -> Result<CycleSet> {
    let passes = two_way_passes(inst)?;
    detect_cycles(&passes.forward.union(&passes.backward), inst.n())
}
