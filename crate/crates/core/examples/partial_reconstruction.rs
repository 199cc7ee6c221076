//! Break a tour around a node set, look at the reduced problem, re-solve
//! it and stitch the result back.
//!
//! ```bash
//! cargo run --release --example partial_reconstruction
//! ```

use std::collections::BTreeSet;

use jra::assignment::two_way_assign;
use jra::exact::SolveOptions;
use jra::merging::merge_cycles;
use jra::ppr::{break_tour, recover, refine_merge, solve_reduced};
use jra::{Instance, NodeId};

fn main() -> jra::Result<()> {
    let inst = Instance::generate(60, 9, 1.0)?;
    let merged = merge_cycles(&inst, &two_way_assign(&inst)?)?;
    let tour = merged.tour;
    println!("merged tour {:.6}", tour.cost(&inst)?);

    let selected: BTreeSet<NodeId> = [3, 17, 18, 40, 75, 99].into_iter().map(NodeId).collect();
    let rp = break_tour(&inst, &tour, &selected)?;
    println!(
        "{} segments ({} single pairs), {} free nodes, reduced problem with {} pairs",
        rp.segments.len(),
        rp.segments.iter().filter(|s| s.single_pair).count(),
        rp.free_nodes.len(),
        rp.reduced_pairs()
    );
    println!(
        "|L_r| = {}, |L_t| = {}, removed = {}, offset {:.6}",
        rp.reserved_edges.len(),
        rp.temporary_edges.len(),
        rp.removed_edges.len(),
        rp.offset_cost
    );

    let sol = solve_reduced(&inst, &rp, &SolveOptions::default())?;
    let out = recover(&rp, &sol.edges, inst.n())?;
    println!(
        "reduced objective {:.6} + offset = {:.6}; recovered tour {:.6}",
        sol.result.cost,
        sol.result.cost + rp.offset_cost,
        out.cost(&inst)?
    );

    // the merge refinement uses the nodes touched while merging
    let r = refine_merge(&inst, &tour, &merged.collector, &SolveOptions::default())?;
    println!(
        "merge refinement over {} collected nodes: {:.6} -> {:.6}",
        merged.collector.len(),
        r.cost_before,
        r.cost_after
    );
    Ok(())
}
