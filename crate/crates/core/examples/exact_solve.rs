//! Exact solves: the plain model, a time-limited run, and side constraints.
//!
//! ```bash
//! cargo run --release --example exact_solve -- 25
//! ```

use std::time::Duration;

use jra::exact::{solve, SolveOptions};
use jra::tour::cycle_path;
use jra::{Edge, Instance, NodeId};

fn main() -> jra::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(25, |a| a.parse().expect("n"));
    let inst = Instance::generate(n, 2, 1.0)?;

    let res = solve(&inst, &SolveOptions::default())?;
    println!(
        "optimal {:.6} in {:.3}s: {} branch nodes, {} subtour cuts",
        res.cost, res.stats.wall_time, res.stats.branch_nodes, res.stats.subtour_cuts_added
    );
    let tour = cycle_path(&res.edges, n)?;
    println!("q_I starts {:?}", &tour.items[..5.min(n)]);

    let quick = solve(&inst, &SolveOptions::default().with_time_limit(Duration::from_millis(5)))?;
    println!(
        "5 ms budget: {:?}, cost {:.6}, lower bound {:.6}",
        quick.status, quick.cost, quick.stats.lower_bound
    );

    // forbid the first optimal edge that is not the fixed pair
    let fixed = inst.fixed_edge().map(|(i, p)| Edge::new(i, p));
    let banned = *res.edges.iter().find(|e| Some(**e) != fixed).unwrap();
    let opts = SolveOptions {
        forbidden_edges: [banned].into_iter().collect(),
        forced_edges: [Edge::new(NodeId(1), inst.placeholder_id(0))].into_iter().collect(),
        ..Default::default()
    };
    let constrained = solve(&inst, &opts)?;
    println!(
        "without ({}, {}) and with (1, {}): {:.6} (+{:.6})",
        banned.item,
        banned.placeholder,
        inst.placeholder_id(0),
        constrained.cost,
        constrained.cost - res.cost
    );
    Ok(())
}
