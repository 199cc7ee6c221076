//! Build an initial tour: a forward and a constrained backward assignment
//! give a set of disjoint cycles, which greedy merging fuses into one.
//!
//! ```bash
//! cargo run --release --example assign_and_merge -- 200
//! ```

use jra::assignment::{two_way_assign, two_way_passes};
use jra::merging::merge_cycles;
use jra::Instance;

fn main() -> jra::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(200, |a| a.parse().expect("n"));
    let inst = Instance::generate(n, 1, 1.0)?;

    let passes = two_way_passes(&inst)?;
    println!(
        "forward assignment {:.4}, backward assignment {:.4}",
        passes.forward.cost(&inst),
        passes.backward.cost(&inst)
    );

    let cycles = two_way_assign(&inst)?;
    println!("{} cycles, {:.3} per pair", cycles.len(), cycles.len() as f64 / n as f64);
    for c in cycles.cycles.iter().take(5) {
        println!("  cycle from item {} with {} pairs", c.min_item(), c.pairs());
    }

    let merged = merge_cycles(&inst, &cycles)?;
    println!("merged tour cost {:.6}", merged.tour.cost(&inst)?);
    for step in merged.steps.iter().take(5) {
        println!(
            "  removed {:?}, added {:?}, delta {:+.4}",
            step.removed.map(|e| (e.item.0, e.placeholder.0)),
            step.added.map(|e| (e.item.0, e.placeholder.0)),
            step.delta
        );
    }
    println!(
        "{} merge steps touched {} nodes ({:.1}% of 2n+2)",
        merged.steps.len(),
        merged.collector.len(),
        100.0 * merged.collector.len() as f64 / (2 * n + 2) as f64
    );
    Ok(())
}
