//! Re-optimize a merged tour while keeping most of its edges, for growing α.
//!
//! ```bash
//! cargo run --release --example large_alpha -- 30
//! ```

use jra::assignment::two_way_assign;
use jra::exact::{retain_min, solve, solve_large_alpha, SolveOptions};
use jra::merging::merge_cycles;
use jra::metrics::deviation_pct;
use jra::Instance;

fn main() -> jra::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(30, |a| a.parse().expect("n"));
    let inst = Instance::generate(n, 5, 1.0)?;
    let optimum = solve(&inst, &SolveOptions::default())?.cost;
    let tour = merge_cycles(&inst, &two_way_assign(&inst)?)?.tour;
    println!(
        "merged {:.6} ({:+.3}% from the optimum {:.6})",
        tour.cost(&inst)?,
        deviation_pct(tour.cost(&inst)?, optimum)?,
        optimum
    );
    for alpha in [0.015, 0.05, 0.15, 0.3, 1.0] {
        let res = solve_large_alpha(&inst, &tour, alpha, &SolveOptions::default())?;
        println!(
            "α = {alpha:<5}  keep ≥ {:>3} of {} edges  cost {:.6} ({:+.3}%)  {:.3}s",
            retain_min(n, alpha),
            2 * n,
            res.cost,
            deviation_pct(res.cost, optimum)?,
            res.stats.wall_time
        );
    }
    Ok(())
}
