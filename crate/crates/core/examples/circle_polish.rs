//! Polish a merged tour with circles stepped along it, then with a few
//! hand-placed circles.
//!
//! ```bash
//! cargo run --release --example circle_polish -- 150
//! ```

use jra::assignment::two_way_assign;
use jra::exact::SolveOptions;
use jra::merging::merge_cycles;
use jra::slppr::{adaptive_radius, polish, step_length, PolishConfig};
use jra::{Instance, Point};

fn main() -> jra::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(150, |a| a.parse().expect("n"));
    let inst = Instance::generate(n, 4, 1.0)?;
    let start = merge_cycles(&inst, &two_way_assign(&inst)?)?.tour;

    let r = adaptive_radius(n, inst.area(), 12.0)?;
    println!(
        "a circle holding ~12 items has radius {r:.4}; with κ = 1 the step is {}",
        step_length(r, n, inst.area(), 1.0)?
    );

    let cfg = PolishConfig {
        target_nodes: Some(12.0),
        ..Default::default()
    };
    let (tour, stats) = polish(&inst, &start, &cfg, &SolveOptions::default())?;
    let improving = stats.circles.iter().filter(|c| c.delta < 0.0).count();
    println!(
        "{} circles ({} improving, {} skipped): {:.6} -> {:?}",
        stats.circles.len(),
        improving,
        stats.circles.iter().filter(|c| c.skipped).count(),
        stats.initial_cost,
        stats.pass_costs
    );

    let five = PolishConfig {
        radius: 0.2,
        passes: 1,
        centers: Some(vec![
            Point::new(0.25, 0.25),
            Point::new(0.75, 0.25),
            Point::new(0.5, 0.5),
            Point::new(0.25, 0.75),
            Point::new(0.75, 0.75),
        ]),
        ..Default::default()
    };
    let (_, stats) = polish(&inst, &tour, &five, &SolveOptions::default())?;
    for c in &stats.circles {
        println!(
            "  circle at ({:.2}, {:.2}): {} nodes, delta {:+.6}, {:.3}s",
            c.center.x, c.center.y, c.selected, c.delta, c.time
        );
    }
    let path = std::env::temp_dir().join("jra-polish-stats.json");
    std::fs::write(&path, stats.to_json()?).expect("write stats");
    println!("per-circle statistics in {}", path.display());
    Ok(())
}
