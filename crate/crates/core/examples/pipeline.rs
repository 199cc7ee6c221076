//! The whole workflow on one instance, with and without the merge
//! refinement, against the exact optimum.
//!
//! ```bash
//! cargo run --release --example pipeline -- 35 3
//! ```

use jra::exact::{solve, SolveOptions};
use jra::pipeline::{run_pipeline, PipelineConfig, Reference};
use jra::tour::cycle_path;
use jra::Instance;

fn main() -> jra::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(35, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(3, |a| a.parse().expect("seed"));
    let inst = Instance::generate(n, seed, 1.0)?;

    let opt = solve(&inst, &SolveOptions::default())?;
    let reference = Reference::Tour {
        cost: opt.cost,
        tour: cycle_path(&opt.edges, n)?,
    };

    for use_ppr_merge in [true, false] {
        let cfg = PipelineConfig {
            use_ppr_merge,
            ..Default::default()
        };
        let (_, report) = run_pipeline(&inst, &cfg, Some(&reference))?;
        println!("merge refinement {}:", if use_ppr_merge { "on" } else { "off" });
        for s in &report.stages {
            println!(
                "  {:<12} {:.6}  {:+.3}%  N_d {:>3}  {:.3}s",
                s.name,
                s.cost,
                s.deviation_pct.unwrap(),
                s.n_d.unwrap(),
                s.wall_time
            );
        }
    }
    Ok(())
}
