//! Benchmark a directory of generated instances against exact references
//! and print the CSV report.
//!
//! ```bash
//! cargo run --release --example bench_report
//! ```

use jra::bench::bench;
use jra::exact::{solve, SolveOptions};
use jra::pipeline::{PipelineConfig, Reference, References};
use jra::Instance;

fn main() -> jra::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut refs = References::new();
    for seed in 0..6 {
        let inst = Instance::generate(30, seed, 1.0)?;
        let name = format!("uniform-30-{seed:02}");
        inst.save(dir.path().join(format!("{name}.json")))?;
        refs.insert(name, Reference::Cost(solve(&inst, &SolveOptions::default())?.cost));
    }

    let report = bench(dir.path(), &PipelineConfig::default(), Some(&refs))?;
    print!("{}", report.to_csv()?);
    Ok(())
}
