//! Write the model, with a large-α retain row, for an external MIP solver.
//!
//! ```bash
//! cargo run --example export_lp -- model.lp
//! ```

use jra::assignment::two_way_assign;
use jra::exact::{export_lp, retain_min, SolveOptions};
use jra::merging::merge_cycles;
use jra::Instance;

fn main() -> jra::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("jra-model.lp"), Into::into);
    let inst = Instance::generate(10, 0, 1.0)?;
    let incumbent = merge_cycles(&inst, &two_way_assign(&inst)?)?.tour;
    let opts = SolveOptions {
        retain_set: Some(incumbent.edge_set()),
        retain_min: Some(retain_min(inst.n(), 0.15)),
        ..Default::default()
    };
    export_lp(&inst, &opts, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
