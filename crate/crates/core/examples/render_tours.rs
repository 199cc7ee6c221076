//! Draw the merged initial tour (dashed red) under the final tour.
//!
//! ```bash
//! cargo run --release --example render_tours -- tours.svg
//! ```

use jra::assignment::two_way_assign;
use jra::merging::merge_cycles;
use jra::pipeline::{run_pipeline, PipelineConfig};
use jra::render::{save_svg, Style, PALETTE};
use jra::Instance;

fn main() -> jra::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("jra-tours.svg"), Into::into);
    let inst = Instance::generate(80, 12, 1.0)?;
    let merged = merge_cycles(&inst, &two_way_assign(&inst)?)?.tour;
    let (last, _) = run_pipeline(&inst, &PipelineConfig::default(), None)?;
    save_svg(
        &inst,
        &[(last, Style::solid(PALETTE[0])), (merged, Style::dashed(PALETTE[1]))],
        &out,
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
