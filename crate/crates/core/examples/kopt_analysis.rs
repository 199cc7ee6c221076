//! How fast the k-opt move space and the large-α neighbourhood grow.
//!
//! ```bash
//! cargo run --example kopt_analysis
//! ```

use jra::metrics::{kopt_move_types, large_alpha_neighborhood};

fn main() -> jra::Result<()> {
    for k in [2, 3, 4, 5, 10, 20, 50] {
        let mt = kopt_move_types(k)?;
        let digits = mt.to_string().len();
        println!("MT({k:>2}) = {mt} ({digits} digits)");
    }
    println!();
    for (n, alpha) in [(2, 1.0), (10, 0.15), (30, 0.15), (300, 0.015), (300, 0.15), (1000, 0.15)] {
        let size = large_alpha_neighborhood(n, alpha)?;
        println!("n = {n:>4}, α = {alpha:<5}: {size}");
    }
    Ok(())
}
