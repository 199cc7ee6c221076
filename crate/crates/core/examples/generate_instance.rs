//! Generate a seeded instance, write it as JSON and read it back.
//!
//! ```bash
//! cargo run --example generate_instance -- 12 7
//! ```

use jra::{Instance, Point};

fn main() -> jra::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(12, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(7, |a| a.parse().expect("seed"));

    let inst = Instance::generate(n, seed, 1.0)?;
    println!("{n} pairs on a unit square, seed {seed}");
    if let Some((goal, start)) = inst.fixed_edge() {
        println!("fixed pair: item {goal} – placeholder {start}");
    }
    for k in 0..3.min(n) {
        let (i, p) = (inst.item_id(k), inst.placeholder_id(k));
        println!("  c({i}, {p}) = {:.4}", inst.cost(i, p)?);
    }

    let path = std::env::temp_dir().join(format!("jra-{n}-{seed}.json"));
    inst.save(&path)?;
    let back = Instance::load(&path)?;
    assert_eq!(back.to_json()?, inst.to_json()?);
    println!("round-tripped through {}", path.display());

    // instances can also be built from explicit coordinates
    let square = Instance::from_coords(
        vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)],
        vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
        true,
        1.0,
    )?;
    println!("unit square instance: {} nodes", square.node_count());
    Ok(())
}
