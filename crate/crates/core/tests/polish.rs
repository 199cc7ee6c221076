mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_valid_tour;
use jra::assignment::two_way_assign;
use jra::exact::SolveOptions;
use jra::merging::merge_cycles;
use jra::pipeline::{run_pipeline, PipelineConfig};
use jra::slppr::{polish, PolishConfig};
use jra::Instance;

#[test]
fn polish_never_worsens_and_is_monotone_per_circle() {
    for seed in 0..50 {
        let inst = Instance::generate(40, 900 + seed, 1.0).unwrap();
        let start = merge_cycles(&inst, &two_way_assign(&inst).unwrap()).unwrap().tour;
        let before = start.cost(&inst).unwrap();
        let (out, stats) = polish(&inst, &start, &PolishConfig::default(), &SolveOptions::default()).unwrap();
        out.validate(&inst).unwrap();
        let after = out.cost(&inst).unwrap();
        assert!(after <= before + 1e-9, "seed {seed}");
        assert!(stats.circles.iter().all(|c| c.delta <= 0.0));
        assert_eq!(stats.pass_costs.len(), 2);
        assert!(stats.pass_costs[1] <= stats.pass_costs[0] + 1e-9);
        let summed = before + stats.circles.iter().map(|c| c.delta).sum::<f64>();
        assert!((summed - after).abs() < 1e-9);
    }
}

#[test]
fn polish_repairs_random_tours() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = Instance::generate(25, 3, 1.0).unwrap();
    let start = random_valid_tour(&inst, &mut rng);
    let (out, stats) = polish(&inst, &start, &PolishConfig::default(), &SolveOptions::default()).unwrap();
    assert!(out.cost(&inst).unwrap() < 0.5 * start.cost(&inst).unwrap());
    let json: serde_json::Value = serde_json::from_str(&stats.to_json().unwrap()).unwrap();
    let circle = &json["circles"][0];
    for key in ["center", "selected", "delta", "time"] {
        assert!(!circle[key].is_null(), "missing {key}");
    }
}

/// Diminishing returns across passes and agreement with and without the
/// merge refinement, reported rather than asserted.
#[test]
fn pass_statistics() {
    let seeds = 20;
    let (mut diminishing, mut same_final) = (0, 0);
    for seed in 0..seeds {
        let inst = Instance::generate(30, 700 + seed, 1.0).unwrap();
        let start = merge_cycles(&inst, &two_way_assign(&inst).unwrap()).unwrap().tour;
        let cfg = PolishConfig {
            passes: 3,
            ..Default::default()
        };
        let (_, stats) = polish(&inst, &start, &cfg, &SolveOptions::default()).unwrap();
        let c = &stats.pass_costs;
        if c[1] - c[2] <= c[0] - c[1] + 1e-12 {
            diminishing += 1;
        }

        let polish_only = |use_ppr_merge| {
            let cfg = PipelineConfig {
                use_ppr_merge,
                ..Default::default()
            };
            run_pipeline(&inst, &cfg, None).unwrap().1.stage("polish-2").unwrap().cost
        };
        if (polish_only(true) - polish_only(false)).abs() < 1e-6 {
            same_final += 1;
        }
    }
    println!("pass 3 gains no more than pass 2 on {diminishing}/{seeds} seeds");
    println!("polished cost identical with and without merge refinement on {same_final}/{seeds} seeds");
}
