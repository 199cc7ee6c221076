//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines always reach the output; exits non-zero when a
//! gating criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_optimum, permutations, random_valid_tour};
use jra::assignment::{hungarian, two_way_assign};
use jra::bench::{bench, instance_files, HEADER};
use jra::exact::{solve, solve_large_alpha, SolveOptions, SolveStatus};
use jra::merging::merge_cycles;
use jra::metrics::{cycle_ratio_stats, deviation_pct, kopt_move_types, CycleSample};
use jra::pipeline::{load_references, run_pipeline, PipelineConfig};
use jra::ppr::{break_tour, recover, reconstruct, solve_reduced};
use jra::render::{render_svg, Style, PALETTE};
use jra::slppr::PolishConfig;
use jra::tour::cycle_path;
use jra::{CostMatrix, Instance, NodeId, Tour};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn exact_oracle() -> Verdict {
    let mut solver_time = Duration::ZERO;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 3..=6 {
        for seed in 0..50 {
            let inst = Instance::generate(n, 10_000 + 100 * n as u64 + seed, 1.0).unwrap();
            let t = Instant::now();
            let res = solve(&inst, &SolveOptions::default()).unwrap();
            solver_time += t.elapsed();
            let want = brute_force_optimum(&inst);
            worst = worst.max((res.cost - want).abs());
            if res.status != SolveStatus::Optimal {
                worst = f64::INFINITY;
            }
            count += 1;
        }
    }
    verdict(
        worst <= 1e-9 && solver_time < Duration::from_secs(60),
        format!(
            "{count} instances, max |exact − brute force| = {worst:.1e}, solver time {:.2}s",
            solver_time.as_secs_f64()
        ),
    )
}

fn kopt_counts() -> Verdict {
    let want: [(usize, u64); 5] = [(2, 2), (3, 8), (4, 48), (5, 384), (10, 185_794_560)];
    let got: Vec<BigUint> = want.iter().map(|&(k, _)| kopt_move_types(k).unwrap()).collect();
    let ok = want.iter().zip(&got).all(|(&(_, w), g)| *g == BigUint::from(w));
    let shown: Vec<String> = got.iter().map(|g| g.to_string()).collect();
    verdict(ok, format!("MT(2,3,4,5,10) = {}", shown.join(", ")))
}

struct Triple {
    inst: Instance,
    tour: Tour,
    selected: BTreeSet<NodeId>,
}

fn ppr_triples() -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|k| {
            let n = rng.gen_range(4..=20);
            let inst = Instance::generate(n, 20_000 + k, 1.0)
                .unwrap()
                .with_fixed_pair(k % 3 != 0);
            let tour = if k % 2 == 0 {
                random_valid_tour(&inst, &mut rng)
            } else {
                merge_cycles(&inst, &two_way_assign(&inst).unwrap()).unwrap().tour
            };
            let size = rng.gen_range(1..=n);
            let selected = inst.node_ids().choose_multiple(&mut rng, size).into_iter().collect();
            Triple { inst, tour, selected }
        })
        .collect()
}

fn ppr_non_worsening(triples: &[Triple]) -> Verdict {
    let mut worse = 0;
    let mut invalid = 0;
    let mut degenerate = 0;
    for t in triples {
        match reconstruct(&t.inst, &t.tour, &t.selected, &SolveOptions::default()) {
            Ok(r) => {
                if r.tour.validate(&t.inst).is_err() {
                    invalid += 1;
                }
                if r.cost_after > t.tour.cost(&t.inst).unwrap() + 1e-9 {
                    worse += 1;
                }
            }
            Err(jra::Error::Degenerate(_)) => degenerate += 1,
            Err(_) => invalid += 1,
        }
    }
    verdict(
        worse == 0 && invalid == 0,
        format!(
            "{} triples: {worse} worsened, {invalid} invalid recoveries, {degenerate} degenerate selections skipped",
            triples.len()
        ),
    )
}

fn reduction_identity(triples: &[Triple]) -> Verdict {
    let mut mismatched = 0;
    let mut checked = 0;
    for t in triples {
        let Ok(rp) = break_tour(&t.inst, &t.tour, &t.selected) else {
            continue;
        };
        let opts = SolveOptions {
            forced_edges: rp.removed_edges.clone(),
            ..Default::default()
        };
        let same = solve_reduced(&t.inst, &rp, &opts)
            .and_then(|sol| recover(&rp, &sol.edges, t.inst.n()))
            .map(|back| back.edge_set() == t.tour.edge_set())
            .unwrap_or(false);
        checked += 1;
        if !same {
            mismatched += 1;
        }
    }
    verdict(mismatched == 0, format!("{checked} reductions, {mismatched} not reproducing the input tour"))
}

fn pipeline_order() -> Verdict {
    let started = Instant::now();
    let cfg = PipelineConfig {
        polish: PolishConfig::default(),
        alpha: 0.15,
        ..Default::default()
    };
    let seeds = 50;
    let mut order_violations = 0;
    let mut exact_hits = 0;
    let mut total_dev = 0.0;
    for seed in 0..seeds {
        let inst = Instance::generate(30, seed, 1.0).unwrap();
        let opt = solve(&inst, &SolveOptions::default()).unwrap();
        let (_, report) = run_pipeline(&inst, &cfg, None).unwrap();
        let cost = |name: &str| report.stage(name).unwrap().cost;
        let chain = [cost("merge"), cost("polish-1"), cost("polish-2"), cost("large-alpha")];
        if !report.complete || chain.windows(2).any(|w| w[1] > w[0] + 1e-9) {
            order_violations += 1;
        }
        let dev = deviation_pct(chain[3], opt.cost).unwrap();
        total_dev += dev;
        if (chain[3] - opt.cost).abs() <= 1e-6 {
            exact_hits += 1;
        }
    }
    let elapsed = started.elapsed();
    let mean = total_dev / seeds as f64;
    let share = exact_hits as f64 / seeds as f64;
    verdict(
        order_violations == 0 && mean <= 0.5 && share >= 0.7 && elapsed < Duration::from_secs(15 * 60),
        format!(
            "{seeds} seeds at n=30: {order_violations} order violations, mean deviation {mean:.3}%, \
             optimal on {exact_hits}/{seeds} ({:.0}%), {:.1}s",
            100.0 * share,
            elapsed.as_secs_f64()
        ),
    )
}

fn large_alpha_limits() -> Verdict {
    let mut alpha_one_misses = 0;
    let mut non_monotone = 0;
    let seeds = 20;
    for seed in 0..seeds {
        let n = 8 + (seed as usize % 5);
        let inst = Instance::generate(n, 30_000 + seed, 1.0).unwrap();
        let opt = solve(&inst, &SolveOptions::default()).unwrap().cost;
        let incumbent = merge_cycles(&inst, &two_way_assign(&inst).unwrap()).unwrap().tour;
        let costs: Vec<f64> = [0.015, 0.05, 0.15, 1.0]
            .iter()
            .map(|&a| solve_large_alpha(&inst, &incumbent, a, &SolveOptions::default()).unwrap().cost)
            .collect();
        if (costs[3] - opt).abs() > 1e-9 {
            alpha_one_misses += 1;
        }
        if costs.windows(2).any(|w| w[1] > w[0] + 1e-9) {
            non_monotone += 1;
        }
    }
    verdict(
        alpha_one_misses == 0 && non_monotone == 0,
        format!("{seeds} seeds, n=8..12: α=1 off the optimum on {alpha_one_misses}, non-monotone in α on {non_monotone}"),
    )
}

fn cycle_statistics() -> Verdict {
    let samples: Vec<CycleSample> = (0..20)
        .map(|seed| CycleSample::measure(&Instance::generate(200, 40_000 + seed, 1.0).unwrap()).unwrap())
        .collect();
    let stats = cycle_ratio_stats(&samples).unwrap();
    verdict(
        (0.13..=0.27).contains(&stats.mean_ratio) && (0.20..=0.45).contains(&stats.mean_node_fraction),
        format!(
            "20 instances at n=200: mean cycles/n {:.3}, mean collected fraction {:.3}",
            stats.mean_ratio, stats.mean_node_fraction
        ),
    )
}

fn hungarian_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let perms = permutations(&(0..7).collect::<Vec<_>>());
    let mut mismatches = 0;
    for _ in 0..100 {
        let m = CostMatrix::from_fn(7, |_, _| rng.gen_range(0..1000) as f64 / 10.0);
        let got = hungarian(&m).unwrap().cost;
        let want = perms
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| m.get(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        if got != want {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!("100 random 7×7 matrices against {} permutations: {mismatches} mismatches", perms.len()),
    )
}

fn dataset_reproduction() -> Verdict {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/reference");
    let refs_path = dir.join("refs.json");
    if !refs_path.exists() {
        return Verdict::Skip(format!("no reference dataset at {}", dir.display()));
    }
    let refs = load_references(&refs_path).unwrap();
    let report = bench(&dir, &PipelineConfig::default(), Some(&refs)).unwrap();
    let devs: Vec<f64> = report
        .rows
        .iter()
        .filter_map(|r| r.large_alpha.and_then(|c| c.deviation))
        .collect();
    if devs.is_empty() {
        return Verdict::Fail("no instance with a reference produced a result".into());
    }
    let mean = devs.iter().sum::<f64>() / devs.len() as f64;
    verdict(
        mean.abs() <= 0.05,
        format!("{} instances, mean final deviation {mean:+.3}%", devs.len()),
    )
}

fn format_stability() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut problems = Vec::new();

    let inst = Instance::generate(25, 5, 1.0).unwrap();
    let path = dir.path().join("inst.json");
    inst.save(&path).unwrap();
    let first = std::fs::read(&path).unwrap();
    Instance::load(&path).unwrap().save(&path).unwrap();
    if std::fs::read(&path).unwrap() != first {
        problems.push("instance JSON");
    }

    let tour = merge_cycles(&inst, &two_way_assign(&inst).unwrap()).unwrap().tour;
    let tpath = dir.path().join("tour.json");
    tour.save(&inst, &tpath).unwrap();
    let first = std::fs::read(&tpath).unwrap();
    Tour::load(&tpath).unwrap().save(&inst, &tpath).unwrap();
    if std::fs::read(&tpath).unwrap() != first {
        problems.push("tour JSON");
    }

    let empty = tempfile::tempdir().unwrap();
    let csv = bench(empty.path(), &PipelineConfig::default(), None).unwrap().to_csv().unwrap();
    let documented = "instance,n,reference,merge,merge_dev,ppr_merge,ppr_merge_dev,polish,polish_dev,\
                      large_alpha,large_alpha_dev,n_d,dt_merge,dt_ppr_merge,dt_polish,dt_large_alpha,status\n";
    if csv != documented || HEADER.join(",") + "\n" != documented || !instance_files(empty.path()).unwrap().is_empty() {
        problems.push("bench CSV header");
    }

    let tours = [
        (tour.clone(), Style::dashed(PALETTE[1])),
        (cycle_path(&tour.edge_set(), inst.n()).unwrap(), Style::solid(PALETTE[0])),
    ];
    if render_svg(&inst, &tours).unwrap() != render_svg(&inst, &tours).unwrap() {
        problems.push("SVG");
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            "instance/tour JSON byte-stable, CSV header fixed, SVG deterministic".into()
        } else {
            format!("unstable: {}", problems.join(", "))
        },
    )
}

fn main() {
    let triples = ppr_triples();
    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(&str, bool, Check)> = vec![
        ("exact-solver oracle equivalence", true, Box::new(exact_oracle)),
        ("k-opt combinatorics", true, Box::new(kopt_counts)),
        ("PPR non-worsening", true, Box::new(|| ppr_non_worsening(&triples))),
        ("reduction identity", true, Box::new(|| reduction_identity(&triples))),
        ("polish monotonicity and pipeline order", true, Box::new(pipeline_order)),
        ("large-α limit behaviour", true, Box::new(large_alpha_limits)),
        ("cycle statistics", true, Box::new(cycle_statistics)),
        ("Hungarian oracle", true, Box::new(hungarian_oracle)),
        ("dataset-conditional reproduction", false, Box::new(dataset_reproduction)),
        ("format stability", true, Box::new(format_stability)),
    ];
    let mut failed = 0;
    for (k, (name, gating, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                if *gating {
                    failed += 1;
                }
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        let note = if *gating { "" } else { " (non-gating)" };
        println!("[{tag}] {:>2}. {name}{note}: {detail}", k + 1);
    }
    if failed > 0 {
        println!("acceptance: {failed} gating criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all gating criteria passed");
}
