use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use jra::assignment::two_way_assign;
use jra::bench::bench;
use jra::exact::{export_lp, retain_min, solve, solve_large_alpha, SolveOptions, SolveResult, SolveStatus};
use jra::merging::merge_cycles;
use jra::metrics::{kopt_move_types, large_alpha_neighborhood};
use jra::pipeline::{load_references, run_pipeline, PipelineConfig};
use jra::ppr::refine_merge;
use jra::render::{save_svg, Style, PALETTE};
use jra::slppr::{polish, PolishConfig};
use jra::tour::cycle_path;
use jra::{Error, Instance, Tour};

const EXIT_INVALID: u8 = 2;
const EXIT_TIME_LIMIT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "jra", version, about = "Joint routing-assignment solver")]
struct Cli {
    /// Log verbosity: -v info, -vv debug.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolishArgs {
    /// Polishing circle radius.
    #[arg(long, default_value_t = 0.2)]
    radius: f64,
    /// Items between consecutive circle centers.
    #[arg(long, default_value_t = 3)]
    nstp: usize,
    #[arg(long, default_value_t = 2)]
    passes: usize,
}

impl PolishArgs {
    fn config(&self) -> PolishConfig {
        PolishConfig {
            radius: self.radius,
            step: self.nstp,
            passes: self.passes,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a uniform random instance.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        area: f64,
        /// Drop the fixed start/goal pair.
        #[arg(long)]
        no_fixed_pair: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance to optimality (or until the time limit).
    SolveExact {
        instance: PathBuf,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Warm-start tour.
        #[arg(long)]
        warm: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-way assignment followed by greedy cycle merging.
    Merge {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge, then reconstruct around the merged nodes.
    PprMerge {
        instance: PathBuf,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Polish a tour with circles walked along it.
    Polish {
        instance: PathBuf,
        tour: PathBuf,
        #[command(flatten)]
        polish: PolishArgs,
        /// Seconds per circle.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Write per-circle statistics as JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-optimize a tour keeping at least ⌈2n(1−α)⌉ of its edges.
    LargeAlpha {
        instance: PathBuf,
        tour: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        alpha: f64,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write a JSON report.
    Pipeline {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        alpha: f64,
        #[command(flatten)]
        polish: PolishArgs,
        /// Seconds for the merge refinement and the large-α solve.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        no_ppr_merge: bool,
        /// Reference costs: JSON object keyed by instance file stem.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Final tour output.
        #[arg(long)]
        tour_out: Option<PathBuf>,
        /// Report output.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pipeline on every instance file in a directory; CSV report.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        alpha: f64,
        #[command(flatten)]
        polish: PolishArgs,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        no_ppr_merge: bool,
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw an instance and one or more tours as SVG.
    Render {
        instance: PathBuf,
        tours: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the model in LP format.
    ExportLp {
        instance: PathBuf,
        /// Add the large-α retain row for this incumbent.
        #[arg(long)]
        tour: Option<PathBuf>,
        #[arg(long, default_value_t = 0.15)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print k-opt move-type counts and the large-α neighbourhood size.
    AnalyzeKopt {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.15)]
        alpha: f64,
        /// Largest k to tabulate.
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    TimeLimit,
}

fn seconds(s: Option<f64>) -> Result<Option<Duration>, Error> {
    s.map(|v| Duration::try_from_secs_f64(v).map_err(|_| Error::Domain(format!("invalid time limit {v}"))))
        .transpose()
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn save_result(inst: &Instance, res: &SolveResult, out: &Path) -> Result<Outcome, Error> {
    match res.status {
        SolveStatus::Infeasible if res.stats.timed_out => Ok(Outcome::TimeLimit),
        SolveStatus::Infeasible => Err(Error::Infeasible("no feasible tour".into())),
        status => {
            let tour = cycle_path(&res.edges, inst.n())?;
            tour.save(inst, out)?;
            println!("cost {:.6} status {status:?}", res.cost);
            Ok(if status == SolveStatus::Optimal {
                Outcome::Done
            } else {
                Outcome::TimeLimit
            })
        }
    }
}

fn pipeline_config(alpha: f64, polish: &PolishArgs, time_limit: Option<f64>, no_ppr_merge: bool) -> Result<PipelineConfig, Error> {
    Ok(PipelineConfig {
        polish: polish.config(),
        alpha,
        use_ppr_merge: !no_ppr_merge,
        time_limit: seconds(time_limit)?,
        circle_time_limit: None,
    })
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Generate {
            n,
            seed,
            area,
            no_fixed_pair,
            out,
        } => {
            let inst = Instance::generate(n, seed, area)?.with_fixed_pair(!no_fixed_pair);
            inst.save(&out)?;
        }
        Command::SolveExact {
            instance,
            time_limit,
            warm,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let opts = SolveOptions {
                time_limit: seconds(time_limit)?,
                warm_start: warm.map(Tour::load).transpose()?,
                ..Default::default()
            };
            return save_result(&inst, &solve(&inst, &opts)?, &out);
        }
        Command::Merge { instance, out } => {
            let inst = Instance::load(&instance)?;
            let cycles = two_way_assign(&inst)?;
            let merged = merge_cycles(&inst, &cycles)?;
            merged.tour.save(&inst, &out)?;
            println!(
                "cycles {} collected {} cost {:.6}",
                cycles.len(),
                merged.collector.len(),
                merged.tour.cost(&inst)?
            );
        }
        Command::PprMerge {
            instance,
            time_limit,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let merged = merge_cycles(&inst, &two_way_assign(&inst)?)?;
            let opts = SolveOptions {
                time_limit: seconds(time_limit)?,
                ..Default::default()
            };
            let r = refine_merge(&inst, &merged.tour, &merged.collector, &opts)?;
            r.tour.save(&inst, &out)?;
            println!("merge {:.6} ppr-merge {:.6}", r.cost_before, r.cost_after);
            if r.timed_out {
                return Ok(Outcome::TimeLimit);
            }
        }
        Command::Polish {
            instance,
            tour,
            polish: args,
            time_limit,
            stats,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let t = Tour::load(&tour)?;
            let opts = SolveOptions {
                time_limit: seconds(time_limit)?,
                ..Default::default()
            };
            let (t, st) = polish(&inst, &t, &args.config(), &opts)?;
            t.save(&inst, &out)?;
            if let Some(path) = stats {
                write(&path, &(st.to_json()? + "\n"))?;
            }
            println!("initial {:.6} final {:.6}", st.initial_cost, st.final_cost());
            if st.timed_out {
                return Ok(Outcome::TimeLimit);
            }
        }
        Command::LargeAlpha {
            instance,
            tour,
            alpha,
            time_limit,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let t = Tour::load(&tour)?;
            let opts = SolveOptions {
                time_limit: seconds(time_limit)?,
                ..Default::default()
            };
            return save_result(&inst, &solve_large_alpha(&inst, &t, alpha, &opts)?, &out);
        }
        Command::Pipeline {
            instance,
            alpha,
            polish,
            time_limit,
            no_ppr_merge,
            reference,
            tour_out,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let cfg = pipeline_config(alpha, &polish, time_limit, no_ppr_merge)?;
            let refs = reference.map(load_references).transpose()?;
            let name = instance
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let (tour, report) = run_pipeline(&inst, &cfg, refs.as_ref().and_then(|r| r.get(&name)))?;
            write(&out, &(report.to_json()? + "\n"))?;
            if let Some(path) = tour_out {
                tour.save(&inst, path)?;
            }
            for s in &report.stages {
                println!("{:<12} {:.6}", s.name, s.cost);
            }
            if let Some(e) = report.error {
                return Err(Error::Internal(e));
            }
            if report.stages.iter().any(|s| s.timed_out) {
                return Ok(Outcome::TimeLimit);
            }
        }
        Command::Bench {
            dir,
            alpha,
            polish,
            time_limit,
            no_ppr_merge,
            reference,
            out,
        } => {
            let cfg = pipeline_config(alpha, &polish, time_limit, no_ppr_merge)?;
            let refs = reference.map(load_references).transpose()?;
            let report = bench(&dir, &cfg, refs.as_ref())?;
            write(&out, &report.to_csv()?)?;
            println!("{} instance(s)", report.rows.len());
        }
        Command::Render { instance, tours, out } => {
            let inst = Instance::load(&instance)?;
            let tours = tours
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let style = if k == 0 {
                        Style::solid(PALETTE[0])
                    } else {
                        Style::dashed(PALETTE[k % PALETTE.len()])
                    };
                    Tour::load(p).map(|t| (t, style))
                })
                .collect::<Result<Vec<_>, _>>()?;
            save_svg(&inst, &tours, &out)?;
        }
        Command::ExportLp {
            instance,
            tour,
            alpha,
            out,
        } => {
            let inst = Instance::load(&instance)?;
            let mut opts = SolveOptions::default();
            if let Some(path) = tour {
                let t = Tour::load(path)?;
                t.validate(&inst)?;
                opts.retain_set = Some(t.edge_set());
                opts.retain_min = Some(retain_min(inst.n(), alpha));
            }
            export_lp(&inst, &opts, &out)?;
        }
        Command::AnalyzeKopt { n, alpha, k_max, out } => {
            let mut text = String::from("k,MT(k)\n");
            for k in 2..=k_max.max(2) {
                text += &format!("{k},{}\n", kopt_move_types(k)?);
            }
            let size = large_alpha_neighborhood(n, alpha)?;
            text += &format!("N_total(n={n}, alpha={alpha}) = {size} (log10 {:.3})\n", size.log10());
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => LevelFilter::Warn,
            1 => LevelFilter::Info,
            _ => LevelFilter::Debug,
        })
        .init();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::TimeLimit) => {
            eprintln!("time limit reached before optimality was proven");
            ExitCode::from(EXIT_TIME_LIMIT)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Internal(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            })
        }
    }
}
