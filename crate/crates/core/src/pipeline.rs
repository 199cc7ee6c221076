//! The staged workflow: two-way assignment and merging, optional merge
//! refinement, polishing passes, and a final large-α solve.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::assignment::two_way_assign;
use crate::error::{Error, Result};
use crate::exact::{solve_large_alpha, SolveOptions, SolveStatus};
use crate::instance::Instance;
use crate::merging::merge_cycles;
use crate::metrics::deviation_pct;
use crate::ppr::refine_merge;
use crate::slppr::{polish, PolishConfig};
use crate::tour::{cycle_path, edge_difference, Tour};

/// A reference solution: the cost, and the tour when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reference {
    Cost(f64),
    Tour {
        cost: f64,
        #[serde(flatten)]
        tour: Tour,
    },
}

impl Reference {
    pub fn cost(&self) -> f64 {
        match self {
            Reference::Cost(c) | Reference::Tour { cost: c, .. } => *c,
        }
    }

    pub fn tour(&self) -> Option<&Tour> {
        match self {
            Reference::Cost(_) => None,
            Reference::Tour { tour, .. } => Some(tour),
        }
    }
}

/// Reference solutions keyed by instance name (file stem).
pub type References = BTreeMap<String, Reference>;

pub fn load_references(path: impl AsRef<Path>) -> Result<References> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let refs: References = serde_json::from_str(&text)?;
    if let Some((name, _)) = refs.iter().find(|(_, r)| !(r.cost() > 0.0)) {
        return Err(Error::schema("cost", format!("reference cost for {name} must be positive")));
    }
    Ok(refs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub polish: PolishConfig,
    pub alpha: f64,
    pub use_ppr_merge: bool,
    /// Budget for the merge refinement and the large-α solve.
    pub time_limit: Option<Duration>,
    /// Budget per polishing circle.
    pub circle_time_limit: Option<Duration>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            polish: PolishConfig::default(),
            alpha: 0.15,
            use_ppr_merge: true,
            time_limit: None,
            circle_time_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub cost: f64,
    pub deviation_pct: Option<f64>,
    pub wall_time: f64,
    pub n_d: Option<usize>,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub n: usize,
    pub area: f64,
    pub fixed_pair: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub instance: InstanceMeta,
    pub config: PipelineConfig,
    pub reference_cost: Option<f64>,
    pub stages: Vec<StageReport>,
    pub complete: bool,
    pub error: Option<String>,
}

impl PipelineReport {
    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn final_cost(&self) -> Option<f64> {
        self.stages.last().map(|s| s.cost)
    }

    pub fn timed_out(&self) -> bool {
        self.stages.iter().any(|s| s.timed_out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Recorder<'a> {
    inst: &'a Instance,
    reference: Option<&'a Reference>,
    stages: Vec<StageReport>,
}

impl Recorder<'_> {
    fn record(&mut self, name: String, tour: &Tour, started: Instant, timed_out: bool) -> Result<()> {
        let cost = tour.cost(self.inst)?;
        let stage = StageReport {
            deviation_pct: self.reference.map(|r| deviation_pct(cost, r.cost())).transpose()?,
            n_d: self
                .reference
                .and_then(Reference::tour)
                .map(|r| edge_difference(&tour.edge_set(), &r.edge_set())),
            name,
            cost,
            wall_time: started.elapsed().as_secs_f64(),
            timed_out,
        };
        info!("{}: {:.6} ({:.3}s)", stage.name, stage.cost, stage.wall_time);
        self.stages.push(stage);
        Ok(())
    }
}

/// Runs every stage. Fails only if no tour could be built at all; a later
/// stage failure returns the last valid tour with an incomplete report.
pub fn run_pipeline(
    inst: &Instance,
    cfg: &PipelineConfig,
    reference: Option<&Reference>,
) -> Result<(Tour, PipelineReport)> {
    if let Some(t) = reference.and_then(Reference::tour) {
        t.validate(inst)?;
    }
    let mut rec = Recorder {
        inst,
        reference,
        stages: Vec::new(),
    };

    let started = Instant::now();
    let merged = merge_cycles(inst, &two_way_assign(inst)?)?;
    let mut tour = merged.tour;
    rec.record("merge".into(), &tour, started, false)?;

    let outcome = (|| -> Result<()> {
        let opts = SolveOptions {
            time_limit: cfg.time_limit,
            ..Default::default()
        };
        if cfg.use_ppr_merge {
            let started = Instant::now();
            let r = refine_merge(inst, &tour, &merged.collector, &opts)?;
            tour = r.tour;
            rec.record("ppr-merge".into(), &tour, started, r.timed_out)?;
        }
        let circle_opts = SolveOptions {
            time_limit: cfg.circle_time_limit,
            ..Default::default()
        };
        let one_pass = PolishConfig {
            passes: 1,
            ..cfg.polish.clone()
        };
        for pass in 1..=cfg.polish.passes {
            let started = Instant::now();
            let (t, stats) = polish(inst, &tour, &one_pass, &circle_opts)?;
            tour = t;
            rec.record(format!("polish-{pass}"), &tour, started, stats.timed_out)?;
        }
        let started = Instant::now();
        let res = solve_large_alpha(inst, &tour, cfg.alpha, &opts)?;
        if res.status == SolveStatus::Infeasible {
            return Err(Error::Internal("large-α solve lost its warm start".into()));
        }
        let candidate = cycle_path(&res.edges, inst.n())?;
        if candidate.cost(inst)? <= tour.cost(inst)? {
            tour = candidate;
        }
        rec.record("large-alpha".into(), &tour, started, res.status == SolveStatus::FeasibleTimeLimit)?;
        Ok(())
    })();

    let error = outcome.err().map(|e| {
        warn!("pipeline stopped early: {e}");
        e.to_string()
    });
    let report = PipelineReport {
        instance: InstanceMeta {
            n: inst.n(),
            area: inst.area(),
            fixed_pair: inst.fixed_pair(),
        },
        config: cfg.clone(),
        reference_cost: reference.map(Reference::cost),
        stages: rec.stages,
        complete: error.is_none(),
        error,
    };
    Ok((tour, report))
}
