//! Spatially localized reconstruction: free every node inside a circle, run
//! partial path reconstruction on that set, and step the circle along the
//! tour.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::SolveOptions;
use crate::instance::{Instance, NodeId, Point};
use crate::ppr::reconstruct;
use crate::tour::{Tour, COST_EPS};

/// Per-circle solver budget when the caller sets none.
pub const DEFAULT_CIRCLE_LIMIT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolishConfig {
    pub radius: f64,
    pub step: usize,
    pub passes: usize,
    /// Expected number of items per circle; replaces `radius` when set.
    pub target_nodes: Option<f64>,
    /// Radius scale for unit area, `r = σ·√(S/n)`; replaces `radius` when set.
    pub sigma: Option<f64>,
    /// Step scale; when set the step is derived from the radius.
    pub kappa: Option<f64>,
    pub eta: usize,
    /// Explicit circle centers; the tour walk is skipped when set.
    pub centers: Option<Vec<Point>>,
}

impl Default for PolishConfig {
    fn default() -> Self {
        Self {
            radius: 0.2,
            step: 3,
            passes: 2,
            target_nodes: None,
            sigma: None,
            kappa: None,
            eta: 3,
            centers: None,
        }
    }
}

impl PolishConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {}", self.radius)));
        }
        if self.step == 0 || self.passes == 0 || self.eta == 0 {
            return Err(Error::Domain("step, passes and eta must be at least 1".into()));
        }
        Ok(())
    }

    /// Radius actually used on `inst`.
    pub fn effective_radius(&self, inst: &Instance) -> Result<f64> {
        if let Some(n_in) = self.target_nodes {
            return adaptive_radius(inst.n(), inst.area(), n_in);
        }
        if let Some(sigma) = self.sigma {
            if !(sigma > 0.0) {
                return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
            }
            return Ok(sigma * (inst.area() / inst.n() as f64).sqrt());
        }
        Ok(self.radius)
    }

    /// Step actually used on `inst`.
    pub fn effective_step(&self, inst: &Instance) -> Result<usize> {
        match self.kappa {
            Some(kappa) => step_length(self.effective_radius(inst)?, inst.n(), inst.area(), kappa),
            None => Ok(self.step),
        }
    }
}

/// All nodes within `radius` of `center`, boundary included.
pub fn select_in_circle(inst: &Instance, center: Point, radius: f64) -> BTreeSet<NodeId> {
    inst.node_ids()
        .filter(|&v| inst.coord(v).distance(&center) <= radius)
        .collect()
}

/// Expected item count inside a circle of radius `r`: `π r² n / S`.
pub fn expected_count(n: usize, area: f64, r: f64) -> f64 {
    PI * r * r * n as f64 / area
}

/// Radius whose circle holds `n_in` items on average: `√(n_in·S / (π n))`.
pub fn adaptive_radius(n: usize, area: f64, n_in: f64) -> Result<f64> {
    if n == 0 || !(area > 0.0) || !(n_in > 0.0) {
        return Err(Error::Domain(format!(
            "adaptive radius needs positive inputs, got n={n}, S={area}, n_in={n_in}"
        )));
    }
    Ok((n_in * area / (PI * n as f64)).sqrt())
}

/// Step between circle centers, `round(2κ·r / d_s)` with `d_s = √(S/n)`, at least 1.
pub fn step_length(radius: f64, n: usize, area: f64, kappa: f64) -> Result<usize> {
    if n == 0 || !(radius > 0.0) || !(area > 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain(format!(
            "step length needs positive inputs, got r={radius}, n={n}, S={area}, κ={kappa}"
        )));
    }
    let spacing = (area / n as f64).sqrt();
    Ok(((2.0 * kappa * radius / spacing).round() as usize).max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleStat {
    pub pass: usize,
    pub center: Point,
    pub selected: usize,
    pub reduced_pairs: usize,
    /// Cost change from this circle (≤ 0).
    pub delta: f64,
    pub time: f64,
    pub skipped: bool,
    pub timed_out: bool,
    pub branch_nodes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolishStats {
    pub radius: f64,
    pub step: usize,
    pub initial_cost: f64,
    /// Tour cost after each pass.
    pub pass_costs: Vec<f64>,
    pub circles: Vec<CircleStat>,
    pub timed_out: bool,
}

impl PolishStats {
    pub fn final_cost(&self) -> f64 {
        self.pass_costs.last().copied().unwrap_or(self.initial_cost)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Item `offset` positions after `anchor` along the tour's item order.
fn item_along(t: &Tour, anchor: NodeId, offset: usize) -> NodeId {
    let start = t
        .items
        .iter()
        .position(|&v| v == anchor)
        .expect("anchor item is on the tour");
    t.items[(start + offset) % t.items.len()]
}

/// Polishes `t` with circles walked along the tour, or at `cfg.centers`.
///
/// Each pass starts at item `n` when the fixed pair is enabled and at item 1
/// otherwise, placing a circle on every `step`-th item of the current tour.
/// Every circle sees the latest tour. Circles selecting fewer than two nodes
/// are skipped.
pub fn polish(inst: &Instance, t: &Tour, cfg: &PolishConfig, opts: &SolveOptions) -> Result<(Tour, PolishStats)> {
    cfg.validate()?;
    let radius = cfg.effective_radius(inst)?;
    let step = cfg.effective_step(inst)?;
    let n = inst.n();
    let anchor = if inst.fixed_pair() {
        inst.item_id(n - 1)
    } else {
        inst.item_id(0)
    };
    let circle_opts = SolveOptions {
        time_limit: Some(opts.time_limit.unwrap_or(DEFAULT_CIRCLE_LIMIT)),
        ..opts.clone()
    };

    let mut tour = t.clone();
    let mut cost = tour.cost(inst)?;
    let mut stats = PolishStats {
        radius,
        step,
        initial_cost: cost,
        ..Default::default()
    };
    for pass in 1..=cfg.passes {
        let walk = match &cfg.centers {
            Some(c) => c.len(),
            None => n.div_ceil(step),
        };
        for k in 0..walk {
            let center = match &cfg.centers {
                Some(c) => c[k],
                None => inst.coord(item_along(&tour, anchor, k * step)),
            };
            let started = Instant::now();
            let selected = select_in_circle(inst, center, radius);
            let mut stat = CircleStat {
                pass,
                center,
                selected: selected.len(),
                reduced_pairs: 0,
                delta: 0.0,
                time: 0.0,
                skipped: selected.len() < 2,
                timed_out: false,
                branch_nodes: 0,
            };
            if !stat.skipped {
                match reconstruct(inst, &tour, &selected, &circle_opts) {
                    Ok(r) => {
                        stat.reduced_pairs = r.reduced_pairs;
                        stat.timed_out = r.timed_out;
                        stat.branch_nodes = r.stats.branch_nodes;
                        if r.cost_after < cost - COST_EPS {
                            stat.delta = r.cost_after - cost;
                            tour = r.tour;
                            cost = r.cost_after;
                        }
                    }
                    Err(Error::Degenerate(msg)) => {
                        debug!("circle {k} skipped: {msg}");
                        stat.skipped = true;
                    }
                    Err(e) => return Err(e),
                }
            }
            stat.time = started.elapsed().as_secs_f64();
            stats.timed_out |= stat.timed_out;
            stats.circles.push(stat);
        }
        info!("polish pass {pass}: cost {cost:.6}");
        stats.pass_costs.push(cost);
    }
    Ok((tour, stats))
}
