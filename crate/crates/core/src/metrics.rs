//! Deviation, neighbourhood-size and cycle statistics.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::assignment::two_way_assign;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::merging::merge_cycles;

/// Exact summation limit for the neighbourhood size.
pub const EXACT_TERMS: usize = 64;

/// `100·(candidate − reference)/reference`.
pub fn deviation_pct(candidate: f64, reference: f64) -> Result<f64> {
    if !(reference > 0.0) {
        return Err(Error::Domain(format!("reference cost must be positive, got {reference}")));
    }
    Ok(100.0 * (candidate - reference) / reference)
}

/// Deviation rounded to three decimals, as printed in reports.
pub fn deviation_report(candidate: f64, reference: f64) -> Result<f64> {
    Ok((deviation_pct(candidate, reference)? * 1000.0).round() / 1000.0)
}

/// `(+X.XXX%)`.
pub fn format_deviation(pct: f64) -> String {
    let pct = if pct.abs() < 5e-4 { 0.0 } else { pct };
    format!("({pct:+.3}%)")
}

/// Number of k-opt reconnection types, `2^{k−1}·(k−1)!`.
pub fn kopt_move_types(k: usize) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    let mut mt = BigUint::from(2u32);
    for j in 3..=k {
        mt *= 2u32 * (j as u32 - 1);
    }
    Ok(mt)
}

/// Size of the neighbourhood reachable by exchanging up to `2nα` edges.
#[derive(Debug, Clone, PartialEq)]
pub enum Neighborhood {
    Exact(BigUint),
    /// Base-10 logarithm of an estimate.
    Log10(f64),
}

impl Neighborhood {
    pub fn log10(&self) -> f64 {
        match self {
            Neighborhood::Exact(v) if v.is_zero() => f64::NEG_INFINITY,
            Neighborhood::Exact(v) => big_log10(v),
            Neighborhood::Log10(l) => *l,
        }
    }
}

impl std::fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Neighborhood::Exact(v) => write!(f, "{v}"),
            Neighborhood::Log10(l) => write!(f, "~1e{l:.2}"),
        }
    }
}

fn big_log10(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap().log10();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap();
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut c = BigUint::one();
    for j in 0..k {
        c = c * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    c
}

/// `Σ_{k=2}^{⌊2nα⌋} C(2n,k)·MT(k)`, exact while `2nα ≤ 64`. Beyond that the
/// base-10 magnitude with `C(2n,k) ≈ (2n)^k/k!`, i.e. terms `(4n)^k/(2k)`.
pub fn large_alpha_neighborhood(n: usize, alpha: f64) -> Result<Neighborhood> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let k_max = ((2.0 * n as f64 * alpha) + 1e-9).floor() as usize;
    if k_max <= EXACT_TERMS {
        let mut total = BigUint::zero();
        let mut mt = BigUint::from(2u32);
        for k in 2..=k_max {
            if k > 2 {
                mt *= 2u32 * (k as u32 - 1);
            }
            total += binomial(2 * n, k) * &mt;
        }
        return Ok(Neighborhood::Exact(total));
    }
    let log_term = |k: usize| k as f64 * (4.0 * n as f64).log10() - (2.0 * k as f64).log10();
    let peak = (2..=k_max).map(log_term).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = (2..=k_max).map(|k| 10f64.powf(log_term(k) - peak)).sum();
    Ok(Neighborhood::Log10(peak + sum.log10()))
}

/// Cycle count and merge footprint of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSample {
    pub n: usize,
    pub cycles: usize,
    pub collected: usize,
}

impl CycleSample {
    pub fn measure(inst: &Instance) -> Result<Self> {
        let cycles = two_way_assign(inst)?;
        let merged = merge_cycles(inst, &cycles)?;
        Ok(Self {
            n: inst.n(),
            cycles: cycles.len(),
            collected: merged.collector.len(),
        })
    }

    pub fn ratio(&self) -> f64 {
        self.cycles as f64 / self.n as f64
    }

    /// Collected nodes over `2n + 2`.
    pub fn node_fraction(&self) -> f64 {
        self.collected as f64 / (2 * self.n + 2) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRatioStats {
    pub mean_ratio: f64,
    pub mean_node_fraction: f64,
}

pub fn cycle_ratio_stats(samples: &[CycleSample]) -> Result<CycleRatioStats> {
    if samples.is_empty() {
        return Err(Error::Domain("no cycle samples".into()));
    }
    let m = samples.len() as f64;
    Ok(CycleRatioStats {
        mean_ratio: samples.iter().map(CycleSample::ratio).sum::<f64>() / m,
        mean_node_fraction: samples.iter().map(CycleSample::node_fraction).sum::<f64>() / m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_deviations() {
        assert_eq!(deviation_report(42.4578, 42.0017).unwrap(), 1.086);
        assert_eq!(deviation_report(41.5209, 41.4737).unwrap(), 0.114);
        assert_eq!(deviation_report(7.0, 7.0).unwrap(), 0.0);
        assert_eq!(format_deviation(1.086), "(+1.086%)");
        assert_eq!(format_deviation(-0.0001), "(+0.000%)");
        assert!(deviation_pct(1.0, 0.0).is_err());
        let (a, b) = (3.7, 2.9);
        let lhs = deviation_pct(a, b).unwrap();
        let rhs = -deviation_pct(b, a).unwrap() * a / b;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn move_types() {
        let mt = |k| kopt_move_types(k).unwrap();
        assert_eq!(mt(2), BigUint::from(2u32));
        assert_eq!(mt(3), BigUint::from(8u32));
        assert_eq!(mt(4), BigUint::from(48u32));
        assert_eq!(mt(5), BigUint::from(384u32));
        assert_eq!(mt(6), BigUint::from(3840u32));
        assert_eq!(mt(10), BigUint::from(185_794_560u64));
        for k in 3..40 {
            assert_eq!(mt(k), mt(k - 1) * BigUint::from(2 * (k - 1)));
        }
        let l = big_log10(&mt(50));
        assert!((l - 77.53).abs() < 0.01, "{l}");
        assert!(kopt_move_types(1).is_err());
    }

    #[test]
    fn neighborhood_sizes() {
        assert_eq!(large_alpha_neighborhood(2, 1.0).unwrap(), Neighborhood::Exact(BigUint::from(92u32)));
        assert_eq!(large_alpha_neighborhood(10, 0.04).unwrap(), Neighborhood::Exact(BigUint::zero()));
        let big = large_alpha_neighborhood(300, 0.15).unwrap();
        let Neighborhood::Log10(l) = big else { panic!("expected a magnitude") };
        let k = 90.0;
        let closed = k * (1200f64).log10() - (2.0 * k).log10();
        assert!(l >= closed && l < closed + 1.0);
        // the exact branch and the estimate agree on the leading order
        let exact = large_alpha_neighborhood(32, 1.0).unwrap().log10();
        assert!(exact > 100.0);
    }
}
