//! Completion-time model, the degree-1 lower bound, decomposition checks, and
//! search-space accounting.

mod decomposition;
mod search_space;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::CostModel;
use crate::schedule::{check_round, Round, Strategy};

pub use decomposition::{verify_decomposition, Decomposition, DecompositionTerm};
pub use search_space::search_space_size;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CostBreakdown {
    pub d: usize,
    pub reconfig_seconds: f64,
    pub transmit_seconds: f64,
    pub total_seconds: f64,
    /// Sum over rounds of the longest path, in hops.
    pub power_sum: u64,
    /// Transmission time in units of `T`.
    pub transmit_slots: u64,
}

impl CostBreakdown {
    /// Breakdown from slot counts alone; the caller vouches for validity.
    pub fn from_counts(d: usize, power_sum: u64, transmit_slots: u64, cm: &CostModel) -> Self {
        let reconfig_seconds = d as f64 * cm.reconfig_delay;
        let transmit_seconds = transmit_slots as f64 * cm.t();
        CostBreakdown {
            d,
            reconfig_seconds,
            transmit_seconds,
            total_seconds: reconfig_seconds + transmit_seconds,
            power_sum,
            transmit_slots,
        }
    }
}

/// Bottleneck time of one round: `max_f (h_f + c_f - 1) * T`, which is the
/// longest path times `T` for unit chunks.
pub fn round_duration(round: &Round, cm: &CostModel) -> Result<f64> {
    let violations = check_round(round, 0);
    if !violations.is_empty() {
        return Err(Error::Contention { stage: 0, round: 0, violations: violations.len() });
    }
    Ok(round.slots() as f64 * cm.t())
}

/// `d * R + T * sum of round durations`, with the initial topology counted as
/// a reconfiguration. Rejects contended rounds and broken paths.
pub fn strategy_cost(strategy: &Strategy, cm: &CostModel) -> Result<CostBreakdown> {
    cm.validate()?;
    if strategy.stages.is_empty() {
        return Err(Error::InvalidParams("strategy has no stages".into()));
    }
    for (i, stage) in strategy.stages.iter().enumerate() {
        if stage.topology.n() != strategy.n || stage.topology.k() != strategy.k {
            return Err(Error::InvalidTopology(format!("stage {i} topology does not match n={}, k={}", strategy.n, strategy.k)));
        }
        for (j, round) in stage.schedule.rounds.iter().enumerate() {
            let v = check_round(round, j);
            if !v.is_empty() {
                return Err(Error::Contention { stage: i, round: j, violations: v.len() });
            }
            for e in &round.entries {
                e.path.validate(&stage.topology, e.src, e.dst)?;
            }
        }
    }
    Ok(CostBreakdown::from_counts(strategy.d(), strategy.power_sum(), strategy.slots(), cm))
}

/// Sum over rounds of the longest path.
pub fn power_sum(strategy: &Strategy) -> u64 {
    strategy.power_sum()
}

/// `q = floor((n-1)/d)`, `u = (n-1) mod d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub q: u64,
    pub u: u64,
}

impl LowerBoundParams {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 2 || d == 0 {
            return Err(Error::InvalidParams(format!("lower bound needs n >= 2 and d >= 1, got n={n}, d={d}")));
        }
        Ok(LowerBoundParams { q: ((n - 1) / d) as u64, u: ((n - 1) % d) as u64 })
    }
}

/// Hop term of the degree-1 bound: `d*q*(q+1)/2 + u*(q+1)`.
pub fn lower_bound_hops(n: usize, d: usize) -> Result<u64> {
    let LowerBoundParams { q, u } = LowerBoundParams::new(n, d)?;
    Ok(d as u64 * q * (q + 1) / 2 + u * (q + 1))
}

/// Minimum completion time of any degree-1 strategy with exactly `d`
/// reconfigurations.
pub fn lower_bound(n: usize, k: usize, d: usize, reconfig_delay: f64, t: f64) -> Result<f64> {
    if k != 1 {
        return Err(Error::Unsupported(format!("the lower bound is only established for k = 1, got k = {k}")));
    }
    Ok(d as f64 * reconfig_delay + t * lower_bound_hops(n, d)? as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub d: usize,
    pub power_sum: u64,
    pub lower_bound_hops: u64,
    pub ratio: f64,
}

pub fn gap_rows(n: usize, power_sums: &[u64]) -> Result<Vec<GapRow>> {
    power_sums
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let lb = lower_bound_hops(n, i + 1)?;
            Ok(GapRow { d: i + 1, power_sum: p, lower_bound_hops: lb, ratio: p as f64 / lb as f64 })
        })
        .collect()
}

/// CSV with header `d,power_sum,lower_bound_hops,ratio`.
pub fn gap_csv(rows: &[GapRow]) -> String {
    let mut s = String::from("d,power_sum,lower_bound_hops,ratio\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{:.6}\n", r.d, r.power_sum, r.lower_bound_hops, r.ratio));
    }
    s
}
