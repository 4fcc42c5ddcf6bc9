//! End-to-end planning: one strategy per family and reconfiguration count,
//! generated once, then costed at any number of reconfiguration delays.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{best_static, bvn_strategy, direct_circuits, direct_template};
use crate::cost::{strategy_cost, CostBreakdown};
use crate::error::{Error, Result};
use crate::params::{CostModel, NetworkParams};
use crate::schedule::{assign_template, realize, relabel_for_sizes, Provenance, RelabelOptions, Strategy, TemplateScheduler};
use crate::topology::{
    build_circulant, build_generalized_kautz, choose_circulant_offsets, contract_sequence, shift_order,
    shift_sequence_from, ShiftOrder, Topology,
};
use crate::traffic::TrafficMatrix;

/// Relabeling hill-climb evaluations for an `n`-node plan; each evaluation
/// costs `O(n^2)`.
pub fn default_relabel_budget(n: usize) -> usize {
    (2_000_000 / (n * n).max(1)).clamp(100, 20_000)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanRequest {
    pub params: NetworkParams,
    pub traffic: TrafficMatrix,
    pub cost_model: CostModel,
    pub d_candidates: Vec<usize>,
    pub seed: u64,
    pub relabel_budget: usize,
}

impl PlanRequest {
    /// All useful reconfiguration counts, `1..=ceil((n-1)/k)`.
    pub fn new(params: NetworkParams, traffic: TrafficMatrix, cost_model: CostModel) -> Result<Self> {
        let req = PlanRequest {
            d_candidates: (1..=params.max_reconfigurations()).collect(),
            relabel_budget: default_relabel_budget(params.n),
            params,
            traffic,
            cost_model,
            seed: 0,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn with_d_candidates(self, d_candidates: Vec<usize>) -> Result<Self> {
        let req = PlanRequest { d_candidates, ..self };
        req.validate()?;
        Ok(req)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        PlanRequest { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        NetworkParams::new(self.params.n, self.params.k)?;
        self.cost_model.validate()?;
        if self.traffic.n() != self.params.n {
            return Err(Error::InvalidTraffic(format!(
                "matrix is {0}x{0}, network has n={1}",
                self.traffic.n(),
                self.params.n
            )));
        }
        if self.d_candidates.is_empty() {
            return Err(Error::InvalidParams("no candidate reconfiguration counts".into()));
        }
        let max = self.params.max_reconfigurations();
        if let Some(&d) = self.d_candidates.iter().find(|&&d| d == 0 || d > max) {
            return Err(Error::InvalidParams(format!("d={d} outside [1, {max}]")));
        }
        Ok(())
    }
}

/// A generated strategy for one requested reconfiguration count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Candidate {
    pub requested_d: usize,
    pub family: String,
    pub strategy: Strategy,
}

impl Candidate {
    pub fn cost(&self, cm: &CostModel) -> CostBreakdown {
        CostBreakdown::from_counts(self.strategy.d(), self.strategy.power_sum(), self.strategy.slots(), cm)
    }
}

struct Template {
    requested_d: usize,
    family: &'static str,
    strategy: Strategy,
}

fn templates(req: &PlanRequest) -> Result<Vec<Template>> {
    let NetworkParams { n, k } = req.params;
    let dmax = *req.d_candidates.iter().max().expect("validated nonempty");
    let mut out = Vec::new();
    if k == 1 {
        let order = shift_order(n, dmax, ShiftOrder::Greedy)?;
        let built: Vec<Result<Template>> = req
            .d_candidates
            .par_iter()
            .map(|&d| {
                let seq = shift_sequence_from(n, &order[..d])?;
                let mut strategy = assign_template(&seq, TemplateScheduler::Auto)?;
                strategy.provenance = Provenance {
                    family: "shift".into(),
                    shifts: order[..d].to_vec(),
                    trace: seq.generation_trace.clone(),
                    ..Default::default()
                };
                Ok(Template { requested_d: d, family: "shift", strategy })
            })
            .collect();
        for t in built {
            out.push(t?);
        }
        return Ok(out);
    }

    let offsets = choose_circulant_offsets(n, k);
    let mut bases: Vec<(&'static str, Topology)> = vec![("circulant", build_circulant(n, &offsets)?)];
    // The Kautz construction can fail its loop repair for a few small (n, k).
    if let Ok(t) = build_generalized_kautz(n, k) {
        bases.push(("genkautz", t));
    }
    let chains: Vec<_> = bases
        .par_iter()
        .map(|(family, base)| contract_sequence(base, dmax, TemplateScheduler::Auto).map(|c| (*family, c)))
        .collect::<Result<_>>()?;
    for (family, chain) in chains {
        for &d in &req.d_candidates {
            let m = d.min(chain.plans.len());
            let mut strategy = chain.plans[m - 1].clone();
            strategy.provenance = Provenance {
                family: family.into(),
                offsets: if family == "circulant" { offsets.clone() } else { Vec::new() },
                trace: chain.sequence.generation_trace[..m].to_vec(),
                truncated: m < d,
                ..Default::default()
            };
            out.push(Template { requested_d: d, family, strategy });
        }
    }
    if req.d_candidates.contains(&req.params.max_reconfigurations()) {
        out.push(Template {
            requested_d: req.params.max_reconfigurations(),
            family: "direct",
            strategy: direct_template(req.params)?,
        });
    }
    Ok(out)
}

/// Serves `a` on a unit-demand template, relabeling nodes first when demand
/// is uneven.
fn instantiate(template: &Strategy, a: &TrafficMatrix, opts: RelabelOptions) -> Strategy {
    let relabeling = relabel_for_sizes(a, template, opts);
    let mut s = if relabeling.is_identity() {
        realize(template, a)
    } else {
        realize(template, &a.conjugated(&relabeling.perm)).relabeled(&relabeling.perm)
    };
    s.provenance = Provenance {
        relabeling: (!relabeling.is_identity()).then_some(relabeling.perm),
        ..template.provenance.clone()
    };
    s
}

/// Every candidate strategy for a request, generated once and reusable at
/// any reconfiguration delay.
#[derive(Clone, Debug)]
pub struct Planner {
    pub request: PlanRequest,
    pub candidates: Vec<Candidate>,
}

impl Planner {
    pub fn new(request: PlanRequest) -> Result<Self> {
        request.validate()?;
        let opts = RelabelOptions { seed: request.seed, budget: request.relabel_budget };
        let templates = templates(&request)?;
        // A truncated chain offers the same plan for several requested d.
        let key = |t: &Template| (t.family, t.strategy.d());
        let mut first: Vec<usize> = Vec::new();
        for (i, t) in templates.iter().enumerate() {
            if !first.iter().any(|&j| key(&templates[j]) == key(t)) {
                first.push(i);
            }
        }
        let built: Vec<Strategy> =
            first.par_iter().map(|&i| instantiate(&templates[i].strategy, &request.traffic, opts)).collect();
        let candidates = templates
            .iter()
            .map(|t| {
                let j = first.iter().position(|&j| key(&templates[j]) == key(t)).expect("every key has a first");
                let mut strategy = built[j].clone();
                strategy.provenance.truncated = t.strategy.provenance.truncated;
                Candidate { requested_d: t.requested_d, family: t.family.into(), strategy }
            })
            .collect();
        Ok(Planner { request, candidates })
    }

    fn argmin<'a>(&'a self, cm: &CostModel, filter: impl Fn(&Candidate) -> bool) -> Option<(&'a Candidate, CostBreakdown)> {
        let mut best: Option<(&Candidate, CostBreakdown)> = None;
        for c in self.candidates.iter().filter(|c| filter(c)) {
            let cost = c.cost(cm);
            let better = match &best {
                None => true,
                Some((b, bc)) => {
                    cost.total_seconds < bc.total_seconds
                        || (cost.total_seconds == bc.total_seconds && c.strategy.d() < b.strategy.d())
                }
            };
            if better {
                best = Some((c, cost));
            }
        }
        best
    }

    /// The cheaper family's strategy for `d` at the request's delay.
    pub fn best_for_d(&self, d: usize) -> Option<&Candidate> {
        self.argmin(&self.request.cost_model, |c| c.requested_d == d).map(|(c, _)| c)
    }

    /// Cheapest candidate at reconfiguration delay `r`; ties go to fewer
    /// reconfigurations.
    pub fn select_at(&self, r: f64) -> (&Candidate, CostBreakdown) {
        self.argmin(&self.request.cost_model.with_reconfig_delay(r), |_| true).expect("validated nonempty")
    }

    pub fn sweep(&self, r_grid: &[f64]) -> Result<SweepResult> {
        if r_grid.is_empty() {
            return Err(Error::InvalidParams("empty R grid".into()));
        }
        if let Some(r) = r_grid.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidParams(format!("R must be finite and nonnegative, got {r}")));
        }
        let (p, a) = (self.request.params, &self.request.traffic);
        let baselines = [("static", best_static(p, a)?), ("direct", direct_circuits(p, a)?), ("bvn", bvn_strategy(p, a)?)];
        let rows = r_grid
            .iter()
            .map(|&r| {
                let cm = self.request.cost_model.with_reconfig_delay(r);
                let (c, cost) = self.select_at(r);
                SweepRow {
                    r_seconds: r,
                    d: c.strategy.d(),
                    family: c.family.clone(),
                    cost,
                    baselines: baselines
                        .iter()
                        .map(|(name, s)| {
                            let total = CostBreakdown::from_counts(s.d(), s.power_sum(), s.slots(), &cm).total_seconds;
                            ((*name).to_string(), total)
                        })
                        .collect(),
                }
            })
            .collect();
        Ok(SweepResult { rows })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub r_seconds: f64,
    pub d: usize,
    pub family: String,
    pub cost: CostBreakdown,
    /// `(baseline name, total seconds)`.
    pub baselines: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Header: `R_seconds,d,family,reconfig_s,transmit_s,total_s` followed by
    /// one `baseline_<name>_s` column per baseline.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R_seconds,d,family,reconfig_s,transmit_s,total_s");
        if let Some(first) = self.rows.first() {
            for (name, _) in &first.baselines {
                s.push_str(&format!(",baseline_{name}_s"));
            }
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{:e},{},{},{:e},{:e},{:e}",
                r.r_seconds, r.d, r.family, r.cost.reconfig_seconds, r.cost.transmit_seconds, r.cost.total_seconds
            ));
            for (_, v) in &r.baselines {
                s.push_str(&format!(",{v:e}"));
            }
            s.push('\n');
        }
        s
    }
}

/// 25 log-spaced delays from 100 ns to 100 ms.
pub fn default_r_grid() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(-7.0 + 6.0 * i as f64 / 24.0)).collect()
}

/// Best strategy with `d` requested reconfigurations.
pub fn best_strategy_for_d(req: &PlanRequest, d: usize) -> Result<Strategy> {
    let req = req.clone().with_d_candidates(vec![d])?;
    let planner = Planner::new(req)?;
    Ok(planner.best_for_d(d).expect("one candidate per family").strategy.clone())
}

/// Cheapest candidate at the request's delay, with its validated cost.
pub fn select_d(req: &PlanRequest) -> Result<(usize, Strategy, CostBreakdown)> {
    let planner = Planner::new(req.clone())?;
    let (c, _) = planner.select_at(req.cost_model.reconfig_delay);
    let cost = strategy_cost(&c.strategy, &req.cost_model)?;
    Ok((c.strategy.d(), c.strategy.clone(), cost))
}

pub fn sweep_r(req: &PlanRequest, r_grid: &[f64]) -> Result<SweepResult> {
    Planner::new(req.clone())?.sweep(r_grid)
}
