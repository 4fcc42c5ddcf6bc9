//! Recomputes the reference results and prints one pass/fail row each.
//! `--full` runs the complete sizes; the default is a quicker subset.

use std::time::Instant;

use a2a_core::baselines::{best_static, bvn_strategy, direct_circuits};
use a2a_core::cost::{lower_bound_hops, search_space_size, strategy_cost, verify_decomposition};
use a2a_core::schedule::{assign_template, check_strategy, predicted_slots, relabel_for_sizes, RelabelOptions, TemplateScheduler};
use a2a_core::sim::{simulate, SimConfig};
use a2a_core::strategize::{default_r_grid, PlanRequest, Planner};
use a2a_core::topology::{build_cycle, shift_power_sums, ShiftOrder};
use a2a_core::workload::{gen_traffic, WorkloadKind, WorkloadSpec};
use a2a_core::{CostModel, NetworkParams, TopologySequence, TrafficMatrix};
use clap::Args;

use crate::io::CliError;

#[derive(Args)]
pub struct ReproduceArgs {
    /// Full sizes: gap table to n = 4096, sweeps to n = 64, 200 random cases.
    #[arg(long)]
    full: bool,
}

type Check = Result<String, String>;

fn planner(n: usize, k: usize, a: TrafficMatrix, cm: CostModel) -> Result<Planner, String> {
    let p = NetworkParams::new(n, k).map_err(|e| e.to_string())?;
    PlanRequest::new(p, a, cm).and_then(Planner::new).map_err(|e| e.to_string())
}

fn motivating() -> Check {
    let cm = CostModel::from_t(1.0, 7.0);
    let p = planner(8, 1, TrafficMatrix::uniform(8, 1), cm)?;
    let mut cells = Vec::new();
    for (d, want) in [(1, 35.0), (2, 30.0), (7, 56.0)] {
        let c = p.best_for_d(d).ok_or("missing candidate")?;
        let total = strategy_cost(&c.strategy, &cm).map_err(|e| e.to_string())?.total_seconds;
        if total != want {
            return Err(format!("d={d}: {total}T, expected {want}T"));
        }
        cells.push(format!("d={d}: {}T+{}R", c.strategy.slots(), d));
    }
    let d = p.select_at(7.0).0.strategy.d();
    if d != 2 {
        return Err(format!("R=7T selects d={d}"));
    }
    Ok(format!("{}; R=7T picks d=2", cells.join(", ")))
}

fn bound(max_n: usize) -> Check {
    for n in 2..=max_n {
        let sums = shift_power_sums(n, ShiftOrder::Greedy);
        for (i, &ps) in sums.iter().enumerate() {
            let lb = lower_bound_hops(n, i + 1).map_err(|e| e.to_string())?;
            if ps < lb || ((i == 0 || i == n - 2) && ps != lb) {
                return Err(format!("n={n} d={}: power sum {ps}, bound {lb}", i + 1));
            }
        }
    }
    Ok(format!("n in 2..={max_n}, tight at d=1 and d=n-1"))
}

fn worst_ratio(ns: impl Iterator<Item = usize>) -> (f64, usize) {
    let mut worst = (0.0, 0);
    for n in ns {
        for (i, &p) in shift_power_sums(n, ShiftOrder::Greedy).iter().enumerate() {
            let r = p as f64 / lower_bound_hops(n, i + 1).expect("valid d") as f64;
            if r > worst.0 {
                worst = (r, n);
            }
        }
    }
    worst
}

fn gap(max_n: usize) -> Check {
    let small = worst_ratio(2..=64);
    let large = worst_ratio((65..=max_n.min(1024)).chain((1025..=max_n).step_by(37)).chain([max_n]));
    if small.0 > 2.22 || large.0 > 4.54 {
        return Err(format!("ratios {:.3} / {:.3}", small.0, large.0));
    }
    Ok(format!("max {:.3} (n={}) for n<=64, {:.3} (n={}) to n={max_n}", small.0, small.1, large.0, large.1))
}

fn sim_agreement(sizes: &[usize]) -> Check {
    let cm = CostModel::from_t(1.0, 3.0);
    let mut worst = 0.0f64;
    let mut count = 0;
    for &n in sizes {
        for k in [1, 2] {
            for c in [1, 4] {
                let a = TrafficMatrix::uniform(n, c);
                for cand in planner(n, k, a.clone(), cm)?.candidates {
                    let model = strategy_cost(&cand.strategy, &cm).map_err(|e| e.to_string())?.total_seconds;
                    let sim = simulate(&cand.strategy, &a, &SimConfig::new(cm)).map_err(|e| e.to_string())?.total_seconds;
                    let err = (sim - model).abs() / model;
                    if (c == 1 && err != 0.0) || err > 1e-3 {
                        return Err(format!("n={n} k={k} c={c} d={}: error {err}", cand.strategy.d()));
                    }
                    worst = worst.max(err);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} strategies, worst relative error {worst:.1e}"))
}

fn sweeps(sizes: &[usize]) -> (Check, Check) {
    let grid = default_r_grid();
    let mut configs = 0;
    for &n in sizes {
        for k in [1, 2] {
            for kind in [WorkloadKind::Uniform, WorkloadKind::Random] {
                let a = match gen_traffic(&WorkloadSpec::new(kind, n, 4)) {
                    Ok(a) => a,
                    Err(e) => return (Err(e.to_string()), Err(e.to_string())),
                };
                let sweep = match planner(n, k, a, CostModel::reference(0.0)).and_then(|p| p.sweep(&grid).map_err(|e| e.to_string())) {
                    Ok(s) => s,
                    Err(e) => return (Err(e.clone()), Err(e)),
                };
                let floor = |r: &a2a_core::strategize::SweepRow| {
                    r.baselines.iter().filter(|(b, _)| b == "static" || b == "direct").map(|b| b.1).fold(f64::INFINITY, f64::min)
                };
                let dominated = sweep.rows.iter().all(|r| r.cost.total_seconds <= floor(r));
                let strict = sweep.rows[1..grid.len() - 1].iter().any(|r| r.cost.total_seconds < floor(r));
                if !(dominated && strict) {
                    return (Err(format!("n={n} k={k} {kind:?}")), Ok("not reached".into()));
                }
                if sweep.rows.windows(2).any(|w| w[1].d > w[0].d) {
                    return (Ok(String::new()), Err(format!("n={n} k={k} {kind:?}")));
                }
                configs += 1;
            }
        }
    }
    (Ok(format!("{configs} configs x {} delays", grid.len())), Ok(format!("{configs} configs")))
}

fn soundness(cases: u64) -> Check {
    let mut count = 0;
    for case in 0..cases {
        let n = 3 + (case as usize * 7) % 14;
        let k = 1 + (case as usize) % 3.min(n - 1);
        let kind = [WorkloadKind::Uniform, WorkloadKind::Random, WorkloadKind::Zipf][case as usize % 3];
        let a = gen_traffic(&WorkloadSpec::new(kind, n, 1 + case % 5).with_seed(case)).map_err(|e| e.to_string())?;
        let p = NetworkParams::new(n, k).map_err(|e| e.to_string())?;
        let req = PlanRequest::new(p, a.clone(), CostModel::reference(1e-5))
            .and_then(|r| r.with_d_candidates(vec![1, p.max_reconfigurations().div_ceil(2), p.max_reconfigurations()]))
            .map_err(|e| e.to_string())?;
        let mut all: Vec<_> = Planner::new(req).map_err(|e| e.to_string())?.candidates.into_iter().map(|c| c.strategy).collect();
        all.extend([best_static(p, &a), direct_circuits(p, &a), bvn_strategy(p, &a)].into_iter().map(|s| s.expect("baseline")));
        for s in &all {
            if !check_strategy(s).is_clean() {
                return Err(format!("case {case}: contention in {}", s.provenance.family));
            }
            verify_decomposition(s, &a).map_err(|e| format!("case {case}: {e}"))?;
            count += 1;
        }
    }
    Ok(format!("{cases} cases, {count} strategies"))
}

fn search_space() -> Check {
    let s = search_space_size(8).to_string();
    let shown = format!("{}.{}e{}", &s[..1], &s[1..3], s.len() - 1);
    if &s[..2] == "41" && s.len() == 80 {
        Ok(shown)
    } else {
        Err(format!("{shown}, reference value 4.1e79"))
    }
}

fn relabel() -> Check {
    let seq = TopologySequence::new(vec![build_cycle(8).map_err(|e| e.to_string())?], vec![]).map_err(|e| e.to_string())?;
    let template = assign_template(&seq, TemplateScheduler::Auto).map_err(|e| e.to_string())?;
    let mut a = TrafficMatrix::uniform(8, 1);
    a.set(0, 5, 10).map_err(|e| e.to_string())?;
    let identity: Vec<usize> = (0..8).collect();
    let base = predicted_slots(&template, &a, &identity);
    let ours = predicted_slots(&template, &a, &relabel_for_sizes(&a, &template, RelabelOptions::default()).perm);
    let mut best = u64::MAX;
    let mut perm = identity.clone();
    permute(&mut perm, 0, &mut |p| best = best.min(predicted_slots(&template, &a, p)));
    if ours > base || ours as f64 > 1.05 * best as f64 {
        return Err(format!("identity {base}, relabeled {ours}, optimum {best}"));
    }
    Ok(format!("identity {base}T, relabeled {ours}T, optimum {best}T"))
}

fn permute(p: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == p.len() {
        f(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, f);
        p.swap(i, j);
    }
}

pub fn run(args: ReproduceArgs) -> Result<(), CliError> {
    let full = args.full;
    let sweep_sizes: &[usize] = if full { &[8, 16, 32, 64] } else { &[8, 16] };
    fn timed(name: &'static str, f: impl FnOnce() -> Check) -> (&'static str, Check, f64) {
        let t = Instant::now();
        let r = f();
        (name, r, t.elapsed().as_secs_f64())
    }
    let mut rows = vec![
        timed("motivating example", motivating),
        timed("lower bound", || bound(if full { 64 } else { 32 })),
        timed("optimality gap", || gap(if full { 4096 } else { 512 })),
        timed("simulator agreement", || sim_agreement(if full { &[8, 16, 32] } else { &[8, 16] })),
    ];
    let t = Instant::now();
    let (dom, mono) = sweeps(sweep_sizes);
    rows.push(("strategy dominance", dom, t.elapsed().as_secs_f64()));
    rows.push(("d monotone in R", mono, 0.0));
    rows.push(timed("decomposition soundness", || soundness(if full { 200 } else { 40 })));
    rows.push(timed("search-space count", search_space));
    rows.push(timed("relabeling benefit", relabel));

    let mut failed = 0;
    for (i, (name, r, secs)) in rows.iter().enumerate() {
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{:>2}  {tag}  {name:<24} {detail} [{secs:.1}s]", i + 1);
    }
    if failed > 0 {
        return Err(CliError::check("reproduce", serde_json::json!({ "failed": failed })));
    }
    Ok(())
}
