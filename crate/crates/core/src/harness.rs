//! Seeded benchmark protocol: repeated trials per (solver, problem) cell,
//! validity counting and mean-of-valid statistics against the
//! back-and-forth baseline.

use std::fmt;
use std::io::{BufRead, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aco::{AcoParams, InvalidReason, Variant};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::fleet::{plan_fleet, FleetPlan, Planner};
use crate::world::{generate_waypoints, FarmMap};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TRIALS: usize = 30;
pub const DEFAULT_BASE_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Solver {
    #[serde(rename = "back-and-forth")]
    BackAndForth,
    #[serde(rename = "AS")]
    AntSystem,
    #[serde(rename = "MMAS")]
    MaxMin,
}

impl Solver {
    pub const ALL: [Solver; 3] = [Solver::BackAndForth, Solver::AntSystem, Solver::MaxMin];

    pub fn label(&self) -> &'static str {
        match self {
            Solver::BackAndForth => "back-and-forth",
            Solver::AntSystem => "AS",
            Solver::MaxMin => "MMAS",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Single,
    Dual,
}

impl Problem {
    pub const ALL: [Problem; 2] = [Problem::Single, Problem::Dual];

    pub fn drones(&self) -> usize {
        match self {
            Problem::Single => 1,
            Problem::Dual => 2,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Single => "single",
            Problem::Dual => "dual",
        })
    }
}

/// ACO knobs shared by every ACO cell; `None` keeps the variant default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcoOverrides {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub ants: Option<usize>,
    pub iterations: Option<usize>,
    pub q_deposit: Option<f64>,
}

impl AcoOverrides {
    pub fn params(&self, variant: Variant, seed: u64) -> AcoParams {
        let mut p = AcoParams::new(variant, seed);
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        if let Some(v) = self.rho {
            p.rho = v;
        }
        if let Some(v) = self.ants {
            p.n_ants = Some(v);
        }
        if let Some(v) = self.iterations {
            p.n_iterations = v;
        }
        if let Some(v) = self.q_deposit {
            p.q_deposit = Some(v);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub solvers: Vec<Solver>,
    pub problems: Vec<Problem>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub aco: AcoOverrides,
    pub model: EnergyModel,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            solvers: Solver::ALL.to_vec(),
            problems: Problem::ALL.to_vec(),
            n_trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_BASE_SEED,
            aco: AcoOverrides::default(),
            model: EnergyModel::default(),
        }
    }
}

impl BenchConfig {
    /// Seed of trial `i`.
    pub fn seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    pub fn planner(&self, solver: Solver, seed: u64) -> Planner {
        match solver {
            Solver::BackAndForth => Planner::BackAndForth,
            Solver::AntSystem => Planner::Aco(self.aco.params(Variant::AntSystem, seed)),
            Solver::MaxMin => Planner::Aco(self.aco.params(Variant::MaxMin, seed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub schema: u32,
    pub solver: Solver,
    pub problem: Problem,
    pub seed: u64,
    pub valid: bool,
    pub cost_kj: f64,
    pub distance_m: f64,
    pub turn_deg: f64,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invalid_reason: Option<InvalidReason>,
}

impl TrialReport {
    fn from_plan(solver: Solver, problem: Problem, seed: u64, plan: &FleetPlan, ms: f64) -> Self {
        let valid = plan.is_valid();
        Self {
            schema: SCHEMA_VERSION,
            solver,
            problem,
            seed,
            valid,
            cost_kj: plan.total_cost_kj(),
            distance_m: plan.total_distance_m(),
            turn_deg: plan.total_turn_deg(),
            wall_time_ms: ms,
            invalid_reason: if valid { None } else { plan.failure() },
        }
    }

    /// Same report with timing zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub solver: Solver,
    pub problem: Problem,
    pub trials_run: usize,
    pub trials_valid: usize,
    pub mean_cost_kj: Option<f64>,
    pub min_cost_kj: Option<f64>,
    pub max_cost_kj: Option<f64>,
    pub stddev_cost_kj: Option<f64>,
    pub baseline_cost_kj: Option<f64>,
    /// `100 * (baseline - mean) / baseline`.
    pub improvement_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CellSummary {
    pub fn status(&self) -> String {
        if let Some(e) = &self.error {
            format!("error: {e}")
        } else if self.trials_valid == 0 {
            "no valid solutions".to_string()
        } else {
            "ok".to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub schema: u32,
    pub cells: Vec<CellSummary>,
}

impl BenchSummary {
    pub fn cell(&self, solver: Solver, problem: Problem) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.solver == solver && c.problem == problem)
    }

    /// Plain-text comparison table, one row per cell.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<8} {:<15} {:>7} {:>11} {:>11} {:>11} {:>9} {:>9}\n",
            "problem", "solver", "valid", "mean kJ", "min kJ", "max kJ", "std kJ", "vs b&f"
        );
        let num = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
        for c in &self.cells {
            if let Some(e) = &c.error {
                out.push_str(&format!("{:<8} {:<15} error: {e}\n", c.problem.to_string(), c.solver.label()));
                continue;
            }
            out.push_str(&format!(
                "{:<8} {:<15} {:>7} {:>11} {:>11} {:>11} {:>9} {:>9}\n",
                c.problem.to_string(),
                c.solver.label(),
                format!("{}/{}", c.trials_valid, c.trials_run),
                num(c.mean_cost_kj),
                num(c.min_cost_kj),
                num(c.max_cost_kj),
                num(c.stddev_cost_kj),
                c.improvement_pct
                    .map_or("-".to_string(), |v| format!("{v:+.1}%")),
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub summary: BenchSummary,
    pub reports: Vec<TrialReport>,
    /// Lowest-cost valid plan per (solver, problem), for rendering.
    pub best_plans: Vec<(Solver, Problem, FleetPlan)>,
}

struct CellRun {
    solver: Solver,
    problem: Problem,
    result: Result<Vec<(TrialReport, FleetPlan)>>,
}

fn run_cell(map: &FarmMap, cfg: &BenchConfig, solver: Solver, problem: Problem) -> CellRun {
    let waypoints = generate_waypoints(map);
    let trials = match solver {
        Solver::BackAndForth => 1,
        _ => cfg.n_trials,
    };
    let result = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed(i);
            let start = Instant::now();
            let plan = plan_fleet(
                map,
                &waypoints,
                &cfg.model,
                &cfg.planner(solver, seed),
                problem.drones(),
            )?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            Ok((TrialReport::from_plan(solver, problem, seed, &plan, ms), plan))
        })
        .collect::<Result<Vec<_>>>();
    CellRun {
        solver,
        problem,
        result,
    }
}

/// Run every configured (solver, problem) cell. A failing cell is recorded
/// in the summary and the others still run.
pub fn run_benchmark(map: &FarmMap, cfg: &BenchConfig) -> Result<BenchOutcome> {
    if cfg.n_trials == 0 {
        return Err(Error::param("n_trials", "must be >= 1"));
    }
    let mut grid: Vec<(Solver, Problem)> = cfg
        .problems
        .iter()
        .flat_map(|&p| cfg.solvers.iter().map(move |&s| (s, p)))
        .collect();
    grid.sort();
    grid.dedup();

    let runs: Vec<CellRun> = grid
        .iter()
        .map(|&(s, p)| run_cell(map, cfg, s, p))
        .collect();

    let mut reports = Vec::new();
    let mut errors = Vec::new();
    let mut best_plans = Vec::new();
    for run in runs {
        match run.result {
            Ok(trials) => {
                let best = trials
                    .iter()
                    .filter(|(r, _)| r.valid)
                    .min_by(|a, b| a.0.cost_kj.total_cmp(&b.0.cost_kj))
                    .map(|(_, plan)| plan.clone());
                if let Some(plan) = best {
                    best_plans.push((run.solver, run.problem, plan));
                }
                reports.extend(trials.into_iter().map(|(r, _)| r));
            }
            Err(e) => errors.push((run.solver, run.problem, e.to_string())),
        }
    }
    reports.sort_by_key(|r| (r.solver, r.problem, r.seed));

    let mut summary = summarize(&reports);
    for (solver, problem, message) in errors {
        summary.cells.push(CellSummary {
            solver,
            problem,
            trials_run: 0,
            trials_valid: 0,
            mean_cost_kj: None,
            min_cost_kj: None,
            max_cost_kj: None,
            stddev_cost_kj: None,
            baseline_cost_kj: None,
            improvement_pct: None,
            error: Some(message),
        });
    }
    summary.cells.sort_by_key(|c| (c.problem, c.solver));
    Ok(BenchOutcome {
        summary,
        reports,
        best_plans,
    })
}

/// Aggregate reports per (solver, problem). Statistics cover valid trials
/// only; the baseline reference is the valid back-and-forth cost of the same
/// problem, when present.
pub fn summarize(reports: &[TrialReport]) -> BenchSummary {
    let mut keys: Vec<(Problem, Solver)> = reports.iter().map(|r| (r.problem, r.solver)).collect();
    keys.sort();
    keys.dedup();

    let baseline = |problem: Problem| {
        let costs: Vec<f64> = reports
            .iter()
            .filter(|r| r.problem == problem && r.solver == Solver::BackAndForth && r.valid)
            .map(|r| r.cost_kj)
            .collect();
        mean(&costs)
    };

    let cells = keys
        .into_iter()
        .map(|(problem, solver)| {
            let cell: Vec<&TrialReport> = reports
                .iter()
                .filter(|r| r.problem == problem && r.solver == solver)
                .collect();
            let costs: Vec<f64> = cell.iter().filter(|r| r.valid).map(|r| r.cost_kj).collect();
            let mean_cost = mean(&costs);
            let base = baseline(problem);
            CellSummary {
                solver,
                problem,
                trials_run: cell.len(),
                trials_valid: costs.len(),
                mean_cost_kj: mean_cost,
                min_cost_kj: costs.iter().copied().reduce(f64::min),
                max_cost_kj: costs.iter().copied().reduce(f64::max),
                stddev_cost_kj: stddev(&costs),
                baseline_cost_kj: base,
                improvement_pct: match (mean_cost, base) {
                    (Some(m), Some(b)) => Some(100.0 * (b - m) / b),
                    _ => None,
                },
                error: None,
            }
        })
        .collect();
    BenchSummary {
        schema: SCHEMA_VERSION,
        cells,
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation; 0 for a single value.
fn stddev(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

pub fn write_reports_jsonl(reports: &[TrialReport], mut out: impl Write) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_reports_jsonl(input: impl BufRead) -> Result<Vec<TrialReport>> {
    let mut reports = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let report: TrialReport = serde_json::from_str(&line)
            .map_err(|e| Error::schema(format!("line {}", n + 1), e.to_string()))?;
        if report.schema != SCHEMA_VERSION {
            return Err(Error::schema(
                format!("line {}.schema", n + 1),
                format!("unsupported schema {}", report.schema),
            ));
        }
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(solver: Solver, problem: Problem, seed: u64, valid: bool, cost: f64) -> TrialReport {
        TrialReport {
            schema: SCHEMA_VERSION,
            solver,
            problem,
            seed,
            valid,
            cost_kj: cost,
            distance_m: cost * 5.0,
            turn_deg: 0.0,
            wall_time_ms: 1.0,
            invalid_reason: None,
        }
    }

    #[test]
    fn all_invalid_cell_has_no_mean() {
        let s = summarize(&[
            report(Solver::AntSystem, Problem::Single, 1, false, 5.0),
            report(Solver::AntSystem, Problem::Single, 2, false, 6.0),
        ]);
        let c = s.cell(Solver::AntSystem, Problem::Single).unwrap();
        assert_eq!(c.trials_run, 2);
        assert_eq!(c.trials_valid, 0);
        assert_eq!(c.mean_cost_kj, None);
        assert_eq!(c.status(), "no valid solutions");
        let json = serde_json::to_string(&s).unwrap();
        assert!(!json.contains("NaN"));
    }

    #[test]
    fn mean_over_valid_only() {
        let s = summarize(&[
            report(Solver::AntSystem, Problem::Single, 1, true, 10.0),
            report(Solver::AntSystem, Problem::Single, 2, true, 20.0),
        ]);
        assert_eq!(s.cell(Solver::AntSystem, Problem::Single).unwrap().mean_cost_kj, Some(15.0));

        let s = summarize(&[
            report(Solver::MaxMin, Problem::Dual, 1, true, 10.0),
            report(Solver::MaxMin, Problem::Dual, 2, false, 99.0),
        ]);
        let c = s.cell(Solver::MaxMin, Problem::Dual).unwrap();
        assert_eq!(c.mean_cost_kj, Some(10.0));
        assert_eq!(c.max_cost_kj, Some(10.0));
        assert_eq!(c.stddev_cost_kj, Some(0.0));
    }

    #[test]
    fn improvement_against_baseline() {
        let s = summarize(&[
            report(Solver::BackAndForth, Problem::Single, 42, true, 100.0),
            report(Solver::AntSystem, Problem::Single, 42, true, 80.0),
            report(Solver::AntSystem, Problem::Single, 43, true, 90.0),
        ]);
        let b = s.cell(Solver::BackAndForth, Problem::Single).unwrap();
        assert_eq!(b.improvement_pct, Some(0.0));
        let a = s.cell(Solver::AntSystem, Problem::Single).unwrap();
        assert_eq!(a.baseline_cost_kj, Some(100.0));
        assert!((a.improvement_pct.unwrap() - 15.0).abs() < 1e-12);
        assert!((a.stddev_cost_kj.unwrap() - 50.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn seeds_distinct_and_reproducible() {
        let cfg = BenchConfig::default();
        let seeds: Vec<u64> = (0..cfg.n_trials).map(|i| cfg.seed(i)).collect();
        let mut dedup = seeds.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), seeds.len());
        assert_eq!(seeds[0], 42);
        assert_eq!(seeds[29], 71);
    }

    #[test]
    fn jsonl_round_trip_and_schema() {
        let reports = vec![
            report(Solver::BackAndForth, Problem::Single, 42, true, 100.0),
            report(Solver::MaxMin, Problem::Dual, 43, false, 50.5),
        ];
        let mut buf = Vec::new();
        write_reports_jsonl(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.contains("\"schema\":1")));
        assert!(text.contains("\"solver\":\"back-and-forth\""));
        assert_eq!(read_reports_jsonl(buf.as_slice()).unwrap(), reports);

        let bad = text.replace("\"schema\":1", "\"schema\":2");
        assert!(read_reports_jsonl(bad.as_bytes()).is_err());
    }
}
