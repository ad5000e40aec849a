use std::path::Path;

use serde::Serialize;

use super::channels::{build_topology, drop_users};
use super::config::{dbm_to_watts, Algorithm, Pairing, RateSpec, ScenarioConfig};
use crate::error::{Error, Result};
use crate::model::{
    check_rate_constraint, group_interference, group_rates, NetworkTopology, RateDemands,
    UserPowerAllocation,
};
use crate::power_min::{assemble_full_solution, dpc_spm, SpmOptions};
use crate::rate_max::{multistart, SrmOptions};

/// CSV header of the summary table.
pub const SUMMARY_HEADER: [&str; 9] = [
    "seed",
    "budget (dBm)",
    "algorithm",
    "pairing",
    "sum_power (W)",
    "sum_rate (bit/s)",
    "iterations",
    "converged",
    "trace_file",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub seed: u64,
    pub budget_dbm: f64,
    pub algorithm: Algorithm,
    pub pairing: Pairing,
    /// NaN when the run produced no allocation.
    pub sum_power: f64,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace_file: String,
}

/// Objective per iteration: sum power (W) for power-min, `Σ_i K_i` (bit/s)
/// for rate-max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub file: String,
    pub objective_unit: &'static str,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub rows: Vec<SummaryRow>,
    pub traces: Vec<Trace>,
    pub allocations: Vec<Option<UserPowerAllocation>>,
    /// Converged runs whose allocation missed a demand or a budget.
    pub validation_failures: Vec<String>,
}

impl RunArtifacts {
    pub fn passed(&self) -> bool {
        self.validation_failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

fn demands_for(cfg: &ScenarioConfig, topology: &NetworkTopology) -> Result<RateDemands> {
    match &cfg.rate {
        RateSpec::Uniform(r) => RateDemands::uniform(topology, *r),
        RateSpec::PerUser(rates) => RateDemands::from_fn(topology, |_, _, id| rates[id]),
    }
}

struct Outcome {
    sum_power: f64,
    sum_rate: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
    allocation: Option<UserPowerAllocation>,
}

impl Outcome {
    fn failed(trace: Vec<f64>, iterations: usize) -> Self {
        Self {
            sum_power: f64::NAN,
            sum_rate: f64::NAN,
            iterations,
            converged: false,
            trace,
            allocation: None,
        }
    }
}

fn achieved_sum_rate(topology: &NetworkTopology, p: &UserPowerAllocation) -> Result<f64> {
    let q = p.totals();
    let mut total = 0.0;
    for ((i, m), _) in topology.groups() {
        let h = group_interference(topology, &q, i, m)?;
        total += group_rates(topology.bandwidth(), p.group(i, m), &h)
            .iter()
            .sum::<f64>();
    }
    Ok(total)
}

fn solve_power_min(
    cfg: &ScenarioConfig,
    topology: &NetworkTopology,
    demands: &RateDemands,
) -> Result<Outcome> {
    let opts = SpmOptions {
        tol: cfg.tolerances.power_min,
        max_iter: cfg.tolerances.power_min_max_iter,
        ..SpmOptions::default()
    };
    let report = dpc_spm(topology, demands, None, &opts)?;
    if !report.feasible() {
        return Ok(Outcome::failed(report.trace, report.iterations));
    }
    let p = assemble_full_solution(topology, demands, &report.q_star, 10.0 * opts.tol)?;
    Ok(Outcome {
        sum_power: report.sum_power(),
        sum_rate: achieved_sum_rate(topology, &p)?,
        iterations: report.iterations,
        converged: true,
        trace: report.trace,
        allocation: Some(p),
    })
}

fn solve_rate_max(
    cfg: &ScenarioConfig,
    topology: &NetworkTopology,
    demands: &RateDemands,
    seed: u64,
) -> Result<Outcome> {
    let opts = SrmOptions {
        tol: cfg.tolerances.rate_max,
        max_outer: cfg.tolerances.rate_max_max_outer,
        ..SrmOptions::default()
    };
    match multistart(topology, demands, cfg.multistart, cfg.reserve, seed, &opts) {
        Ok(report) => Ok(Outcome {
            sum_power: report.q.sum(),
            sum_rate: report.sum_rate,
            iterations: report.outer_iterations,
            converged: report.converged,
            allocation: Some(report.p),
            trace: report.trace,
        }),
        Err(Error::InitialPoint(_)) => Ok(Outcome::failed(Vec::new(), 0)),
        Err(e) => Err(e),
    }
}

fn validate(
    topology: &NetworkTopology,
    demands: &RateDemands,
    p: &UserPowerAllocation,
    rel_tol: f64,
) -> Result<Option<String>> {
    let q = p.totals();
    for (i, ok) in q.within_budgets(topology, rel_tol).iter().enumerate() {
        if !ok {
            return Ok(Some(format!("cell {i} exceeds its budget")));
        }
    }
    let checks = check_rate_constraint(topology, p, &q, demands)?;
    for (((i, m), _), group) in topology.groups().zip(&checks) {
        let h = group_interference(topology, &q, i, m)?;
        let rates = group_rates(topology.bandwidth(), p.group(i, m), &h);
        for (j, (rate, want)) in rates.iter().zip(demands.group(i, m)).enumerate() {
            if *rate < want * (1.0 - rel_tol) {
                return Ok(Some(format!(
                    "group ({i}, {m}) user {j}: rate {rate} below demand {want} (slack {} W)",
                    group[j].slack
                )));
            }
        }
    }
    Ok(None)
}

pub(crate) fn trace_name(
    seed: u64,
    budget_dbm: f64,
    algorithm: Algorithm,
    pairing: Pairing,
) -> String {
    format!("traces/seed{seed}_q{budget_dbm}dBm_{algorithm}_{pairing}")
}

/// Generate, pair, solve and validate every `(seed, budget)` of the sweep,
/// in that order. Infeasible instances become `converged = false` rows.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let mut out = RunArtifacts {
        rows: Vec::new(),
        traces: Vec::new(),
        allocations: Vec::new(),
        validation_failures: Vec::new(),
    };
    for seed in (0..cfg.seeds as u64).map(|k| cfg.seed + k) {
        let drop = drop_users(cfg, seed)?;
        for &budget_dbm in &cfg.budgets_dbm {
            let topology = build_topology(cfg, &drop, cfg.pairing, dbm_to_watts(budget_dbm))?;
            let demands = demands_for(cfg, &topology)?;
            let outcome = match cfg.algorithm {
                Algorithm::PowerMin => solve_power_min(cfg, &topology, &demands)?,
                Algorithm::RateMax => solve_rate_max(cfg, &topology, &demands, seed)?,
            };
            if let (true, Some(p)) = (outcome.converged, &outcome.allocation) {
                if let Some(why) = validate(&topology, &demands, p, cfg.tolerances.validation)? {
                    out.validation_failures
                        .push(format!("seed {seed}, budget {budget_dbm} dBm: {why}"));
                }
            }
            let file = trace_name(seed, budget_dbm, cfg.algorithm, cfg.pairing);
            out.rows.push(SummaryRow {
                seed,
                budget_dbm,
                algorithm: cfg.algorithm,
                pairing: cfg.pairing,
                sum_power: outcome.sum_power,
                sum_rate: outcome.sum_rate,
                iterations: outcome.iterations,
                converged: outcome.converged,
                trace_file: file.clone(),
            });
            out.traces.push(Trace {
                file,
                objective_unit: match cfg.algorithm {
                    Algorithm::PowerMin => "sum_power (W)",
                    Algorithm::RateMax => "objective (bit/s)",
                },
                values: outcome.trace,
            });
            out.allocations.push(outcome.allocation);
        }
    }
    Ok(out)
}

fn ext(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

/// Summary table as CSV text.
pub fn summary_csv(artifacts: &RunArtifacts, format: OutputFormat) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for r in &artifacts.rows {
        w.write_record([
            r.seed.to_string(),
            r.budget_dbm.to_string(),
            r.algorithm.to_string(),
            r.pairing.to_string(),
            r.sum_power.to_string(),
            r.sum_rate.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
            format!("{}.{}", r.trace_file, ext(format)),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Summary rows as a JSON array, trace files pointing at `.json` traces.
pub fn summary_json(artifacts: &RunArtifacts) -> Result<String> {
    let rows: Vec<SummaryRow> = artifacts
        .rows
        .iter()
        .map(|r| SummaryRow {
            trace_file: format!("{}.json", r.trace_file),
            ..r.clone()
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rows)?)
}

fn trace_csv(trace: &Trace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", trace.objective_unit])?;
    for (k, v) in trace.values.iter().enumerate() {
        w.write_record([k.to_string(), v.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Write `summary.{csv,json}` and one trace file per row under `dir`.
pub fn write_artifacts(artifacts: &RunArtifacts, dir: &Path, format: OutputFormat) -> Result<()> {
    std::fs::create_dir_all(dir.join("traces"))?;
    match format {
        OutputFormat::Csv => {
            std::fs::write(dir.join("summary.csv"), summary_csv(artifacts, format)?)?;
            for t in &artifacts.traces {
                std::fs::write(dir.join(format!("{}.csv", t.file)), trace_csv(t)?)?;
            }
        }
        OutputFormat::Json => {
            std::fs::write(dir.join("summary.json"), summary_json(artifacts)?)?;
            for t in &artifacts.traces {
                std::fs::write(
                    dir.join(format!("{}.json", t.file)),
                    serde_json::to_string_pretty(t)?,
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(algorithm: &str, budgets: &str) -> ScenarioConfig {
        ScenarioConfig::from_toml(&format!(
            r#"
            users_per_cell = 4
            num_subchannels = 2
            budgets_dbm = {budgets}
            algorithm = "{algorithm}"
            seed = 5
            "#
        ))
        .unwrap()
    }

    #[test]
    fn one_row_per_budget() {
        let a = run_scenario(&cfg("power-min", "[30.0, 35.0, 40.0]")).unwrap();
        assert_eq!(a.rows.len(), 3);
        assert!(a.passed(), "{:?}", a.validation_failures);
        let csv = summary_csv(&a, OutputFormat::Csv).unwrap();
        assert!(csv.starts_with(
            "seed,budget (dBm),algorithm,pairing,sum_power (W),sum_rate (bit/s),iterations,converged,trace_file\n"
        ));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn rate_max_rows_validate() {
        let a = run_scenario(&cfg("rate-max", "[40.0]")).unwrap();
        assert!(a.passed(), "{:?}", a.validation_failures);
        assert_eq!(a.rows.len(), 1);
        let t = &a.traces[0].values;
        for w in t.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn infeasible_budget_is_a_row_not_an_error() {
        let a = run_scenario(&cfg("power-min", "[-60.0]")).unwrap();
        assert!(!a.rows[0].converged);
        assert!(a.rows[0].sum_power.is_nan());
        let a = run_scenario(&cfg("rate-max", "[-60.0]")).unwrap();
        assert!(!a.rows[0].converged);
    }
}
