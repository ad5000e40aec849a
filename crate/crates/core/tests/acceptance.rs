//! Acceptance criteria. Each test prints one PASS/FAIL line to stderr, past
//! the test harness's output capture, and then asserts the verdict.

use std::io::Write;
use std::time::{Duration, Instant};

use noma_power::model::{
    group_rates, AuxiliaryVector, CellPowerVector, NetworkTopology, RateDemands, UserLink,
};
use noma_power::oracle::{
    fd_hessian_psd, grid_power_min, grid_rate_max_group, standard_function_probe,
    tight_group_powers,
};
use noma_power::power_min::{
    dpc_spm, interference_map, min_power_user_allocation, minimum_group_power, SpmOptions,
};
use noma_power::rate_max::{dpc_srm, SrmOptions, StartPoint};
use noma_power::scenario::{
    fixtures, generate_channels, run_scenario, summary_csv, write_artifacts, Algorithm,
    OutputFormat, Pairing, ScenarioConfig,
};
use noma_power::single_cell::{
    negative_sum_rate, negative_sum_rate_hessian, optimal_single_cell_rate,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration, limit: Duration) {
    let pass = pass && elapsed <= limit;
    let line = format!(
        "{} criterion {id} ({name}): {detail}; {:.2} s of {} s\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "{line}");
}

/// Positive, non-increasing effective interference for `n` users.
fn random_interference(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut h: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
    for j in (0..n - 1).rev() {
        h[j] = h[j].max(h[j + 1]);
    }
    h
}

/// Two-user groups, own gains well above cross gains, unit bandwidth.
fn random_network(rng: &mut impl Rng, cells: usize, subs: usize, budget: f64) -> NetworkTopology {
    let mut b = NetworkTopology::builder(cells, subs)
        .bandwidth(1.0)
        .noise_power(0.1)
        .uniform_budget(budget);
    let mut id = 0;
    for i in 0..cells {
        for m in 0..subs {
            let mut users = Vec::new();
            for _ in 0..2 {
                let gains = (0..cells)
                    .map(|k| {
                        if k == i {
                            rng.random_range(0.5..2.0)
                        } else {
                            rng.random_range(0.01..0.3)
                        }
                    })
                    .collect();
                users.push(UserLink::new(id, gains));
                id += 1;
            }
            b = b.group(i, m, users);
        }
    }
    b.build().unwrap()
}

fn scenario(extra: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml(&format!(
        "users_per_cell = 4\nnum_subchannels = 2\nbudgets_dbm = [40.0]\nalgorithm = \"power-min\"\n{extra}"
    ))
    .unwrap()
}

#[test]
fn criterion_1_closed_form_sum_power() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_slack, mut worst_match) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let h = random_interference(&mut rng, n);
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let p = min_power_user_allocation(1.0, &r, &h);
        for (got, want) in group_rates(1.0, &p, &h).iter().zip(&r) {
            worst_slack = worst_slack.max((got - want).abs() / want);
        }
        for (a, b) in p.iter().zip(tight_group_powers(1.0, &r, &h)) {
            worst_match = worst_match.max((a - b).abs() / b);
        }
    }
    let example = min_power_user_allocation(1.0, &[1.0; 3], &[7.0, 3.0, 1.0]);
    let pass = worst_slack <= 1e-9 && worst_match <= 1e-9 && example == [12.0, 4.0, 1.0];
    verdict(
        1,
        "closed-form sum power",
        pass,
        format!(
            "200 groups, max relative slack {worst_slack:.1e}, max gap to constraint solve \
             {worst_match:.1e} (limit 1e-9), worked example {example:?}"
        ),
        t.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_standard_function_properties() {
    let t = Instant::now();
    let mut counterexamples = Vec::new();
    let mut trials = 0;
    for seed in 0..50u64 {
        let topo = generate_channels(&scenario(""), seed).unwrap();
        let demands = RateDemands::uniform(&topo, 3e5).unwrap();
        let (ni, nm) = (topo.num_cells(), topo.num_subchannels());
        let report = standard_function_probe(
            |q| {
                let q = CellPowerVector::from_values(ni, nm, q.to_vec()).unwrap();
                interference_map(&topo, &demands, &q)
                    .unwrap()
                    .values()
                    .to_vec()
            },
            ni * nm,
            10.0,
            20,
            seed,
        );
        trials += report.trials;
        counterexamples.extend(report.counterexamples);
    }
    verdict(
        2,
        "standard function properties",
        trials == 1000 && counterexamples.is_empty(),
        format!(
            "{trials} trials over 50 topologies, {} counterexamples{}",
            counterexamples.len(),
            counterexamples
                .first()
                .map(|c| format!(", first {c:?}"))
                .unwrap_or_default()
        ),
        t.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_3_fixed_point_optimality() {
    let t = Instant::now();
    let delta = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut done, mut worst, mut below) = (0, f64::NEG_INFINITY, 0);
    let mut pass = true;
    while done < 50 {
        let topo = random_network(&mut rng, 2, 1, 3.0);
        let demands = RateDemands::uniform(&topo, rng.random_range(0.5..1.5)).unwrap();
        let fixed = dpc_spm(&topo, &demands, None, &SpmOptions::default()).unwrap();
        if !(fixed.converged && fixed.feasible()) {
            continue;
        }
        done += 1;
        let grid = grid_power_min(&topo, &demands, delta).unwrap();
        let gap = fixed.sum_power() - grid.sum_power;
        worst = worst.max(gap);
        pass &= gap <= 2.0 * delta * 2.0;
        // the grid cannot beat the optimum beyond its own tolerance
        below += (grid.sum_power < fixed.sum_power() - 1e-6) as usize;
    }
    let symmetric = fixtures::symmetric_two_cell(10.0).unwrap();
    let demands = RateDemands::uniform(&symmetric, 1.0).unwrap();
    let q = dpc_spm(&symmetric, &demands, None, &SpmOptions::default())
        .unwrap()
        .q_star;
    let q_err = q
        .values()
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    pass &= q_err <= 1e-6 && below == 0;
    verdict(
        3,
        "fixed-point optimality",
        pass,
        format!(
            "50 instances, max (fixed point - grid) {worst:.2e} W (limit {:.2} W), grid below \
             fixed point {below} times; symmetric q* error {q_err:.1e} (limit 1e-6)",
            2.0 * delta * 2.0
        ),
        t.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_4_weak_user_ordering() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    for _ in 0..500 {
        let n = rng.random_range(2..=4);
        let h = random_interference(&mut rng, n);
        let r = vec![rng.random_range(0.1..2.0); n];
        let p = min_power_user_allocation(1.0, &r, &h);
        violations += p
            .windows(2)
            .filter(|w| w[0] <= w[1] || w[0].is_nan())
            .count();
    }
    verdict(
        4,
        "weak-user ordering",
        violations == 0,
        format!("500 groups with equal demands, {violations} non-decreasing steps"),
        t.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_5_single_cell_optimum_vs_grid() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut largest_gap) = (f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(2..=3);
        let h = random_interference(&mut rng, n);
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.5)).collect();
        let q = minimum_group_power(1.0, &r, &h) * rng.random_range(1.05..3.0);
        let delta = q / if n == 2 { 20_000.0 } else { 2_000.0 };
        let exact = optimal_single_cell_rate(1.0, &r, &h, q).unwrap();
        let grid = grid_rate_max_group(1.0, &r, &h, q, delta).unwrap();
        worst = worst.min(exact - grid.sum_rate);
        largest_gap = largest_gap.max(exact - grid.sum_rate);
    }
    let two = optimal_single_cell_rate(1.0, &[1.0, 1.0], &[2.0, 1.0], 10.0).unwrap();
    let three = optimal_single_cell_rate(1.0, &[1.0; 3], &[7.0, 3.0, 1.0], 20.0).unwrap();
    let e2 = (two - (1.0 + 5f64.log2())).abs();
    let e3 = (three - (2.0 + 2.75f64.log2())).abs();
    verdict(
        5,
        "single-cell optimum vs grid oracle",
        worst >= -2e-3 && e2 <= 1e-9 && e3 <= 1e-9,
        format!(
            "100 groups, min (closed form - grid) {worst:.2e} (limit -2e-3), max {largest_gap:.2e}; \
             worked examples off by {e2:.1e} and {e3:.1e} (limit 1e-9)"
        ),
        t.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_6_convexity_certificate() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut failures, mut worst_minor, mut worst_fd) = (0, f64::INFINITY, 0.0f64);
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let h = random_interference(&mut rng, n);
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.5)).collect();
        let mut p = tight_group_powers(1.0, &r, &h);
        p[0] += rng.random_range(0.0..5.0);
        let report = fd_hessian_psd(|x| negative_sum_rate(1.0, x, &h), &p, None).unwrap();
        failures += !report.psd as usize;
        worst_minor = report.minors.iter().fold(worst_minor, |m, &v| m.min(v));
        let exact = negative_sum_rate_hessian(1.0, &p, &h);
        let scale = exact.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in exact.iter().flatten().zip(report.hessian.iter().flatten()) {
            worst_fd = worst_fd.max((a - b).abs() / scale);
        }
    }
    verdict(
        6,
        "convexity certificate",
        failures == 0 && worst_fd <= 1e-4,
        format!(
            "200 points, {failures} below the -1e-6 minor tolerance, smallest minor \
             {worst_minor:.2e}, finite differences within {worst_fd:.1e} of the analytic Hessian"
        ),
        t.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_7_dc_monotonicity_and_equivalence() {
    let t = Instant::now();
    let two_sites = format!(
        "[layout]\nkind = \"sites\"\npositions = [[0.0, 0.0], [800.0, 0.0]]\ncell_radius = {}\n",
        800.0 / 3f64.sqrt()
    );
    let configs = [scenario(&two_sites), scenario("")];
    let opts = SrmOptions::default();
    let (mut runs, mut increases, mut worst_x, mut nontrivial) = (0, 0, 0.0f64, 0);
    let mut seed = 0u64;
    while runs < 50 {
        let cfg = &configs[runs % 2];
        let topo = generate_channels(cfg, seed).unwrap();
        let demands = RateDemands::uniform(&topo, 3e5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        seed += 1;
        let Ok(start) = StartPoint::random(&topo, &demands, &mut rng) else {
            continue;
        };
        runs += 1;
        let report = dpc_srm(&topo, &demands, &start, &opts).unwrap();
        increases += report.trace.windows(2).filter(|w| w[1] > w[0]).count();
        nontrivial += (report.trace.last() < report.trace.first()) as usize;
        let h = AuxiliaryVector::from_interference(&topo, &report.q).unwrap();
        for ((i, m), g) in topo.groups() {
            for j in 0..g.len() {
                let (got, want) = (report.x.group(i, m)[j], h.group(i, m)[j]);
                worst_x = worst_x.max((got - want).abs() / want);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_single = 0.0f64;
    for k in 0..20 {
        let n = 2 + k % 2;
        let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
        let users = gains
            .iter()
            .enumerate()
            .map(|(u, g)| UserLink::new(u, vec![*g]))
            .collect();
        let topo = NetworkTopology::builder(1, 1)
            .bandwidth(1.0)
            .noise_power(0.1)
            .uniform_budget(rng.random_range(5.0..20.0))
            .group(0, 0, users)
            .build()
            .unwrap();
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.0)).collect();
        let demands = RateDemands::from_groups(&topo, vec![r.clone()]).unwrap();
        let start = StartPoint::scaled_fixed_point(&topo, &demands, 0.0).unwrap();
        let report = dpc_srm(&topo, &demands, &start, &opts).unwrap();
        let mut h: Vec<f64> = topo
            .group(0, 0)
            .unwrap()
            .user_ids()
            .iter()
            .map(|&u| 0.1 / gains[u])
            .collect();
        for j in (0..n - 1).rev() {
            h[j] = h[j].max(h[j + 1]);
        }
        let exact = optimal_single_cell_rate(1.0, &r, &h, topo.budget(0)).unwrap();
        worst_single = worst_single.max((report.sum_rate - exact).abs() / exact);
    }
    verdict(
        7,
        "DC monotonicity and equivalence",
        increases == 0 && worst_x <= 1e-6 && worst_single <= 1e-6,
        format!(
            "50 multi-cell runs ({nontrivial} moved from their start), {increases} trace \
             increases, max |x - H(q)|/H(q) {worst_x:.1e}; 20 single-cell runs within \
             {worst_single:.1e} of the closed form (limits 1e-6)"
        ),
        t.elapsed(),
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_8_pairing_trend() {
    let t = Instant::now();
    let rows = |algorithm: Algorithm, pairing: Pairing| {
        let mut cfg = scenario("seeds = 100");
        cfg.algorithm = algorithm;
        cfg.pairing = pairing;
        run_scenario(&cfg).unwrap().rows
    };
    // averages over the drops both pairings can serve
    let compare = |algorithm: Algorithm, value: fn(&noma_power::scenario::SummaryRow) -> f64| {
        let (ss, sw) = (rows(algorithm, Pairing::SS), rows(algorithm, Pairing::SW));
        let common: Vec<usize> = (0..ss.len())
            .filter(|&k| ss[k].converged && sw[k].converged)
            .collect();
        let mean = |r: &[noma_power::scenario::SummaryRow]| {
            common.iter().map(|&k| value(&r[k])).sum::<f64>() / common.len() as f64
        };
        (mean(&ss), mean(&sw), common.len())
    };
    let (power_ss, power_sw, n_power) = compare(Algorithm::PowerMin, |r| r.sum_power);
    let (rate_ss, rate_sw, n_rate) = compare(Algorithm::RateMax, |r| r.sum_rate);
    verdict(
        8,
        "pairing trend",
        n_power > 0 && n_rate > 0 && power_sw <= power_ss && rate_sw >= rate_ss,
        format!(
            "100 drops at 40 dBm; mean sum power SW {power_sw:.3e} W vs SS {power_ss:.3e} W over \
             {n_power} drops feasible for both; mean sum rate SW {rate_sw:.4e} vs SS {rate_ss:.4e} \
             bit/s over {n_rate}"
        ),
        t.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_9_reproducibility() {
    let t = Instant::now();
    let mut identical = true;
    for algorithm in ["power-min", "rate-max"] {
        let mut cfg = scenario("seed = 11\nseeds = 3\nmultistart = 2");
        cfg.budgets_dbm = vec![30.0, 40.0];
        cfg.algorithm = algorithm.parse().unwrap();
        let (a, b) = (run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
        identical &= summary_csv(&a, OutputFormat::Csv).unwrap()
            == summary_csv(&b, OutputFormat::Csv).unwrap();
        let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        write_artifacts(&a, da.path(), OutputFormat::Csv).unwrap();
        write_artifacts(&b, db.path(), OutputFormat::Csv).unwrap();
        for row in &a.rows {
            for file in ["summary.csv".to_string(), format!("{}.csv", row.trace_file)] {
                identical &= std::fs::read(da.path().join(&file)).unwrap()
                    == std::fs::read(db.path().join(&file)).unwrap();
            }
        }
    }
    verdict(
        9,
        "reproducibility",
        identical,
        format!("summary and trace CSVs byte-identical across two runs: {identical}"),
        t.elapsed(),
        Duration::from_secs(60),
    );
}
