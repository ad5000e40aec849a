// Distributed sum-rate maximization on a generated three-cell network.
//
// Starts from a random feasible point, runs the cell-by-cell
// difference-of-convex loop and prints the objective after every sweep.
// The objective is the negative sum rate of the transformed problem, so the
// trace only goes down.

use noma_power::model::RateDemands;
use noma_power::rate_max::{dpc_srm, SrmOptions, StartPoint};
use noma_power::scenario::{generate_channels, ScenarioConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> noma_power::Result<Vec<String>> {
    let cfg = ScenarioConfig::from_toml(
        r#"
        users_per_cell = 4
        num_subchannels = 2
        budgets_dbm = [40.0]
        algorithm = "rate-max"
        "#,
    )?;
    let mut lines = Vec::new();
    // first seed whose demands fit the budget
    for seed in 0..50 {
        let topo = generate_channels(&cfg, seed)?;
        let demands = RateDemands::uniform(&topo, 3e5)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Ok(start) = StartPoint::random(&topo, &demands, &mut rng) else {
            continue;
        };
        let report = dpc_srm(&topo, &demands, &start, &SrmOptions::default())?;
        lines.push(format!(
            "seed {seed}: {} sweeps, converged {}",
            report.outer_iterations, report.converged
        ));
        for (k, v) in report.trace.iter().enumerate() {
            lines.push(format!("  sweep {k}: {v:.3} bit/s"));
        }
        lines.push(format!(
            "sum rate {:.4e} bit/s with {:.4} W in total",
            report.sum_rate,
            report.q.sum()
        ));
        break;
    }
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> noma_power::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
