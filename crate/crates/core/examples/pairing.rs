// User pairing patterns and their effect on sum power.
//
// Prints the groups for eight users sorted from weakest (1) to strongest (8),
// then the mean minimum sum power of each pattern over a few random drops.

use noma_power::model::RateDemands;
use noma_power::power_min::{dpc_spm, SpmOptions};
use noma_power::scenario::{
    build_topology, dbm_to_watts, drop_users, pair_users, Pairing, ScenarioConfig,
};

pub fn run_example() -> noma_power::Result<Vec<String>> {
    let mut lines = Vec::new();
    let users: Vec<usize> = (1..=8).collect();
    for method in [Pairing::SS, Pairing::SW, Pairing::SM] {
        lines.push(format!("{method}: {:?}", pair_users(&users, 2, method)?));
    }

    let cfg = ScenarioConfig::from_toml(
        r#"
        users_per_cell = 4
        num_subchannels = 2
        budgets_dbm = [40.0]
        algorithm = "power-min"
        "#,
    )?;
    let mut totals = [0.0; 3];
    let mut common = 0;
    for seed in 0..20 {
        let drop = drop_users(&cfg, seed)?;
        let mut powers = [0.0; 3];
        let mut all = true;
        for (k, method) in [Pairing::SS, Pairing::SW, Pairing::SM]
            .into_iter()
            .enumerate()
        {
            let topo = build_topology(&cfg, &drop, method, dbm_to_watts(40.0))?;
            let demands = RateDemands::uniform(&topo, 3e5)?;
            let r = dpc_spm(&topo, &demands, None, &SpmOptions::default())?;
            all &= r.converged && r.feasible();
            powers[k] = r.sum_power();
        }
        if all {
            common += 1;
            for k in 0..3 {
                totals[k] += powers[k];
            }
        }
    }
    lines.push(format!("{common} of 20 drops feasible under every pattern"));
    for (k, method) in [Pairing::SS, Pairing::SW, Pairing::SM]
        .into_iter()
        .enumerate()
    {
        lines.push(format!(
            "{method}: mean sum power {:.3e} W",
            totals[k] / common.max(1) as f64
        ));
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
