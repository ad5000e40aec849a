// A budget sweep over two seeds, written to a temporary directory.

use noma_power::scenario::{
    run_scenario, summary_csv, write_artifacts, OutputFormat, ScenarioConfig,
};

pub fn run_example() -> noma_power::Result<Vec<String>> {
    let cfg = ScenarioConfig::from_toml(
        r#"
        users_per_cell = 4
        num_subchannels = 2
        budgets_dbm = [20.0, 30.0, 40.0]
        algorithm = "power-min"
        pairing = "SW"
        seed = 1
        seeds = 2
        "#,
    )?;
    let artifacts = run_scenario(&cfg)?;
    let dir = std::env::temp_dir().join(format!("noma-pc-sweep-{}", std::process::id()));
    write_artifacts(&artifacts, &dir, OutputFormat::Csv)?;

    let mut lines: Vec<String> = summary_csv(&artifacts, OutputFormat::Csv)?
        .lines()
        .map(String::from)
        .collect();
    lines.push(format!("validation passed: {}", artifacts.passed()));
    let traces = std::fs::read_dir(dir.join("traces"))?.count();
    lines.push(format!("{traces} trace files next to summary.csv"));
    std::fs::remove_dir_all(&dir)?;
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> noma_power::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
