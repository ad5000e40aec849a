// The brute-force and numerical checks next to the solvers they validate.

use noma_power::model::{NetworkTopology, RateDemands, UserLink};
use noma_power::oracle::{
    fd_hessian_psd, grid_power_min, grid_rate_max_group, standard_function_probe, Property,
};
use noma_power::power_min::{dpc_spm, interference_map, SpmOptions};
use noma_power::single_cell::{negative_sum_rate, optimal_single_cell_rate};
use noma_power::CellPowerVector;

pub fn run_example() -> noma_power::Result<Vec<String>> {
    let mut lines = Vec::new();
    let topo = NetworkTopology::builder(2, 1)
        .bandwidth(1.0)
        .noise_power(0.1)
        .uniform_budget(3.0)
        .group(
            0,
            0,
            vec![
                UserLink::new(0, vec![0.5, 0.1]),
                UserLink::new(1, vec![1.0, 0.2]),
            ],
        )
        .group(
            1,
            0,
            vec![
                UserLink::new(2, vec![0.1, 0.5]),
                UserLink::new(3, vec![0.2, 1.0]),
            ],
        )
        .build()?;
    let demands = RateDemands::uniform(&topo, 1.0)?;

    let grid = grid_power_min(&topo, &demands, 0.01)?;
    let fixed = dpc_spm(&topo, &demands, None, &SpmOptions::default())?;
    lines.push(format!(
        "sum power: grid {:.4} W ({} points), fixed point {:.9} W",
        grid.sum_power,
        grid.points_visited,
        fixed.sum_power()
    ));

    let best = grid_rate_max_group(1.0, &[1.0; 3], &[7.0, 3.0, 1.0], 20.0, 0.01)?;
    let exact = optimal_single_cell_rate(1.0, &[1.0; 3], &[7.0, 3.0, 1.0], 20.0)?;
    lines.push(format!(
        "sum rate: grid {:.6}, closed form {exact:.6}",
        best.sum_rate
    ));

    let h = [7.0, 3.0, 1.0];
    let hess = fd_hessian_psd(|p| negative_sum_rate(1.0, p, &h), &[13.5, 4.75, 1.75], None)?;
    lines.push(format!(
        "leading minors {:?}, PSD {}",
        hess.minors
            .iter()
            .map(|m| format!("{m:.3e}"))
            .collect::<Vec<_>>(),
        hess.psd
    ));

    let report = standard_function_probe(
        |q| {
            let q = CellPowerVector::from_values(2, 1, q.to_vec()).expect("two entries");
            interference_map(&topo, &demands, &q)
                .expect("valid shape")
                .values()
                .to_vec()
        },
        2,
        3.0,
        1000,
        7,
    );
    lines.push(format!(
        "interference map: {} trials, {} counterexamples",
        report.trials,
        report.counterexamples.len()
    ));
    let identity = standard_function_probe(|q| q.to_vec(), 2, 3.0, 100, 7);
    lines.push(format!(
        "identity map: {} scalability counterexamples",
        identity.count(Property::Scalability)
    ));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> noma_power::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
