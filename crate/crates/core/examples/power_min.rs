// Sum-power minimization on a two-cell network that mirrors itself.
//
// Each cell serves two users on one subchannel and needs 1 bit/s/Hz per user.
// The fixed point gives each cell 1 W, split 0.7 W / 0.3 W.

use noma_power::model::{CellPowerVector, NetworkTopology, RateDemands, UserLink};
use noma_power::power_min::{
    assemble_full_solution, dpc_spm, min_power_user_allocation, SpmOptions, Sweep,
};

pub fn run_example() -> noma_power::Result<Vec<String>> {
    let mut lines = Vec::new();

    // one group on its own: interference (7, 3, 1), unit demands
    let p = min_power_user_allocation(1.0, &[1.0; 3], &[7.0, 3.0, 1.0]);
    lines.push(format!("closed form p = {p:?}"));

    let topo = NetworkTopology::builder(2, 1)
        .bandwidth(1.0)
        .noise_power(0.1)
        .uniform_budget(10.0)
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

    for sweep in [Sweep::GaussSeidel, Sweep::Jacobi] {
        let opts = SpmOptions {
            sweep,
            ..SpmOptions::default()
        };
        let start = CellPowerVector::split_budgets(&topo);
        let r = dpc_spm(&topo, &demands, Some(&start), &opts)?;
        lines.push(format!(
            "{sweep:?}: q* = {:?} after {} sweeps, sum {:.9} W",
            r.q_star.values(),
            r.iterations,
            r.sum_power()
        ));
    }

    let r = dpc_spm(&topo, &demands, None, &SpmOptions::default())?;
    let p = assemble_full_solution(&topo, &demands, &r.q_star, 1e-7)?;
    lines.push(format!("cell 0 users: {:?}", p.group(0, 0)));
    Ok(lines)
}

#[allow(dead_code)]
fn main() -> noma_power::Result<()> {
    for line in run_example()? {
        println!("{line}");
    }
    Ok(())
}
