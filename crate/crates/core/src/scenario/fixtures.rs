//! Small instances with known answers, runnable from the command line.

use crate::error::Result;
use crate::model::{CellPowerVector, NetworkTopology, RateDemands, UserLink};
use crate::power_min::{assemble_full_solution, dpc_spm, min_power_user_allocation, SpmOptions};
use crate::rate_max::{dpc_srm, SrmOptions, StartPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Two cells on one subchannel, two users each, mirror images of each
/// other. The sum-power optimum is 1 W per cell with user powers 0.7 and
/// 0.3 W.
pub fn symmetric_two_cell(budget: f64) -> Result<NetworkTopology> {
    NetworkTopology::builder(2, 1)
        .bandwidth(1.0)
        .noise_power(0.1)
        .uniform_budget(budget)
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
        .build()
}

/// One cell, one subchannel, effective interference (2, 1) and a 10 W
/// budget. With unit demands the best sum rate is `1 + log2(5)`.
pub fn single_cell_pair() -> Result<NetworkTopology> {
    NetworkTopology::builder(1, 1)
        .bandwidth(1.0)
        .noise_power(1.0)
        .uniform_budget(10.0)
        .group(
            0,
            0,
            vec![UserLink::new(0, vec![0.5]), UserLink::new(1, vec![1.0])],
        )
        .build()
}

fn check(name: &'static str, got: f64, want: f64, tol: f64) -> FixtureOutcome {
    FixtureOutcome {
        name,
        passed: (got - want).abs() <= tol,
        detail: format!("got {got}, expected {want} ± {tol}"),
    }
}

/// Run every fixture.
pub fn run_fixtures() -> Result<Vec<FixtureOutcome>> {
    let mut out = Vec::new();

    let topo = symmetric_two_cell(10.0)?;
    let d = RateDemands::uniform(&topo, 1.0)?;
    let r = dpc_spm(&topo, &d, None, &SpmOptions::default())?;
    out.push(check(
        "symmetric two-cell sum power",
        r.sum_power(),
        2.0,
        1e-6,
    ));
    let p = assemble_full_solution(&topo, &d, &r.q_star, 1e-7)?;
    out.push(check(
        "symmetric two-cell weak-user power",
        p.group(0, 0)[0],
        0.7,
        1e-6,
    ));

    let p = min_power_user_allocation(1.0, &[1.0; 3], &[7.0, 3.0, 1.0]);
    out.push(FixtureOutcome {
        name: "three-user closed form",
        passed: p == [12.0, 4.0, 1.0],
        detail: format!("got {p:?}, expected [12.0, 4.0, 1.0]"),
    });

    let topo = single_cell_pair()?;
    let d = RateDemands::uniform(&topo, 1.0)?;
    let start = StartPoint::scaled_fixed_point(&topo, &d, 0.0)?;
    let r = dpc_srm(&topo, &d, &start, &SrmOptions::default())?;
    out.push(check(
        "single-cell sum rate",
        r.sum_rate,
        1.0 + 5f64.log2(),
        1e-6,
    ));

    let zero = CellPowerVector::zeros(2, 1);
    let topo = symmetric_two_cell(0.5)?;
    let d = RateDemands::uniform(&topo, 1.0)?;
    let r = dpc_spm(&topo, &d, Some(&zero), &SpmOptions::default())?;
    out.push(FixtureOutcome {
        name: "budget below the fixed point is infeasible",
        passed: r.converged && !r.feasible(),
        detail: format!(
            "converged {}, budget flags {:?}",
            r.converged, r.budget_feasible
        ),
    });

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_pass() {
        for f in run_fixtures().unwrap() {
            assert!(f.passed, "{}: {}", f.name, f.detail);
        }
    }
}
