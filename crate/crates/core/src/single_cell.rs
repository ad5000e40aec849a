//! Sum-rate maximization inside one (cell, subchannel) group with the group's
//! total power and effective interference held fixed.
//!
//! The problem is convex. Its optimum keeps every user except the strongest
//! at exactly its demanded rate and gives all remaining power to the strongest
//! user.

use crate::error::{Error, Result};
use crate::model::{rate_factor, shannon_rate};
use crate::power_min::minimum_group_power;

/// Relative slack allowed when comparing the group power with the minimum
/// it needs.
const FEASIBILITY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    /// Minimum total power meeting every demand, W.
    pub required: f64,
    pub feasible: bool,
}

/// Whether `total_power` can meet every demand of the group.
pub fn single_cell_feasible(
    bandwidth: f64,
    demands: &[f64],
    interference: &[f64],
    total_power: f64,
) -> Feasibility {
    let required = minimum_group_power(bandwidth, demands, interference);
    Feasibility {
        required,
        feasible: total_power >= required * (1.0 - FEASIBILITY_REL_TOL),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleCellAllocation {
    pub powers: Vec<f64>,
    /// The strongest user ended up below its own demand. Only reachable
    /// through rounding at the feasibility boundary.
    pub strong_user_short: bool,
}

/// Sum-rate optimal powers of one group at total power `total_power`.
pub fn optimal_single_cell_allocation(
    bandwidth: f64,
    demands: &[f64],
    interference: &[f64],
    total_power: f64,
) -> Result<SingleCellAllocation> {
    let feas = single_cell_feasible(bandwidth, demands, interference, total_power);
    if !feas.feasible {
        return Err(Error::Infeasible {
            required: feas.required,
            available: total_power,
        });
    }
    let n = demands.len();
    let mut powers = vec![0.0; n];
    // power of users j.. (weak users pinned to their demand in order)
    let mut tail = total_power;
    for j in 0..n - 1 {
        let a = rate_factor(bandwidth, demands[j]);
        let next = (tail - (a - 1.0) * interference[j]) / a;
        powers[j] = tail - next;
        tail = next;
    }
    powers[n - 1] = tail;

    let strong_rate = shannon_rate(bandwidth, tail / interference[n - 1]);
    Ok(SingleCellAllocation {
        powers,
        strong_user_short: strong_rate < demands[n - 1] * (1.0 - crate::model::REL_TOL),
    })
}

/// Optimal sum rate of one group (bit/s): the strongest user's rate plus the
/// weak users' demands.
pub fn optimal_single_cell_rate(
    bandwidth: f64,
    demands: &[f64],
    interference: &[f64],
    total_power: f64,
) -> Result<f64> {
    let feas = single_cell_feasible(bandwidth, demands, interference, total_power);
    if !feas.feasible {
        return Err(Error::Infeasible {
            required: feas.required,
            available: total_power,
        });
    }
    let n = demands.len();
    let strong_h = interference[n - 1];
    let weak_sum: f64 = demands[..n - 1].iter().sum();
    let mut sinr = total_power / ((weak_sum / bandwidth).exp2() * strong_h);
    // Σ_{l=j}^{n-2} R_l, accumulated from the strong end
    let mut suffix = 0.0;
    for j in (0..n - 1).rev() {
        suffix += demands[j];
        sinr -= (rate_factor(bandwidth, demands[j]) - 1.0) * interference[j]
            / ((suffix / bandwidth).exp2() * strong_h);
    }
    Ok(shannon_rate(bandwidth, sinr.max(0.0)) + weak_sum)
}

/// Negative group sum rate (bit/s) at user powers `powers`.
pub fn negative_sum_rate(bandwidth: f64, powers: &[f64], interference: &[f64]) -> f64 {
    -crate::model::group_rates(bandwidth, powers, interference)
        .iter()
        .sum::<f64>()
}

/// Hessian of [`negative_sum_rate`] with respect to the user powers.
///
/// Entry `(a, b)` depends only on `min(a, b)`: every row repeats the diagonal
/// entry of the smaller index to the right of the diagonal.
pub fn negative_sum_rate_hessian(
    bandwidth: f64,
    powers: &[f64],
    interference: &[f64],
) -> Vec<Vec<f64>> {
    let n = powers.len();
    let scale = bandwidth / std::f64::consts::LN_2;
    // tail[j]: power of users j.. of the group
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + powers[j];
    }
    let mut diag = Vec::with_capacity(n);
    let mut acc = 0.0;
    for j in 0..n {
        acc += (tail[j] + interference[j]).powi(-2);
        if j > 0 {
            acc -= (tail[j] + interference[j - 1]).powi(-2);
        }
        diag.push(scale * acc);
    }
    (0..n)
        .map(|a| (0..n).map(|b| diag[a.min(b)]).collect())
        .collect()
}
