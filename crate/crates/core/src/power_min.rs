//! Sum-power minimization.
//!
//! With the other cells' powers fixed, each (cell, subchannel) group needs a
//! closed-form minimum power in which every user's rate constraint is tight.
//! Collecting those minima gives the interference map `f(q)`, a standard
//! interference function whose unique fixed point is the optimal cell power
//! vector; [`dpc_spm`] finds it by fixed-point iteration.

use crate::error::{Error, Result};
use crate::model::{
    group_interference, rate_factor, CellPowerVector, NetworkTopology, RateDemands,
    UserPowerAllocation,
};

/// Minimum-power allocation for one group with every rate constraint tight.
///
/// Back-substitutes `b_j = 2^{R_j/B} b_{j+1} + (2^{R_j/B} - 1) H_j` from the
/// strongest user down, where `b_j` is the power of users `j..` and
/// `p_j = b_j - b_{j+1}`.
pub fn min_power_user_allocation(
    bandwidth: f64,
    demands: &[f64],
    interference: &[f64],
) -> Vec<f64> {
    debug_assert_eq!(demands.len(), interference.len());
    let n = demands.len();
    let mut powers = vec![0.0; n];
    let mut tail = 0.0;
    for j in (0..n).rev() {
        let a = rate_factor(bandwidth, demands[j]);
        let b = a * tail + (a - 1.0) * interference[j];
        powers[j] = b - tail;
        tail = b;
    }
    powers
}

/// Minimal total power of one group,
/// `Σ_j (2^{R_j/B} - 1) 2^{Σ_{s<j} R_s/B} H_j`.
pub fn minimum_group_power(bandwidth: f64, demands: &[f64], interference: &[f64]) -> f64 {
    let mut cumulative = 0.0;
    let mut total = 0.0;
    for (&r, &h) in demands.iter().zip(interference) {
        let a = rate_factor(bandwidth, r);
        total += (a - 1.0) * (cumulative / bandwidth).exp2() * h;
        cumulative += r;
    }
    total
}

fn f_group(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q: &CellPowerVector,
    cell: usize,
    subchannel: usize,
) -> Result<f64> {
    let h = group_interference(topology, q, cell, subchannel)?;
    Ok(minimum_group_power(
        topology.bandwidth(),
        demands.group(cell, subchannel),
        &h,
    ))
}

/// The interference map `f(q)` of the reduced sum-power problem.
pub fn interference_map(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q: &CellPowerVector,
) -> Result<CellPowerVector> {
    demands.check_shape(topology)?;
    q.check_shape(topology)?;
    let mut out = CellPowerVector::zeros(topology.num_cells(), topology.num_subchannels());
    for ((i, m), _) in topology.groups() {
        out.set(i, m, f_group(topology, demands, q, i, m)?);
    }
    Ok(out)
}

/// Order in which a sweep refreshes the cell powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sweep {
    /// Ascending `(cell, subchannel)`, each update sees the freshest values.
    #[default]
    GaussSeidel,
    /// All groups updated from the previous sweep's vector.
    Jacobi,
}

#[derive(Debug, Clone)]
pub struct SpmOptions {
    /// Max element change (W) for convergence.
    pub tol: f64,
    /// Relative change of the sum power for convergence.
    pub rel_tol: f64,
    pub max_iter: usize,
    pub sweep: Sweep,
    /// Stop as diverged once the sum power exceeds this multiple of the
    /// total budget.
    pub divergence_factor: f64,
}

impl Default for SpmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            rel_tol: 1e-10,
            max_iter: 10_000,
            sweep: Sweep::GaussSeidel,
            divergence_factor: 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub q_star: CellPowerVector,
    pub iterations: usize,
    /// `max |q - f(q)|` at exit, W.
    pub residual: f64,
    /// `Σ_m q_im ≤ Q_i` per cell at exit.
    pub budget_feasible: Vec<bool>,
    pub converged: bool,
    pub diverged: bool,
    /// Sum power after every sweep.
    pub trace: Vec<f64>,
}

impl FixedPointReport {
    /// Converged and within every budget: the sum-power problem is feasible
    /// and `q_star` is its optimum.
    pub fn feasible(&self) -> bool {
        self.converged && self.budget_feasible.iter().all(|&b| b)
    }

    pub fn sum_power(&self) -> f64 {
        self.q_star.sum()
    }
}

/// Distributed power control for sum-power minimization: iterate
/// `q <- f(q)` from `initial` (default `Q_i / M`) until the largest element
/// change is at most `tol` and the relative sum-power change at most
/// `rel_tol`.
///
/// Non-convergence and budget violations are reported on the returned
/// report, never raised.
pub fn dpc_spm(
    topology: &NetworkTopology,
    demands: &RateDemands,
    initial: Option<&CellPowerVector>,
    options: &SpmOptions,
) -> Result<FixedPointReport> {
    if !(options.tol > 0.0) || options.max_iter == 0 {
        return Err(Error::Domain(
            "dpc_spm needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    demands.check_shape(topology)?;
    let mut q = match initial {
        Some(q0) => {
            q0.check_shape(topology)?;
            q0.clone()
        }
        None => CellPowerVector::split_budgets(topology),
    };
    let limit = options.divergence_factor * topology.budgets().iter().sum::<f64>();

    let mut trace = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut prev_sum = q.sum();
    while trace.len() < options.max_iter {
        let before = q.clone();
        match options.sweep {
            Sweep::GaussSeidel => {
                for ((i, m), _) in topology.groups() {
                    let v = f_group(topology, demands, &q, i, m)?;
                    q.set(i, m, v);
                }
            }
            Sweep::Jacobi => q = interference_map(topology, demands, &before)?,
        }
        let sum = q.sum();
        trace.push(sum);

        if !sum.is_finite() || sum > limit {
            diverged = true;
            break;
        }
        let step = q.max_abs_diff(&before);
        let rel = (sum - prev_sum).abs() / sum.max(f64::MIN_POSITIVE);
        prev_sum = sum;
        if step <= options.tol && rel <= options.rel_tol {
            converged = true;
            break;
        }
    }

    let residual = if diverged {
        f64::INFINITY
    } else {
        q.max_abs_diff(&interference_map(topology, demands, &q)?)
    };
    Ok(FixedPointReport {
        budget_feasible: q.within_budgets(topology, 1e-12),
        q_star: q,
        iterations: trace.len(),
        residual,
        converged,
        diverged,
        trace,
    })
}

/// Per-user powers at a converged cell power vector: evaluate `H(q_star)` and
/// apply [`min_power_user_allocation`] to every group.
pub fn assemble_full_solution(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q_star: &CellPowerVector,
    tol: f64,
) -> Result<UserPowerAllocation> {
    let f = interference_map(topology, demands, q_star)?;
    let residual = q_star.max_abs_diff(&f);
    if !(residual <= tol) {
        return Err(Error::InconsistentFixedPoint {
            residual,
            tolerance: tol,
        });
    }
    let groups = topology
        .groups()
        .map(|((i, m), _)| {
            let h = group_interference(topology, q_star, i, m)?;
            Ok(min_power_user_allocation(
                topology.bandwidth(),
                demands.group(i, m),
                &h,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    UserPowerAllocation::from_groups(topology, groups)
}
