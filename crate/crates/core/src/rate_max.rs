//! Multi-cell sum-rate maximization.
//!
//! Substituting the single-cell optimum into every group turns the problem
//! into one over the cell powers `q` and an auxiliary interference proxy `x`
//! with linear constraints. Each cell's part of the objective, `K_i`, splits
//! into a difference of convex functions `F_i - G_i`. [`dpc_srm`] sweeps the
//! cells and, for each one, repeatedly linearizes `G_i` and solves the
//! resulting convex subproblem with the other cells frozen.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    group_interference, group_rates, rate_factor, AuxiliaryVector, CellPowerVector,
    NetworkTopology, RateDemands, UserPowerAllocation,
};
use crate::power_min::{dpc_spm, interference_map, minimum_group_power, SpmOptions};
use crate::single_cell::optimal_single_cell_allocation;

const LN_2: f64 = std::f64::consts::LN_2;

/// Relative slack tolerated on the subproblem's linear constraints before a
/// violation counts as infeasibility rather than rounding.
const FEASIBILITY_TOL: f64 = 1e-7;

/// Constants of one group in the transformed problem.
#[derive(Debug, Clone)]
struct GroupCoeffs {
    /// `(2^{R_j/B} - 1) 2^{Σ_{s<j} R_s/B}` for every user.
    weights: Vec<f64>,
    /// `2^{Σ_{j<N} R_j/B}` over the weak users.
    scale: f64,
    /// `2^{R_N/B} - 1` of the strongest user.
    strong_factor: f64,
    weak_rate_sum: f64,
}

impl GroupCoeffs {
    fn new(bandwidth: f64, demands: &[f64]) -> Self {
        let n = demands.len();
        let mut cumulative = 0.0;
        let mut weights = Vec::with_capacity(n);
        for &r in demands {
            weights.push((rate_factor(bandwidth, r) - 1.0) * (cumulative / bandwidth).exp2());
            cumulative += r;
        }
        let weak_rate_sum: f64 = demands[..n - 1].iter().sum();
        Self {
            weights,
            scale: (weak_rate_sum / bandwidth).exp2(),
            strong_factor: rate_factor(bandwidth, demands[n - 1]) - 1.0,
            weak_rate_sum,
        }
    }

    fn weak_load(&self, x: &[f64]) -> f64 {
        let n = x.len();
        self.weights[..n - 1]
            .iter()
            .zip(&x[..n - 1])
            .map(|(w, x)| w * x)
            .sum()
    }

    /// Argument of the logarithm in `F`:
    /// `x_N + (q - Σ_{j<N} w_j x_j) / 2^{Σ_{j<N} R_j/B}`.
    fn log_argument(&self, q: f64, x: &[f64]) -> f64 {
        x[x.len() - 1] + (q - self.weak_load(x)) / self.scale
    }
}

fn cell_coeffs(topology: &NetworkTopology, demands: &RateDemands, cell: usize) -> Vec<GroupCoeffs> {
    (0..topology.num_subchannels())
        .map(|m| GroupCoeffs::new(topology.bandwidth(), demands.group(cell, m)))
        .collect()
}

fn check_cell_args(
    topology: &NetworkTopology,
    demands: &RateDemands,
    cell: usize,
    q_i: &[f64],
    x_i: &[Vec<f64>],
) -> Result<()> {
    topology.check_group(cell, 0)?;
    demands.check_shape(topology)?;
    let m = topology.num_subchannels();
    if q_i.len() != m || x_i.len() != m {
        return Err(Error::Index(format!(
            "cell {cell}: {} powers and {} auxiliary groups for {m} subchannels",
            q_i.len(),
            x_i.len()
        )));
    }
    for (s, x) in x_i.iter().enumerate() {
        let len = topology.group(cell, s)?.len();
        if x.len() != len {
            return Err(Error::Index(format!(
                "group ({cell}, {s}): {} auxiliary entries for {len} users",
                x.len()
            )));
        }
    }
    Ok(())
}

/// Largest `q_im` that keeps every other cell's auxiliary constraints
/// satisfied with `x` and the other powers frozen. `+inf` with one cell; a
/// non-positive value is legal and binding.
pub fn power_cap(
    topology: &NetworkTopology,
    q: &CellPowerVector,
    x: &AuxiliaryVector,
    cell: usize,
    subchannel: usize,
) -> Result<f64> {
    topology.check_group(cell, subchannel)?;
    q.check_shape(topology)?;
    x.check_shape(topology)?;
    let mut cap = f64::INFINITY;
    for n in (0..topology.num_cells()).filter(|&n| n != cell) {
        let group = topology.group(n, subchannel)?;
        let xn = x.group(n, subchannel);
        for l in 0..group.len() {
            let others: f64 = (0..topology.num_cells())
                .filter(|&k| k != cell && k != n)
                .map(|k| q.get(k, subchannel) * group.gain_from(k, l))
                .sum();
            let slack_base = group.own_gain(l);
            let from_cell = group.gain_from(cell, l);
            // user l decodes every j <= l
            for &xj in &xn[..=l] {
                let c = (slack_base * xj - others - topology.noise_power()) / from_cell;
                cap = cap.min(c);
            }
        }
    }
    Ok(cap)
}

/// Caps of every subchannel of `cell`.
pub fn power_caps(
    topology: &NetworkTopology,
    q: &CellPowerVector,
    x: &AuxiliaryVector,
    cell: usize,
) -> Result<Vec<f64>> {
    (0..topology.num_subchannels())
        .map(|m| power_cap(topology, q, x, cell, m))
        .collect()
}

/// `(F_i, G_i)` of cell `cell` in bit/s, with `K_i = F_i - G_i` the negative
/// sum rate the cell's groups reach when `x` is their effective interference.
///
/// `F_i = -Σ_m [B log2(x_N + (q_m - Σ_{j<N} w_j x_j) / 2^{Σ_{j<N} R_j/B}) + Σ_{j<N} R_j]`
/// and `G_i = -Σ_m B log2(x_N)`.
pub fn dc_objective_parts(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q_i: &[f64],
    x_i: &[Vec<f64>],
    cell: usize,
) -> Result<(f64, f64)> {
    check_cell_args(topology, demands, cell, q_i, x_i)?;
    let bw = topology.bandwidth();
    let (mut f, mut g) = (0.0, 0.0);
    for (m, c) in cell_coeffs(topology, demands, cell).iter().enumerate() {
        let x = &x_i[m];
        let u = c.log_argument(q_i[m], x);
        let strong = x[x.len() - 1];
        if !(u > 0.0 && strong > 0.0) {
            return Err(Error::Domain(format!(
                "cell {cell}, subchannel {m}: log argument {u:e}, strong auxiliary {strong:e}"
            )));
        }
        f -= bw * u.log2() + c.weak_rate_sum;
        g -= bw * strong.log2();
    }
    Ok((f, g))
}

/// `K_i = F_i - G_i`.
pub fn cell_objective(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q_i: &[f64],
    x_i: &[Vec<f64>],
    cell: usize,
) -> Result<f64> {
    let (f, g) = dc_objective_parts(topology, demands, q_i, x_i, cell)?;
    Ok(f - g)
}

/// Gradient of `G_i` with respect to `x_i`: `-B / (ln2 x_N)` on each group's
/// strongest user, zero elsewhere.
pub fn dc_gradient(topology: &NetworkTopology, x_i: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let bw = topology.bandwidth();
    x_i.iter()
        .map(|x| {
            let mut g = vec![0.0; x.len()];
            let n = x.len();
            g[n - 1] = -bw / (LN_2 * x[n - 1]);
            g
        })
        .collect()
}

/// Convex majorant of `K_i` built at `x_lin`:
/// `F_i(q, x) - G_i(x_lin) - ∇G_i(x_lin)ᵀ(x - x_lin)`.
pub fn surrogate_objective(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q_i: &[f64],
    x_i: &[Vec<f64>],
    x_lin: &[Vec<f64>],
    cell: usize,
) -> Result<f64> {
    let (f, _) = dc_objective_parts(topology, demands, q_i, x_i, cell)?;
    let g_lin: f64 = x_lin
        .iter()
        .map(|x| -topology.bandwidth() * x[x.len() - 1].log2())
        .sum();
    let grad = dc_gradient(topology, x_lin);
    let inner: f64 = grad
        .iter()
        .zip(x_i.iter().zip(x_lin))
        .flat_map(|(g, (x, xl))| {
            g.iter()
                .zip(x.iter().zip(xl))
                .map(|(g, (x, xl))| g * (x - xl))
        })
        .sum();
    Ok(f - g_lin - inner)
}

/// `Σ_i K_i`: the transformed objective, equal to minus the network sum
/// rate when `x = H(q)`.
pub fn transformed_objective(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q: &CellPowerVector,
    x: &AuxiliaryVector,
) -> Result<f64> {
    q.check_shape(topology)?;
    x.check_shape(topology)?;
    (0..topology.num_cells())
        .map(|i| cell_objective(topology, demands, q.cell(i), &cell_aux(topology, x, i), i))
        .sum()
}

fn cell_aux(topology: &NetworkTopology, x: &AuxiliaryVector, cell: usize) -> Vec<Vec<f64>> {
    (0..topology.num_subchannels())
        .map(|m| x.group(cell, m).to_vec())
        .collect()
}

/// One accepted point of a cell's DC iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DcIterate {
    pub q_i: Vec<f64>,
    pub x_i: Vec<Vec<f64>>,
    /// `K_i` at the point, bit/s.
    pub objective_value: f64,
    /// Convex surrogate at the point, bit/s.
    pub surrogate_value: f64,
    /// Linearizations used to reach the point.
    pub inner_iterations: usize,
    /// Largest relative violation of the subproblem's stationarity
    /// conditions.
    pub kkt_residual: f64,
}

/// One group of the subproblem, reduced to its strong-user parameters.
///
/// With the weak auxiliaries at their lower bounds the group only depends on
/// `s = (q - L_weak) / scale`; the strong auxiliary then solves
/// `clamp(a - s, h, s / c)`.
#[derive(Debug, Clone, Copy)]
struct Reduced {
    weak_floor: f64,
    scale: f64,
    c: f64,
    /// Linearization point of the strong auxiliary.
    a: f64,
    /// Lower bound of the strong auxiliary.
    h: f64,
    upper: f64,
}

impl Reduced {
    fn s_min(&self) -> f64 {
        self.c * self.h
    }

    fn lower(&self) -> f64 {
        self.weak_floor + self.scale * self.s_min()
    }

    fn s_of_q(&self, q: f64) -> f64 {
        ((q - self.weak_floor) / self.scale).max(self.s_min())
    }

    fn strong(&self, s: f64) -> f64 {
        (self.a - s).min(s / self.c).max(self.h)
    }

    /// `-(ln2 / B) dV/ds` of the partially minimized surrogate; continuous
    /// and non-increasing in `s`.
    fn marginal(&self, s: f64) -> f64 {
        if self.a - s > s / self.c && s / self.c >= self.h {
            1.0 / s - 1.0 / (self.c * self.a)
        } else if self.a - s < self.h {
            1.0 / (self.h + s)
        } else {
            1.0 / self.a
        }
    }

    /// Smallest `s` whose marginal drops to `t`.
    fn s_at(&self, t: f64) -> f64 {
        let s0 = self.s_min();
        let s = if t >= self.marginal(s0) {
            s0
        } else if t > 1.0 / self.a {
            1.0 / (t + 1.0 / (self.c * self.a))
        } else if t < 1.0 / self.a {
            1.0 / t - self.h
        } else {
            self.a * self.c / (1.0 + self.c)
        };
        s.max(s0)
    }

    /// Group power at dual price `tau`.
    fn q_at(&self, tau: f64) -> f64 {
        let s = self.s_at(tau * self.scale);
        (self.weak_floor + self.scale * s).min(self.upper)
    }
}

/// Minimize the convex surrogate of cell `cell` at linearization point
/// `x_lin` over `(q_i, x_i)` subject to the group power floors, `x_i ≥ H_i`,
/// the caps `q_im ≤ caps[m]` and `Σ_m q_im ≤ budget`.
///
/// `q` supplies the other cells' powers (its row for `cell` is ignored).
/// The weak auxiliaries sit at their lower bound at any optimum, the strong
/// ones have a closed form given `q_im`, and the split of the budget is found
/// by bisection on the budget multiplier.
#[allow(clippy::too_many_arguments)]
pub fn solve_convex_subproblem(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q: &CellPowerVector,
    cell: usize,
    x_lin: &[Vec<f64>],
    caps: &[f64],
    budget: f64,
) -> Result<DcIterate> {
    let m_count = topology.num_subchannels();
    check_cell_args(topology, demands, cell, q.cell(cell), x_lin)?;
    if caps.len() != m_count {
        return Err(Error::Index(format!(
            "{} caps for {m_count} subchannels",
            caps.len()
        )));
    }
    if let Some(bad) = x_lin
        .iter()
        .flatten()
        .find(|v| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::Domain(format!(
            "linearization entry {bad} must be positive"
        )));
    }

    let coeffs = cell_coeffs(topology, demands, cell);
    let mut floors = Vec::with_capacity(m_count);
    let mut groups = Vec::with_capacity(m_count);
    for (m, c) in coeffs.iter().enumerate() {
        let h = group_interference(topology, q, cell, m)?;
        let n = h.len();
        let mut r = Reduced {
            weak_floor: c.weak_load(&h),
            scale: c.scale,
            c: c.strong_factor,
            a: x_lin[m][n - 1],
            h: h[n - 1],
            upper: caps[m],
        };
        let lower = r.lower();
        if r.upper < lower {
            if r.upper < lower * (1.0 - FEASIBILITY_TOL) {
                return Err(Error::SubproblemInfeasible {
                    cell,
                    family: "power cap",
                    detail: format!(
                        "subchannel {m}: cap {:e} W below the rate floor {lower:e} W",
                        r.upper
                    ),
                });
            }
            r.upper = lower;
        }
        floors.push(h);
        groups.push(r);
    }

    let floor_total: f64 = groups.iter().map(Reduced::lower).sum();
    if floor_total > budget * (1.0 + FEASIBILITY_TOL) {
        return Err(Error::SubproblemInfeasible {
            cell,
            family: "budget",
            detail: format!("rate floors need {floor_total:e} W of {budget:e} W"),
        });
    }

    let upper_total: f64 = groups.iter().map(|g| g.upper).sum();
    let (powers, tau) = if upper_total <= budget {
        (groups.iter().map(|g| g.upper).collect::<Vec<_>>(), 0.0)
    } else if floor_total >= budget {
        (groups.iter().map(Reduced::lower).collect(), f64::INFINITY)
    } else {
        split_budget(&groups, budget)
    };

    let mut x_i = floors;
    let mut kkt = 0.0f64;
    for (m, g) in groups.iter().enumerate() {
        let s = g.s_of_q(powers[m]);
        let n = x_i[m].len();
        x_i[m][n - 1] = g.strong(s);
        kkt = kkt.max(stationarity_violation(g, powers[m], s, tau));
    }

    let objective_value = cell_objective(topology, demands, &powers, &x_i, cell)?;
    let surrogate_value = surrogate_objective(topology, demands, &powers, &x_i, x_lin, cell)?;
    Ok(DcIterate {
        q_i: powers,
        x_i,
        objective_value,
        surrogate_value,
        inner_iterations: 1,
        kkt_residual: kkt,
    })
}

/// Budget-exhausting split by bisection on the multiplier, interpolated
/// between the bracket ends so flat marginals still meet the budget exactly.
fn split_budget(groups: &[Reduced], budget: f64) -> (Vec<f64>, f64) {
    let total = |tau: f64| groups.iter().map(|g| g.q_at(tau)).sum::<f64>();
    let mut hi = groups
        .iter()
        .map(|g| g.marginal(g.s_min()) / g.scale)
        .fold(0.0, f64::max);
    let mut lo = hi * 0.5;
    while total(lo) < budget && lo > f64::MIN_POSITIVE {
        hi = lo;
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if total(mid) >= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q_lo: Vec<f64> = groups.iter().map(|g| g.q_at(lo)).collect();
    let q_hi: Vec<f64> = groups.iter().map(|g| g.q_at(hi)).collect();
    let (t_lo, t_hi) = (q_lo.iter().sum::<f64>(), q_hi.iter().sum::<f64>());
    let theta = if t_lo > t_hi {
        ((budget - t_hi) / (t_lo - t_hi)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let powers = q_lo
        .iter()
        .zip(&q_hi)
        .map(|(l, h)| h + theta * (l - h))
        .collect();
    (powers, (lo * hi).sqrt())
}

fn stationarity_violation(g: &Reduced, q: f64, s: f64, tau: f64) -> f64 {
    if tau == 0.0 || g.upper <= g.lower() {
        return 0.0;
    }
    let at_upper = q >= g.upper * (1.0 - 1e-12);
    let at_lower = q <= g.lower() * (1.0 + 1e-12);
    if tau.is_infinite() {
        return 0.0;
    }
    let target = tau * g.scale;
    let marginal = g.marginal(s);
    let gap = (marginal - target) / target;
    if at_upper {
        (-gap).max(0.0)
    } else if at_lower {
        gap.max(0.0)
    } else {
        gap.abs()
    }
}

/// A feasible point `(q, x)` of the transformed problem.
#[derive(Debug, Clone, PartialEq)]
pub struct StartPoint {
    pub q: CellPowerVector,
    pub x: AuxiliaryVector,
}

impl StartPoint {
    /// The sum-power optimum scaled by one common factor until the first
    /// cell's budget binds.
    ///
    /// `reserve` in `[0, 1]` sets how far above `H(q)` the auxiliaries start:
    /// `0` gives `x = H(q)`, `1` inflates every group's auxiliaries until the
    /// group's power floor equals its power. Slack in `x` is what lets the
    /// other cells raise their powers in the first sweeps.
    pub fn scaled_fixed_point(
        topology: &NetworkTopology,
        demands: &RateDemands,
        reserve: f64,
    ) -> Result<Self> {
        Self::from_extra(topology, demands, None, 1.0, reserve)
    }

    /// A random feasible point: the fixed point of `q = f(q) + d` for a
    /// random non-negative `d`, scaled by a random common factor that keeps
    /// every budget, with per-user random auxiliary reserve.
    pub fn random(
        topology: &NetworkTopology,
        demands: &RateDemands,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let (ni, nm) = (topology.num_cells(), topology.num_subchannels());
        let mut spread = 1.0;
        for _ in 0..60 {
            let extra: Vec<f64> = (0..ni * nm)
                .map(|k| spread * rng.random::<f64>() * topology.budget(k / nm) / nm as f64)
                .collect();
            let extra = CellPowerVector::from_values(ni, nm, extra)?;
            let fill = rng.random::<f64>();
            let reserve = rng.random::<f64>();
            match Self::from_extra(topology, demands, Some(&extra), fill, reserve) {
                Err(Error::InitialPoint(_)) => spread *= 0.5,
                other => return other,
            }
        }
        Err(Error::InitialPoint("no random feasible point found".into()))
    }

    fn from_extra(
        topology: &NetworkTopology,
        demands: &RateDemands,
        extra: Option<&CellPowerVector>,
        fill: f64,
        reserve: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reserve) {
            return Err(Error::InitialPoint(format!(
                "reserve {reserve} outside [0, 1]"
            )));
        }
        let base = fixed_point_with_offset(topology, demands, extra)?;
        let lambda_max = (0..topology.num_cells())
            .map(|i| topology.budget(i) / base.cell_total(i))
            .fold(f64::INFINITY, f64::min);
        if !(lambda_max >= 1.0) {
            return Err(Error::InitialPoint(format!(
                "rate demands need {:.3}x the available budget",
                1.0 / lambda_max
            )));
        }
        let lambda = 1.0 + fill * (lambda_max - 1.0);
        // The binding cell must not overshoot through rounding.
        let q = base.scaled(lambda * (1.0 - 1e-12));
        let f = interference_map(topology, demands, &q)?;
        let mut x = AuxiliaryVector::from_interference(topology, &q)?;
        for ((i, m), _) in topology.groups() {
            let inflate = 1.0 + reserve * (q.get(i, m) / f.get(i, m) - 1.0).max(0.0);
            for v in x.group_mut(i, m) {
                *v *= inflate;
            }
        }
        Ok(Self { q, x })
    }

    /// Errors unless the point satisfies every constraint of the transformed
    /// problem within relative `tol`.
    pub fn check(&self, topology: &NetworkTopology, demands: &RateDemands, tol: f64) -> Result<()> {
        self.q.check_shape(topology)?;
        self.x.check_shape(topology)?;
        demands.check_shape(topology)?;
        for (i, ok) in self.q.within_budgets(topology, tol).iter().enumerate() {
            if !ok {
                return Err(Error::InitialPoint(format!("cell {i} exceeds its budget")));
            }
        }
        for ((i, m), _) in topology.groups() {
            let h = group_interference(topology, &self.q, i, m)?;
            let x = self.x.group(i, m);
            if let Some(j) = (0..h.len()).find(|&j| x[j] < h[j] * (1.0 - tol)) {
                return Err(Error::InitialPoint(format!(
                    "group ({i}, {m}) user {j}: auxiliary {:e} below interference {:e}",
                    x[j], h[j]
                )));
            }
            let floor = minimum_group_power(topology.bandwidth(), demands.group(i, m), x);
            if self.q.get(i, m) < floor * (1.0 - tol) {
                return Err(Error::InitialPoint(format!(
                    "group ({i}, {m}): power {:e} W below the floor {floor:e} W",
                    self.q.get(i, m)
                )));
            }
        }
        Ok(())
    }
}

/// Fixed point of `q = f(q) + extra`, a standard interference function for
/// any non-negative `extra`.
fn fixed_point_with_offset(
    topology: &NetworkTopology,
    demands: &RateDemands,
    extra: Option<&CellPowerVector>,
) -> Result<CellPowerVector> {
    let Some(extra) = extra else {
        let report = dpc_spm(topology, demands, None, &SpmOptions::default())?;
        if !report.converged {
            return Err(Error::InitialPoint(
                "sum-power iteration did not converge".into(),
            ));
        }
        return Ok(report.q_star);
    };
    let mut q = extra.clone();
    let opts = SpmOptions::default();
    let limit = opts.divergence_factor * topology.budgets().iter().sum::<f64>();
    for _ in 0..opts.max_iter {
        let f = interference_map(topology, demands, &q)?;
        let values = f
            .values()
            .iter()
            .zip(extra.values())
            .map(|(v, e)| v + e)
            .collect();
        let next = CellPowerVector::from_values(q.num_cells(), q.num_subchannels(), values)?;
        let change = next.max_abs_diff(&q);
        q = next;
        if change <= opts.tol {
            return Ok(q);
        }
        if q.sum() > limit {
            break;
        }
    }
    Err(Error::InitialPoint("offset fixed point diverged".into()))
}

#[derive(Debug, Clone)]
pub struct SrmOptions {
    /// Outer tolerance on `|ΔΣ_i K_i|`, bit/s.
    pub tol: f64,
    /// Inner tolerance on `|ΔK_i|`; `None` uses `tol / 10`.
    pub inner_tol: Option<f64>,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for SrmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            inner_tol: None,
            max_outer: 1_000,
            max_inner: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrmReport {
    pub q: CellPowerVector,
    pub x: AuxiliaryVector,
    /// Per-user powers from the single-cell optimum of every group at `H(q)`.
    pub p: UserPowerAllocation,
    /// Sum of achievable rates at `p`, bit/s.
    pub sum_rate: f64,
    pub outer_iterations: usize,
    /// Linearizations across all cells and sweeps.
    pub inner_iterations: usize,
    /// `Σ_i K_i` at the start and after every sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Largest stationarity residual of any accepted subproblem solution.
    pub kkt_residual: f64,
    pub diagnostic: Option<String>,
}

impl SrmReport {
    pub fn objective(&self) -> f64 {
        *self
            .trace
            .last()
            .expect("trace holds the starting objective")
    }
}

/// Distributed power control for sum-rate maximization.
///
/// Cells are swept in ascending order; each runs DC iterations (linearize
/// `G_i`, solve the convex subproblem) until `K_i` moves by at most the inner
/// tolerance, and the sweep repeats until `Σ_i K_i` moves by at most `tol`.
/// A step that would raise `K_i` is rejected, so the trace never increases.
#[allow(clippy::needless_range_loop)]
pub fn dpc_srm(
    topology: &NetworkTopology,
    demands: &RateDemands,
    start: &StartPoint,
    opts: &SrmOptions,
) -> Result<SrmReport> {
    start.check(topology, demands, 1e-9)?;
    let inner_tol = opts.inner_tol.unwrap_or(opts.tol / 10.0);
    let ni = topology.num_cells();
    let mut q = start.q.clone();
    let mut x = start.x.clone();
    let mut k: Vec<f64> = (0..ni)
        .map(|i| cell_objective(topology, demands, q.cell(i), &cell_aux(topology, &x, i), i))
        .collect::<Result<_>>()?;
    let mut trace = vec![k.iter().sum::<f64>()];
    let mut converged = false;
    let mut diagnostic = None;
    let mut inner_total = 0;
    let mut kkt = 0.0f64;

    'outer: for _ in 0..opts.max_outer {
        for i in 0..ni {
            let caps = power_caps(topology, &q, &x, i)?;
            let mut x_lin = cell_aux(topology, &x, i);
            for _ in 0..opts.max_inner {
                let step = match solve_convex_subproblem(
                    topology,
                    demands,
                    &q,
                    i,
                    &x_lin,
                    &caps,
                    topology.budget(i),
                ) {
                    Ok(step) => step,
                    Err(e) => {
                        diagnostic = Some(e.to_string());
                        break 'outer;
                    }
                };
                inner_total += 1;
                if !(step.objective_value <= k[i]) {
                    break;
                }
                kkt = kkt.max(step.kkt_residual);
                let change = k[i] - step.objective_value;
                k[i] = step.objective_value;
                q.cell_mut(i).copy_from_slice(&step.q_i);
                for (m, xm) in step.x_i.iter().enumerate() {
                    x.group_mut(i, m).clone_from(xm);
                }
                x_lin = step.x_i;
                if change <= inner_tol {
                    break;
                }
            }
        }
        let total: f64 = k.iter().sum();
        let prev = *trace.last().unwrap();
        trace.push(total);
        if (prev - total).abs() <= opts.tol {
            converged = true;
            break;
        }
    }

    let (p, sum_rate) = assemble_rate_solution(topology, demands, &q)?;
    Ok(SrmReport {
        q,
        x,
        p,
        sum_rate,
        outer_iterations: trace.len() - 1,
        inner_iterations: inner_total,
        trace,
        converged,
        kkt_residual: kkt,
        diagnostic,
    })
}

/// Per-user powers from the single-cell optimum of every group at `H(q)` and
/// the resulting sum of achievable rates.
pub fn assemble_rate_solution(
    topology: &NetworkTopology,
    demands: &RateDemands,
    q: &CellPowerVector,
) -> Result<(UserPowerAllocation, f64)> {
    let bw = topology.bandwidth();
    let mut groups = Vec::new();
    let mut total = 0.0;
    for ((i, m), _) in topology.groups() {
        let h = group_interference(topology, q, i, m)?;
        let alloc = optimal_single_cell_allocation(bw, demands.group(i, m), &h, q.get(i, m))?;
        total += group_rates(bw, &alloc.powers, &h).iter().sum::<f64>();
        groups.push(alloc.powers);
    }
    Ok((UserPowerAllocation::from_groups(topology, groups)?, total))
}

/// Best of `starts` runs: the scaled fixed point with `reserve`, then random
/// feasible starts drawn from `seed`.
pub fn multistart(
    topology: &NetworkTopology,
    demands: &RateDemands,
    starts: usize,
    reserve: f64,
    seed: u64,
    opts: &SrmOptions,
) -> Result<SrmReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = dpc_srm(
        topology,
        demands,
        &StartPoint::scaled_fixed_point(topology, demands, reserve)?,
        opts,
    )?;
    for _ in 1..starts {
        let start = StartPoint::random(topology, demands, &mut rng)?;
        let report = dpc_srm(topology, demands, &start, opts)?;
        if report.objective() < best.objective() {
            best = report;
        }
    }
    Ok(best)
}
