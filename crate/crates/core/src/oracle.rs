//! Brute-force and numerical validators.
//!
//! Nothing here calls the solvers. Every oracle recomputes interference,
//! rates and power needs from the raw gains, so agreement between an oracle
//! and a solver is an independent check.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{CellPowerVector, NetworkTopology, RateDemands, UserPowerAllocation};

pub const GRID_MAX_CELLS: usize = 2;
pub const GRID_MAX_SUBCHANNELS: usize = 2;
pub const GRID_MAX_USERS: usize = 3;
/// Largest number of grid points either grid oracle will visit.
pub const GRID_MAX_POINTS: u64 = 200_000_000;

/// Relative slack when checking a grid point against a demand.
const GRID_REL_TOL: f64 = 1e-9;

fn rate(bandwidth: f64, signal: f64, noise: f64) -> f64 {
    bandwidth * (1.0 + signal / noise).log2()
}

/// Users `j..` of a group decode user `j`, so its effective interference is
/// the largest normalized interference among them.
fn worst_interference(
    topology: &NetworkTopology,
    cell: usize,
    sub: usize,
    q: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let group = topology.group(cell, sub)?;
    let n = group.len();
    let own: Vec<f64> = (0..n)
        .map(|l| {
            let mut total = topology.noise_power();
            for (k, qk) in q.iter().enumerate() {
                if k != cell {
                    total += qk[sub] * group.gain_from(k, l);
                }
            }
            total / group.own_gain(l)
        })
        .collect();
    let mut worst = own.clone();
    for j in (0..n.saturating_sub(1)).rev() {
        worst[j] = worst[j].max(worst[j + 1]);
    }
    Ok(worst)
}

/// Powers meeting every demand with equality, solved from the strongest user
/// down: user `j` needs SINR `2^{R_j/B} - 1` against the power of the users
/// above it plus its effective interference.
pub fn tight_group_powers(bandwidth: f64, demands: &[f64], interference: &[f64]) -> Vec<f64> {
    let n = demands.len();
    let mut p = vec![0.0; n];
    let mut above = 0.0;
    for j in (0..n).rev() {
        let sinr = (demands[j] / bandwidth).exp2() - 1.0;
        p[j] = sinr * (above + interference[j]);
        above += p[j];
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPowerResult {
    pub q: CellPowerVector,
    /// Tight powers at `q`; any surplus of a group goes to its weakest user,
    /// whom nobody else has to decode.
    pub p: UserPowerAllocation,
    pub sum_power: f64,
    pub points_visited: u64,
}

fn check_grid_instance(topology: &NetworkTopology) -> Result<()> {
    let (i, m) = (topology.num_cells(), topology.num_subchannels());
    if i > GRID_MAX_CELLS || m > GRID_MAX_SUBCHANNELS {
        return Err(Error::OracleLimit(format!(
            "{i} cells x {m} subchannels exceeds {GRID_MAX_CELLS} x {GRID_MAX_SUBCHANNELS}"
        )));
    }
    if let Some(((c, s), g)) = topology.groups().find(|(_, g)| g.len() > GRID_MAX_USERS) {
        return Err(Error::OracleLimit(format!(
            "group ({c},{s}) has {} users, limit {GRID_MAX_USERS}",
            g.len()
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(Error::OracleLimit(format!(
            "grid resolution must be positive, got {delta}"
        )))
    }
}

/// Number of points `(k_1..k_m) ≥ 0` with `Σ k ≤ steps`.
fn simplex_points(steps: u64, dims: usize) -> u64 {
    // C(steps + dims, dims), saturating
    let mut c: u128 = 1;
    for d in 1..=dims as u128 {
        c = c * (steps as u128 + d) / d;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

/// Exhaustive search for the cheapest per-(cell, subchannel) power vector on
/// a `delta` grid that meets every demand and budget.
///
/// Ties keep the lexicographically first grid point (cells, then subchannels).
pub fn grid_power_min(
    topology: &NetworkTopology,
    demands: &RateDemands,
    delta: f64,
) -> Result<GridPowerResult> {
    check_grid_instance(topology)?;
    check_delta(delta)?;
    let (num_cells, num_subs) = (topology.num_cells(), topology.num_subchannels());
    let steps: Vec<u64> = topology
        .budgets()
        .iter()
        .map(|b| (b / delta * (1.0 + 1e-12)).floor() as u64)
        .collect();
    let total = steps
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(simplex_points(s, num_subs)))
        .unwrap_or(u64::MAX);
    if total > GRID_MAX_POINTS {
        return Err(Error::OracleLimit(format!(
            "{total} grid points at resolution {delta}, limit {GRID_MAX_POINTS}"
        )));
    }

    let bw = topology.bandwidth();
    let mut k = vec![vec![0u64; num_subs]; num_cells];
    let mut best: Option<(u64, Vec<Vec<u64>>)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let units: u64 = k.iter().flatten().sum();
        if best.as_ref().is_none_or(|(b, _)| units < *b) {
            let q: Vec<Vec<f64>> = k
                .iter()
                .map(|row| row.iter().map(|&x| x as f64 * delta).collect())
                .collect();
            let mut ok = true;
            'groups: for cell in 0..num_cells {
                for sub in 0..num_subs {
                    let h = worst_interference(topology, cell, sub, &q)?;
                    let need: f64 = tight_group_powers(bw, demands.group(cell, sub), &h)
                        .iter()
                        .sum();
                    if need > q[cell][sub] * (1.0 + GRID_REL_TOL) {
                        ok = false;
                        break 'groups;
                    }
                }
            }
            if ok {
                best = Some((units, k.clone()));
            }
        }
        if !advance(&mut k, &steps) {
            break;
        }
    }

    let (units, k) = best.ok_or(Error::NoneFound(delta))?;
    let q: Vec<Vec<f64>> = k
        .iter()
        .map(|row| row.iter().map(|&x| x as f64 * delta).collect())
        .collect();
    let mut groups = Vec::new();
    for cell in 0..num_cells {
        for sub in 0..num_subs {
            let h = worst_interference(topology, cell, sub, &q)?;
            let mut p = tight_group_powers(bw, demands.group(cell, sub), &h);
            let surplus = q[cell][sub] - p.iter().sum::<f64>();
            p[0] += surplus.max(0.0);
            groups.push(p);
        }
    }
    Ok(GridPowerResult {
        q: CellPowerVector::from_values(num_cells, num_subs, q.concat())?,
        p: UserPowerAllocation::from_groups(topology, groups)?,
        sum_power: units as f64 * delta,
        points_visited: visited,
    })
}

/// Next grid point in lexicographic order with every cell's row summing to
/// at most its step budget. Returns false after the last point.
fn advance(k: &mut [Vec<u64>], steps: &[u64]) -> bool {
    for cell in (0..k.len()).rev() {
        for sub in (0..k[cell].len()).rev() {
            let used: u64 = k[cell].iter().sum();
            if used < steps[cell] {
                k[cell][sub] += 1;
                return true;
            }
            k[cell][sub] = 0;
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRateResult {
    pub powers: Vec<f64>,
    pub sum_rate: f64,
    pub points_visited: u64,
}

/// Best sum rate over splits of `total_power` on a `delta` grid. The
/// strongest user takes whatever the others leave.
pub fn grid_rate_max_group(
    bandwidth: f64,
    demands: &[f64],
    interference: &[f64],
    total_power: f64,
    delta: f64,
) -> Result<GridRateResult> {
    let n = demands.len();
    if n == 0 || n > GRID_MAX_USERS {
        return Err(Error::OracleLimit(format!(
            "{n} users, limit 1..={GRID_MAX_USERS}"
        )));
    }
    if interference.len() != n {
        return Err(Error::OracleLimit("one interference value per user".into()));
    }
    check_delta(delta)?;
    let steps = (total_power / delta).floor() as u64;
    let total = simplex_points(steps, n - 1);
    if total > GRID_MAX_POINTS {
        return Err(Error::OracleLimit(format!(
            "{total} grid points at resolution {delta}, limit {GRID_MAX_POINTS}"
        )));
    }

    let mut k = vec![vec![0u64; n - 1]];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let mut p: Vec<f64> = k[0].iter().map(|&x| x as f64 * delta).collect();
        let rest = total_power - p.iter().sum::<f64>();
        p.push(rest.max(0.0));
        let mut above = 0.0;
        let mut sum = 0.0;
        let mut ok = true;
        for j in (0..n).rev() {
            let r = rate(bandwidth, p[j], above + interference[j]);
            if r < demands[j] * (1.0 - GRID_REL_TOL) {
                ok = false;
                break;
            }
            above += p[j];
            sum += r;
        }
        if ok && best.as_ref().is_none_or(|(b, _)| sum > *b) {
            best = Some((sum, p));
        }
        if !advance(&mut k, &[steps]) {
            break;
        }
    }
    let (sum_rate, powers) = best.ok_or(Error::NoneFound(delta))?;
    Ok(GridRateResult {
        powers,
        sum_rate,
        points_visited: visited,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianReport {
    /// Symmetrized finite-difference Hessian.
    pub hessian: Vec<Vec<f64>>,
    /// Leading principal minors, orders 1 to n.
    pub minors: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Largest gap between transposed entries of the two estimates,
    /// relative to the largest entry.
    pub asymmetry: f64,
    pub psd: bool,
}

pub const PSD_TOL: f64 = -1e-6;
pub const ASYMMETRY_LIMIT: f64 = 1e-4;

/// Central-difference Hessian of `f` at `point` and its leading principal
/// minors.
///
/// Two estimates are built by differentiating a central-difference gradient
/// along each axis with step `h`; the inner gradient uses step `1.5 h` for
/// one and `2.5 h` for the other. Comparing `H_ab` of the first with `H_ba` of
/// the second uses disjoint evaluations, so their gap exposes rounding noise
/// even when the noise itself is symmetric. `step` defaults to `1e-5` times
/// the largest coordinate.
pub fn fd_hessian_psd(
    mut f: impl FnMut(&[f64]) -> f64,
    point: &[f64],
    step: Option<f64>,
) -> Result<HessianReport> {
    let n = point.len();
    let scale = point.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let h = step.unwrap_or(1e-5 * if scale > 0.0 { scale } else { 1.0 });
    let mut estimate = |inner: f64| -> DMatrix<f64> {
        let mut grad = |x: &mut Vec<f64>| -> Vec<f64> {
            (0..n)
                .map(|b| {
                    let keep = x[b];
                    let (hi, lo) = (keep + inner, keep - inner);
                    x[b] = hi;
                    let up = f(x);
                    x[b] = lo;
                    let down = f(x);
                    x[b] = keep;
                    (up - down) / (hi - lo)
                })
                .collect()
        };
        let mut raw = DMatrix::zeros(n, n);
        let mut x = point.to_vec();
        for a in 0..n {
            let (hi, lo) = (point[a] + h, point[a] - h);
            x[a] = hi;
            let up = grad(&mut x);
            x[a] = lo;
            let down = grad(&mut x);
            x[a] = point[a];
            for b in 0..n {
                raw[(a, b)] = (up[b] - down[b]) / (hi - lo);
            }
        }
        raw
    };
    let first = estimate(1.5 * h);
    let second = estimate(2.5 * h);
    let largest = first
        .iter()
        .chain(second.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = (&first - second.transpose())
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let asymmetry = if largest > 0.0 { gap / largest } else { gap };
    if !asymmetry.is_finite() || asymmetry > ASYMMETRY_LIMIT {
        return Err(Error::StepTooSmall { asymmetry });
    }
    let raw = (first + second) * 0.5;
    let sym = (&raw + raw.transpose()) * 0.5;
    let minors: Vec<f64> = (1..=n)
        .map(|k| sym.view((0, 0), (k, k)).determinant())
        .collect();
    let min_eigenvalue = SymmetricEigen::new(sym.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v));
    Ok(HessianReport {
        hessian: (0..n)
            .map(|a| (0..n).map(|b| sym[(a, b)]).collect())
            .collect(),
        psd: minors.iter().all(|&m| m >= PSD_TOL),
        minors,
        min_eigenvalue,
        asymmetry,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Positivity,
    Monotonicity,
    Scalability,
}

/// Inputs and outputs of one violated property. For monotonicity `upper` is
/// the componentwise larger input; for scalability `lambda` multiplies
/// `lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub property: Property,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lambda: f64,
    pub f_lower: Vec<f64>,
    pub f_other: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeReport {
    pub trials: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl ProbeReport {
    pub fn count(&self, property: Property) -> usize {
        self.counterexamples
            .iter()
            .filter(|c| c.property == property)
            .count()
    }
}

/// Random check of positivity, monotonicity and strict scalability of
/// `map` on inputs in `[0, scale]^dim`.
///
/// Each trial draws `q ≤ q'` (some entries exactly zero) and `λ ∈ (1, 10]`
/// and tests `f(q) > 0`, `f(q') ≥ f(q)` and `λ f(q) > f(λ q)`.
pub fn standard_function_probe(
    mut map: impl FnMut(&[f64]) -> Vec<f64>,
    dim: usize,
    scale: f64,
    trials: usize,
    seed: u64,
) -> ProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        trials,
        counterexamples: Vec::new(),
    };
    for _ in 0..trials {
        let lower: Vec<f64> = (0..dim)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    scale * rng.random::<f64>()
                }
            })
            .collect();
        let upper: Vec<f64> = lower
            .iter()
            .map(|&v| {
                if rng.random_bool(0.5) {
                    v + scale * rng.random::<f64>()
                } else {
                    v
                }
            })
            .collect();
        let lambda = 1.0 + 9.0 * (1.0 - rng.random::<f64>());
        let scaled: Vec<f64> = lower.iter().map(|v| lambda * v).collect();
        let f_lower = map(&lower);
        let f_upper = map(&upper);
        let f_scaled = map(&scaled);
        let mut push = |property, f_other: &Vec<f64>| {
            report.counterexamples.push(Counterexample {
                property,
                lower: lower.clone(),
                upper: if property == Property::Scalability {
                    scaled.clone()
                } else {
                    upper.clone()
                },
                lambda,
                f_lower: f_lower.clone(),
                f_other: f_other.clone(),
            })
        };
        if f_lower.iter().chain(&f_upper).any(|&v| !(v > 0.0)) {
            push(Property::Positivity, &f_upper);
        }
        if f_upper.iter().zip(&f_lower).any(|(u, l)| !(u >= l)) {
            push(Property::Monotonicity, &f_upper);
        }
        if f_scaled
            .iter()
            .zip(&f_lower)
            .any(|(s, l)| !(lambda * l > *s))
        {
            push(Property::Scalability, &f_scaled);
        }
    }
    report
}

/// `minimize Σ_k -w_k ln(c_k·z + e_k) + d·z` subject to `A z ≤ b`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogBarrierProblem {
    /// `(w_k, c_k, e_k)` with `w_k > 0`.
    pub log_terms: Vec<(f64, Vec<f64>, f64)>,
    pub linear: Vec<f64>,
    /// Rows `(a, b)` of `a·z ≤ b`.
    pub constraints: Vec<(Vec<f64>, f64)>,
}

impl LogBarrierProblem {
    pub fn objective(&self, z: &[f64]) -> f64 {
        let dot = |a: &[f64]| a.iter().zip(z).map(|(x, y)| x * y).sum::<f64>();
        let logs: f64 = self
            .log_terms
            .iter()
            .map(|(w, c, e)| -w * (dot(c) + e).ln())
            .sum();
        logs + dot(&self.linear)
    }

    fn strictly_feasible(&self, z: &[f64]) -> bool {
        let dot = |a: &[f64]| a.iter().zip(z).map(|(x, y)| x * y).sum::<f64>();
        self.constraints.iter().all(|(a, b)| dot(a) < *b)
            && self.log_terms.iter().all(|(_, c, e)| dot(c) + e > 0.0)
    }
}

/// Interior-point solution of a [`LogBarrierProblem`] from a strictly
/// feasible `start`. Stops when the duality gap bound `m / t` drops below
/// `gap_tol`.
pub fn barrier_minimize(
    problem: &LogBarrierProblem,
    start: &[f64],
    gap_tol: f64,
) -> Result<Vec<f64>> {
    let n = start.len();
    if !problem.strictly_feasible(start) {
        return Err(Error::InitialPoint(
            "barrier start is not strictly feasible".into(),
        ));
    }
    let rows: Vec<(DVector<f64>, f64)> = problem
        .constraints
        .iter()
        .map(|(a, b)| (DVector::from_column_slice(a), *b))
        .collect();
    let logs: Vec<(f64, DVector<f64>, f64)> = problem
        .log_terms
        .iter()
        .map(|(w, c, e)| (*w, DVector::from_column_slice(c), *e))
        .collect();
    let d = DVector::from_column_slice(&problem.linear);
    let phi = |t: f64, z: &DVector<f64>| -> f64 {
        let mut v = t * d.dot(z);
        for (w, c, e) in &logs {
            let s = c.dot(z) + e;
            if s <= 0.0 {
                return f64::INFINITY;
            }
            v -= t * w * s.ln();
        }
        for (a, b) in &rows {
            let s = b - a.dot(z);
            if s <= 0.0 {
                return f64::INFINITY;
            }
            v -= s.ln();
        }
        v
    };

    let mut z = DVector::from_column_slice(start);
    let mut t = 1.0;
    let m = rows.len().max(1) as f64;
    for _ in 0..200 {
        for _ in 0..200 {
            let mut g = &d * t;
            let mut hess = DMatrix::zeros(n, n);
            for (w, c, e) in &logs {
                let s = c.dot(&z) + e;
                g -= c * (t * w / s);
                hess += c * c.transpose() * (t * w / (s * s));
            }
            for (a, b) in &rows {
                let s = b - a.dot(&z);
                g += a / s;
                hess += a * a.transpose() / (s * s);
            }
            let step = match hess.clone().cholesky() {
                Some(ch) => -ch.solve(&g),
                None => {
                    let shift = DMatrix::identity(n, n) * (1e-12 * hess.trace().abs().max(1.0));
                    -(hess + shift)
                        .lu()
                        .solve(&g)
                        .ok_or_else(|| Error::Domain("singular barrier Hessian".into()))?
                }
            };
            let decrement = -g.dot(&step);
            if decrement / 2.0 <= 1e-12 {
                break;
            }
            let base = phi(t, &z);
            let mut alpha = 1.0;
            while phi(t, &(&z + &step * alpha)) > base - 0.25 * alpha * decrement {
                alpha *= 0.5;
                if alpha < 1e-20 {
                    break;
                }
            }
            z += &step * alpha;
        }
        if m / t < gap_tol {
            return Ok(z.iter().copied().collect());
        }
        t *= 10.0;
    }
    Err(Error::Domain(
        "barrier method did not reach the duality gap".into(),
    ))
}
