//! System model for a downlink multi-cell NOMA network.
//!
//! Every base station (cell) shares the same `M` subchannels. On each
//! subchannel a cell serves a group of users by superposition coding; users in
//! a group are kept sorted by ascending own-cell channel gain, which is also
//! the SIC decoding order. Channel gains are stored as linear power gains
//! `|h|^2`.
//!
//! Indices used throughout the crate: `cell` in `0..num_cells`, `subchannel`
//! in `0..num_subchannels`, and `user` is the position inside the sorted group
//! (0 is the weakest user).

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Relative tolerance used for equality-style checks on the model.
pub const REL_TOL: f64 = 1e-9;

/// Rate in bit/s for a link with bandwidth `bandwidth` and SINR `sinr`.
#[inline]
pub fn shannon_rate(bandwidth: f64, sinr: f64) -> f64 {
    bandwidth * sinr.ln_1p() / LN_2
}

/// `2^(rate/bandwidth)`, the SINR-plus-one needed to carry `rate`.
#[inline]
pub fn rate_factor(bandwidth: f64, rate: f64) -> f64 {
    (rate / bandwidth).exp2()
}

/// One user attached to a (cell, subchannel) group before sorting.
#[derive(Debug, Clone, PartialEq)]
pub struct UserLink {
    pub id: usize,
    /// Power gain from every base station, indexed by cell. The entry for the
    /// serving cell is the own gain; the others are cross gains.
    pub gains: Vec<f64>,
}

impl UserLink {
    pub fn new(id: usize, gains: Vec<f64>) -> Self {
        Self { id, gains }
    }
}

/// Users served by one cell on one subchannel, sorted by ascending own gain.
#[derive(Debug, Clone, PartialEq)]
pub struct UserGroup {
    user_ids: Vec<usize>,
    /// `gains[k][j]`: power gain from cell `k` to the `j`-th user of the group.
    gains: Vec<Vec<f64>>,
    cell: usize,
}

impl UserGroup {
    pub fn len(&self) -> usize {
        self.user_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.user_ids.is_empty()
    }

    pub fn user_ids(&self) -> &[usize] {
        &self.user_ids
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn own_gain(&self, user: usize) -> f64 {
        self.gains[self.cell][user]
    }

    /// Gain from cell `from` to the `user`-th member of the group.
    pub fn gain_from(&self, from: usize, user: usize) -> f64 {
        self.gains[from][user]
    }
}

/// Counts, gains, noise and budgets of a multi-cell network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    num_cells: usize,
    num_subchannels: usize,
    bandwidth: f64,
    noise_power: f64,
    budgets: Vec<f64>,
    groups: Vec<UserGroup>,
}

impl NetworkTopology {
    pub fn builder(num_cells: usize, num_subchannels: usize) -> TopologyBuilder {
        TopologyBuilder {
            num_cells,
            num_subchannels,
            bandwidth: 1.0,
            noise_power: 1.0,
            budgets: vec![1.0; num_cells],
            groups: vec![Vec::new(); num_cells * num_subchannels],
            bad_group: None,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn num_subchannels(&self) -> usize {
        self.num_subchannels
    }

    /// Bandwidth of one subchannel in Hz.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn budget(&self, cell: usize) -> f64 {
        self.budgets[cell]
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    /// Copy of this topology with new per-cell budgets.
    pub fn with_budgets(&self, budgets: Vec<f64>) -> Result<Self> {
        check_budgets(&budgets, self.num_cells)?;
        Ok(Self {
            budgets,
            ..self.clone()
        })
    }

    pub fn group(&self, cell: usize, subchannel: usize) -> Result<&UserGroup> {
        self.check_group(cell, subchannel)?;
        Ok(&self.groups[cell * self.num_subchannels + subchannel])
    }

    /// Groups in ascending `(cell, subchannel)` order.
    pub fn groups(&self) -> impl Iterator<Item = ((usize, usize), &UserGroup)> {
        let m = self.num_subchannels;
        self.groups
            .iter()
            .enumerate()
            .map(move |(idx, g)| ((idx / m, idx % m), g))
    }

    pub fn num_users(&self) -> usize {
        self.groups.iter().map(UserGroup::len).sum()
    }

    pub(crate) fn check_group(&self, cell: usize, subchannel: usize) -> Result<()> {
        if cell >= self.num_cells || subchannel >= self.num_subchannels {
            return Err(Error::Index(format!(
                "group ({cell}, {subchannel}) outside {}x{}",
                self.num_cells, self.num_subchannels
            )));
        }
        Ok(())
    }

    pub(crate) fn check_user(&self, cell: usize, subchannel: usize, user: usize) -> Result<()> {
        let len = self.group(cell, subchannel)?.len();
        if user >= len {
            return Err(Error::Index(format!(
                "user {user} in group ({cell}, {subchannel}) of size {len}"
            )));
        }
        Ok(())
    }

    /// Inter-cell interference plus noise seen by the `user`-th member of
    /// group (`cell`, `subchannel`).
    pub(crate) fn interference_plus_noise(
        &self,
        q: &CellPowerVector,
        cell: usize,
        subchannel: usize,
        user: usize,
    ) -> f64 {
        let group = &self.groups[cell * self.num_subchannels + subchannel];
        (0..self.num_cells)
            .filter(|&k| k != cell)
            .map(|k| q.get(k, subchannel) * group.gain_from(k, user))
            .sum::<f64>()
            + self.noise_power
    }
}

fn check_budgets(budgets: &[f64], num_cells: usize) -> Result<()> {
    if budgets.len() != num_cells {
        return Err(Error::Topology(format!(
            "{} budgets for {num_cells} cells",
            budgets.len()
        )));
    }
    if let Some(b) = budgets.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(Error::Topology(format!("budget {b} must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TopologyBuilder {
    num_cells: usize,
    num_subchannels: usize,
    bandwidth: f64,
    noise_power: f64,
    budgets: Vec<f64>,
    groups: Vec<Vec<UserLink>>,
    bad_group: Option<(usize, usize)>,
}

impl TopologyBuilder {
    pub fn bandwidth(mut self, hz: f64) -> Self {
        self.bandwidth = hz;
        self
    }

    pub fn noise_power(mut self, watts: f64) -> Self {
        self.noise_power = watts;
        self
    }

    pub fn budgets(mut self, watts: Vec<f64>) -> Self {
        self.budgets = watts;
        self
    }

    pub fn uniform_budget(mut self, watts: f64) -> Self {
        self.budgets = vec![watts; self.num_cells];
        self
    }

    /// Attach the users of group (`cell`, `subchannel`). Order does not
    /// matter; users are sorted by own gain at `build`.
    pub fn group(mut self, cell: usize, subchannel: usize, users: Vec<UserLink>) -> Self {
        if cell < self.num_cells && subchannel < self.num_subchannels {
            self.groups[cell * self.num_subchannels + subchannel] = users;
        } else {
            self.bad_group.get_or_insert((cell, subchannel));
        }
        self
    }

    pub fn build(self) -> Result<NetworkTopology> {
        let (n_cells, n_sub) = (self.num_cells, self.num_subchannels);
        if n_cells == 0 || n_sub == 0 {
            return Err(Error::Topology(
                "need at least one cell and one subchannel".into(),
            ));
        }
        if let Some((i, m)) = self.bad_group {
            return Err(Error::Index(format!(
                "group ({i}, {m}) outside {n_cells}x{n_sub}"
            )));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::Topology(format!(
                "bandwidth {} must be positive",
                self.bandwidth
            )));
        }
        if !(self.noise_power.is_finite() && self.noise_power > 0.0) {
            return Err(Error::Topology(format!(
                "noise power {} must be positive",
                self.noise_power
            )));
        }
        check_budgets(&self.budgets, n_cells)?;

        let mut seen = std::collections::HashSet::new();
        let mut groups = Vec::with_capacity(self.groups.len());
        for (idx, mut users) in self.groups.into_iter().enumerate() {
            let cell = idx / n_sub;
            if users.is_empty() {
                return Err(Error::Topology(format!(
                    "group ({cell}, {}) has no users",
                    idx % n_sub
                )));
            }
            for u in &users {
                if !seen.insert(u.id) {
                    return Err(Error::Topology(format!(
                        "user {} appears in two groups",
                        u.id
                    )));
                }
                if u.gains.len() != n_cells {
                    return Err(Error::Topology(format!(
                        "user {} has {} gains for {n_cells} cells",
                        u.id,
                        u.gains.len()
                    )));
                }
                if let Some(g) = u.gains.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
                    return Err(Error::Topology(format!("user {} has gain {g}", u.id)));
                }
            }
            // Stable: ties in own gain keep ascending user id.
            users.sort_by(|a, b| {
                a.gains[cell]
                    .total_cmp(&b.gains[cell])
                    .then(a.id.cmp(&b.id))
            });
            let gains = (0..n_cells)
                .map(|k| users.iter().map(|u| u.gains[k]).collect())
                .collect();
            groups.push(UserGroup {
                user_ids: users.iter().map(|u| u.id).collect(),
                gains,
                cell,
            });
        }

        Ok(NetworkTopology {
            num_cells: n_cells,
            num_subchannels: n_sub,
            bandwidth: self.bandwidth,
            noise_power: self.noise_power,
            budgets: self.budgets,
            groups,
        })
    }
}

/// Values attached to every user, laid out group by group in the topology's
/// sorted order.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PerUser {
    num_subchannels: usize,
    groups: Vec<Vec<f64>>,
}

impl PerUser {
    fn from_groups(topology: &NetworkTopology, groups: Vec<Vec<f64>>, what: &str) -> Result<Self> {
        let expected = topology.num_cells * topology.num_subchannels;
        if groups.len() != expected {
            return Err(Error::Index(format!(
                "{what}: {} groups, expected {expected}",
                groups.len()
            )));
        }
        for (((i, m), g), values) in topology.groups().zip(&groups) {
            if values.len() != g.len() {
                return Err(Error::Index(format!(
                    "{what}: group ({i}, {m}) has {} entries for {} users",
                    values.len(),
                    g.len()
                )));
            }
        }
        Ok(Self {
            num_subchannels: topology.num_subchannels,
            groups,
        })
    }

    fn group(&self, cell: usize, subchannel: usize) -> &[f64] {
        &self.groups[cell * self.num_subchannels + subchannel]
    }

    fn check_shape(&self, topology: &NetworkTopology, what: &str) -> Result<()> {
        let same = self.num_subchannels == topology.num_subchannels
            && self.groups.len() == topology.groups.len()
            && self
                .groups
                .iter()
                .zip(&topology.groups)
                .all(|(a, g)| a.len() == g.len());
        if !same {
            return Err(Error::Index(format!(
                "{what} do not match the topology's groups"
            )));
        }
        Ok(())
    }

    fn group_mut(&mut self, cell: usize, subchannel: usize) -> &mut Vec<f64> {
        &mut self.groups[cell * self.num_subchannels + subchannel]
    }
}

/// Minimal rate demand (bit/s) of every user.
#[derive(Debug, Clone, PartialEq)]
pub struct RateDemands(PerUser);

impl RateDemands {
    /// Same demand for every user.
    pub fn uniform(topology: &NetworkTopology, rate: f64) -> Result<Self> {
        Self::from_fn(topology, |_, _, _| rate)
    }

    /// Demand per user from `(cell, subchannel, user_id)`.
    pub fn from_fn(
        topology: &NetworkTopology,
        mut rate: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let groups = topology
            .groups()
            .map(|((i, m), g)| g.user_ids().iter().map(|&id| rate(i, m, id)).collect())
            .collect();
        Self::from_groups(topology, groups)
    }

    /// Demands given group by group in sorted (ascending gain) order.
    pub fn from_groups(topology: &NetworkTopology, groups: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(r) = groups
            .iter()
            .flatten()
            .find(|r| !(r.is_finite() && **r > 0.0))
        {
            return Err(Error::Demands(format!("rate demand {r} must be positive")));
        }
        PerUser::from_groups(topology, groups, "rate demands").map(Self)
    }

    pub fn group(&self, cell: usize, subchannel: usize) -> &[f64] {
        self.0.group(cell, subchannel)
    }

    pub fn total(&self) -> f64 {
        self.0.groups.iter().flatten().sum()
    }

    pub(crate) fn check_shape(&self, topology: &NetworkTopology) -> Result<()> {
        self.0.check_shape(topology, "rate demands")
    }
}

/// Total transmit power `q[cell][subchannel]` in W.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPowerVector {
    num_cells: usize,
    num_subchannels: usize,
    values: Vec<f64>,
}

impl CellPowerVector {
    pub fn zeros(num_cells: usize, num_subchannels: usize) -> Self {
        Self {
            num_cells,
            num_subchannels,
            values: vec![0.0; num_cells * num_subchannels],
        }
    }

    /// `Q_i / M` on every subchannel.
    pub fn split_budgets(topology: &NetworkTopology) -> Self {
        let m = topology.num_subchannels();
        let values = topology
            .budgets()
            .iter()
            .flat_map(|&b| std::iter::repeat_n(b / m as f64, m))
            .collect();
        Self {
            num_cells: topology.num_cells(),
            num_subchannels: m,
            values,
        }
    }

    /// Row-major `(cell, subchannel)` values.
    pub fn from_values(num_cells: usize, num_subchannels: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != num_cells * num_subchannels {
            return Err(Error::Index(format!(
                "{} power values for {num_cells}x{num_subchannels}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!(
                "cell power {v} must be non-negative"
            )));
        }
        Ok(Self {
            num_cells,
            num_subchannels,
            values,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn num_subchannels(&self) -> usize {
        self.num_subchannels
    }

    #[inline]
    pub fn get(&self, cell: usize, subchannel: usize) -> f64 {
        self.values[cell * self.num_subchannels + subchannel]
    }

    #[inline]
    pub fn set(&mut self, cell: usize, subchannel: usize, watts: f64) {
        self.values[cell * self.num_subchannels + subchannel] = watts;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell(&self, cell: usize) -> &[f64] {
        let m = self.num_subchannels;
        &self.values[cell * m..(cell + 1) * m]
    }

    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        let m = self.num_subchannels;
        &mut self.values[cell * m..(cell + 1) * m]
    }

    pub fn cell_total(&self, cell: usize) -> f64 {
        self.cell(cell).iter().sum()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Largest absolute element-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_m q_im ≤ Q_i` for every cell, with relative slack `rel_tol`.
    pub fn within_budgets(&self, topology: &NetworkTopology, rel_tol: f64) -> Vec<bool> {
        (0..self.num_cells)
            .map(|i| self.cell_total(i) <= topology.budget(i) * (1.0 + rel_tol))
            .collect()
    }

    pub(crate) fn check_shape(&self, topology: &NetworkTopology) -> Result<()> {
        if self.num_cells != topology.num_cells()
            || self.num_subchannels != topology.num_subchannels()
        {
            return Err(Error::Index(format!(
                "cell power vector is {}x{}, topology is {}x{}",
                self.num_cells,
                self.num_subchannels,
                topology.num_cells(),
                topology.num_subchannels()
            )));
        }
        Ok(())
    }
}

/// Per-user transmit power `p` (W).
#[derive(Debug, Clone, PartialEq)]
pub struct UserPowerAllocation(PerUser);

impl UserPowerAllocation {
    pub fn from_groups(topology: &NetworkTopology, groups: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(p) = groups
            .iter()
            .flatten()
            .find(|p| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::Domain(format!(
                "user power {p} must be non-negative"
            )));
        }
        PerUser::from_groups(topology, groups, "user powers").map(Self)
    }

    pub fn group(&self, cell: usize, subchannel: usize) -> &[f64] {
        self.0.group(cell, subchannel)
    }

    /// Group totals as a cell power vector.
    pub fn totals(&self) -> CellPowerVector {
        let m = self.0.num_subchannels;
        let values: Vec<f64> = self.0.groups.iter().map(|g| g.iter().sum()).collect();
        CellPowerVector {
            num_cells: values.len() / m,
            num_subchannels: m,
            values,
        }
    }

    /// True when every group total matches `q` within relative `rel_tol`.
    pub fn consistent_with(&self, q: &CellPowerVector, rel_tol: f64) -> bool {
        let totals = self.totals();
        totals.values.len() == q.values.len()
            && totals.values.iter().zip(&q.values).all(|(a, b)| {
                (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
            })
    }
}

/// Auxiliary interference proxy `x` of the equivalent sum-rate problem; one
/// entry per user, W-equivalent.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryVector(PerUser);

impl AuxiliaryVector {
    pub fn from_groups(topology: &NetworkTopology, groups: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(x) = groups
            .iter()
            .flatten()
            .find(|x| !(x.is_finite() && **x > 0.0))
        {
            return Err(Error::Domain(format!(
                "auxiliary entry {x} must be positive"
            )));
        }
        PerUser::from_groups(topology, groups, "auxiliary vector").map(Self)
    }

    /// `x = H(q)`.
    pub fn from_interference(topology: &NetworkTopology, q: &CellPowerVector) -> Result<Self> {
        Self::from_groups(topology, interference_terms(topology, q)?)
    }

    pub fn group(&self, cell: usize, subchannel: usize) -> &[f64] {
        self.0.group(cell, subchannel)
    }

    pub(crate) fn group_mut(&mut self, cell: usize, subchannel: usize) -> &mut Vec<f64> {
        self.0.group_mut(cell, subchannel)
    }

    pub(crate) fn check_shape(&self, topology: &NetworkTopology) -> Result<()> {
        self.0.check_shape(topology, "auxiliary vector")
    }
}

/// Effective interference `H` of every user of group (`cell`, `subchannel`):
/// `H_j = max_{l >= j} (Σ_{k≠cell} q_k |h_kl|^2 + σ²) / |h_cell,l|^2`.
pub fn group_interference(
    topology: &NetworkTopology,
    q: &CellPowerVector,
    cell: usize,
    subchannel: usize,
) -> Result<Vec<f64>> {
    q.check_shape(topology)?;
    let group = topology.group(cell, subchannel)?;
    let n = group.len();
    let mut h = vec![0.0; n];
    let mut running = f64::NEG_INFINITY;
    for l in (0..n).rev() {
        let normalized =
            topology.interference_plus_noise(q, cell, subchannel, l) / group.own_gain(l);
        running = running.max(normalized);
        h[l] = running;
    }
    Ok(h)
}

/// Effective interference of a single user.
pub fn effective_interference(
    topology: &NetworkTopology,
    q: &CellPowerVector,
    cell: usize,
    subchannel: usize,
    user: usize,
) -> Result<f64> {
    topology.check_user(cell, subchannel, user)?;
    Ok(group_interference(topology, q, cell, subchannel)?[user])
}

/// `H` for every group, in `(cell, subchannel)` order.
pub fn interference_terms(
    topology: &NetworkTopology,
    q: &CellPowerVector,
) -> Result<Vec<Vec<f64>>> {
    topology
        .groups()
        .map(|((i, m), _)| group_interference(topology, q, i, m))
        .collect()
}

/// Per-user SIC rates of one group given its powers and effective
/// interference: `B log2(1 + p_j / (Σ_{n>j} p_n + H_j))`.
pub fn group_rates(bandwidth: f64, powers: &[f64], interference: &[f64]) -> Vec<f64> {
    let mut rates = vec![0.0; powers.len()];
    let mut tail = 0.0;
    for j in (0..powers.len()).rev() {
        rates[j] = shannon_rate(bandwidth, powers[j] / (tail + interference[j]));
        tail += powers[j];
    }
    rates
}

/// Achievable rate of one user under allocation `p` and cell powers `q`.
pub fn achievable_rate(
    topology: &NetworkTopology,
    p: &UserPowerAllocation,
    q: &CellPowerVector,
    cell: usize,
    subchannel: usize,
    user: usize,
) -> Result<f64> {
    topology.check_user(cell, subchannel, user)?;
    let h = group_interference(topology, q, cell, subchannel)?;
    let powers = p.group(cell, subchannel);
    let tail: f64 = powers[user + 1..].iter().sum();
    Ok(shannon_rate(
        topology.bandwidth(),
        powers[user] / (tail + h[user]),
    ))
}

/// The same rate written as the minimum over every user `l >= user` that has
/// to decode this user's message.
pub fn achievable_rate_sic_min(
    topology: &NetworkTopology,
    p: &UserPowerAllocation,
    q: &CellPowerVector,
    cell: usize,
    subchannel: usize,
    user: usize,
) -> Result<f64> {
    topology.check_user(cell, subchannel, user)?;
    q.check_shape(topology)?;
    let group = topology.group(cell, subchannel)?;
    let powers = p.group(cell, subchannel);
    let tail: f64 = powers[user + 1..].iter().sum();
    let rate = (user..group.len())
        .map(|l| {
            let g = group.own_gain(l);
            let z = topology.interference_plus_noise(q, cell, subchannel, l);
            shannon_rate(topology.bandwidth(), g * powers[user] / (g * tail + z))
        })
        .fold(f64::INFINITY, f64::min);
    Ok(rate)
}

/// Outcome of the linear rate constraint for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintCheck {
    pub satisfied: bool,
    /// `p_j - (2^{R_j/B} - 1)(Σ_{n>j} p_n + H_j)` in W.
    pub slack: f64,
}

/// Linear form of `rate_j >= R_j` for every user of one group.
pub fn group_constraint_checks(
    bandwidth: f64,
    demands: &[f64],
    powers: &[f64],
    interference: &[f64],
) -> Vec<ConstraintCheck> {
    let mut out = vec![
        ConstraintCheck {
            satisfied: true,
            slack: 0.0
        };
        powers.len()
    ];
    let mut tail = 0.0;
    for j in (0..powers.len()).rev() {
        let needed = (rate_factor(bandwidth, demands[j]) - 1.0) * (tail + interference[j]);
        let slack = powers[j] - needed;
        out[j] = ConstraintCheck {
            satisfied: slack >= -REL_TOL * needed,
            slack,
        };
        tail += powers[j];
    }
    out
}

/// Rate-constraint check for every user, grouped in `(cell, subchannel)` order.
pub fn check_rate_constraint(
    topology: &NetworkTopology,
    p: &UserPowerAllocation,
    q: &CellPowerVector,
    demands: &RateDemands,
) -> Result<Vec<Vec<ConstraintCheck>>> {
    topology
        .groups()
        .map(|((i, m), _)| {
            let h = group_interference(topology, q, i, m)?;
            Ok(group_constraint_checks(
                topology.bandwidth(),
                demands.group(i, m),
                p.group(i, m),
                &h,
            ))
        })
        .collect()
}

/// Sum of all users' achievable rates, with interference evaluated at the
/// allocation's own group totals.
pub fn sum_rate(topology: &NetworkTopology, p: &UserPowerAllocation) -> Result<f64> {
    let q = p.totals();
    let h = interference_terms(topology, &q)?;
    Ok(topology
        .groups()
        .zip(&h)
        .map(|(((i, m), _), h)| {
            group_rates(topology.bandwidth(), p.group(i, m), h)
                .iter()
                .sum::<f64>()
        })
        .sum())
}
