use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How users are grouped onto subchannels inside a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// Strongest with the next strongest.
    SS,
    /// Strongest with the weakest.
    SW,
    /// Strongest with the middle one.
    SM,
}

impl std::fmt::Display for Pairing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Pairing::SS => "SS",
            Pairing::SW => "SW",
            Pairing::SM => "SM",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    PowerMin,
    RateMax,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::PowerMin => "power-min",
            Algorithm::RateMax => "rate-max",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-min" => Ok(Algorithm::PowerMin),
            "rate-max" => Ok(Algorithm::RateMax),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Base-station sites, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Layout {
    /// Three sites on a hexagonal grid, wrapped onto a torus so every cell
    /// sees a full ring of interferers.
    #[serde(alias = "paper-default")]
    ThreeSite {
        #[serde(default = "default_isd")]
        inter_site_distance: f64,
    },
    /// Explicit site positions; users drop in a hexagon of `cell_radius`
    /// around their site and no wrap-around is applied.
    Sites {
        positions: Vec<[f64; 2]>,
        cell_radius: f64,
    },
}

impl Default for Layout {
    fn default() -> Self {
        Layout::ThreeSite {
            inter_site_distance: default_isd(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Propagation {
    /// Path loss at 1 km, dB.
    pub pathloss_intercept_db: f64,
    /// dB per decade of distance.
    pub pathloss_slope_db: f64,
    pub shadowing_std_db: f64,
    pub antenna_gain_dbi: f64,
    /// Users closer than this to their site are re-drawn, m.
    pub min_distance: f64,
}

impl Default for Propagation {
    fn default() -> Self {
        Self {
            pathloss_intercept_db: 128.1,
            pathloss_slope_db: 37.6,
            shadowing_std_db: 8.0,
            antenna_gain_dbi: 14.0,
            min_distance: 10.0,
        }
    }
}

/// Uniform demand or one per user, indexed cell by cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateSpec {
    Uniform(f64),
    PerUser(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Sum-power fixed point: max element change, W.
    pub power_min: f64,
    pub power_min_max_iter: usize,
    /// Sum-rate outer loop: change of the objective, bit/s.
    pub rate_max: f64,
    pub rate_max_max_outer: usize,
    /// Relative slack allowed when checking demands and budgets.
    pub validation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            power_min: 1e-8,
            power_min_max_iter: 10_000,
            rate_max: 1e-3,
            rate_max_max_outer: 1_000,
            validation: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub layout: Layout,
    pub users_per_cell: usize,
    #[serde(default = "default_pair_size")]
    pub users_per_subchannel: usize,
    pub num_subchannels: usize,
    /// Per subchannel, Hz.
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
    #[serde(default = "default_noise_dbm")]
    pub noise_power_dbm: f64,
    /// Per-cell power budgets to sweep, dBm.
    pub budgets_dbm: Vec<f64>,
    /// Rate demand, bit/s.
    #[serde(default = "default_rate")]
    pub rate: RateSpec,
    #[serde(default)]
    pub propagation: Propagation,
    /// Link gains in dB, one row per user (cell by cell) and one column per
    /// cell; replaces the generated channels when present.
    #[serde(default)]
    pub link_gains_db: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_pairing")]
    pub pairing: Pairing,
    #[serde(default)]
    pub seed: u64,
    /// Consecutive seeds starting at `seed`.
    #[serde(default = "one")]
    pub seeds: usize,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Sum-rate runs per instance; the best is kept.
    #[serde(default = "one")]
    pub multistart: usize,
    /// Initial auxiliary reserve of sum-rate runs, in `[0, 1]`.
    #[serde(default = "default_reserve")]
    pub reserve: f64,
}

fn default_isd() -> f64 {
    800.0
}
fn default_pair_size() -> usize {
    2
}
fn default_bandwidth() -> f64 {
    1e6
}
fn default_noise_dbm() -> f64 {
    -114.0
}
fn default_rate() -> RateSpec {
    RateSpec::Uniform(3e5)
}
fn default_pairing() -> Pairing {
    Pairing::SW
}
fn one() -> usize {
    1
}
pub(crate) fn default_reserve() -> f64 {
    0.0
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn num_cells(&self) -> usize {
        match &self.layout {
            Layout::ThreeSite { .. } => 3,
            Layout::Sites { positions, .. } => positions.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        match &self.layout {
            Layout::ThreeSite {
                inter_site_distance,
            } => positive("inter_site_distance", *inter_site_distance)?,
            Layout::Sites {
                positions,
                cell_radius,
            } => {
                if positions.is_empty() {
                    return bad("layout needs at least one site".into());
                }
                positive("cell_radius", *cell_radius)?;
            }
        }
        if self.users_per_subchannel == 0 || self.num_subchannels == 0 {
            return bad("users_per_subchannel and num_subchannels must be positive".into());
        }
        if !self
            .users_per_cell
            .is_multiple_of(self.users_per_subchannel)
        {
            return bad(format!(
                "users_per_subchannel {} does not divide users_per_cell {}",
                self.users_per_subchannel, self.users_per_cell
            ));
        }
        if self.users_per_cell != self.num_subchannels * self.users_per_subchannel {
            return bad(format!(
                "{} users per cell cannot fill {} subchannels of {}",
                self.users_per_cell, self.num_subchannels, self.users_per_subchannel
            ));
        }
        positive("bandwidth", self.bandwidth)?;
        if !self.noise_power_dbm.is_finite() {
            return bad("noise_power_dbm must be finite".into());
        }
        if self.budgets_dbm.is_empty() || self.budgets_dbm.iter().any(|b| !b.is_finite()) {
            return bad("budgets_dbm needs at least one finite value".into());
        }
        let users = self.num_cells() * self.users_per_cell;
        match &self.rate {
            RateSpec::Uniform(r) => positive("rate", *r)?,
            RateSpec::PerUser(r) => {
                if r.len() != users {
                    return bad(format!("{} rates for {users} users", r.len()));
                }
                for &v in r {
                    positive("rate", v)?;
                }
            }
        }
        let p = &self.propagation;
        if !(p.pathloss_intercept_db.is_finite() && p.pathloss_slope_db.is_finite())
            || !(p.shadowing_std_db.is_finite() && p.shadowing_std_db >= 0.0)
            || !p.antenna_gain_dbi.is_finite()
        {
            return bad("propagation parameters must be finite, shadowing non-negative".into());
        }
        positive("min_distance", p.min_distance)?;
        if let Some(table) = &self.link_gains_db {
            if table.len() != users || table.iter().any(|row| row.len() != self.num_cells()) {
                return bad(format!(
                    "link_gains_db must be {users} rows of {} values",
                    self.num_cells()
                ));
            }
            if table.iter().flatten().any(|g| !g.is_finite()) {
                return bad("link_gains_db entries must be finite".into());
            }
        }
        if self.seeds == 0 || self.multistart == 0 {
            return bad("seeds and multistart must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.reserve) {
            return bad(format!("reserve {} outside [0, 1]", self.reserve));
        }
        let t = &self.tolerances;
        positive("tolerances.power_min", t.power_min)?;
        positive("tolerances.rate_max", t.rate_max)?;
        positive("tolerances.validation", t.validation)?;
        if t.power_min_max_iter == 0 || t.rate_max_max_outer == 0 {
            return bad("iteration limits must be at least 1".into());
        }
        Ok(())
    }

    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }
}
