use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{Layout, Pairing, Propagation, ScenarioConfig};
use super::pairing::pair_users;
use crate::error::{Error, Result};
use crate::model::{NetworkTopology, UserLink};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Path loss in dB at `distance` meters: intercept plus slope per decade of
/// kilometers.
pub fn path_loss_db(prop: &Propagation, distance: f64) -> f64 {
    prop.pathloss_intercept_db + prop.pathloss_slope_db * (distance / 1000.0).log10()
}

/// Linear power gain of one link.
pub fn link_gain(prop: &Propagation, distance: f64, shadowing_db: f64) -> f64 {
    10f64.powf((prop.antenna_gain_dbi - path_loss_db(prop, distance) - shadowing_db) / 10.0)
}

/// Site positions and the circumradius of each hexagonal cell.
pub fn sites(layout: &Layout) -> (Vec<[f64; 2]>, f64) {
    match layout {
        Layout::ThreeSite {
            inter_site_distance: d,
        } => (
            vec![[0.0, 0.0], [*d, 0.0], [d / 2.0, SQRT_3 * d / 2.0]],
            d / SQRT_3,
        ),
        Layout::Sites {
            positions,
            cell_radius,
        } => (positions.clone(), *cell_radius),
    }
}

/// Distance from `user` to `site`; the three-site layout repeats on a torus
/// and takes the nearest image.
pub fn site_distance(layout: &Layout, user: [f64; 2], site: [f64; 2]) -> f64 {
    let direct = |s: [f64; 2]| (user[0] - s[0]).hypot(user[1] - s[1]);
    match layout {
        Layout::Sites { .. } => direct(site),
        Layout::ThreeSite {
            inter_site_distance: d,
        } => {
            let v1 = [1.5 * d, SQRT_3 * d / 2.0];
            let v2 = [0.0, SQRT_3 * d];
            let mut best = f64::INFINITY;
            for n1 in -1..=1 {
                for n2 in -1..=1 {
                    let (a, b) = (n1 as f64, n2 as f64);
                    let image = [
                        site[0] + a * v1[0] + b * v2[0],
                        site[1] + a * v1[1] + b * v2[1],
                    ];
                    best = best.min(direct(image));
                }
            }
            best
        }
    }
}

fn in_hexagon(dx: f64, dy: f64, circumradius: f64) -> bool {
    let inradius = circumradius * SQRT_3 / 2.0;
    [0.0f64, 60.0, 120.0].iter().all(|deg| {
        let t = deg.to_radians();
        (dx * t.cos() + dy * t.sin()).abs() <= inradius
    })
}

/// Users of one random drop, numbered cell by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDrop {
    pub positions: Vec<[f64; 2]>,
    pub serving: Vec<usize>,
    /// Linear gain from every cell to every user.
    pub gains: Vec<Vec<f64>>,
}

impl UserDrop {
    /// Users of `cell` in ascending order of their own gain, ties by id.
    pub fn sorted_users(&self, cell: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.serving.len())
            .filter(|&u| self.serving[u] == cell)
            .collect();
        ids.sort_by(|&a, &b| {
            self.gains[a][cell]
                .total_cmp(&self.gains[b][cell])
                .then(a.cmp(&b))
        });
        ids
    }
}

/// Place users uniformly in their cells and draw their channels.
/// Deterministic for a fixed `seed`.
pub fn drop_users(cfg: &ScenarioConfig, seed: u64) -> Result<UserDrop> {
    let (site_pos, radius) = sites(&cfg.layout);
    let num_cells = site_pos.len();
    let prop = &cfg.propagation;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shadow = Normal::new(0.0, prop.shadowing_std_db)
        .map_err(|e| Error::Config(format!("shadowing: {e}")))?;
    let mut drop = UserDrop {
        positions: Vec::new(),
        serving: Vec::new(),
        gains: Vec::new(),
    };
    for (cell, site) in site_pos.iter().enumerate() {
        for _ in 0..cfg.users_per_cell {
            let (dx, dy) = loop {
                let dx = rng.random_range(-radius..radius);
                let dy = rng.random_range(-radius..radius);
                if in_hexagon(dx, dy, radius) && dx.hypot(dy) >= prop.min_distance {
                    break (dx, dy);
                }
            };
            let pos = [site[0] + dx, site[1] + dy];
            let gains = site_pos
                .iter()
                .map(|&s| {
                    let d = site_distance(&cfg.layout, pos, s).max(prop.min_distance);
                    link_gain(prop, d, shadow.sample(&mut rng))
                })
                .collect();
            drop.positions.push(pos);
            drop.serving.push(cell);
            drop.gains.push(gains);
        }
    }
    if let Some(table) = &cfg.link_gains_db {
        for (g, row) in drop.gains.iter_mut().zip(table) {
            *g = row.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        }
    }
    debug_assert_eq!(drop.gains.iter().map(Vec::len).max(), Some(num_cells));
    Ok(drop)
}

/// Group the users of `drop` onto subchannels with `pairing`.
pub fn build_topology(
    cfg: &ScenarioConfig,
    drop: &UserDrop,
    pairing: Pairing,
    budget_watts: f64,
) -> Result<NetworkTopology> {
    let num_cells = cfg.num_cells();
    let mut builder = NetworkTopology::builder(num_cells, cfg.num_subchannels)
        .bandwidth(cfg.bandwidth)
        .noise_power(cfg.noise_power())
        .uniform_budget(budget_watts);
    for cell in 0..num_cells {
        let groups = pair_users(&drop.sorted_users(cell), cfg.users_per_subchannel, pairing)?;
        for (m, group) in groups.into_iter().enumerate() {
            let users = group
                .into_iter()
                .map(|u| UserLink::new(u, drop.gains[u].clone()))
                .collect();
            builder = builder.group(cell, m, users);
        }
    }
    builder.build()
}

/// One drop at `seed`, grouped with the configured pairing and the first
/// budget of the sweep.
pub fn generate_channels(cfg: &ScenarioConfig, seed: u64) -> Result<NetworkTopology> {
    let drop = drop_users(cfg, seed)?;
    let budget = super::config::dbm_to_watts(cfg.budgets_dbm[0]);
    build_topology(cfg, &drop, cfg.pairing, budget)
}
