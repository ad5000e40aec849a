//! Channel generation, user pairing and batch runs.
//!
//! A [`ScenarioConfig`] (TOML) describes the layout, propagation, demands and
//! budget sweep. [`run_scenario`] drops users, pairs them onto subchannels,
//! runs the chosen algorithm for every `(seed, budget)` and validates the
//! result; [`write_artifacts`] stores the summary table and per-run traces.

mod channels;
mod config;
pub mod fixtures;
mod pairing;
mod run;

pub use channels::{
    build_topology, drop_users, generate_channels, link_gain, path_loss_db, site_distance, sites,
    UserDrop,
};
pub use config::{
    dbm_to_watts, Algorithm, Layout, Pairing, Propagation, RateSpec, ScenarioConfig, Tolerances,
};
pub use pairing::pair_users;
pub use run::{
    run_scenario, summary_csv, summary_json, write_artifacts, OutputFormat, RunArtifacts,
    SummaryRow, Trace, SUMMARY_HEADER,
};
