//! TOML scenario configuration with strict parsing and defaults matching
//! the builtin study setup.

use serde::Deserialize;
use thiserror::Error;

use crate::channel::LinkBudgetParams;
use crate::engine::Scenario;
use crate::orbit::{
    default_ground_stations, preset, preset_elevation_mask_deg, GroundStation, WalkerDeltaSpec,
    PRESET_NAMES,
};
use crate::routing::RoutingMetric;
use crate::switch::{lookup, SwitchError};
use crate::topology::FeederPolicy;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Switch(#[from] SwitchError),
    #[error("invalid config:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStationConfig {
    pub name: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude_km: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Builtin constellation preset name.
    pub constellation: String,
    /// Builtin switch fabric name.
    pub fabric: String,
    pub chunk_size_bytes: u64,
    #[serde(default = "d_target_load")]
    pub target_load: f64,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_duration_s")]
    pub duration_s: f64,
    #[serde(default = "d_n_snapshots")]
    pub n_snapshots: u32,
    #[serde(default)]
    pub chunk_limit: u64,
    #[serde(default = "d_k_paths")]
    pub k_paths: usize,
    #[serde(default = "d_max_wait_s")]
    pub max_wait_s: f64,
    #[serde(default = "d_tau_proc_s")]
    pub tau_proc_s: f64,
    /// Feeder elevation mask; defaults to the constellation's own mask.
    #[serde(default)]
    pub min_elevation_deg: Option<f64>,
    /// "all-visible", "best-visible", or "ascending-visible".
    #[serde(default = "d_feeder_policy")]
    pub feeder_policy: String,
    /// "min-hop" or "min-delay".
    #[serde(default = "d_routing_metric")]
    pub routing_metric: String,
    #[serde(default = "d_true")]
    pub include_insertion_loss: bool,
    #[serde(default)]
    pub include_wait_in_latency: bool,
    #[serde(default)]
    pub keep_records: bool,
    #[serde(default)]
    pub ground_stations: Vec<GroundStationConfig>,
    #[serde(default)]
    pub link_budget: LinkBudgetOverrides,
}

fn d_target_load() -> f64 {
    0.1
}
fn d_seed() -> u64 {
    1
}
fn d_duration_s() -> f64 {
    120.0
}
fn d_n_snapshots() -> u32 {
    10
}
fn d_k_paths() -> usize {
    5
}
fn d_max_wait_s() -> f64 {
    0.010
}
fn d_tau_proc_s() -> f64 {
    0.001
}
fn d_routing_metric() -> String {
    "min-delay".into()
}
fn d_feeder_policy() -> String {
    "ascending-visible".into()
}
fn d_true() -> bool {
    true
}

/// Optional overrides of the physical link budget; unset fields keep the
/// builtin defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudgetOverrides {
    pub bandwidth_hz: Option<f64>,
    pub n_ch: Option<u32>,
    pub visibility_km: Option<f64>,
    pub extinction_ratio: Option<f64>,
    pub snr_ref_db: Option<f64>,
    pub scintillation_percentile: Option<f64>,
    pub sigma_p_over_wd: Option<f64>,
}

impl LinkBudgetOverrides {
    pub fn apply(&self, base: &mut LinkBudgetParams) {
        if let Some(v) = self.bandwidth_hz {
            base.bandwidth_hz = v;
        }
        if let Some(v) = self.n_ch {
            base.n_ch = v;
        }
        if let Some(v) = self.visibility_km {
            base.visibility_km = v;
        }
        if let Some(v) = self.extinction_ratio {
            base.extinction_ratio = v;
        }
        if let Some(v) = self.snr_ref_db {
            base.snr_ref_db = v;
        }
        if let Some(v) = self.scintillation_percentile {
            base.scintillation_percentile = v;
        }
        if let Some(v) = self.sigma_p_over_wd {
            base.sigma_p_over_wd = v;
        }
    }
}

pub fn parse_feeder_policy(s: &str) -> Result<FeederPolicy, String> {
    match s {
        "all-visible" => Ok(FeederPolicy::AllVisible),
        "best-visible" => Ok(FeederPolicy::BestVisible),
        "ascending-visible" => Ok(FeederPolicy::AscendingVisible),
        "best-ascending" => Ok(FeederPolicy::BestAscending),
        other => Err(format!(
            "unknown feeder policy '{other}' (expected all-visible, best-visible, \
             ascending-visible, or best-ascending)"
        )),
    }
}

pub fn parse_routing_metric(s: &str) -> Result<RoutingMetric, String> {
    match s {
        "min-hop" => Ok(RoutingMetric::MinHop),
        "min-delay" => Ok(RoutingMetric::MinDelay),
        other => Err(format!(
            "unknown routing metric '{other}' (expected min-hop or min-delay)"
        )),
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Validate every field and report all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        if preset(&self.constellation).is_none() {
            errors.push(format!(
                "unknown constellation '{}' (expected one of {})",
                self.constellation,
                PRESET_NAMES.join(", ")
            ));
        }
        if let Err(e) = lookup(&self.fabric) {
            errors.push(e.to_string());
        }
        if self.chunk_size_bytes == 0 {
            errors.push("chunk_size_bytes must be positive".into());
        }
        if !(self.target_load > 0.0) {
            errors.push("target_load must be positive".into());
        }
        if !(self.duration_s > 0.0) {
            errors.push("duration_s must be positive".into());
        }
        if self.n_snapshots == 0 {
            errors.push("n_snapshots must be >= 1".into());
        }
        if self.k_paths == 0 {
            errors.push("k_paths must be >= 1".into());
        }
        if self.max_wait_s < 0.0 {
            errors.push("max_wait_s must be >= 0".into());
        }
        if self.tau_proc_s < 0.0 {
            errors.push("tau_proc_s must be >= 0".into());
        }
        if let Some(el) = self.min_elevation_deg {
            if !(0.0..90.0).contains(&el) {
                errors.push("min_elevation_deg must be in [0, 90)".into());
            }
        }
        if let Err(e) = parse_routing_metric(&self.routing_metric) {
            errors.push(e);
        }
        if let Err(e) = parse_feeder_policy(&self.feeder_policy) {
            errors.push(e);
        }
        if self.ground_stations.len() == 1 {
            errors.push("ground_stations must list at least two stations".into());
        }
        for gs in &self.ground_stations {
            if !(-90.0..=90.0).contains(&gs.latitude_deg) {
                errors.push(format!("station '{}': latitude out of range", gs.name));
            }
            if !(-180.0..=180.0).contains(&gs.longitude_deg) {
                errors.push(format!("station '{}': longitude out of range", gs.name));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }

    /// Resolve into a runnable scenario.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        self.validate()?;
        let constellation: WalkerDeltaSpec = preset(&self.constellation).unwrap();
        let fabric = lookup(&self.fabric)?;
        let mut params = LinkBudgetParams::default();
        self.link_budget.apply(&mut params);
        let ground_stations: Vec<GroundStation> = if self.ground_stations.is_empty() {
            default_ground_stations()
        } else {
            self.ground_stations
                .iter()
                .map(|g| GroundStation {
                    name: g.name.clone(),
                    latitude_deg: g.latitude_deg,
                    longitude_deg: g.longitude_deg,
                    altitude_km: g.altitude_km,
                })
                .collect()
        };
        Ok(Scenario {
            constellation,
            ground_stations,
            fabric,
            params,
            chunk_size_bytes: self.chunk_size_bytes,
            target_load: self.target_load,
            seed: self.seed,
            duration_s: self.duration_s,
            n_snapshots: self.n_snapshots,
            chunk_limit: self.chunk_limit,
            k_paths: self.k_paths,
            max_wait_s: self.max_wait_s,
            tau_proc_s: self.tau_proc_s,
            min_elevation_deg: self
                .min_elevation_deg
                .unwrap_or_else(|| preset_elevation_mask_deg(&self.constellation)),
            feeder_policy: parse_feeder_policy(&self.feeder_policy).unwrap(),
            routing_metric: parse_routing_metric(&self.routing_metric).unwrap(),
            include_insertion_loss: self.include_insertion_loss,
            include_wait_in_latency: self.include_wait_in_latency,
            keep_records: self.keep_records,
        })
    }
}
