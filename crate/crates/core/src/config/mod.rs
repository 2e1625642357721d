//! The central configuration file.
//!
//! Written in a restricted YAML subset (see [`yaml`]). Every section and
//! field is optional; omitted values take the built-in defaults. Unknown
//! keys are rejected.

pub mod yaml;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::BandConfig;
use crate::fusion::FusionWeights;
use crate::router::{
    Battery, Complexity, ComplexityMix, CostModel, DeviceClass, DeviceProfile, NetworkModel,
    NetworkState, PerComplexity,
};
use crate::sim::{PolicyKind, SimConfig, WorkloadConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Yaml(#[from] yaml::YamlError),
    #[error("config schema: {0}")]
    Schema(String),
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RouterSection {
    pub gamma: f64,
    pub tolerance: f64,
    pub w_latency: f64,
    pub w_energy: f64,
    pub w_accuracy: f64,
    pub device_class: DeviceClass,
    pub battery: Battery,
    pub edge_latency_ms: PerComplexity<f64>,
    pub cpu_latency_factor: f64,
    pub edge_energy_units: PerComplexity<f64>,
    pub edge_accuracy_loss: PerComplexity<f64>,
    pub battery_drain_prob: f64,
    pub good_rtt_ms: f64,
    /// Defaults to three times the good RTT.
    pub degraded_rtt_ms: Option<f64>,
    pub cloud_compute_ms: PerComplexity<f64>,
    /// Cloud energy as a multiple of edge energy.
    pub cloud_energy_ratio: f64,
    pub complexity_mix: PerComplexity<f64>,
}

impl Default for RouterSection {
    fn default() -> Self {
        let device = DeviceProfile::default();
        let network = NetworkModel::for_device(&device);
        let cost = CostModel::default();
        Self {
            gamma: cost.discount_gamma,
            tolerance: 1e-8,
            w_latency: cost.w_latency,
            w_energy: cost.w_energy,
            w_accuracy: cost.w_accuracy,
            device_class: device.device_class,
            battery: device.battery,
            edge_latency_ms: device.edge_latency_ms,
            cpu_latency_factor: device.cpu_latency_factor,
            edge_energy_units: device.edge_energy_units,
            edge_accuracy_loss: device.edge_accuracy_loss,
            battery_drain_prob: device.battery_drain_prob,
            good_rtt_ms: network.good_rtt_ms,
            degraded_rtt_ms: None,
            cloud_compute_ms: network.cloud_compute_ms,
            cloud_energy_ratio: NetworkModel::DEFAULT_CLOUD_ENERGY_RATIO,
            complexity_mix: ComplexityMix::default().0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub initial: NetworkState,
    /// Rows and columns in Good, Degraded, Offline order.
    pub transition: [[f64; 3]; 3],
}

impl Default for NetworkSection {
    fn default() -> Self {
        let network = NetworkModel::for_device(&DeviceProfile::default());
        Self {
            initial: network.initial,
            transition: network.transition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub seed: u64,
    /// Policy used by `simulate`.
    pub policy: PolicyKind,
    /// Policies used by `compare`; the first is the baseline.
    pub policies: Vec<PolicyKind>,
    pub threshold: Complexity,
    pub offline_timeout_ms: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            seed: 42,
            policy: PolicyKind::Mdp,
            policies: PolicyKind::ALL.to_vec(),
            threshold: Complexity::High,
            offline_timeout_ms: 10_000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexSection {
    pub max_files: usize,
}

impl Default for IndexSection {
    fn default() -> Self {
        Self { max_files: 500 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub router: RouterSection,
    pub network: NetworkSection,
    pub workload: WorkloadConfig,
    pub simulation: SimulationSection,
    pub embed: BandConfig,
    pub fusion: FusionWeights,
    pub index: IndexSection,
}

impl Config {
    pub fn from_yaml_str(text: &str) -> Result<Self, ConfigError> {
        let value = yaml::parse(text)?;
        if value.is_null() {
            return Ok(Self::default());
        }
        serde_json::from_value(value).map_err(|e| ConfigError::Schema(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_yaml_str(&std::fs::read_to_string(path)?)
    }

    pub fn device(&self) -> DeviceProfile {
        let r = &self.router;
        DeviceProfile {
            device_class: r.device_class,
            battery: r.battery,
            edge_latency_ms: r.edge_latency_ms,
            cpu_latency_factor: r.cpu_latency_factor,
            edge_energy_units: r.edge_energy_units,
            edge_accuracy_loss: r.edge_accuracy_loss,
            battery_drain_prob: r.battery_drain_prob,
        }
    }

    pub fn network_model(&self) -> NetworkModel {
        let r = &self.router;
        NetworkModel {
            initial: self.network.initial,
            transition: self.network.transition,
            good_rtt_ms: r.good_rtt_ms,
            degraded_rtt_ms: r.degraded_rtt_ms.unwrap_or(3.0 * r.good_rtt_ms),
            cloud_compute_ms: r.cloud_compute_ms,
            cloud_energy_units: r.edge_energy_units.map(|e| e * r.cloud_energy_ratio),
        }
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel {
            w_latency: self.router.w_latency,
            w_energy: self.router.w_energy,
            w_accuracy: self.router.w_accuracy,
            discount_gamma: self.router.gamma,
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            workload: self.workload.clone(),
            device: self.device(),
            network: self.network_model(),
            cost: self.cost_model(),
            complexity_mix: ComplexityMix(self.router.complexity_mix),
            tolerance: self.router.tolerance,
            policy: self.simulation.policy,
            threshold: self.simulation.threshold,
            offline_timeout_ms: self.simulation.offline_timeout_ms,
            seed: self.simulation.seed,
        }
    }

    /// Fingerprint of everything that shapes the routing policy.
    pub fn router_hash(&self) -> String {
        crate::fingerprint(&(&self.router, &self.network))
    }

    pub fn fingerprint(&self) -> String {
        crate::fingerprint(self)
    }
}
