use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::workload::{Workload, WorkloadConfig};
use super::SimError;
use crate::router::{
    build_mdp, cloud_cost, edge_cost, featurize_task, route, value_iteration, Action, Battery,
    Complexity, ComplexityMix, CostBreakdown, CostModel, DeviceProfile, NetworkModel,
    NetworkState, RoutingPolicy, RoutingState, TaskKind,
};

const NETWORK_STREAM: u64 = 1;
const BATTERY_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    AllCloud,
    AllEdge,
    /// Cloud for tasks at or above the configured complexity, when online.
    Threshold,
    Mdp,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::AllCloud,
        PolicyKind::AllEdge,
        PolicyKind::Threshold,
        PolicyKind::Mdp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::AllCloud => "all_cloud",
            PolicyKind::AllEdge => "all_edge",
            PolicyKind::Threshold => "threshold",
            PolicyKind::Mdp => "mdp",
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub workload: WorkloadConfig,
    pub device: DeviceProfile,
    pub network: NetworkModel,
    pub cost: CostModel,
    /// Complexity distribution assumed by the MDP's transition model.
    pub complexity_mix: ComplexityMix,
    pub tolerance: f64,
    pub policy: PolicyKind,
    pub threshold: Complexity,
    /// Latency charged when a cloud call is attempted while offline.
    pub offline_timeout_ms: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let device = DeviceProfile::default();
        let network = NetworkModel::for_device(&device);
        Self {
            workload: WorkloadConfig::default(),
            device,
            network,
            cost: CostModel::default(),
            complexity_mix: ComplexityMix::default(),
            tolerance: 1e-8,
            policy: PolicyKind::Mdp,
            threshold: Complexity::High,
            offline_timeout_ms: 10_000.0,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn with_policy(&self, policy: PolicyKind) -> Self {
        Self {
            policy,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

/// Solves the routing MDP described by the config.
pub fn solve_policy(config: &SimConfig) -> Result<RoutingPolicy, SimError> {
    let mdp = build_mdp(&config.device, &config.network, &config.cost, &config.complexity_mix)?;
    Ok(value_iteration(&mdp.model, config.tolerance)?)
}

/// One routed task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub task_id: u64,
    pub arrival_s: f64,
    pub kind: TaskKind,
    pub state: RoutingState,
    pub action: Action,
    /// Cloud attempted while offline.
    pub failed: bool,
    pub latency_ms: f64,
    pub energy_units: f64,
    pub accuracy_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub policy: PolicyKind,
    pub seed: u64,
    pub n_tasks: usize,
    pub median_latency_ms: f64,
    /// Nearest-rank 95th percentile.
    pub p95_latency_ms: f64,
    /// Share of tasks strictly under 1000 ms.
    pub sub_second_fraction: f64,
    /// Share of tasks routed to the cloud, failed attempts included.
    pub cloud_call_fraction: f64,
    pub total_energy_units: f64,
    pub mean_accuracy_loss: f64,
    pub failed_tasks: usize,
}

impl MetricsReport {
    pub fn from_events(policy: PolicyKind, seed: u64, events: &[SimEvent]) -> Self {
        let n = events.len();
        let mut latencies: Vec<f64> = events.iter().map(|e| e.latency_ms).collect();
        latencies.sort_by(f64::total_cmp);
        let (median, p95) = if n == 0 {
            (0.0, 0.0)
        } else {
            let median = if n % 2 == 1 {
                latencies[n / 2]
            } else {
                (latencies[n / 2 - 1] + latencies[n / 2]) / 2.0
            };
            let rank = ((0.95 * n as f64).ceil() as usize).max(1);
            (median, latencies[rank - 1])
        };
        let frac = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
        let mean_loss = if n == 0 {
            0.0
        } else {
            events.iter().map(|e| e.accuracy_loss).sum::<f64>() / n as f64
        };
        Self {
            policy,
            seed,
            n_tasks: n,
            median_latency_ms: median,
            p95_latency_ms: p95,
            sub_second_fraction: frac(events.iter().filter(|e| e.latency_ms < 1000.0).count()),
            cloud_call_fraction: frac(events.iter().filter(|e| e.action == Action::Cloud).count()),
            total_energy_units: events.iter().map(|e| e.energy_units).sum(),
            mean_accuracy_loss: mean_loss,
            failed_tasks: events.iter().filter(|e| e.failed).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub metrics: MetricsReport,
    pub events: Vec<SimEvent>,
}

fn choose(config: &SimConfig, policy: Option<&RoutingPolicy>, state: RoutingState) -> Action {
    match config.policy {
        PolicyKind::AllCloud => Action::Cloud,
        PolicyKind::AllEdge => Action::Edge,
        PolicyKind::Threshold => {
            if state.network != NetworkState::Offline && state.complexity >= config.threshold {
                Action::Cloud
            } else {
                Action::Edge
            }
        }
        PolicyKind::Mdp => route(policy.expect("checked by caller"), state),
    }
}

fn step_network(model: &NetworkModel, from: NetworkState, u: f64) -> NetworkState {
    let row = model.transition[from.index()];
    let mut acc = 0.0;
    for (i, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return NetworkState::from_index(i);
        }
    }
    // Rounding left u above the cumulative sum: take the last state with mass.
    let last = row.iter().rposition(|p| *p > 0.0).unwrap_or(0);
    NetworkState::from_index(last)
}

/// Replays a workload through one routing policy.
///
/// The network chain steps once per arrival after the first and the battery
/// may drain after each task, each from its own RNG stream so that every
/// policy sees the same network trace. A cloud call while offline is
/// recorded as failed with the configured timeout latency.
pub fn run_simulation(
    workload: &Workload,
    config: &SimConfig,
    policy: Option<&RoutingPolicy>,
) -> Result<SimOutcome, SimError> {
    if workload.seed != config.seed {
        return Err(SimError::SeedMismatch {
            expected: workload.seed,
            found: config.seed,
        });
    }
    config.device.validate()?;
    config.network.validate()?;
    config.cost.validate()?;
    if !(config.offline_timeout_ms >= 0.0 && config.offline_timeout_ms.is_finite()) {
        return Err(SimError::InvalidConfig("offline timeout must be non-negative".into()));
    }
    if config.policy == PolicyKind::Mdp {
        match policy {
            None => return Err(SimError::MissingPolicy),
            Some(p) if p.action.len() != RoutingState::COUNT => {
                return Err(SimError::InvalidConfig("policy does not cover all states".into()))
            }
            _ => {}
        }
    }

    let max_energy = Complexity::ALL
        .iter()
        .flat_map(|c| {
            [
                config.device.edge_energy_units.get(*c),
                config.network.cloud_energy_units.get(*c),
            ]
        })
        .fold(0.0_f64, f64::max);

    let mut net_rng = ChaCha8Rng::seed_from_u64(workload.seed);
    net_rng.set_stream(NETWORK_STREAM);
    let mut bat_rng = ChaCha8Rng::seed_from_u64(workload.seed);
    bat_rng.set_stream(BATTERY_STREAM);

    let mut network = config.network.initial;
    let mut battery = config.device.battery;
    let mut events = Vec::with_capacity(workload.tasks.len());
    for (i, task) in workload.tasks.iter().enumerate() {
        if i > 0 {
            network = step_network(&config.network, network, net_rng.random());
        }
        let state = RoutingState::new(
            featurize_task(&task.descriptor).complexity,
            config.device.device_class,
            network,
            battery,
        );
        let action = choose(config, policy, state);
        let (cost, failed) = match action {
            Action::Edge => (edge_cost(&config.device, state), false),
            Action::Cloud => match cloud_cost(&config.network, state) {
                Some(c) => (c, false),
                None => (
                    CostBreakdown {
                        latency_ms: config.offline_timeout_ms,
                        energy_units: 0.0,
                        accuracy_loss: 0.0,
                    },
                    true,
                ),
            },
        };
        let u: f64 = bat_rng.random();
        if battery == Battery::OkBattery && max_energy > 0.0 {
            let p = config.device.battery_drain_prob * cost.energy_units / max_energy;
            if u < p {
                battery = Battery::LowBattery;
            }
        }
        events.push(SimEvent {
            task_id: task.id,
            arrival_s: task.arrival_s,
            kind: task.descriptor.kind,
            state,
            action,
            failed,
            latency_ms: cost.latency_ms,
            energy_units: cost.energy_units,
            accuracy_loss: cost.accuracy_loss,
        });
    }
    Ok(SimOutcome {
        metrics: MetricsReport::from_events(config.policy, workload.seed, &events),
        events,
    })
}
