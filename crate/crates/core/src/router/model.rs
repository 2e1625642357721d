use serde::{Deserialize, Serialize};

use super::types::*;
use super::RouterError;

const STOCHASTIC_TOL: f64 = 1e-9;

/// Assigns a complexity level from the fixed rule table.
pub fn featurize_task(task: &TaskDescriptor) -> TaskFeatures {
    let complexity = if task.kind == TaskKind::CrashAnalysis
        || task.cross_file_deps >= 5
        || task.files_touched >= 10
    {
        Complexity::High
    } else if task.cross_file_deps >= 1 || task.token_length >= 2000 {
        Complexity::Medium
    } else {
        Complexity::Low
    };
    TaskFeatures { complexity }
}

/// On-device execution characteristics.
///
/// `edge_latency_ms` holds the GPU figures; CPU-only devices are slower by
/// `cpu_latency_factor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub device_class: DeviceClass,
    pub battery: Battery,
    pub edge_latency_ms: PerComplexity<f64>,
    pub cpu_latency_factor: f64,
    pub edge_energy_units: PerComplexity<f64>,
    pub edge_accuracy_loss: PerComplexity<f64>,
    /// Ok -> Low probability per step at the largest energy draw.
    pub battery_drain_prob: f64,
}

impl Default for DeviceProfile {
    fn default() -> Self {
        Self {
            device_class: DeviceClass::CpuOnly,
            battery: Battery::OkBattery,
            edge_latency_ms: PerComplexity::new(150.0, 400.0, 1200.0),
            cpu_latency_factor: 2.0,
            edge_energy_units: PerComplexity::new(1.0, 2.5, 6.0),
            edge_accuracy_loss: PerComplexity::new(0.0, 0.05, 0.29),
            battery_drain_prob: 0.05,
        }
    }
}

impl DeviceProfile {
    pub fn edge_latency(&self, complexity: Complexity, device: DeviceClass) -> f64 {
        let base = self.edge_latency_ms.get(complexity);
        match device {
            DeviceClass::Gpu => base,
            DeviceClass::CpuOnly => base * self.cpu_latency_factor,
        }
    }

    pub fn validate(&self) -> Result<(), RouterError> {
        for c in Complexity::ALL {
            let lat = self.edge_latency_ms.get(c);
            if !(lat > 0.0 && lat.is_finite()) {
                return Err(RouterError::InvalidParameter(format!(
                    "edge latency for {c:?} must be positive, got {lat}"
                )));
            }
            let e = self.edge_energy_units.get(c);
            if !(e >= 0.0 && e.is_finite()) {
                return Err(RouterError::InvalidParameter(format!(
                    "edge energy for {c:?} must be non-negative, got {e}"
                )));
            }
            let loss = self.edge_accuracy_loss.get(c);
            if !(0.0..=1.0).contains(&loss) {
                return Err(RouterError::InvalidParameter(format!(
                    "edge accuracy loss for {c:?} must lie in [0, 1], got {loss}"
                )));
            }
        }
        if !(self.cpu_latency_factor > 0.0 && self.cpu_latency_factor.is_finite()) {
            return Err(RouterError::InvalidParameter(
                "cpu_latency_factor must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.battery_drain_prob) {
            return Err(RouterError::InvalidParameter(
                "battery_drain_prob must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Three-state network quality chain plus cloud-side costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub initial: NetworkState,
    /// Row-stochastic, indexed `[from][to]` in Good, Degraded, Offline order.
    pub transition: [[f64; 3]; 3],
    pub good_rtt_ms: f64,
    pub degraded_rtt_ms: f64,
    pub cloud_compute_ms: PerComplexity<f64>,
    pub cloud_energy_units: PerComplexity<f64>,
}

impl NetworkModel {
    pub const DEFAULT_GOOD_RTT_MS: f64 = 2400.0;
    pub const DEFAULT_CLOUD_ENERGY_RATIO: f64 = 3.8;

    /// Default model whose cloud energy is a fixed multiple of the device's edge energy.
    pub fn for_device(device: &DeviceProfile) -> Self {
        Self {
            initial: NetworkState::Good,
            transition: [[0.90, 0.08, 0.02], [0.30, 0.60, 0.10], [0.40, 0.20, 0.40]],
            good_rtt_ms: Self::DEFAULT_GOOD_RTT_MS,
            degraded_rtt_ms: 3.0 * Self::DEFAULT_GOOD_RTT_MS,
            cloud_compute_ms: PerComplexity::new(100.0, 250.0, 600.0),
            cloud_energy_units: device
                .edge_energy_units
                .map(|e| e * Self::DEFAULT_CLOUD_ENERGY_RATIO),
        }
    }

    /// Round-trip time; Offline has none.
    pub fn rtt(&self, state: NetworkState) -> Option<f64> {
        match state {
            NetworkState::Good => Some(self.good_rtt_ms),
            NetworkState::Degraded => Some(self.degraded_rtt_ms),
            NetworkState::Offline => None,
        }
    }

    pub fn validate(&self) -> Result<(), RouterError> {
        for (row, probs) in self.transition.iter().enumerate() {
            let sum: f64 = probs.iter().sum();
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > STOCHASTIC_TOL
            {
                return Err(RouterError::NonStochastic { row, sum });
            }
        }
        for (name, rtt) in [("good", self.good_rtt_ms), ("degraded", self.degraded_rtt_ms)] {
            if !(rtt > 0.0 && rtt.is_finite()) {
                return Err(RouterError::InvalidParameter(format!(
                    "{name} rtt must be positive, got {rtt}"
                )));
            }
        }
        for c in Complexity::ALL {
            if !(self.cloud_compute_ms.get(c) >= 0.0) || !(self.cloud_energy_units.get(c) >= 0.0)
            {
                return Err(RouterError::InvalidParameter(format!(
                    "cloud costs for {c:?} must be non-negative"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Weight per millisecond.
    pub w_latency: f64,
    /// Weight per energy unit.
    pub w_energy: f64,
    /// Weight per unit of accuracy loss.
    pub w_accuracy: f64,
    pub discount_gamma: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            w_latency: 0.001,
            w_energy: 0.1,
            w_accuracy: 10.0,
            discount_gamma: 0.95,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), RouterError> {
        if [self.w_latency, self.w_energy, self.w_accuracy]
            .iter()
            .any(|w| !(*w >= 0.0 && w.is_finite()))
        {
            return Err(RouterError::InvalidParameter(
                "cost weights must be finite and non-negative".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.discount_gamma) {
            return Err(RouterError::InvalidGamma(self.discount_gamma));
        }
        Ok(())
    }

    pub fn weigh(&self, c: &CostBreakdown) -> f64 {
        self.w_latency * c.latency_ms + self.w_energy * c.energy_units + self.w_accuracy * c.accuracy_loss
    }
}

/// Unweighted cost of executing one task in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub latency_ms: f64,
    pub energy_units: f64,
    pub accuracy_loss: f64,
}

/// A finite two-action MDP with dense transition rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpModel {
    gamma: f64,
    rewards: Vec<[f64; 2]>,
    transitions: Vec<[Vec<f64>; 2]>,
    legal: Vec<[bool; 2]>,
}

impl MdpModel {
    /// Validates shapes, stochasticity of every legal row and that each state
    /// has at least one legal action. Rows of masked actions are ignored.
    pub fn new(
        gamma: f64,
        rewards: Vec<[f64; 2]>,
        transitions: Vec<[Vec<f64>; 2]>,
        legal: Vec<[bool; 2]>,
    ) -> Result<Self, RouterError> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(RouterError::InvalidGamma(gamma));
        }
        let n = rewards.len();
        if transitions.len() != n || legal.len() != n {
            return Err(RouterError::InvalidParameter(format!(
                "shape mismatch: {n} reward rows, {} transition rows, {} mask rows",
                transitions.len(),
                legal.len()
            )));
        }
        for s in 0..n {
            if !legal[s][0] && !legal[s][1] {
                return Err(RouterError::NoLegalAction(s));
            }
            for a in 0..2 {
                if !legal[s][a] {
                    continue;
                }
                if !rewards[s][a].is_finite() {
                    return Err(RouterError::InvalidParameter(format!(
                        "reward for state {s} action {a} is not finite"
                    )));
                }
                let row = &transitions[s][a];
                if row.len() != n {
                    return Err(RouterError::InvalidParameter(format!(
                        "transition row for state {s} action {a} has length {}",
                        row.len()
                    )));
                }
                let sum: f64 = row.iter().sum();
                if row.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(RouterError::NonStochastic { row: s, sum });
                }
            }
        }
        Ok(Self {
            gamma,
            rewards,
            transitions,
            legal,
        })
    }

    pub fn num_states(&self) -> usize {
        self.rewards.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn reward(&self, state: usize, action: Action) -> f64 {
        self.rewards[state][action.index()]
    }

    pub fn transition_row(&self, state: usize, action: Action) -> &[f64] {
        &self.transitions[state][action.index()]
    }

    pub fn is_legal(&self, state: usize, action: Action) -> bool {
        self.legal[state][action.index()]
    }

    pub fn legal_actions(&self, state: usize) -> impl Iterator<Item = Action> + '_ {
        Action::ALL
            .into_iter()
            .filter(move |a| self.is_legal(state, *a))
    }
}

/// Complexity distribution of incoming tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityMix(pub PerComplexity<f64>);

impl Default for ComplexityMix {
    fn default() -> Self {
        ComplexityMix(PerComplexity::new(0.45, 0.27, 0.28))
    }
}

/// The offloading MDP over the 36-state product space, with the unweighted
/// cost components kept for diagnostics.
#[derive(Debug, Clone)]
pub struct RoutingMdp {
    pub model: MdpModel,
    pub cost: CostModel,
    components: Vec<[Option<CostBreakdown>; 2]>,
}

impl RoutingMdp {
    pub fn action_mask(&self, state: RoutingState) -> Vec<Action> {
        self.model.legal_actions(state.index()).collect()
    }

    pub fn reward(&self, state: RoutingState, action: Action) -> Option<f64> {
        let s = state.index();
        self.model
            .is_legal(s, action)
            .then(|| self.model.reward(s, action))
    }
}

/// Cost of running a task of the given state on the edge.
pub fn edge_cost(device: &DeviceProfile, state: RoutingState) -> CostBreakdown {
    CostBreakdown {
        latency_ms: device.edge_latency(state.complexity, state.device),
        energy_units: device.edge_energy_units.get(state.complexity),
        accuracy_loss: device.edge_accuracy_loss.get(state.complexity),
    }
}

/// Cost of sending a task to the cloud; `None` while offline.
pub fn cloud_cost(network: &NetworkModel, state: RoutingState) -> Option<CostBreakdown> {
    let rtt = network.rtt(state.network)?;
    Some(CostBreakdown {
        latency_ms: rtt + network.cloud_compute_ms.get(state.complexity),
        energy_units: network.cloud_energy_units.get(state.complexity),
        accuracy_loss: 0.0,
    })
}

pub fn build_mdp(
    device: &DeviceProfile,
    network: &NetworkModel,
    cost: &CostModel,
    mix: &ComplexityMix,
) -> Result<RoutingMdp, RouterError> {
    device.validate()?;
    network.validate()?;
    cost.validate()?;
    let mix_values = mix.0.values();
    let mix_sum: f64 = mix_values.iter().sum();
    if mix_values.iter().any(|p| !(0.0..=1.0).contains(p)) || (mix_sum - 1.0).abs() > STOCHASTIC_TOL
    {
        return Err(RouterError::BadMix(mix_sum));
    }

    let components: Vec<[Option<CostBreakdown>; 2]> = RoutingState::all()
        .map(|s| [Some(edge_cost(device, s)), cloud_cost(network, s)])
        .collect();
    let max_energy = components
        .iter()
        .flatten()
        .flatten()
        .map(|c| c.energy_units)
        .fold(0.0_f64, f64::max);

    let n = RoutingState::COUNT;
    let mut rewards = Vec::with_capacity(n);
    let mut transitions = Vec::with_capacity(n);
    let mut legal = Vec::with_capacity(n);
    for state in RoutingState::all() {
        let comps = components[state.index()];
        let mut r = [0.0; 2];
        let mut rows = [vec![0.0; n], vec![0.0; n]];
        for action in Action::ALL {
            let Some(c) = comps[action.index()] else {
                continue;
            };
            r[action.index()] = -cost.weigh(&c);
            let drain = if max_energy > 0.0 {
                device.battery_drain_prob * c.energy_units / max_energy
            } else {
                0.0
            };
            let battery_next: [(Battery, f64); 2] = match state.battery {
                Battery::LowBattery => [(Battery::LowBattery, 1.0), (Battery::OkBattery, 0.0)],
                Battery::OkBattery => [(Battery::LowBattery, drain), (Battery::OkBattery, 1.0 - drain)],
            };
            let row = &mut rows[action.index()];
            for next_c in Complexity::ALL {
                for next_n in NetworkState::ALL {
                    let p_net = network.transition[state.network.index()][next_n.index()];
                    for (next_b, p_b) in battery_next {
                        let next = RoutingState::new(next_c, state.device, next_n, next_b);
                        row[next.index()] += mix.0.get(next_c) * p_net * p_b;
                    }
                }
            }
        }
        rewards.push(r);
        transitions.push(rows);
        legal.push([comps[0].is_some(), comps[1].is_some()]);
    }

    let model = MdpModel::new(cost.discount_gamma, rewards, transitions, legal)?;
    Ok(RoutingMdp {
        model,
        cost: *cost,
        components,
    })
}

/// Unweighted latency, energy and accuracy components of a reward.
pub fn expected_cost_breakdown(
    mdp: &RoutingMdp,
    state: RoutingState,
    action: Action,
) -> Result<CostBreakdown, RouterError> {
    mdp.components[state.index()][action.index()].ok_or(RouterError::MaskedAction { state, action })
}
