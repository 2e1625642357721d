use serde::{Deserialize, Serialize};

use super::solver::RoutingPolicy;
use super::types::*;
use super::RouterError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEntry {
    pub complexity: Complexity,
    pub device: DeviceClass,
    pub network: NetworkState,
    pub battery: Battery,
    pub action: Action,
    pub value: f64,
}

/// JSON form of a solved routing policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyExport {
    pub config_hash: String,
    pub states: Vec<PolicyEntry>,
    pub residual: f64,
}

impl PolicyExport {
    pub fn from_policy(policy: &RoutingPolicy, config_hash: impl Into<String>) -> Self {
        let states = RoutingState::all()
            .map(|s| PolicyEntry {
                complexity: s.complexity,
                device: s.device,
                network: s.network,
                battery: s.battery,
                action: policy.action[s.index()],
                value: policy.value[s.index()],
            })
            .collect();
        Self {
            config_hash: config_hash.into(),
            states,
            residual: policy.residual,
        }
    }

    /// Rebuilds the dense policy; every state must appear exactly once and
    /// Offline states must route to the edge.
    pub fn into_policy(self) -> Result<RoutingPolicy, RouterError> {
        let mut action = vec![None; RoutingState::COUNT];
        let mut value = vec![0.0; RoutingState::COUNT];
        for e in &self.states {
            let s = RoutingState::new(e.complexity, e.device, e.network, e.battery);
            if action[s.index()].is_some() {
                return Err(RouterError::BadExport(format!("state {s:?} listed twice")));
            }
            if s.network == NetworkState::Offline && e.action == Action::Cloud {
                return Err(RouterError::BadExport(format!(
                    "state {s:?} routes to cloud while offline"
                )));
            }
            action[s.index()] = Some(e.action);
            value[s.index()] = e.value;
        }
        let action = action
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                a.ok_or_else(|| {
                    RouterError::BadExport(format!("state {:?} missing", RoutingState::from_index(i)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RoutingPolicy {
            action,
            value,
            residual: self.residual,
            deltas: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::router::{build_mdp, value_iteration, ComplexityMix, CostModel, DeviceProfile, NetworkModel};

    #[test]
    fn export_roundtrip() {
        let device = DeviceProfile::default();
        let network = NetworkModel::for_device(&device);
        let mdp = build_mdp(&device, &network, &CostModel::default(), &ComplexityMix::default()).unwrap();
        let policy = value_iteration(&mdp.model, 1e-8).unwrap();
        let export = PolicyExport::from_policy(&policy, "abc");
        let json = serde_json::to_string(&export).unwrap();
        let back: PolicyExport = serde_json::from_str(&json).unwrap();
        let restored = back.into_policy().unwrap();
        assert_eq!(restored.action, policy.action);
        assert_eq!(restored.value, policy.value);
    }

    #[test]
    fn incomplete_export_is_rejected() {
        let export = PolicyExport {
            config_hash: String::new(),
            states: Vec::new(),
            residual: 0.0,
        };
        assert!(matches!(export.into_policy(), Err(RouterError::BadExport(_))));
    }
}
