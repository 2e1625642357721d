//! Edge/cloud offloading as a finite discounted MDP.
//!
//! The state is the product of task complexity, device class, network
//! quality and battery level (36 states). Both actions carry a negative
//! weighted cost as reward; Cloud is unavailable while the network is
//! Offline. [`value_iteration`] solves the model and [`route`] looks the
//! answer up in O(1).

mod export;
mod model;
mod solver;
mod types;

pub use export::{PolicyEntry, PolicyExport};
pub use model::{
    build_mdp, cloud_cost, edge_cost, expected_cost_breakdown, featurize_task, ComplexityMix,
    CostBreakdown, CostModel, DeviceProfile, MdpModel, NetworkModel, RoutingMdp,
};
pub use solver::{route, value_iteration, RoutingPolicy};
pub use types::*;

#[derive(Debug, thiserror::Error)]
pub enum RouterError {
    #[error("transition row {row} is not stochastic (sums to {sum})")]
    NonStochastic { row: usize, sum: f64 },
    #[error("workload mix sums to {0}, expected 1")]
    BadMix(f64),
    #[error("discount factor {0} outside [0, 1)")]
    InvalidGamma(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("state {0} has no legal action")]
    NoLegalAction(usize),
    #[error("action {action} is masked in state {state:?}")]
    MaskedAction { state: RoutingState, action: Action },
    #[error("value iteration did not converge after {sweeps} sweeps (residual {residual})")]
    NotConverged { sweeps: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid policy export: {0}")]
    BadExport(String),
}
