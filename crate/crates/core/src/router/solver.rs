use serde::{Deserialize, Serialize};

use super::model::MdpModel;
use super::types::{Action, RoutingState};
use super::RouterError;

/// Upper bound on Bellman sweeps; only reachable when floating-point noise
/// keeps the delta above a tolerance chosen too small for the value scale.
const MAX_SWEEPS: usize = 1_000_000;

/// Solved policy: one action and one value per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingPolicy {
    pub action: Vec<Action>,
    pub value: Vec<f64>,
    /// Sup-norm delta of the final sweep.
    pub residual: f64,
    /// Sup-norm delta of every sweep, in order.
    pub deltas: Vec<f64>,
}

impl RoutingPolicy {
    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }
}

fn q_value(mdp: &MdpModel, values: &[f64], state: usize, action: Action) -> f64 {
    let expected: f64 = mdp
        .transition_row(state, action)
        .iter()
        .zip(values)
        .map(|(p, v)| p * v)
        .sum();
    mdp.reward(state, action) + mdp.gamma() * expected
}

/// Best legal action and its Q-value. Cloud wins only on a strict improvement.
fn greedy(mdp: &MdpModel, values: &[f64], state: usize) -> (Action, f64) {
    let mut best: Option<(Action, f64)> = None;
    for action in mdp.legal_actions(state) {
        let q = q_value(mdp, values, state, action);
        match best {
            Some((_, b)) if q <= b => {}
            _ => best = Some((action, q)),
        }
    }
    best.expect("MdpModel guarantees a legal action per state")
}

/// Synchronous value iteration from V = 0 until the sup-norm change of a
/// sweep is at most `tolerance`.
pub fn value_iteration(mdp: &MdpModel, tolerance: f64) -> Result<RoutingPolicy, RouterError> {
    if !(tolerance > 0.0) {
        return Err(RouterError::InvalidTolerance(tolerance));
    }
    let n = mdp.num_states();
    let mut values = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut deltas = Vec::new();
    loop {
        let mut delta = 0.0_f64;
        for s in 0..n {
            let (_, q) = greedy(mdp, &values, s);
            delta = delta.max((q - values[s]).abs());
            next[s] = q;
        }
        std::mem::swap(&mut values, &mut next);
        deltas.push(delta);
        if delta <= tolerance {
            break;
        }
        if deltas.len() >= MAX_SWEEPS {
            return Err(RouterError::NotConverged {
                sweeps: deltas.len(),
                residual: delta,
            });
        }
    }
    let action = (0..n).map(|s| greedy(mdp, &values, s).0).collect();
    Ok(RoutingPolicy {
        action,
        value: values,
        residual: *deltas.last().unwrap_or(&0.0),
        deltas,
    })
}

/// Constant-time policy lookup.
pub fn route(policy: &RoutingPolicy, state: RoutingState) -> Action {
    policy.action[state.index()]
}
