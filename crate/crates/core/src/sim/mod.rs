//! Seeded workload generation and a discrete-event replay of routing
//! policies, with metrics and paired policy comparison.
//!
//! Randomness comes from three ChaCha8 streams of one seed: tasks, network
//! transitions and battery drain. Keeping them apart means every policy
//! sees the same tasks and the same network trace.

mod compare;
mod engine;
mod workload;

pub use compare::{compare_policies, ComparisonReport, MetricsDelta};
pub use engine::{
    run_simulation, solve_policy, MetricsReport, PolicyKind, SimConfig, SimEvent, SimOutcome,
};
pub use workload::{
    generate_workload, CountRange, PerKind, Task, TaskRanges, Workload, WorkloadConfig,
};

use crate::router::RouterError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("task mix sums to {0}, expected 1")]
    InvalidMix(f64),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("seed mismatch: workload uses {expected}, config uses {found}")]
    SeedMismatch { expected: u64, found: u64 },
    #[error("the mdp policy needs a solved routing policy")]
    MissingPolicy,
    #[error(transparent)]
    Router(#[from] RouterError),
}

/// Serializes with object keys sorted, pretty-printed, newline-terminated.
pub fn canonical_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}
