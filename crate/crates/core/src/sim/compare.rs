use serde::{Deserialize, Serialize};

use super::engine::{run_simulation, solve_policy, MetricsReport, PolicyKind, SimConfig};
use super::workload::Workload;
use super::SimError;

/// Difference of one policy's metrics from the baseline (policy − baseline).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDelta {
    pub policy: PolicyKind,
    pub baseline: PolicyKind,
    pub median_latency_ms: f64,
    pub p95_latency_ms: f64,
    pub sub_second_fraction: f64,
    pub cloud_call_fraction: f64,
    pub total_energy_units: f64,
    pub mean_accuracy_loss: f64,
    /// `1 − policy/baseline` cloud calls; absent when the baseline makes none.
    pub cloud_call_reduction: Option<f64>,
}

impl MetricsDelta {
    fn between(m: &MetricsReport, base: &MetricsReport) -> Self {
        Self {
            policy: m.policy,
            baseline: base.policy,
            median_latency_ms: m.median_latency_ms - base.median_latency_ms,
            p95_latency_ms: m.p95_latency_ms - base.p95_latency_ms,
            sub_second_fraction: m.sub_second_fraction - base.sub_second_fraction,
            cloud_call_fraction: m.cloud_call_fraction - base.cloud_call_fraction,
            total_energy_units: m.total_energy_units - base.total_energy_units,
            mean_accuracy_loss: m.mean_accuracy_loss - base.mean_accuracy_loss,
            cloud_call_reduction: (base.cloud_call_fraction > 0.0)
                .then(|| 1.0 - m.cloud_call_fraction / base.cloud_call_fraction),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub n_tasks: usize,
    pub baseline: PolicyKind,
    pub reports: Vec<MetricsReport>,
    /// One entry per report, against the first.
    pub deltas: Vec<MetricsDelta>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    policy: &'a str,
    seed: u64,
    n_tasks: usize,
    median_latency_ms: f64,
    p95_latency_ms: f64,
    sub_second_fraction: f64,
    cloud_call_fraction: f64,
    total_energy_units: f64,
    mean_accuracy_loss: f64,
    failed_tasks: usize,
}

impl ComparisonReport {
    /// One row per policy, with a header line.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for m in &self.reports {
            w.serialize(CsvRow {
                policy: m.policy.as_str(),
                seed: m.seed,
                n_tasks: m.n_tasks,
                median_latency_ms: m.median_latency_ms,
                p95_latency_ms: m.p95_latency_ms,
                sub_second_fraction: m.sub_second_fraction,
                cloud_call_fraction: m.cloud_call_fraction,
                total_energy_units: m.total_energy_units,
                mean_accuracy_loss: m.mean_accuracy_loss,
                failed_tasks: m.failed_tasks,
            })
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
    }
}

/// Runs every config on the same workload. The first config is the baseline.
pub fn compare_policies(
    workload: &Workload,
    configs: &[SimConfig],
) -> Result<ComparisonReport, SimError> {
    let Some(first) = configs.first() else {
        return Err(SimError::InvalidConfig("no policies to compare".into()));
    };
    let mut reports = Vec::with_capacity(configs.len());
    let mut task_ids: Option<Vec<u64>> = None;
    for config in configs {
        if config.seed != workload.seed {
            return Err(SimError::SeedMismatch {
                expected: workload.seed,
                found: config.seed,
            });
        }
        let solved = match config.policy {
            PolicyKind::Mdp => Some(solve_policy(config)?),
            _ => None,
        };
        let out = run_simulation(workload, config, solved.as_ref())?;
        let ids: Vec<u64> = out.events.iter().map(|e| e.task_id).collect();
        match &task_ids {
            Some(prev) if *prev != ids => {
                return Err(SimError::InvalidConfig("policies saw different task sequences".into()))
            }
            Some(_) => {}
            None => task_ids = Some(ids),
        }
        reports.push(out.metrics);
    }
    let deltas = reports
        .iter()
        .map(|m| MetricsDelta::between(m, &reports[0]))
        .collect();
    Ok(ComparisonReport {
        seed: workload.seed,
        n_tasks: workload.tasks.len(),
        baseline: first.policy,
        reports,
        deltas,
    })
}
