use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::router::{TaskDescriptor, TaskKind};

/// RNG stream reserved for task generation.
pub(crate) const WORKLOAD_STREAM: u64 = 0;

/// A value for each task kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerKind<T> {
    pub syntax_fix: T,
    pub completion: T,
    pub refactor: T,
    pub crash_analysis: T,
}

impl<T: Copy> PerKind<T> {
    pub fn get(&self, kind: TaskKind) -> T {
        match kind {
            TaskKind::SyntaxFix => self.syntax_fix,
            TaskKind::Completion => self.completion,
            TaskKind::Refactor => self.refactor,
            TaskKind::CrashAnalysis => self.crash_analysis,
        }
    }

    pub fn values(&self) -> [T; 4] {
        [self.syntax_fix, self.completion, self.refactor, self.crash_analysis]
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

impl CountRange {
    pub const fn new(min: u32, max: u32) -> Self {
        Self { min, max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRanges {
    pub files: CountRange,
    pub deps: CountRange,
    pub tokens: CountRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadConfig {
    pub n_tasks: usize,
    pub mix: PerKind<f64>,
    pub ranges: PerKind<TaskRanges>,
    pub mean_interarrival_s: f64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        let r = |f: (u32, u32), d: (u32, u32), t: (u32, u32)| TaskRanges {
            files: CountRange::new(f.0, f.1),
            deps: CountRange::new(d.0, d.1),
            tokens: CountRange::new(t.0, t.1),
        };
        Self {
            n_tasks: 10_000,
            mix: PerKind {
                syntax_fix: 0.40,
                completion: 0.25,
                refactor: 0.15,
                crash_analysis: 0.20,
            },
            ranges: PerKind {
                syntax_fix: r((1, 1), (0, 0), (50, 400)),
                completion: r((1, 3), (0, 2), (200, 2500)),
                refactor: r((2, 15), (1, 8), (300, 3000)),
                crash_analysis: r((1, 5), (0, 6), (500, 4000)),
            },
            mean_interarrival_s: 30.0,
        }
    }
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let mix = self.mix.values();
        let sum: f64 = mix.iter().sum();
        if mix.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidMix(sum));
        }
        for kind in TaskKind::ALL {
            let r = self.ranges.get(kind);
            for (name, range) in [("files", r.files), ("deps", r.deps), ("tokens", r.tokens)] {
                if range.min > range.max {
                    return Err(SimError::InvalidConfig(format!(
                        "{kind:?} {name} range is empty ({}..={})",
                        range.min, range.max
                    )));
                }
            }
        }
        if !(self.mean_interarrival_s > 0.0 && self.mean_interarrival_s.is_finite()) {
            return Err(SimError::InvalidConfig(format!(
                "mean inter-arrival must be positive, got {}",
                self.mean_interarrival_s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u64,
    pub arrival_s: f64,
    pub descriptor: TaskDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub tasks: Vec<Task>,
    pub seed: u64,
    pub mix: PerKind<f64>,
}

/// Seeded synthetic task stream with exponential inter-arrival times.
pub fn generate_workload(config: &WorkloadConfig, seed: u64) -> Result<Workload, SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(WORKLOAD_STREAM);
    let kinds = WeightedIndex::new(config.mix.values()).map_err(|_| SimError::InvalidMix(1.0))?;
    let gaps = Exp::new(1.0 / config.mean_interarrival_s)
        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;

    let mut t = 0.0;
    let mut tasks = Vec::with_capacity(config.n_tasks);
    for id in 0..config.n_tasks as u64 {
        t += gaps.sample(&mut rng);
        let kind = TaskKind::ALL[kinds.sample(&mut rng)];
        let r = config.ranges.get(kind);
        let descriptor = TaskDescriptor {
            kind,
            files_touched: rng.random_range(r.files.min..=r.files.max),
            cross_file_deps: rng.random_range(r.deps.min..=r.deps.max),
            token_length: rng.random_range(r.tokens.min..=r.tokens.max),
        };
        tasks.push(Task {
            id,
            arrival_s: t,
            descriptor,
        });
    }
    Ok(Workload {
        tasks,
        seed,
        mix: config.mix,
    })
}
