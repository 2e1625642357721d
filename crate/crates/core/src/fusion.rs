//! Ranking and token-budgeted packing of context from IDE interactions,
//! code and runtime logs.
//!
//! Each item scores `prior(source) * exp(cos(query, v) / tau)
//! * 2^(-(now - t) / half_life) * boost`, where `boost` applies to runtime
//! logs near the active breakpoint. Scores are normalized to weights and
//! packed greedily into the budget.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::embed::{cosine, EmbeddingVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FusionError {
    #[error("no context items to score")]
    Empty,
    #[error("temperature must be positive, got {0}")]
    InvalidTemperature(f64),
    #[error("invalid fusion weights: {0}")]
    InvalidWeights(String),
    #[error("item timestamp {timestamp} is after now ({now})")]
    FutureTimestamp { timestamp: f64, now: f64 },
    #[error("item token cost must be at least 1")]
    ZeroTokenCost,
    #[error("budget must be non-negative, got {0}")]
    NegativeBudget(i64),
    #[error("scored items are not sorted by descending weight")]
    Unsorted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextSource {
    IdeInteraction,
    CodeContext,
    RuntimeLog,
}

impl ContextSource {
    pub fn label(self) -> &'static str {
        match self {
            ContextSource::IdeInteraction => "ide_interaction",
            ContextSource::CodeContext => "code_context",
            ContextSource::RuntimeLog => "runtime_log",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextItem {
    pub source: ContextSource,
    pub vector: EmbeddingVector,
    pub text: String,
    /// Seconds since session start.
    pub timestamp: f64,
    /// Only meaningful for runtime logs.
    pub near_breakpoint: bool,
    pub token_cost: u32,
}

/// Rough token estimate: one token per four characters, at least one.
pub fn estimate_tokens(text: &str) -> u32 {
    let chars = text.chars().count() as u32;
    chars.div_ceil(4).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourcePriors {
    pub ide_interaction: f64,
    pub code_context: f64,
    pub runtime_log: f64,
}

impl Default for SourcePriors {
    fn default() -> Self {
        Self {
            ide_interaction: 0.63,
            code_context: 0.27,
            runtime_log: 0.10,
        }
    }
}

impl SourcePriors {
    pub fn get(&self, source: ContextSource) -> f64 {
        match source {
            ContextSource::IdeInteraction => self.ide_interaction,
            ContextSource::CodeContext => self.code_context,
            ContextSource::RuntimeLog => self.runtime_log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionWeights {
    pub prior: SourcePriors,
    pub temperature: f64,
    pub recency_half_life_s: f64,
    pub breakpoint_boost: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self {
            prior: SourcePriors::default(),
            temperature: 0.1,
            recency_half_life_s: 300.0,
            breakpoint_boost: 2.0,
        }
    }
}

impl FusionWeights {
    pub fn validate(&self) -> Result<(), FusionError> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(FusionError::InvalidTemperature(self.temperature));
        }
        let p = [self.prior.ide_interaction, self.prior.code_context, self.prior.runtime_log];
        if p.iter().any(|x| !(*x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(FusionError::InvalidWeights(format!(
                "priors must be non-negative and sum to 1, got {p:?}"
            )));
        }
        if !(self.recency_half_life_s > 0.0) {
            return Err(FusionError::InvalidWeights("half-life must be positive".into()));
        }
        if !(self.breakpoint_boost >= 1.0) {
            return Err(FusionError::InvalidWeights("breakpoint boost must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item: ContextItem,
    pub weight: f64,
}

/// Log of the unnormalized score; `-inf` for a zero prior.
fn log_score(query: &EmbeddingVector, item: &ContextItem, w: &FusionWeights, now: f64) -> f64 {
    let prior = w.prior.get(item.source);
    if prior == 0.0 {
        return f64::NEG_INFINITY;
    }
    let boost = if item.source == ContextSource::RuntimeLog && item.near_breakpoint {
        w.breakpoint_boost.ln()
    } else {
        0.0
    };
    prior.ln() + cosine(query, &item.vector) / w.temperature
        - (now - item.timestamp) / w.recency_half_life_s * std::f64::consts::LN_2
        + boost
}

/// Normalized attention weights, sorted by weight then newest first.
///
/// Computed in the log domain so small temperatures cannot overflow. When
/// every item has a zero prior all weights are zero.
pub fn score_items(
    query: &EmbeddingVector,
    items: &[ContextItem],
    w: &FusionWeights,
    now: f64,
) -> Result<Vec<ScoredItem>, FusionError> {
    w.validate()?;
    if items.is_empty() {
        return Err(FusionError::Empty);
    }
    for item in items {
        if item.timestamp > now {
            return Err(FusionError::FutureTimestamp {
                timestamp: item.timestamp,
                now,
            });
        }
        if item.token_cost == 0 {
            return Err(FusionError::ZeroTokenCost);
        }
    }
    let logs: Vec<f64> = items.iter().map(|i| log_score(query, i, w, now)).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = if max == f64::NEG_INFINITY {
        vec![0.0; items.len()]
    } else {
        logs.iter().map(|l| (l - max).exp()).collect()
    };
    let total: f64 = raw.iter().sum();
    let mut scored: Vec<ScoredItem> = items
        .iter()
        .zip(raw)
        .map(|(item, r)| ScoredItem {
            item: item.clone(),
            weight: if total > 0.0 { r / total } else { 0.0 },
        })
        .collect();
    scored.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then_with(|| b.item.timestamp.total_cmp(&a.item.timestamp))
    });
    Ok(scored)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedContext {
    pub entries: Vec<ScoredItem>,
    pub total_tokens: u64,
    pub budget: u64,
}

impl FusedContext {
    /// Entries in weight order, each behind a source-labelled delimiter.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "### {} (weight {:.4})", e.item.source.label(), e.weight);
            out.push_str(&e.item.text);
            if !e.item.text.ends_with('\n') {
                out.push('\n');
            }
        }
        out
    }
}

/// Greedy packing in weight order: an item is taken when it still fits,
/// items that do not fit are skipped without ending the scan. Zero-weight
/// items are never taken. Selected weights are renormalized to sum to 1.
pub fn assemble_context(scored: &[ScoredItem], budget: i64) -> Result<FusedContext, FusionError> {
    if budget < 0 {
        return Err(FusionError::NegativeBudget(budget));
    }
    if scored.windows(2).any(|w| w[0].weight < w[1].weight) {
        return Err(FusionError::Unsorted);
    }
    let budget = budget as u64;
    let mut entries = Vec::new();
    let mut total_tokens = 0u64;
    for s in scored {
        let cost = u64::from(s.item.token_cost);
        if s.weight > 0.0 && total_tokens + cost <= budget {
            total_tokens += cost;
            entries.push(s.clone());
        }
    }
    let sum: f64 = entries.iter().map(|e| e.weight).sum();
    for e in &mut entries {
        e.weight /= sum;
    }
    Ok(FusedContext {
        entries,
        total_tokens,
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EMBEDDING_DIM;

    fn unit(i: usize) -> EmbeddingVector {
        let mut v = vec![0.0; EMBEDDING_DIM];
        v[i] = 1.0;
        EmbeddingVector::from_raw(v).unwrap()
    }

    fn item(source: ContextSource, cost: u32) -> ContextItem {
        ContextItem {
            source,
            vector: unit(0),
            text: format!("{source:?}"),
            timestamp: 0.0,
            near_breakpoint: false,
            token_cost: cost,
        }
    }

    #[test]
    fn default_priors() {
        let p = SourcePriors::default();
        assert_eq!((p.ide_interaction, p.code_context, p.runtime_log), (0.63, 0.27, 0.10));
        assert_eq!(p.ide_interaction + p.code_context + p.runtime_log, 1.0);
    }

    #[test]
    fn single_item_has_all_weight() {
        let s = score_items(&unit(0), &[item(ContextSource::CodeContext, 1)], &FusionWeights::default(), 0.0).unwrap();
        assert_eq!(s[0].weight, 1.0);
    }

    #[test]
    fn prior_ratio() {
        let items = [item(ContextSource::IdeInteraction, 1), item(ContextSource::CodeContext, 1)];
        let s = score_items(&unit(0), &items, &FusionWeights::default(), 10.0).unwrap();
        assert_eq!(s[0].item.source, ContextSource::IdeInteraction);
        assert!((s[0].weight / s[1].weight - 0.63 / 0.27).abs() < 1e-9);
    }

    #[test]
    fn breakpoint_boost_doubles() {
        let mut near = item(ContextSource::RuntimeLog, 1);
        near.near_breakpoint = true;
        let items = [item(ContextSource::RuntimeLog, 1), near];
        let s = score_items(&unit(1), &items, &FusionWeights::default(), 0.0).unwrap();
        assert!(s[0].item.near_breakpoint);
        assert!((s[0].weight / s[1].weight - 2.0).abs() < 1e-12);
    }

    #[test]
    fn recency_halves_per_half_life() {
        let mut old = item(ContextSource::CodeContext, 1);
        old.timestamp = 0.0;
        let mut new = item(ContextSource::CodeContext, 1);
        new.timestamp = 300.0;
        let s = score_items(&unit(0), &[old, new], &FusionWeights::default(), 300.0).unwrap();
        assert_eq!(s[0].item.timestamp, 300.0);
        assert!((s[0].weight / s[1].weight - 2.0).abs() < 1e-12);
    }

    #[test]
    fn small_temperature_does_not_overflow() {
        let w = FusionWeights {
            temperature: 1e-4,
            ..FusionWeights::default()
        };
        let mut other = item(ContextSource::CodeContext, 1);
        other.vector = unit(3);
        let s = score_items(&unit(0), &[item(ContextSource::CodeContext, 1), other], &w, 0.0).unwrap();
        assert!(s.iter().all(|x| x.weight.is_finite()));
        assert!((s.iter().map(|x| x.weight).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scoring_errors() {
        let w = FusionWeights::default();
        assert_eq!(score_items(&unit(0), &[], &w, 0.0), Err(FusionError::Empty));
        let bad = FusionWeights {
            temperature: 0.0,
            ..w
        };
        assert!(matches!(
            score_items(&unit(0), &[item(ContextSource::CodeContext, 1)], &bad, 0.0),
            Err(FusionError::InvalidTemperature(_))
        ));
        let mut future = item(ContextSource::CodeContext, 1);
        future.timestamp = 5.0;
        assert!(matches!(
            score_items(&unit(0), &[future], &w, 1.0),
            Err(FusionError::FutureTimestamp { .. })
        ));
    }

    fn scored(costs: &[u32]) -> Vec<ScoredItem> {
        let n = costs.len() as f64;
        costs
            .iter()
            .enumerate()
            .map(|(i, c)| ScoredItem {
                item: item(ContextSource::CodeContext, *c),
                weight: (n - i as f64) / (n * (n + 1.0) / 2.0),
            })
            .collect()
    }

    #[test]
    fn greedy_skip() {
        let s = scored(&[500, 400, 300]);
        let fused = assemble_context(&s, 800).unwrap();
        let costs: Vec<_> = fused.entries.iter().map(|e| e.item.token_cost).collect();
        assert_eq!(costs, vec![500, 300]);
        assert_eq!(fused.total_tokens, 800);
        assert!((fused.entries.iter().map(|e| e.weight).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_edges() {
        let s = scored(&[5, 6, 7]);
        assert!(assemble_context(&s, 0).unwrap().entries.is_empty());
        let all = assemble_context(&s, 100).unwrap();
        assert_eq!(all.entries.len(), 3);
        assert_eq!(all.entries.iter().map(|e| e.item.token_cost).collect::<Vec<_>>(), vec![5, 6, 7]);
        assert_eq!(assemble_context(&s, -1), Err(FusionError::NegativeBudget(-1)));
        let mut unsorted = s.clone();
        unsorted.reverse();
        assert_eq!(assemble_context(&unsorted, 10), Err(FusionError::Unsorted));
    }

    #[test]
    fn zero_prior_source_is_never_assembled() {
        let w = FusionWeights {
            prior: SourcePriors {
                ide_interaction: 0.7,
                code_context: 0.3,
                runtime_log: 0.0,
            },
            ..FusionWeights::default()
        };
        let items = [item(ContextSource::RuntimeLog, 1), item(ContextSource::CodeContext, 1)];
        let s = score_items(&unit(0), &items, &w, 0.0).unwrap();
        let fused = assemble_context(&s, 100).unwrap();
        assert!(fused.entries.iter().all(|e| e.item.source != ContextSource::RuntimeLog));

        let only_logs = [item(ContextSource::RuntimeLog, 1)];
        let s = score_items(&unit(0), &only_logs, &w, 0.0).unwrap();
        assert!(assemble_context(&s, 100).unwrap().entries.is_empty());
    }

    #[test]
    fn render_labels_sources() {
        let s = scored(&[1]);
        let text = assemble_context(&s, 10).unwrap().render();
        assert!(text.starts_with("### code_context (weight 1.0000)\n"));
    }

    #[test]
    fn token_estimate() {
        assert_eq!(estimate_tokens(""), 1);
        assert_eq!(estimate_tokens("abcde"), 2);
    }
}
