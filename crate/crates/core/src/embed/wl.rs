use serde::{Deserialize, Serialize};

use super::graph::{CodeGraph, EdgeKind};
use super::vector::{EmbeddingVector, EMBEDDING_DIM};
use super::EmbedError;
use crate::hash::{fingerprint, StableHasher};

/// Layout of the embedding: a structural band of hashed WL subtree labels,
/// an identifier band and a literal band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub structural_dims: usize,
    pub identifier_dims: usize,
    pub literal_dims: usize,
    pub identifier_weight: f64,
    pub wl_iterations: usize,
    pub hash_seed: u64,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            structural_dims: 512,
            identifier_dims: 192,
            literal_dims: 64,
            identifier_weight: 0.5,
            wl_iterations: 3,
            hash_seed: 0x5eed_c0de,
        }
    }
}

impl BandConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let total = self.structural_dims + self.identifier_dims + self.literal_dims;
        if total != EMBEDDING_DIM || self.structural_dims == 0 || self.identifier_dims == 0 || self.literal_dims == 0 {
            return Err(EmbedError::BadBands(format!(
                "band widths {}/{}/{} must be non-zero and sum to {EMBEDDING_DIM}",
                self.structural_dims, self.identifier_dims, self.literal_dims
            )));
        }
        if !(self.identifier_weight >= 0.0 && self.identifier_weight.is_finite()) {
            return Err(EmbedError::BadBands("identifier_weight must be non-negative".into()));
        }
        Ok(())
    }

    /// Fingerprint stored alongside every persisted vector.
    pub fn config_hash(&self) -> String {
        fingerprint(self)
    }
}

const NEIGHBOUR_GROUPS: usize = EdgeKind::ALL.len() * 2;

/// Per-node WL labels for rounds `0..=iterations`.
pub fn wl_labels(graph: &CodeGraph, iterations: usize, seed: u64) -> Vec<Vec<u64>> {
    let n = graph.nodes.len();
    // neighbours[v][kind * 2 + dir], dir 0 = outgoing, 1 = incoming
    let mut neighbours: Vec<[Vec<usize>; NEIGHBOUR_GROUPS]> = (0..n).map(|_| Default::default()).collect();
    for e in &graph.edges {
        neighbours[e.src][e.kind.index() * 2].push(e.dst);
        neighbours[e.dst][e.kind.index() * 2 + 1].push(e.src);
    }
    let initial: Vec<u64> = graph
        .nodes
        .iter()
        .map(|node| {
            let mut h = StableHasher::new(seed);
            h.write_str(&node.label);
            h.finish()
        })
        .collect();
    let mut rounds = vec![initial];
    let mut scratch = Vec::new();
    for _ in 0..iterations {
        let prev = rounds.last().expect("round 0 exists");
        let next = (0..n)
            .map(|v| {
                let mut h = StableHasher::new(seed);
                h.write_u64(prev[v]);
                for group in &neighbours[v] {
                    scratch.clear();
                    scratch.extend(group.iter().map(|u| prev[*u]));
                    scratch.sort_unstable();
                    h.write_u64(scratch.len() as u64);
                    for l in &scratch {
                        h.write_u64(*l);
                    }
                }
                h.finish()
            })
            .collect();
        rounds.push(next);
    }
    rounds
}

fn bucket(seed: u64, tag: &str, key: impl FnOnce(&mut StableHasher), width: usize) -> usize {
    let mut h = StableHasher::new(seed);
    h.write_str(tag);
    key(&mut h);
    (h.finish() % width as u64) as usize
}

/// Integer feature counts for each band, before weighting.
pub fn band_counts(graph: &CodeGraph, bands: &BandConfig) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut structural = vec![0u64; bands.structural_dims];
    let mut identifiers = vec![0u64; bands.identifier_dims];
    let mut literals = vec![0u64; bands.literal_dims];
    for (round, labels) in wl_labels(graph, bands.wl_iterations, bands.hash_seed)
        .iter()
        .enumerate()
    {
        for label in labels {
            let b = bucket(
                bands.hash_seed,
                "wl",
                |h| {
                    h.write_u64(round as u64);
                    h.write_u64(*label);
                },
                bands.structural_dims,
            );
            structural[b] += 1;
        }
    }
    for node in &graph.nodes {
        let Some(name) = &node.name else { continue };
        if node.is_literal() {
            literals[bucket(bands.hash_seed, "lit", |h| h.write_str(name), bands.literal_dims)] += 1;
        } else {
            identifiers[bucket(bands.hash_seed, "ident", |h| h.write_str(name), bands.identifier_dims)] += 1;
        }
    }
    (structural, identifiers, literals)
}

/// Deterministic structural embedding of a code graph.
pub fn graph_to_vector(graph: &CodeGraph, bands: &BandConfig) -> Result<EmbeddingVector, EmbedError> {
    bands.validate()?;
    if graph.is_empty() {
        return Ok(EmbeddingVector::zeros());
    }
    let (structural, identifiers, literals) = band_counts(graph, bands);
    let mut values = Vec::with_capacity(EMBEDDING_DIM);
    values.extend(structural.iter().map(|c| *c as f64));
    values.extend(identifiers.iter().map(|c| *c as f64 * bands.identifier_weight));
    values.extend(literals.iter().map(|c| *c as f64));
    EmbeddingVector::normalized(values)
}

