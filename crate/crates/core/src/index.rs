//! Exact top-k cosine search over stored embeddings, with a compact file format.
//!
//! File layout: one JSON header line
//! `{"format","version","band_config_hash","count"}`, then per record a JSON
//! line `{"id","path","span","source_kind","band_config_hash"}` followed by
//! 768 little-endian `f32` values.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddingVector, EMBEDDING_DIM};

pub const FORMAT_NAME: &str = "devassist-vector-index";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("vector has {got} dimensions, index expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("unsupported index version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("index file is truncated: {0}")]
    Truncated(String),
    #[error("index file is corrupt: {0}")]
    Corrupt(String),
    #[error("band config hash mismatch: expected {expected}, found {found}")]
    HashMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordMetadata {
    pub path: String,
    /// First and last line, 1-based inclusive.
    pub span: (u32, u32),
    pub source_kind: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub vector: Vec<f32>,
    pub metadata: RecordMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hit {
    pub id: String,
    pub similarity: f64,
    pub metadata: RecordMetadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QueryResult {
    pub hits: Vec<Hit>,
}

impl QueryResult {
    pub fn ids(&self) -> Vec<&str> {
        self.hits.iter().map(|h| h.id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    band_config_hash: String,
    records: Vec<Record>,
    ids: HashSet<String>,
}

fn cosine_f32(query: &[f64], stored: &[f32]) -> f64 {
    let mut dot = 0.0;
    let mut nq = 0.0;
    let mut ns = 0.0;
    for (q, s) in query.iter().zip(stored) {
        let s = f64::from(*s);
        dot += q * s;
        nq += q * q;
        ns += s * s;
    }
    if nq == 0.0 || ns == 0.0 {
        0.0
    } else {
        (dot / (nq.sqrt() * ns.sqrt())).clamp(-1.0, 1.0)
    }
}

impl VectorIndex {
    pub fn new(band_config_hash: impl Into<String>) -> Self {
        Self {
            band_config_hash: band_config_hash.into(),
            records: Vec::new(),
            ids: HashSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn band_config_hash(&self) -> &str {
        &self.band_config_hash
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn insert(
        &mut self,
        id: impl Into<String>,
        vector: &EmbeddingVector,
        metadata: RecordMetadata,
    ) -> Result<(), IndexError> {
        self.insert_raw(id, vector.to_f32(), metadata)
    }

    /// Stores an already-quantized vector. The index is unchanged on error.
    pub fn insert_raw(
        &mut self,
        id: impl Into<String>,
        vector: Vec<f32>,
        metadata: RecordMetadata,
    ) -> Result<(), IndexError> {
        let id = id.into();
        if vector.len() != EMBEDDING_DIM {
            return Err(IndexError::Dimension {
                expected: EMBEDDING_DIM,
                got: vector.len(),
            });
        }
        if self.ids.contains(&id) {
            return Err(IndexError::DuplicateId(id));
        }
        self.ids.insert(id.clone());
        self.records.push(Record {
            id,
            vector,
            metadata,
        });
        Ok(())
    }

    /// Exact top-k by cosine similarity; ties broken by ascending id.
    pub fn search(&self, query: &EmbeddingVector, k: usize) -> QueryResult {
        self.search_slice(query.as_slice(), k)
    }

    pub fn search_slice(&self, query: &[f64], k: usize) -> QueryResult {
        if k == 0 || self.records.is_empty() {
            return QueryResult::default();
        }
        let mut scored: Vec<(f64, usize)> = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (cosine_f32(query, &r.vector), i))
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
            b.0.total_cmp(&a.0)
                .then_with(|| self.records[a.1].id.cmp(&self.records[b.1].id))
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, order);
            scored.truncate(k);
        }
        scored.sort_unstable_by(order);
        QueryResult {
            hits: scored
                .into_iter()
                .map(|(similarity, i)| Hit {
                    id: self.records[i].id.clone(),
                    similarity,
                    metadata: self.records[i].metadata.clone(),
                })
                .collect(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IndexError> {
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        {
            let mut out = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
            self.write_to(&mut out)?;
            out.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<(), IndexError> {
        let header = FileHeader {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            band_config_hash: self.band_config_hash.clone(),
            count: self.records.len(),
        };
        serde_json::to_writer(&mut *out, &header).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
        for r in &self.records {
            let rh = RecordHeader {
                id: r.id.clone(),
                path: r.metadata.path.clone(),
                span: r.metadata.span,
                source_kind: r.metadata.source_kind.clone(),
                band_config_hash: self.band_config_hash.clone(),
            };
            serde_json::to_writer(&mut *out, &rh).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
            for x in &r.vector {
                out.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IndexError> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Loads and additionally requires the stored band config hash.
    pub fn load_expecting(path: impl AsRef<Path>, band_config_hash: &str) -> Result<Self, IndexError> {
        let index = Self::load(path)?;
        if index.band_config_hash != band_config_hash {
            return Err(IndexError::HashMismatch {
                expected: band_config_hash.to_string(),
                found: index.band_config_hash,
            });
        }
        Ok(index)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, IndexError> {
        let mut pos = 0;
        let header_line = next_line(bytes, &mut pos, "file header")?;
        let header: FileHeader = serde_json::from_slice(header_line)
            .map_err(|e| IndexError::Corrupt(format!("file header: {e}")))?;
        if header.format != FORMAT_NAME {
            return Err(IndexError::Corrupt(format!("unknown format '{}'", header.format)));
        }
        if header.version != FORMAT_VERSION {
            return Err(IndexError::VersionMismatch {
                found: header.version,
                expected: FORMAT_VERSION,
            });
        }
        let mut index = VectorIndex::new(header.band_config_hash.clone());
        let width = EMBEDDING_DIM * 4;
        for n in 0..header.count {
            let line = next_line(bytes, &mut pos, &format!("record {n} header"))?;
            let rh: RecordHeader = serde_json::from_slice(line)
                .map_err(|e| IndexError::Corrupt(format!("record {n} header: {e}")))?;
            if rh.band_config_hash != header.band_config_hash {
                return Err(IndexError::HashMismatch {
                    expected: header.band_config_hash,
                    found: rh.band_config_hash,
                });
            }
            let Some(raw) = bytes.get(pos..pos + width) else {
                return Err(IndexError::Truncated(format!("record {n} vector")));
            };
            pos += width;
            let vector = raw
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            let metadata = RecordMetadata {
                path: rh.path,
                span: rh.span,
                source_kind: rh.source_kind,
            };
            index.insert_raw(rh.id, vector, metadata).map_err(|e| match e {
                IndexError::DuplicateId(id) => IndexError::Corrupt(format!("duplicate id '{id}'")),
                other => other,
            })?;
        }
        if pos != bytes.len() {
            return Err(IndexError::Corrupt(format!(
                "{} trailing bytes after {} records",
                bytes.len() - pos,
                header.count
            )));
        }
        Ok(index)
    }
}

fn next_line<'a>(bytes: &'a [u8], pos: &mut usize, what: &str) -> Result<&'a [u8], IndexError> {
    let rest = &bytes[*pos..];
    let Some(end) = rest.iter().position(|b| *b == b'\n') else {
        return Err(IndexError::Truncated(what.to_string()));
    };
    *pos += end + 1;
    Ok(&rest[..end])
}

#[derive(Serialize, Deserialize)]
struct FileHeader {
    format: String,
    version: u32,
    band_config_hash: String,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct RecordHeader {
    id: String,
    path: String,
    span: (u32, u32),
    source_kind: String,
    band_config_hash: String,
}
