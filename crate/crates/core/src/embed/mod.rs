//! Source code to AST-derived graphs to 768-dimensional structural embeddings.
//!
//! Graphs carry Child / NextSibling edges from the syntax tree plus
//! Invokes (caller method to callee) and Inherits (subclass to superclass)
//! edges resolved within one unit. Embeddings are Weisfeiler-Lehman subtree
//! labels hashed into fixed buckets, accumulated as integers, then
//! L2-normalized, so they are bit-reproducible.

mod graph;
mod lexer;
mod parser;
mod vector;
mod wl;

use std::collections::BTreeMap;

pub use graph::{CodeGraph, Edge, EdgeKind, GraphError, Node};
pub use parser::{parse_mini, token_graph};
pub use vector::{cosine, cosine_slices, EmbeddingVector, EMBEDDING_DIM};
pub use wl::{band_counts, graph_to_vector, wl_labels, BandConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown parser '{0}'")]
    UnknownParser(String),
    #[error("expected {expected} dimensions, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid band config: {0}")]
    BadBands(String),
}

impl EmbedError {
    pub(crate) fn syntax(line: usize, col: usize, message: impl Into<String>) -> Self {
        EmbedError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A source language front end producing code graphs.
pub trait SourceParser: Send + Sync {
    fn parse(&self, source: &str) -> Result<CodeGraph, EmbedError>;
}

struct MiniParser;

impl SourceParser for MiniParser {
    fn parse(&self, source: &str) -> Result<CodeGraph, EmbedError> {
        parse_mini(source)
    }
}

/// Parsers by id. `mini` is always registered.
pub struct ParserRegistry {
    parsers: BTreeMap<String, Box<dyn SourceParser>>,
}

impl Default for ParserRegistry {
    fn default() -> Self {
        let mut r = Self {
            parsers: BTreeMap::new(),
        };
        r.register("mini", MiniParser);
        r
    }
}

impl ParserRegistry {
    pub fn register(&mut self, id: impl Into<String>, parser: impl SourceParser + 'static) {
        self.parsers.insert(id.into(), Box::new(parser));
    }

    pub fn parse(&self, source: &str, parser_id: &str) -> Result<CodeGraph, EmbedError> {
        self.parsers
            .get(parser_id)
            .ok_or_else(|| EmbedError::UnknownParser(parser_id.to_string()))?
            .parse(source)
    }
}

/// Parses with one of the built-in parsers.
pub fn parse_to_graph(source: &str, parser_id: &str) -> Result<CodeGraph, EmbedError> {
    match parser_id {
        "mini" => parse_mini(source),
        other => Err(EmbedError::UnknownParser(other.to_string())),
    }
}

/// Embeds source text, falling back to the token graph when it does not parse.
pub fn embed_text(text: &str, bands: &BandConfig) -> Result<(EmbeddingVector, bool), EmbedError> {
    match parse_mini(text) {
        Ok(g) => Ok((graph_to_vector(&g, bands)?, true)),
        Err(EmbedError::Syntax { .. }) => Ok((graph_to_vector(&token_graph(text), bands)?, false)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_parser_is_an_error() {
        assert_eq!(
            parse_to_graph("", "kotlin"),
            Err(EmbedError::UnknownParser("kotlin".into()))
        );
        let reg = ParserRegistry::default();
        assert!(reg.parse("class A {}", "mini").is_ok());
        assert!(reg.parse("class A {}", "nope").is_err());
    }

    #[test]
    fn fallback_embedding_for_prose() {
        let (v, parsed) = embed_text("where is the layout parser?", &BandConfig::default()).unwrap();
        assert!(!parsed);
        assert!((v.norm() - 1.0).abs() < 1e-9);
    }
}
