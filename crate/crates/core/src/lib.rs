//! Core algorithms for a privacy-first hybrid developer assistant: MDP-based
//! edge/cloud routing, structural code embeddings with exact vector search,
//! layout constraint description and linting, budgeted context fusion, and a
//! deterministic simulation harness.

pub mod config;
pub mod embed;
mod hash;
pub mod fusion;
pub mod index;
pub mod layout;
pub mod router;
pub mod sim;

pub use hash::{fingerprint, StableHasher};
