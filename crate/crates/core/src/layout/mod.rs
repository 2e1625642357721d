//! ConstraintLayout-style XML to a constraint graph, natural-language
//! descriptions of it, and layout/code inconsistency detection.
//!
//! The accepted schema is namespace-free: element name is the widget kind,
//! attributes `id`, `visibility`, `onClick`, `clickable` and the constraint
//! attributes `layout_below`, `layout_above`, `layout_toLeftOf`,
//! `layout_toRightOf`, `layout_centeredBelow`, `layout_centeredAbove`,
//! `layout_centerInParent`. Namespace prefixes and `@+id/` references are
//! stripped so Android-flavoured files map onto the same schema.

mod lint;
mod model;
mod synthetic;
mod xml;

use serde::{Deserialize, Serialize};

pub use lint::{check_layout_xml, detect_inconsistencies, validity_check, ValidityReport};
pub use synthetic::synthetic_layout_xml;
pub use model::{
    build_constraint_graph, describe, parse_layout, ConstraintEdge, ConstraintGraph, LayoutStatement,
    LayoutTree, Relation, Target, Visibility, Widget, WidgetNode,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayoutError {
    #[error("XML error at {line}:{col}: {message}")]
    Xml {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("duplicate widget id '{id}' at {line}:{col} (first defined at {first_line}:{first_col})")]
    DuplicateId {
        id: String,
        line: usize,
        col: usize,
        first_line: usize,
        first_col: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InconsistencyKind {
    MissingClickHandler,
    ConflictingVisibility,
    ConstraintCycle,
    DanglingReference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inconsistency {
    pub kind: InconsistencyKind,
    pub widgets: Vec<String>,
    pub message: String,
}
