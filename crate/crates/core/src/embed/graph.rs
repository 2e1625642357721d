use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Child,
    NextSibling,
    Invokes,
    Inherits,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [
        EdgeKind::Child,
        EdgeKind::NextSibling,
        EdgeKind::Invokes,
        EdgeKind::Inherits,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    /// Node kind, e.g. `class`, `method`, `call`, `external-call`.
    pub label: String,
    /// Identifier or literal text, when the construct has one.
    pub name: Option<String>,
}

impl Node {
    pub fn is_literal(&self) -> bool {
        self.label.ends_with("-literal")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
}

/// Labelled AST-derived graph for one source unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node at position {pos} has id {id}")]
    NonDenseId { pos: usize, id: usize },
    #[error("edge {0:?} references a missing node")]
    DanglingEdge(Edge),
    #[error("node {0} has more than one Child parent")]
    MultipleParents(usize),
    #[error("Child edges contain a cycle through node {0}")]
    ChildCycle(usize),
}

impl CodeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_node(&mut self, label: impl Into<String>, name: Option<String>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            label: label.into(),
            name,
        });
        id
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, kind: EdgeKind) {
        self.edges.push(Edge { src, dst, kind });
    }

    pub fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn find(&self, label: &str, name: &str) -> Option<usize> {
        self.nodes
            .iter()
            .find(|n| n.label == label && n.name.as_deref() == Some(name))
            .map(|n| n.id)
    }

    /// Checks id density, edge endpoints and that Child edges form a forest.
    pub fn validate(&self) -> Result<(), GraphError> {
        for (pos, n) in self.nodes.iter().enumerate() {
            if n.id != pos {
                return Err(GraphError::NonDenseId { pos, id: n.id });
            }
        }
        let n = self.nodes.len();
        let mut parent = vec![None; n];
        for e in &self.edges {
            if e.src >= n || e.dst >= n {
                return Err(GraphError::DanglingEdge(*e));
            }
            if e.kind == EdgeKind::Child {
                if parent[e.dst].is_some() {
                    return Err(GraphError::MultipleParents(e.dst));
                }
                parent[e.dst] = Some(e.src);
            }
        }
        for start in 0..n {
            let mut cur = parent[start];
            let mut steps = 0;
            while let Some(p) = cur {
                steps += 1;
                if p == start || steps > n {
                    return Err(GraphError::ChildCycle(start));
                }
                cur = parent[p];
            }
        }
        Ok(())
    }
}
