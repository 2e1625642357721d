use std::time::Instant;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::model::{
    build_constraint_graph, describe, parse_layout, ConstraintGraph, LayoutStatement, Target, Visibility,
};
use super::{Inconsistency, InconsistencyKind, LayoutError};

/// Missing click handlers, edges anchored to gone widgets, constraint
/// cycles (one finding per strongly connected component) and the dangling
/// references found while building the graph. Sorted by kind, then widgets.
pub fn detect_inconsistencies(graph: &ConstraintGraph) -> Vec<Inconsistency> {
    let mut findings = Vec::new();
    for node in &graph.nodes {
        if node.interactive && !node.has_click_handler {
            findings.push(Inconsistency {
                kind: InconsistencyKind::MissingClickHandler,
                widgets: vec![node.key.clone()],
                message: format!("{} {} is interactive but has no click handler", node.kind, node.key),
            });
        }
    }
    for e in &graph.edges {
        if let Target::Widget(t) = e.target {
            let anchor = &graph.nodes[t];
            if anchor.visibility == Visibility::Gone {
                let subject = &graph.nodes[e.src];
                findings.push(Inconsistency {
                    kind: InconsistencyKind::ConflictingVisibility,
                    widgets: vec![subject.key.clone(), anchor.key.clone()],
                    message: format!(
                        "{} {} is positioned relative to {} {}, whose visibility is gone",
                        subject.kind, subject.key, anchor.kind, anchor.key
                    ),
                });
            }
        }
    }
    for mut members in constraint_cycles(graph) {
        members.sort();
        findings.push(Inconsistency {
            kind: InconsistencyKind::ConstraintCycle,
            message: format!("constraint cycle among {}", members.join(", ")),
            widgets: members,
        });
    }
    findings.extend(graph.dangling.iter().cloned());
    findings.sort_by(|a, b| {
        (a.kind, &a.widgets, &a.message).cmp(&(b.kind, &b.widgets, &b.message))
    });
    findings.dedup();
    findings
}

/// Widget keys of each strongly connected component that contains a cycle.
fn constraint_cycles(graph: &ConstraintGraph) -> Vec<Vec<String>> {
    let mut g = DiGraph::<(), ()>::with_capacity(graph.nodes.len(), graph.edges.len());
    let idx: Vec<_> = (0..graph.nodes.len()).map(|_| g.add_node(())).collect();
    let mut self_loop = vec![false; graph.nodes.len()];
    for e in &graph.edges {
        if let Target::Widget(t) = e.target {
            g.add_edge(idx[e.src], idx[t], ());
            if t == e.src {
                self_loop[t] = true;
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .filter(|scc| scc.len() > 1 || self_loop[scc[0].index()])
        .map(|scc| scc.iter().map(|n| graph.nodes[n.index()].key.clone()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub statements: Vec<LayoutStatement>,
    pub findings: Vec<Inconsistency>,
    pub elapsed_ms: f64,
}

/// Describes and lints a graph, timing both.
pub fn validity_check(graph: &ConstraintGraph) -> ValidityReport {
    let start = Instant::now();
    let statements = describe(graph);
    let findings = detect_inconsistencies(graph);
    ValidityReport {
        statements,
        findings,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Parse, graph construction, description and lint, timed end to end.
pub fn check_layout_xml(xml: &str) -> Result<ValidityReport, LayoutError> {
    let start = Instant::now();
    let tree = parse_layout(xml)?;
    let graph = build_constraint_graph(&tree);
    let mut report = validity_check(&graph);
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}
