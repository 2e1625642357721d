use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::xml::{parse_document, Element};
use super::{Inconsistency, InconsistencyKind, LayoutError};

/// One widget element in document order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Widget {
    pub id: Option<String>,
    pub kind: String,
    /// Attributes with any namespace prefix removed.
    pub attributes: BTreeMap<String, String>,
    pub document_order: usize,
}

impl Widget {
    /// The id, or `Kind#order` for anonymous widgets.
    pub fn key(&self) -> String {
        match &self.id {
            Some(id) => id.clone(),
            None => format!("{}#{}", self.kind, self.document_order),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LayoutTree {
    pub widgets: Vec<Widget>,
}

fn local_name(name: &str) -> &str {
    name.rsplit_once(':').map_or(name, |(_, local)| local)
}

/// `@+id/foo` and `@id/foo` both name `foo`.
fn strip_id_ref(value: &str) -> &str {
    value
        .strip_prefix("@+id/")
        .or_else(|| value.strip_prefix("@id/"))
        .unwrap_or(value)
}

/// Every element below the root container becomes a widget, in document order.
pub fn parse_layout(xml: &str) -> Result<LayoutTree, LayoutError> {
    let root = parse_document(xml)?;
    let mut widgets = Vec::new();
    let mut seen: HashMap<String, (usize, usize)> = HashMap::new();
    fn walk(
        el: &Element,
        widgets: &mut Vec<Widget>,
        seen: &mut HashMap<String, (usize, usize)>,
    ) -> Result<(), LayoutError> {
        for child in &el.children {
            let attributes: BTreeMap<String, String> = child
                .attributes
                .iter()
                .map(|(k, v)| (local_name(k).to_string(), v.clone()))
                .collect();
            let id = attributes.get("id").map(|v| strip_id_ref(v).to_string());
            if let Some(id) = &id {
                if let Some((line, col)) = seen.get(id) {
                    return Err(LayoutError::DuplicateId {
                        id: id.clone(),
                        line: child.line,
                        col: child.col,
                        first_line: *line,
                        first_col: *col,
                    });
                }
                seen.insert(id.clone(), (child.line, child.col));
            }
            widgets.push(Widget {
                id,
                kind: local_name(&child.name).to_string(),
                attributes,
                document_order: widgets.len(),
            });
            walk(child, widgets, seen)?;
        }
        Ok(())
    }
    walk(&root, &mut widgets, &mut seen)?;
    Ok(LayoutTree { widgets })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Visible,
    Invisible,
    Gone,
}

/// Positional relations; declaration order is the statement ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Below,
    Above,
    CenteredBelow,
    CenteredAbove,
    LeftOf,
    RightOf,
    CenterInParent,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::Below,
        Relation::Above,
        Relation::CenteredBelow,
        Relation::CenteredAbove,
        Relation::LeftOf,
        Relation::RightOf,
        Relation::CenterInParent,
    ];

    pub fn attribute(self) -> &'static str {
        match self {
            Relation::Below => "layout_below",
            Relation::Above => "layout_above",
            Relation::CenteredBelow => "layout_centeredBelow",
            Relation::CenteredAbove => "layout_centeredAbove",
            Relation::LeftOf => "layout_toLeftOf",
            Relation::RightOf => "layout_toRightOf",
            Relation::CenterInParent => "layout_centerInParent",
        }
    }

    pub fn phrase(self) -> &'static str {
        match self {
            Relation::Below => "is below",
            Relation::Above => "is above",
            Relation::CenteredBelow => "is centered below",
            Relation::CenteredAbove => "is centered above",
            Relation::LeftOf => "is to the left of",
            Relation::RightOf => "is to the right of",
            Relation::CenterInParent => "is centered in",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Target {
    Widget(usize),
    Parent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintEdge {
    pub src: usize,
    pub relation: Relation,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidgetNode {
    pub key: String,
    pub kind: String,
    pub visibility: Visibility,
    pub interactive: bool,
    pub has_click_handler: bool,
    pub document_order: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintGraph {
    pub nodes: Vec<WidgetNode>,
    pub edges: Vec<ConstraintEdge>,
    /// Findings produced while resolving references.
    pub dangling: Vec<Inconsistency>,
}

/// Turns constraint attributes into typed edges. References to unknown ids
/// become DanglingReference findings instead of edges.
pub fn build_constraint_graph(tree: &LayoutTree) -> ConstraintGraph {
    let by_id: HashMap<&str, usize> = tree
        .widgets
        .iter()
        .enumerate()
        .filter_map(|(i, w)| w.id.as_deref().map(|id| (id, i)))
        .collect();
    let mut graph = ConstraintGraph::default();
    for (i, w) in tree.widgets.iter().enumerate() {
        let attr = |k: &str| w.attributes.get(k).map(String::as_str);
        let visibility = match attr("visibility") {
            Some("gone") => Visibility::Gone,
            Some("invisible") => Visibility::Invisible,
            _ => Visibility::Visible,
        };
        graph.nodes.push(WidgetNode {
            key: w.key(),
            kind: w.kind.clone(),
            visibility,
            interactive: matches!(w.kind.as_str(), "Button" | "ImageButton")
                || attr("clickable") == Some("true"),
            has_click_handler: w.attributes.contains_key("onClick"),
            document_order: w.document_order,
        });
        for relation in Relation::ALL {
            let Some(value) = attr(relation.attribute()) else {
                continue;
            };
            let target = if relation == Relation::CenterInParent {
                if value != "true" {
                    continue;
                }
                Target::Parent
            } else {
                let reference = strip_id_ref(value);
                if reference == "parent" {
                    Target::Parent
                } else if let Some(t) = by_id.get(reference) {
                    Target::Widget(*t)
                } else {
                    graph.dangling.push(Inconsistency {
                        kind: InconsistencyKind::DanglingReference,
                        widgets: vec![w.key()],
                        message: format!(
                            "{} {} references missing widget '{}' via {}",
                            w.kind,
                            w.key(),
                            reference,
                            relation.attribute()
                        ),
                    });
                    continue;
                }
            };
            graph.edges.push(ConstraintEdge {
                src: i,
                relation,
                target,
            });
        }
    }
    graph
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutStatement {
    pub text: String,
    pub subject_id: String,
    pub relation: Relation,
    /// Target widget id, or `parent`.
    pub object_id: String,
}

/// One sentence per edge, ordered by subject document order then relation.
pub fn describe(graph: &ConstraintGraph) -> Vec<LayoutStatement> {
    let mut edges: Vec<&ConstraintEdge> = graph.edges.iter().collect();
    edges.sort_by_key(|e| (graph.nodes[e.src].document_order, e.relation));
    edges
        .into_iter()
        .map(|e| {
            let subject = &graph.nodes[e.src];
            let (object_id, text) = match e.target {
                Target::Parent => (
                    "parent".to_string(),
                    format!("{} {} {} its parent", subject.kind, subject.key, e.relation.phrase()),
                ),
                Target::Widget(t) => {
                    let object = &graph.nodes[t];
                    (
                        object.key.clone(),
                        format!(
                            "{} {} {} {} {}",
                            subject.kind,
                            subject.key,
                            e.relation.phrase(),
                            object.kind,
                            object.key
                        ),
                    )
                }
            };
            LayoutStatement {
                text,
                subject_id: subject.key.clone(),
                relation: e.relation,
                object_id,
            }
        })
        .collect()
}
