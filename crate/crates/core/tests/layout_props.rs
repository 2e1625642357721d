use std::collections::BTreeSet;

use devassist_core::layout::*;
use proptest::prelude::*;

fn graph_of(xml: &str) -> ConstraintGraph {
    build_constraint_graph(&parse_layout(xml).unwrap())
}

#[test]
fn golden_sentence() {
    let xml = r#"<ConstraintLayout>
  <TextView id="B"/>
  <Button id="A" onClick="go" layout_centeredBelow="B"/>
</ConstraintLayout>"#;
    let statements = describe(&graph_of(xml));
    assert_eq!(statements.len(), 1);
    assert_eq!(statements[0].text, "Button A is centered below TextView B");
    assert_eq!(statements[0].subject_id, "A");
    assert_eq!(statements[0].object_id, "B");
}

#[test]
fn two_constraints_follow_relation_order() {
    let xml = r#"<L>
  <TextView id="T"/>
  <ImageView id="I"/>
  <TextView id="X" layout_toRightOf="I" layout_below="T" layout_centerInParent="true"/>
</L>"#;
    let texts: Vec<String> = describe(&graph_of(xml)).into_iter().map(|s| s.text).collect();
    assert_eq!(
        texts,
        vec![
            "TextView X is below TextView T",
            "TextView X is to the right of ImageView I",
            "TextView X is centered in its parent",
        ]
    );
}

#[test]
fn four_finding_fixture() {
    let xml = r#"<ConstraintLayout>
  <Button id="submit"/>
  <TextView id="hint" visibility="gone"/>
  <TextView id="label" layout_below="hint"/>
  <TextView id="p" layout_below="q"/>
  <TextView id="q" layout_below="p"/>
  <TextView id="orphan" layout_toLeftOf="missing"/>
</ConstraintLayout>"#;
    let report = check_layout_xml(xml).unwrap();
    let kinds: Vec<InconsistencyKind> = report.findings.iter().map(|f| f.kind).collect();
    assert_eq!(
        kinds,
        vec![
            InconsistencyKind::MissingClickHandler,
            InconsistencyKind::ConflictingVisibility,
            InconsistencyKind::ConstraintCycle,
            InconsistencyKind::DanglingReference,
        ]
    );
    assert_eq!(report.findings[0].widgets, vec!["submit"]);
    assert_eq!(report.findings[1].widgets, vec!["label", "hint"]);
    assert_eq!(report.findings[2].widgets, vec!["p", "q"]);
    assert_eq!(report.findings[3].widgets[0], "orphan");
}

#[test]
fn consistent_fixture_is_clean() {
    let xml = r#"<L><TextView id="a"/><Button id="b" onClick="x" layout_below="a"/></L>"#;
    assert!(check_layout_xml(xml).unwrap().findings.is_empty());
    let empty = check_layout_xml("<Layout/>").unwrap();
    assert!(empty.findings.is_empty() && empty.statements.is_empty());
    assert!(empty.elapsed_ms >= 0.0);
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_layout("<L><A></L>"), Err(LayoutError::Xml { .. })));
    assert!(matches!(
        parse_layout(r#"<L><A id="x"/><B id="x"/></L>"#),
        Err(LayoutError::DuplicateId { .. })
    ));
}

#[test]
fn five_hundred_widgets_within_budget() {
    let xml = synthetic_layout_xml(500, 2000, 1);
    let graph = graph_of(&xml);
    assert_eq!(graph.nodes.len(), 500);
    assert_eq!(graph.edges.len(), 2000);
    let mut times: Vec<f64> = (0..10).map(|_| validity_check(&graph).elapsed_ms).collect();
    times.sort_by(f64::total_cmp);
    let median = (times[4] + times[5]) / 2.0;
    assert!(median <= 200.0, "median {median} ms");
    let full = check_layout_xml(&xml).unwrap();
    assert!(full.elapsed_ms <= 200.0, "parse + check {} ms", full.elapsed_ms);
}

/// Widgets that lie on some directed cycle, by DFS reachability from each
/// widget back to itself.
fn cycle_members(n: usize, edges: &[(usize, usize)]) -> BTreeSet<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    (0..n)
        .filter(|&s| {
            let mut seen = vec![false; n];
            let mut stack = adj[s].clone();
            while let Some(v) = stack.pop() {
                if v == s {
                    return true;
                }
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(adj[v].iter().copied());
                }
            }
            false
        })
        .collect()
}

fn reaches(n: usize, edges: &[(usize, usize)], from: usize, to: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(edges.iter().filter(|e| e.0 == v).map(|e| e.1));
        }
    }
    false
}

fn raw_graph(n: usize, edges: &[(usize, usize, usize)]) -> ConstraintGraph {
    ConstraintGraph {
        nodes: (0..n)
            .map(|i| WidgetNode {
                key: format!("w{i:03}"),
                kind: "View".into(),
                visibility: Visibility::Visible,
                interactive: false,
                has_click_handler: false,
                document_order: i,
            })
            .collect(),
        edges: edges
            .iter()
            .map(|&(a, r, b)| ConstraintEdge {
                src: a,
                relation: Relation::ALL[r],
                target: Target::Widget(b),
            })
            .collect(),
        dangling: Vec::new(),
    }
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, usize)>)> {
    (1usize..200).prop_flat_map(|n| {
        let edge = (0..n, 0usize..6, 0..n);
        (Just(n), prop::collection::vec(edge, 0..(2 * n)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cycles_match_dfs((n, edges) in graph_strategy()) {
        let graph = raw_graph(n, &edges);
        let findings = detect_inconsistencies(&graph);
        let plain: Vec<(usize, usize)> = edges.iter().map(|e| (e.0, e.2)).collect();
        let expected = cycle_members(n, &plain);
        let mut got = BTreeSet::new();
        for f in findings.iter().filter(|f| f.kind == InconsistencyKind::ConstraintCycle) {
            let ids: Vec<usize> = f.widgets.iter().map(|w| w[1..].parse().unwrap()).collect();
            for &a in &ids {
                prop_assert!(got.insert(a), "widget {} reported twice", a);
                for &b in &ids {
                    prop_assert!(a == b || reaches(n, &plain, a, b));
                }
            }
            let mut sorted = f.widgets.clone();
            sorted.sort();
            prop_assert_eq!(&sorted, &f.widgets);
        }
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn describe_is_total_and_findings_cite_known_widgets((n, edges) in graph_strategy()) {
        let graph = raw_graph(n, &edges);
        let report = validity_check(&graph);
        prop_assert_eq!(report.statements.len(), graph.edges.len());
        let keys: BTreeSet<&str> = graph.nodes.iter().map(|w| w.key.as_str()).collect();
        for f in &report.findings {
            prop_assert!(!f.widgets.is_empty());
            for w in &f.widgets {
                prop_assert!(keys.contains(w.as_str()));
            }
        }
        prop_assert_eq!(&report.findings, &detect_inconsistencies(&graph));
        prop_assert_eq!(report.statements, describe(&graph));
    }

    #[test]
    fn synthetic_layouts_are_well_formed(w in 2usize..60, seed in any::<u64>()) {
        let e = w * 3;
        let graph = graph_of(&synthetic_layout_xml(w, e, seed));
        prop_assert_eq!(graph.nodes.len(), w);
        prop_assert_eq!(graph.edges.len(), e);
        prop_assert!(graph.dangling.is_empty());
    }
}
