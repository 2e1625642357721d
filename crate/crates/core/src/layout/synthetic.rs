use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::Relation;

/// Seeded layout with `widgets` widgets and exactly `edges` widget-to-widget
/// constraints, for load testing. Buttons carry click handlers, so findings
/// come only from cycles.
///
/// # Panics
/// If `edges` exceeds six constraints per widget or `widgets < 2` with
/// edges requested.
pub fn synthetic_layout_xml(widgets: usize, edges: usize, seed: u64) -> String {
    let relations = &Relation::ALL[..6];
    assert!(edges <= widgets * relations.len(), "too many edges for {widgets} widgets");
    assert!(edges == 0 || widgets >= 2, "edges need at least two widgets");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("<ConstraintLayout>\n");
    for w in 0..widgets {
        let kind = if w % 2 == 0 { "Button" } else { "TextView" };
        let _ = write!(out, "  <{kind} id=\"w{w}\"");
        if kind == "Button" {
            let _ = write!(out, " onClick=\"onW{w}\"");
        }
        for (r, rel) in relations.iter().enumerate() {
            if r * widgets + w >= edges {
                break;
            }
            let mut target = rng.random_range(0..widgets - 1);
            if target >= w {
                target += 1;
            }
            let _ = write!(out, " {}=\"w{target}\"", rel.attribute());
        }
        out.push_str("/>\n");
    }
    out.push_str("</ConstraintLayout>\n");
    out
}
