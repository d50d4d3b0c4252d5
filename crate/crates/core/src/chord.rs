//! Chord diagram of variability rates between coupled functions.
//!
//! Nodes are the functions that originate or receive at least one
//! relationship, placed clockwise around a circle in id order starting at the
//! top. Cell `(i, j)` holds the relationships directed from node `i` to node
//! `j`; a missing relationship is an empty cell, never a zero VR.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::ids::compare_ids;
use crate::model::{Aspect, FramModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChordError {
    #[error("VR supplied for unknown relationship `{0}`")]
    UnknownRelationship(String),
    #[error("VR for relationship `{0}` is not finite")]
    NonFiniteRate(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordArc {
    pub relationship: String,
    pub qname: String,
    pub aspect: Aspect,
    pub from: usize,
    pub to: usize,
    pub vr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordMatrix {
    pub nodes: Vec<String>,
    /// Ordered by (row, column, relationship id).
    pub arcs: Vec<ChordArc>,
}

impl ChordMatrix {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> Vec<&ChordArc> {
        self.arcs
            .iter()
            .filter(|a| a.from == row && a.to == col)
            .collect()
    }

    pub fn populated_cells(&self) -> usize {
        let mut cells: Vec<(usize, usize)> = self.arcs.iter().map(|a| (a.from, a.to)).collect();
        cells.dedup();
        cells.len()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct CellEntry<'a> {
            relationship: &'a str,
            vr: f64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            nodes: &'a [String],
            matrix: Vec<Vec<Option<Vec<CellEntry<'a>>>>>,
            arcs: &'a [ChordArc],
        }
        let n = self.dim();
        let mut matrix: Vec<Vec<Option<Vec<CellEntry>>>> =
            (0..n).map(|_| (0..n).map(|_| None).collect()).collect();
        for a in &self.arcs {
            matrix[a.from][a.to]
                .get_or_insert_with(Vec::new)
                .push(CellEntry {
                    relationship: &a.relationship,
                    vr: a.vr,
                });
        }
        crate::report::to_json(&Doc {
            nodes: &self.nodes,
            matrix,
            arcs: &self.arcs,
        })
    }
}

/// Builds the chord matrix for the VR values in `vr_map` (relationship id to
/// percentage).
pub fn chord_matrix(
    model: &FramModel,
    vr_map: &BTreeMap<String, f64>,
) -> Result<ChordMatrix, ChordError> {
    let mut nodes: Vec<String> = model
        .origin_set()
        .union(&model.destination_set())
        .map(|s| s.to_string())
        .collect();
    nodes.sort_by(|a, b| compare_ids(a, b));
    let index = |id: &str| nodes.iter().position(|n| n == id).expect("endpoint in O ∪ D");

    let mut arcs = Vec::with_capacity(vr_map.len());
    for (rid, &vr) in vr_map {
        let r = model
            .relationship(rid)
            .ok_or_else(|| ChordError::UnknownRelationship(rid.clone()))?;
        if !vr.is_finite() {
            return Err(ChordError::NonFiniteRate(rid.clone()));
        }
        arcs.push(ChordArc {
            relationship: r.id.clone(),
            qname: r.qname.clone(),
            aspect: r.aspect,
            from: index(&r.origin),
            to: index(&r.destination),
            vr,
        });
    }
    arcs.sort_by(|a, b| {
        (a.from, a.to)
            .cmp(&(b.from, b.to))
            .then_with(|| compare_ids(&a.relationship, &b.relationship))
    });
    Ok(ChordMatrix { nodes, arcs })
}

const SIZE: f64 = 800.0;
const RADIUS: f64 = 300.0;

fn point(angle: f64, radius: f64) -> (f64, f64) {
    (SIZE / 2.0 + radius * angle.cos(), SIZE / 2.0 + radius * angle.sin())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn f(v: f64) -> String {
    crate::report::fmt_num(v, 3)
}

/// Self-contained SVG rendering: stroke width grows with |VR|, arcs with a
/// negative VR (amplification) use the `amplify` class, the others `dampen`.
pub fn render_svg(matrix: &ChordMatrix, model: &FramModel) -> String {
    let n = matrix.dim().max(1) as f64;
    let angle_of = |i: usize| -PI / 2.0 + 2.0 * PI * i as f64 / n;
    let max_abs = matrix
        .arcs
        .iter()
        .map(|a| a.vr.abs())
        .fold(0.0_f64, f64::max);

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        SIZE
    )
    .unwrap();
    svg.push_str(concat!(
        "<style>\n",
        ".node{fill:#4a5a6a}\n",
        ".label{font-family:sans-serif;font-size:11px;fill:#222}\n",
        ".dampen{fill:none;stroke:#2b8a3e;stroke-opacity:0.75}\n",
        ".amplify{fill:none;stroke:#c92a2a;stroke-opacity:0.75}\n",
        ".ring{fill:none;stroke:#ccc}\n",
        "</style>\n",
        "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" ",
        "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\">",
        "<path d=\"M0,0 L10,5 L0,10 z\" fill=\"#555\"/></marker></defs>\n",
    ));
    writeln!(
        svg,
        r#"<circle class="ring" cx="{}" cy="{}" r="{}"/>"#,
        f(SIZE / 2.0),
        f(SIZE / 2.0),
        f(RADIUS)
    )
    .unwrap();

    for (i, id) in matrix.nodes.iter().enumerate() {
        let a = angle_of(i);
        let (x, y) = point(a, RADIUS);
        let (lx, ly) = point(a, RADIUS + 22.0);
        let label = model.function(id).map(|f| f.label.as_str()).unwrap_or("");
        writeln!(
            svg,
            r#"<g id="node-{id}"><title>{id}: {title}</title><circle class="node" cx="{x}" cy="{y}" r="6"/><text class="label" x="{lx}" y="{ly}" text-anchor="middle" dominant-baseline="middle">{id}</text></g>"#,
            id = xml_escape(id),
            title = xml_escape(label),
            x = f(x),
            y = f(y),
            lx = f(lx),
            ly = f(ly),
        )
        .unwrap();
    }

    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for arc in &matrix.arcs {
        let k = seen.entry((arc.from, arc.to)).or_insert(0);
        let offset = *k as f64 * 18.0;
        *k += 1;
        let width = if max_abs > 0.0 {
            1.0 + 7.0 * arc.vr.abs() / max_abs
        } else {
            1.0
        };
        let class = if arc.vr < 0.0 { "amplify" } else { "dampen" };
        let (x0, y0) = point(angle_of(arc.from), RADIUS - 8.0);
        let (x1, y1) = point(angle_of(arc.to), RADIUS - 8.0);
        let path = if arc.from == arc.to {
            let a = angle_of(arc.from);
            let (cx0, cy0) = point(a - 0.25, RADIUS - 90.0 - offset);
            let (cx1, cy1) = point(a + 0.25, RADIUS - 90.0 - offset);
            format!(
                "M{},{} C{},{} {},{} {},{}",
                f(x0),
                f(y0),
                f(cx0),
                f(cy0),
                f(cx1),
                f(cy1),
                f(x1),
                f(y1)
            )
        } else {
            // control point pulled toward the centre, nudged for parallel arcs
            let mid = (angle_of(arc.from) + angle_of(arc.to)) / 2.0;
            let (cx, cy) = point(mid, offset);
            format!(
                "M{},{} Q{},{} {},{}",
                f(x0),
                f(y0),
                f(cx),
                f(cy),
                f(x1),
                f(y1)
            )
        };
        writeln!(
            svg,
            r#"<path id="arc-{rid}" class="{class}" stroke-width="{w}" marker-end="url(#head)" d="{path}"><title>{rid} {from} -&gt; {to} ({aspect}) {qname}: VR {vr}%</title></path>"#,
            rid = xml_escape(&arc.relationship),
            w = f(width),
            from = xml_escape(&matrix.nodes[arc.from]),
            to = xml_escape(&matrix.nodes[arc.to]),
            aspect = arc.aspect,
            qname = xml_escape(&arc.qname),
            vr = crate::report::fmt_num(arc.vr, 2),
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Chord matrix plus its SVG rendering.
pub fn emit_chord(
    model: &FramModel,
    vr_map: &BTreeMap<String, f64>,
) -> Result<(ChordMatrix, String), ChordError> {
    let matrix = chord_matrix(model, vr_map)?;
    let svg = render_svg(&matrix, model);
    Ok((matrix, svg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relationship;

    fn rel(id: &str, o: &str, d: &str, q: &str) -> Relationship {
        Relationship {
            id: id.into(),
            origin: o.into(),
            destination: d.into(),
            aspect: Aspect::Input,
            qname: q.into(),
            weight: 1.0,
        }
    }

    fn pair_model() -> FramModel {
        let mut m = FramModel::new();
        m.add_function("F13", "Use of the service").unwrap();
        m.add_function("F14", "Monitor user generated feedback").unwrap();
        m.add_relationship(rel("R106", "F13", "F14", "User Behavior"))
            .unwrap();
        m
    }

    fn vr(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
        entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn minimal_diagram_has_one_arc() {
        let (matrix, svg) = emit_chord(&pair_model(), &vr(&[("R106", 50.0)])).unwrap();
        assert_eq!(matrix.dim(), 2);
        assert_eq!(matrix.populated_cells(), 1);
        assert_eq!(matrix.cell(0, 1).len(), 1);
        assert!(matrix.cell(1, 0).is_empty());
        assert_eq!(svg.matches("<path id=\"arc-").count(), 1);
        assert!(svg.contains("class=\"dampen\""));
    }

    #[test]
    fn both_directions_fill_both_cells() {
        let mut m = pair_model();
        m.add_relationship(rel("R200", "F14", "F13", "Reply")).unwrap();
        let matrix = chord_matrix(&m, &vr(&[("R106", 10.0), ("R200", -20.0)])).unwrap();
        assert_eq!(matrix.cell(0, 1)[0].relationship, "R106");
        assert_eq!(matrix.cell(1, 0)[0].relationship, "R200");
        let svg = render_svg(&matrix, &m);
        assert!(svg.contains("class=\"amplify\""));
    }

    #[test]
    fn zero_vr_is_a_populated_cell() {
        let matrix = chord_matrix(&pair_model(), &vr(&[("R106", 0.0)])).unwrap();
        assert_eq!(matrix.cell(0, 1)[0].vr, 0.0);
        let json = matrix.to_json();
        assert!(json.contains("null"));
        assert!(json.contains("\"vr\": 0.0"));
    }

    #[test]
    fn unknown_relationship_rejected() {
        assert_eq!(
            chord_matrix(&pair_model(), &vr(&[("R999", 1.0)])),
            Err(ChordError::UnknownRelationship("R999".into()))
        );
    }

    #[test]
    fn rendering_is_repeatable() {
        let m = pair_model();
        let map = vr(&[("R106", 33.3)]);
        assert_eq!(emit_chord(&m, &map).unwrap().1, emit_chord(&m, &map).unwrap().1);
    }
}
