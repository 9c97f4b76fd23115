//! DOT and SVG rendering of diagrams with the usual overlays: scheme
//! interiors black-filled, anchors circled, bases shaded.

use std::collections::{BTreeMap, BTreeSet};

use latres_core::diagram::Diagram;
use latres_core::geometry::{self, CellIndex, PrimeInterval};
use latres_core::schemes::{self, SchemeKind};
use latres_core::{ElementId, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Overlay {
    Cells,
    Trajectories,
    Anchors,
    Scheme(ElementId),
    Stacked(ElementId),
}

impl Overlay {
    pub fn parse(s: &str) -> std::result::Result<Overlay, String> {
        if let Some(rest) = s.strip_prefix("scheme=") {
            let id: u32 = rest.parse().map_err(|_| format!("bad anchor id `{}`", rest))?;
            return Ok(Overlay::Scheme(ElementId(id)));
        }
        if let Some(rest) = s.strip_prefix("stacked=") {
            let id: u32 = rest.parse().map_err(|_| format!("bad anchor id `{}`", rest))?;
            return Ok(Overlay::Stacked(ElementId(id)));
        }
        match s {
            "cells" => Ok(Overlay::Cells),
            "trajectories" => Ok(Overlay::Trajectories),
            "anchors" => Ok(Overlay::Anchors),
            other => Err(format!(
                "unknown overlay `{}` (expected cells, trajectories, anchors, scheme=<id>, stacked=<id>)",
                other
            )),
        }
    }
}

struct Decor {
    /// light gray fill: scheme base or stacked region
    shaded: BTreeSet<ElementId>,
    /// black fill: scheme interior / tower
    filled: BTreeSet<ElementId>,
    /// double circle: anchors
    circled: BTreeSet<ElementId>,
    /// edge colors keyed by cover pair
    edge_color: BTreeMap<(u32, u32), String>,
    notes: Vec<String>,
}

const PALETTE: [&str; 6] = ["#1b6ca8", "#c0392b", "#1e8449", "#7d3c98", "#b7950b", "#148f77"];

impl Decor {
    /// Overlay ids are given in the input labeling; the picture is drawn in
    /// canonical labels, so the decoration must be carried across.
    fn relabel(self, map: &[ElementId]) -> Decor {
        let m = |set: BTreeSet<ElementId>| set.into_iter().map(|x| map[x.index()]).collect();
        Decor {
            shaded: m(self.shaded),
            filled: m(self.filled),
            circled: m(self.circled),
            edge_color: self
                .edge_color
                .into_iter()
                .map(|((a, b), c)| ((map[a as usize].0, map[b as usize].0), c))
                .collect(),
            notes: self.notes,
        }
    }
}

fn decorate(d: &Diagram, overlays: &[Overlay]) -> Result<Decor> {
    let mut decor = Decor {
        shaded: BTreeSet::new(),
        filled: BTreeSet::new(),
        circled: BTreeSet::new(),
        edge_color: BTreeMap::new(),
        notes: Vec::new(),
    };
    for overlay in overlays {
        match overlay {
            Overlay::Anchors => {
                for u in schemes::anchors(d, SchemeKind::C2)? {
                    decor.circled.insert(u);
                }
                for u in schemes::anchors(d, SchemeKind::C3)? {
                    decor.circled.insert(u);
                }
            }
            Overlay::Scheme(u) => {
                let sch = schemes::scheme(d, *u, SchemeKind::C2)
                    .or_else(|_| schemes::scheme(d, *u, SchemeKind::C3))?;
                decor.shaded.extend(sch.base_set());
                decor.filled.extend(sch.interior().iter().copied());
                decor.circled.insert(sch.anchor());
            }
            Overlay::Stacked(u) => {
                let tower = schemes::stacked_tower(d, *u)?;
                let top = tower.last().expect("tower has at least the base N7");
                decor.shaded.extend(top.elements());
                decor.filled.extend(top.interior_tower());
                decor.circled.insert(*u);
            }
            Overlay::Cells => {
                for (i, c) in geometry::cells(d)?.iter().enumerate() {
                    decor.notes.push(format!(
                        "cell {}: bottom {} top {} left {:?} right {:?}",
                        i,
                        c.bottom,
                        c.top,
                        c.left_side.iter().map(|x| x.0).collect::<Vec<_>>(),
                        c.right_side.iter().map(|x| x.0).collect::<Vec<_>>()
                    ));
                }
            }
            Overlay::Trajectories => {
                let idx = CellIndex::build(d)?;
                let mut assigned: BTreeSet<PrimeInterval> = BTreeSet::new();
                let mut color = 0usize;
                for (x, y) in d.cover_pairs() {
                    let e = PrimeInterval { bottom: x, top: y };
                    if assigned.contains(&e) {
                        continue;
                    }
                    let t = geometry::c2_trajectory(&idx, e)?;
                    for link in &t.links {
                        assigned.insert(*link);
                        decor
                            .edge_color
                            .insert((link.bottom.0, link.top.0), PALETTE[color % PALETTE.len()].into());
                    }
                    color += 1;
                }
            }
        }
    }
    Ok(decor)
}

/// Longest-chain height from the bottom, by fixpoint over covers. The
/// round count is bounded so that a cover cycle surfaces as an error
/// instead of a hang.
fn heights(d: &Diagram) -> Result<Vec<usize>> {
    let mut h = vec![0usize; d.n()];
    for round in 0.. {
        let mut changed = false;
        for x in d.elements() {
            for &y in d.upper_covers(x) {
                if h[y.index()] < h[x.index()] + 1 {
                    h[y.index()] = h[x.index()] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        if round > d.n() {
            return Err(latres_core::Error::malformed("cover relation has a cycle"));
        }
    }
    Ok(h)
}

/// Level layout: per height, elements in first-visit order of the canonical
/// breadth-first walk, which follows the left-right cover lists.
fn layers(d: &Diagram) -> Result<Vec<Vec<ElementId>>> {
    let h = heights(d)?;
    let max_h = h.iter().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); max_h + 1];
    for x in d.canonical_order() {
        layers[h[x.index()]].push(x);
    }
    Ok(layers)
}

/// Renders to DOT. Overlay ids refer to the input labeling; the picture is
/// drawn in canonical labels, so equal similarity classes give byte-equal
/// output.
pub fn to_dot(input: &Diagram, overlays: &[Overlay]) -> Result<String> {
    let (d, map) = input.canonical_form();
    let d = &d;
    let decor = decorate(input, overlays)?.relabel(&map);
    let mut out = String::new();
    out.push_str("digraph latdiag {\n  rankdir=BT;\n  node [shape=circle, fontsize=10];\n");
    for note in &decor.notes {
        out.push_str(&format!("  // {}\n", note));
    }
    for x in d.elements() {
        let mut attrs = Vec::new();
        if decor.circled.contains(&x) {
            attrs.push("shape=doublecircle".to_string());
        }
        if decor.filled.contains(&x) {
            attrs.push("style=filled, fillcolor=black, fontcolor=white".to_string());
        } else if decor.shaded.contains(&x) {
            attrs.push("style=filled, fillcolor=gray85".to_string());
        }
        if attrs.is_empty() {
            out.push_str(&format!("  {};\n", x));
        } else {
            out.push_str(&format!("  {} [{}];\n", x, attrs.join(", ")));
        }
    }
    for layer in layers(d)? {
        let ids: Vec<String> = layer.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("  {{ rank=same; {} }}\n", ids.join("; ")));
    }
    for (x, y) in d.cover_pairs() {
        match decor.edge_color.get(&(x.0, y.0)) {
            Some(c) => out.push_str(&format!("  {} -> {} [color=\"{}\"];\n", x, y, c)),
            None => out.push_str(&format!("  {} -> {};\n", x, y)),
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Renders a layered SVG picture: y is the height in the diagram, the
/// x-order within a level follows the left-right cover lists. Labels are
/// canonical, like [`to_dot`].
pub fn to_svg(input: &Diagram, overlays: &[Overlay]) -> Result<String> {
    let (d, map) = input.canonical_form();
    let d = &d;
    let decor = decorate(input, overlays)?.relabel(&map);
    let layers = layers(d)?;
    let (dx, dy, r, margin) = (70.0, 70.0, 12.0, 40.0);
    let max_width = layers.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let width = max_width * dx + 2.0 * margin;
    let height = layers.len() as f64 * dy + 2.0 * margin;
    let mut pos: BTreeMap<ElementId, (f64, f64)> = BTreeMap::new();
    for (level, layer) in layers.iter().enumerate() {
        let y = height - margin - level as f64 * dy;
        let layer_width = (layer.len().max(1) - 1) as f64 * dx;
        let x0 = (width - layer_width) / 2.0;
        for (i, &x) in layer.iter().enumerate() {
            pos.insert(x, (x0 + i as f64 * dx, y));
        }
    }
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n",
        width, height, width, height
    );
    for note in &decor.notes {
        out.push_str(&format!("  <!-- {} -->\n", note));
    }
    for (x, y) in d.cover_pairs() {
        let (x1, y1) = pos[&x];
        let (x2, y2) = pos[&y];
        let color = decor
            .edge_color
            .get(&(x.0, y.0))
            .map(String::as_str)
            .unwrap_or("#444444");
        out.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" stroke-width=\"1.6\"/>\n",
            x1, y1, x2, y2, color
        ));
    }
    for x in d.elements() {
        let (cx, cy) = pos[&x];
        let fill = if decor.filled.contains(&x) {
            "black"
        } else if decor.shaded.contains(&x) {
            "#d9d9d9"
        } else {
            "white"
        };
        let text_fill = if decor.filled.contains(&x) { "white" } else { "black" };
        out.push_str(&format!(
            "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"{:.1}\" fill=\"{}\" stroke=\"black\" stroke-width=\"1.4\"/>\n",
            cx, cy, r, fill
        ));
        if decor.circled.contains(&x) {
            out.push_str(&format!(
                "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"{:.1}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.4\"/>\n",
                cx, cy, r + 4.0
            ));
        }
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            cx, cy, text_fill, x
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
