//! Deterministic SVG figures of patches and tori.

use std::fmt::Write;

use crate::certificate::Certificate;
use crate::dump::PatchDump;
use crate::geometry::Vec2;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
const DIRECT: &str = "#9ec5e8";
const MIRRORED: &str = "#f2b880";
const COPY_OPACITY: &str = "0.35";

#[derive(Debug, Clone, PartialEq)]
pub struct FigureTile {
    pub points: Vec<Vec2>,
    pub mirrored: bool,
    /// Lattice translate of a fundamental-domain tile.
    pub copy: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureNode {
    pub position: Vec2,
    pub valence: usize,
    pub closed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Figure {
    pub tiles: Vec<FigureTile>,
    pub nodes: Vec<FigureNode>,
    /// Fundamental parallelogram, when drawing a torus.
    pub cell: Option<[Vec2; 4]>,
}

impl From<&PatchDump> for Figure {
    fn from(d: &PatchDump) -> Figure {
        Figure {
            tiles: d
                .tiles
                .iter()
                .map(|t| FigureTile {
                    points: t.vertices.to_vec(),
                    mirrored: t.mirrored,
                    copy: false,
                })
                .collect(),
            nodes: d
                .nodes
                .iter()
                .map(|n| FigureNode {
                    position: n.position,
                    valence: n.valence,
                    closed: n.closed,
                })
                .collect(),
            cell: None,
        }
    }
}

impl From<&Certificate> for Figure {
    fn from(c: &Certificate) -> Figure {
        let (t1, t2) = (c.lattice.t1, c.lattice.t2);
        let mut tiles = Vec::new();
        for m in -1..=1 {
            for n in -1..=1 {
                let s = t1 * m as f64 + t2 * n as f64;
                for t in &c.tiles {
                    tiles.push(FigureTile {
                        points: t.vertices.iter().map(|&p| p + s).collect(),
                        mirrored: t.mirrored,
                        copy: (m, n) != (0, 0),
                    });
                }
            }
        }
        let o = c.tiles.first().map_or(Vec2::default(), |t| t.translation);
        Figure {
            tiles,
            nodes: c
                .nodes
                .iter()
                .map(|n| FigureNode {
                    position: n.position,
                    valence: n.valence,
                    closed: true,
                })
                .collect(),
            cell: Some([o, o + t1, o + t1 + t2, o + t2]),
        }
    }
}

fn marker_color(valence: usize) -> &'static str {
    match valence {
        3 => "#c0392b",
        4 => "#27ae60",
        5 => "#8e44ad",
        _ => "#2c3e50",
    }
}

/// Render with a fit-to-bounds transform; identical figures give
/// byte-identical documents.
pub fn render_svg(fig: &Figure, markers: bool) -> String {
    let pts = fig
        .tiles
        .iter()
        .flat_map(|t| t.points.iter())
        .chain(fig.cell.iter().flatten());
    let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !lo.x.is_finite() {
        lo = Vec2::new(-1.0, -1.0);
        hi = Vec2::new(1.0, 1.0);
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let pad = Vec2::new(span - (hi.x - lo.x), span - (hi.y - lo.y)) * 0.5;
    let map = |p: Vec2| {
        let x = MARGIN + (p.x - lo.x + pad.x) * scale;
        let y = CANVAS - MARGIN - (p.y - lo.y + pad.y) * scale;
        // avoid printing "-0.00"
        let r = |v: f64| if v.abs() < 0.005 { 0.0 } else { v };
        (r(x), r(y))
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<g id="tiles" stroke="#333333" stroke-width="1" stroke-linejoin="round">"##);
    for t in &fig.tiles {
        let mut d = String::new();
        for (i, &p) in t.points.iter().enumerate() {
            let (x, y) = map(p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let fill = if t.mirrored { MIRRORED } else { DIRECT };
        let opacity = if t.copy { format!(r#" fill-opacity="{COPY_OPACITY}""#) } else { String::new() };
        let _ = writeln!(s, r#"<path d="{d}" fill="{fill}"{opacity}/>"#);
    }
    let _ = writeln!(s, "</g>");
    if let Some(cell) = fig.cell {
        let d: Vec<String> = cell
            .iter()
            .map(|&p| {
                let (x, y) = map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon id="cell" points="{}" fill="none" stroke="#000000" stroke-width="2" stroke-dasharray="6 4"/>"##,
            d.join(" ")
        );
    }
    if markers {
        let _ = writeln!(s, r#"<g id="nodes">"#);
        for n in &fig.nodes {
            let (x, y) = map(n.position);
            if n.closed {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{}"><title>{}</title></circle>"#,
                    marker_color(n.valence),
                    n.valence
                );
            } else {
                let _ = writeln!(
                    s,
                    r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="none" stroke="#7f8c8d"/>"##
                );
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_figure_has_empty_tile_group() {
        let svg = render_svg(&Figure::default(), true);
        assert!(svg.contains("<g id=\"tiles\""));
        assert_eq!(svg.matches("<path").count(), 0);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn one_tile_one_path() {
        let fig = Figure {
            tiles: vec![FigureTile {
                points: vec![
                    Vec2::new(0.0, 0.0),
                    Vec2::new(1.0, 0.0),
                    Vec2::new(1.2, 0.8),
                    Vec2::new(0.5, 1.3),
                    Vec2::new(-0.2, 0.8),
                ],
                mirrored: false,
                copy: false,
            }],
            ..Figure::default()
        };
        let svg = render_svg(&fig, false);
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg, render_svg(&fig.clone(), false));
    }
}
