//! SVG export of electrode outlines, in millimeter page units.

use crate::geometry::ElectrodeOutline;

/// Whitespace around the drawing, mm.
const MARGIN_MM: f64 = 1.0;
/// Stroke width, mm.
const STROKE_MM: f64 = 0.05;

/// Renders both electrode layers as closed paths. Coordinates are emitted
/// in millimeters at 0.1 um resolution, so identical outlines produce
/// byte-identical documents.
pub fn outline_svg(outline: &ElectrodeOutline) -> String {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for poly in outline.emitter.iter().chain(&outline.collector) {
        for p in poly {
            min_x = min_x.min(p[0] * 1e3);
            max_x = max_x.max(p[0] * 1e3);
            min_y = min_y.min(p[1] * 1e3);
            max_y = max_y.max(p[1] * 1e3);
        }
    }
    if !(min_x.is_finite() && min_y.is_finite()) {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 1.0, 1.0);
    }
    let width = max_x - min_x + 2.0 * MARGIN_MM;
    let height = max_y - min_y + 2.0 * MARGIN_MM;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.4} {:.4} {:.4} {:.4}\" \
         width=\"{:.4}mm\" height=\"{:.4}mm\">\n",
        min_x - MARGIN_MM,
        min_y - MARGIN_MM,
        width,
        height,
        width,
        height,
    ));
    for (id, polys) in [("emitter", &outline.emitter), ("collector", &outline.collector)] {
        s.push_str(&format!(
            "  <g id=\"{id}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{STROKE_MM}\">\n"
        ));
        for poly in polys {
            s.push_str(&path_element(poly));
        }
        s.push_str("  </g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn path_element(poly: &[[f64; 2]]) -> String {
    let mut d = String::new();
    for (i, p) in poly.iter().enumerate() {
        d.push_str(if i == 0 { "M " } else { "L " });
        d.push_str(&format!("{:.4} {:.4} ", p[0] * 1e3, p[1] * 1e3));
    }
    d.push('Z');
    format!("    <path d=\"{d}\"/>\n")
}
