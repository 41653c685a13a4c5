//! Minimal SVG rendering of polygon overlays.
//!
//! Coordinates are exact rationals scaled to pixels and written as fixed
//! decimal strings; tooltips carry the exact fractions.

use std::fmt::Write as _;

use hnpoly_core::{ConcavePolygon, Point, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    Dotted,
}

impl Style {
    fn dasharray(self) -> Option<&'static str> {
        match self {
            Style::Solid => None,
            Style::Dashed => Some("8 4"),
            Style::Dotted => Some("2 3"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub polygon: ConcavePolygon,
    pub label: String,
    pub style: Style,
}

#[derive(Clone, Debug)]
pub struct Mark {
    pub point: Point,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct SvgRender {
    pub polygons: Vec<Layer>,
    pub marks: Vec<Mark>,
    /// Pixels per unit.
    pub scale: u32,
}

impl Default for SvgRender {
    fn default() -> Self {
        SvgRender { polygons: Vec::new(), marks: Vec::new(), scale: 80 }
    }
}

impl SvgRender {
    pub fn layer(mut self, polygon: ConcavePolygon, label: impl Into<String>, style: Style) -> Self {
        self.polygons.push(Layer { polygon, label: label.into(), style });
        self
    }

    pub fn mark(mut self, point: Point, label: impl Into<String>) -> Self {
        self.marks.push(Mark { point, label: label.into() });
        self
    }
}

const COLORS: [&str; 6] = ["#1f4e9c", "#c0392b", "#27864a", "#8e44ad", "#d35400", "#555555"];
const MARGIN: i64 = 40;
const LEGEND_WIDTH: i64 = 180;
const LEGEND_ROW: i64 = 18;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn px(v: &Rat) -> String {
    v.to_decimal(3)
}

/// Renders the overlay as a standalone SVG document.
pub fn render_svg(render: &SvgRender) -> String {
    let scale = Rat::from(u64::from(render.scale.max(1)));
    let one = Rat::one();
    let max_x = render
        .polygons
        .iter()
        .map(|l| l.polygon.width())
        .chain(render.marks.iter().map(|m| m.point.x.clone()))
        .fold(one.clone(), Rat::max);
    let max_y = render
        .polygons
        .iter()
        .flat_map(|l| l.polygon.vertices())
        .map(|p| p.y)
        .chain(render.marks.iter().map(|m| m.point.y.clone()))
        .fold(one.clone(), Rat::max);
    let min_y = render
        .polygons
        .iter()
        .flat_map(|l| l.polygon.vertices())
        .map(|p| p.y)
        .chain(render.marks.iter().map(|m| m.point.y.clone()))
        .fold(Rat::zero(), Rat::min);

    let plot_w = &max_x * &scale;
    let plot_h = (&max_y - &min_y) * &scale;
    let margin = Rat::int(MARGIN);
    let width = &plot_w + Rat::int(2 * MARGIN + LEGEND_WIDTH);
    let rows = render.polygons.len().max(1) as i64 + if render.marks.is_empty() { 0 } else { 1 };
    let height = (&plot_h + Rat::int(2 * MARGIN)).max(Rat::int(2 * MARGIN + rows * LEGEND_ROW));
    // Maps a data point to pixel coordinates with the y axis pointing up.
    let to_px = |p: &Point| -> (String, String) {
        let x = &margin + &p.x * &scale;
        let y = &margin + &plot_h - (&p.y - &min_y) * &scale;
        (px(&x), px(&y))
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = px(&width),
        h = px(&height)
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, px(&width), px(&height));

    // Axes.
    let (ox, oy) = to_px(&Point::new(Rat::zero(), Rat::zero()));
    let (ex, _) = to_px(&Point::new(max_x.clone(), Rat::zero()));
    let (_, ty) = to_px(&Point::new(Rat::zero(), max_y.clone()));
    let _ = writeln!(out, r##"<g stroke="#999999" stroke-width="1">"##);
    let _ = writeln!(out, r#"<line x1="{ox}" y1="{oy}" x2="{ex}" y2="{oy}"/>"#);
    let _ = writeln!(out, r#"<line x1="{ox}" y1="{oy}" x2="{ox}" y2="{ty}"/>"#);
    let _ = writeln!(out, "</g>");

    for (k, layer) in render.polygons.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let verts = layer.polygon.vertices();
        let points: Vec<String> = verts
            .iter()
            .map(|v| {
                let (x, y) = to_px(v);
                format!("{x},{y}")
            })
            .collect();
        let exact: Vec<String> = verts.iter().map(|v| format!("({}, {})", v.x, v.y)).collect();
        let dash = layer
            .style
            .dasharray()
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            r#"<polyline class="polygon" points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}><title>{}: {}</title></polyline>"#,
            points.join(" "),
            escape(&layer.label),
            escape(&exact.join(" "))
        );
    }

    for m in &render.marks {
        let (x, y) = to_px(&m.point);
        let _ = writeln!(
            out,
            r##"<circle class="mark" cx="{x}" cy="{y}" r="5" fill="none" stroke="#000000" stroke-width="1.5"><title>{}: ({}, {})</title></circle>"##,
            escape(&m.label),
            m.point.x,
            m.point.y
        );
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" dx="7" dy="-7">{}</text>"#, escape(&m.label));
    }

    // Legend.
    let lx = &margin + &plot_w + Rat::int(20);
    let _ = writeln!(out, r#"<g class="legend">"#);
    if render.polygons.is_empty() {
        let _ = writeln!(out, r#"<text x="{}" y="{}">no data</text>"#, px(&lx), MARGIN);
    }
    for (k, layer) in render.polygons.iter().enumerate() {
        let y = MARGIN + k as i64 * LEGEND_ROW;
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{x2}" y="{yt}">{label}</text>"#,
            x0 = px(&lx),
            x1 = px(&(&lx + Rat::int(20))),
            x2 = px(&(&lx + Rat::int(26))),
            yt = y + 4,
            label = escape(&layer.label)
        );
    }
    if !render.marks.is_empty() {
        let y = MARGIN + render.polygons.len() as i64 * LEGEND_ROW;
        let _ = writeln!(out, r#"<text x="{}" y="{}">○ contact points</text>"#, px(&lx), y + 4);
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}
