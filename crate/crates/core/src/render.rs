//! SVG drawings of instances and tours.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{Instance, Point};
use crate::tour::Tour;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
const NODE_SIZE: f64 = 4.0;

/// Stroke style for one tour.
#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub stroke: String,
    pub width: f64,
    pub dash: Option<String>,
}

impl Style {
    pub fn solid(stroke: &str) -> Self {
        Self {
            stroke: stroke.into(),
            width: 1.5,
            dash: None,
        }
    }

    pub fn dashed(stroke: &str) -> Self {
        Self {
            stroke: stroke.into(),
            width: 1.0,
            dash: Some("6 4".into()),
        }
    }
}

/// Colors assigned to overlaid tours in order: final tour first.
pub const PALETTE: [&str; 4] = ["#1f4e9c", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    min: Point,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(inst: &Instance) -> Self {
        let pts = inst.items().iter().chain(inst.placeholders());
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let scale = (CANVAS - 2.0 * MARGIN) / span;
        Self {
            min: lo,
            scale,
            height: (hi.y - lo.y) * scale + 2.0 * MARGIN,
        }
    }

    /// Screen coordinates, y pointing down.
    fn map(&self, p: Point) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale,
            self.height - MARGIN - (p.y - self.min.y) * self.scale,
        )
    }
}

/// Items as filled circles, placeholders as open squares, each tour as a
/// closed polyline. Output depends only on the inputs.
pub fn render_svg(inst: &Instance, tours: &[(Tour, Style)]) -> Result<String> {
    for (t, _) in tours {
        t.validate(inst)?;
    }
    let frame = Frame::new(inst);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{CANVAS:.0}" height="{:.0}" viewBox="0 0 {CANVAS:.0} {:.0}">"#,
        frame.height.ceil(),
        frame.height.ceil()
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    for (k, (t, style)) in tours.iter().enumerate() {
        let mut points = Vec::with_capacity(2 * t.n() + 1);
        for (&i, &p) in t.items.iter().zip(&t.placeholders) {
            points.push(frame.map(inst.coord(i)));
            points.push(frame.map(inst.coord(p)));
        }
        points.push(points[0]);
        let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let dash = style
            .dash
            .as_ref()
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        writeln!(
            out,
            r#"<polyline class="tour" id="tour-{k}" fill="none" stroke="{}" stroke-width="{}"{dash} points="{}"/>"#,
            style.stroke,
            style.width,
            coords.join(" ")
        )
        .unwrap();
    }
    for p in inst.items() {
        let (x, y) = frame.map(*p);
        writeln!(out, r#"<circle class="item" cx="{x:.3}" cy="{y:.3}" r="{NODE_SIZE}" fill="black"/>"#).unwrap();
    }
    for p in inst.placeholders() {
        let (x, y) = frame.map(*p);
        writeln!(
            out,
            r#"<rect class="placeholder" x="{:.3}" y="{:.3}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x - NODE_SIZE,
            y - NODE_SIZE,
            2.0 * NODE_SIZE,
            2.0 * NODE_SIZE
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn save_svg(inst: &Instance, tours: &[(Tour, Style)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_svg(inst, tours)?).map_err(|e| Error::io(path, e))
}
