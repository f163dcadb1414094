//! Self-contained SVG charts: trajectory plots and 2-D scatter plots.
//!
//! Everything is rendered with fixed-precision coordinates from plain
//! `format!` calls, so a given input always produces the same bytes — plots
//! can be golden-tested and diffed like any other report. No external
//! renderer or stylesheet is required.

use crate::coordinates::{TrajectorySeries, TrendFit};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const SERIES_COLOR: &str = "#1f77b4";
const CLAMP_COLOR: &str = "#d62728";
const FIT_COLOR: &str = "#7f7f7f";

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Frame {
        // Degenerate extents get a unit of breathing room so that a constant
        // series still renders mid-plot.
        let (y_min, y_max) = if y_max - y_min < 1e-12 {
            (y_min - 1.0, y_max + 1.0)
        } else {
            let pad = 0.05 * (y_max - y_min);
            (y_min - pad, y_max + pad)
        };
        let (x_min, x_max) = if x_max - x_min < 1e-12 {
            (x_min - 1.0, x_max + 1.0)
        } else {
            (x_min, x_max)
        };
        Frame {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn open_svg(out: &mut String, title: &str) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
}

fn axes(out: &mut String, frame: &Frame) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    out.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>\n"
    ));
    // Five evenly spaced horizontal guides with value labels.
    for i in 0..=4 {
        let value = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        let y = frame.y(value);
        out.push_str(&format!(
            "<line x1=\"{x0:.2}\" y1=\"{y:.2}\" x2=\"{x1:.2}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" \
             text-anchor=\"end\">{value:.3}</text>\n",
            x0 - 6.0,
            y + 3.0
        ));
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render a trajectory: the per-slice d_rel points (clamped points in a
/// warning color), a connecting polyline, and the fitted trend line.
pub fn trajectory_svg(series: &TrajectorySeries, fit: &TrendFit) -> String {
    let t_max = series.points.len().max(2) as f64;
    let values = series.values();
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &v in &values {
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    for t in [1.0, t_max] {
        let fitted = fit.slope * t + fit.intercept;
        y_min = y_min.min(fitted);
        y_max = y_max.max(fitted);
    }
    if values.is_empty() {
        y_min = -1.0;
        y_max = 1.0;
    }
    let frame = Frame::new(1.0, t_max, y_min, y_max);

    let title = format!(
        "{} — slope {:+.4}",
        series.triple.describe(),
        fit.slope_mean
    );
    let mut out = String::new();
    open_svg(&mut out, &title);
    axes(&mut out, &frame);

    // Fitted line across the full ordinal range.
    let (fx0, fy0) = (frame.x(1.0), frame.y(fit.slope + fit.intercept));
    let (fx1, fy1) = (frame.x(t_max), frame.y(fit.slope * t_max + fit.intercept));
    out.push_str(&format!(
        "<line x1=\"{fx0:.2}\" y1=\"{fy0:.2}\" x2=\"{fx1:.2}\" y2=\"{fy1:.2}\" \
         stroke=\"{FIT_COLOR}\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n"
    ));

    if series.points.len() > 1 {
        let coords: Vec<String> = series
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{:.2},{:.2}", frame.x((i + 1) as f64), frame.y(p.d_rel)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{SERIES_COLOR}\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    }

    let label_step = series.points.len().div_ceil(12).max(1);
    for (i, point) in series.points.iter().enumerate() {
        let x = frame.x((i + 1) as f64);
        let y = frame.y(point.d_rel);
        let color = if point.clamped_c1 || point.clamped_c2 {
            CLAMP_COLOR
        } else {
            SERIES_COLOR
        };
        out.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
        ));
        if i % label_step == 0 {
            out.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" \
                 text-anchor=\"middle\">{}</text>\n",
                HEIGHT - MARGIN_BOTTOM + 16.0,
                escape(&point.slice_label)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// A named 2-D point for scatter plots.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
    /// Rendered in the highlight color (used for coordinate words).
    pub highlight: bool,
}

/// Render labeled 2-D points, e.g. a PCA projection of a target word's
/// per-slice vectors together with its two coordinate words.
pub fn scatter_svg(title: &str, x_caption: &str, y_caption: &str, points: &[LabeledPoint]) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for p in points {
        x_min = x_min.min(p.x);
        x_max = x_max.max(p.x);
        y_min = y_min.min(p.y);
        y_max = y_max.max(p.y);
    }
    if points.is_empty() {
        (x_min, x_max, y_min, y_max) = (-1.0, 1.0, -1.0, 1.0);
    }
    let x_pad = 0.08 * (x_max - x_min).max(1e-12);
    let frame = Frame::new(x_min - x_pad, x_max + x_pad, y_min, y_max);

    let mut out = String::new();
    open_svg(&mut out, title);
    axes(&mut out, &frame);
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\">{}</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 12.0,
        escape(x_caption)
    ));
    out.push_str(&format!(
        "<text x=\"14\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2})\">{}</text>\n",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        escape(y_caption)
    ));
    for p in points {
        let x = frame.x(p.x);
        let y = frame.y(p.y);
        let color = if p.highlight { CLAMP_COLOR } else { SERIES_COLOR };
        out.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"{color}\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
            x + 5.0,
            y - 5.0,
            escape(&p.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}
