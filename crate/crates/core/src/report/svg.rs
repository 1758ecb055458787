//! Plain SVG charts: polylines for per-position series and stacked bars for
//! class proportions. Output depends only on the data.

use std::fmt::Write;

use super::format::sig;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const COLOR_AXIS: &str = "#2c3e50";
const COLOR_GRID: &str = "#e5e8eb";
const FONT: &str = "font-family=\"Helvetica, Arial, sans-serif\"";

pub const PALETTE: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Plot rectangle `(left, top, right, bottom)` in SVG coordinates.
pub fn plot_area() -> (f64, f64, f64, f64) {
    (
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM,
    )
}

/// Axis range covering every value, padded by 5% of the span.
pub fn axis_range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span == 0.0 {
        let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let (left, _, right, _) = plot_area();
        left + (v - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (right - left)
    }

    fn y(&self, v: f64) -> f64 {
        let (_, top, _, bottom) = plot_area();
        bottom - (v - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (bottom - top)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(svg: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" {FONT} font-size=\"16\" font-weight=\"bold\">{}</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT} font-size=\"13\">{}</text>\n\
         <text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" {FONT} font-size=\"13\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        escape(title),
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 18.0,
        escape(x_label),
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        escape(y_label),
    );
}

fn axes(svg: &mut String, frame: &Frame, x_ticks: &[f64]) {
    let (left, top, right, bottom) = plot_area();
    for i in 0..=TICKS {
        let v = frame.y_range.0 + (frame.y_range.1 - frame.y_range.0) * i as f64 / TICKS as f64;
        let y = frame.y(v);
        let _ = writeln!(
            svg,
            "<line x1=\"{left:.2}\" y1=\"{y:.2}\" x2=\"{right:.2}\" y2=\"{y:.2}\" stroke=\"{COLOR_GRID}\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" {FONT} font-size=\"11\">{}</text>",
            left - 6.0,
            y + 4.0,
            sig(v, 4)
        );
    }
    for &t in x_ticks {
        let x = frame.x(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{bottom:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"{COLOR_AXIS}\"/>\n\
             <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT} font-size=\"11\">{}</text>",
            bottom + 4.0,
            bottom + 17.0,
            sig(t, 4)
        );
    }
    let _ = writeln!(
        svg,
        "<polyline points=\"{left:.2},{top:.2} {left:.2},{bottom:.2} {right:.2},{bottom:.2}\" fill=\"none\" stroke=\"{COLOR_AXIS}\" stroke-width=\"1.5\"/>"
    );
}

fn legend(svg: &mut String, entries: &[(&str, &str)]) {
    let x = WIDTH - MARGIN_RIGHT + 14.0;
    for (i, (name, color)) in entries.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" {FONT} font-size=\"12\">{}</text>",
            y - 10.0,
            x + 18.0,
            y,
            escape(name)
        );
    }
}

/// Integer positions to label on the x axis, at most about a dozen.
fn position_ticks(max_position: usize) -> Vec<f64> {
    let step = max_position.div_ceil(12).max(1);
    let mut ticks: Vec<f64> = (1..=max_position).step_by(step).map(|p| p as f64).collect();
    if ticks.last() != Some(&(max_position as f64)) {
        ticks.push(max_position as f64);
    }
    ticks
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let x_max = xs.clone().fold(1.0, f64::max);
    let frame = Frame {
        x_range: (xs.fold(x_max, f64::min).min(1.0), x_max.max(2.0)),
        y_range: axis_range(ys),
    };
    let mut svg = String::new();
    header(&mut svg, title, x_label, y_label);
    axes(&mut svg, &frame, &position_ticks(x_max as usize));
    for s in series {
        let points: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.x(x), frame.y(y)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline class=\"series\" data-name=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            escape(&s.name),
            points.join(" "),
            s.color
        );
        for p in &points {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(
                svg,
                "<circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"{}\"/>",
                s.color
            );
        }
    }
    legend(
        &mut svg,
        &series
            .iter()
            .map(|s| (s.name.as_str(), s.color))
            .collect::<Vec<_>>(),
    );
    svg.push_str("</svg>\n");
    svg
}

/// Stacked bars per position; each layer holds one value per position and
/// the layers of a position should sum to 1.
pub fn stacked_proportion_chart(title: &str, layers: &[(&str, &'static str, Vec<f64>)]) -> String {
    let n = layers.first().map_or(0, |l| l.2.len());
    let frame = Frame {
        x_range: (0.5, n as f64 + 0.5),
        y_range: (0.0, 1.0),
    };
    let mut svg = String::new();
    header(&mut svg, title, "Sentence position", "Token proportion");
    axes(&mut svg, &frame, &position_ticks(n.max(1)));
    let bar = (frame.x(1.0) - frame.x(0.0)) * 0.8;
    for position in 0..n {
        let mut base = 0.0;
        for (name, color, values) in layers {
            let v = values[position].clamp(0.0, 1.0);
            let (y_top, y_bottom) = (frame.y(base + v), frame.y(base));
            let _ = writeln!(
                svg,
                "<rect class=\"layer\" data-name=\"{}\" x=\"{:.2}\" y=\"{y_top:.2}\" width=\"{bar:.2}\" height=\"{:.2}\" fill=\"{color}\"/>",
                escape(name),
                frame.x(position as f64 + 1.0) - bar / 2.0,
                y_bottom - y_top
            );
            base += v;
        }
    }
    legend(
        &mut svg,
        &layers.iter().map(|l| (l.0, l.1)).collect::<Vec<_>>(),
    );
    svg.push_str("</svg>\n");
    svg
}
