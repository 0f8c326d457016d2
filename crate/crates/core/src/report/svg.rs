use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::map::TopicMap;
use crate::{Error, Result};

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// A named series; `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// One label per x position; may be shorter than the series.
    pub x_ticks: Vec<String>,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

/// Standalone SVG line chart. Each unbroken run of points becomes one
/// polyline; a run of one point is drawn as a dot.
pub fn render_line_chart(chart: &LineChart) -> Result<String> {
    let n = chart.series.iter().map(|s| s.points.len()).max().unwrap_or(0);
    if chart.series.is_empty() || n == 0 {
        return Err(Error::Empty("line chart needs a nonempty series".into()));
    }
    let values: Vec<f64> = chart.series.iter().flat_map(|s| s.points.iter().flatten().copied()).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("line chart value".into()));
    }
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if values.is_empty() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let x = |i: usize| if n == 1 { LEFT + pw / 2.0 } else { LEFT + pw * i as f64 / (n - 1) as f64 };
    let y = |v: f64| TOP + ph * (hi - v) / (hi - lo);

    let mut out = String::new();
    header(&mut out, &chart.title);
    let _ = writeln!(
        out,
        "<g stroke=\"black\"><line x1=\"{LEFT}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\"/><line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{:.1}\"/></g>",
        TOP + ph,
        LEFT + pw,
        TOP + ph,
        TOP + ph
    );
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>", LEFT - 6.0, y(v) + 4.0, fmt_num(v));
    }
    let stride = (chart.x_ticks.len() / 12).max(1);
    for (i, label) in chart.x_ticks.iter().enumerate().take(n).step_by(stride) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"10\">{}</text>",
            x(i),
            TOP + ph + 16.0,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&chart.y_label)
    );
    for (si, s) in chart.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
            match run.len() {
                0 => {}
                1 => {
                    let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>", run[0].0, run[0].1);
                }
                _ => {
                    let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                    let _ = writeln!(
                        out,
                        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
                        pts.join(" ")
                    );
                }
            }
            run.clear();
        };
        for (i, p) in s.points.iter().enumerate() {
            match p {
                Some(v) => run.push((x(i), y(*v))),
                None => flush(&mut run, &mut out),
            }
        }
        flush(&mut run, &mut out);
        let ly = TOP + 10.0 + 18.0 * si as f64;
        let lx = WIDTH - RIGHT + 14.0;
        let _ = writeln!(
            out,
            "<g class=\"legend\"><line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"3\"/><text x=\"{:.1}\" y=\"{:.1}\">{}</text></g>",
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn fmt_num(v: f64) -> String {
    if libm::fabs(v) >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// One labeled circle per topic with area proportional to its size.
pub fn render_topic_map(map: &TopicMap) -> Result<String> {
    let k = map.coords.len();
    if k == 0 || map.sizes.len() != k || map.labels.len() != k {
        return Err(Error::invalid("topic map fields must have matching nonzero lengths"));
    }
    if map.coords.iter().flatten().chain(&map.sizes).any(|v| !v.is_finite()) || map.sizes.iter().any(|s| *s < 0.0) {
        return Err(Error::NonFinite("topic map".into()));
    }
    const R_MAX: f64 = 60.0;
    let max_size = map.sizes.iter().fold(0.0f64, |a, &b| a.max(b));
    let radius = |s: f64| if max_size > 0.0 { R_MAX * libm::sqrt(s / max_size) } else { 0.0 };
    let side = HEIGHT - TOP - 20.0;
    let cx0 = WIDTH / 2.0;
    let cy0 = TOP + side / 2.0;
    let span = map
        .coords
        .iter()
        .flat_map(|c| [libm::fabs(c[0]), libm::fabs(c[1])])
        .fold(0.0f64, |a, b| a.max(b));
    let scale = if span > 1e-12 { (side / 2.0 - R_MAX) / span } else { 0.0 };

    let mut out = String::new();
    header(&mut out, "Intertopic distance map");
    let _ = writeln!(
        out,
        "<g stroke=\"#bbbbbb\"><line x1=\"{:.1}\" y1=\"{cy0:.1}\" x2=\"{:.1}\" y2=\"{cy0:.1}\"/><line x1=\"{cx0:.1}\" y1=\"{TOP:.1}\" x2=\"{cx0:.1}\" y2=\"{:.1}\"/></g>",
        cx0 - side / 2.0,
        cx0 + side / 2.0,
        TOP + side
    );
    let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">PC1</text>", cx0 + side / 2.0 - 20.0, cy0 - 4.0);
    let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">PC2</text>", cx0 + 4.0, TOP + 10.0);
    for (i, ((c, s), label)) in map.coords.iter().zip(&map.sizes).zip(&map.labels).enumerate() {
        let (px, py) = (cx0 + scale * c[0], cy0 - scale * c[1]);
        let _ = writeln!(
            out,
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{:.3}\" fill=\"{}\" fill-opacity=\"0.45\" stroke=\"#333333\"/>",
            radius(*s),
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(out, "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", py + 4.0, escape(label));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
