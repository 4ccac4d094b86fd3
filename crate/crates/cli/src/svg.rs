//! Minimal self-contained SVG line plots: axes, ticks, labels, legend, error bars.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Style {
    Solid,
    Dashed,
    /// Markers with vertical error bars; the third value of each point is the half-height.
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub style: Style,
    /// `(x, y, y_err)`; `y_err` is ignored for lines.
    pub points: Vec<(f64, f64, f64)>,
}

impl Series {
    pub fn line(
        label: impl Into<String>,
        color: &'static str,
        style: Style,
        xy: impl IntoIterator<Item = (f64, f64)>,
    ) -> Self {
        Self {
            label: label.into(),
            color,
            style,
            points: xy.into_iter().map(|(x, y)| (x, y, 0.0)).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Tick positions with a 1-2-5 step covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        // shortest of a few fixed precisions that reproduces the tick
        (0..6)
            .map(|p| format!("{v:.p$}"))
            .find(|s| (s.parse::<f64>().unwrap() - v).abs() <= 1e-9 * a.max(1e-12))
            .unwrap_or_else(|| format!("{v}"))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

impl Plot {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let finite = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y, e) in finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y - e.abs());
            y1 = y1.max(y + e.abs());
        }
        if !x0.is_finite() {
            return ((0.0, 1.0), (0.0, 1.0));
        }
        let x = if x1 > x0 { (x0, x1) } else { padded(x0, x1) };
        (x, padded(y0, y1))
    }

    /// Render the plot. With `timestamp` a generation-time comment is added after the
    /// XML declaration; everything else depends only on the data.
    pub fn render(&self, timestamp: bool) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        if timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(out, "<!-- generated at unix time {secs} -->");
        }
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(
            out,
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            LEFT + pw / 2.0,
            escape(&self.title)
        );

        // grid and ticks
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                out,
                "<line x1=\"{x:.2}\" y1=\"{TOP}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#e5e5e5\"/>",
                TOP + ph
            );
            let _ = writeln!(
                out,
                "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                TOP + ph + 18.0,
                tick_label(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                out,
                "<line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e5e5e5\"/>",
                LEFT + pw
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                LEFT - 6.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            LEFT + pw / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text transform=\"translate(20 {:.1}) rotate(-90)\" text-anchor=\"middle\">{}</text>",
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        let _ = writeln!(
            out,
            "<clipPath id=\"plot-area\"><rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\"/></clipPath>"
        );
        out.push_str("<g clip-path=\"url(#plot-area)\">\n");
        for s in &self.series {
            let pts = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite());
            match s.style {
                Style::Solid | Style::Dashed => {
                    let path: Vec<String> = pts
                        .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
                        .collect();
                    let dash = if s.style == Style::Dashed {
                        " stroke-dasharray=\"6 4\""
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{dash} points=\"{}\"/>",
                        s.color,
                        path.join(" ")
                    );
                }
                Style::Markers => {
                    for &(x, y, e) in pts {
                        let (px, py) = (sx(x), sy(y));
                        if e > 0.0 {
                            let _ = writeln!(
                                out,
                                "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"{}\"/>",
                                sy(y - e),
                                sy(y + e),
                                s.color
                            );
                        }
                        let _ = writeln!(
                            out,
                            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{}\"/>",
                            s.color
                        );
                    }
                }
            }
        }
        out.push_str("</g>\n");

        // legend
        let lx = LEFT + pw + 14.0;
        for (i, s) in self.series.iter().enumerate() {
            let y = TOP + 10.0 + 20.0 * i as f64;
            match s.style {
                Style::Markers => {
                    let _ = writeln!(
                        out,
                        "<circle cx=\"{:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"{}\"/>",
                        lx + 12.0,
                        s.color
                    );
                }
                style => {
                    let dash = if style == Style::Dashed {
                        " stroke-dasharray=\"6 4\""
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        "<line x1=\"{lx:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"{}\" stroke-width=\"1.8\"{dash}/>",
                        lx + 24.0,
                        s.color
                    );
                }
            }
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
                lx + 30.0,
                y + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_range_with_round_steps() {
        assert_eq!(
            ticks(0.0, 60.0),
            vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]
        );
        let t = ticks(-3.1, 9.4);
        assert_eq!(t.first(), Some(&-2.0));
        assert_eq!(t.last(), Some(&8.0));
    }

    #[test]
    fn labels_are_short() {
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(2.5), "2.5");
        assert_eq!(tick_label(-0.2), "-0.2");
        assert_eq!(tick_label(3e6), "3.0e6");
    }

    #[test]
    fn timestamp_is_the_only_difference() {
        let mut plot = Plot::new("t", "x", "y <dB>");
        plot.series.push(Series::line(
            "a",
            PALETTE[0],
            Style::Solid,
            [(0.0, 1.0), (1.0, 2.0)],
        ));
        let a = plot.render(false);
        let b = plot.render(true);
        assert!(a.contains("y &lt;dB&gt;"));
        let stripped: String = b
            .lines()
            .filter(|l| !l.starts_with("<!--"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(a, stripped);
    }
}
