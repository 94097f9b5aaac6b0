//! Minimal static SVG plots: scatter panels and line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.h - (y - self.y0) / (self.y1 - self.y0) * self.h
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.03 * (hi - lo);
    (lo - pad, hi + pad)
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        f.left, f.top, f.w, f.h
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = f.x0 + t * (f.x1 - f.x0);
        let yv = f.y0 + t * (f.y1 - f.y0);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            f.px(xv),
            f.top + f.h + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            f.left - 4.0,
            f.py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        f.left + f.w / 2.0,
        f.top + f.h + 34.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        f.top + f.h / 2.0,
        f.top + f.h / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Side-by-side scatter panels sharing axis labels; each panel has its own
/// ranges.
pub fn scatter_panels(title: &str, xlabel: &str, ylabel: &str, panels: &[Panel<'_>]) -> String {
    let n = panels.len().max(1) as f64;
    let width = WIDTH * n;
    let mut out = String::new();
    header(&mut out, width, HEIGHT, title);
    for (k, panel) in panels.iter().enumerate() {
        let (x0, x1) = range(panel.points.iter().map(|p| p.0));
        let (y0, y1) = range(panel.points.iter().map(|p| p.1));
        let f = Frame {
            x0,
            x1,
            y0,
            y1,
            left: k as f64 * WIDTH + MARGIN + 10.0,
            top: 40.0,
            w: WIDTH - 2.0 * MARGIN,
            h: HEIGHT - MARGIN - 48.0,
        };
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="36" text-anchor="middle">{} (n={})</text>"#,
            f.left + f.w / 2.0,
            escape(panel.title),
            panel.points.len()
        );
        axes(&mut out, &f, xlabel, ylabel);
        let _ = writeln!(out, r#"<g fill="{}">"#, PALETTE[k % PALETTE.len()]);
        for &(x, y) in panel.points {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1"/>"#, f.px(x), f.py(y));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Line chart with a legend.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series<'_>], marks: &[(f64, &str)]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(all().map(|p| p.0));
    let (y0, y1) = range(all().map(|p| p.1));
    let f = Frame {
        x0,
        x1,
        y0,
        y1,
        left: MARGIN + 10.0,
        top: 40.0,
        w: WIDTH - 2.0 * MARGIN,
        h: HEIGHT - MARGIN - 48.0,
    };
    let mut out = String::new();
    header(&mut out, WIDTH, HEIGHT, title);
    axes(&mut out, &f, xlabel, ylabel);
    for &(x, label) in marks {
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            f.px(x),
            f.top,
            f.top + f.h
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="gray">{}</text>"#,
            f.px(x) + 3.0,
            f.top + 12.0,
            escape(label)
        );
    }
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = f.top + 16.0 + 16.0 * k as f64;
        let lx = f.left + f.w - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_is_well_formed() {
        let pts = [(0.0, 0.0), (1.0, 2.0)];
        let svg = scatter_panels("t", "y", "w", &[Panel { title: "a", points: &pts }]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn line_chart_handles_constant_series() {
        let pts = [(0.0, 3.0), (1.0, 3.0)];
        let svg = line_chart("t", "b", "d", &[Series { label: "D<1>", points: &pts }], &[(0.5, "seam")]);
        assert!(svg.contains("D&lt;1&gt;"));
        assert!(!svg.contains("NaN"));
    }
}
