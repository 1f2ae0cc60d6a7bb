//! Minimal self-contained SVG line plots.
//!
//! Each series is also written as an XML comment
//! `<!-- series name="..." points="x,y;x,y;..." -->` so the numbers can be
//! read back without parsing the geometry.

use std::fmt::Write;

use limitcycle::format::sig12;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    Dots,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// Non-finite points split the polyline.
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self {
            name: name.into(),
            points,
            style,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Same scale on both axes (phase portraits).
    pub equal_aspect: bool,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Self::default()
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn to_svg(&self) -> String {
        let (mut x0, mut x1, mut y0, mut y1) = self.bounds();
        let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);
        if self.equal_aspect {
            let scale = ((x1 - x0) / pw).max((y1 - y0) / ph);
            let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
            x0 = cx - scale * pw / 2.0;
            x1 = cx + scale * pw / 2.0;
            y0 = cy - scale * ph / 2.0;
            y1 = cy + scale * ph / 2.0;
        }
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, "<title>{}</title>", escape(&self.title));
        for series in &self.series {
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{},{}", sig12(x), sig12(y)))
                .collect();
            let _ = writeln!(
                s,
                "<!-- series name=\"{}\" points=\"{}\" -->",
                comment_safe(&series.name),
                pts.join(";")
            );
        }
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{b2}" stroke="black"/><text x="{x:.2}" y="{ty}" text-anchor="middle">{}</text>"#,
                sig(t),
                b = MARGIN_T + ph,
                b2 = MARGIN_T + ph + 5.0,
                ty = MARGIN_T + ph + 18.0
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r#"<line x1="{l2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{}</text>"#,
                sig(t),
                l2 = MARGIN_L - 5.0,
                tx = MARGIN_L - 8.0,
                ty = y + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_L + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
            escape(&self.y_label),
            y = MARGIN_T + ph / 2.0
        );
        let _ = writeln!(
            s,
            r#"<clipPath id="plot"><rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}"/></clipPath>"#
        );
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let dash = match series.style {
                Style::Dashed => r#" stroke-dasharray="6 4""#,
                _ => "",
            };
            if series.style == Style::Dots {
                for &(x, y) in series.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}" clip-path="url(#plot)"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
            } else {
                for run in series.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
                    if run.len() < 2 {
                        continue;
                    }
                    let pts: Vec<String> = run
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash} clip-path="url(#plot)"/>"#,
                        pts.join(" ")
                    );
                }
            }
            let ly = MARGIN_T + 14.0 + 18.0 * i as f64;
            let lx = WIDTH - MARGIN_R + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
                lx + 24.0,
                lx + 30.0,
                ly + 4.0,
                escape(&series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| {
            let d = if b > a { 0.05 * (b - a) } else { 0.5 * a.abs().max(1.0) };
            (a - d, b + d)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        (x0, x1, y0, y1)
    }
}

/// Round tick positions inside `[a, b]`.
fn ticks(a: f64, b: f64) -> Vec<f64> {
    let raw = (b - a) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (a / step).ceil() as i64;
    let last = (b / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn sig(x: f64) -> String {
    if x.abs() < 1e-12 {
        "0".into()
    } else {
        limitcycle::format::sig(x, 6)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn comment_safe(s: &str) -> String {
    escape(s).replace("--", "- -").replace('"', "'")
}

/// Reads back the `series` metadata comments: `(name, points)`.
pub fn parse_series(svg: &str) -> Vec<(String, Vec<(f64, f64)>)> {
    svg.lines()
        .filter_map(|l| l.trim().strip_prefix("<!-- series name=\""))
        .filter_map(|rest| {
            let (name, rest) = rest.split_once("\" points=\"")?;
            let (pts, _) = rest.split_once('"')?;
            let points = pts
                .split(';')
                .filter(|p| !p.is_empty())
                .filter_map(|p| {
                    let (x, y) = p.split_once(',')?;
                    Some((x.parse().ok()?, y.parse().ok()?))
                })
                .collect();
            Some((name.to_string(), points))
        })
        .collect()
}
