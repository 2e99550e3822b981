//! Minimal SVG 1.1 line plots.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
    /// Short horizontal bars centred on each point (spectrum ladders).
    Rungs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>, style: Style) -> Series {
        Series { label: label.into(), points, style }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Dashed horizontal reference lines.
    pub h_lines: Vec<(f64, String)>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let t = if log { v.log10() } else { v };
            if t.is_finite() {
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.04 * (hi - lo);
        Axis { lo: lo - pad, hi: hi + pad, log }
    }

    fn map(&self, v: f64) -> Option<f64> {
        let t = if self.log { v.log10() } else { v };
        t.is_finite().then(|| (t - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let stride = ((b - a) / 6 + 1).max(1);
            return (a..=b).step_by(stride as usize).map(|e| 10f64.powi(e)).collect();
        }
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step + 1e-9).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let xs = Axis::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.log_x);
        let ys = Axis::fit(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| p.1))
                .chain(self.h_lines.iter().map(|h| h.0)),
            self.log_y,
        );
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let px = |x: f64| xs.map(x).map(|t| LEFT + t * pw);
        let py = |y: f64| ys.map(y).map(|t| TOP + (1.0 - t) * ph);
        let mut o = String::new();
        let _ = writeln!(o, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            o,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(o, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            esc(&self.title)
        );
        let _ = writeln!(
            o,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in xs.ticks() {
            if let Some(x) = px(t) {
                let _ = writeln!(o, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##, TOP + ph);
                let _ = writeln!(
                    o,
                    r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                    TOP + ph + 16.0,
                    tick_label(t)
                );
            }
        }
        for t in ys.ticks() {
            if let Some(y) = py(t) {
                let _ = writeln!(o, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + pw);
                let _ = writeln!(
                    o,
                    r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                    LEFT - 6.0,
                    y + 4.0,
                    tick_label(t)
                );
            }
        }
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 18.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            o,
            r#"<text x="18" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );
        for (y, label) in &self.h_lines {
            if let Some(y) = py(*y) {
                let _ = writeln!(
                    o,
                    r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#555555" stroke-dasharray="4 3"/>"##,
                    LEFT + pw
                );
                let _ = writeln!(
                    o,
                    r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                    LEFT + pw + 4.0,
                    y + 4.0,
                    esc(label)
                );
            }
        }
        let rung = 0.03 * pw;
        for (k, s) in self.series.iter().enumerate() {
            let c = COLORS[k % COLORS.len()];
            let pts: Vec<(f64, f64)> = s.points.iter().filter_map(|(x, y)| Some((px(*x)?, py(*y)?))).collect();
            match s.style {
                Style::Line => {
                    if pts.len() > 1 {
                        let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                        let _ = writeln!(
                            o,
                            r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
                            d.join(" ")
                        );
                    }
                }
                Style::Markers => {
                    for (x, y) in &pts {
                        let _ = writeln!(o, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{c}"/>"#);
                    }
                }
                Style::Rungs => {
                    for (x, y) in &pts {
                        let _ = writeln!(
                            o,
                            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{c}" stroke-width="2"/>"#,
                            x - rung,
                            x + rung
                        );
                    }
                }
            }
            let ly = TOP + 14.0 + 18.0 * k as f64;
            let lx = LEFT + pw + 10.0;
            let _ = writeln!(o, r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="4" fill="{c}"/>"#, ly - 4.0);
            let _ = writeln!(
                o,
                r#"<text x="{:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                lx + 16.0,
                esc(&s.label)
            );
        }
        o.push_str("</svg>\n");
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_all_series() {
        let p = Plot {
            title: "t < 1".into(),
            log_y: true,
            series: vec![
                Series::new("a", vec![(1.0, 1.0), (2.0, 0.1), (3.0, -1.0)], Style::Line),
                Series::new("b", vec![(1.0, 0.5)], Style::Markers),
            ],
            ..Plot::default()
        };
        let s = p.render();
        assert!(s.starts_with("<?xml"));
        assert!(s.contains("version=\"1.1\""));
        assert!(s.contains("t &lt; 1"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert_eq!(s.matches("<circle").count(), 1);
        assert!(s.ends_with("</svg>\n"));
    }

    #[test]
    fn linear_ticks_are_round() {
        let a = Axis { lo: -0.13, hi: 1.07, log: false };
        assert_eq!(a.ticks(), vec![0.0, 0.5, 1.0]);
        let b = Axis { lo: 3.0, hi: 17.0, log: false };
        assert_eq!(b.ticks(), vec![5.0, 10.0, 15.0]);
    }
}
