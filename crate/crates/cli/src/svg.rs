//! Minimal self-contained SVG plots: axes, bars or polylines, a caption.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const COLORS: [&str; 4] = ["#1f4e99", "#c0392b", "#27ae60", "#7f4f9f"];

pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub dashed: bool,
}

pub struct Bars<'a> {
    pub edges: &'a [f64],
    pub heights: &'a [f64],
}

pub struct Plot<'a> {
    pub title: String,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub bars: Option<Bars<'a>>,
    pub series: Vec<Series<'a>>,
    /// Horizontal reference lines `(y, label)`.
    pub refs: Vec<(f64, String)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let xs = self
            .series
            .iter()
            .flat_map(|s| s.xs.iter().copied())
            .chain(self.bars.iter().flat_map(|b| b.edges.iter().copied()));
        let (x0, x1) = extent(xs);
        let ys = self
            .series
            .iter()
            .flat_map(|s| s.ys.iter().copied())
            .chain(self.bars.iter().flat_map(|b| b.heights.iter().copied()))
            .chain(self.refs.iter().map(|r| r.0))
            .chain(self.bars.as_ref().map(|_| 0.0));
        let (mut y0, mut y1) = extent(ys);
        let pad = 0.05 * (y1 - y0);
        y1 += pad;
        if self.bars.is_none() {
            y0 -= pad;
        }

        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );

        if let Some(b) = &self.bars {
            for (k, &h) in b.heights.iter().enumerate() {
                let (xa, xb) = (sx(b.edges[k]), sx(b.edges[k + 1]));
                let (ya, yb) = (sy(h.max(y0)), sy(0.0f64.max(y0)));
                let _ = writeln!(
                    s,
                    r##"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="#9db4d6" stroke="#1f4e99" stroke-width="0.5"/>"##,
                    (xb - xa).max(0.0),
                    (yb - ya).max(0.0)
                );
            }
        }
        for (y, label) in &self.refs {
            let py = sy(*y);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#888" stroke-dasharray="2,3"/>"##,
                W - RIGHT
            );
            let _ = writeln!(
                s,
                r##"<text x="{}" y="{:.2}" text-anchor="end" fill="#555">{}</text>"##,
                W - RIGHT - 4.0,
                py - 4.0,
                escape(label)
            );
        }
        for (k, ser) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let pts: Vec<String> = ser
                .xs
                .iter()
                .zip(ser.ys)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if ser.dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                pts.join(" ")
            );
            let ly = TOP + 14.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                LEFT + 10.0,
                LEFT + 34.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{}</text>"#,
                LEFT + 40.0,
                ly + 4.0,
                escape(ser.label)
            );
        }

        // axes and ticks
        let _ = writeln!(
            s,
            r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
            H - BOTTOM,
            W - RIGHT
        );
        for i in 0..=4 {
            let fx = x0 + (x1 - x0) * i as f64 / 4.0;
            let fy = y0 + (y1 - y0) * i as f64 / 4.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
                H - BOTTOM,
                H - BOTTOM + 5.0,
                H - BOTTOM + 18.0,
                tick(fx)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 12.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(self.y_label)
        );
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let t = format!("{v:.3}");
        let t = t.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" { "0".into() } else { t.into() }
    }
}
