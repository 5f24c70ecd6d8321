//! Minimal self-contained SVG scatter/line plots: fixed canvas, auto-fit
//! axes with round tick steps, no external assets.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 58.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Cross,
    Line,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub marker: Marker,
    pub color: &'static str,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.abs().log10().floor());
    let frac = raw / mag;
    let nice = if frac < 1.5 {
        1.0
    } else if frac < 3.5 {
        2.0
    } else if frac < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if hi <= lo || !hi.is_finite() || !lo.is_finite() {
        return vec![lo];
    }
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{x:.6e}");
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-3..6).contains(&exp) {
        let decimals = (6 - exp).max(0) as usize;
        let mut t = format!("{x:.decimals$}");
        if t.contains('.') {
            while t.ends_with('0') {
                t.pop();
            }
            if t.ends_with('.') {
                t.pop();
            }
        }
        t
    } else {
        let mut m = mant.trim_end_matches('0').trim_end_matches('.').to_string();
        if m.is_empty() {
            m = "0".into();
        }
        format!("{m}e{exp}")
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for &(x, y) in &s.points {
                x_lo = x_lo.min(x);
                x_hi = x_hi.max(x);
                y_lo = y_lo.min(y);
                y_hi = y_hi.max(y);
            }
        }
        if !x_lo.is_finite() {
            x_lo = 0.0;
            x_hi = 1.0;
            y_lo = 0.0;
            y_hi = 1.0;
        }
        if x_hi - x_lo < 1e-300 {
            x_lo -= 0.5;
            x_hi += 0.5;
        }
        if y_hi - y_lo < 1e-300 {
            y_lo -= 0.5;
            y_hi += 0.5;
        }
        let pad_x = (x_hi - x_lo) * 0.06;
        let pad_y = (y_hi - y_lo) * 0.06;
        x_lo -= pad_x;
        x_hi += pad_x;
        y_lo -= pad_y;
        y_hi += pad_y;

        let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = |y: f64| {
            HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)
        };

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="17">{}</text>"#,
            WIDTH / 2.0,
            xml_escape(&self.title)
        );

        // axes frame and grid
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{}" height="{}" fill="none" stroke="#444" stroke-width="1"/>"##,
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );
        for t in ticks(x_lo, x_hi) {
            let x = px(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{}" stroke="#ddd" stroke-width="1"/>"##,
                HEIGHT - MARGIN_B
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
                HEIGHT - MARGIN_B + 18.0,
                tick_label(t)
            );
        }
        for t in ticks(y_lo, y_hi) {
            let y = py(t);
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN_L}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd" stroke-width="1"/>"##,
                WIDTH - MARGIN_R
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="12">{}</text>"#,
                MARGIN_L - 8.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 14.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {})">{}</text>"#,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            xml_escape(&self.y_label)
        );

        for s in &self.series {
            match s.marker {
                Marker::Line => {
                    let mut path = String::new();
                    for (i, &(x, y)) in s.points.iter().enumerate() {
                        let _ = write!(
                            path,
                            "{}{:.2},{:.2} ",
                            if i == 0 { "M" } else { "L" },
                            px(x),
                            py(y)
                        );
                    }
                    let _ = writeln!(
                        out,
                        r#"<path d="{path}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                        s.color
                    );
                }
                Marker::Circle => {
                    for &(x, y) in &s.points {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3.4" fill="none" stroke="{}" stroke-width="1.4"/>"#,
                            px(x),
                            py(y),
                            s.color
                        );
                    }
                }
                Marker::Cross => {
                    for &(x, y) in &s.points {
                        let (cx, cy) = (px(x), py(y));
                        let _ = writeln!(
                            out,
                            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{}" stroke-width="1.4"/>"#,
                            cx - 3.2,
                            cy - 3.2,
                            cx + 3.2,
                            cy + 3.2,
                            cx - 3.2,
                            cy + 3.2,
                            cx + 3.2,
                            cy - 3.2,
                            s.color
                        );
                    }
                }
            }
        }

        // legend
        for (i, s) in self.series.iter().enumerate() {
            let y = MARGIN_T + 18.0 + 20.0 * i as f64;
            let x = WIDTH - MARGIN_R - 180.0;
            match s.marker {
                Marker::Line => {
                    let _ = writeln!(
                        out,
                        r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="1.5"/>"#,
                        x + 22.0,
                        s.color
                    );
                }
                Marker::Circle => {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{}" cy="{y}" r="3.4" fill="none" stroke="{}" stroke-width="1.4"/>"#,
                        x + 11.0,
                        s.color
                    );
                }
                Marker::Cross => {
                    let (cx, cy) = (x + 11.0, y);
                    let _ = writeln!(
                        out,
                        r#"<path d="M{},{} L{},{} M{},{} L{},{}" stroke="{}" stroke-width="1.4"/>"#,
                        cx - 3.2,
                        cy - 3.2,
                        cx + 3.2,
                        cy + 3.2,
                        cx - 3.2,
                        cy + 3.2,
                        cx + 3.2,
                        cy - 3.2,
                        s.color
                    );
                }
            }
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="13">{}</text>"#,
                x + 30.0,
                y + 4.0,
                xml_escape(&s.name)
            );
        }

        out.push_str("</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
