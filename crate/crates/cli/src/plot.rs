//! Static log-log SVG plots of decay series.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// What a single plot shows.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries<'a> {
    pub title: &'a str,
    pub times: &'a [f64],
    pub values: &'a [f64],
    /// Exponent of the `(1+t)^p` guide line, anchored at the first plotted point.
    pub theory_slope: Option<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, t: f64) -> f64 {
        LEFT + (t.log10() - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v.log10() - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

/// Renders a log-log plot. Nonpositive points cannot be drawn; a series with
/// fewer than two drawable points yields a placeholder.
pub fn render(series: &PlotSeries) -> String {
    let points: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(series.values)
        .filter(|(t, v)| **t > 0.0 && **v > 0.0 && t.is_finite() && v.is_finite())
        .map(|(t, v)| (*t, *v))
        .collect();
    let mut out = String::new();
    header(&mut out, series.title);
    if points.len() < 2 {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">zero series: nothing to plot</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        out.push_str("</svg>\n");
        return out;
    }

    let (t0, v0) = points[0];
    let guide = |t: f64, p: f64| v0 * ((1.0 + t) / (1.0 + t0)).powf(p);
    let mut ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let t_end = points[points.len() - 1].0;
    if let Some(p) = series.theory_slope {
        ys.push(guide(t_end, p).log10());
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let fold = |v: &[f64]| (v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (xl, xh) = fold(&xs);
    let (yl, yh) = fold(&ys);
    let axes = Axes { x: padded(xl, xh), y: padded(yl, yh) };

    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(out, r#"<g stroke="black" fill="none"><rect x="{x0}" y="{y1}" width="{}" height="{}"/></g>"#, x1 - x0, y0 - y1);
    for d in (axes.x.0.ceil() as i32)..=(axes.x.1.floor() as i32) {
        let x = axes.px(10f64.powi(d));
        let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#ddd"/>"##);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, y0 + 18.0);
    }
    for d in (axes.y.0.ceil() as i32)..=(axes.y.1.floor() as i32) {
        let y = axes.py(10f64.powi(d));
        let _ = writeln!(out, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, x0 - 6.0, y + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);

    let path: Vec<String> = points.iter().map(|&(t, v)| format!("{:.2},{:.2}", axes.px(t), axes.py(v))).collect();
    let _ = writeln!(out, r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="2" points="{}"/>"##, path.join(" "));
    if let Some(p) = series.theory_slope {
        let samples = 48;
        let (a, b) = (t0.ln(), t_end.ln());
        let line: Vec<String> = (0..=samples)
            .map(|j| {
                let t = (a + (b - a) * j as f64 / samples as f64).exp();
                format!("{:.2},{:.2}", axes.px(t), axes.py(guide(t, p)))
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline fill="none" stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 4" points="{}"/>"##,
            line.join(" ")
        );
        let _ = writeln!(out, r##"<text x="{}" y="{}" fill="#c0392b">(1+t)^{p}</text>"##, x1 - 120.0, y1 + 16.0);
    }
    out.push_str("</svg>\n");
    out
}
