//! Log-log line plots written as plain SVG text.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(delta, value)` with both positive.
    pub points: Vec<(f64, f64)>,
    /// Slope of a dashed guide line drawn through the series' centroid.
    pub predicted_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const MARGIN: [f64; 4] = [70.0, 200.0, 40.0, 50.0]; // left, right, top, bottom
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

impl Plot {
    pub fn render(&self) -> String {
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, MARGIN[0] + plot_w() / 2.0, escape(&self.title));
        if pts.is_empty() {
            out.push_str("</svg>\n");
            return out;
        }
        let (mut x0, mut x1, mut y0, mut y1) = bounds(&pts);
        pad(&mut x0, &mut x1);
        pad(&mut y0, &mut y1);
        let sx = |x: f64| MARGIN[0] + (x - x0) / (x1 - x0) * plot_w();
        let sy = |y: f64| MARGIN[2] + (y1 - y) / (y1 - y0) * plot_h();

        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            MARGIN[0], MARGIN[2], plot_w(), plot_h()
        );
        for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
            let x = sx(e as f64);
            let _ = writeln!(out, r##"<line x1="{x:.1}" y1="{}" x2="{x:.1}" y2="{}" stroke="#ddd"/>"##, MARGIN[2], MARGIN[2] + plot_h());
            let _ = writeln!(out, r#"<text x="{x:.1}" y="{}" text-anchor="middle">1e{e}</text>"#, MARGIN[2] + plot_h() + 16.0);
        }
        for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
            let y = sy(e as f64);
            let _ = writeln!(out, r##"<line x1="{}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/>"##, MARGIN[0], MARGIN[0] + plot_w());
            let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{e}</text>"#, MARGIN[0] - 6.0, y + 4.0);
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">delta</text>"#, MARGIN[0] + plot_w() / 2.0, HEIGHT - 12.0);
        let _ = writeln!(
            out,
            r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            MARGIN[2] + plot_h() / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let logs: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect();
            if logs.is_empty() {
                continue;
            }
            let path: Vec<String> = logs.iter().map(|(x, y)| format!("{:.1},{:.1}", sx(*x), sy(*y))).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
            for (x, y) in &logs {
                let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, sx(*x), sy(*y));
            }
            if let Some(k) = s.predicted_slope {
                let n = logs.len() as f64;
                let (cx, cy) = (logs.iter().map(|p| p.0).sum::<f64>() / n, logs.iter().map(|p| p.1).sum::<f64>() / n);
                let (a, b) = (logs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min), logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max));
                let clip = |y: f64| y.clamp(y0, y1);
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-dasharray="5,4" opacity="0.7"/>"#,
                    sx(a),
                    sy(clip(cy + k * (a - cx))),
                    sx(b),
                    sy(clip(cy + k * (b - cx)))
                );
            }
            let ly = MARGIN[2] + 14.0 + 18.0 * i as f64;
            let lx = MARGIN[0] + plot_w() + 12.0;
            let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
            let guide = s.predicted_slope.map(|k| format!(" (slope {k:.3})")).unwrap_or_default();
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}{}</text>"#, lx + 24.0, ly + 4.0, escape(&s.label), guide);
        }
        out.push_str("</svg>\n");
        out
    }
}

fn plot_w() -> f64 {
    WIDTH - MARGIN[0] - MARGIN[1]
}

fn plot_h() -> f64 {
    HEIGHT - MARGIN[2] - MARGIN[3]
}

fn bounds(pts: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |b, (x, y)| {
        (b.0.min(*x), b.1.max(*x), b.2.min(*y), b.3.max(*y))
    })
}

fn pad(lo: &mut f64, hi: &mut f64) {
    let span = (*hi - *lo).max(0.5);
    *lo -= 0.05 * span;
    *hi += 0.05 * span;
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_guides() {
        let plot = Plot {
            name: "p".into(),
            title: "a < b".into(),
            y_label: "norm".into(),
            series: vec![Series {
                label: "x".into(),
                points: (3..=8).map(|k| 2f64.powi(-k)).map(|d| (d, d * d)).collect(),
                predicted_slope: Some(2.0),
            }],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg, plot.render());
    }
}
