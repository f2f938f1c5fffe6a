//! Self-contained SVG scatter plots on a 1600×900 canvas.

use std::fmt::Write;

pub const WIDTH: f64 = 1600.0;
pub const HEIGHT: f64 = 900.0;
const MARGIN: f64 = 70.0;

/// A vertical marker line at `x` with a stroke color.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub points: Vec<(f64, f64)>,
    pub markers: Vec<Marker>,
    pub point_radius: f64,
}

impl SvgPlot {
    /// Ranges are taken from the finite points, padded when degenerate.
    pub fn new(title: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        let finite = points.iter().filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        SvgPlot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            x_range: pad(x0, x1),
            y_range: pad(y0, y1),
            points,
            markers: Vec::new(),
            point_radius: 0.8,
        }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        let _ = writeln!(s, r#"<text x="{}" y="40" font-size="22" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="18" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 20.0, escape(&self.x_label));
        let _ = writeln!(s, r#"<text x="20" y="{}" font-size="18" transform="rotate(-90 20 {})" text-anchor="middle">{}</text>"#, HEIGHT / 2.0, HEIGHT / 2.0, escape(&self.y_label));
        for k in 0..=4 {
            let fx = self.x_range.0 + (self.x_range.1 - self.x_range.0) * k as f64 / 4.0;
            let fy = self.y_range.0 + (self.y_range.1 - self.y_range.0) * k as f64 / 4.0;
            let _ = writeln!(s, r#"<text x="{:.1}" y="{}" font-size="14" text-anchor="middle">{}</text>"#, self.sx(fx), b + 20.0, tick(fx));
            let _ = writeln!(s, r#"<text x="{}" y="{:.1}" font-size="14" text-anchor="end">{}</text>"#, l - 6.0, self.sy(fy) + 5.0, tick(fy));
        }
        for m in &self.markers {
            if m.x >= self.x_range.0 && m.x <= self.x_range.1 {
                let x = self.sx(m.x);
                let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{t}" x2="{x:.2}" y2="{b}" stroke="{}" stroke-width="0.8"/>"#, m.color);
            }
        }
        let _ = writeln!(s, "<g fill=\"black\">");
        for &(x, y) in &self.points {
            if x.is_finite() && y.is_finite() {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{}"/>"#, self.sx(x), self.sy(y), self.point_radius);
            }
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn pad(a: f64, b: f64) -> (f64, f64) {
    if b > a {
        let d = (b - a) * 0.02;
        (a - d, b + d)
    } else {
        let d = a.abs().max(1.0) * 1e-3;
        (a - d, a + d)
    }
}

fn tick(v: f64) -> String {
    format!("{v:.4e}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_and_markers() {
        let mut p = SvgPlot::new("t", "r", "theta", vec![(0.1, 1.0), (0.2, 2.0), (f64::NAN, 0.0)]);
        p.markers.push(Marker { x: 0.15, color: "blue" });
        let s = p.render();
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<circle").count(), 2);
        assert_eq!(s.matches("stroke=\"blue\"").count(), 1);
        assert!(s.contains("width=\"1600\""));
    }
}
