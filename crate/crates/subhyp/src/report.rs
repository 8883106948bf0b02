//! Report envelope and SVG rendering. JSON is the canonical output: field
//! order is fixed by the struct definitions and runs with identical configs
//! and seeds serialize byte-identically. SVG is presentational only.

use crate::geometry::{Cube, PlanarDomain, Point};
use crate::metric::ParamCurve;
use serde::Serialize;

/// Envelope for every CLI report: command, the identifier of the statement
/// the command exercises, the full configuration echo, the seed, and the grid
/// resolutions that were used.
#[derive(Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub command: String,
    pub statement: String,
    pub seed: u64,
    pub resolutions: Vec<f64>,
    pub config: C,
    pub result: R,
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

/// Minimal SVG canvas over a domain's bounding box; y grows upward.
pub struct Svg {
    min: Point,
    scale: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(domain: &PlanarDomain) -> Svg {
        let bbox = domain.bbox();
        let margin = 0.05 * bbox.width().max(bbox.height());
        let min = Point::new(bbox.min.x - margin, bbox.min.y - margin);
        let w = bbox.width() + 2.0 * margin;
        let h = bbox.height() + 2.0 * margin;
        let scale = 800.0 / w.max(h);
        Svg { min, scale, height: h * scale, body: String::new() }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        ((p.x - self.min.x) * self.scale, self.height - (p.y - self.min.y) * self.scale)
    }

    fn path_of(&self, pts: &[Point], close: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            d.push_str(if i == 0 { "M" } else { "L" });
            d.push_str(&format!("{x:.2},{y:.2} "));
        }
        if close {
            d.push('Z');
        }
        d
    }

    pub fn domain(&mut self, domain: &PlanarDomain) {
        let mut d = self.path_of(domain.outer(), true);
        for hole in domain.holes() {
            d.push(' ');
            d.push_str(&self.path_of(hole, true));
        }
        self.body.push_str(&format!(
            "<path d=\"{d}\" fill=\"#e8ecf4\" stroke=\"#46506b\" stroke-width=\"1.5\" fill-rule=\"evenodd\"/>\n"
        ));
    }

    pub fn polyline(&mut self, pts: &[Point], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let d = self.path_of(pts, false);
        self.body.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n"
        ));
    }

    pub fn curve(&mut self, curve: &ParamCurve, color: &str) {
        self.polyline(curve.vertices(), color, 2.0);
    }

    /// Highlighted sub-arcs of a curve given by arclength intervals.
    pub fn curve_segments(&mut self, curve: &ParamCurve, spans: &[(f64, f64)], color: &str) {
        for &(lo, hi) in spans {
            let n = 24;
            let pts: Vec<Point> = (0..=n)
                .map(|i| curve.point_at(lo + (hi - lo) * i as f64 / n as f64))
                .collect();
            self.polyline(&pts, color, 3.0);
        }
    }

    pub fn cube(&mut self, cube: &Cube, color: &str, width: f64) {
        let (x, y) = self.map(Point::new(cube.center.x - cube.radius, cube.center.y + cube.radius));
        let side = 2.0 * cube.radius * self.scale;
        self.body.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{side:.2}\" height=\"{side:.2}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n"
        ));
    }

    pub fn dot(&mut self, p: Point, color: &str) {
        let (x, y) = self.map(p);
        self.body
            .push_str(&format!("<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{color}\"/>\n"));
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"{:.0}\" viewBox=\"0 0 800 {:.0}\">\n{}</svg>\n",
            self.height.ceil(),
            self.height.ceil(),
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::Norm;

    #[test]
    fn svg_renders_domain_and_curve() {
        let sq = catalog::square();
        let curve = ParamCurve::new(
            &sq,
            vec![Point::new(0.2, 0.2), Point::new(0.8, 0.5)],
            Norm::Euclidean,
        )
        .unwrap();
        let mut svg = Svg::new(&sq);
        svg.domain(&sq);
        svg.curve(&curve, "#c0392b");
        svg.cube(&Cube { center: Point::new(0.5, 0.5), radius: 0.1 }, "#2980b9", 1.0);
        svg.dot(Point::new(0.2, 0.2), "#000");
        let out = svg.finish();
        assert!(out.starts_with("<svg"));
        assert!(out.contains("<rect"));
        assert!(out.ends_with("</svg>\n"));
    }

    #[test]
    fn json_rendering_is_stable() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            b: Vec<u32>,
        }
        let rep = Report {
            command: "demo".into(),
            statement: "none".into(),
            seed: 17,
            resolutions: vec![0.25],
            config: R { a: 0.1, b: vec![1, 2] },
            result: 42u32,
        };
        let one = render_json(&rep);
        let two = render_json(&rep);
        assert_eq!(one, two);
        assert!(one.contains("\"command\": \"demo\""));
    }
}
