//! Planar domain representation: polygons with holes, membership tests and
//! exact boundary-distance queries in the Euclidean and uniform norms.

mod diagnostics;
mod field;

pub use diagnostics::{largest_inscribed_ball, regularity_constants, InscribedBall, RegularityEstimate};
pub use field::DistanceField;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point, norm: Norm) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        match norm {
            Norm::Euclidean => dx.hypot(dy),
            Norm::Uniform => dx.abs().max(dy.abs()),
        }
    }

    /// Euclidean distance; arclength is always measured in this norm.
    pub fn dist_euclid(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

/// Which norm measures point separations and boundary distances.
///
/// Cube-based constructions use the uniform norm, where cubes are balls;
/// metric and certification defaults are Euclidean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    Euclidean,
    Uniform,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }
    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
    pub fn diam(&self, norm: Norm) -> f64 {
        self.min.dist(self.max, norm)
    }
}

/// Closed axis-parallel cube `Q(center, r)`: the uniform-norm ball of radius
/// `r` (half the side length).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cube {
    pub center: Point,
    pub radius: f64,
}

impl Cube {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("cube radius must be positive, got {radius}")));
        }
        Ok(Cube { center, radius })
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dist(self.center, Norm::Uniform) <= self.radius
    }

    pub fn dilate(&self, factor: f64) -> Cube {
        Cube { center: self.center, radius: self.radius * factor }
    }

    pub fn corners(&self) -> [Point; 4] {
        let r = self.radius;
        let c = self.center;
        [
            Point::new(c.x - r, c.y - r),
            Point::new(c.x + r, c.y - r),
            Point::new(c.x + r, c.y + r),
            Point::new(c.x - r, c.y + r),
        ]
    }

    pub fn intersects(&self, other: &Cube) -> bool {
        self.center.dist(other.center, Norm::Uniform) <= self.radius + other.radius
    }

    /// Center of the intersection box of two overlapping cubes.
    pub fn intersection_center(&self, other: &Cube) -> Option<Point> {
        let lo_x = (self.center.x - self.radius).max(other.center.x - other.radius);
        let hi_x = (self.center.x + self.radius).min(other.center.x + other.radius);
        let lo_y = (self.center.y - self.radius).max(other.center.y - other.radius);
        let hi_y = (self.center.y + self.radius).min(other.center.y + other.radius);
        if lo_x > hi_x || lo_y > hi_y {
            return None;
        }
        Some(Point::new(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)))
    }

    /// Lebesgue measure of the full cube, `(2r)^2`.
    pub fn measure(&self) -> f64 {
        let s = 2.0 * self.radius;
        s * s
    }
}

/// Distance from `p` to the segment `[a, b]` in the Euclidean norm.
pub fn point_segment_dist_euclid(p: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist_euclid(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist_euclid(Point::new(a.x + t * dx, a.y + t * dy))
}

/// Distance from `p` to the segment `[a, b]` in the uniform norm.
///
/// The objective max(|qx − t dx|, |qy − t dy|) is convex piecewise linear in
/// t, so the minimum over [0, 1] is attained at an endpoint, at a zero of one
/// branch, or where the two branches cross; all candidates are enumerated.
pub fn point_segment_dist_uniform(p: Point, a: Point, b: Point) -> f64 {
    let qx = p.x - a.x;
    let qy = p.y - a.y;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let eval = |t: f64| (qx - t * dx).abs().max((qy - t * dy).abs());
    let mut best = eval(0.0).min(eval(1.0));
    let mut try_t = |t: f64| {
        if t > 0.0 && t < 1.0 {
            let v = eval(t);
            if v < best {
                best = v;
            }
        }
    };
    if dx != 0.0 {
        try_t(qx / dx);
    }
    if dy != 0.0 {
        try_t(qy / dy);
    }
    if dx != dy {
        try_t((qx - qy) / (dx - dy));
    }
    if dx + dy != 0.0 {
        try_t((qx + qy) / (dx + dy));
    }
    best
}

pub fn point_segment_dist(p: Point, a: Point, b: Point, norm: Norm) -> f64 {
    match norm {
        Norm::Euclidean => point_segment_dist_euclid(p, a, b),
        Norm::Uniform => point_segment_dist_uniform(p, a, b),
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment_collinear(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Whether segments [a,b] and [c,d] intersect (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment_collinear(c, d, a))
        || (d2 == 0.0 && on_segment_collinear(c, d, b))
        || (d3 == 0.0 && on_segment_collinear(a, b, c))
        || (d4 == 0.0 && on_segment_collinear(a, b, d))
}

#[derive(Clone, Debug)]
struct Segment {
    a: Point,
    b: Point,
    // axis-aligned bounds, for early rejection in distance queries
    lo: Point,
    hi: Point,
}

impl Segment {
    fn new(a: Point, b: Point) -> Self {
        Segment {
            a,
            b,
            lo: Point::new(a.x.min(b.x), a.y.min(b.y)),
            hi: Point::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    fn bbox_dist_lower(&self, p: Point, norm: Norm) -> f64 {
        let dx = (self.lo.x - p.x).max(p.x - self.hi.x).max(0.0);
        let dy = (self.lo.y - p.y).max(p.y - self.hi.y).max(0.0);
        match norm {
            Norm::Euclidean => dx.hypot(dy),
            Norm::Uniform => dx.max(dy),
        }
    }
}

fn ring_signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Even-odd crossing parity of `p` against a closed ring. Points exactly on
/// the boundary are ambiguous here; callers screen those with a distance test.
fn ring_parity(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn validate_ring(ring: &[Point], label: &str) -> Result<()> {
    if ring.len() < 3 {
        return Err(Error::InvalidDomain(format!("{label}: needs at least 3 vertices")));
    }
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if a == b {
            return Err(Error::InvalidDomain(format!("{label}: zero-length edge at vertex {i}")));
        }
        if !a.x.is_finite() || !a.y.is_finite() {
            return Err(Error::InvalidDomain(format!("{label}: non-finite vertex {i}")));
        }
    }
    // simplicity: no two non-adjacent edges intersect
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for j in (i + 1)..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidDomain(format!(
                    "{label}: edges {i} and {j} intersect (polygon not simple)"
                )));
            }
        }
    }
    Ok(())
}

/// A bounded planar domain Ω: the interior of a simple polygon minus a finite
/// set of closed polygonal holes. The outer ring is counterclockwise, holes
/// are clockwise.
#[derive(Clone, Debug)]
pub struct PlanarDomain {
    pub name: String,
    outer: Vec<Point>,
    holes: Vec<Vec<Point>>,
    segments: Vec<Segment>,
    bbox: BoundingBox,
}

/// Serialized form of a domain file.
#[derive(Serialize, Deserialize)]
pub struct DomainFile {
    pub name: String,
    pub outer: Vec<[f64; 2]>,
    #[serde(default)]
    pub holes: Vec<Vec<[f64; 2]>>,
}

impl PlanarDomain {
    pub fn new(name: &str, outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Result<Self> {
        Self::with_check_resolution(name, outer, holes, None)
    }

    /// Construct and validate; `check_h` sets the flood-fill resolution for
    /// the connectivity check (default: bounding box / 256). Disconnection at
    /// finer scales than the check resolution is the caller's risk.
    pub fn with_check_resolution(
        name: &str,
        outer: Vec<Point>,
        holes: Vec<Vec<Point>>,
        check_h: Option<f64>,
    ) -> Result<Self> {
        validate_ring(&outer, "outer")?;
        if ring_signed_area(&outer) <= 0.0 {
            return Err(Error::InvalidDomain("outer ring must be counterclockwise".into()));
        }
        for (hi, hole) in holes.iter().enumerate() {
            validate_ring(hole, &format!("hole {hi}"))?;
            if ring_signed_area(hole) >= 0.0 {
                return Err(Error::InvalidDomain(format!("hole {hi} must be clockwise")));
            }
            for v in hole {
                if !ring_parity(&outer, *v) {
                    return Err(Error::InvalidDomain(format!("hole {hi} is not inside the outer ring")));
                }
            }
            for i in 0..hole.len() {
                let (a, b) = (hole[i], hole[(i + 1) % hole.len()]);
                for j in 0..outer.len() {
                    let (c, d) = (outer[j], outer[(j + 1) % outer.len()]);
                    if segments_intersect(a, b, c, d) {
                        return Err(Error::InvalidDomain(format!("hole {hi} touches the outer ring")));
                    }
                }
            }
        }
        for i in 0..holes.len() {
            for j in (i + 1)..holes.len() {
                for ei in 0..holes[i].len() {
                    let (a, b) = (holes[i][ei], holes[i][(ei + 1) % holes[i].len()]);
                    for ej in 0..holes[j].len() {
                        let (c, d) = (holes[j][ej], holes[j][(ej + 1) % holes[j].len()]);
                        if segments_intersect(a, b, c, d) {
                            return Err(Error::InvalidDomain(format!("holes {i} and {j} intersect")));
                        }
                    }
                }
                if ring_parity(&holes[j], holes[i][0]) || ring_parity(&holes[i], holes[j][0]) {
                    return Err(Error::InvalidDomain(format!("holes {i} and {j} are nested")));
                }
            }
        }

        let mut segments = Vec::new();
        for i in 0..outer.len() {
            segments.push(Segment::new(outer[i], outer[(i + 1) % outer.len()]));
        }
        for hole in &holes {
            for i in 0..hole.len() {
                segments.push(Segment::new(hole[i], hole[(i + 1) % hole.len()]));
            }
        }
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &outer {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        let domain = PlanarDomain {
            name: name.to_string(),
            outer,
            holes,
            segments,
            bbox: BoundingBox { min, max },
        };
        domain.check_connected(check_h)?;
        Ok(domain)
    }

    /// Flood fill on the inside mask at the check resolution. Stray components
    /// carrying less than 1% of the inside cells are tolerated (unresolved
    /// slivers near cusps and corners).
    fn check_connected(&self, check_h: Option<f64>) -> Result<()> {
        let h = check_h.unwrap_or_else(|| self.bbox.width().max(self.bbox.height()) / 256.0);
        if !(h > 0.0) {
            return Err(Error::InvalidDomain("degenerate bounding box".into()));
        }
        let nx = (self.bbox.width() / h).ceil() as usize + 1;
        let ny = (self.bbox.height() / h).ceil() as usize + 1;
        let mut mask = vec![false; nx * ny];
        let mut count = 0usize;
        for j in 0..ny {
            let y = self.bbox.min.y + (j as f64 + 0.5) * h;
            let row = self.row_parity_spans(y);
            for i in 0..nx {
                let x = self.bbox.min.x + (i as f64 + 0.5) * h;
                if parity_from_spans(&row, x) {
                    mask[j * nx + i] = true;
                    count += 1;
                }
            }
        }
        if count == 0 {
            return Err(Error::InvalidDomain("no interior cells at check resolution".into()));
        }
        let start = mask.iter().position(|&b| b).unwrap();
        let mut seen = vec![false; nx * ny];
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 0usize;
        while let Some(u) = stack.pop() {
            reached += 1;
            let (i, j) = (u % nx, u / nx);
            let mut push = |v: usize| {
                if mask[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            };
            if i > 0 {
                push(u - 1);
            }
            if i + 1 < nx {
                push(u + 1);
            }
            if j > 0 {
                push(u - nx);
            }
            if j + 1 < ny {
                push(u + nx);
            }
        }
        let stray = count - reached;
        if stray * 100 > count {
            return Err(Error::InvalidDomain(format!(
                "domain is disconnected at check resolution ({stray} of {count} cells unreachable)"
            )));
        }
        Ok(())
    }

    pub fn outer(&self) -> &[Point] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point>] {
        &self.holes
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn diam(&self, norm: Norm) -> f64 {
        self.bbox.diam(norm)
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Crossing abscissas of all boundary edges against the horizontal line
    /// at height `y`, sorted. Parity within the returned list decides
    /// membership along the row.
    fn row_parity_spans(&self, y: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        for s in &self.segments {
            let (a, b) = (s.a, s.b);
            if (a.y > y) != (b.y > y) {
                xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        xs
    }

    /// Membership in the open set Ω. Boundary points report `false` whenever
    /// the distance query resolves them exactly (always for axis-parallel
    /// edges with representable coordinates).
    pub fn contains(&self, p: Point) -> bool {
        if p.x < self.bbox.min.x || p.x > self.bbox.max.x || p.y < self.bbox.min.y || p.y > self.bbox.max.y {
            return false;
        }
        if self.dist_to_boundary(p, Norm::Uniform) == 0.0 {
            return false;
        }
        if !ring_parity(&self.outer, p) {
            return false;
        }
        for hole in &self.holes {
            if ring_parity(hole, p) {
                return false;
            }
        }
        true
    }

    /// Unsigned distance from `p` to ∂Ω (no membership check).
    pub fn dist_to_boundary(&self, p: Point, norm: Norm) -> f64 {
        let mut best = f64::INFINITY;
        for s in &self.segments {
            if s.bbox_dist_lower(p, norm) >= best {
                continue;
            }
            let d = point_segment_dist(p, s.a, s.b, norm);
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Exact minimum distance from an interior point to the boundary.
    pub fn boundary_distance(&self, p: Point, norm: Norm) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::PointOutsideDomain { x: p.x, y: p.y });
        }
        Ok(self.dist_to_boundary(p, norm))
    }

    /// Whether the open segment (a, b) crosses or touches the boundary.
    pub fn segment_crosses_boundary(&self, a: Point, b: Point) -> bool {
        let lo = Point::new(a.x.min(b.x), a.y.min(b.y));
        let hi = Point::new(a.x.max(b.x), a.y.max(b.y));
        for s in &self.segments {
            if s.hi.x < lo.x || s.lo.x > hi.x || s.hi.y < lo.y || s.lo.y > hi.y {
                continue;
            }
            if segments_intersect(a, b, s.a, s.b) {
                return true;
            }
        }
        false
    }

    /// Whether the closed segment [a, b] lies in Ω: both endpoints inside and
    /// no boundary crossing.
    pub fn segment_inside(&self, a: Point, b: Point) -> bool {
        self.contains(a) && self.contains(b) && !self.segment_crosses_boundary(a, b)
    }

    /// Nearest boundary segment direction at `p` (unit Euclidean vector).
    pub fn boundary_tangent(&self, p: Point) -> Point {
        self.boundary_frame(p).0
    }

    /// Unit tangent and inward normal of the boundary segment nearest to `p`.
    /// Rings keep the interior on their left, so the inward normal is the
    /// left normal of the edge direction.
    pub fn boundary_frame(&self, p: Point) -> (Point, Point) {
        let mut best = f64::INFINITY;
        let mut dir = Point::new(1.0, 0.0);
        for s in &self.segments {
            if s.bbox_dist_lower(p, Norm::Euclidean) >= best {
                continue;
            }
            let d = point_segment_dist_euclid(p, s.a, s.b);
            if d < best {
                best = d;
                let len = s.a.dist_euclid(s.b);
                dir = Point::new((s.b.x - s.a.x) / len, (s.b.y - s.a.y) / len);
            }
        }
        (dir, Point::new(-dir.y, dir.x))
    }

    /// Boundary sampler support: total arclength and a point + inward normal
    /// at a given arclength parameter (outer ring only).
    pub fn outer_perimeter(&self) -> f64 {
        let n = self.outer.len();
        (0..n).map(|i| self.outer[i].dist_euclid(self.outer[(i + 1) % n])).sum()
    }

    pub fn outer_point_at(&self, s: f64) -> (Point, Point) {
        let n = self.outer.len();
        let total = self.outer_perimeter();
        let mut t = s.rem_euclid(total);
        for i in 0..n {
            let a = self.outer[i];
            let b = self.outer[(i + 1) % n];
            let len = a.dist_euclid(b);
            if t <= len || i == n - 1 {
                let u = if len > 0.0 { t / len } else { 0.0 };
                let p = a.lerp(b, u.clamp(0.0, 1.0));
                // outer ring is CCW, so the interior lies to the left
                let nx = -(b.y - a.y) / len;
                let ny = (b.x - a.x) / len;
                return (p, Point::new(nx, ny));
            }
            t -= len;
        }
        unreachable!()
    }

    pub fn to_file(&self) -> DomainFile {
        DomainFile {
            name: self.name.clone(),
            outer: self.outer.iter().map(|p| [p.x, p.y]).collect(),
            holes: self
                .holes
                .iter()
                .map(|h| h.iter().map(|p| [p.x, p.y]).collect())
                .collect(),
        }
    }

    pub fn from_file(file: DomainFile) -> Result<Self> {
        let outer = file.outer.iter().map(|v| Point::new(v[0], v[1])).collect();
        let holes = file
            .holes
            .iter()
            .map(|h| h.iter().map(|v| Point::new(v[0], v[1])).collect())
            .collect();
        PlanarDomain::new(&file.name, outer, holes)
    }

    pub(crate) fn row_spans(&self, y: f64) -> Vec<f64> {
        self.row_parity_spans(y)
    }
}

/// Parse a domain file from JSON text.
pub fn domain_file_from_json(text: &str) -> Result<DomainFile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidDomain(format!("bad domain JSON: {e}")))
}

pub(crate) fn parity_from_spans(xs: &[f64], x: f64) -> bool {
    // number of crossings strictly to the right of x
    let idx = xs.partition_point(|&c| c <= x);
    (xs.len() - idx) % 2 == 1
}
