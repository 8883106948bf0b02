//! Weighted curve lengths and the subhyperbolic path metric.
//!
//! The length of a curve γ under exponent α is the integral of
//! dist(z, ∂Ω)^(α−1) against Euclidean arclength. The distance d_{α,Ω}(x, y)
//! is approximated from above by weighted shortest paths on refining grid
//! graphs followed by segment shortcutting.

mod grid;

pub use grid::{subhyp_distance, subhyp_distance_with, FieldCache, GeoParams, StopRule};

use crate::error::{Error, Result};
use crate::geometry::{Norm, PlanarDomain, Point};
use serde::Serialize;

/// Arclength-parameterized polyline inside Ω. Carries the boundary-distance
/// trace at its vertices.
#[derive(Clone, Debug, Serialize)]
pub struct ParamCurve {
    vertices: Vec<Point>,
    /// cumulative Euclidean arclength, starting at 0
    arclength: Vec<f64>,
    /// dist(vertex, ∂Ω) in `norm`
    weights: Vec<f64>,
    norm: Norm,
}

impl ParamCurve {
    /// Validates that vertices lie in Ω and that consecutive segments stay
    /// inside, by midpoint containment checks at the segment subdivision
    /// scale.
    pub fn new(domain: &PlanarDomain, vertices: Vec<Point>, norm: Norm) -> Result<Self> {
        let mut pts: Vec<Point> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if pts.last() != Some(&v) {
                pts.push(v);
            }
        }
        if pts.is_empty() {
            return Err(Error::InvalidCurve("curve needs at least one vertex".into()));
        }
        let mut weights = Vec::with_capacity(pts.len());
        for v in &pts {
            if !domain.contains(*v) {
                return Err(Error::InvalidCurve(format!(
                    "vertex ({}, {}) is outside the domain",
                    v.x, v.y
                )));
            }
            weights.push(domain.dist_to_boundary(*v, norm));
        }
        for w in pts.windows(2) {
            if !segment_stays_inside(domain, w[0], w[1], norm) {
                return Err(Error::InvalidCurve(format!(
                    "segment ({}, {}) -> ({}, {}) leaves the domain",
                    w[0].x, w[0].y, w[1].x, w[1].y
                )));
            }
        }
        let mut arclength = Vec::with_capacity(pts.len());
        let mut s = 0.0;
        arclength.push(0.0);
        for w in pts.windows(2) {
            s += w[0].dist_euclid(w[1]);
            arclength.push(s);
        }
        Ok(ParamCurve { vertices: pts, arclength, weights, norm })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn arclength(&self) -> &[f64] {
        &self.arclength
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn length(&self) -> f64 {
        *self.arclength.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    /// Point at arclength t (clamped to [0, L]).
    pub fn point_at(&self, t: f64) -> Point {
        let t = t.clamp(0.0, self.length());
        match self.arclength.binary_search_by(|s| s.partial_cmp(&t).unwrap()) {
            Ok(i) => self.vertices[i],
            Err(i) => {
                let lo = i - 1;
                let seg = self.arclength[i] - self.arclength[lo];
                let u = if seg > 0.0 { (t - self.arclength[lo]) / seg } else { 0.0 };
                self.vertices[lo].lerp(self.vertices[i], u)
            }
        }
    }

    /// Uniform resampling of the boundary-distance trace with exact queries.
    pub fn resample_weights(&self, domain: &PlanarDomain, n: usize) -> Vec<f64> {
        let len = self.length();
        (0..n)
            .map(|i| {
                let t = len * i as f64 / (n - 1).max(1) as f64;
                domain.dist_to_boundary(self.point_at(t), self.norm)
            })
            .collect()
    }

    /// Max-weight vertex (index, weight); ties resolve to the lowest index.
    pub fn max_weight_vertex(&self) -> (usize, f64) {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &w) in self.weights.iter().enumerate() {
            if w > best.1 {
                best = (i, w);
            }
        }
        best
    }
}

/// Containment check along a segment by recursive midpoint testing. The
/// recursion stops as soon as the Lipschitz bound d(a) + d(b) > |ab|
/// certifies the whole piece, and otherwise subdivides to a small scale.
fn segment_stays_inside(domain: &PlanarDomain, a: Point, b: Point, norm: Norm) -> bool {
    fn rec(domain: &PlanarDomain, a: Point, b: Point, da: f64, db: f64, norm: Norm, depth: u32) -> bool {
        let len = a.dist_euclid(b);
        if da + db > len {
            return true;
        }
        if depth >= 24 {
            return da > 0.0 && db > 0.0;
        }
        let mid = a.lerp(b, 0.5);
        if !domain.contains(mid) {
            return false;
        }
        let dm = domain.dist_to_boundary(mid, norm);
        rec(domain, a, mid, da, dm, norm, depth + 1) && rec(domain, mid, b, dm, db, norm, depth + 1)
    }
    let da = domain.dist_to_boundary(a, norm);
    let db = domain.dist_to_boundary(b, norm);
    rec(domain, a, b, da, db, norm, 0)
}

/// Result of a grid geodesic query: an upper bound on d_{α,Ω} together with
/// the witnessing curve.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicResult {
    pub value: f64,
    pub curve: ParamCurve,
    pub alpha: f64,
    /// finest grid spacing used
    pub h: f64,
    /// last refinement delta; the reported slack, not a certified bound
    pub gap: f64,
}

/// Subhyperbolic length of an explicit curve: adaptive quadrature of
/// dist^(α−1) along the polyline with exact boundary distances at the nodes.
/// Segments are bisected until the midpoint/trapezoid disagreement drops
/// below 1e−6 relative.
pub fn weighted_length(curve: &ParamCurve, alpha: f64, domain: &PlanarDomain) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(curve.length());
    }
    let mut total = 0.0;
    for w in curve.vertices.windows(2) {
        total += weighted_segment_length(domain, w[0], w[1], alpha, curve.norm)?;
    }
    Ok(total)
}

/// Quadrature of dist^(α−1) along one straight segment.
pub fn weighted_segment_length(
    domain: &PlanarDomain,
    a: Point,
    b: Point,
    alpha: f64,
    norm: Norm,
) -> Result<f64> {
    if alpha == 1.0 {
        return Ok(a.dist_euclid(b));
    }
    let da = domain.dist_to_boundary(a, norm);
    let db = domain.dist_to_boundary(b, norm);
    let total_len = a.dist_euclid(b);
    if total_len == 0.0 {
        return Ok(0.0);
    }
    fn rec(
        domain: &PlanarDomain,
        a: Point,
        b: Point,
        da: f64,
        db: f64,
        alpha: f64,
        norm: Norm,
        t_mid: f64,
        depth: u32,
    ) -> Result<f64> {
        if da <= 0.0 || db <= 0.0 {
            return Err(Error::CurveTouchesBoundary { t: t_mid });
        }
        let len = a.dist_euclid(b);
        let mid = a.lerp(b, 0.5);
        let dm = domain.dist_to_boundary(mid, norm);
        if dm <= 0.0 {
            return Err(Error::CurveTouchesBoundary { t: t_mid });
        }
        let trap = 0.5 * len * (da.powf(alpha - 1.0) + db.powf(alpha - 1.0));
        let midr = len * dm.powf(alpha - 1.0);
        let disagreement = (trap - midr).abs();
        let scale = trap.abs().max(midr.abs());
        if disagreement <= 1e-6 * scale || len < 1e-14 || depth >= 48 {
            // Simpson-style combination of the two rules
            return Ok((trap + 2.0 * midr) / 3.0);
        }
        let left = rec(domain, a, mid, da, dm, alpha, norm, t_mid - 0.25 * len, depth + 1)?;
        let right = rec(domain, mid, b, dm, db, alpha, norm, t_mid + 0.25 * len, depth + 1)?;
        Ok(left + right)
    }
    rec(domain, a, b, da, db, alpha, norm, 0.5 * total_len, 0)
}

/// Near-geodesic: a curve whose weighted length is within `slack` of the
/// converged distance estimate. Refines the grid until the reported gap is at
/// most `slack`; the refinement budget caps the grid at 4096² cells.
pub fn near_geodesic(
    domain: &PlanarDomain,
    alpha: f64,
    x: Point,
    y: Point,
    slack: f64,
    params: &GeoParams,
) -> Result<ParamCurve> {
    if !(slack > 0.0) {
        return Err(Error::SlackUnreachable { requested: slack, achieved: f64::INFINITY });
    }
    let mut p = params.clone();
    p.alpha = alpha;
    p.max_cells = p.max_cells.max(4096 * 4096);
    let res = grid::subhyp_distance_with(domain, &p, x, y, StopRule::AbsGap(slack), None)?;
    Ok(res.curve)
}

/// Report of the length bound for a curve in the near-boundary stratum.
#[derive(Clone, Debug, Serialize)]
pub struct LengthBoundReport {
    pub holds: bool,
    pub lng: f64,
    pub xy_dist: f64,
    /// 2 e^C ‖x−y‖
    pub bound: f64,
    /// (αC + 2^α)^{1/α} ‖x−y‖, the sharper intermediate bound
    pub sharper_bound: f64,
    pub sharper_holds: bool,
    pub c_used: f64,
    /// smallest constant for which the weighted-length hypothesis holds
    pub c_measured: f64,
}

/// Checks lng(γ) ≤ 2e^C ‖x−y‖ for a curve whose endpoints satisfy
/// max(dist(x), dist(y)) ≤ 2‖x−y‖ and whose weighted length is at most
/// C‖x−y‖^α.
pub fn check_length_bound(
    curve: &ParamCurve,
    domain: &PlanarDomain,
    alpha: f64,
    c: f64,
) -> Result<LengthBoundReport> {
    let x = curve.start();
    let y = curve.end();
    let norm = curve.norm;
    let s = x.dist(y, norm);
    let dx = domain.boundary_distance(x, norm)?;
    let dy = domain.boundary_distance(y, norm)?;
    if dx.max(dy) > 2.0 * s {
        return Err(Error::PreconditionNotMet(format!(
            "endpoints too deep: max(dist) = {} > 2 dist(x,y) = {}",
            dx.max(dy),
            2.0 * s
        )));
    }
    let lng = curve.length();
    let len_a = weighted_length(curve, alpha, domain)?;
    let c_measured = len_a / s.powf(alpha);
    let bound = 2.0 * c.exp() * s;
    let sharper_bound = (alpha * c + 2.0_f64.powf(alpha)).powf(1.0 / alpha) * s;
    Ok(LengthBoundReport {
        holds: lng <= bound,
        lng,
        xy_dist: s,
        bound,
        sharper_bound,
        sharper_holds: lng <= sharper_bound,
        c_used: c,
        c_measured,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentCaseReport {
    pub segment_inside: bool,
    pub lhs: f64,
    /// ‖x−y‖^β
    pub rhs: f64,
    pub holds: bool,
}

/// Deep-endpoint case: when max(dist(x), dist(y)) > 2‖x−y‖ the straight
/// segment stays in Ω and its weighted length is at most ‖x−y‖^β.
pub fn check_segment_case(
    domain: &PlanarDomain,
    x: Point,
    y: Point,
    beta: f64,
    norm: Norm,
) -> Result<SegmentCaseReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    let s = x.dist(y, norm);
    let dx = domain.boundary_distance(x, norm)?;
    let dy = domain.boundary_distance(y, norm)?;
    if !(dx.max(dy) > 2.0 * s) {
        return Err(Error::PreconditionNotMet(format!(
            "endpoints too shallow: max(dist) = {} <= 2 dist(x,y) = {}",
            dx.max(dy),
            2.0 * s
        )));
    }
    let segment_inside = domain.segment_inside(x, y);
    let lhs = weighted_segment_length(domain, x, y, beta, norm)?;
    let rhs = s.powf(beta);
    Ok(SegmentCaseReport { segment_inside, lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) })
}

#[derive(Clone, Debug, Serialize)]
pub struct A1Report {
    /// weighted length of the curve
    pub integral: f64,
    pub lng: f64,
    /// max-distance point on the trace
    pub z_bar: Point,
    pub dist_z_bar: f64,
    /// lng ≤ C^{1/(1−α)} dist(z̄)
    pub point_bound_holds: bool,
    pub point_bound_rhs: f64,
    /// mean of the weight vs 2C · inf dist^{α−1}
    pub mean: f64,
    pub mean_bound_rhs: f64,
    pub mean_bound_holds: bool,
    pub c_used: f64,
}

/// Verifies the two conclusions available for curves satisfying the A₁-style
/// hypothesis ∫ dist^{α−1} ds ≤ C lng^α: a high-clearance point bounding the
/// length, and the mean-versus-infimum bound with factor 2C.
pub fn check_a1_property(
    curve: &ParamCurve,
    domain: &PlanarDomain,
    alpha: f64,
    c: f64,
) -> Result<A1Report> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let integral = weighted_length(curve, alpha, domain)?;
    let lng = curve.length();
    let c_min = integral / lng.powf(alpha);
    if integral > c * lng.powf(alpha) * (1.0 + 1e-9) {
        return Err(Error::HypothesisFails { min_c: c_min });
    }
    let (idx, w_max) = curve.max_weight_vertex();
    let point_bound_rhs = c.powf(1.0 / (1.0 - alpha)) * w_max;
    let mean = integral / lng;
    let mean_bound_rhs = 2.0 * c * w_max.powf(alpha - 1.0);
    Ok(A1Report {
        integral,
        lng,
        z_bar: curve.vertices[idx],
        dist_z_bar: w_max,
        point_bound_holds: lng <= point_bound_rhs * (1.0 + 1e-9),
        point_bound_rhs,
        mean,
        mean_bound_rhs,
        mean_bound_holds: mean <= mean_bound_rhs * (1.0 + 1e-9),
        c_used: c,
    })
}
