use super::{DistanceField, Norm, PlanarDomain, Point};
use crate::error::{Error, Result};
use serde::Serialize;

/// Best ball found inside B ∩ Ω by grid search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InscribedBall {
    pub center: Point,
    pub radius: f64,
    /// diam B' / diam B
    pub sigma_hat: f64,
}

/// Grid search for the largest ball B' ⊂ B ∩ Ω: maximizes
/// min(dist(c, ∂Ω), dist(c, ∂B)) over cell centers inside B. The candidate
/// and ball live in the given norm. Ties resolve to the lowest row-major cell.
pub fn largest_inscribed_ball(
    domain: &PlanarDomain,
    center: Point,
    radius: f64,
    h: f64,
    norm: Norm,
) -> Result<InscribedBall> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("ball radius must be positive".into()));
    }
    if !domain.contains(center) {
        return Err(Error::PointOutsideDomain { x: center.x, y: center.y });
    }
    let n = ((2.0 * radius / h).ceil() as usize).max(1);
    let mut best_score = f64::NEG_INFINITY;
    let mut best_center = center;
    for j in 0..=n {
        for i in 0..=n {
            let p = Point::new(
                center.x - radius + 2.0 * radius * i as f64 / n as f64,
                center.y - radius + 2.0 * radius * j as f64 / n as f64,
            );
            if p.dist(center, norm) > radius {
                continue;
            }
            if !domain.contains(p) {
                continue;
            }
            let d_omega = domain.dist_to_boundary(p, norm);
            let d_ball = radius - p.dist(center, norm);
            let score = d_omega.min(d_ball);
            if score > best_score {
                best_score = score;
                best_center = p;
            }
        }
    }
    let r = best_score.max(0.0);
    Ok(InscribedBall { center: best_center, radius: r, sigma_hat: r / radius })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityEstimate {
    /// max over sampled centers and dyadic radii of |Q| / |Q ∩ Ω|
    pub sigma: f64,
    pub delta: f64,
    pub radii: Vec<f64>,
    pub h: f64,
    /// center and radius attaining the max
    pub worst_center: Point,
    pub worst_radius: f64,
}

/// Estimate the regularity constant σ_S: cubes Q(x, r) at inside cell centers
/// x and dyadic radii r ≤ δ/2 are compared against their cell-counted
/// intersection with Ω.
pub fn regularity_constants(domain: &PlanarDomain, h: f64, delta: f64) -> Result<RegularityEstimate> {
    if !(delta > 0.0) || delta > domain.diam(Norm::Euclidean) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, diam], got {delta}"
        )));
    }
    let field = DistanceField::build(domain, h, Norm::Uniform)?;
    let mut radii = Vec::new();
    let mut r = delta / 2.0;
    while r >= 3.0 * h {
        radii.push(r);
        r /= 2.0;
    }
    if radii.is_empty() {
        return Err(Error::ResolutionTooCoarse(format!(
            "no dyadic radius fits between 3h = {} and delta/2 = {}",
            3.0 * h,
            delta / 2.0
        )));
    }
    // subsample centers so the scan stays near 20k cells
    let stride = ((field.inside_count() as f64 / 20_000.0).sqrt().ceil() as usize).max(1);
    let mut sigma = 0.0_f64;
    let mut worst_center = Point::new(f64::NAN, f64::NAN);
    let mut worst_radius = f64::NAN;
    let hh = field.spacing();
    for j in (0..field.ny()).step_by(stride) {
        for i in (0..field.nx()).step_by(stride) {
            if !field.is_inside(i, j) {
                continue;
            }
            let c = field.cell_center(i, j);
            for &r in &radii {
                // cells with centers in the closed cube Q(c, r)
                let i0 = ((c.x - r - field.origin().x) / hh).ceil() as isize;
                let i1 = ((c.x + r - field.origin().x) / hh).floor() as isize;
                let j0 = ((c.y - r - field.origin().y) / hh).ceil() as isize;
                let j1 = ((c.y + r - field.origin().y) / hh).floor() as isize;
                let count = field.count_inside(
                    i0.max(0) as usize,
                    j0.max(0) as usize,
                    (i1.max(-1) + 1) as usize,
                    (j1.max(-1) + 1) as usize,
                );
                if count == 0 {
                    continue;
                }
                let q_measure = (2.0 * r) * (2.0 * r);
                let inter = count as f64 * hh * hh;
                let ratio = q_measure / inter;
                if ratio > sigma {
                    sigma = ratio;
                    worst_center = c;
                    worst_radius = r;
                }
            }
        }
    }
    Ok(RegularityEstimate { sigma, delta, radii, h: hh, worst_center, worst_radius })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PlanarDomain {
        PlanarDomain::new(
            "square",
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            vec![],
        )
        .unwrap()
    }

    fn disk(n: usize) -> PlanarDomain {
        let outer: Vec<Point> = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        PlanarDomain::new("disk", outer, vec![]).unwrap()
    }

    #[test]
    fn ball_inside_domain_is_returned_whole() {
        let d = disk(128);
        let b = largest_inscribed_ball(&d, Point::new(0.0, 0.0), 0.5, 0.02, Norm::Euclidean).unwrap();
        assert!(b.sigma_hat > 0.95, "sigma_hat {}", b.sigma_hat);
        assert!(b.center.dist_euclid(Point::new(0.0, 0.0)) < 0.05);
    }

    #[test]
    fn corner_ball_found_in_first_quadrant() {
        let sq = unit_square();
        let b = largest_inscribed_ball(&sq, Point::new(0.01, 0.01), 0.5, 0.01, Norm::Euclidean).unwrap();
        assert!(b.sigma_hat > 0.3, "sigma_hat {}", b.sigma_hat);
        assert!(b.center.x > 0.01 && b.center.y > 0.01);
        // independent coarse grid search with a different stride
        let mut oracle = 0.0_f64;
        for j in 0..=70 {
            for i in 0..=70 {
                let p = Point::new(0.01 - 0.5 + i as f64 / 70.0, 0.01 - 0.5 + j as f64 / 70.0);
                if !sq.contains(p) || p.dist_euclid(Point::new(0.01, 0.01)) > 0.5 {
                    continue;
                }
                let s = sq
                    .dist_to_boundary(p, Norm::Euclidean)
                    .min(0.5 - p.dist_euclid(Point::new(0.01, 0.01)));
                oracle = oracle.max(s);
            }
        }
        assert!((b.radius - oracle).abs() < 0.02, "radius {} oracle {}", b.radius, oracle);
    }

    #[test]
    fn square_regularity_approaches_corner_limit() {
        // cubes centered against a corner overlap a quarter of the domain
        let sq = unit_square();
        let est = regularity_constants(&sq, 1.0 / 128.0, 0.5).unwrap();
        assert!(est.sigma <= 4.3, "sigma {}", est.sigma);
        assert!(est.sigma >= 3.0, "sigma {}", est.sigma);
    }

    #[test]
    fn disk_regularity_below_corner_limit() {
        let d = disk(128);
        let est = regularity_constants(&d, 1.0 / 64.0, 0.5).unwrap();
        assert!(est.sigma <= 4.3, "sigma {}", est.sigma);
    }

    #[test]
    fn refining_h_does_not_inflate_convex_estimate() {
        let sq = unit_square();
        let coarse = regularity_constants(&sq, 1.0 / 64.0, 0.5).unwrap();
        let fine = regularity_constants(&sq, 1.0 / 128.0, 0.5).unwrap();
        // one cell-counting quantum at the worst window
        let quantum = 4.0 * (fine.h / fine.worst_radius);
        assert!(fine.sigma <= coarse.sigma.max(4.0) + quantum + 0.2);
    }
}
