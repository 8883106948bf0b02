//! Cube chains along curves: each cube is centered on the curve with radius
//! one eighth of the uniform-norm boundary distance, consecutive cubes
//! intersect, doubled cubes stay inside Ω, and the doubled family has bounded
//! covering multiplicity. Distances here are uniform-norm throughout; cubes
//! are balls in that norm.

use crate::error::{Error, Result};
use crate::geometry::{Cube, Norm, PlanarDomain, Point};
use crate::metric::ParamCurve;
use serde::Serialize;

/// Chain of cubes Q_0..Q_m joining x to y along a curve, with connection
/// points a_i ∈ Q_{i−1} ∩ Q_i.
#[derive(Clone, Debug, Serialize)]
pub struct CubeChain {
    pub cubes: Vec<Cube>,
    /// a_1..a_m; a_0 = x and a_{m+1} = y are stored separately
    pub links: Vec<Point>,
    pub x: Point,
    pub y: Point,
}

impl CubeChain {
    /// Number of links m (the chain has m+1 cubes).
    pub fn m(&self) -> usize {
        self.cubes.len() - 1
    }
}

/// Greedy sub-cover along the curve: walk the samples, keep a cube whenever
/// the current point leaves the union of kept cubes, then extract the x→y
/// chain through pairwise-intersection adjacency (breadth-first). Connection
/// points are the centers of the intersection boxes.
pub fn build_chain(domain: &PlanarDomain, curve: &ParamCurve) -> Result<CubeChain> {
    let x = curve.start();
    let y = curve.end();
    let len = curve.length();
    let clearance = |p: Point| domain.dist_to_boundary(p, Norm::Uniform);
    let d0 = clearance(x);
    if !(d0 > 0.0) {
        return Err(Error::CurveTouchesBoundary { t: 0.0 });
    }
    let mut kept: Vec<Cube> = vec![Cube::new(x, d0 / 8.0)?];
    if len > 0.0 {
        let mut t = 0.0;
        let mut step = kept[0].radius / 4.0;
        while t < len {
            t = (t + step).min(len);
            let p = curve.point_at(t);
            if kept.iter().any(|q| q.contains(p)) {
                continue;
            }
            let d = clearance(p);
            if !(d > 0.0) {
                return Err(Error::CurveTouchesBoundary { t });
            }
            let cube = Cube::new(p, d / 8.0)?;
            step = cube.radius / 4.0;
            kept.push(cube);
        }
    }
    // x sits in the first kept cube by construction; find a cube holding y
    let target = kept
        .iter()
        .position(|q| q.contains(y))
        .ok_or_else(|| Error::InvalidCurve("curve end escaped the kept cover".into()))?;
    // breadth-first through intersection adjacency, neighbors in index order
    let n = kept.len();
    let mut pred = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    while let Some(u) = queue.pop_front() {
        if u == target {
            break;
        }
        for v in 0..n {
            if !seen[v] && kept[u].intersects(&kept[v]) {
                seen[v] = true;
                pred[v] = u;
                queue.push_back(v);
            }
        }
    }
    if !seen[target] {
        return Err(Error::Disconnected);
    }
    let mut order = vec![target];
    let mut cur = target;
    while pred[cur] != usize::MAX {
        cur = pred[cur];
        order.push(cur);
    }
    order.reverse();
    let cubes: Vec<Cube> = order.iter().map(|&i| kept[i]).collect();
    let mut links = Vec::with_capacity(cubes.len().saturating_sub(1));
    for w in cubes.windows(2) {
        let a = w[0]
            .intersection_center(&w[1])
            .ok_or_else(|| Error::InvalidCurve("adjacent chain cubes do not intersect".into()))?;
        links.push(a);
    }
    Ok(CubeChain { cubes, links, x, y })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub cubes: usize,
    /// Q_0 ∋ x, Q_m ∋ y
    pub endpoints_ok: bool,
    /// every link lies in both adjacent cubes
    pub links_ok: bool,
    pub distinct_ok: bool,
    /// r_i = dist(z_i, ∂Ω)/8 recomputed exactly
    pub radius_rule_ok: bool,
    /// 2Q ⊂ Ω sampled at corners, edge midpoints and center
    pub dilated_inside_ok: bool,
    /// min over sampled points of dist(u, ∂Ω)/dist(z, ∂Ω); at least 3/4 by
    /// the Lipschitz bound
    pub dilated_clearance_min: f64,
    /// measured covering multiplicity of the doubled family
    pub multiplicity: usize,
    /// conservative per-disjoint-family bound 2^n 7^n for n = 2
    pub multiplicity_bound: usize,
    pub multiplicity_ok: bool,
    /// max radius ratio over intersecting doubled pairs; 5/3 by the
    /// comparability argument
    pub max_radius_ratio: f64,
    pub radius_ratio_ok: bool,
    /// r_i ≤ lng(Γ ∩ Q_i) whenever an endpoint lies outside Q_i (within one
    /// sampling step)
    pub radius_length_ok: bool,
}

/// Verify the chain invariants and measure the covering multiplicity of the
/// doubled family by sweeping cube corners, centers and curve samples.
pub fn verify_chain(domain: &PlanarDomain, chain: &CubeChain, curve: &ParamCurve) -> ChainReport {
    let cubes = &chain.cubes;
    let endpoints_ok = cubes.first().map(|q| q.contains(chain.x)).unwrap_or(false)
        && cubes.last().map(|q| q.contains(chain.y)).unwrap_or(false);
    let mut distinct_ok = true;
    for i in 0..cubes.len() {
        for j in (i + 1)..cubes.len() {
            if cubes[i].center == cubes[j].center && cubes[i].radius == cubes[j].radius {
                distinct_ok = false;
            }
        }
    }
    let mut links_ok = true;
    for (i, a) in chain.links.iter().enumerate() {
        if !(cubes[i].contains(*a) && cubes[i + 1].contains(*a)) {
            links_ok = false;
        }
    }
    let mut radius_rule_ok = true;
    let mut dilated_inside_ok = true;
    let mut dilated_clearance_min = f64::INFINITY;
    for q in cubes {
        let d = domain.dist_to_boundary(q.center, Norm::Uniform);
        if (q.radius - d / 8.0).abs() > 1e-12 * d.max(1.0) {
            radius_rule_ok = false;
        }
        let two_q = q.dilate(2.0);
        let c = two_q.center;
        let r = two_q.radius;
        let mut probes: Vec<Point> = two_q.corners().to_vec();
        probes.push(c);
        probes.extend([
            Point::new(c.x + r, c.y),
            Point::new(c.x - r, c.y),
            Point::new(c.x, c.y + r),
            Point::new(c.x, c.y - r),
        ]);
        for p in probes {
            if !domain.contains(p) {
                dilated_inside_ok = false;
                continue;
            }
            let ratio = domain.dist_to_boundary(p, Norm::Uniform) / d;
            if ratio < dilated_clearance_min {
                dilated_clearance_min = ratio;
            }
        }
    }

    // covering multiplicity of {2Q}: corners of every doubled cube, all
    // centers and links, and dense curve samples
    let mut probes: Vec<Point> = Vec::new();
    for q in cubes {
        probes.extend(q.dilate(2.0).corners());
        probes.push(q.center);
    }
    probes.extend(chain.links.iter().copied());
    let samples = 512;
    for i in 0..=samples {
        probes.push(curve.point_at(curve.length() * i as f64 / samples as f64));
    }
    let mut multiplicity = 0usize;
    for p in &probes {
        let count = cubes.iter().filter(|q| q.dilate(2.0).contains(*p)).count();
        if count > multiplicity {
            multiplicity = count;
        }
    }
    let multiplicity_bound = 4 * 49;

    let mut max_radius_ratio = 0.0f64;
    for i in 0..cubes.len() {
        for j in (i + 1)..cubes.len() {
            if cubes[i].dilate(2.0).intersects(&cubes[j].dilate(2.0)) {
                let ratio =
                    (cubes[i].radius / cubes[j].radius).max(cubes[j].radius / cubes[i].radius);
                if ratio > max_radius_ratio {
                    max_radius_ratio = ratio;
                }
            }
        }
    }

    // arc length of the curve inside each cube, by fine sampling
    let fine = 4096;
    let step = curve.length() / fine as f64;
    let mut radius_length_ok = true;
    for q in cubes {
        if q.contains(chain.x) && q.contains(chain.y) {
            continue;
        }
        let mut inside_len = 0.0;
        for i in 0..fine {
            let mid = curve.point_at((i as f64 + 0.5) * step);
            if q.contains(mid) {
                inside_len += step;
            }
        }
        if q.radius > inside_len + 2.0 * step {
            radius_length_ok = false;
        }
    }

    ChainReport {
        cubes: cubes.len(),
        endpoints_ok,
        links_ok,
        distinct_ok,
        radius_rule_ok,
        dilated_inside_ok,
        dilated_clearance_min,
        multiplicity,
        multiplicity_bound,
        multiplicity_ok: multiplicity <= multiplicity_bound,
        max_radius_ratio,
        radius_ratio_ok: max_radius_ratio <= 5.0 / 3.0 + 1e-9,
        radius_length_ok,
    }
}
