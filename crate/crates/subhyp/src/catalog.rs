//! Built-in domain catalog. All catalog domains are polygonal; smooth shapes
//! ship as dense polygonal approximations with fixed, documented vertex
//! counts so emitted files are byte-stable.

use crate::error::{Error, Result};
use crate::geometry::{PlanarDomain, Point};

pub const NAMES: [&str; 6] =
    ["square", "disk-256", "annulus", "inward-cusp-2", "exterior-cusp-2", "rooms-and-corridors"];

/// Unit square (0,1)².
pub fn square() -> PlanarDomain {
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

/// Unit disk as a regular n-gon with vertices on the unit circle.
pub fn disk(n: usize) -> PlanarDomain {
    let outer: Vec<Point> = (0..n)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point::new(a.cos(), a.sin())
        })
        .collect();
    PlanarDomain::new("disk-256", outer, vec![]).unwrap()
}

/// Annulus: outer radius 1 (256-gon, CCW), hole radius 0.5 (128-gon, CW).
pub fn annulus() -> PlanarDomain {
    let outer: Vec<Point> = (0..256)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
            Point::new(a.cos(), a.sin())
        })
        .collect();
    let hole: Vec<Point> = (0..128)
        .rev()
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 128.0;
            Point::new(0.5 * a.cos(), 0.5 * a.sin())
        })
        .collect();
    PlanarDomain::new("annulus", outer, vec![hole]).unwrap()
}

/// Spike domain {0 < x < 1, |y| < x^s}: the boundary cusp points into the
/// domain's approach to the tip. Graded vertex spacing near the tip.
pub fn inward_cusp(s: f64, n_per_branch: usize) -> PlanarDomain {
    let mut outer = Vec::with_capacity(2 * n_per_branch + 2);
    outer.push(Point::new(0.0, 0.0));
    for i in 1..=n_per_branch {
        let x = (i as f64 / n_per_branch as f64).powf(1.5);
        outer.push(Point::new(x, -x.powf(s)));
    }
    outer.push(Point::new(1.0, 1.0));
    for i in (1..n_per_branch).rev() {
        let x = (i as f64 / n_per_branch as f64).powf(1.5);
        outer.push(Point::new(x, x.powf(s)));
    }
    PlanarDomain::with_check_resolution(
        &format!("inward-cusp-{s}"),
        outer,
        vec![],
        Some(0.004),
    )
    .unwrap()
}

/// Box minus a cuspidal spike: Ω = (−1, 1.25) × (−1.25, 1.25) with the set
/// {0 ≤ x ≤ 1, |y| ≤ x^s} ∪ {1 ≤ x ≤ 1.25, |y| ≤ 1} removed. Pairs can
/// straddle the spike near its tip at the origin.
pub fn exterior_cusp(s: f64, n_per_branch: usize) -> PlanarDomain {
    let mut outer = Vec::new();
    outer.push(Point::new(-1.0, -1.25));
    outer.push(Point::new(1.25, -1.25));
    outer.push(Point::new(1.25, -1.0));
    // lower spike branch, walked toward the tip
    for i in (1..=n_per_branch).rev() {
        let x = (i as f64 / n_per_branch as f64).powf(1.5);
        outer.push(Point::new(x, -x.powf(s)));
    }
    outer.push(Point::new(0.0, 0.0));
    // upper branch, walked away from the tip
    for i in 1..=n_per_branch {
        let x = (i as f64 / n_per_branch as f64).powf(1.5);
        outer.push(Point::new(x, x.powf(s)));
    }
    outer.push(Point::new(1.25, 1.0));
    outer.push(Point::new(1.25, 1.25));
    outer.push(Point::new(-1.0, 1.25));
    PlanarDomain::with_check_resolution(
        &format!("exterior-cusp-{s}"),
        outer,
        vec![],
        Some(0.004),
    )
    .unwrap()
}

/// Chain of square rooms joined by corridors whose widths shrink like the
/// square of the next room size. Near the critical exponent this family is
/// the classic borderline case; verdicts there are expected to be
/// inconclusive.
pub fn rooms_and_corridors(levels: usize) -> PlanarDomain {
    assert!(levels >= 2, "need at least two rooms");
    let sizes: Vec<f64> = (0..levels).map(|i| 0.5_f64.powi(i as i32)).collect();
    // room i spans [xs[i], xs[i] + sizes[i]]; corridors fill the gaps
    let mut xs = vec![0.0];
    for i in 0..levels - 1 {
        xs.push(xs[i] + sizes[i] + 0.5 * sizes[i + 1]);
    }
    let mut bottom = Vec::new();
    for i in 0..levels {
        bottom.push(Point::new(xs[i], -0.5 * sizes[i]));
        bottom.push(Point::new(xs[i] + sizes[i], -0.5 * sizes[i]));
        if i + 1 < levels {
            let w = sizes[i + 1] * sizes[i + 1];
            bottom.push(Point::new(xs[i] + sizes[i], -0.5 * w));
            bottom.push(Point::new(xs[i + 1], -0.5 * w));
        }
    }
    let mut outer = bottom.clone();
    for p in bottom.iter().rev() {
        outer.push(Point::new(p.x, -p.y));
    }
    // drop duplicated collinear joints at the two ends
    outer.dedup_by(|a, b| a == b);
    let w_min = sizes[levels - 1] * sizes[levels - 1];
    PlanarDomain::with_check_resolution("rooms-and-corridors", outer, vec![], Some(w_min / 3.0))
        .unwrap()
}

/// Resolve a catalog name ("disk" is an alias for "disk-256").
pub fn get(name: &str) -> Result<PlanarDomain> {
    match name {
        "square" => Ok(square()),
        "disk" | "disk-256" => Ok(disk(256)),
        "annulus" => Ok(annulus()),
        "inward-cusp-2" => Ok(inward_cusp(2.0, 120)),
        "exterior-cusp-2" => Ok(exterior_cusp(2.0, 120)),
        "rooms-and-corridors" => Ok(rooms_and_corridors(4)),
        _ => Err(Error::InvalidDomain(format!(
            "unknown catalog domain '{name}' (available: {})",
            NAMES.join(", ")
        ))),
    }
}

/// Canonical JSON for a catalog domain; byte-stable across runs.
pub fn emit(name: &str) -> Result<String> {
    let domain = get(name)?;
    Ok(serde_json::to_string_pretty(&domain.to_file()).unwrap())
}
