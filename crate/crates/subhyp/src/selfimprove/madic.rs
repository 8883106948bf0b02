//! m-adic interval machinery over weight traces: the Cantor-style selection
//! of one child per surviving interval, and reverse Hölder profiles for the
//! restricted maximal operator on the m-adic family.

use crate::error::{Error, Result};
use crate::geometry::{PlanarDomain, Point};
use crate::metric::ParamCurve;
use serde::Serialize;

/// Uniform samples of a curve's boundary-distance trace on [0, L].
#[derive(Clone, Debug)]
pub struct WeightTrace {
    /// sample positions along the curve
    pub points: Vec<Point>,
    /// dist(Γ(t_i), ∂Ω)
    pub w: Vec<f64>,
    pub length: f64,
}

impl WeightTrace {
    pub fn from_curve(curve: &ParamCurve, domain: &PlanarDomain, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::DegenerateTrace("need at least 2 samples".into()));
        }
        let len = curve.length();
        if !(len > 0.0) {
            return Err(Error::DegenerateTrace("curve has zero length".into()));
        }
        let mut points = Vec::with_capacity(samples);
        let mut w = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = len * i as f64 / (samples - 1) as f64;
            let p = curve.point_at(t);
            let d = domain.dist_to_boundary(p, curve.norm());
            if !(d > 0.0) {
                return Err(Error::CurveTouchesBoundary { t });
            }
            points.push(p);
            w.push(d);
        }
        Ok(WeightTrace { points, w, length: len })
    }

    pub fn samples(&self) -> usize {
        self.w.len()
    }

    pub fn t_step(&self) -> f64 {
        self.length / (self.w.len() - 1) as f64
    }

    pub fn t_at(&self, i: usize) -> f64 {
        self.length * i as f64 / (self.w.len() - 1) as f64
    }

    /// Trapezoid prefix integrals of w^(exponent); prefix[i] = ∫ over [0, t_i].
    pub fn power_prefix(&self, exponent: f64) -> Vec<f64> {
        let dt = self.t_step();
        let mut prefix = Vec::with_capacity(self.w.len());
        prefix.push(0.0);
        let mut acc = 0.0;
        for i in 1..self.w.len() {
            acc += 0.5 * dt * (self.w[i - 1].powf(exponent) + self.w[i].powf(exponent));
            prefix.push(acc);
        }
        prefix
    }
}

/// One member of the selected family: an m-adic interval of some level with
/// the weight statistics used by the oscillation and A₁ checks.
#[derive(Clone, Debug, Serialize)]
pub struct SelectedInterval {
    pub level: u32,
    pub index: u64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub min_w: f64,
    pub max_w: f64,
    /// g = w^(α−1) extremes; g is decreasing in w
    pub min_g: f64,
    pub max_g: f64,
    pub avg_g: f64,
}

/// Result of the Cantor selection to depth `k`: disjoint m-adic intervals
/// (one child per surviving interval per level), their union U and the exact
/// measure of the complement E.
#[derive(Clone, Debug)]
pub struct CantorSelection {
    pub m: u64,
    pub k: u32,
    pub length: f64,
    pub alpha: f64,
    /// sorted by t_lo
    pub selected: Vec<SelectedInterval>,
    pub u_measure: f64,
    /// exact formula ((m−1)/m)^k · L
    pub e_measure: f64,
}

impl CantorSelection {
    /// |I ∩ U| for an arbitrary interval I = [lo, hi].
    pub fn measure_u_intersect(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo || self.selected.is_empty() {
            return 0.0;
        }
        let mut total = 0.0;
        // first selected interval whose end exceeds lo
        let start = self.selected.partition_point(|s| s.t_hi <= lo);
        for s in &self.selected[start..] {
            if s.t_lo >= hi {
                break;
            }
            total += (s.t_hi.min(hi) - s.t_lo.max(lo)).max(0.0);
        }
        total
    }

    pub fn contains_t(&self, t: f64) -> bool {
        let i = self.selected.partition_point(|s| s.t_hi < t);
        i < self.selected.len() && self.selected[i].t_lo <= t
    }
}

/// Build the selection: for each surviving interval of level < k the child
/// containing the trace argmax of w is kept. Argmax ties take the lowest
/// sample index; an argmax on a shared child endpoint selects the lower
/// child. The trace must subdivide evenly (samples − 1 divisible by m^k).
pub fn build_selection(trace: &WeightTrace, m: u64, k: u32, alpha: f64) -> Result<CantorSelection> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("m must be at least 3, got {m}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("selection depth k must be positive".into()));
    }
    let n = trace.samples() - 1;
    let leaves = (m as u128).checked_pow(k).and_then(|v| u64::try_from(v).ok()).ok_or_else(
        || Error::DegenerateTrace(format!("m^k overflows for m = {m}, k = {k}")),
    )? as usize;
    if n % leaves != 0 {
        return Err(Error::DegenerateTrace(format!(
            "trace with {n} steps does not subdivide into {leaves} level-{k} intervals"
        )));
    }
    if n / leaves < 1 {
        return Err(Error::DegenerateTrace(format!(
            "fewer than one sample per level-{k} interval"
        )));
    }
    let dt = trace.t_step();
    let m_us = m as usize;
    let mut selected: Vec<SelectedInterval> = Vec::new();
    // stack of surviving intervals (level, index, sample_lo)
    let mut stack: Vec<(u32, u64, usize)> = vec![(0, 0, 0)];
    while let Some((level, index, lo_s)) = stack.pop() {
        let span = n / m_us.pow(level);
        let hi_s = lo_s + span;
        // argmax of w over samples in the closed interval
        let mut arg = lo_s;
        let mut best = trace.w[lo_s];
        for i in (lo_s + 1)..=hi_s {
            if trace.w[i] > best {
                best = trace.w[i];
                arg = i;
            }
        }
        let child_span = span / m_us;
        let rel = arg - lo_s;
        let mut child = rel / child_span;
        if child > 0 && rel % child_span == 0 {
            child -= 1; // shared endpoint: lower-index child
        }
        if child >= m_us {
            child = m_us - 1;
        }
        let c_lo = lo_s + child * child_span;
        let c_hi = c_lo + child_span;
        let mut min_w = f64::INFINITY;
        let mut max_w = f64::NEG_INFINITY;
        for i in c_lo..=c_hi {
            min_w = min_w.min(trace.w[i]);
            max_w = max_w.max(trace.w[i]);
        }
        let mut integral = 0.0;
        for i in c_lo..c_hi {
            integral +=
                0.5 * dt * (trace.w[i].powf(alpha - 1.0) + trace.w[i + 1].powf(alpha - 1.0));
        }
        let child_level = level + 1;
        let child_index = index * m + child as u64;
        let ilen = trace.length / (m as f64).powi(child_level as i32);
        selected.push(SelectedInterval {
            level: child_level,
            index: child_index,
            t_lo: trace.t_at(c_lo),
            t_hi: trace.t_at(c_hi),
            min_w,
            max_w,
            min_g: max_w.powf(alpha - 1.0),
            max_g: min_w.powf(alpha - 1.0),
            avg_g: integral / ilen,
        });
        if child_level < k {
            for j in (0..m_us).rev() {
                if j == child {
                    continue;
                }
                stack.push((child_level, index * m + j as u64, lo_s + j * child_span));
            }
        }
    }
    selected.sort_by(|a, b| a.t_lo.partial_cmp(&b.t_lo).unwrap());
    // interval lengths from the exact formula, not from rounded endpoints
    let mut u_measure = 0.0;
    for s in &selected {
        u_measure += trace.length / (m as f64).powi(s.level as i32);
    }
    let e_measure = trace.length * ((m - 1) as f64 / m as f64).powi(k as i32);
    Ok(CantorSelection { m, k, length: trace.length, alpha, selected, u_measure, e_measure })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhEntry {
    pub q: f64,
    pub c_tilde: f64,
}

/// Reverse Hölder profile: best constants C̃(q) in the q-mean bound for the
/// restricted maximal function over the m-adic family.
#[derive(Clone, Debug, Serialize)]
pub struct RhProfile {
    pub entries: Vec<RhEntry>,
    /// largest grid q with C̃(q) ≤ cap
    pub q_max: Option<f64>,
    pub cap: f64,
}

/// Profile from exact leaf averages (level-k interval means of g). Higher
/// level averages are means of children, and the restricted maximal function
/// is constant on leaves, so everything is exact arithmetic on the inputs.
pub fn reverse_holder_from_leaf_averages(
    leaf_avg: &[f64],
    m: u64,
    k: u32,
    q_grid: &[f64],
    cap: f64,
) -> Result<RhProfile> {
    let leaves = (m as usize).pow(k);
    if leaf_avg.len() != leaves {
        return Err(Error::DegenerateTrace(format!(
            "expected {leaves} leaf averages, got {}",
            leaf_avg.len()
        )));
    }
    if leaf_avg.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::DegenerateTrace("leaf averages must be positive and finite".into()));
    }
    // build averages per level, bottom-up
    let mut levels: Vec<Vec<f64>> = vec![leaf_avg.to_vec()];
    for _ in 0..k {
        let prev = levels.last().unwrap();
        let mut up = Vec::with_capacity(prev.len() / m as usize);
        for chunk in prev.chunks(m as usize) {
            up.push(chunk.iter().sum::<f64>() / m as f64);
        }
        levels.push(up);
    }
    levels.reverse(); // levels[0] = whole interval
    let mean_g = levels[0][0];
    // maximal value per leaf: max of the ancestor chain
    let mut maximal = vec![levels[0][0]; 1];
    for lvl in &levels[1..] {
        let mut next = Vec::with_capacity(lvl.len());
        for (i, &avg) in lvl.iter().enumerate() {
            next.push(maximal[i / m as usize].max(avg));
        }
        maximal = next;
    }
    let inv_n = 1.0 / maximal.len() as f64;
    let mut entries = Vec::with_capacity(q_grid.len());
    let mut q_max = None;
    for &q in q_grid {
        let mean_mq: f64 = maximal.iter().map(|&v| v.powf(q)).sum::<f64>() * inv_n;
        let c_tilde = mean_mq.powf(1.0 / q) / mean_g;
        if c_tilde <= cap {
            q_max = Some(q);
        }
        entries.push(RhEntry { q, c_tilde });
    }
    Ok(RhProfile { entries, q_max, cap })
}

/// Profile from a sampled trace of g on [0, ℓ]; leaf averages come from
/// trapezoid quadrature within each level-k interval.
pub fn reverse_holder_exponent(
    g: &[f64],
    m: u64,
    k: u32,
    q_grid: &[f64],
    cap: f64,
) -> Result<RhProfile> {
    let n = g.len().saturating_sub(1);
    let leaves = (m as usize).pow(k);
    if n == 0 || n % leaves != 0 {
        return Err(Error::DegenerateTrace(format!(
            "trace with {n} steps does not subdivide into {leaves} leaves"
        )));
    }
    let per = n / leaves;
    let mut leaf_avg = Vec::with_capacity(leaves);
    for leaf in 0..leaves {
        let lo = leaf * per;
        let mut s = 0.0;
        for i in lo..lo + per {
            s += 0.5 * (g[i] + g[i + 1]);
        }
        leaf_avg.push(s / per as f64);
    }
    reverse_holder_from_leaf_averages(&leaf_avg, m, k, q_grid, cap)
}

/// Restricted maximal function on the trace samples: sup of interval averages
/// over m-adic intervals of level ≤ k containing the sample. Samples on
/// shared endpoints take the max over both sides.
pub fn restricted_maximal_on_samples(g: &[f64], m: u64, k: u32) -> Result<Vec<f64>> {
    let n = g.len().saturating_sub(1);
    let leaves = (m as usize).pow(k);
    if n == 0 || n % leaves != 0 {
        return Err(Error::DegenerateTrace(format!(
            "trace with {n} steps does not subdivide into {leaves} leaves"
        )));
    }
    // trapezoid prefix on the unit-step grid
    let mut prefix = vec![0.0];
    for i in 0..n {
        prefix.push(prefix[i] + 0.5 * (g[i] + g[i + 1]));
    }
    let mut out = vec![f64::NEG_INFINITY; g.len()];
    for level in 0..=k {
        let count = (m as usize).pow(level);
        let span = n / count;
        for idx in 0..count {
            let lo = idx * span;
            let hi = lo + span;
            let avg = (prefix[hi] - prefix[lo]) / span as f64;
            for i in lo..=hi {
                if avg > out[i] {
                    out[i] = avg;
                }
            }
        }
    }
    Ok(out)
}
