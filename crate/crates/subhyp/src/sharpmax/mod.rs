//! Local polynomial approximation, sharp maximal functions, and the
//! extension criterion. E_k(f; Q) is the mean-normalized best approximation
//! of f on Q ∩ Ω by polynomials of degree below k; the sharp maximal function
//! takes sup over radii of r^{−k} E_k, and a function extends (at grid scale)
//! when both it and its sharp maximal function have stable L_q norms.

pub mod function;

pub use function::{parse as parse_function, AnalyticField, TrigKind, Var};

use crate::error::{Error, Result};
use crate::geometry::{parity_from_spans, Cube, PlanarDomain, Point};
use crate::selfimprove::compute_exponents;
use serde::Serialize;

/// Scalar samples on a cell grid restricted to Ω's inside mask, optionally
/// carrying the analytic source with exact derivatives.
#[derive(Clone, Debug)]
pub struct ScalarField {
    origin: Point,
    h: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    inside: Vec<bool>,
    pub source: Option<AnalyticField>,
}

impl ScalarField {
    pub fn from_function(domain: &PlanarDomain, h: f64, source: AnalyticField) -> Result<Self> {
        let mut field = Self::from_fn(domain, h, |x, y| source.eval(x, y))?;
        field.source = Some(source);
        Ok(field)
    }

    pub fn from_fn(
        domain: &PlanarDomain,
        h: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter("spacing must be positive".into()));
        }
        let bbox = domain.bbox();
        let nx = (bbox.width() / h).ceil() as usize;
        let ny = (bbox.height() / h).ceil() as usize;
        let mut values = vec![0.0; nx * ny];
        let mut inside = vec![false; nx * ny];
        let mut count = 0usize;
        for j in 0..ny {
            let y = bbox.min.y + (j as f64 + 0.5) * h;
            let spans = domain.row_spans(y);
            for i in 0..nx {
                let x = bbox.min.x + (i as f64 + 0.5) * h;
                if parity_from_spans(&spans, x) {
                    inside[j * nx + i] = true;
                    values[j * nx + i] = f(x, y);
                    count += 1;
                }
            }
        }
        if count < 16 {
            return Err(Error::ResolutionTooCoarse(format!("only {count} inside cells")));
        }
        Ok(ScalarField { origin: bbox.min, h, nx, ny, values, inside, source: None })
    }

    /// Same grid, new values from a function of the cell center.
    pub fn map_grid(&self, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let mut out = self.clone();
        out.source = None;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.inside[j * self.nx + i] {
                    let c = self.cell_center(i, j);
                    out.values[j * self.nx + i] = f(c.x, c.y);
                }
            }
        }
        out
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        Point::new(self.origin.x + (i as f64 + 0.5) * self.h, self.origin.y + (j as f64 + 0.5) * self.h)
    }

    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.inside[j * self.nx + i]
    }

    /// Value at a cell; zero outside Ω (extension by zero).
    pub fn value(&self, i: usize, j: usize) -> f64 {
        if self.is_inside(i, j) {
            self.values[j * self.nx + i]
        } else {
            0.0
        }
    }

    pub fn inside_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.nx;
        self.inside
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(u, _)| (u % nx, u / nx))
    }

    /// L_q(Ω) norm by cell quadrature.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let cell = self.h * self.h;
        let mut s = 0.0;
        for (i, j) in self.inside_cells() {
            s += self.value(i, j).abs().powf(q) * cell;
        }
        s.powf(1.0 / q)
    }

    /// Summed-area table of |values| with zero extension.
    fn abs_sat(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut sat = vec![0.0; (nx + 1) * (ny + 1)];
        for j in 0..ny {
            let mut row = 0.0;
            for i in 0..nx {
                row += self.value(i, j).abs();
                sat[(j + 1) * (nx + 1) + i + 1] = sat[j * (nx + 1) + i + 1] + row;
            }
        }
        sat
    }

    /// Sum of |values| over cells with centers in the closed cube, clamped to
    /// the grid (cells beyond it are zero by extension).
    fn window_abs_sum(&self, sat: &[f64], cube: &Cube) -> f64 {
        let i0 = (((cube.center.x - cube.radius - self.origin.x) / self.h - 0.5).ceil()).max(0.0)
            as usize;
        let j0 = (((cube.center.y - cube.radius - self.origin.y) / self.h - 0.5).ceil()).max(0.0)
            as usize;
        let i1f = (cube.center.x + cube.radius - self.origin.x) / self.h - 0.5;
        let j1f = (cube.center.y + cube.radius - self.origin.y) / self.h - 0.5;
        if i1f < 0.0 || j1f < 0.0 {
            return 0.0;
        }
        let i1 = (i1f.floor() as usize + 1).min(self.nx);
        let j1 = (j1f.floor() as usize + 1).min(self.ny);
        if i0 >= i1 || j0 >= j1 {
            return 0.0;
        }
        let w = self.nx + 1;
        sat[j1 * w + i1] + sat[j0 * w + i0] - sat[j0 * w + i1] - sat[j1 * w + i0]
    }

    fn window_range(&self, cube: &Cube) -> (usize, usize, usize, usize) {
        let i0 = (((cube.center.x - cube.radius - self.origin.x) / self.h - 0.5).ceil()).max(0.0)
            as usize;
        let j0 = (((cube.center.y - cube.radius - self.origin.y) / self.h - 0.5).ceil()).max(0.0)
            as usize;
        let i1 = ((((cube.center.x + cube.radius - self.origin.x) / self.h - 0.5).floor()).max(-1.0)
            as isize
            + 1) as usize;
        let j1 = ((((cube.center.y + cube.radius - self.origin.y) / self.h - 0.5).floor()).max(-1.0)
            as isize
            + 1) as usize;
        (i0, j0, i1.min(self.nx), j1.min(self.ny))
    }
}

/// Polynomial candidate from a local fit, with coefficients in the monomial
/// basis centered at the cube center.
#[derive(Clone, Debug, Serialize)]
pub struct PolyApprox {
    pub degree: u32,
    /// coefficients for monomials (dx)^a (dy)^b ordered by total degree:
    /// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
    pub coeffs: Vec<f64>,
    pub residual: f64,
}

impl PolyApprox {
    pub fn eval(&self, center: Point, p: Point) -> f64 {
        let dx = p.x - center.x;
        let dy = p.y - center.y;
        let mut v = 0.0;
        let mut idx = 0;
        for deg in 0..=self.degree {
            for b in 0..=deg {
                let a = deg - b;
                v += self.coeffs[idx] * dx.powi(a as i32) * dy.powi(b as i32);
                idx += 1;
            }
        }
        v
    }
}

fn basis_dim(k: u32) -> usize {
    ((k * (k + 1)) / 2) as usize
}

fn basis_eval(k: u32, dx: f64, dy: f64, out: &mut [f64]) {
    let mut idx = 0;
    for deg in 0..k {
        for b in 0..=deg {
            let a = deg - b;
            out[idx] = dx.powi(a as i32) * dy.powi(b as i32);
            idx += 1;
        }
    }
}

/// Dense symmetric solve by Gaussian elimination with partial pivoting;
/// dimensions stay at or below 6.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in (row + 1)..n {
            s -= a[row * n + c] * x[c];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

fn weighted_l2_fit(
    field: &ScalarField,
    cube: &Cube,
    cells: &[(usize, usize)],
    k: u32,
    weights: Option<&[f64]>,
) -> Option<Vec<f64>> {
    let dim = basis_dim(k);
    let mut gram = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    let mut phi = vec![0.0; dim];
    let r = cube.radius;
    for (ci, &(i, j)) in cells.iter().enumerate() {
        let c = field.cell_center(i, j);
        basis_eval(k, (c.x - cube.center.x) / r, (c.y - cube.center.y) / r, &mut phi);
        let w = weights.map(|w| w[ci]).unwrap_or(1.0);
        let f = field.value(i, j);
        for a in 0..dim {
            for b in a..dim {
                gram[a * dim + b] += w * phi[a] * phi[b];
            }
            rhs[a] += w * phi[a] * f;
        }
    }
    for a in 0..dim {
        for b in 0..a {
            gram[a * dim + b] = gram[b * dim + a];
        }
    }
    solve_dense(gram, rhs, dim)
}

fn residuals(
    field: &ScalarField,
    cube: &Cube,
    cells: &[(usize, usize)],
    k: u32,
    coeffs: &[f64],
) -> Vec<f64> {
    let dim = basis_dim(k);
    let mut phi = vec![0.0; dim];
    let r = cube.radius;
    cells
        .iter()
        .map(|&(i, j)| {
            let c = field.cell_center(i, j);
            basis_eval(k, (c.x - cube.center.x) / r, (c.y - cube.center.y) / r, &mut phi);
            let p: f64 = coeffs.iter().zip(&phi).map(|(c, p)| c * p).sum();
            field.value(i, j) - p
        })
        .collect()
}

/// Mean-normalized residual norm: ((1/|Q|) Σ |res|^q h²)^{1/q}, or the sup
/// for q = ∞. The normalization uses the full cube measure.
fn residual_norm(res: &[f64], h: f64, cube: &Cube, q: f64) -> f64 {
    if q.is_infinite() {
        return res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    }
    let cell = h * h;
    let s: f64 = res.iter().map(|r| r.abs().powf(q) * cell).sum();
    (s / cube.measure()).powf(1.0 / q)
}

/// Normalized best approximation E_k(f; Q)_{L_q(Ω)} with the fitted
/// candidate. The L₂ least-squares fit supplies the candidate; for q = ∞ it
/// is refined by five rounds of sup-residual reweighting plus a constant
/// shift, yielding an upper bound on the true infimum.
pub fn local_best_approx(
    field: &ScalarField,
    cube: &Cube,
    k: u32,
    q: f64,
) -> Result<(f64, PolyApprox)> {
    if k == 0 {
        return Err(Error::InvalidParameter("approximation order k must be positive".into()));
    }
    let (i0, j0, i1, j1) = field.window_range(cube);
    let mut cells = Vec::new();
    for j in j0..j1 {
        for i in i0..i1 {
            if field.is_inside(i, j) {
                cells.push((i, j));
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let mut coeffs = weighted_l2_fit(field, cube, &cells, k, None)
        .ok_or_else(|| Error::InvalidParameter("degenerate local fit".into()))?;
    if q.is_infinite() {
        let mut weights = vec![1.0; cells.len()];
        for _ in 0..5 {
            let res = residuals(field, cube, &cells, k, &coeffs);
            let mut total = 0.0;
            for (w, r) in weights.iter_mut().zip(&res) {
                *w *= r.abs() + 1e-30;
                total += *w;
            }
            let mean = total / weights.len() as f64;
            if !(mean > 0.0) {
                break;
            }
            for w in &mut weights {
                *w /= mean;
            }
            if let Some(next) = weighted_l2_fit(field, cube, &cells, k, Some(&weights)) {
                coeffs = next;
            } else {
                break;
            }
        }
        // centering the residual range is always optimal for the constant term
        let res = residuals(field, cube, &cells, k, &coeffs);
        let hi = res.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = res.iter().cloned().fold(f64::INFINITY, f64::min);
        coeffs[0] += 0.5 * (hi + lo);
    }
    let res = residuals(field, cube, &cells, k, &coeffs);
    let e = residual_norm(&res, field.spacing(), cube, q);
    // rescale coefficients to the unscaled centered monomials
    let mut unscaled = coeffs.clone();
    let mut idx = 0;
    for deg in 0..k {
        for _ in 0..=deg {
            unscaled[idx] /= cube.radius.powi(deg as i32);
            idx += 1;
        }
    }
    Ok((e, PolyApprox { degree: k - 1, coeffs: unscaled, residual: e }))
}

/// E_k for a supplied candidate, used to compare norms at a fixed polynomial.
pub fn eval_e_with_candidate(
    field: &ScalarField,
    cube: &Cube,
    poly: &PolyApprox,
    q: f64,
) -> Result<f64> {
    let (i0, j0, i1, j1) = field.window_range(cube);
    let mut res = Vec::new();
    for j in j0..j1 {
        for i in i0..i1 {
            if field.is_inside(i, j) {
                let c = field.cell_center(i, j);
                res.push(field.value(i, j) - poly.eval(cube.center, c));
            }
        }
    }
    if res.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(residual_norm(&res, field.spacing(), cube, q))
}

/// Dyadic radius set {h·2^j : jmin ≤ j ≤ jmax}.
pub fn dyadic_radii(h: f64, jmin: i32, jmax: i32) -> Vec<f64> {
    (jmin..=jmax).map(|j| h * 2f64.powi(j)).collect()
}

/// Snap a radius to the cell lattice: the window of cells whose centers fall
/// in the cube then fills its measure exactly, so cell quadrature of cube
/// averages is unbiased (a constant averages to itself on interior windows).
fn snap_radius(h: f64, r: f64) -> f64 {
    let w = (r / h - 0.5).round().max(0.0);
    (w + 0.5) * h
}

fn snapped_radii(h: f64, radii: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = radii.iter().map(|&r| snap_radius(h, r)).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

#[derive(Clone, Debug)]
pub struct SharpField {
    /// f♯ values on the field grid (zero outside Ω)
    pub values: ScalarField,
    /// radius attaining the sup per cell
    pub argmax_radius: Vec<f64>,
}

/// Sharp maximal function: pointwise sup over the radius set of
/// r^{−k} E_k(f; Q(x, r))_{L₁(Ω)}.
pub fn sharp_maximal(field: &ScalarField, k: u32, radii: &[f64]) -> Result<SharpField> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("radius set must be nonempty".into()));
    }
    let radii = snapped_radii(field.spacing(), radii);
    let mut out = field.clone();
    out.source = None;
    let mut argmax = vec![0.0; field.nx * field.ny];
    for j in 0..field.ny() {
        for i in 0..field.nx() {
            if !field.is_inside(i, j) {
                out.values[j * field.nx + i] = 0.0;
                continue;
            }
            let x = field.cell_center(i, j);
            let mut best = 0.0f64;
            let mut best_r = radii[0];
            for &r in &radii {
                let cube = Cube { center: x, radius: r };
                let (e, _) = match local_best_approx(field, &cube, k, 1.0) {
                    Ok(v) => v,
                    Err(Error::EmptyIntersection) => continue,
                    Err(e) => return Err(e),
                };
                let v = e / r.powi(k as i32);
                if v > best {
                    best = v;
                    best_r = r;
                }
            }
            out.values[j * field.nx + i] = best;
            argmax[j * field.nx + i] = best_r;
        }
    }
    Ok(SharpField { values: out, argmax_radius: argmax })
}

/// Hardy–Littlewood maximal function of the zero extension: sup over the
/// radius set of cube averages of |f|, computed with a summed-area table.
pub fn hl_maximal(field: &ScalarField, radii: &[f64]) -> Result<ScalarField> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("radius set must be nonempty".into()));
    }
    let radii = snapped_radii(field.spacing(), radii);
    let sat = field.abs_sat();
    let mut out = field.clone();
    out.source = None;
    let cell = field.h * field.h;
    for j in 0..field.ny() {
        for i in 0..field.nx() {
            if !field.is_inside(i, j) {
                out.values[j * field.nx + i] = 0.0;
                continue;
            }
            let x = field.cell_center(i, j);
            let mut best = 0.0f64;
            for &r in &radii {
                let cube = Cube { center: x, radius: r };
                let avg = field.window_abs_sum(&sat, &cube) * cell / cube.measure();
                if avg > best {
                    best = avg;
                }
            }
            out.values[j * field.nx + i] = best;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TaylorScaleRow {
    pub scale: f64,
    pub pairs: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaylorReport {
    pub p_star: f64,
    pub lambda: f64,
    pub rows: Vec<TaylorScaleRow>,
    /// growth rate of the max ratio as the scale shrinks (positive = grows);
    /// boundedness shows as a rate near zero
    pub growth_rate: f64,
    /// pairs where the right side vanished while the left did not
    pub degenerate_pairs: usize,
}

/// Remainder inequality check: for pairs (x, y) and every |β| < k, compare
/// |D^β T_x(f)(x) − D^β T_y(f)(x)| against ‖x−y‖^{k−|β|−n/p*} times the
/// L^{p*} mass of ‖∇^k f‖ on the dilated cube λQ_xy ∩ Ω. Ratios are grouped
/// by dyadic pair scale.
pub fn taylor_remainder_check(
    field: &ScalarField,
    _domain: &PlanarDomain,
    alpha: f64,
    c: f64,
    k: u32,
    pairs: &[(Point, Point)],
) -> Result<TaylorReport> {
    let source = field.source.as_ref().ok_or(Error::MissingDerivatives)?;
    let record = compute_exponents(alpha, c, 1.0, 1.0, 2, None)?;
    let p_star = record.p_star;
    // λ = 2·(2 e^{2C}), the dilation carrying the curve construction
    let lambda = 4.0 * (2.0 * c).exp();
    // cell mass of ‖∇^k f‖^{p*}, summed by table for O(1) window queries
    let grad_field = field.map_grid(|x, y| source.grad_norm(k, x, y).powf(p_star));
    let sat = grad_field.abs_sat();
    let cell = field.h * field.h;

    let mut samples: Vec<(f64, f64)> = Vec::new(); // (scale, ratio)
    let mut degenerate = 0usize;
    for &(x, y) in pairs {
        let s = x.dist(y, crate::geometry::Norm::Uniform);
        if !(s > 0.0) {
            continue;
        }
        let cube = Cube { center: x, radius: lambda * s };
        let mass = grad_field.window_abs_sum(&sat, &cube) * cell;
        let rhs_integral = mass.powf(1.0 / p_star);
        for bx in 0..k {
            for by in 0..(k - bx) {
                let lhs = (source.d_beta(bx, by).eval(x.x, x.y)
                    - source.taylor_deriv_at((bx, by), (y.x, y.y), k - 1, (x.x, x.y)))
                .abs();
                let expo = k as f64 - (bx + by) as f64 - 2.0 / p_star;
                let rhs = s.powf(expo) * rhs_integral;
                if rhs > 0.0 {
                    samples.push((s, lhs / rhs));
                } else if lhs > 1e-12 {
                    degenerate += 1;
                }
            }
        }
    }
    // dyadic buckets over the sampled scales
    let mut rows: Vec<TaylorScaleRow> = Vec::new();
    if !samples.is_empty() {
        let max_scale = samples.iter().map(|s| s.0).fold(f64::MIN, f64::max);
        for (s, ratio) in &samples {
            let j = (max_scale / s).log2().round() as i32;
            let bucket = max_scale / 2f64.powi(j);
            match rows.iter_mut().find(|r| (r.scale - bucket).abs() < 1e-12 * bucket) {
                Some(row) => {
                    row.pairs += 1;
                    row.max_ratio = row.max_ratio.max(*ratio);
                }
                None => rows.push(TaylorScaleRow { scale: bucket, pairs: 1, max_ratio: *ratio }),
            }
        }
        rows.sort_by(|a, b| b.scale.partial_cmp(&a.scale).unwrap());
    }
    let growth_rate = if rows.len() >= 2 {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.max_ratio > 0.0)
            .map(|r| (r.scale.ln(), r.max_ratio.ln()))
            .collect();
        if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            -(sxy / sxx)
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(TaylorReport { p_star, lambda, rows, growth_rate, degenerate_pairs: degenerate })
}

#[derive(Clone, Debug, Serialize)]
pub struct Cor2Report {
    pub p_star: f64,
    pub theta: f64,
    /// max over cells of f♯ / (ℳ[(‖∇^k f‖^∨)^{p*}]^{1/p*} + ℳ[f^∨])
    pub max_ratio: f64,
    /// small radii (≤ θ) against the gradient term alone
    pub max_ratio_small: f64,
    /// large radii (> θ) against θ^{−k} ℳ[f^∨]
    pub max_ratio_large: f64,
    pub cells: usize,
}

/// Pointwise comparison of the sharp maximal function against the maximal
/// functions of the gradient mass and of the function itself, with radii
/// split at θ.
pub fn cor2_check(
    field: &ScalarField,
    _domain: &PlanarDomain,
    k: u32,
    p: f64,
    radii: &[f64],
    theta: f64,
) -> Result<Cor2Report> {
    let source = field.source.as_ref().ok_or(Error::MissingDerivatives)?;
    let alpha = crate::certify::alpha_from_p(p, 2)?;
    let record = compute_exponents(alpha, 1.0, 1.0, 1.0, 2, None)?;
    let p_star = record.p_star;
    let grad_field = field.map_grid(|x, y| source.grad_norm(k, x, y).powf(p_star));
    let m_grad = hl_maximal(&grad_field, radii)?;
    let m_f = hl_maximal(field, radii)?;
    let small: Vec<f64> = radii.iter().copied().filter(|&r| r <= theta).collect();
    let large: Vec<f64> = radii.iter().copied().filter(|&r| r > theta).collect();
    let sharp = sharp_maximal(field, k, radii)?;
    let sharp_small =
        if small.is_empty() { None } else { Some(sharp_maximal(field, k, &small)?) };
    let sharp_large =
        if large.is_empty() { None } else { Some(sharp_maximal(field, k, &large)?) };

    let mut max_ratio = 0.0f64;
    let mut max_small = 0.0f64;
    let mut max_large = 0.0f64;
    let mut cells = 0usize;
    for (i, j) in field.inside_cells() {
        cells += 1;
        let t1 = m_grad.value(i, j).powf(1.0 / p_star);
        let t2 = m_f.value(i, j);
        let denom = t1 + t2;
        let fs = sharp.values.value(i, j);
        if denom > 0.0 {
            max_ratio = max_ratio.max(fs / denom);
        }
        if let Some(ss) = &sharp_small {
            if t1 > 0.0 {
                max_small = max_small.max(ss.values.value(i, j) / t1);
            }
        }
        if let Some(sl) = &sharp_large {
            let cap = theta.powi(-(k as i32)) * t2;
            if cap > 0.0 {
                max_large = max_large.max(sl.values.value(i, j) / cap);
            }
        }
    }
    Ok(Cor2Report {
        p_star,
        theta,
        max_ratio,
        max_ratio_small: max_small,
        max_ratio_large: max_large,
        cells,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtendVerdict {
    Extendable,
    NotExtendable,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCriterionReport {
    pub norm_f: f64,
    pub norm_sharp: f64,
    /// sharp-function norm after one radius-set refinement (geometric
    /// midpoints inserted)
    pub norm_sharp_refined: f64,
    pub radius_change: f64,
    /// sharp-function norm on the half-spacing grid, when supplied; a jump
    /// makes this grow like h^{−(1−1/q)}
    pub norm_sharp_fine: Option<f64>,
    pub grid_change: Option<f64>,
    pub stable: bool,
    pub verdict: ExtendVerdict,
    pub sigma_regularity: f64,
}

/// Extension criterion at grid scale: both ‖f‖_{L_q(Ω)} and
/// ‖f♯_{k,Ω}‖_{L_q(Ω)} finite and stable under refinement of the radius set
/// and, when a half-spacing resampling is supplied, of the grid. This
/// evaluates the criterion's two norms; no extension operator is built.
pub fn extension_criterion(
    field: &ScalarField,
    fine_field: Option<&ScalarField>,
    domain: &PlanarDomain,
    k: u32,
    q: f64,
    radii: &[f64],
) -> Result<ExtensionCriterionReport> {
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!("need q > 1, got {q}")));
    }
    // regularity must not diverge under refinement
    let h_reg = domain.diam(crate::geometry::Norm::Euclidean) / 64.0;
    let delta = domain.diam(crate::geometry::Norm::Euclidean) / 4.0;
    let coarse = crate::geometry::regularity_constants(domain, h_reg, delta)?;
    let fine = crate::geometry::regularity_constants(domain, h_reg / 2.0, delta)?;
    if fine.sigma > 2.0 * coarse.sigma.max(1.0) {
        return Err(Error::NotRegular { sigma_coarse: coarse.sigma, sigma_fine: fine.sigma });
    }
    let norm_f = field.lq_norm(q);
    let sharp = sharp_maximal(field, k, radii)?;
    let norm_sharp = sharp.values.lq_norm(q);
    // radius refinement: insert geometric midpoints
    let mut refined: Vec<f64> = Vec::with_capacity(radii.len() * 2);
    for (i, &r) in radii.iter().enumerate() {
        refined.push(r);
        if i + 1 < radii.len() {
            refined.push((r * radii[i + 1]).sqrt());
        }
    }
    let sharp_ref = sharp_maximal(field, k, &refined)?;
    let norm_sharp_refined = sharp_ref.values.lq_norm(q);
    let floor = 1e-9 * norm_f.max(1e-300);
    let rel = |a: f64, b: f64| {
        if a.max(b) <= floor {
            0.0
        } else {
            (a - b).abs() / a.max(b)
        }
    };
    let radius_change = rel(norm_sharp, norm_sharp_refined);
    // grid refinement sees divergence below the coarse cell scale: the fine
    // field is probed with cell-relative radii so its own small scales enter
    let (norm_sharp_fine, grid_change) = match fine_field {
        Some(ff) => {
            let scale = ff.spacing() / field.spacing();
            let fine_radii: Vec<f64> = radii.iter().map(|&r| r * scale).collect();
            let sharp_fine = sharp_maximal(ff, k, &fine_radii)?;
            let n = sharp_fine.values.lq_norm(q);
            (Some(n), Some(rel(norm_sharp, n)))
        }
        None => (None, None),
    };
    let stable = radius_change <= 0.05
        && grid_change.map(|g| g <= 0.2).unwrap_or(true)
        && norm_f.is_finite()
        && norm_sharp_refined.is_finite();
    Ok(ExtensionCriterionReport {
        norm_f,
        norm_sharp,
        norm_sharp_refined,
        radius_change,
        norm_sharp_fine,
        grid_change,
        stable,
        verdict: if stable { ExtendVerdict::Extendable } else { ExtendVerdict::NotExtendable },
        sigma_regularity: fine.sigma,
    })
}
