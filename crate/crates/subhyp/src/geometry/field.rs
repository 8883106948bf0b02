use super::{parity_from_spans, Norm, PlanarDomain, Point};
use crate::error::{Error, Result};

/// Gridded samples of dist(·, ∂Ω) over the bounding box. Every inside cell
/// stores the exact boundary distance of its center; the field is not a
/// propagated approximation.
#[derive(Clone, Debug)]
pub struct DistanceField {
    origin: Point,
    h: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    inside: Vec<bool>,
    inside_count: usize,
    norm: Norm,
    mask_prefix: Vec<u32>,
}

impl DistanceField {
    pub fn build(domain: &PlanarDomain, h: f64, norm: Norm) -> Result<Self> {
        let bbox = domain.bbox();
        let diam = domain.diam(Norm::Euclidean);
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        if h >= diam / 8.0 {
            return Err(Error::ResolutionTooCoarse(format!(
                "spacing {h} must be below diam/8 = {}",
                diam / 8.0
            )));
        }
        let nx = (bbox.width() / h).ceil() as usize;
        let ny = (bbox.height() / h).ceil() as usize;
        let mut values = vec![f64::INFINITY; nx * ny];
        let mut inside = vec![false; nx * ny];
        let mut inside_count = 0usize;
        for j in 0..ny {
            let y = bbox.min.y + (j as f64 + 0.5) * h;
            let spans = domain.row_spans(y);
            for i in 0..nx {
                let x = bbox.min.x + (i as f64 + 0.5) * h;
                if parity_from_spans(&spans, x) {
                    let d = domain.dist_to_boundary(Point::new(x, y), norm);
                    if d > 0.0 {
                        values[j * nx + i] = d;
                        inside[j * nx + i] = true;
                        inside_count += 1;
                    }
                }
            }
        }
        if inside_count < 16 {
            return Err(Error::ResolutionTooCoarse(format!(
                "only {inside_count} inside cells at spacing {h}"
            )));
        }
        // prefix sums of the mask, for O(1) cell counting in window queries
        let mut mask_prefix = vec![0u32; (nx + 1) * (ny + 1)];
        for j in 0..ny {
            let mut row = 0u32;
            for i in 0..nx {
                row += inside[j * nx + i] as u32;
                mask_prefix[(j + 1) * (nx + 1) + i + 1] = mask_prefix[j * (nx + 1) + i + 1] + row;
            }
        }
        Ok(DistanceField {
            origin: bbox.min,
            h,
            nx,
            ny,
            values,
            inside,
            inside_count,
            norm,
            mask_prefix,
        })
    }

    pub fn origin(&self) -> Point {
        self.origin
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
    pub fn norm(&self) -> Norm {
        self.norm
    }
    pub fn inside_count(&self) -> usize {
        self.inside_count
    }
    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.inside[j * self.nx + i]
    }

    /// Exact boundary distance of the cell center; +inf outside.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Cell indices containing `p`, clamped to the grid.
    pub fn locate(&self, p: Point) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.h).floor();
        let j = ((p.y - self.origin.y) / self.h).floor();
        (
            (i.max(0.0) as usize).min(self.nx.saturating_sub(1)),
            (j.max(0.0) as usize).min(self.ny.saturating_sub(1)),
        )
    }

    /// Number of inside cells with centers in [i0, i1) x [j0, j1).
    pub fn count_inside(&self, i0: usize, j0: usize, i1: usize, j1: usize) -> u32 {
        let i0 = i0.min(self.nx);
        let i1 = i1.min(self.nx);
        let j0 = j0.min(self.ny);
        let j1 = j1.min(self.ny);
        if i0 >= i1 || j0 >= j1 {
            return 0;
        }
        let w = self.nx + 1;
        self.mask_prefix[j1 * w + i1] + self.mask_prefix[j0 * w + i0]
            - self.mask_prefix[j0 * w + i1]
            - self.mask_prefix[j1 * w + i0]
    }
}
