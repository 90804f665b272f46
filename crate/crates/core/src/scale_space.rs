//! Gaussian scale space over vertex positions.
//!
//! Each level replaces every vertex by the normalized Gaussian-weighted mean
//! of the source vertices inside a Euclidean ball of radius `3 * delta`
//! around it. Connectivity is untouched, so ring neighborhoods computed on
//! the source mesh remain valid for every level.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{bbox_diagonal, compute_vertex_normals, Mesh, NormalField};

/// Base scale as a fraction of the bounding-box main diagonal.
pub const BASE_SCALE_FRACTION: f64 = 0.003;

/// Kernel support radius in standard deviations.
pub const KERNEL_SUPPORT: f64 = 3.0;

pub fn base_scale(mesh: &Mesh) -> Result<f64> {
    let diagonal = bbox_diagonal(mesh)?;
    if diagonal <= 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    Ok(BASE_SCALE_FRACTION * diagonal)
}

/// Uniform hash grid with cell edge equal to the query radius, so a ball
/// query only visits the 27 cells around the query point.
struct HashGrid {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

impl HashGrid {
    fn new(points: &[Point3<f64>], cell: f64) -> Self {
        let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { cell, buckets }
    }

    fn key(p: &Point3<f64>, cell: f64) -> [i64; 3] {
        [
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        ]
    }

    fn for_each_near(&self, p: &Point3<f64>, mut f: impl FnMut(usize)) {
        let [x, y, z] = Self::key(p, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = self.buckets.get(&[x + dx, y + dy, z + dz]) {
                        bucket.iter().copied().for_each(&mut f);
                    }
                }
            }
        }
    }
}

/// One Gaussian smoothing pass with standard deviation `delta`.
pub fn gaussian_smooth(mesh: &Mesh, delta: f64) -> Result<Mesh> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "smoothing scale must be positive, got {delta}"
        )));
    }
    let points = mesh.vertices();
    let radius = KERNEL_SUPPORT * delta;
    let radius_sq = radius * radius;
    let inv_two_var = 1.0 / (2.0 * delta * delta);
    let grid = HashGrid::new(points, radius);

    let smoothed = points
        .par_iter()
        .map(|p| {
            // accumulate offsets from p; the self term contributes weight 1
            // and a zero offset
            let mut weight_sum = 0.0;
            let mut offset = Vector3::zeros();
            let mut near = Vec::new();
            grid.for_each_near(p, |j| near.push(j));
            near.sort_unstable();
            for j in near {
                let d = points[j] - p;
                let dist_sq = d.norm_squared();
                if dist_sq <= radius_sq {
                    let w = (-dist_sq * inv_two_var).exp();
                    weight_sum += w;
                    offset += d * w;
                }
            }
            p + offset / weight_sum
        })
        .collect();
    Ok(mesh.with_positions(smoothed))
}

/// One evolved level of the scale space.
#[derive(Debug, Clone)]
pub struct ScaleLevel {
    pub multiplier: u32,
    pub delta: f64,
    pub mesh: Mesh,
    pub normals: NormalField,
}

#[derive(Debug, Clone)]
pub struct ScaleStack {
    base_scale: f64,
    levels: Vec<ScaleLevel>,
}

impl ScaleStack {
    pub fn base_scale(&self) -> f64 {
        self.base_scale
    }

    pub fn levels(&self) -> &[ScaleLevel] {
        &self.levels
    }

    pub fn multipliers(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.multiplier).collect()
    }
}

pub(crate) fn validate_multipliers(multipliers: &[u32]) -> Result<()> {
    if multipliers.is_empty() {
        return Err(Error::InvalidParameter("at least one scale multiplier required".into()));
    }
    if multipliers[0] == 0 || multipliers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "scale multipliers must be positive and strictly increasing, got {multipliers:?}"
        )));
    }
    Ok(())
}

/// Smooths `mesh` at `delta = s * base_scale(mesh)` for every multiplier
/// `s` and recomputes normals on each smoothed level.
pub fn build_scale_stack(mesh: &Mesh, multipliers: &[u32]) -> Result<ScaleStack> {
    validate_multipliers(multipliers)?;
    let eps = base_scale(mesh)?;
    let levels = multipliers
        .par_iter()
        .map(|&s| {
            let delta = f64::from(s) * eps;
            let smoothed = gaussian_smooth(mesh, delta)?;
            let normals = compute_vertex_normals(&smoothed);
            Ok(ScaleLevel {
                multiplier: s,
                delta,
                mesh: smoothed,
                normals,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaleStack {
        base_scale: eps,
        levels,
    })
}
