//! Per-vertex geometric measures: summed ring-wise harmonic means of
//! tangent-plane distances and of normal angles.

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalField, RingNeighborhoods};

/// Per-vertex measures on one scale level. `None` marks a vertex without a
/// usable normal.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureField {
    pub rings: usize,
    pub dbar: Vec<Option<f64>>,
    pub thetabar: Vec<Option<f64>>,
}

/// Distance from `p` to the plane through `v` with unit normal `n`.
#[inline]
pub fn tangent_plane_distance(v: &Point3<f64>, n: &Vector3<f64>, p: &Point3<f64>) -> f64 {
    n.dot(&(p - v)).abs()
}

/// Angle in `[0, pi]` between two unit vectors.
#[inline]
pub fn angle_between_normals(n: &Vector3<f64>, m: &Vector3<f64>) -> f64 {
    n.dot(m).clamp(-1.0, 1.0).acos()
}

/// `W / sum(1 / x_j)` for nonnegative values. A zero element drives the
/// mean to its limit 0; an empty list also yields 0.
pub fn harmonic_mean(values: &[f64]) -> f64 {
    harmonic_mean_iter(values.iter().copied())
}

fn harmonic_mean_iter(values: impl Iterator<Item = f64>) -> f64 {
    let mut count = 0usize;
    let mut reciprocal_sum = 0.0;
    for x in values {
        if x <= 0.0 {
            return 0.0;
        }
        count += 1;
        reciprocal_sum += 1.0 / x;
    }
    if count == 0 {
        0.0
    } else {
        count as f64 / reciprocal_sum
    }
}

fn check_depth(rings: &RingNeighborhoods, k: usize) -> Result<()> {
    if k == 0 || rings.depth() < k {
        return Err(Error::InvalidParameter(format!(
            "need 1..={} rings, requested {k}",
            rings.depth()
        )));
    }
    Ok(())
}

/// `sum_{k=1..K} H({ d_kj : u_j in V_k(v) })` per vertex.
pub fn distance_measure(
    mesh: &Mesh,
    normals: &NormalField,
    rings: &RingNeighborhoods,
    k: usize,
) -> Result<Vec<Option<f64>>> {
    check_depth(rings, k)?;
    let points = mesh.vertices();
    Ok((0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| {
            let n = normals.get(v)?;
            let origin = &points[v];
            Some(
                (1..=k)
                    .map(|ring| {
                        harmonic_mean_iter(
                            rings
                                .ring(v, ring)
                                .iter()
                                .map(|&u| tangent_plane_distance(origin, n, &points[u])),
                        )
                    })
                    .sum(),
            )
        })
        .collect())
}

/// `sum_{k=1..K} H({ theta_kj : u_j in V_k(v) })` per vertex. Neighbors
/// without a normal are left out of their ring.
pub fn angle_measure(
    normals: &NormalField,
    rings: &RingNeighborhoods,
    k: usize,
) -> Result<Vec<Option<f64>>> {
    check_depth(rings, k)?;
    Ok((0..normals.len())
        .into_par_iter()
        .map(|v| {
            let n = normals.get(v)?;
            Some(
                (1..=k)
                    .map(|ring| {
                        harmonic_mean_iter(
                            rings
                                .ring(v, ring)
                                .iter()
                                .filter_map(|&u| normals.get(u))
                                .map(|m| angle_between_normals(n, m)),
                        )
                    })
                    .sum(),
            )
        })
        .collect())
}

pub fn compute_measures(
    mesh: &Mesh,
    normals: &NormalField,
    rings: &RingNeighborhoods,
    k: usize,
) -> Result<MeasureField> {
    Ok(MeasureField {
        rings: k,
        dbar: distance_measure(mesh, normals, rings, k)?,
        thetabar: angle_measure(normals, rings, k)?,
    })
}
