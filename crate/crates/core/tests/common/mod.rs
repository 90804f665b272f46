//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use meship_core::shapes;
use meship_core::Mesh;
use nalgebra::{Point3, Rotation3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// All-pairs shortest paths with Euclidean edge weights.
pub fn floyd_warshall(mesh: &Mesh) -> Vec<Vec<f64>> {
    let n = mesh.vertex_count();
    let p = mesh.vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
    }
    for tri in mesh.faces() {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            let w = (p[a] - p[b]).norm();
            d[a][b] = w;
            d[b][a] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// All-pairs hop counts (`usize::MAX` when disconnected).
pub fn hop_matrix(mesh: &Mesh) -> Vec<Vec<usize>> {
    let n = mesh.vertex_count();
    let mut d = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        d[i][i] = 0;
    }
    for tri in mesh.faces() {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            d[a][b] = 1;
            d[b][a] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == usize::MAX {
                continue;
            }
            for j in 0..n {
                if d[k][j] != usize::MAX && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Strict local maxima over every vertex within `n_rings` hops.
pub fn brute_force_nms(hops: &[Vec<usize>], rho: &[f64], n_rings: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..rho.len())
        .filter(|&v| {
            rho[v] > 0.0
                && (0..rho.len())
                    .filter(|&u| u != v && hops[v][u] <= n_rings)
                    .all(|u| rho[v] > rho[u])
        })
        .collect();
    out.sort_unstable();
    out
}

pub fn random_rotation(rng: &mut StdRng) -> Rotation3<f64> {
    let axis = Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let axis = nalgebra::Unit::new_normalize(axis + Vector3::new(1e-3, 0.0, 0.0));
    Rotation3::from_axis_angle(&axis, rng.gen_range(0.1..3.0))
}

pub fn rigid_motion(mesh: &Mesh, seed: u64) -> Mesh {
    let mut rng = StdRng::seed_from_u64(seed);
    let rotation = random_rotation(&mut rng);
    let shift = Vector3::new(
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
    );
    mesh.map_positions(|p| rotation * p + shift)
}

/// Unit icosphere with radial noise, each radius scaled by a factor drawn
/// uniformly from `[1 - noise, 1 + noise]`.
pub fn noisy_sphere(levels: usize, noise: f64, seed: u64) -> Mesh {
    let mut rng = StdRng::seed_from_u64(seed);
    let base = shapes::icosphere(levels);
    let moved = base
        .vertices()
        .iter()
        .map(|p| Point3::from(p.coords * (1.0 + rng.gen_range(-noise..=noise))))
        .collect();
    base.with_positions(moved)
}

/// Icosphere with the twelve original icosahedron vertices pulled outward
/// into spikes, plus mild radial noise everywhere.
pub fn spiky_sphere(levels: usize, seed: u64) -> Mesh {
    let mut rng = StdRng::seed_from_u64(seed);
    let base = shapes::icosphere(levels);
    let moved = base
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let lift = if i < 12 { 1.6 } else { 1.0 };
            Point3::from(p.coords * lift * (1.0 + rng.gen_range(-0.01..=0.01)))
        })
        .collect();
    base.with_positions(moved)
}

pub fn geometric_mean(v: &[f64]) -> f64 {
    (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp()
}

pub fn arithmetic_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn quadratic_mean(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}
