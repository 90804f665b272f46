//! Triangle mesh connectivity, vertex normals and ring neighborhoods.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// An indexed triangle mesh with derived 1-ring vertex adjacency.
///
/// Construction validates the face list, so every `Mesh` value satisfies:
/// face indices are in range, each face names three distinct vertices and
/// adjacency is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    adjacency: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let count = vertices.len();
        for (face, tri) in faces.iter().enumerate() {
            for &index in tri {
                if index >= count {
                    return Err(Error::IndexOutOfRange { face, index, count });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateFace { face });
            }
        }
        let adjacency = build_adjacency(count, &faces);
        Ok(Self {
            vertices,
            faces,
            adjacency,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Sorted 1-ring neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Same connectivity, new positions. Used by the scale space, which only
    /// ever moves vertices.
    pub fn with_positions(&self, vertices: Vec<Point3<f64>>) -> Self {
        assert_eq!(vertices.len(), self.vertices.len());
        Self {
            vertices,
            faces: self.faces.clone(),
            adjacency: self.adjacency.clone(),
        }
    }

    /// Applies `f` to every vertex position, keeping connectivity.
    pub fn map_positions(&self, f: impl Fn(&Point3<f64>) -> Point3<f64>) -> Self {
        self.with_positions(self.vertices.iter().map(f).collect())
    }

    /// Number of interior edges whose two incident faces traverse the edge in
    /// the same direction, i.e. disagree on winding. Zero for a consistently
    /// oriented mesh. Non-manifold edges are ignored.
    pub fn inconsistent_winding_edges(&self) -> usize {
        // (forward, backward) traversal counts per undirected edge (lo, hi)
        let mut edges: HashMap<(usize, usize), (u32, u32)> = HashMap::new();
        for tri in &self.faces {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let entry = edges.entry((a.min(b), a.max(b))).or_default();
                if a < b {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        edges
            .values()
            .filter(|&&(f, b)| f + b == 2 && (f == 2 || b == 2))
            .count()
    }
}

fn build_adjacency(count: usize, faces: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); count];
    for tri in faces {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    adjacency
}

/// Euclidean length of the axis-aligned bounding box main diagonal.
pub fn bbox_diagonal(mesh: &Mesh) -> Result<f64> {
    let first = mesh.vertices.first().ok_or(Error::EmptyMesh)?;
    let (mut lo, mut hi) = (first.coords, first.coords);
    for p in &mesh.vertices[1..] {
        lo = lo.inf(&p.coords);
        hi = hi.sup(&p.coords);
    }
    Ok((hi - lo).norm())
}

/// Per-vertex unit normals. `None` marks a vertex with no incident face or
/// a vanishing area-weighted normal sum; such vertices are excluded from
/// detection.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    normals: Vec<Option<Vector3<f64>>>,
}

impl NormalField {
    pub fn get(&self, v: usize) -> Option<&Vector3<f64>> {
        self.normals[v].as_ref()
    }

    pub fn as_slice(&self) -> &[Option<Vector3<f64>>] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Indices of vertices without a usable normal.
    pub fn degenerate(&self) -> Vec<usize> {
        self.normals
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.is_none().then_some(i))
            .collect()
    }
}

/// Relative threshold below which an area-weighted normal sum counts as zero.
const DEGENERATE_NORMAL_RATIO: f64 = 1e-12;

/// Area-weighted average of incident face normals, normalized.
///
/// The cross product of two triangle edges has length twice the face area,
/// so summing raw cross products gives the area weighting directly.
pub fn compute_vertex_normals(mesh: &Mesh) -> NormalField {
    let n = mesh.vertex_count();
    let mut sums = vec![Vector3::zeros(); n];
    let mut areas = vec![0.0f64; n];
    for tri in &mesh.faces {
        let [a, b, c] = tri.map(|i| mesh.vertices[i]);
        let cross = (b - a).cross(&(c - a));
        let len = cross.norm();
        for &i in tri {
            sums[i] += cross;
            areas[i] += len;
        }
    }
    let normals = sums
        .into_iter()
        .zip(areas)
        .map(|(sum, area)| {
            let len = sum.norm();
            if area > 0.0 && len > DEGENERATE_NORMAL_RATIO * area {
                Some(sum / len)
            } else {
                None
            }
        })
        .collect();
    NormalField { normals }
}

/// Breadth-first ring layers around every vertex: `ring(v, k)` holds the
/// vertices at graph distance exactly `k` from `v`, for `k` in `1..=depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct RingNeighborhoods {
    depth: usize,
    rings: Vec<Vec<Vec<usize>>>,
}

impl RingNeighborhoods {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Ring `k` (1-based) of vertex `v`; empty when the mesh is exhausted.
    pub fn ring(&self, v: usize, k: usize) -> &[usize] {
        assert!(k >= 1 && k <= self.depth, "ring {k} outside 1..={}", self.depth);
        self.rings[v].get(k - 1).map_or(&[], Vec::as_slice)
    }

    /// Ring sizes `W_1..W_depth` of vertex `v`.
    pub fn ring_sizes(&self, v: usize) -> Vec<usize> {
        (1..=self.depth).map(|k| self.ring(v, k).len()).collect()
    }

    /// All vertices within graph distance `1..=depth` of `v`.
    pub fn within(&self, v: usize, depth: usize) -> impl Iterator<Item = usize> + '_ {
        let depth = depth.min(self.depth);
        self.rings[v].iter().take(depth).flatten().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.rings.len()
    }
}

/// Computes `depth` ring layers for every vertex.
pub fn k_rings(mesh: &Mesh, depth: usize) -> Result<RingNeighborhoods> {
    if depth == 0 {
        return Err(Error::InvalidParameter("ring count must be at least 1".into()));
    }
    let n = mesh.vertex_count();
    let rings = (0..n)
        .into_par_iter()
        .map_init(
            || vec![usize::MAX; n],
            |mark, v| rings_of(mesh, v, depth, mark),
        )
        .collect();
    Ok(RingNeighborhoods { depth, rings })
}

// `mark[u] == v` means u was already reached from v; reusing the buffer
// across sources avoids clearing it.
fn rings_of(mesh: &Mesh, v: usize, depth: usize, mark: &mut [usize]) -> Vec<Vec<usize>> {
    mark[v] = v;
    let mut layers: Vec<Vec<usize>> = Vec::with_capacity(depth);
    let mut frontier = vec![v];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in &mesh.adjacency[u] {
                if mark[w] != v {
                    mark[w] = v;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next.clone();
        layers.push(next);
    }
    layers
}
