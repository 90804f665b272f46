//! Procedural meshes used as fixtures by tests, examples and the CLI.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use crate::mesh::Mesh;

fn build(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Mesh {
    Mesh::new(vertices, faces).expect("generated mesh is valid")
}

/// Orients `tri` so its normal points along `outward`.
fn orient(vertices: &[Point3<f64>], tri: [usize; 3], outward: &Vector3<f64>) -> [usize; 3] {
    let [a, b, c] = tri.map(|i| vertices[i]);
    if (b - a).cross(&(c - a)).dot(outward) < 0.0 {
        [tri[0], tri[2], tri[1]]
    } else {
        tri
    }
}

/// Axis-aligned unit cube `[0,1]^3` with `n x n` quads per side, each quad
/// split along the diagonal joining its two lattice corners of even
/// coordinate parity. Vertices shared between sides are welded and faces
/// wind outward.
///
/// With this split every cube corner sees identical triangle areas on its
/// three sides, so its area-weighted normal is exactly diagonal.
pub fn subdivided_cube(n: usize) -> Mesh {
    assert!(n >= 1);
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut id = |l: [usize; 3], vertices: &mut Vec<Point3<f64>>| {
        *index.entry(l).or_insert_with(|| {
            vertices.push(Point3::new(
                l[0] as f64 / n as f64,
                l[1] as f64 / n as f64,
                l[2] as f64 / n as f64,
            ));
            vertices.len() - 1
        })
    };
    let mut quads = Vec::new();
    for axis in 0..3 {
        let (u_axis, v_axis) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [0, n] {
            let mut outward = Vector3::zeros();
            outward[axis] = if side == 0 { -1.0 } else { 1.0 };
            for a in 0..n {
                for b in 0..n {
                    let corner = |da: usize, db: usize| {
                        let mut l = [0usize; 3];
                        l[axis] = side;
                        l[u_axis] = a + da;
                        l[v_axis] = b + db;
                        l
                    };
                    let quad = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
                    quads.push((quad, outward));
                }
            }
        }
    }
    let mut faces = Vec::with_capacity(quads.len() * 2);
    let mut oriented = Vec::new();
    for (quad, outward) in quads {
        let ids = quad.map(|l| id(l, &mut vertices));
        let even = |l: [usize; 3]| (l[0] + l[1] + l[2]).is_multiple_of(2);
        let tris = if even(quad[0]) {
            [[ids[0], ids[1], ids[2]], [ids[0], ids[2], ids[3]]]
        } else {
            [[ids[1], ids[2], ids[3]], [ids[1], ids[3], ids[0]]]
        };
        oriented.push((tris, outward));
    }
    for (tris, outward) in oriented {
        for tri in tris {
            faces.push(orient(&vertices, tri, &outward));
        }
    }
    build(vertices, faces)
}

/// Indices of the eight corner vertices of [`subdivided_cube`].
pub fn cube_corner_indices(mesh: &Mesh) -> Vec<usize> {
    mesh.vertices()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.iter().all(|&c| c == 0.0 || c == 1.0))
        .map(|(i, _)| i)
        .collect()
}

/// Regular octahedron with unit-distance vertices on the axes; apex is
/// vertex 4 at `(0,0,1)`.
pub fn octahedron() -> Mesh {
    let vertices = vec![
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(-1.0, 0.0, 0.0),
        Point3::new(0.0, -1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(0.0, 0.0, -1.0),
    ];
    let mut faces = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        faces.push([i, j, 4]);
        faces.push([j, i, 5]);
    }
    build(vertices, faces)
}

/// Regular icosahedron inscribed in the unit sphere.
pub fn icosahedron() -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let vertices = raw
        .iter()
        .map(|p| Point3::from(Vector3::from(*p).normalize()))
        .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    build(vertices, faces)
}

/// Icosahedron refined `levels` times by edge midpoints projected onto the
/// unit sphere.
pub fn icosphere(levels: usize) -> Mesh {
    let base = icosahedron();
    let mut vertices = base.vertices().to_vec();
    let mut faces = base.faces().to_vec();
    for _ in 0..levels {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let mut mid = |i: usize, j: usize| {
                *midpoints.entry((i.min(j), i.max(j))).or_insert_with(|| {
                    let m = ((vertices[i].coords + vertices[j].coords) / 2.0).normalize();
                    vertices.push(Point3::from(m));
                    vertices.len() - 1
                })
            };
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    build(vertices, faces)
}

/// Latitude-longitude sphere with `stacks - 1` rings of `slices` vertices
/// plus two poles: `(stacks - 1) * slices + 2` vertices.
pub fn uv_sphere(stacks: usize, slices: usize) -> Mesh {
    assert!(stacks >= 2 && slices >= 3);
    let mut vertices = vec![Point3::new(0.0, 0.0, 1.0)];
    for i in 1..stacks {
        let phi = std::f64::consts::PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / slices as f64;
            vertices.push(Point3::new(
                phi.sin() * theta.cos(),
                phi.sin() * theta.sin(),
                phi.cos(),
            ));
        }
    }
    vertices.push(Point3::new(0.0, 0.0, -1.0));
    let south = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * slices + j % slices;
    let mut faces = Vec::new();
    for j in 0..slices {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
        faces.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            faces.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            faces.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    build(vertices, faces)
}

/// Flat `nx x ny` grid of unit quads in the `z = 0` plane, wound toward +z.
pub fn grid_plane(nx: usize, ny: usize) -> Mesh {
    height_field(nx, ny, |_, _| 0.0)
}

/// Grid of unit spacing centered on the origin, lifted by `z = height(x, y)`,
/// wound toward +z. Vertex `(i, j)` has index `j * (nx + 1) + i`.
pub fn height_field(nx: usize, ny: usize, height: impl Fn(f64, f64) -> f64) -> Mesh {
    let (cx, cy) = (nx as f64 / 2.0, ny as f64 / 2.0);
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let (x, y) = (i as f64 - cx, j as f64 - cy);
            vertices.push(Point3::new(x, y, height(x, y)));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut faces = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build(vertices, faces)
}

/// Symmetric roof: two planes meeting along the `x` axis at a ridge,
/// `z = -slope * |y|`, over a `2m x 2m` grid. Returns the mesh and the index
/// of the ridge vertex at the origin.
pub fn wedge(m: usize, slope: f64) -> (Mesh, usize) {
    let mesh = height_field(2 * m, 2 * m, |_, y| -slope * y.abs());
    let center = m * (2 * m + 1) + m;
    (mesh, center)
}
