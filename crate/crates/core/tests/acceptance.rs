//! Acceptance suite. Runs every criterion, prints one PASS/FAIL/WAIVED line
//! each and exits nonzero if any criterion fails.
//!
//! The benchmark-dependent criteria read `MESHIP_BENCHMARK_DIR`, laid out as
//! `<dir>/A/meshes/*.off`, `<dir>/A/ground_truth.txt` and the same under
//! `<dir>/B`. Without it they are reported as WAIVED.

mod common;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use meship_core::eval::{
    aggregate, evaluate_model, f1, iou, CellResult, EvalGrid, GeodesicCache,
    MatchResult,
};
use meship_core::measures::{harmonic_mean, tangent_plane_distance};
use meship_core::response::non_maxima_suppression;
use meship_core::{
    brute_force_refine, compute_vertex_normals, detect, io, k_rings, shapes, sparse_refine,
    Candidate, CandidateSet, DetectorConfig, Mesh, ResponseTerms,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const L0_INSTANCES: usize = 1_000;
const L0_MAX_CANDIDATES: usize = 15;
const L0_TIME_LIMIT: Duration = Duration::from_secs(5);
const MEAN_VECTORS: usize = 10_000;
const MEAN_REL_TOL: f64 = 1e-12;
const NMS_FIELDS: usize = 100;
const GEODESIC_TOL: f64 = 1e-9;
const CUBE_SUBDIVISIONS: usize = 12;
const CUBE_TIME_LIMIT: Duration = Duration::from_secs(10);
const SCALE_REL_TOL: f64 = 1e-6;
const METRIC_TRIPLES: usize = 1_000;
const METRIC_TOL: f64 = 1e-12;
const TABLE_TOL: f64 = 0.05;
const TABLE_A_IOU: f64 = 0.3216;
const TABLE_A_F1: f64 = 0.4334;
const TABLE_B_IOU: f64 = 0.2706;

enum Outcome {
    Pass(String),
    Fail(String),
    Waived(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn l0_optimality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x10);
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..L0_INSTANCES {
        let c = rng.gen_range(0..=L0_MAX_CANDIDATES);
        let candidates = CandidateSet {
            candidates: (0..c)
                .map(|vertex| Candidate {
                    vertex,
                    rho: rng.gen_range(0.0..=5.0),
                })
                .collect(),
        };
        let beta = rng.gen_range(0.0..=1.0);
        let fast = sparse_refine(&candidates, beta).unwrap().vertices();
        let exact = brute_force_refine(&candidates, beta).unwrap().vertices();
        if fast != exact {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && elapsed < L0_TIME_LIMIT,
        format!("{mismatches} mismatches in {L0_INSTANCES} instances, {elapsed:.2?}"),
    )
}

fn means(v: &[f64]) -> [f64; 4] {
    [
        harmonic_mean(v),
        common::geometric_mean(v),
        common::arithmetic_mean(v),
        common::quadratic_mean(v),
    ]
}

fn ordered(m: [f64; 4]) -> bool {
    m.windows(2)
        .all(|w| w[0] <= w[1] + MEAN_REL_TOL * w[1].abs())
}

fn mean_ordering() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x20);
    let mut violations = 0;
    for _ in 0..MEAN_VECTORS {
        let len = rng.gen_range(1..=40);
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(1e-6..100.0)).collect();
        if !ordered(means(&v)) {
            violations += 1;
        }
    }

    // edge vertex on a roof ridge: in-ring ridge neighbors lie in the
    // tangent plane, so each ring's harmonic mean collapses
    let (wedge, ridge) = shapes::wedge(8, 0.7);
    let normals = compute_vertex_normals(&wedge);
    let rings = k_rings(&wedge, 6).unwrap();
    let n = normals.get(ridge).unwrap();
    let p = wedge.vertices();
    let (mut harmonic, mut arithmetic) = (0.0, 0.0);
    for k in 1..=6 {
        let d: Vec<f64> = rings
            .ring(ridge, k)
            .iter()
            .map(|&u| tangent_plane_distance(&p[ridge], n, &p[u]))
            .collect();
        if !ordered(means(&d)) {
            violations += 1;
        }
        harmonic += harmonic_mean(&d);
        arithmetic += common::arithmetic_mean(&d);
    }
    check(
        violations == 0 && harmonic < arithmetic,
        format!(
            "{violations} ordering violations over {MEAN_VECTORS} vectors; wedge ridge harmonic {harmonic:.3e} < arithmetic {arithmetic:.3e}"
        ),
    )
}

fn nms_oracle() -> Outcome {
    let mesh = shapes::uv_sphere(10, 22);
    let hops = common::hop_matrix(&mesh);
    let rings = k_rings(&mesh, 10).unwrap();
    let mut rng = StdRng::seed_from_u64(0x30);
    let mut mismatches = 0;
    for field in 0..NMS_FIELDS {
        let rho: Vec<f64> = (0..mesh.vertex_count())
            .map(|_| {
                // some exact zeros and repeated values exercise the strict rule
                match rng.gen_range(0..10) {
                    0 => 0.0,
                    1 => 0.5,
                    _ => rng.gen_range(0.0..1.0),
                }
            })
            .collect();
        let n_rings = [1, 2, 3, 10][field % 4];
        let mut got = non_maxima_suppression(&rings, &rho, n_rings).vertices();
        got.sort_unstable();
        if got != common::brute_force_nms(&hops, &rho, n_rings) {
            mismatches += 1;
        }
    }
    check(
        mismatches == 0 && mesh.vertex_count() == 200,
        format!("{mismatches} mismatches over {NMS_FIELDS} fields on a 200-vertex sphere"),
    )
}

fn geodesic_oracle() -> Outcome {
    let meshes = [
        shapes::uv_sphere(10, 22),
        shapes::icosphere(2),
        common::noisy_sphere(2, 0.05, 7),
        shapes::subdivided_cube(4),
        shapes::grid_plane(9, 9),
    ];
    let mut worst: f64 = 0.0;
    for mesh in &meshes {
        assert!(mesh.vertex_count() <= 200);
        let all = common::floyd_warshall(mesh);
        for s in 0..mesh.vertex_count() {
            let d = meship_core::eval::geodesic_distances(mesh, s).unwrap();
            for (a, b) in d.iter().zip(&all[s]) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    check(
        worst <= GEODESIC_TOL,
        format!("max deviation {worst:.2e} over {} meshes", meshes.len()),
    )
}

fn cube_fixture() -> Outcome {
    let cube = shapes::subdivided_cube(CUBE_SUBDIVISIONS);
    let start = Instant::now();
    let found = detect(&cube, &DetectorConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let mut got = found.points.vertices();
    got.sort_unstable();
    let corners = shapes::cube_corner_indices(&cube);
    check(
        got == corners && elapsed < CUBE_TIME_LIMIT,
        format!(
            "{}x{} per side: detected {:?}, corners {:?}, {elapsed:.2?}",
            CUBE_SUBDIVISIONS, CUBE_SUBDIVISIONS, got, corners
        ),
    )
}

fn sorted_points(mesh: &Mesh) -> Vec<usize> {
    let mut v = detect(mesh, &DetectorConfig::default())
        .unwrap()
        .points
        .vertices();
    v.sort_unstable();
    v
}

fn invariance() -> Outcome {
    let fixtures = [
        ("cube", shapes::subdivided_cube(CUBE_SUBDIVISIONS)),
        ("spiky sphere", common::spiky_sphere(3, 11)),
        ("noisy sphere", common::noisy_sphere(3, 0.03, 5)),
    ];
    let mut problems = Vec::new();
    for (name, mesh) in &fixtures {
        let reference = sorted_points(mesh);
        for seed in 0..3 {
            if sorted_points(&common::rigid_motion(mesh, seed)) != reference {
                problems.push(format!("{name}: rigid motion {seed} changed detections"));
            }
        }
    }

    let mut worst: f64 = 0.0;
    for (_, mesh) in &fixtures[1..] {
        let base = detect(mesh, &DetectorConfig::default()).unwrap();
        let scaled = detect(&mesh.map_positions(|p| p * 7.3), &DetectorConfig::default()).unwrap();
        for (a, b) in base
            .response
            .per_scale
            .iter()
            .flatten()
            .zip(scaled.response.per_scale.iter().flatten())
        {
            let mag = a.abs().max(b.abs());
            if mag > 0.0 {
                worst = worst.max((a - b).abs() / mag);
            }
        }
        if base.points.vertices() != scaled.points.vertices() {
            problems.push("uniform scaling changed detections".into());
        }
    }
    if worst > SCALE_REL_TOL {
        problems.push(format!("per-scale response relative deviation {worst:.2e}"));
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!("rigid motions preserve index sets; scaling deviation {worst:.2e}")
        } else {
            problems.join("; ")
        },
    )
}

fn metric_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x70);
    let mut worst: f64 = 0.0;
    let mut undefined_mismatch = 0;
    for _ in 0..METRIC_TRIPLES {
        let m = MatchResult::from_counts(
            rng.gen_range(0..50),
            rng.gen_range(0..50),
            rng.gen_range(0..50),
        );
        match (iou(&m), f1(&m)) {
            (Some(i), Some(f)) => worst = worst.max((f - 2.0 * i / (1.0 + i)).abs()),
            (None, None) => {}
            _ => undefined_mismatch += 1,
        }
    }
    check(
        worst <= METRIC_TOL && undefined_mismatch == 0,
        format!("max |F1 - 2 IOU / (1 + IOU)| = {worst:.2e}"),
    )
}

fn benchmark_dir() -> Option<PathBuf> {
    std::env::var_os("MESHIP_BENCHMARK_DIR").map(PathBuf::from)
}

/// Runs detection + evaluation for every mesh of a dataset directory.
fn evaluate_dataset(dir: &Path, config: &DetectorConfig, grid: &EvalGrid) -> Option<(f64, f64)> {
    let gt_path = dir.join("ground_truth.txt");
    let (gt, _) = meship_core::eval::load_ground_truth(&gt_path).ok()?;
    let mut cells: Vec<CellResult> = Vec::new();
    for model in gt.models() {
        let mesh_path = ["off", "obj"]
            .iter()
            .map(|ext| dir.join("meshes").join(format!("{model}.{ext}")))
            .find(|p| p.exists())?;
        let mesh = io::read_mesh(&mesh_path).ok()?;
        let found = detect(&mesh, config).ok()?;
        let cache = GeodesicCache::new(&mesh).ok()?;
        let (c, _) = evaluate_model(&model, &cache, &found.points.vertices(), &gt, grid).ok()?;
        cells.extend(c);
    }
    let summary = aggregate(&cells);
    Some((summary.mean_iou?, summary.mean_f1?))
}

fn table_reproduction() -> Outcome {
    let Some(root) = benchmark_dir() else {
        return Outcome::Waived("MESHIP_BENCHMARK_DIR not set; benchmark data unavailable".into());
    };
    let config = DetectorConfig::default();
    let a = evaluate_dataset(&root.join("A"), &config, &EvalGrid::dataset_a());
    let b = evaluate_dataset(&root.join("B"), &config, &EvalGrid::dataset_b());
    match (a, b) {
        (Some((ia, fa)), Some((ib, _))) => check(
            (ia - TABLE_A_IOU).abs() <= TABLE_TOL
                && (fa - TABLE_A_F1).abs() <= TABLE_TOL
                && (ib - TABLE_B_IOU).abs() <= TABLE_TOL,
            format!("A: IOU {ia:.4} F1 {fa:.4}; B: IOU {ib:.4}"),
        ),
        _ => Outcome::Fail(format!("could not evaluate datasets under {}", root.display())),
    }
}

fn parameter_shapes() -> Outcome {
    let Some(root) = benchmark_dir() else {
        return Outcome::Waived("MESHIP_BENCHMARK_DIR not set; benchmark data unavailable".into());
    };
    let dir = root.join("A");
    let grid = EvalGrid::dataset_a();
    let score = |config: DetectorConfig| evaluate_dataset(&dir, &config, &grid).map(|s| s.0);
    let base = DetectorConfig::default();
    let k_curve: Option<Vec<f64>> = (1..=10)
        .map(|rings| score(DetectorConfig { rings, ..base.clone() }))
        .collect();
    let both = score(base.clone());
    let distance_only = score(DetectorConfig { alpha: 0.0, ..base.clone() });
    let angle_only = score(DetectorConfig {
        terms: ResponseTerms::Angle,
        ..base.clone()
    });
    match (k_curve, both, distance_only, angle_only) {
        (Some(k), Some(b), Some(d), Some(a)) => {
            let peak = k
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .map(|(i, _)| i + 1)
                .unwrap();
            check(
                peak > 1 && peak < 10 && b > d && b > a,
                format!("K peak at {peak}; alpha 2.5 {b:.4}, alpha 0 {d:.4}, angle only {a:.4}"),
            )
        }
        _ => Outcome::Fail("could not evaluate sweep".into()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("l0 optimality vs exhaustive search", l0_optimality),
        ("mean inequality ordering", mean_ordering),
        ("NMS vs brute-force ring enumeration", nms_oracle),
        ("Dijkstra vs Floyd-Warshall", geodesic_oracle),
        ("subdivided cube corners", cube_fixture),
        ("rigid-motion and scaling invariance", invariance),
        ("IOU/F1 identity", metric_identities),
        ("benchmark average IOU/F1", table_reproduction),
        ("parameter sweep shapes", parameter_shapes),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Outcome::Pass(d) => println!("PASS   {name}: {d}"),
            Outcome::Waived(d) => println!("WAIVED {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL   {name}: {d}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
