//! Benchmark evaluation against human-annotated ground truth.
//!
//! Meshes are normalized to a unit bounding-box diagonal before distances
//! are measured, so region radii and localization tolerances are fractions
//! of the model size. Geodesic distance is approximated by shortest paths
//! along mesh edges.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::path::Path;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::mesh::{bbox_diagonal, Mesh};

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    vertex: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths over the edge graph, with edge
/// lengths multiplied by `scale`. Unreachable vertices get `+inf`.
pub fn geodesic_distances_scaled(mesh: &Mesh, source: usize, scale: f64) -> Result<Vec<f64>> {
    let n = mesh.vertex_count();
    if source >= n {
        return Err(Error::VertexOutOfRange {
            index: source,
            count: n,
        });
    }
    let points = mesh.vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        dist: 0.0,
        vertex: source,
    });
    while let Some(State { dist: d, vertex: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &w in mesh.neighbors(u) {
            let next = d + scale * (points[w] - points[u]).norm();
            if next < dist[w] {
                dist[w] = next;
                heap.push(State {
                    dist: next,
                    vertex: w,
                });
            }
        }
    }
    Ok(dist)
}

pub fn geodesic_distances(mesh: &Mesh, source: usize) -> Result<Vec<f64>> {
    geodesic_distances_scaled(mesh, source, 1.0)
}

/// Lazily computed distance fields on the diagonal-normalized mesh, shared
/// across evaluation cells of one model.
pub struct GeodesicCache<'m> {
    mesh: &'m Mesh,
    scale: f64,
    fields: RwLock<HashMap<usize, Arc<Vec<f64>>>>,
}

impl<'m> GeodesicCache<'m> {
    /// Normalizes by the bounding-box diagonal.
    pub fn new(mesh: &'m Mesh) -> Result<Self> {
        let diagonal = bbox_diagonal(mesh)?;
        if diagonal <= 0.0 {
            return Err(Error::ZeroDiagonal);
        }
        Ok(Self::with_scale(mesh, 1.0 / diagonal))
    }

    /// Uses raw edge lengths times `scale`.
    pub fn with_scale(mesh: &'m Mesh, scale: f64) -> Self {
        Self {
            mesh,
            scale,
            fields: RwLock::new(HashMap::new()),
        }
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn field(&self, source: usize) -> Result<Arc<Vec<f64>>> {
        if let Some(f) = self.fields.read().expect("cache lock").get(&source) {
            return Ok(Arc::clone(f));
        }
        let field = Arc::new(geodesic_distances_scaled(self.mesh, source, self.scale)?);
        self.fields
            .write()
            .expect("cache lock")
            .entry(source)
            .or_insert_with(|| Arc::clone(&field));
        Ok(field)
    }
}

/// Outcome of matching one detection set against one ground-truth set at
/// tolerance `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub r: f64,
    pub n_ground_truth: usize,
    pub n_detected: usize,
    pub n_correct: usize,
}

impl MatchResult {
    pub fn tp(&self) -> usize {
        self.n_correct
    }

    pub fn fp(&self) -> usize {
        self.n_detected - self.n_correct
    }

    pub fn fn_(&self) -> usize {
        self.n_ground_truth - self.n_correct
    }

    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        Self {
            r: 0.0,
            n_ground_truth: tp + fn_,
            n_detected: tp + fp,
            n_correct: tp,
        }
    }
}

/// `TP / (TP + FP + FN)`; `None` when all three are zero.
pub fn iou(m: &MatchResult) -> Option<f64> {
    let denom = m.tp() + m.fp() + m.fn_();
    (denom > 0).then(|| m.tp() as f64 / denom as f64)
}

/// `2TP / (2TP + FP + FN)`; `None` when all three are zero.
pub fn f1(m: &MatchResult) -> Option<f64> {
    let denom = 2 * m.tp() + m.fp() + m.fn_();
    (denom > 0).then(|| 2.0 * m.tp() as f64 / denom as f64)
}

fn unique_sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Nearest ground-truth point of every detection. Independent of the
/// tolerance, so one assignment serves a whole `r` grid.
#[derive(Debug, Clone)]
pub struct Assignment {
    n_ground_truth: usize,
    n_detected: usize,
    /// (ground-truth vertex, distance) per detection, `None` if unreachable
    nearest: Vec<Option<(usize, f64)>>,
}

impl Assignment {
    pub fn new(ground_truth: &[usize], detected: &[usize], cache: &GeodesicCache) -> Result<Self> {
        let gt = unique_sorted(ground_truth);
        let det = unique_sorted(detected);
        let count = cache.mesh().vertex_count();
        if let Some(&bad) = det.iter().find(|&&a| a >= count) {
            return Err(Error::VertexOutOfRange { index: bad, count });
        }
        let fields = gt
            .iter()
            .map(|&g| cache.field(g))
            .collect::<Result<Vec<_>>>()?;
        let nearest = det
            .iter()
            .map(|&a| {
                // gt is ascending, so strict '<' keeps the lower index on ties
                let mut best: Option<(usize, f64)> = None;
                for (&g, field) in gt.iter().zip(&fields) {
                    let d = field[a];
                    if d.is_finite() && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((g, d));
                    }
                }
                best
            })
            .collect();
        Ok(Self {
            n_ground_truth: gt.len(),
            n_detected: det.len(),
            nearest,
        })
    }

    /// A ground-truth point counts as found when some detection within `r`
    /// has it as its nearest ground-truth point.
    pub fn at(&self, r: f64) -> MatchResult {
        let mut found: Vec<usize> = self
            .nearest
            .iter()
            .flatten()
            .filter(|(_, d)| *d <= r)
            .map(|(g, _)| *g)
            .collect();
        found.sort_unstable();
        found.dedup();
        MatchResult {
            r,
            n_ground_truth: self.n_ground_truth,
            n_detected: self.n_detected,
            n_correct: found.len(),
        }
    }
}

pub fn match_points(
    ground_truth: &[usize],
    detected: &[usize],
    r: f64,
    cache: &GeodesicCache,
) -> Result<MatchResult> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be >= 0, got {r}")));
    }
    Ok(Assignment::new(ground_truth, detected, cache)?.at(r))
}

/// Region radius values are compared with this absolute tolerance.
const SIGMA_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub model: String,
    pub n: u32,
    pub sigma: f64,
    pub vertices: Vec<usize>,
}

/// Ground-truth point sets keyed by (model, subject count, region radius).
///
/// Text format, one record per line, `#` starts a comment:
///
/// ```text
/// <model> <n> <sigma> [vertex index ...]
/// ```
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruthSet {
    records: Vec<GroundTruthRecord>,
}

impl GroundTruthSet {
    /// Parses the text format. Returns the set and data warnings
    /// (deduplicated indices, repeated records, monotonicity violations).
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut by_key: Vec<GroundTruthRecord> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut t = content.split_whitespace();
            let model = t.next().unwrap().to_string();
            let n: u32 = t
                .next()
                .ok_or_else(|| parse_err(line, "missing subject count"))?
                .parse()
                .map_err(|_| parse_err(line, "invalid subject count"))?;
            let sigma: f64 = t
                .next()
                .ok_or_else(|| parse_err(line, "missing region radius"))?
                .parse()
                .map_err(|_| parse_err(line, "invalid region radius"))?;
            let mut vertices = t
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(line, format!("invalid vertex index '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            let before = vertices.len();
            vertices.sort_unstable();
            vertices.dedup();
            if vertices.len() != before {
                warnings.push(format!(
                    "line {line}: {} duplicate indices removed for {model} n={n} sigma={sigma}",
                    before - vertices.len()
                ));
            }
            if let Some(existing) = by_key
                .iter_mut()
                .find(|r| r.model == model && r.n == n && (r.sigma - sigma).abs() < SIGMA_MATCH)
            {
                warnings.push(format!(
                    "line {line}: repeated record for {model} n={n} sigma={sigma}, merged"
                ));
                existing.vertices.extend(vertices);
                existing.vertices.sort_unstable();
                existing.vertices.dedup();
            } else {
                by_key.push(GroundTruthRecord {
                    model,
                    n,
                    sigma,
                    vertices,
                });
            }
        }
        let set = Self { records: by_key };
        warnings.extend(set.monotonicity_warnings());
        Ok((set, warnings))
    }

    pub fn records(&self) -> &[GroundTruthRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn models(&self) -> Vec<String> {
        let mut m: Vec<String> = self.records.iter().map(|r| r.model.clone()).collect();
        m.sort();
        m.dedup();
        m
    }

    pub fn get(&self, model: &str, n: u32, sigma: f64) -> Option<&[usize]> {
        self.records
            .iter()
            .find(|r| r.model == model && r.n == n && (r.sigma - sigma).abs() < SIGMA_MATCH)
            .map(|r| r.vertices.as_slice())
    }

    /// Model ids absent from `known`.
    pub fn unknown_models(&self, known: &[String]) -> Vec<String> {
        self.models()
            .into_iter()
            .filter(|m| !known.contains(m))
            .collect()
    }

    /// For a fixed model and radius, more required subjects should never
    /// yield more points.
    pub fn monotonicity_warnings(&self) -> Vec<String> {
        let mut groups: BTreeMap<(String, u64), Vec<(u32, usize)>> = BTreeMap::new();
        for r in &self.records {
            groups
                .entry((r.model.clone(), r.sigma.to_bits()))
                .or_default()
                .push((r.n, r.vertices.len()));
        }
        let mut out = Vec::new();
        for ((model, sigma_bits), mut sizes) in groups {
            sizes.sort_unstable();
            for w in sizes.windows(2) {
                if w[1].1 > w[0].1 {
                    out.push(format!(
                        "{model} sigma={}: {} points at n={} exceeds {} at n={}",
                        f64::from_bits(sigma_bits),
                        w[1].1,
                        w[1].0,
                        w[0].1,
                        w[0].0
                    ));
                }
            }
        }
        out
    }
}

pub fn load_ground_truth(path: &Path) -> Result<(GroundTruthSet, Vec<String>)> {
    GroundTruthSet::parse(&std::fs::read_to_string(path)?)
}

/// Evaluation grid over subject counts, region radii and tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    pub n: Vec<u32>,
    pub sigma: Vec<f64>,
    pub r: Vec<f64>,
}

impl EvalGrid {
    /// The 23-subject dataset grid: n in 2..=23, sigma in 0.01..=0.1 by
    /// 0.01, r in 0.005..=0.12 by 0.005.
    pub fn dataset_a() -> Self {
        Self::with_max_subjects(23)
    }

    /// The 16-subject dataset grid.
    pub fn dataset_b() -> Self {
        Self::with_max_subjects(16)
    }

    fn with_max_subjects(max_n: u32) -> Self {
        Self {
            n: (2..=max_n).collect(),
            sigma: (1..=10).map(|i| f64::from(i) / 100.0).collect(),
            r: (1..=24).map(|i| f64::from(i) * 0.005).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub model: String,
    pub n: u32,
    pub sigma: f64,
    pub result: MatchResult,
}

impl CellResult {
    pub fn iou(&self) -> Option<f64> {
        iou(&self.result)
    }

    pub fn f1(&self) -> Option<f64> {
        f1(&self.result)
    }
}

/// Evaluates one model's detections over the grid. Missing (n, sigma)
/// records are skipped and reported in the returned warnings.
pub fn evaluate_model(
    model: &str,
    cache: &GeodesicCache,
    detected: &[usize],
    ground_truth: &GroundTruthSet,
    grid: &EvalGrid,
) -> Result<(Vec<CellResult>, Vec<String>)> {
    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    let count = cache.mesh().vertex_count();
    for &n in &grid.n {
        for &sigma in &grid.sigma {
            let Some(gt) = ground_truth.get(model, n, sigma) else {
                warnings.push(format!("{model}: no ground truth for n={n} sigma={sigma}"));
                continue;
            };
            if let Some(&bad) = gt.iter().find(|&&g| g >= count) {
                return Err(Error::VertexOutOfRange { index: bad, count });
            }
            let assignment = Assignment::new(gt, detected, cache)?;
            for &r in &grid.r {
                cells.push(CellResult {
                    model: model.to_string(),
                    n,
                    sigma,
                    result: assignment.at(r),
                });
            }
        }
    }
    Ok((cells, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub r: f64,
    pub mean_iou: Option<f64>,
    pub mean_f1: Option<f64>,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSigmaCurve {
    pub n: u32,
    pub sigma: f64,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub defined_cells: usize,
    pub mean_iou: Option<f64>,
    pub mean_f1: Option<f64>,
    pub per_r: Vec<CurvePoint>,
    pub per_n_sigma: Vec<NSigmaCurve>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn curve_point(r: f64, cells: &[&CellResult]) -> CurvePoint {
    CurvePoint {
        r,
        mean_iou: mean(cells.iter().filter_map(|c| c.iou())),
        mean_f1: mean(cells.iter().filter_map(|c| c.f1())),
        cells: cells.len(),
    }
}

/// Unweighted means over all cells with defined scores, plus per-r and
/// per-(n, sigma) curves.
pub fn aggregate(cells: &[CellResult]) -> Summary {
    let mut by_r: BTreeMap<u64, Vec<&CellResult>> = BTreeMap::new();
    let mut by_n_sigma: BTreeMap<(u32, u64), BTreeMap<u64, Vec<&CellResult>>> = BTreeMap::new();
    for c in cells {
        // nonnegative floats order like their bit patterns
        let r = c.result.r.to_bits();
        by_r.entry(r).or_default().push(c);
        by_n_sigma
            .entry((c.n, c.sigma.to_bits()))
            .or_default()
            .entry(r)
            .or_default()
            .push(c);
    }
    Summary {
        cells: cells.len(),
        defined_cells: cells.iter().filter(|c| c.iou().is_some()).count(),
        mean_iou: mean(cells.iter().filter_map(CellResult::iou)),
        mean_f1: mean(cells.iter().filter_map(CellResult::f1)),
        per_r: by_r
            .iter()
            .map(|(r, group)| curve_point(f64::from_bits(*r), group))
            .collect(),
        per_n_sigma: by_n_sigma
            .into_iter()
            .map(|((n, sigma), rs)| NSigmaCurve {
                n,
                sigma: f64::from_bits(sigma),
                points: rs
                    .iter()
                    .map(|(r, group)| curve_point(f64::from_bits(*r), group))
                    .collect(),
            })
            .collect(),
    }
}

/// Cells where IOU or F1 drops as `r` grows for a fixed model, n and sigma.
/// The matching rule makes both scores nondecreasing in `r`, so any hit
/// indicates a bug.
pub fn tolerance_monotonicity_violations(cells: &[CellResult]) -> Vec<String> {
    let mut groups: BTreeMap<(&str, u32, u64), Vec<&CellResult>> = BTreeMap::new();
    for c in cells {
        groups
            .entry((c.model.as_str(), c.n, c.sigma.to_bits()))
            .or_default()
            .push(c);
    }
    let mut out = Vec::new();
    for ((model, n, sigma), mut group) in groups {
        group.sort_by(|a, b| a.result.r.total_cmp(&b.result.r));
        for w in group.windows(2) {
            let drop = |f: fn(&CellResult) -> Option<f64>| match (f(w[0]), f(w[1])) {
                (Some(a), Some(b)) => b < a,
                _ => false,
            };
            if drop(CellResult::iou) || drop(CellResult::f1) {
                out.push(format!(
                    "{model} n={n} sigma={}: score decreases from r={} to r={}",
                    f64::from_bits(sigma),
                    w[0].result.r,
                    w[1].result.r
                ));
            }
        }
    }
    out
}
