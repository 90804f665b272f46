mod grid;
mod ply;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use meship_core::eval::{
    aggregate, evaluate_model, load_ground_truth, tolerance_monotonicity_violations, CellResult,
    EvalGrid, GeodesicCache, GroundTruthSet, Summary,
};
use meship_core::{detect, io, Candidate, DetectorConfig, Mesh, ResponseTerms};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "meship", version, about = "Multi-scale interest point detection on triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect interest points on one mesh and write them as JSON.
    Detect {
        mesh: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        detector: DetectorArgs,
    },
    /// Score saved detections against ground truth.
    Evaluate {
        /// Directory of `<model>.json` files written by `detect`.
        #[arg(long)]
        detections: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Output directory for the CSV and JSON reports.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the final response as a colored PLY plus a JSON sidecar.
    ExportSaliency {
        mesh: PathBuf,
        /// Target `.ply` file; the sidecar goes next to it as `.json`.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
    },
    /// Detect and evaluate for each value of one parameter.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma list or `start:end:step`; `terms` takes names.
        #[arg(long)]
        values: String,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        detector: DetectorArgs,
        /// CSV output file.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct DetectorArgs {
    /// Smoothing scales as multiples of the base scale.
    #[arg(long, default_value = "1,3,5", value_parser = parse_u32s)]
    scales: U32s,
    #[arg(long, default_value_t = 6)]
    rings: usize,
    #[arg(long, default_value_t = 2.5)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    nms_rings: usize,
    #[arg(long, default_value_t = 0.03)]
    beta: f64,
    #[arg(long, default_value_t = ResponseTerms::Both, value_parser = parse_terms)]
    terms: ResponseTerms,
}

impl DetectorArgs {
    fn config(&self) -> DetectorConfig {
        DetectorConfig {
            rings: self.rings,
            alpha: self.alpha,
            nms_rings: self.nms_rings,
            beta: self.beta,
            scales: self.scales.0.clone(),
            terms: self.terms,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    ground_truth: PathBuf,
    /// Directory holding `<model>.off` or `<model>.obj`.
    #[arg(long)]
    meshes: PathBuf,
    /// Preset grid, refined by the explicit grid flags below.
    #[arg(long, value_enum, default_value_t = Preset::A)]
    grid: Preset,
    #[arg(long, value_parser = parse_u32s)]
    grid_n: Option<U32s>,
    #[arg(long, value_parser = parse_f64s)]
    grid_sigma: Option<F64s>,
    #[arg(long, value_parser = parse_f64s)]
    grid_r: Option<F64s>,
}

impl DataArgs {
    fn grid(&self) -> EvalGrid {
        let mut grid = match self.grid {
            Preset::A => EvalGrid::dataset_a(),
            Preset::B => EvalGrid::dataset_b(),
        };
        if let Some(n) = &self.grid_n {
            grid.n = n.0.clone();
        }
        if let Some(s) = &self.grid_sigma {
            grid.sigma = s.0.clone();
        }
        if let Some(r) = &self.grid_r {
            grid.r = r.0.clone();
        }
        grid
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    A,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    Rings,
    Alpha,
    NmsRings,
    Beta,
    Terms,
}

#[derive(Clone, Debug)]
struct U32s(Vec<u32>);
#[derive(Clone, Debug)]
struct F64s(Vec<f64>);

fn parse_u32s(s: &str) -> Result<U32s, String> {
    grid::parse_u32_list(s).map(U32s).map_err(|e| e.to_string())
}

fn parse_f64s(s: &str) -> Result<F64s, String> {
    grid::parse_f64_list(s).map(F64s).map_err(|e| e.to_string())
}

fn parse_terms(s: &str) -> Result<ResponseTerms, String> {
    s.parse::<ResponseTerms>().map_err(|e| e.to_string())
}

#[derive(Serialize, Deserialize)]
struct DetectionFile {
    model: String,
    vertex_count: usize,
    config: DetectorConfig,
    points: Vec<Candidate>,
}

#[derive(Serialize)]
struct SaliencySidecar {
    model: String,
    config: DetectorConfig,
    candidates: Vec<Candidate>,
    points: Vec<Candidate>,
}

/// Failures that are the caller's fault and map to exit code 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn checked(config: DetectorConfig) -> Result<DetectorConfig> {
    config
        .validate()
        .map_err(|e| UsageError(e.to_string()))?;
    Ok(config)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Detect { mesh, out, detector } => {
            let config = checked(detector.config())?;
            let json = detect_to_json(&mesh, &config)?;
            match out {
                Some(path) => write(&path, &json),
                None => {
                    print!("{json}");
                    Ok(())
                }
            }
        }
        Command::Evaluate { detections, data, out } => evaluate(&detections, &data, &out),
        Command::ExportSaliency { mesh, out, detector } => {
            export_saliency(&mesh, &out, &checked(detector.config())?)
        }
        Command::Sweep {
            param,
            values,
            data,
            detector,
            out,
        } => {
            let configs = sweep_configs(param, &values, &detector)?;
            sweep(&configs, &data, &out)
        }
    }
}

fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_mesh(path: &Path) -> Result<Mesh> {
    io::read_mesh(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn detect_to_json(path: &Path, config: &DetectorConfig) -> Result<String> {
    let mesh = load_mesh(path)?;
    let found = detect(&mesh, config)?;
    let file = DetectionFile {
        model: model_name(path),
        vertex_count: mesh.vertex_count(),
        config: config.clone(),
        points: found.points.points,
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

fn export_saliency(path: &Path, out: &Path, config: &DetectorConfig) -> Result<()> {
    let mesh = load_mesh(path)?;
    let found = detect(&mesh, config)?;
    write(out, &ply::write_colored_ply(&mesh, &found.response.final_rho))?;
    let sidecar = SaliencySidecar {
        model: model_name(path),
        config: config.clone(),
        candidates: found.candidates.candidates,
        points: found.points.points,
    };
    write(
        &out.with_extension("json"),
        &(serde_json::to_string_pretty(&sidecar)? + "\n"),
    )
}

fn find_mesh(dir: &Path, model: &str) -> Option<PathBuf> {
    ["off", "obj"]
        .iter()
        .map(|ext| dir.join(format!("{model}.{ext}")))
        .find(|p| p.is_file())
}

fn load_truth(data: &DataArgs) -> Result<GroundTruthSet> {
    let (gt, warnings) = load_ground_truth(&data.ground_truth)
        .with_context(|| format!("reading {}", data.ground_truth.display()))?;
    for w in warnings.iter().chain(&gt.monotonicity_warnings()) {
        eprintln!("warning: {w}");
    }
    if gt.is_empty() {
        bail!("{} holds no ground truth", data.ground_truth.display());
    }
    Ok(gt)
}

/// Evaluates every ground-truth model for which `points_for` yields
/// detections, warning about and skipping the rest.
fn evaluate_models(
    gt: &GroundTruthSet,
    data: &DataArgs,
    grid: &EvalGrid,
    mut points_for: impl FnMut(&str, &Mesh) -> Result<Option<Vec<usize>>>,
) -> Result<Vec<CellResult>> {
    let mut cells = Vec::new();
    for model in gt.models() {
        let Some(mesh_path) = find_mesh(&data.meshes, &model) else {
            eprintln!("warning: no mesh for model {model}, skipped");
            continue;
        };
        let mesh = load_mesh(&mesh_path)?;
        let Some(points) = points_for(&model, &mesh)? else {
            continue;
        };
        let cache = GeodesicCache::new(&mesh)?;
        let (c, warnings) = evaluate_model(&model, &cache, &points, gt, grid)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        cells.extend(c);
    }
    for v in tolerance_monotonicity_violations(&cells) {
        eprintln!("warning: {v}");
    }
    Ok(cells)
}

fn evaluate(detections: &Path, data: &DataArgs, out: &Path) -> Result<()> {
    let gt = load_truth(data)?;
    let grid = data.grid();
    let cells = evaluate_models(&gt, data, &grid, |model, mesh| {
        let path = detections.join(format!("{model}.json"));
        if !path.is_file() {
            eprintln!("warning: no detections for model {model}, skipped");
            return Ok(None);
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let file: DetectionFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if file.vertex_count != mesh.vertex_count() {
            bail!(
                "{}: detections were made on a mesh with {} vertices, found {}",
                path.display(),
                file.vertex_count,
                mesh.vertex_count()
            );
        }
        Ok(Some(file.points.iter().map(|p| p.vertex).collect()))
    })?;
    let summary = aggregate(&cells);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("cells.csv"), &cells_csv(&cells))?;
    write(&out.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    write(&out.join("curve_r.csv"), &curve_r_csv(&summary))?;
    write(&out.join("curve_n_sigma.csv"), &curve_n_sigma_csv(&summary))?;
    println!(
        "models: {}, cells: {}, mean IOU: {}, mean F1: {}",
        cells.iter().map(|c| &c.model).collect::<std::collections::BTreeSet<_>>().len(),
        summary.cells,
        opt(summary.mean_iou),
        opt(summary.mean_f1)
    );
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn cells_csv(cells: &[CellResult]) -> String {
    let mut out = String::from("model,n,sigma,r,tp,fp,fn,iou,f1\n");
    for c in cells {
        let m = &c.result;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.model,
            c.n,
            c.sigma,
            m.r,
            m.tp(),
            m.fp(),
            m.fn_(),
            opt(c.iou()),
            opt(c.f1())
        );
    }
    out
}

fn curve_r_csv(summary: &Summary) -> String {
    let mut out = String::from("r,mean_iou,mean_f1,cells\n");
    for p in &summary.per_r {
        let _ = writeln!(out, "{},{},{},{}", p.r, opt(p.mean_iou), opt(p.mean_f1), p.cells);
    }
    out
}

fn curve_n_sigma_csv(summary: &Summary) -> String {
    let mut out = String::from("n,sigma,r,mean_iou,mean_f1,cells\n");
    for curve in &summary.per_n_sigma {
        for p in &curve.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                curve.n,
                curve.sigma,
                p.r,
                opt(p.mean_iou),
                opt(p.mean_f1),
                p.cells
            );
        }
    }
    out
}

fn sweep_configs(
    param: SweepParam,
    values: &str,
    detector: &DetectorArgs,
) -> Result<Vec<(String, DetectorConfig)>> {
    let usage = |e: anyhow::Error| anyhow::Error::new(UsageError(format!("--values: {e:#}")));
    let base = detector.config();
    let configs: Vec<(String, DetectorConfig)> = match param {
        SweepParam::Rings | SweepParam::NmsRings => grid::parse_u32_list(values)
            .map_err(usage)?
            .into_iter()
            .map(|v| {
                let mut c = base.clone();
                match param {
                    SweepParam::Rings => c.rings = v as usize,
                    _ => c.nms_rings = v as usize,
                }
                (v.to_string(), c)
            })
            .collect(),
        SweepParam::Alpha | SweepParam::Beta => grid::parse_f64_list(values)
            .map_err(usage)?
            .into_iter()
            .map(|v| {
                let mut c = base.clone();
                match param {
                    SweepParam::Alpha => c.alpha = v,
                    _ => c.beta = v,
                }
                (v.to_string(), c)
            })
            .collect(),
        SweepParam::Terms => values
            .split(',')
            .map(|t| {
                let terms = t
                    .trim()
                    .parse::<ResponseTerms>()
                    .map_err(|e| UsageError(format!("--values: {e}")))?;
                Ok((terms.to_string(), DetectorConfig { terms, ..base.clone() }))
            })
            .collect::<Result<_>>()?,
    };
    configs
        .into_iter()
        .map(|(label, c)| Ok((label, checked(c)?)))
        .collect()
}

fn sweep(configs: &[(String, DetectorConfig)], data: &DataArgs, out: &Path) -> Result<()> {
    let gt = load_truth(data)?;
    let grid = data.grid();
    let mut csv = String::from("value,mean_iou,mean_f1,cells\n");
    for (label, config) in configs {
        let cells = evaluate_models(&gt, data, &grid, |_, mesh| {
            Ok(Some(detect(mesh, config)?.points.vertices()))
        })?;
        let summary = aggregate(&cells);
        let _ = writeln!(
            csv,
            "{label},{},{},{}",
            opt(summary.mean_iou),
            opt(summary.mean_f1),
            summary.cells
        );
    }
    write(out, &csv)
}
