//! `gcode-forensics` command-line tool.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when the input data
//! cannot be processed.

mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gcode_forensics::{Infill, ShapeKind, VariantKind};

#[derive(Debug, Parser)]
#[command(name = "gcode-forensics", version, about = "Compare, transform and reconstruct G-code toolpaths")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Summarize a G-code file, optionally re-emitting it in canonical form.
    Parse(ParseArgs),
    /// Extract the per-layer print trajectory as JSON.
    Skeleton(SkeletonArgs),
    /// Rotate about the object's hull centroid, then translate.
    Manipulate(ManipulateArgs),
    /// Layer-wise equivalence check of a candidate against a ground truth.
    Compare(CompareArgs),
    /// Build G-code from per-move trajectory predictions.
    Postprocess(PostprocessArgs),
    /// Generate a synthetic object and its rotated/translated variants.
    GenDataset(GenDatasetArgs),
    /// Overlay one layer of two programs as SVG (ground truth blue, candidate red).
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct ParseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the canonical re-emission here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SkeletonArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output JSON file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ManipulateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Counter-clockwise rotation in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rotate: f64,
    /// Shift in mm, as `dx,dy`.
    #[arg(long, value_parser = parse_pair, allow_negative_numbers = true)]
    translate: Option<(f64, f64)>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Baseline {
    Nmse,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    cand: PathBuf,
    /// JSON report path.
    #[arg(long)]
    report: PathBuf,
    /// Per-layer CSV path.
    #[arg(long)]
    per_layer: Option<PathBuf>,
    /// Leave out the first (brim) layer of both programs.
    #[arg(long)]
    skip_brim: bool,
    /// Reuse the first layer's alignment for every layer.
    #[arg(long)]
    global_align: bool,
    /// Refine each layer's rotation below one degree.
    #[arg(long)]
    refine_rotation: bool,
    /// Keep the smallest area-optimal angle even for symmetric hulls.
    #[arg(long)]
    no_symmetry: bool,
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    /// Worker threads for per-layer scoring; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct PostprocessArgs {
    /// CSV with header `cmd,x,y,z`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Printer profile JSON; missing fields take defaults.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, default_value_t = gcode_forensics::postprocess::DEFAULT_PELT_PENALTY)]
    pelt_penalty: f64,
    #[arg(long, default_value_t = gcode_forensics::postprocess::DEFAULT_PELT_MIN_SEGMENT)]
    pelt_min_segment: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenDatasetArgs {
    /// polygon_prism (square), square_prism, star_prism or asymmetric_L.
    #[arg(long, value_parser = parse_shape)]
    shape: ShapeKind,
    /// Polygon side count or star tip count, overriding the shape's default.
    #[arg(long)]
    sides: Option<usize>,
    /// R, T or RT.
    #[arg(long, value_parser = parse_variant)]
    variant: VariantKind,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    layers: usize,
    /// Footprint width in mm.
    #[arg(long, default_value_t = 10.0)]
    footprint: f64,
    #[arg(long, value_enum, default_value_t = InfillArg::Concentric)]
    infill: InfillArg,
    /// Minimum points on each layer's outline.
    #[arg(long, default_value_t = 0)]
    points_per_layer: usize,
    #[arg(long, env = "GCODE_FORENSICS_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write `predictions.csv` for the source object with Gaussian noise.
    #[arg(long)]
    predictions: bool,
    #[arg(long, default_value_t = 0.0)]
    xy_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    z_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InfillArg {
    Concentric,
    None,
}

impl From<InfillArg> for Infill {
    fn from(v: InfillArg) -> Self {
        match v {
            InfillArg::Concentric => Infill::Concentric,
            InfillArg::None => Infill::None,
        }
    }
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    cand: PathBuf,
    /// Zero-based layer index.
    #[arg(long)]
    layer: usize,
    #[arg(long)]
    out: PathBuf,
    /// Draw the candidate after aligning it onto the ground truth.
    #[arg(long)]
    align: bool,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected dx,dy, got {s:?}"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("not a number: {t:?}"))
    };
    Ok((num(a)?, num(b)?))
}

fn parse_shape(s: &str) -> Result<ShapeKind, String> {
    s.parse().map_err(|e: gcode_forensics::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<VariantKind, String> {
    s.parse().map_err(|e: gcode_forensics::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let result = match cli.command {
        Cmd::Parse(a) => commands::parse(a),
        Cmd::Skeleton(a) => commands::skeleton(a),
        Cmd::Manipulate(a) => commands::manipulate(a),
        Cmd::Compare(a) => commands::compare(a),
        Cmd::Postprocess(a) => commands::postprocess(a),
        Cmd::GenDataset(a) => commands::gen_dataset(a),
        Cmd::Plot(a) => commands::plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
