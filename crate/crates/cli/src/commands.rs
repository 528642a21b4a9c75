use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gcode_forensics::{
    align_layer_with, build_gcode, compare_programs, emit_program, extract_skeleton, gen_shape, gen_variants, inject_noise, parse_program,
    rotate_gcode, translate_gcode, CompareOptions, ComparisonReport, GcodeProgram, PrinterProfile, ShapeKind, ShapeSpec,
    TrajectoryPrediction, VariantSpec,
};
use serde::Serialize;

use crate::plot::LayerPlot;
use crate::{Baseline, CompareArgs, GenDatasetArgs, ManipulateArgs, ParseArgs, PlotArgs, PostprocessArgs, SkeletonArgs};

fn read_program(path: &Path) -> Result<GcodeProgram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(parse_program(&text)
        .with_context(|| format!("parsing {}", path.display()))?
        .with_name(name))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ParseSummary {
    instructions: usize,
    moves: usize,
    other: usize,
    layers: usize,
    points: usize,
}

pub fn parse(args: ParseArgs) -> Result<()> {
    let program = read_program(&args.input)?;
    let skeleton = extract_skeleton(&program);
    let summary = ParseSummary {
        instructions: program.len(),
        moves: program.movement_count(),
        other: program.len() - program.movement_count(),
        layers: skeleton.len(),
        points: skeleton.point_count(),
    };
    print!("{}", to_json(&summary)?);
    if let Some(out) = args.out {
        write(&out, emit_program(&program))?;
    }
    Ok(())
}

pub fn skeleton(args: SkeletonArgs) -> Result<()> {
    let skeleton = extract_skeleton(&read_program(&args.input)?);
    let json = to_json(&skeleton)?;
    match args.out {
        Some(out) => write(&out, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

pub fn manipulate(args: ManipulateArgs) -> Result<()> {
    let mut program = read_program(&args.input)?;
    if args.rotate != 0.0 {
        program = rotate_gcode(&program, args.rotate)?;
    }
    if let Some((dx, dy)) = args.translate {
        program = translate_gcode(&program, dx, dy)?;
    }
    write(&args.out, emit_program(&program))
}

#[derive(Serialize)]
struct LayerRow {
    layer_index: usize,
    gt_z: f64,
    cand_z: f64,
    dissimilarity_pct: f64,
    rotation_deg: f64,
    dx: f64,
    dy: f64,
    fused_area: f64,
    gt_area: f64,
    raw_dtw: f64,
    degenerate: bool,
}

fn write_per_layer(path: &Path, report: &ComparisonReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for l in &report.per_layer {
        w.serialize(LayerRow {
            layer_index: l.layer_index,
            gt_z: l.gt_z,
            cand_z: l.cand_z,
            dissimilarity_pct: l.dissimilarity_pct,
            rotation_deg: l.alignment.applied_rotation(),
            dx: l.alignment.translation.0,
            dy: l.alignment.translation.1,
            fused_area: l.alignment.fused_area,
            gt_area: l.alignment.gt_area,
            raw_dtw: l.raw_dtw,
            degenerate: l.alignment.degenerate,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let gt = read_program(&args.gt)?;
    let cand = read_program(&args.cand)?;
    let opts = CompareOptions {
        skip_brim: args.skip_brim,
        global_align: args.global_align,
        refine_rotation: args.refine_rotation,
        resolve_symmetry: !args.no_symmetry,
        baseline_nmse: args.baseline == Some(Baseline::Nmse),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?;
    let report = pool.install(|| compare_programs(&gt, &cand, &opts))?;
    write(&args.report, to_json(&report)?)?;
    if let Some(path) = &args.per_layer {
        write_per_layer(path, &report)?;
    }
    print!(
        "similarity {:.4}% over {} layers",
        report.aggregate_similarity_pct,
        report.gt_layer_count.max(report.cand_layer_count)
    );
    if let Some(b) = report.baseline_nmse_similarity_pct {
        print!(", nMSE baseline {b:.4}%");
    }
    println!();
    Ok(())
}

pub fn postprocess(args: PostprocessArgs) -> Result<()> {
    let profile: PrinterProfile = match &args.profile {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => PrinterProfile::default(),
    };
    let mut reader = csv::Reader::from_path(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let predictions = reader
        .deserialize()
        .collect::<Result<Vec<TrajectoryPrediction>, _>>()
        .with_context(|| format!("parsing {}", args.input.display()))?;
    let program = build_gcode(&predictions, &profile, args.pelt_penalty, args.pelt_min_segment)?;
    write(&args.out, emit_program(&program))
}

#[derive(Serialize)]
struct ManifestEntry {
    label: String,
    file: String,
    rotation_deg: f64,
    dx: f64,
    dy: f64,
}

#[derive(Serialize)]
struct Manifest {
    shape: ShapeSpec,
    variant: String,
    seed: u64,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    predictions: Option<String>,
    variants: Vec<ManifestEntry>,
}

pub fn gen_dataset(args: GenDatasetArgs) -> Result<()> {
    let kind = match (args.shape, args.sides) {
        (ShapeKind::PolygonPrism { .. }, Some(sides)) => ShapeKind::PolygonPrism { sides },
        (ShapeKind::StarPrism { .. }, Some(points)) => ShapeKind::StarPrism { points },
        (ShapeKind::AsymmetricL, Some(_)) => bail!("--sides does not apply to asymmetric_L"),
        (kind, None) => kind,
    };
    let spec = ShapeSpec {
        kind,
        num_layers: args.layers,
        footprint_size: args.footprint,
        infill: args.infill.into(),
        points_per_layer: args.points_per_layer,
    };
    let source = gen_shape(&spec, args.seed)?;
    let variants = gen_variants(&source, &VariantSpec::new(args.variant))?;

    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    write(&args.out_dir.join("source.gcode"), emit_program(&source))?;
    let mut entries = Vec::with_capacity(variants.len());
    for v in variants {
        let file = format!("{}.gcode", v.label);
        write(&args.out_dir.join(&file), emit_program(&v.program))?;
        entries.push(ManifestEntry {
            label: v.label,
            file,
            rotation_deg: v.rotation_deg,
            dx: v.dx,
            dy: v.dy,
        });
    }

    let predictions = if args.predictions {
        let preds = inject_noise(&source, args.xy_sigma, args.z_sigma, args.seed)?;
        let path = args.out_dir.join("predictions.csv");
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        for p in &preds {
            w.serialize(p)?;
        }
        w.flush()?;
        Some("predictions.csv".to_owned())
    } else {
        None
    };

    let manifest = Manifest {
        shape: spec,
        variant: args.variant.to_string(),
        seed: args.seed,
        source: "source.gcode".to_owned(),
        predictions,
        variants: entries,
    };
    write(&args.out_dir.join("manifest.json"), to_json(&manifest)?)?;
    println!("wrote {} variants to {}", manifest.variants.len(), args.out_dir.display());
    Ok(())
}

pub fn plot(args: PlotArgs) -> Result<()> {
    let gt = extract_skeleton(&read_program(&args.gt)?);
    let cand = extract_skeleton(&read_program(&args.cand)?);
    let pick = |sk: &gcode_forensics::Skeleton, what: &str| {
        sk.layers
            .get(args.layer)
            .cloned()
            .with_context(|| format!("{what} has {} layers, no layer {}", sk.len(), args.layer))
    };
    let gt_layer = pick(&gt, "ground truth")?;
    let mut cand_layer = pick(&cand, "candidate")?;
    let mut caption = format!("layer {} (z = {})", args.layer, gcode_forensics::gcode::format_number(gt_layer.z));
    if args.align {
        let (alignment, points) = align_layer_with(&gt_layer, &cand_layer, &CompareOptions::default())?;
        cand_layer.points = points;
        caption.push_str(&format!(
            ", candidate aligned: rotation {}°, shift ({}, {})",
            gcode_forensics::gcode::format_number(alignment.applied_rotation()),
            gcode_forensics::gcode::format_number(alignment.translation.0),
            gcode_forensics::gcode::format_number(alignment.translation.1),
        ));
    }
    let svg = LayerPlot {
        gt: &gt_layer.points,
        cand: &cand_layer.points,
        caption: &caption,
    }
    .render()?;
    write(&args.out, svg)
}
