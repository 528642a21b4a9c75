//! Layer-wise G-code equivalence checker.
//!
//! Each candidate layer is brought onto its ground-truth layer by a rigid
//! motion found from the layers' convex hulls: the hulls' centroids are made
//! to coincide, then the candidate is turned through whole degrees until the
//! union of the two hulls is as close as possible to the ground-truth hull
//! area. The trajectories are then compared with subsequence DTW and the
//! cost is expressed as a percentage of the ground-truth layer's size.

mod dtw;
mod nmse;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcode::{extract_skeleton, GcodeProgram, Layer, Skeleton};
use crate::geometry::{convex_hull, polygon_area, rotate_points, translate_points, union_area, Point, Polygon};

pub use dtw::subsequence_dtw;
pub use nmse::{layer_nmse_similarity, nmse_similarity, resample_by_arc_length, NMSE_SAMPLES};

/// Version of the serialized [`ComparisonReport`] layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Objective band, as a fraction of the ground-truth hull area, within which
/// local minima of the rotation search are treated as symmetric alternatives.
pub const SYMMETRY_SLACK: f64 = 0.05;

/// Upper bound on symmetric alternatives scored with DTW per layer.
pub const MAX_SYMMETRY_CANDIDATES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// Shift applied to the candidate, `(dx, dy)` in mm.
    pub translation: (f64, f64),
    /// Whole-degree counter-clockwise rotation about the common centroid, in `[0, 359]`.
    pub rotation_deg: u32,
    /// Sub-degree angle when refinement is enabled and improved the objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_rotation_deg: Option<f64>,
    pub fused_area: f64,
    pub gt_area: f64,
    /// `|fused_area - gt_area|` at the chosen angle.
    pub objective: f64,
    /// Set when either hull is degenerate and only translation was applied.
    pub degenerate: bool,
}

impl AlignmentResult {
    /// Angle actually applied to the candidate points.
    pub fn applied_rotation(&self) -> f64 {
        self.refined_rotation_deg.unwrap_or(f64::from(self.rotation_deg))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerScore {
    pub layer_index: usize,
    pub gt_z: f64,
    pub cand_z: f64,
    pub dissimilarity_pct: f64,
    pub alignment: AlignmentResult,
    pub raw_dtw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub per_layer: Vec<LayerScore>,
    /// Layers present in only one of the two skeletons; each scores 100 %.
    pub unpaired_layers: usize,
    pub aggregate_dissimilarity_pct: f64,
    pub aggregate_similarity_pct: f64,
    pub height_penalty_pct: f64,
    pub gt_layer_count: usize,
    pub cand_layer_count: usize,
    pub gt_instruction_count: usize,
    pub cand_instruction_count: usize,
    pub instruction_overhead_ratio: f64,
    pub skip_brim: bool,
    pub global_align: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_nmse_similarity_pct: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompareOptions {
    /// Drop the first layer of both programs before pairing.
    pub skip_brim: bool,
    /// Align the first paired layer and reuse its transform for every layer.
    pub global_align: bool,
    /// Golden-section refinement of the angle within ±1° of the best whole degree.
    pub refine_rotation: bool,
    /// Score every near-optimal rotation (symmetric hulls) with DTW and keep the best.
    pub resolve_symmetry: bool,
    /// Also compute the nMSE baseline on the same layers.
    pub baseline_nmse: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            skip_brim: false,
            global_align: false,
            refine_rotation: false,
            resolve_symmetry: true,
            baseline_nmse: false,
        }
    }
}

/// Objective and fused area at every whole-degree angle; index 0 stands for 360°.
fn rotation_profile(gt: &Polygon, cand: &Polygon, pivot: Point) -> Vec<(f64, f64)> {
    let gt_area = polygon_area(gt);
    (0..360)
        .map(|deg| {
            let fused = union_area(gt, &cand.rotated(pivot, f64::from(deg)));
            (fused, (fused - gt_area).abs())
        })
        .collect()
}

fn tie_tolerance(gt_area: f64) -> f64 {
    1e-9 * gt_area.max(1.0)
}

/// Smallest angle whose objective is within the tie tolerance of the minimum.
fn best_angle(profile: &[(f64, f64)], gt_area: f64) -> usize {
    let tol = tie_tolerance(gt_area);
    let min = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    profile.iter().position(|p| p.1 <= min + tol).unwrap_or(0)
}

/// The best angle plus every circular local minimum whose objective lies
/// within [`SYMMETRY_SLACK`] of it, in increasing angle order.
fn near_optimal_angles(profile: &[(f64, f64)], gt_area: f64) -> Vec<usize> {
    let best = best_angle(profile, gt_area);
    let limit = profile[best].1 + SYMMETRY_SLACK * gt_area + tie_tolerance(gt_area);
    let n = profile.len();
    let mut minima: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = profile[i].1;
            v <= limit && v <= profile[(i + n - 1) % n].1 && v <= profile[(i + 1) % n].1
        })
        .collect();
    minima.sort_by(|&a, &b| profile[a].1.total_cmp(&profile[b].1).then(a.cmp(&b)));
    minima.truncate(MAX_SYMMETRY_CANDIDATES);
    if !minima.contains(&best) {
        minima.pop();
        minima.push(best);
    }
    minima.sort_unstable();
    minima
}

/// Golden-section search of the objective on `[deg - 1, deg + 1]`.
fn refine_angle(gt: &Polygon, cand: &Polygon, pivot: Point, deg: f64) -> (f64, f64, f64) {
    let gt_area = polygon_area(gt);
    let eval = |a: f64| {
        let fused = union_area(gt, &cand.rotated(pivot, a));
        (fused, (fused - gt_area).abs())
    };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (deg - 1.0, deg + 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (eval(c).1, eval(d).1);
    for _ in 0..48 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = eval(c).1;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = eval(d).1;
        }
    }
    let a = (lo + hi) / 2.0;
    let (fused, obj) = eval(a);
    (a, fused, obj)
}

/// Whole-degree rotation of `cand_poly` about its centroid that brings the
/// area of its union with `gt_poly` closest to the area of `gt_poly`.
///
/// Both polygons are expected to share a centroid. Ties go to the smallest
/// angle, with 360° reported as 0. The returned translation is zero.
pub fn best_rotation(gt_poly: &Polygon, cand_poly: &Polygon) -> Result<AlignmentResult> {
    for p in [gt_poly, cand_poly] {
        if p.is_thin() {
            return Err(Error::DegeneratePolygon(crate::geometry::DEGENERATE_AREA));
        }
    }
    let gt_area = polygon_area(gt_poly);
    let profile = rotation_profile(gt_poly, cand_poly, cand_poly.centroid());
    let deg = best_angle(&profile, gt_area);
    Ok(AlignmentResult {
        translation: (0.0, 0.0),
        rotation_deg: deg as u32,
        refined_rotation_deg: None,
        fused_area: profile[deg].0,
        gt_area,
        objective: profile[deg].1,
        degenerate: false,
    })
}

/// Candidate alignments of `cand` onto `gt`: the area-optimal one, plus
/// symmetric alternatives when `resolve_symmetry` is set.
fn alignment_candidates(gt: &Layer, cand: &Layer, opts: &CompareOptions) -> Result<Vec<(AlignmentResult, Vec<Point>)>> {
    if gt.points.is_empty() || cand.points.is_empty() {
        return Err(Error::EmptyInput("alignment of an empty layer"));
    }
    let gt_hull = convex_hull(&gt.points)?;
    let cand_hull = convex_hull(&cand.points)?;
    let pivot = gt_hull.centroid();
    let shift = pivot - cand_hull.centroid();
    let shifted = translate_points(&cand.points, shift.x, shift.y);
    let shifted_hull = cand_hull.translated(shift.x, shift.y);
    let gt_area = polygon_area(&gt_hull);

    if gt_hull.is_thin() || shifted_hull.is_thin() {
        let fused = union_area(&gt_hull, &shifted_hull);
        let result = AlignmentResult {
            translation: (shift.x, shift.y),
            rotation_deg: 0,
            refined_rotation_deg: None,
            fused_area: fused,
            gt_area,
            objective: (fused - gt_area).abs(),
            degenerate: true,
        };
        return Ok(vec![(result, shifted)]);
    }

    let profile = rotation_profile(&gt_hull, &shifted_hull, pivot);
    let angles = if opts.resolve_symmetry {
        near_optimal_angles(&profile, gt_area)
    } else {
        vec![best_angle(&profile, gt_area)]
    };
    Ok(angles
        .into_iter()
        .map(|deg| {
            let mut result = AlignmentResult {
                translation: (shift.x, shift.y),
                rotation_deg: deg as u32,
                refined_rotation_deg: None,
                fused_area: profile[deg].0,
                gt_area,
                objective: profile[deg].1,
                degenerate: false,
            };
            if opts.refine_rotation {
                let (a, fused, obj) = refine_angle(&gt_hull, &shifted_hull, pivot, deg as f64);
                if obj < result.objective {
                    result.refined_rotation_deg = Some(a.rem_euclid(360.0));
                    result.fused_area = fused;
                    result.objective = obj;
                }
            }
            let points = rotate_points(&shifted, pivot, result.applied_rotation());
            (result, points)
        })
        .collect())
}

/// Moves `cand` onto `gt`: hull centroids made to coincide, then the
/// area-optimal whole-degree rotation about that centroid. Degenerate hulls
/// get translation only, flagged in the result.
pub fn align_layer(gt: &Layer, cand: &Layer) -> Result<(AlignmentResult, Vec<Point>)> {
    let opts = CompareOptions {
        resolve_symmetry: false,
        ..Default::default()
    };
    let mut candidates = alignment_candidates(gt, cand, &opts)?;
    Ok(candidates.remove(0))
}

/// Diagonal of the axis-aligned bounding box of the layer's hull.
pub(crate) fn layer_diagonal(layer: &Layer) -> f64 {
    crate::geometry::bounding_box(&layer.points)
        .map(|(lo, hi)| lo.distance(hi))
        .unwrap_or(0.0)
}

/// DTW cost as a percentage of `N_gt × D_gt`, clipped to `[0, 100]`.
fn normalized_dissimilarity(gt: &Layer, raw: f64) -> f64 {
    let scale = gt.points.len() as f64 * layer_diagonal(gt);
    if raw == 0.0 {
        return 0.0;
    }
    if scale <= 0.0 || !scale.is_finite() || !raw.is_finite() {
        return 100.0;
    }
    (100.0 * raw / scale).clamp(0.0, 100.0)
}

fn score_alignment(gt: &Layer, cand: &Layer, index: usize, alignment: AlignmentResult, points: &[Point]) -> LayerScore {
    let raw = subsequence_dtw(&gt.points, points);
    LayerScore {
        layer_index: index,
        gt_z: gt.z,
        cand_z: cand.z,
        dissimilarity_pct: normalized_dissimilarity(gt, raw),
        alignment,
        raw_dtw: raw,
    }
}

fn score_layer(gt: &Layer, cand: &Layer, index: usize, opts: &CompareOptions) -> Result<LayerScore> {
    if cand.points.is_empty() {
        let alignment = AlignmentResult {
            translation: (0.0, 0.0),
            rotation_deg: 0,
            refined_rotation_deg: None,
            fused_area: 0.0,
            gt_area: 0.0,
            objective: 0.0,
            degenerate: true,
        };
        return Ok(LayerScore {
            layer_index: index,
            gt_z: gt.z,
            cand_z: cand.z,
            dissimilarity_pct: 100.0,
            alignment,
            raw_dtw: f64::INFINITY,
        });
    }
    Ok(best_alignment(gt, cand, index, opts)?.0)
}

/// Lowest-DTW candidate alignment with its moved points.
fn best_alignment(gt: &Layer, cand: &Layer, index: usize, opts: &CompareOptions) -> Result<(LayerScore, Vec<Point>)> {
    let mut best: Option<(LayerScore, Vec<Point>)> = None;
    for (alignment, points) in alignment_candidates(gt, cand, opts)? {
        let score = score_alignment(gt, cand, index, alignment, &points);
        if best.as_ref().is_none_or(|b| score.raw_dtw < b.0.raw_dtw) {
            best = Some((score, points));
        }
    }
    Ok(best.expect("at least one alignment candidate"))
}

/// The alignment [`compare_with`] would score for this layer pair, with the
/// candidate points moved onto the ground truth.
pub fn align_layer_with(gt: &Layer, cand: &Layer, opts: &CompareOptions) -> Result<(AlignmentResult, Vec<Point>)> {
    let (score, points) = best_alignment(gt, cand, 0, opts)?;
    Ok((score.alignment, points))
}

/// Aligns `cand` onto `gt` and scores the residual trajectory difference.
pub fn layer_dissimilarity(gt: &Layer, cand: &Layer) -> Result<LayerScore> {
    score_layer(gt, cand, 0, &CompareOptions::default())
}

/// [`layer_dissimilarity`] with explicit options.
pub fn layer_dissimilarity_with(gt: &Layer, cand: &Layer, opts: &CompareOptions) -> Result<LayerScore> {
    score_layer(gt, cand, 0, opts)
}

/// Compares two skeletons with default options.
pub fn compare(gt: &Skeleton, cand: &Skeleton) -> Result<ComparisonReport> {
    compare_with(gt, cand, &CompareOptions::default())
}

/// Compares two programs; instruction counts are their `G0`/`G1` counts.
pub fn compare_programs(gt: &GcodeProgram, cand: &GcodeProgram, opts: &CompareOptions) -> Result<ComparisonReport> {
    let mut report = compare_with(&extract_skeleton(gt), &extract_skeleton(cand), opts)?;
    report.gt_instruction_count = gt.movement_count();
    report.cand_instruction_count = cand.movement_count();
    report.instruction_overhead_ratio = overhead(report.gt_instruction_count, report.cand_instruction_count);
    Ok(report)
}

fn overhead(gt: usize, cand: usize) -> f64 {
    if gt == 0 {
        0.0
    } else {
        cand as f64 / gt as f64
    }
}

/// Layer-by-layer comparison.
///
/// Layers are paired by index. Each layer present in only one skeleton
/// scores 100 %. The aggregate is the mean over all layers plus a height
/// penalty of `100 × |Δ layers| / max(layers)`, clipped to `[0, 100]`.
/// Per-layer scoring runs on the current rayon pool; the result order
/// does not depend on scheduling. Instruction counts are the skeleton point
/// counts; use [`compare_programs`] for `G0`/`G1` counts.
pub fn compare_with(gt: &Skeleton, cand: &Skeleton, opts: &CompareOptions) -> Result<ComparisonReport> {
    if gt.is_empty() || cand.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let first = usize::from(opts.skip_brim);
    let gt_layers = gt.layers.get(first..).unwrap_or_default();
    let cand_layers = cand.layers.get(first..).unwrap_or_default();
    if gt_layers.is_empty() || cand_layers.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let paired = gt_layers.len().min(cand_layers.len());
    let total = gt_layers.len().max(cand_layers.len());

    let per_layer: Vec<LayerScore> = if opts.global_align {
        let alignment = score_layer(&gt_layers[0], &cand_layers[0], first, opts)?.alignment;
        let pivot = convex_hull(&gt_layers[0].points)?.centroid();
        (0..paired)
            .into_par_iter()
            .map(|i| {
                let (gt_l, cand_l) = (&gt_layers[i], &cand_layers[i]);
                let (dx, dy) = alignment.translation;
                let moved = rotate_points(&translate_points(&cand_l.points, dx, dy), pivot, alignment.applied_rotation());
                score_alignment(gt_l, cand_l, i + first, alignment.clone(), &moved)
            })
            .collect()
    } else {
        (0..paired)
            .into_par_iter()
            .map(|i| score_layer(&gt_layers[i], &cand_layers[i], i + first, opts))
            .collect::<Result<_>>()?
    };

    let unpaired = total - paired;
    let sum: f64 = per_layer.iter().map(|s| s.dissimilarity_pct).sum::<f64>() + 100.0 * unpaired as f64;
    let height_penalty = 100.0 * unpaired as f64 / total as f64;
    let aggregate = (sum / total as f64 + height_penalty).clamp(0.0, 100.0);

    let baseline = if opts.baseline_nmse {
        let g = Skeleton {
            layers: gt_layers.to_vec(),
        };
        let c = Skeleton {
            layers: cand_layers.to_vec(),
        };
        Some(nmse_similarity(&g, &c)?)
    } else {
        None
    };

    Ok(ComparisonReport {
        schema_version: REPORT_SCHEMA_VERSION,
        per_layer,
        unpaired_layers: unpaired,
        aggregate_dissimilarity_pct: aggregate,
        aggregate_similarity_pct: 100.0 - aggregate,
        height_penalty_pct: height_penalty,
        gt_layer_count: gt.len(),
        cand_layer_count: cand.len(),
        gt_instruction_count: gt.point_count(),
        cand_instruction_count: cand.point_count(),
        instruction_overhead_ratio: overhead(gt.point_count(), cand.point_count()),
        skip_brim: opts.skip_brim,
        global_align: opts.global_align,
        baseline_nmse_similarity_pct: baseline,
    })
}
