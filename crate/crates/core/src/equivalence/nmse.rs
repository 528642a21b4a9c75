//! Normalized mean squared error baseline. Deliberately performs no
//! alignment, so it is sensitive to where the object sits on the plate.

use crate::error::{Error, Result};
use crate::gcode::{Layer, Skeleton};

use super::layer_diagonal;
use crate::geometry::Point;

/// Points per layer after arc-length resampling.
pub const NMSE_SAMPLES: usize = 256;

/// Resamples a polyline to `count` points equally spaced by arc length,
/// keeping both end points. A zero-length polyline repeats its first point.
pub fn resample_by_arc_length(points: &[Point], count: usize) -> Vec<Point> {
    let Some(&first) = points.first() else {
        return Vec::new();
    };
    if count == 0 {
        return Vec::new();
    }
    let mut cumulative = Vec::with_capacity(points.len());
    let mut total = 0.0;
    cumulative.push(0.0);
    for w in points.windows(2) {
        total += w[0].distance(w[1]);
        cumulative.push(total);
    }
    if total <= 0.0 || count == 1 {
        return vec![first; count];
    }

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let target = total * k as f64 / (count - 1) as f64;
        while seg + 2 < points.len() && cumulative[seg + 1] < target {
            seg += 1;
        }
        let (s0, s1) = (cumulative[seg], cumulative[seg + 1]);
        let t = if s1 > s0 {
            ((target - s0) / (s1 - s0)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(points[seg] + (points[seg + 1] - points[seg]) * t);
    }
    out
}

/// Similarity percentage of one pair of layers.
pub fn layer_nmse_similarity(gt: &Layer, cand: &Layer) -> f64 {
    let a = resample_by_arc_length(&gt.points, NMSE_SAMPLES);
    let b = resample_by_arc_length(&cand.points, NMSE_SAMPLES);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mse = a.iter().zip(&b).map(|(p, q)| p.distance_sq(*q)).sum::<f64>() / a.len() as f64;
    let diag = layer_diagonal(gt);
    let nmse = if diag > 0.0 {
        mse / (diag * diag)
    } else if mse == 0.0 {
        0.0
    } else {
        1.0
    };
    100.0 * (1.0 - nmse.clamp(0.0, 1.0))
}

/// Mean per-layer nMSE similarity, layers paired by index. Layers present in
/// only one skeleton score 0 %.
pub fn nmse_similarity(gt: &Skeleton, cand: &Skeleton) -> Result<f64> {
    if gt.is_empty() || cand.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let total = gt.len().max(cand.len());
    let sum: f64 = gt.layers.iter().zip(&cand.layers).map(|(a, b)| layer_nmse_similarity(a, b)).sum();
    Ok(sum / total as f64)
}
