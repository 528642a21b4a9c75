//! Reference implementations used as test oracles. Each is written
//! independently of the library code it checks.
#![allow(dead_code)]

use gcode_forensics::Point;

/// Exhaustive subsequence DTW: tries every start offset in the longer
/// sequence and enumerates every monotone warping path recursively.
pub fn brute_subsequence_dtw(reference: &[Point], query: &[Point]) -> f64 {
    let (long, short) = if query.len() > reference.len() {
        (query, reference)
    } else {
        (reference, query)
    };

    // Cheapest path from (i, j) to the end of `short`, free to stop anywhere in `long`.
    fn walk(long: &[Point], short: &[Point], i: usize, j: usize) -> f64 {
        let here = ((short[i].x - long[j].x).powi(2) + (short[i].y - long[j].y).powi(2)).sqrt();
        if i == short.len() - 1 {
            let mut best: f64 = here;
            // Remaining long points may be absorbed by the last query point only
            // when the path continues, which never lowers the cost; stopping is free.
            if j + 1 < long.len() {
                best = best.min(here + walk(long, short, i, j + 1));
            }
            return best;
        }
        let mut best = f64::INFINITY;
        if j + 1 < long.len() {
            best = best.min(walk(long, short, i + 1, j + 1));
            best = best.min(walk(long, short, i, j + 1));
        }
        best = best.min(walk(long, short, i + 1, j));
        here + best
    }

    (0..long.len())
        .map(|start| walk(long, short, 0, start))
        .fold(f64::INFINITY, f64::min)
}

/// Direct squared-error cost of a segment.
pub fn segment_cost(series: &[f64]) -> f64 {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    series.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// O(n²) optimal partitioning: minimal total cost plus `penalty` per change
/// point, every segment at least `min_seg` long. Returns (cost, change points).
pub fn optimal_partition(series: &[f64], penalty: f64, min_seg: usize) -> (f64, Vec<usize>) {
    let n = series.len();
    let m = min_seg.max(1);
    if n < 2 * m {
        return (segment_cost(series), Vec::new());
    }
    let mut f = vec![f64::INFINITY; n + 1];
    let mut arg = vec![0usize; n + 1];
    f[0] = -penalty;
    for t in m..=n {
        for s in 0..=t - m {
            if s != 0 && s < m {
                continue;
            }
            if !f[s].is_finite() {
                continue;
            }
            let v = f[s] + segment_cost(&series[s..t]) + penalty;
            if v < f[t] {
                f[t] = v;
                arg[t] = s;
            }
        }
    }
    let mut cps = Vec::new();
    let mut t = n;
    while t > 0 {
        if arg[t] > 0 {
            cps.push(arg[t]);
        }
        t = arg[t];
    }
    cps.reverse();
    (f[n], cps)
}

/// Penalized cost of a given segmentation.
pub fn partition_cost(series: &[f64], cps: &[usize], penalty: f64) -> f64 {
    let mut bounds = vec![0];
    bounds.extend_from_slice(cps);
    bounds.push(series.len());
    bounds.windows(2).map(|w| segment_cost(&series[w[0]..w[1]])).sum::<f64>() + penalty * cps.len() as f64
}

/// Even-odd ray casting; points on the boundary count as inside when within `tol`.
pub fn point_in_polygon(p: Point, poly: &[Point], tol: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        let dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
        if len > 0.0 && (cross / len).abs() <= tol && dot >= -tol && dot <= len * len + tol {
            return true;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > p.y) != (pj.y > p.y) && p.x < (pj.x - pi.x) * (p.y - pi.y) / (pj.y - pi.y) + pi.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Counts layers of a G-code text by a plain scan: the modal Z is tracked
/// over every line starting with G0/G1, and a layer is counted whenever a
/// G1 line carrying X, Y or Z is seen at a Z different from the last one.
pub fn count_layers_by_scan(text: &str) -> usize {
    let mut z = 0.0_f64;
    let mut last: Option<f64> = None;
    let mut count = 0;
    for line in text.lines() {
        let code = line.split(';').next().unwrap().trim();
        let mut words = code.split_whitespace();
        let Some(cmd) = words.next() else { continue };
        if cmd != "G0" && cmd != "G1" {
            continue;
        }
        let mut positional = false;
        for w in words {
            match w.chars().next() {
                Some('Z') => {
                    z = w[1..].parse().unwrap();
                    positional = true;
                }
                Some('X') | Some('Y') => positional = true,
                _ => {}
            }
        }
        if cmd == "G1" && positional && last != Some(z) {
            count += 1;
            last = Some(z);
        }
    }
    count
}

/// Piecewise-constant series with steps of `step` at the given change points.
pub fn step_series(len: usize, cps: &[usize], base: f64, step: f64) -> Vec<f64> {
    (0..len)
        .map(|i| base + step * cps.iter().filter(|&&c| c <= i).count() as f64)
        .collect()
}
