//! Exact penalized change-point detection (PELT) for a piecewise-constant
//! mean under squared-error cost.

use crate::error::{Error, Result};

/// Squared-error segment cost from prefix sums of a centred series.
pub(crate) struct L2Cost {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl L2Cost {
    pub fn new(series: &[f64]) -> Self {
        let mean = if series.is_empty() {
            0.0
        } else {
            series.iter().sum::<f64>() / series.len() as f64
        };
        let mut sum = Vec::with_capacity(series.len() + 1);
        let mut sum_sq = Vec::with_capacity(series.len() + 1);
        let (mut s, mut q) = (0.0, 0.0);
        sum.push(s);
        sum_sq.push(q);
        for &v in series {
            let c = v - mean;
            s += c;
            q += c * c;
            sum.push(s);
            sum_sq.push(q);
        }
        L2Cost { sum, sum_sq }
    }

    /// Cost of the half-open segment `[start, end)`.
    pub fn cost(&self, start: usize, end: usize) -> f64 {
        let n = (end - start) as f64;
        let s = self.sum[end] - self.sum[start];
        let q = self.sum_sq[end] - self.sum_sq[start];
        (q - s * s / n).max(0.0)
    }
}

struct Candidate {
    start: usize,
    /// First end index at which this start may be discarded.
    expires: Option<usize>,
}

/// Change points of `series` minimizing total segment cost plus `penalty`
/// per change point, with every segment at least `min_segment` long.
///
/// Returned indices are segment starts, strictly increasing, excluding 0.
/// A series shorter than `2 × min_segment` has no change points.
pub fn detect_z_changepoints(series: &[f64], penalty: f64, min_segment: usize) -> Result<Vec<usize>> {
    if !penalty.is_finite() || penalty < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "PELT penalty must be finite and ≥ 0, got {penalty}"
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let min_seg = min_segment.max(1);
    let n = series.len();
    if n < 2 * min_seg {
        return Ok(Vec::new());
    }

    let cost = L2Cost::new(series);
    let mut best = vec![f64::INFINITY; n + 1];
    let mut prev = vec![0usize; n + 1];
    best[0] = -penalty;
    let mut set = vec![Candidate { start: 0, expires: None }];

    for t in min_seg..=n {
        set.retain(|c| c.expires.is_none_or(|e| t < e));

        let mut f_t = f64::INFINITY;
        let mut arg = 0;
        for c in set.iter().filter(|c| t - c.start >= min_seg) {
            let v = best[c.start] + cost.cost(c.start, t) + penalty;
            if v < f_t {
                f_t = v;
                arg = c.start;
            }
        }
        best[t] = f_t;
        prev[t] = arg;

        // A start beaten by t now is beaten for every end at least
        // `min_seg` past t, once t itself becomes admissible.
        let tol = 1e-12 * (1.0 + f_t.abs());
        for c in set.iter_mut().filter(|c| c.expires.is_none()) {
            if best[c.start] + cost.cost(c.start, t) > f_t + tol {
                c.expires = Some(t + min_seg);
            }
        }
        set.push(Candidate { start: t, expires: None });
    }

    let mut points = Vec::new();
    let mut t = n;
    while t > 0 {
        let s = prev[t];
        if s > 0 {
            points.push(s);
        }
        t = s;
    }
    points.reverse();
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_step() {
        let mut z = vec![0.3; 10];
        z.extend(vec![0.6; 10]);
        assert_eq!(detect_z_changepoints(&z, 0.01, 2).unwrap(), vec![10]);
    }

    #[test]
    fn constant_has_none() {
        assert!(detect_z_changepoints(&[0.9; 40], 0.05, 3).unwrap().is_empty());
    }

    #[test]
    fn short_series_has_none() {
        assert!(detect_z_changepoints(&[0.3, 0.6, 0.9], 0.0, 2).unwrap().is_empty());
        assert!(detect_z_changepoints(&[], 0.05, 3).unwrap().is_empty());
    }

    #[test]
    fn respects_min_segment() {
        let z = [0.3, 0.3, 0.3, 0.6, 0.3, 0.3, 0.3, 0.3];
        let cps = detect_z_changepoints(&z, 0.0, 2).unwrap();
        let mut bounds = vec![0];
        bounds.extend(&cps);
        bounds.push(z.len());
        assert!(bounds.windows(2).all(|w| w[1] - w[0] >= 2), "{cps:?}");
    }

    #[test]
    fn rejects_bad_penalty() {
        assert!(detect_z_changepoints(&[0.3; 10], -1.0, 2).is_err());
        assert!(detect_z_changepoints(&[0.3; 10], f64::NAN, 2).is_err());
    }

    #[test]
    fn cost_matches_direct() {
        let v = [1.0, 4.0, 2.0, 8.0, 5.0];
        let c = L2Cost::new(&v);
        let seg = &v[1..4];
        let m = seg.iter().sum::<f64>() / 3.0;
        let direct: f64 = seg.iter().map(|x| (x - m) * (x - m)).sum();
        assert!((c.cost(1, 4) - direct).abs() < 1e-12);
    }
}
