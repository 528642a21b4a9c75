use crate::geometry::Point;

/// Subsequence-aligned dynamic time warping cost.
///
/// The shorter sequence is matched in full against the best contiguous
/// stretch of the longer one: the warping path may start and end at any
/// position of the longer sequence at no cost. Local cost is the Euclidean
/// distance; steps are match, insertion and deletion with unit weight and no
/// window constraint. When both have the same length `reference` plays the
/// longer role.
///
/// Returns `f64::INFINITY` when exactly one side is empty and `0` when both are.
pub fn subsequence_dtw(reference: &[Point], query: &[Point]) -> f64 {
    let (long, short) = if query.len() > reference.len() {
        (query, reference)
    } else {
        (reference, query)
    };
    if short.is_empty() {
        return if long.is_empty() { 0.0 } else { f64::INFINITY };
    }

    let m = long.len();
    // Row 0: free start anywhere along the long sequence.
    let mut prev = vec![0.0_f64; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    for &q in short {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = q.distance(long[j - 1]) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[1..].iter().copied().fold(f64::INFINITY, f64::min)
}
