//! Lower convex envelopes of `(distortion, rate)` point sets.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Located {
    /// Target lies left of every vertex.
    Below,
    At(usize),
    Between(usize, usize),
}

/// Indices of the vertices of the lower convex hull, sorted by distortion
/// and cut at the first vertex of minimum rate.
pub(crate) fn lower_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].0.is_finite() && pts[i].1.is_finite()).collect();
    idx.sort_by(|&a, &b| pts[a].0.total_cmp(&pts[b].0).then(pts[a].1.total_cmp(&pts[b].1)).then(a.cmp(&b)));
    idx.dedup_by(|b, a| pts[*a].0 == pts[*b].0);
    let cross = |o: usize, a: usize, b: usize| {
        (pts[a].0 - pts[o].0) * (pts[b].1 - pts[o].1) - (pts[a].1 - pts[o].1) * (pts[b].0 - pts[o].0)
    };
    let mut h: Vec<usize> = Vec::new();
    for i in idx {
        while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], i) <= 0.0 {
            h.pop();
        }
        h.push(i);
    }
    let mut end = 0;
    for (j, &i) in h.iter().enumerate() {
        if pts[i].1 < pts[h[end]].1 {
            end = j;
        }
    }
    h.truncate(end + 1);
    h
}

/// Position of `x` among hull vertices `pts` (sorted by first coordinate).
pub(crate) fn locate(pts: &[(f64, f64)], x: f64) -> Located {
    match pts.iter().rposition(|p| p.0 <= x) {
        None => Located::Below,
        Some(i) if i + 1 == pts.len() || pts[i].0 == x => Located::At(i),
        Some(i) => Located::Between(i, i + 1),
    }
}

/// Value of the piecewise-linear envelope through `pts` at `x`.
pub(crate) fn interpolate(pts: &[(f64, f64)], x: f64) -> Option<f64> {
    match locate(pts, x) {
        Located::Below => None,
        Located::At(i) => Some(pts[i].1),
        Located::Between(i, j) => {
            let t = (x - pts[i].0) / (pts[j].0 - pts[i].0);
            Some(pts[i].1 + t * (pts[j].1 - pts[i].1))
        }
    }
}
