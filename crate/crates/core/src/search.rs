//! One-dimensional search primitives.

use crate::ext::ExtReal;

/// Golden-section minimisation of a quasiconvex `f` on `[a, b]`.
///
/// Returns every evaluated `(x, f(x))` pair, sorted by `x`; the smallest
/// value among them is the estimate of the minimum. Stops once the bracket
/// is narrower than `tol` (absolute, in `x`).
pub fn golden_section<F>(mut f: F, a: f64, b: f64, tol: f64) -> Vec<(f64, ExtReal)>
where
    F: FnMut(f64) -> ExtReal,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a, b);
    let mut seen = Vec::new();
    let mut eval = |x: f64, seen: &mut Vec<(f64, ExtReal)>| {
        let v = f(x);
        seen.push((x, v));
        v
    };
    let fa = eval(a, &mut seen);
    let fb = eval(b, &mut seen);
    // on a plateau of +∞ head towards the finite end
    let prefer_right = fb.is_finite() && !fa.is_finite();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut seen);
    let mut fd = eval(d, &mut seen);
    while b - a > tol && c < d {
        let go_left = if fc == ExtReal::PosInf && fd == ExtReal::PosInf {
            !prefer_right
        } else {
            fc <= fd
        };
        if go_left {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut seen);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut seen);
        }
    }
    seen.sort_by(|p, q| p.0.total_cmp(&q.0));
    seen.dedup_by(|p, q| p.0 == q.0);
    seen
}

/// Lower bound on `inf f` over `[0, ∞)` for a convex `f` known at the
/// sorted sample points `pts`, assuming `f(x) ≥ x` beyond the last sample.
///
/// Each gap between samples is bounded below by extending the chords of the
/// neighbouring gaps; outside the sampled range the nearest chord is used.
pub fn convex_lower_bound(pts: &[(f64, ExtReal)], floor: f64) -> f64 {
    let n = pts.len();
    let finite = |i: usize| pts.get(i).and_then(|p| p.1.finite()).map(|v| (pts[i].0, v));
    // line through samples i and i + 1, if both finite
    let line = |i: usize| -> Option<(f64, f64)> {
        let (x0, y0) = finite(i)?;
        let (x1, y1) = finite(i + 1)?;
        let slope = (y1 - y0) / (x1 - x0);
        Some((slope, y0 - slope * x0))
    };
    let at = |l: (f64, f64), x: f64| l.0 * x + l.1;
    let mut best = f64::INFINITY;

    // left of the first sample
    if finite(0).is_some() {
        match line(0) {
            Some(l) => best = best.min(at(l, 0.0).min(at(l, pts[0].0))),
            None => best = best.min(floor),
        }
    }
    for i in 0..n.saturating_sub(1) {
        let (x0, x1) = (pts[i].0, pts[i + 1].0);
        if finite(i).is_none() && finite(i + 1).is_none() {
            continue;
        }
        let left = if i >= 1 { line(i - 1) } else { None };
        let right = line(i + 1);
        let bound = match (left, right) {
            (Some(l), Some(r)) => {
                let mut m = at(l, x0).max(at(r, x0)).min(at(l, x1).max(at(r, x1)));
                if l.0 != r.0 {
                    let x = (r.1 - l.1) / (l.0 - r.0);
                    if x > x0 && x < x1 {
                        m = m.min(at(l, x));
                    }
                }
                m
            }
            (Some(l), None) => at(l, x0).min(at(l, x1)),
            (None, Some(r)) => at(r, x0).min(at(r, x1)),
            (None, None) => floor,
        };
        best = best.min(bound);
    }
    // right of the last sample
    if let Some((xl, yl)) = finite(n - 1) {
        // f ≥ max(chord, x) there; a falling chord only guarantees x ≥ xl
        let tail = match n.checked_sub(2).and_then(line) {
            Some(l) if l.0 >= 0.0 => yl.max(xl),
            _ => xl,
        };
        best = best.min(tail);
    }
    best.max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let pts = golden_section(|x| ExtReal::from((x - 1.5) * (x - 1.5) + 2.0), 0.0, 4.0, 1e-10);
        let best = pts.iter().map(|p| p.1).min().unwrap().to_f64();
        assert!((best - 2.0).abs() < 1e-15);
        let lb = convex_lower_bound(&pts, 0.0);
        assert!(lb <= best && best - lb < 1e-9, "{lb}");
    }

    #[test]
    fn lower_bound_handles_infinite_region() {
        // f = x on [1, ∞), ∞ below
        let f = |x: f64| if x < 1.0 { ExtReal::PosInf } else { ExtReal::from(x) };
        let pts = golden_section(f, 0.0, 4.0, 1e-10);
        let lb = convex_lower_bound(&pts, 0.0);
        assert!(lb <= 1.0 && 1.0 - lb < 1e-9, "{lb}");
    }

    #[test]
    fn lower_bound_at_left_boundary() {
        // f = x + 3 decreases towards 0
        let pts = golden_section(|x| ExtReal::from(x + 3.0), 1e-6, 4.0, 1e-10);
        let lb = convex_lower_bound(&pts, 0.0);
        assert!((lb - 3.0).abs() < 1e-10, "{lb}");
    }
}
