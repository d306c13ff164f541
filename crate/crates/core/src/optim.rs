//! Scalar search primitives: golden-section minimisation and monotone
//! bracketing, shared by the conjugate oracle, the transform root-finder and
//! the bound parameter searches.

/// Golden-section minimum of `f` on `[a, b]`. Returns `(x_min, f_min)` after
/// at most `max_iters` interval reductions (each costs one evaluation).
///
/// Exact only for unimodal `f`; on a general function it still returns the
/// best probed point, which is all the bound searches require.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, max_iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    debug_assert!(a <= b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..max_iters {
        if b - a <= f64::EPSILON * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        if f1 < best_f {
            best_x = x1;
            best_f = f1;
        }
        if f2 < best_f {
            best_x = x2;
            best_f = f2;
        }
    }
    (best_x, best_f)
}

/// Golden-section maximum (negated minimum).
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, max_iters: usize) -> (f64, f64) {
    let (x, neg) = golden_min(|x| -f(x), a, b, max_iters);
    (x, -neg)
}

/// Minimises `f(exp(u))` over `u in [ln lo, ln hi]` and reports the best
/// multiplicative point. Suits scale parameters spanning decades.
pub fn golden_min_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64, max_iters: usize) -> (f64, f64) {
    debug_assert!(lo > 0.0 && hi > lo);
    let (u, fu) = golden_min(|u| f(u.exp()), lo.ln(), hi.ln(), max_iters);
    (u.exp(), fu)
}

/// Expands a bracket around the sign change of the nondecreasing residual
/// `m(c) - target` and bisects down to `|m(c) - target| <= tol`.
///
/// `m` may return `f64::INFINITY` (treated as above any target). Starts from
/// the unit interval around zero and doubles the step outward, per side, up
/// to `max_doublings` times. Returns `None` when no sign change is found.
pub fn bisect_monotone(
    m: impl Fn(f64) -> f64,
    target: f64,
    tol: f64,
    max_doublings: usize,
    max_bisections: usize,
) -> Option<f64> {
    let mut lo = -0.5;
    let mut hi = 0.5;
    let mut step = 1.0;
    let mut m_lo = m(lo);
    let mut m_hi = m(hi);
    let mut tries = 0;
    while m_lo > target {
        if tries >= max_doublings {
            return None;
        }
        lo -= step;
        step *= 2.0;
        m_lo = m(lo);
        tries += 1;
    }
    step = 1.0;
    tries = 0;
    while m_hi < target {
        if tries >= max_doublings {
            return None;
        }
        hi += step;
        step *= 2.0;
        m_hi = m(hi);
        tries += 1;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_bisections {
        mid = 0.5 * (lo + hi);
        let v = m(mid);
        if (v - target).abs() <= tol {
            return Some(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
    }
    Some(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_min(|x| (x - 1.25) * (x - 1.25) + 3.0, -10.0, 10.0, 128);
        assert!((x - 1.25).abs() < 1e-8);
        assert!((fx - 3.0).abs() < 1e-12);
    }

    #[test]
    fn golden_handles_boundary_minimum() {
        let (x, _) = golden_min(|x| x, 2.0, 5.0, 128);
        assert!((x - 2.0).abs() < 1e-9);
    }

    #[test]
    fn log_scale_search_spans_decades() {
        let (x, _) = golden_min_log(|x| (x.ln() - 3.0) * (x.ln() - 3.0), 1e-6, 1e6, 200);
        assert!((x - 3f64.exp()).abs() / 3f64.exp() < 1e-6);
    }

    #[test]
    fn bisect_hits_monotone_root() {
        let c = bisect_monotone(|c| c.exp(), 1.0, 1e-12, 200, 200).unwrap();
        assert!(c.abs() < 1e-10);
    }

    #[test]
    fn bisect_reports_missing_bracket() {
        assert!(bisect_monotone(|_| 0.0, 1.0, 1e-12, 20, 20).is_none());
    }
}
