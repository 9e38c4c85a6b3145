//! One-dimensional grids and golden-section maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `steps` evenly spaced points from `min` to `max` inclusive.
///
/// Points are computed as `min + (max - min) * i / (steps - 1)` so that both
/// endpoints and every exactly representable interior node are hit exactly.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let span = max - min;
            let last = (steps - 1) as f64;
            (0..steps)
                .map(|i| {
                    if i + 1 == steps {
                        max
                    } else {
                        min + span * (i as f64) / last
                    }
                })
                .collect()
        }
    }
}

fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes a unimodal `f` on `[a, b]`; returns `(argmax, max)`.
///
/// NaN evaluations are treated as minus infinity. The endpoints are compared
/// with the interior result so a monotone `f` still yields its edge maximum.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = score(f(x1));
    let mut f2 = score(f(x2));
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = score(f(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = score(f(x1));
        }
        iterations += 1;
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, score(f(mid)));
    for x in [a, b] {
        let v = score(f(x));
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Dense grid scan on `[a, b]` followed by golden-section refinement around
/// the best node.
pub fn grid_then_golden<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    steps: usize,
    tol: f64,
) -> (f64, f64) {
    let grid = linspace(a, b, steps.max(3));
    let (idx, _) = grid.iter().map(|&x| score(f(x))).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, v)| if v > best.1 { (i, v) } else { best },
    );
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];
    let refined = golden_max(&f, lo, hi, tol);
    let at_node = score(f(grid[idx]));
    if at_node > refined.1 {
        (grid[idx], at_node)
    } else {
        refined
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let xs = linspace(1.5, 2.5, 101);
        assert_eq!(xs.len(), 101);
        assert_eq!(xs[0], 1.5);
        assert_eq!(xs[50], 2.0);
        assert_eq!(xs[100], 2.5);
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn finds_parabola_peak() {
        let (x, v) = golden_max(|x| 3.0 - (x - 0.3).powi(2), -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_returns_edge() {
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 1e-9);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn multimodal_grid() {
        let f = |x: f64| (3.0 * x).sin() + 0.1 * x;
        let (x, v) = grid_then_golden(f, 0.0, 10.0, 400, 1e-12);
        let brute = linspace(0.0, 10.0, 200_001)
            .into_iter()
            .map(f)
            .fold(f64::MIN, f64::max);
        assert!(v >= brute - 1e-9);
        assert!((f(x) - v).abs() < 1e-15);
    }

    #[test]
    fn nan_is_ignored() {
        let (x, v) = golden_max(|x| if x > 0.8 { f64::NAN } else { x }, 0.0, 1.0, 1e-9);
        assert!(x <= 0.8 && (v - 0.8).abs() < 1e-6);
    }
}
