//! Univariate B-splines, used as the reference for edge restrictions.

use crate::error::{Error, Result};

/// Knot vector `{0^6, 1/2^2, 1^6}` of the quintic spline space on each edge.
pub const EDGE_KNOTS: [f64; 14] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0];
pub const EDGE_DEGREE: usize = 5;
pub const EDGE_DIM: usize = 8;

/// Value at `t` of the single B-spline with the given nondecreasing knots
/// (degree `knots.len() - 2`), in the partition-of-unity normalization.
/// Right-continuous: support is `[min, max)`.
pub fn univariate_bspline(knots: &[f64], t: f64) -> Result<f64> {
    if knots.len() < 2 {
        return Err(Error::InvalidInput("a B-spline needs at least two knots".into()));
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("knots must be nondecreasing".into()));
    }
    let (lo, hi) = (knots[0], knots[knots.len() - 1]);
    if lo == hi {
        return Err(Error::InvalidInput("all knots are equal".into()));
    }
    if t < lo || t >= hi {
        return Ok(0.0);
    }
    Ok(cox_de_boor(knots, t))
}

fn cox_de_boor(knots: &[f64], t: f64) -> f64 {
    let d = knots.len() - 2;
    // Degree-zero pieces on each knot interval, raised one degree at a time.
    let mut n: Vec<f64> = knots.windows(2).map(|w| if w[0] <= t && t < w[1] { 1.0 } else { 0.0 }).collect();
    for p in 1..=d {
        for i in 0..n.len() - 1 {
            let mut v = 0.0;
            let dl = knots[i + p] - knots[i];
            if dl > 0.0 {
                v += (t - knots[i]) / dl * n[i];
            }
            let dr = knots[i + p + 1] - knots[i + 1];
            if dr > 0.0 {
                v += (knots[i + p + 1] - t) / dr * n[i + 1];
            }
            n[i] = v;
        }
        n.pop();
    }
    n[0]
}

/// The `i`-th quintic B-spline on [`EDGE_KNOTS`], `i in 0..8`.
pub fn edge_bspline(i: usize, t: f64) -> f64 {
    univariate_bspline(&EDGE_KNOTS[i..i + EDGE_DEGREE + 2], t).expect("edge knots are valid")
}

/// Greville abscissae of the edge space: averages of five consecutive knots.
pub fn edge_greville() -> [f64; EDGE_DIM] {
    std::array::from_fn(|i| EDGE_KNOTS[i + 1..i + 1 + EDGE_DEGREE].iter().sum::<f64>() / EDGE_DEGREE as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_multiplicity_left_knot() {
        let knots = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5];
        assert_eq!(univariate_bspline(&knots, 0.0).unwrap(), 1.0);
        // (1 - 2t)^5 on [0, 1/2)
        let t: f64 = 0.1;
        assert!((univariate_bspline(&knots, t).unwrap() - (1.0 - 2.0 * t).powi(5)).abs() < 1e-15);
    }

    #[test]
    fn support_is_half_open() {
        let knots = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        assert_eq!(univariate_bspline(&knots, -0.1).unwrap(), 0.0);
        assert_eq!(univariate_bspline(&knots, 1.0).unwrap(), 0.0);
        assert_eq!(univariate_bspline(&knots, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn bernstein_pattern() {
        // Knots {0^5, 1^2}: a quintic vanishing to order 4 at 1 and order 1
        // at 0, i.e. the Bernstein polynomial 5 t (1 - t)^4.
        let knots = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        let v = univariate_bspline(&knots, 0.5).unwrap();
        assert!((v - 5.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn all_equal_knots_rejected() {
        assert!(univariate_bspline(&[0.5; 7], 0.5).is_err());
    }

    #[test]
    fn edge_space_partition_of_unity() {
        for k in 0..100 {
            let t = k as f64 / 100.0;
            let s: f64 = (0..EDGE_DIM).map(|i| edge_bspline(i, t)).sum();
            assert!((s - 1.0).abs() < 1e-14, "t = {t}: {s}");
        }
    }

    #[test]
    fn greville_points() {
        let g = edge_greville();
        let expect = [0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 0.9, 1.0];
        for (a, b) in g.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
