//! Fixtures shared by the benchmarks.

use ps12::{Barycentric, MacroTriangle, Point};

pub fn triangle() -> MacroTriangle {
    MacroTriangle::from_coords([[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]]).expect("nondegenerate")
}

/// `n` deterministic interior points of `t` (a scrambled barycentric lattice).
pub fn points(t: &MacroTriangle, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let (u, v) = ((k as f64 * 0.618_033_988_75).fract(), (k as f64 * 0.754_877_666_25).fract());
            let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
            t.point(&Barycentric([1.0 - u - v, u, v]))
        })
        .collect()
}
