//! Bivariate polynomials in two forms: cartesian (`x^a y^b` terms) for
//! targets and oracles, and homogeneous in the barycentric coordinates of a
//! cell for the piecewise representation of splines.

use crate::geometry::Point;

/// A polynomial `sum c * x^a * y^b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(f64, u32, u32)>,
}

impl Polynomial {
    pub fn monomial(a: u32, b: u32) -> Self {
        Self { terms: vec![(1.0, a, b)] }
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![(c, 0, 0)] }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|&(_, a, b)| a + b).max().unwrap_or(0)
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.terms.iter().map(|&(c, a, b)| c * p.x.powi(a as i32) * p.y.powi(b as i32)).sum()
    }

    /// All monomials `x^a y^b` with `a + b <= degree`.
    pub fn monomials_up_to(degree: u32) -> Vec<Polynomial> {
        (0..=degree).flat_map(|k| (0..=k).map(move |b| Polynomial::monomial(k - b, b))).collect()
    }
}

/// Number of coefficients of a homogeneous trivariate polynomial of degree `k`.
pub const fn hom_len(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Position of the exponent triple `(a, b, k - a - b)` in the coefficient
/// list of a degree `k` homogeneous polynomial. Entries are ordered with `a`
/// decreasing, then `b` decreasing.
pub const fn hom_index(k: usize, a: usize, b: usize) -> usize {
    let s = k - a;
    s * (s + 1) / 2 + (s - b)
}

/// A homogeneous polynomial in barycentric coordinates `(u0, u1, u2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly {
    degree: usize,
    coeffs: Vec<f64>,
}

impl HomPoly {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coeffs: vec![0.0; hom_len(degree)] }
    }

    pub fn constant(c: f64) -> Self {
        Self { degree: 0, coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn exponents(k: usize) -> impl Iterator<Item = (usize, usize, usize)> {
        (0..=k).rev().flat_map(move |a| (0..=k - a).rev().map(move |b| (a, b, k - a - b)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    /// `self += s * other`; both must have the same degree.
    pub fn add_scaled(&mut self, s: f64, other: &HomPoly) {
        debug_assert_eq!(self.degree, other.degree);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Product with the linear form `l0 u0 + l1 u1 + l2 u2`.
    pub fn mul_linear(&self, l: [f64; 3]) -> HomPoly {
        let k = self.degree;
        let mut out = HomPoly::zero(k + 1);
        for ((a, b, _), &c) in Self::exponents(k).zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            out.coeffs[hom_index(k + 1, a + 1, b)] += c * l[0];
            out.coeffs[hom_index(k + 1, a, b + 1)] += c * l[1];
            out.coeffs[hom_index(k + 1, a, b)] += c * l[2];
        }
        out
    }

    /// Derivative along a barycentric direction `w` (components summing to 0).
    pub fn derivative(&self, w: [f64; 3]) -> HomPoly {
        let k = self.degree;
        if k == 0 {
            return HomPoly::zero(0);
        }
        let mut out = HomPoly::zero(k - 1);
        for ((a, b, c), &v) in Self::exponents(k).zip(&self.coeffs) {
            if a > 0 {
                out.coeffs[hom_index(k - 1, a - 1, b)] += v * a as f64 * w[0];
            }
            if b > 0 {
                out.coeffs[hom_index(k - 1, a, b - 1)] += v * b as f64 * w[1];
            }
            if c > 0 {
                out.coeffs[hom_index(k - 1, a, b)] += v * c as f64 * w[2];
            }
        }
        out
    }

    pub fn eval(&self, u: [f64; 3]) -> f64 {
        let k = self.degree;
        let mut pows = [[1.0f64; 8]; 3];
        for (r, pw) in pows.iter_mut().enumerate() {
            for e in 1..=k.min(7) {
                pw[e] = pw[e - 1] * u[r];
            }
        }
        if k > 7 {
            return Self::exponents(k)
                .zip(&self.coeffs)
                .map(|((a, b, c), &v)| v * u[0].powi(a as i32) * u[1].powi(b as i32) * u[2].powi(c as i32))
                .sum();
        }
        Self::exponents(k).zip(&self.coeffs).map(|((a, b, c), &v)| v * pows[0][a] * pows[1][b] * pows[2][c]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_enumerates_in_order() {
        for k in 0..7 {
            let idx: Vec<usize> = HomPoly::exponents(k).map(|(a, b, _)| hom_index(k, a, b)).collect();
            assert_eq!(idx, (0..hom_len(k)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn product_and_derivative() {
        // (u0 + 2 u1) * (u1 - u2) evaluated and differentiated by hand.
        let p = HomPoly::constant(1.0).mul_linear([1.0, 2.0, 0.0]).mul_linear([0.0, 1.0, -1.0]);
        let u = [0.2, 0.5, 0.3];
        assert!((p.eval(u) - (0.2 + 1.0) * (0.5 - 0.3)).abs() < 1e-15);
        // d/dw with w = (1, -1, 0): (1 - 2)(u1 - u2) + (u0 + 2 u1)(-1)
        let d = p.derivative([1.0, -1.0, 0.0]);
        let expect = -(0.5 - 0.3) - (0.2 + 1.0);
        assert!((d.eval(u) - expect).abs() < 1e-15);
    }

    #[test]
    fn cartesian_monomials() {
        assert_eq!(Polynomial::monomials_up_to(5).len(), 21);
        let p = Polynomial { terms: vec![(2.0, 2, 1), (-1.0, 0, 0)] };
        assert_eq!(p.eval(&Point::new(3.0, 2.0)), 35.0);
        assert_eq!(p.degree(), 3);
    }
}
