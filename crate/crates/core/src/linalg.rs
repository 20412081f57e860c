//! Dense solves for the small collocation and constraint systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot size below which a matrix is treated as singular.
const SINGULAR_TOL: f64 = 1e-13;

/// LU factorization with partial pivoting, kept with the original matrix
/// so solves can take one step of iterative refinement.
pub struct Lu {
    a: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Lu {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidInput(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
        }
        let lu = a.clone().lu();
        let u = lu.u();
        let scale = a.amax().max(f64::MIN_POSITIVE);
        let min_pivot = u.diagonal().iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        // also rejects NaN pivots
        if min_pivot.is_nan() || min_pivot <= SINGULAR_TOL * scale {
            return Err(Error::Singular(min_pivot / scale));
        }
        Ok(Self { a, lu })
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let mut x = self.lu.solve(b).ok_or(Error::Singular(0.0))?;
        let r = b - &self.a * &x;
        x += self.lu.solve(&r).ok_or(Error::Singular(0.0))?;
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let n = self.a.nrows();
        let mut inv = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            inv.set_column(j, &self.solve(&e)?);
        }
        Ok(inv)
    }
}

/// Max absolute row sum.
pub fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_detects_singularity() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let lu = Lu::new(a.clone()).unwrap();
        assert!((lu.solve(&(&a * &x)).unwrap() - &x).amax() < 1e-15);
        assert!((&a * lu.inverse().unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(Lu::new(s), Err(Error::Singular(_))));
    }

    #[test]
    fn row_sum_norm() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 0.5]);
        assert_eq!(norm_inf(&a), 3.0);
    }
}
