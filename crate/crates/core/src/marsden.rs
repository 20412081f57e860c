//! Dual points, domain points, the quasi-interpolant, Lagrange interpolation
//! at the domain points, and h-refinement studies on a single macrotriangle.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{dot, dual_polynomial, site_values, BasisInstance, SplineFunction, NUM_BASIS};
use crate::error::{Error, Result};
use crate::geometry::{Barycentric, MacroTriangle, Point};
use crate::linalg::{norm_inf, Lu};

/// The five dual points of every basis function, as sites and coordinates.
#[derive(Clone, Debug)]
pub struct DualPointSet {
    pub sites: Vec<[usize; 5]>,
    pub points: Vec<[Point; 5]>,
}

pub fn dual_points(basis: &BasisInstance) -> DualPointSet {
    let sites: Vec<[usize; 5]> = basis.entries().iter().map(|e| e.dual).collect();
    let points = sites.iter().map(|d| d.map(|s| basis.sites().site(s))).collect();
    DualPointSet { sites, points }
}

/// Domain points in canonical order.
#[derive(Clone, Debug)]
pub struct DomainPointSet {
    pub points: Vec<Point>,
}

pub fn domain_points(basis: &BasisInstance) -> DomainPointSet {
    let points = dual_points(basis)
        .points
        .iter()
        .map(|d| Point::from(d.iter().map(|p| p.coords).sum::<nalgebra::Vector2<f64>>() / 5.0))
        .collect();
    DomainPointSet { points }
}

/// Weights `k^5 (-1)^(k-1) / 5!` of the k-point averages.
const QI_WEIGHTS: [f64; 5] = [1.0 / 120.0, -32.0 / 120.0, 243.0 / 120.0, -1024.0 / 120.0, 3125.0 / 120.0];

/// Coefficients of the quasi-interpolant: each is a signed combination of
/// `f` at the averages of all nonempty subsets of the five dual points.
pub fn quasi_interpolant_coeffs(basis: &BasisInstance, f: impl Fn(&Point) -> f64) -> [f64; NUM_BASIS] {
    let duals = dual_points(basis);
    std::array::from_fn(|j| {
        let d = &duals.points[j];
        (1u32..32)
            .map(|mask| {
                let k = mask.count_ones() as usize;
                let sum = (0..5).filter(|r| mask & (1 << r) != 0).map(|r| d[r].coords).sum::<nalgebra::Vector2<f64>>();
                QI_WEIGHTS[k - 1] * f(&Point::from(sum / k as f64))
            })
            .sum()
    })
}

pub fn quasi_interpolant<'a>(basis: &'a BasisInstance, f: impl Fn(&Point) -> f64) -> SplineFunction<'a> {
    SplineFunction::new(basis, quasi_interpolant_coeffs(basis, f))
}

/// `A[i][j] = B_j(xi_i)`.
pub fn collocation_matrix(basis: &BasisInstance) -> Result<DMatrix<f64>> {
    let xi = domain_points(basis);
    let mut a = DMatrix::zeros(NUM_BASIS, NUM_BASIS);
    for (i, p) in xi.points.iter().enumerate() {
        let row = basis.eval_all(p)?;
        for j in 0..NUM_BASIS {
            a[(i, j)] = row[j];
        }
    }
    Ok(a)
}

/// Factorized collocation system, reusable across right-hand sides.
pub struct Collocation {
    lu: Lu,
}

impl Collocation {
    pub fn new(basis: &BasisInstance) -> Result<Self> {
        Ok(Self { lu: Lu::new(collocation_matrix(basis)?)? })
    }

    pub fn solve(&self, values: &[f64; NUM_BASIS]) -> Result<[f64; NUM_BASIS]> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("interpolation values must be finite".into()));
        }
        let c = self.lu.solve(&DVector::from_row_slice(values))?;
        Ok(std::array::from_fn(|j| c[j]))
    }

    /// `||A^-1||_inf`.
    pub fn stability(&self) -> Result<f64> {
        Ok(norm_inf(&self.lu.inverse()?))
    }
}

/// The spline taking `values[i]` at domain point `i`.
pub fn lagrange_interpolant<'a>(basis: &'a BasisInstance, values: &[f64; NUM_BASIS]) -> Result<SplineFunction<'a>> {
    Ok(SplineFunction::new(basis, Collocation::new(basis)?.solve(values)?))
}

/// Max node residual `|s(xi_i) - values[i]|` of an interpolant.
pub fn node_residual(s: &SplineFunction, values: &[f64; NUM_BASIS]) -> Result<f64> {
    let xi = domain_points(s.basis());
    let mut worst: f64 = 0.0;
    for (p, v) in xi.points.iter().zip(values) {
        worst = worst.max((s.eval(p)? - v).abs());
    }
    Ok(worst)
}

/// `||A^-1||_inf` for the collocation matrix at the domain points.
pub fn stability_estimate(basis: &BasisInstance) -> Result<f64> {
    Collocation::new(basis)?.stability()
}

/// Max relative residual of the Marsden identity over random points and
/// random linear forms: `|l^5 - sum_j D_j(c) B_j| / max(1, |l|^5)`.
pub fn marsden_residual(basis: &BasisInstance, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = basis.triangle();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let beta = random_barycentric(&mut rng);
        let p = t.point(&beta);
        let corner: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let c = site_values(corner);
        let vals = basis.eval_all(&p)?;
        let d: [f64; NUM_BASIS] = std::array::from_fn(|j| dual_polynomial(basis.entry(j), &c));
        let l5 = (0..3).map(|i| beta.0[i] * corner[i]).sum::<f64>().powi(5);
        worst = worst.max((l5 - dot(&d, &vals)).abs() / l5.abs().max(1.0));
    }
    Ok(worst)
}

pub(crate) fn random_barycentric(rng: &mut impl Rng) -> Barycentric {
    let (mut r1, mut r2): (f64, f64) = (rng.random(), rng.random());
    if r1 + r2 > 1.0 {
        (r1, r2) = (1.0 - r1, 1.0 - r2);
    }
    Barycentric([1.0 - r1 - r2, r1, r2])
}

/// `max_j |c_j - s(xi_j)|` for `s = Q(f)`.
pub fn bezier_distance(basis: &BasisInstance, f: impl Fn(&Point) -> f64) -> Result<f64> {
    let s = quasi_interpolant(basis, f);
    let xi = domain_points(basis);
    let mut worst: f64 = 0.0;
    for (c, p) in s.coeffs().iter().zip(&xi.points) {
        worst = worst.max((c - s.eval(p)?).abs());
    }
    Ok(worst)
}

/// `t` scaled about its barycenter to diameter `h`.
pub fn scaled_triangle(t: &MacroTriangle, h: f64) -> Result<MacroTriangle> {
    let g = t.vertices().iter().map(|v| v.coords).sum::<nalgebra::Vector2<f64>>() / 3.0;
    let s = h / t.diameter();
    let [a, b, c] = t.vertices().map(|v| Point::from(g + (v.coords - g) * s));
    MacroTriangle::new(a, b, c)
}

/// Errors over a sequence of mesh sizes and the observed orders.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for halving steps (in general `log(e_k/e_{k+1}) / log(h_k/h_{k+1})`).
    pub orders: Vec<f64>,
    /// Least-squares slope of `log e` against `log h`.
    pub fitted_order: f64,
}

impl ConvergenceStudy {
    pub fn from_errors(hs: Vec<f64>, errors: Vec<f64>) -> Self {
        let orders =
            hs.windows(2).zip(errors.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect();
        let n = hs.len() as f64;
        let (lx, ly): (Vec<f64>, Vec<f64>) = hs.iter().zip(&errors).map(|(h, e)| (h.ln(), e.ln())).unzip();
        let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        Self { hs, errors, orders, fitted_order: sxy / sxx }
    }
}

/// Sample points for max-norm errors: a barycentric lattice of the given
/// resolution.
pub fn lattice_points(t: &MacroTriangle, n: usize) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let b = [(n - i - j) as f64, i as f64, j as f64].map(|x| x / n as f64);
            out.push(t.point(&Barycentric(b)));
        }
    }
    out
}

/// Quasi-interpolation error `max |f - Q f|` on scaled copies of `t`.
pub fn approximation_study(
    f: impl Fn(&Point) -> f64 + Copy,
    t: &MacroTriangle,
    hs: &[f64],
) -> Result<ConvergenceStudy> {
    let mut errors = Vec::with_capacity(hs.len());
    for &h in hs {
        let th = scaled_triangle(t, h)?;
        let basis = BasisInstance::new(&th)?;
        let s = quasi_interpolant(&basis, f);
        let mut worst: f64 = 0.0;
        for p in lattice_points(&th, 30) {
            worst = worst.max((s.eval(&p)? - f(&p)).abs());
        }
        errors.push(worst);
    }
    Ok(ConvergenceStudy::from_errors(hs.to_vec(), errors))
}

/// Successive ratios `d_h / d_{h'}` of the Bezier distance on scaled copies of `t`.
pub fn bezier_distance_check(f: impl Fn(&Point) -> f64 + Copy, t: &MacroTriangle, hs: &[f64]) -> Result<Vec<f64>> {
    let d = hs
        .iter()
        .map(|&h| bezier_distance(&BasisInstance::new(&scaled_triangle(t, h)?)?, f))
        .collect::<Result<Vec<f64>>>()?;
    Ok(d.windows(2).map(|w| w[0] / w[1]).collect())
}
