//! The nodal function for point evaluation at a corner, and conversion
//! between the basis and any unisolvent set of nodal functionals.

use nalgebra::{DMatrix, DVector};

use crate::basis::{BasisInstance, SplineFunction, MAX_DERIVATIVE_ORDER, NUM_BASIS};
use crate::error::{Error, Result};
use crate::geometry::{Permutation, Point, Vector, MIDPOINT_CORNERS};
use crate::linalg::Lu;
use crate::multiplicity::MultiplicityVector;

/// Coefficients of the nodal function at v1 on the unweighted glyphs.
pub const EPS_V1_GLYPHS: [(&str, f64); 16] = [
    ("600101", 0.25),
    ("500201", 0.25),
    ("500102", 0.25),
    ("410201", 0.5),
    ("401102", 0.5),
    ("411101", 1.0),
    ("311201", 0.5),
    ("311102", 0.5),
    ("320201", 0.5),
    ("302102", 0.5),
    ("211211", 9.0 / 16.0),
    ("211112", 9.0 / 16.0),
    ("220211", 3.0 / 8.0),
    ("202112", 3.0 / 8.0),
    ("112112", 3.0 / 16.0),
    ("121211", 3.0 / 16.0),
];

/// Ordinates (weighted-basis coefficients) of the nodal function at v1.
pub fn eps_v1_coeffs(basis: &BasisInstance) -> Result<[f64; NUM_BASIS]> {
    let mut c = [0.0; NUM_BASIS];
    for (g, raw) in EPS_V1_GLYPHS {
        let m: MultiplicityVector = g.parse()?;
        let j = basis.index_of(&m).ok_or_else(|| Error::UnknownGlyph(g.to_string()))?;
        c[j] = raw / basis.entry(j).weight;
    }
    Ok(c)
}

pub fn eps_v1(basis: &BasisInstance) -> Result<SplineFunction<'_>> {
    Ok(SplineFunction::new(basis, eps_v1_coeffs(basis)?))
}

/// Image of the nodal function at v1 under the relabeling `sigma`: the nodal
/// function for point evaluation at corner `sigma.apply(0)`.
pub fn eps_image<'a>(basis: &'a BasisInstance, sigma: &Permutation) -> Result<SplineFunction<'a>> {
    let base = eps_v1_coeffs(basis)?;
    let map = basis.relabel_map(sigma);
    let mut c = [0.0; NUM_BASIS];
    for j in 0..NUM_BASIS {
        c[map[j]] = base[j];
    }
    Ok(SplineFunction::new(basis, c))
}

/// Nodal function for point evaluation at corner `i`.
pub fn eps_vertex(basis: &BasisInstance, i: usize) -> Result<SplineFunction<'_>> {
    if i > 2 {
        return Err(Error::InvalidInput(format!("corner {i} out of range")));
    }
    eps_image(basis, &Permutation::new([i, (i + 1) % 3, (i + 2) % 3])?)
}

/// Where a functional is anchored, relative to the macrotriangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Anchor {
    Corner(usize),
    /// Midpoint of edge `e` (edges `[v1,v2]`, `[v2,v3]`, `[v3,v1]`).
    Midpoint(usize),
    /// Quarterpoint of edge `e`, nearer its first (`true`) or second corner.
    Quarterpoint {
        edge: usize,
        near_first: bool,
    },
    Point(Point),
}

impl Anchor {
    pub fn resolve(&self, basis: &BasisInstance) -> Result<Point> {
        let t = basis.triangle();
        let on_edge = |e: usize, s: f64| -> Result<Point> {
            let [a, b] =
                *MIDPOINT_CORNERS.get(e).ok_or_else(|| Error::InvalidInput(format!("edge {e} out of range")))?;
            Ok(Point::from(t.vertex(a).coords * (1.0 - s) + t.vertex(b).coords * s))
        };
        match *self {
            Anchor::Corner(i) if i < 3 => Ok(t.vertex(i)),
            Anchor::Corner(i) => Err(Error::InvalidInput(format!("corner {i} out of range"))),
            Anchor::Midpoint(e) => on_edge(e, 0.5),
            Anchor::Quarterpoint { edge, near_first } => on_edge(edge, if near_first { 0.25 } else { 0.75 }),
            Anchor::Point(p) => Ok(p),
        }
    }
}

/// Point evaluation (no directions) or a mixed directional derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalFunctional {
    pub anchor: Anchor,
    pub directions: Vec<Vector>,
}

impl NodalFunctional {
    pub fn value(anchor: Anchor) -> Self {
        Self { anchor, directions: Vec::new() }
    }

    pub fn derivative(anchor: Anchor, directions: Vec<Vector>) -> Result<Self> {
        if directions.len() > MAX_DERIVATIVE_ORDER {
            return Err(Error::InvalidOrder { order: directions.len(), max: MAX_DERIVATIVE_ORDER });
        }
        Ok(Self { anchor, directions })
    }

    /// The functional applied to each basis function.
    pub fn on_basis(&self, basis: &BasisInstance) -> Result<[f64; NUM_BASIS]> {
        basis.eval_all_directional(&self.directions, &self.anchor.resolve(basis)?)
    }

    pub fn apply(&self, f: &SplineFunction) -> Result<f64> {
        f.directional(&self.directions, &self.anchor.resolve(f.basis())?)
    }
}

/// `G[i][j] = lambda_i(B_j)`, factorized.
pub struct ConversionMatrix {
    g: DMatrix<f64>,
    lu: Lu,
}

pub fn conversion_matrix(basis: &BasisInstance, functionals: &[NodalFunctional]) -> Result<ConversionMatrix> {
    if functionals.len() != NUM_BASIS {
        return Err(Error::InvalidInput(format!("{} functionals, expected {NUM_BASIS}", functionals.len())));
    }
    let mut g = DMatrix::zeros(NUM_BASIS, NUM_BASIS);
    for (i, l) in functionals.iter().enumerate() {
        let row = l.on_basis(basis)?;
        for j in 0..NUM_BASIS {
            g[(i, j)] = row[j];
        }
    }
    let lu = Lu::new(g.clone())?;
    Ok(ConversionMatrix { g, lu })
}

impl ConversionMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Nodal values `lambda_i(f)` of the spline with ordinates `c`.
    pub fn to_nodal(&self, c: &[f64; NUM_BASIS]) -> [f64; NUM_BASIS] {
        let v = &self.g * DVector::from_row_slice(c);
        std::array::from_fn(|i| v[i])
    }

    /// Ordinates of the spline with the given nodal values.
    pub fn to_basis(&self, values: &[f64; NUM_BASIS]) -> Result<[f64; NUM_BASIS]> {
        let c = self.lu.solve(&DVector::from_row_slice(values))?;
        Ok(std::array::from_fn(|j| c[j]))
    }

    /// Ordinates of the `i`-th nodal basis function.
    pub fn nodal_function(&self, i: usize) -> Result<[f64; NUM_BASIS]> {
        let mut e = [0.0; NUM_BASIS];
        e[i] = 1.0;
        self.to_basis(&e)
    }
}

/// `max_k |lambda_k(g) - delta_ki|`.
pub fn nodal_residual(g: &SplineFunction, functionals: &[NodalFunctional], i: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (k, l) in functionals.iter().enumerate() {
        let target = if k == i { 1.0 } else { 0.0 };
        worst = worst.max((l.apply(g)? - target).abs());
    }
    Ok(worst)
}
