//! Piecewise polynomial form of simplex splines on the 12-split.
//!
//! With knots restricted to split sites, every knot line is a line of the
//! 12-split, so a simplex spline is a single polynomial on each cell. Running
//! the degree-lowering recurrence with polynomial values (the barycentric
//! weights are linear forms in the cell's own barycentric coordinates) gives
//! those polynomials exactly, without sampling.

use crate::error::{Error, Result};
use crate::geometry::{barycentric_direction, barycentric_in, signed_area, Point, SplitSites, Vector, NUM_CELLS};
use crate::polynomial::HomPoly;
use crate::simplex::KnotMultiset;

/// One homogeneous polynomial per cell, in that cell's barycentric
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    cells: Vec<HomPoly>,
}

impl PiecewisePoly {
    /// Compile the unit-integral simplex spline `M[K]`.
    pub fn compile(sites: &SplitSites, knots: &KnotMultiset) -> Result<Self> {
        let cells = (0..NUM_CELLS).map(|k| compile_cell(sites, knots, k)).collect::<Result<_>>()?;
        Ok(Self { cells })
    }

    pub fn from_cells(cells: Vec<HomPoly>) -> Self {
        assert_eq!(cells.len(), NUM_CELLS);
        Self { cells }
    }

    pub fn cell(&self, k: usize) -> &HomPoly {
        &self.cells[k]
    }

    pub fn scale(&mut self, s: f64) {
        self.cells.iter_mut().for_each(|c| c.scale(s));
    }

    /// Value of the cell-`k` polynomial at `p` (which may lie outside the
    /// cell; the polynomial is simply extended).
    pub fn eval_cell(&self, sites: &SplitSites, k: usize, p: &Point) -> f64 {
        self.cells[k].eval(sites.cell_barycentric(k, p))
    }

    pub fn eval(&self, sites: &SplitSites, p: &Point) -> Result<f64> {
        let k = sites.locate(p)?;
        Ok(self.eval_cell(sites, k, p))
    }

    /// Mixed directional derivative of the cell-`k` polynomial.
    pub fn directional_cell(&self, sites: &SplitSites, k: usize, dirs: &[Vector], p: &Point) -> f64 {
        let [a, b, c] = sites.cell(k);
        let mut poly = self.cells[k].clone();
        for u in dirs {
            poly = poly.derivative(barycentric_direction(&a, &b, &c, u));
        }
        poly.eval(sites.cell_barycentric(k, p))
    }
}

struct CellRecurrence<'a> {
    points: &'a [Point],
    cell: [Point; 3],
    cell_index: usize,
    radix: Vec<usize>,
    memo: Vec<Option<HomPoly>>,
    scale: f64,
}

fn compile_cell(sites: &SplitSites, knots: &KnotMultiset, k: usize) -> Result<HomPoly> {
    let points = knots.points();
    let mut radix = Vec::with_capacity(points.len());
    let mut size = 1usize;
    for &m in knots.multiplicities() {
        radix.push(size);
        size *= m as usize + 1;
    }
    let scale = points.iter().flat_map(|a| points.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    let mut rec = CellRecurrence { points, cell: sites.cell(k), cell_index: k, radix, memo: vec![None; size], scale };
    let mut mult = knots.multiplicities().to_vec();
    rec.eval(&mut mult)
}

impl CellRecurrence<'_> {
    fn eval(&mut self, mult: &mut [u8]) -> Result<HomPoly> {
        let key: usize = mult.iter().zip(&self.radix).map(|(&m, &r)| m as usize * r).sum();
        if let Some(p) = &self.memo[key] {
            return Ok(p.clone());
        }
        let v = self.compute(mult)?;
        self.memo[key] = Some(v.clone());
        Ok(v)
    }

    fn compute(&mut self, mult: &mut [u8]) -> Result<HomPoly> {
        let total: usize = mult.iter().map(|&m| m as usize).sum();
        let degree = total - 3;
        let idx: Vec<usize> = (0..mult.len()).filter(|&i| mult[i] > 0).collect();
        let tol = 1e-12 * self.scale * self.scale;
        let mut pivot: Option<([usize; 3], f64)> = None;
        for (x, &i) in idx.iter().enumerate() {
            for (y, &j) in idx.iter().enumerate().skip(x + 1) {
                for &l in idx.iter().skip(y + 1) {
                    let area = signed_area(&self.points[i], &self.points[j], &self.points[l]).abs();
                    if area > tol && pivot.is_none_or(|(_, a)| area > a) {
                        pivot = Some(([i, j, l], area));
                    }
                }
            }
        }
        let Some((piv, area)) = pivot else {
            return Ok(HomPoly::zero(degree));
        };
        let [a, b, c] = piv.map(|i| self.points[i]);
        if total == 3 {
            return Ok(HomPoly::constant(if self.cell_inside(&a, &b, &c)? { 1.0 / area } else { 0.0 }));
        }
        // Each barycentric weight as a linear form on the cell.
        let weights: [[f64; 3]; 3] = {
            let at = self.cell.map(|q| barycentric_in(&a, &b, &c, &q));
            [0, 1, 2].map(|r| [at[0][r], at[1][r], at[2][r]])
        };
        let n = (total - 1) as f64;
        let mut out = HomPoly::zero(degree);
        for (r, &i) in piv.iter().enumerate() {
            mult[i] -= 1;
            let sub = self.eval(mult)?;
            mult[i] += 1;
            if !sub.is_zero() {
                out.add_scaled(1.0, &sub.mul_linear(weights[r]));
            }
        }
        out.scale(n / (n - 2.0));
        Ok(out)
    }

    /// Whether the cell lies inside the knot triangle `(a, b, c)`; the cell
    /// must not straddle any of its edges.
    fn cell_inside(&self, a: &Point, b: &Point, c: &Point) -> Result<bool> {
        let mut inside = true;
        for r in 0..3 {
            let vals = self.cell.map(|q| barycentric_in(a, b, c, &q)[r]);
            let pos = vals.iter().any(|&v| v > 1e-10);
            let neg = vals.iter().any(|&v| v < -1e-10);
            if pos && neg {
                return Err(Error::CellStraddle(self.cell_index));
            }
            if !pos {
                inside = false;
            }
        }
        Ok(inside)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MacroTriangle;
    use crate::multiplicity::MultiplicityVector;
    use crate::simplex::SimplexSplineDef;

    #[test]
    fn agrees_with_pointwise_recurrence() {
        let t = MacroTriangle::from_coords([[0.2, 0.1], [1.7, 0.3], [0.5, 1.4]]).unwrap();
        let sites = t.sites();
        for g in ["600101", "500201", "220211", "121211", "221111", "422000", "211000"] {
            let m: MultiplicityVector = g.parse().unwrap();
            let def = SimplexSplineDef::unit(m, sites.clone()).unwrap();
            let pw = PiecewisePoly::compile(&sites, def.knots()).unwrap();
            for k in 0..NUM_CELLS {
                let [q0, q1, q2] = sites.cell(k);
                for (i, j) in [(1.0, 1.0), (0.2, 0.7), (0.6, 0.1), (0.05, 0.05)] {
                    let l = [1.0 - (i + j) / 3.0, i / 3.0, j / 3.0];
                    let p = Point::from(q0.coords * l[0] + q1.coords * l[1] + q2.coords * l[2]);
                    let (a, b) = (pw.eval_cell(&sites, k, &p), def.eval(&p));
                    assert!((a - b).abs() < 1e-11 * (1.0 / t.area()), "{g} cell {k}: {a} vs {b}");
                    if m.degree().unwrap_or(0) < 2 {
                        continue;
                    }
                    let u = Vector::new(0.3, -0.8);
                    let (da, db) =
                        (pw.directional_cell(&sites, k, &[u, u], &p), def.eval_directional(&[u, u], &p).unwrap());
                    assert!((da - db).abs() < 1e-9 * (1.0 / t.area()), "{g} cell {k}: {da} vs {db}");
                }
            }
        }
    }

    #[test]
    fn knots_off_the_split_lines_are_rejected() {
        let t = MacroTriangle::unit();
        let sites = t.sites();
        // Knots at v1, v7 and v3: the line v1 v7 cuts through cells.
        let knots = KnotMultiset::new(vec![sites.site(0), sites.site(6), sites.site(2)], vec![1, 1, 1]).unwrap();
        assert!(matches!(PiecewisePoly::compile(&sites, &knots), Err(Error::CellStraddle(_))));
    }
}
