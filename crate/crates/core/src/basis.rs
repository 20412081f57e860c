//! The 39-function simplex-spline basis of C3 quintics on the 12-split.
//!
//! The basis is the S3 orbit of eight generators. Each stored function is
//! the *weighted* glyph `w_j S_j`, so the functions form a partition of
//! unity and coefficients are Bezier ordinates. Glyph scales are fixed
//! numerically from the Marsden identity
//!
//! ```text
//! l(p)^5 = sum_j D_j(c) w_j S_j(p),   c_i = l(v_i),
//! ```
//!
//! where `D_j` is the product of the generator's five dual factors.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bspline::{edge_bspline, EDGE_DIM};
use crate::error::{Error, Result};
use crate::geometry::{MacroTriangle, Permutation, Point, SplitSites, Vector, NUM_SITES};
use crate::marsden::random_barycentric;
use crate::multiplicity::MultiplicityVector;
use crate::piecewise::PiecewisePoly;
use crate::simplex::KnotMultiset;

pub const NUM_BASIS: usize = 39;
pub const MAX_DERIVATIVE_ORDER: usize = 3;

/// A basis generator: glyph, Marsden weight, and the five dual-factor sites
/// (1-based site numbers).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisGenerator {
    pub glyph: &'static str,
    pub weight: (u32, u32),
    pub dual: [u8; 5],
}

impl BasisGenerator {
    pub fn multiplicity(&self) -> MultiplicityVector {
        self.glyph.parse().expect("generator glyphs are valid")
    }

    pub fn weight(&self) -> f64 {
        self.weight.0 as f64 / self.weight.1 as f64
    }
}

pub const GENERATORS: [BasisGenerator; 8] = [
    BasisGenerator { glyph: "600101", weight: (1, 4), dual: [1, 1, 1, 1, 1] },
    BasisGenerator { glyph: "500201", weight: (1, 4), dual: [1, 1, 1, 1, 4] },
    BasisGenerator { glyph: "410201", weight: (1, 2), dual: [1, 1, 1, 4, 4] },
    BasisGenerator { glyph: "320201", weight: (1, 2), dual: [1, 1, 2, 4, 4] },
    BasisGenerator { glyph: "220211", weight: (3, 4), dual: [1, 2, 4, 4, 10] },
    BasisGenerator { glyph: "141110", weight: (1, 1), dual: [2, 2, 2, 4, 5] },
    BasisGenerator { glyph: "131210", weight: (1, 2), dual: [1, 2, 2, 4, 5] },
    BasisGenerator { glyph: "121211", weight: (3, 4), dual: [1, 2, 4, 5, 10] },
];

/// Label-level data of one basis function, independent of geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalEntry {
    pub glyph: MultiplicityVector,
    pub generator: usize,
    /// A permutation carrying the generator onto this function.
    pub perm: Permutation,
    pub weight: f64,
    /// Dual-factor sites, 0-based, sorted.
    pub dual: [usize; 5],
    /// Number of dual factors off the edge [v1, v2].
    pub layer: usize,
    /// Barycentric coordinates of the domain point, times 60.
    pub domain_bary60: [i64; 3],
}

/// Barycentric coordinates of the ten sites, times 12.
const SITE_BARY12: [[i64; 3]; NUM_SITES] =
    [[12, 0, 0], [0, 12, 0], [0, 0, 12], [6, 6, 0], [0, 6, 6], [6, 0, 6], [3, 6, 3], [3, 3, 6], [6, 3, 3], [4, 4, 4]];

/// The 39 functions in canonical order: layered by distance from the edge
/// [v1, v2] (number of dual factors off that edge), then along the edge from
/// v1 to v2, then away from the edge.
pub fn canonical_entries() -> &'static [CanonicalEntry] {
    static TABLE: OnceLock<Vec<CanonicalEntry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out: Vec<CanonicalEntry> = Vec::with_capacity(NUM_BASIS);
        for (g, generator) in GENERATORS.iter().enumerate() {
            let m = generator.multiplicity();
            for sigma in Permutation::all() {
                let glyph = m.act(&sigma);
                if out.iter().any(|e| e.glyph == glyph) {
                    continue;
                }
                let map = sigma.site_map();
                let mut dual = generator.dual.map(|s| map[s as usize - 1]);
                dual.sort_unstable();
                let layer = dual.iter().filter(|&&s| ![0, 1, 3].contains(&s)).count();
                let mut domain_bary60 = [0i64; 3];
                for &s in &dual {
                    for r in 0..3 {
                        domain_bary60[r] += SITE_BARY12[s][r];
                    }
                }
                out.push(CanonicalEntry {
                    glyph,
                    generator: g,
                    perm: sigma,
                    weight: generator.weight(),
                    dual,
                    layer,
                    domain_bary60,
                });
            }
        }
        out.sort_by_key(|e| (e.layer, e.domain_bary60[1] - e.domain_bary60[0], e.domain_bary60[2]));
        assert_eq!(out.len(), NUM_BASIS);
        out
    })
}

/// Canonical index of a glyph, if it belongs to the basis.
pub fn canonical_index(glyph: &MultiplicityVector) -> Option<usize> {
    canonical_entries().iter().position(|e| &e.glyph == glyph)
}

/// Normalization constants: `S_j = alpha_j M_j` with `M_j` unit-integral.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub alpha: [f64; NUM_BASIS],
    /// Max relative residual of the Marsden least-squares fit.
    pub residual: f64,
}

const NORMALIZATION_SAMPLES: usize = 240;
const NORMALIZATION_TOL: f64 = 1e-8;

/// Values `l(v_i)` at all ten sites of the linear form with corner values `c`.
pub fn site_values(c: [f64; 3]) -> [f64; NUM_SITES] {
    SITE_BARY12.map(|b| (b[0] as f64 * c[0] + b[1] as f64 * c[1] + b[2] as f64 * c[2]) / 12.0)
}

/// Dual polynomial of entry `e` at site values `c`.
pub fn dual_polynomial(e: &CanonicalEntry, c: &[f64; NUM_SITES]) -> f64 {
    e.dual.iter().map(|&s| c[s]).product()
}

fn compile_unit(sites: &SplitSites) -> Result<Vec<PiecewisePoly>> {
    canonical_entries()
        .iter()
        .map(|e| PiecewisePoly::compile(sites, &KnotMultiset::from_sites(sites, &e.glyph)))
        .collect()
}

fn solve_normalization(sites: &SplitSites, unit: &[PiecewisePoly]) -> Result<Normalization> {
    let entries = canonical_entries();
    let t = sites.triangle();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut a = DMatrix::<f64>::zeros(NORMALIZATION_SAMPLES, NUM_BASIS);
    let mut b = DVector::<f64>::zeros(NORMALIZATION_SAMPLES);
    for row in 0..NORMALIZATION_SAMPLES {
        let beta = random_barycentric(&mut rng);
        let p = t.point(&beta);
        let corner: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let c = site_values(corner);
        let k = sites.locate(&p)?;
        for (j, e) in entries.iter().enumerate() {
            a[(row, j)] = e.weight * dual_polynomial(e, &c) * unit[j].eval_cell(sites, k, &p);
        }
        b[row] = (0..3).map(|i| beta.0[i] * corner[i]).sum::<f64>().powi(5);
    }
    let alpha = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let r = &a * &alpha - &b;
    let residual = r.iter().zip(b.iter()).map(|(ri, bi)| ri.abs() / bi.abs().max(1.0)).fold(0.0, f64::max);
    if residual > NORMALIZATION_TOL {
        return Err(Error::Normalization(residual));
    }
    Ok(Normalization { alpha: std::array::from_fn(|j| alpha[j]), residual })
}

/// Solve for the glyph scales on `t` from the Marsden identity.
pub fn resolve_normalization(t: &MacroTriangle) -> Result<Normalization> {
    let sites = t.sites();
    solve_normalization(&sites, &compile_unit(&sites)?)
}

/// Partial derivatives up to some order of all 39 functions at a point.
/// Entry `(k, i)` holds `d^k / dx^(k-i) dy^i`.
#[derive(Clone, Debug)]
pub struct Jet {
    order: usize,
    data: Vec<[f64; NUM_BASIS]>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, k: usize, i: usize) -> &[f64; NUM_BASIS] {
        assert!(k <= self.order && i <= k);
        &self.data[k * (k + 1) / 2 + i]
    }
}

/// Edge restriction matched to a quintic B-spline on `{0^6, 1/2^2, 1^6}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeMatch {
    pub basis_index: usize,
    pub bspline_index: usize,
    pub max_error: f64,
}

/// The basis on a particular macrotriangle.
#[derive(Clone, Debug)]
pub struct BasisInstance {
    sites: SplitSites,
    alpha: [f64; NUM_BASIS],
    pieces: Vec<PiecewisePoly>,
    normalization_residual: f64,
}

impl BasisInstance {
    pub fn new(t: &MacroTriangle) -> Result<Self> {
        let sites = t.sites();
        let mut pieces = compile_unit(&sites)?;
        let norm = solve_normalization(&sites, &pieces)?;
        for (j, (piece, e)) in pieces.iter_mut().zip(canonical_entries()).enumerate() {
            piece.scale(e.weight * norm.alpha[j]);
        }
        Ok(Self { sites, alpha: norm.alpha, pieces, normalization_residual: norm.residual })
    }

    pub fn triangle(&self) -> &MacroTriangle {
        self.sites.triangle()
    }

    pub fn sites(&self) -> &SplitSites {
        &self.sites
    }

    pub fn entries(&self) -> &'static [CanonicalEntry] {
        canonical_entries()
    }

    pub fn entry(&self, j: usize) -> &'static CanonicalEntry {
        &canonical_entries()[j]
    }

    pub fn glyph(&self, j: usize) -> MultiplicityVector {
        self.entry(j).glyph
    }

    pub fn index_of(&self, glyph: &MultiplicityVector) -> Option<usize> {
        canonical_index(glyph)
    }

    /// Scale of the raw glyph: `S_j = alpha_j M_j`.
    pub fn alpha(&self, j: usize) -> f64 {
        self.alpha[j]
    }

    pub fn normalization_residual(&self) -> f64 {
        self.normalization_residual
    }

    /// Weighted function `w_j S_j` in piecewise form.
    pub fn piece(&self, j: usize) -> &PiecewisePoly {
        &self.pieces[j]
    }

    /// Values of the 39 weighted functions on cell `k` (extended
    /// polynomially if `p` lies outside it).
    pub fn eval_all_cell(&self, k: usize, p: &Point) -> [f64; NUM_BASIS] {
        let u = self.sites.cell_barycentric(k, p);
        std::array::from_fn(|j| self.pieces[j].cell(k).eval(u))
    }

    pub fn eval_all(&self, p: &Point) -> Result<[f64; NUM_BASIS]> {
        let k = self.sites.locate(p)?;
        Ok(self.eval_all_cell(k, p))
    }

    pub fn directional_all_cell(&self, k: usize, dirs: &[Vector], p: &Point) -> [f64; NUM_BASIS] {
        std::array::from_fn(|j| self.pieces[j].directional_cell(&self.sites, k, dirs, p))
    }

    /// Mixed directional derivative of all functions at `p`.
    pub fn eval_all_directional(&self, dirs: &[Vector], p: &Point) -> Result<[f64; NUM_BASIS]> {
        if dirs.len() > MAX_DERIVATIVE_ORDER {
            return Err(Error::InvalidOrder { order: dirs.len(), max: MAX_DERIVATIVE_ORDER });
        }
        let k = self.sites.locate(p)?;
        Ok(self.directional_all_cell(k, dirs, p))
    }

    /// All partial derivatives up to `order` (at most 3, where the functions
    /// are C3 across interior split lines).
    pub fn eval_all_derivs(&self, p: &Point, order: usize) -> Result<Jet> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::InvalidOrder { order, max: MAX_DERIVATIVE_ORDER });
        }
        let k = self.sites.locate(p)?;
        let mut data = Vec::new();
        for total in 0..=order {
            for i in 0..=total {
                let mut dirs = vec![Vector::x(); total - i];
                dirs.extend(std::iter::repeat_n(Vector::y(), i));
                data.push(self.directional_all_cell(k, &dirs, p));
            }
        }
        Ok(Jet { order, data })
    }

    /// Match the nonzero edge restrictions to the eight edge B-splines.
    pub fn boundary_reduction(&self, a: usize, b: usize) -> Result<Vec<EdgeMatch>> {
        if a > 2 || b > 2 || a == b {
            return Err(Error::InvalidInput(format!("({a}, {b}) is not an edge")));
        }
        const SAMPLES: usize = 200;
        const TOL: f64 = 1e-10;
        let (pa, pb) = (self.sites.site(a), self.sites.site(b));
        let ts: Vec<f64> = (0..SAMPLES).map(|k| (k as f64 + 0.5) / SAMPLES as f64).collect();
        let values: Vec<[f64; NUM_BASIS]> = ts
            .iter()
            .map(|&t| self.eval_all(&Point::from(pa.coords * (1.0 - t) + pb.coords * t)))
            .collect::<Result<_>>()?;
        let mut matches = Vec::new();
        let mut used = [false; EDGE_DIM];
        for j in 0..NUM_BASIS {
            if values.iter().all(|v| v[j].abs() <= 1e-13) {
                continue;
            }
            let best = (0..EDGE_DIM)
                .map(|i| {
                    let err =
                        ts.iter().zip(&values).map(|(&t, v)| (v[j] - edge_bspline(i, t)).abs()).fold(0.0, f64::max);
                    (i, err)
                })
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if best.1 > TOL || used[best.0] {
                return Err(Error::EdgeReduction(format!(
                    "function {} ({}) has no unique B-spline match (best error {:e})",
                    j,
                    self.glyph(j),
                    best.1
                )));
            }
            used[best.0] = true;
            matches.push(EdgeMatch { basis_index: j, bspline_index: best.0, max_error: best.1 });
        }
        if matches.len() != EDGE_DIM {
            return Err(Error::EdgeReduction(format!("{} nonzero restrictions, expected {EDGE_DIM}", matches.len())));
        }
        Ok(matches)
    }

    /// The same functions on the relabeled triangle `t.relabel(sigma)`.
    /// Returns the new instance and `map` with `new function map[j] == old function j`.
    pub fn relabeled(&self, sigma: &Permutation) -> Result<(BasisInstance, [usize; NUM_BASIS])> {
        let new = BasisInstance::new(&self.triangle().relabel(sigma))?;
        let map = self.relabel_map(sigma);
        Ok((new, map))
    }

    /// `map[j]`: index in the `sigma`-relabeled basis of old function `j`.
    pub fn relabel_map(&self, sigma: &Permutation) -> [usize; NUM_BASIS] {
        relabel_map(sigma)
    }
}

/// `map[j]`: index in the basis of `t.relabel(sigma)` of function `j` of `t`.
pub fn relabel_map(sigma: &Permutation) -> [usize; NUM_BASIS] {
    let entries = canonical_entries();
    std::array::from_fn(|j| canonical_index(&entries[j].glyph.act(sigma)).expect("the basis is S3 invariant"))
}

/// Ordinates of the same spline over the basis of `t.relabel(sigma)`.
pub fn relabel_coeffs(c: &[f64; NUM_BASIS], sigma: &Permutation) -> [f64; NUM_BASIS] {
    let map = relabel_map(sigma);
    let mut out = [0.0; NUM_BASIS];
    for j in 0..NUM_BASIS {
        out[map[j]] = c[j];
    }
    out
}

/// A spline `sum_j c_j B_j` over a basis instance.
#[derive(Clone, Debug)]
pub struct SplineFunction<'a> {
    basis: &'a BasisInstance,
    coeffs: [f64; NUM_BASIS],
}

impl<'a> SplineFunction<'a> {
    pub fn new(basis: &'a BasisInstance, coeffs: [f64; NUM_BASIS]) -> Self {
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> &'a BasisInstance {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64; NUM_BASIS] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64; NUM_BASIS] {
        &mut self.coeffs
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        Ok(dot(&self.coeffs, &self.basis.eval_all(p)?))
    }

    pub fn eval_cell(&self, k: usize, p: &Point) -> f64 {
        dot(&self.coeffs, &self.basis.eval_all_cell(k, p))
    }

    pub fn directional(&self, dirs: &[Vector], p: &Point) -> Result<f64> {
        Ok(dot(&self.coeffs, &self.basis.eval_all_directional(dirs, p)?))
    }

    pub fn directional_cell(&self, k: usize, dirs: &[Vector], p: &Point) -> f64 {
        dot(&self.coeffs, &self.basis.directional_all_cell(k, dirs, p))
    }
}

pub(crate) fn dot(a: &[f64; NUM_BASIS], b: &[f64; NUM_BASIS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Barycentric;

    fn random_point(t: &MacroTriangle, rng: &mut ChaCha8Rng) -> Point {
        t.point(&random_barycentric(rng))
    }

    fn skewed() -> MacroTriangle {
        MacroTriangle::from_coords([[0.1, -0.2], [1.9, 0.3], [0.6, 1.4]]).unwrap()
    }

    #[test]
    fn orbit_sizes_and_distinct_glyphs() {
        let entries = canonical_entries();
        let mut counts = [0usize; 8];
        for e in entries {
            counts[e.generator] += 1;
        }
        assert_eq!(counts, [3, 6, 6, 6, 3, 3, 6, 6]);
        let mut glyphs: Vec<_> = entries.iter().map(|e| e.glyph).collect();
        glyphs.sort();
        glyphs.dedup();
        assert_eq!(glyphs.len(), NUM_BASIS);
    }

    #[test]
    fn canonical_layering() {
        let entries = canonical_entries();
        let layers: Vec<usize> = entries.iter().map(|e| e.layer).collect();
        assert!(layers.windows(2).all(|w| w[0] <= w[1]));
        let count = |l| layers.iter().filter(|&&x| x == l).count();
        assert_eq!([count(0), count(1), count(2)], [8, 7, 6]);
        assert_eq!(entries[0].glyph.to_string(), "600101");
        assert_eq!(entries[7].glyph.to_string(), "060110");
        let layer2: Vec<String> = entries[8..15].iter().map(|e| e.glyph.to_string()).collect();
        assert_eq!(layer2, ["500102", "411101", "311201", "220211", "131210", "141110", "050120"]);
    }

    #[test]
    fn normalization_is_constant_on_orbits() {
        let t = skewed();
        let n = resolve_normalization(&t).unwrap();
        assert!(n.residual < 1e-9);
        let entries = canonical_entries();
        for g in 0..8 {
            let vals: Vec<f64> = (0..NUM_BASIS).filter(|&j| entries[j].generator == g).map(|j| n.alpha[j]).collect();
            let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
            assert!((hi - lo) <= 1e-10 * hi.abs(), "generator {g}: {vals:?}");
        }
    }

    #[test]
    fn corner_function_values() {
        let t = skewed();
        let basis = BasisInstance::new(&t).unwrap();
        let v = basis.eval_all(&t.vertex(0)).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!(v[1..].iter().all(|x| x.abs() < 1e-12));
        // Raw glyph value at v1 is 4 = 1 / w.
        let raw = v[0] / canonical_entries()[0].weight;
        assert!((raw - 4.0).abs() < 1e-11);
    }

    #[test]
    fn partition_of_unity_and_positivity() {
        let t = skewed();
        let basis = BasisInstance::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let v = basis.eval_all(&random_point(&t, &mut rng)).unwrap();
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(v.iter().all(|&x| x >= -1e-12));
        }
    }

    #[test]
    fn barycenter_values_are_symmetric() {
        let t = MacroTriangle::from_coords([[0.0, 0.0], [2.0, 0.0], [0.3, 0.7]]).unwrap();
        let basis = BasisInstance::new(&t).unwrap();
        let v = basis.eval_all(&basis.sites().barycenter()).unwrap();
        let entries = canonical_entries();
        for g in 0..8 {
            let vals: Vec<f64> = (0..NUM_BASIS).filter(|&j| entries[j].generator == g).map(|j| v[j]).collect();
            assert!(vals.iter().all(|x| (x - vals[0]).abs() < 1e-12), "generator {g}: {vals:?}");
        }
    }

    #[test]
    fn derivatives_of_partition_of_unity_vanish() {
        let t = skewed();
        let basis = BasisInstance::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = random_point(&t, &mut rng);
            let jet = basis.eval_all_derivs(&p, 3).unwrap();
            for k in 1..=3 {
                for i in 0..=k {
                    assert!(jet.get(k, i).iter().sum::<f64>().abs() < 1e-8, "order {k}");
                }
            }
        }
        assert!(basis.eval_all_derivs(&t.vertex(0), 4).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = skewed();
        let basis = BasisInstance::new(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-6;
        for _ in 0..100 {
            // stay away from the boundary so both stencil points are inside
            let b = random_barycentric(&mut rng).0.map(|x| 0.05 + 0.85 * x);
            let p = t.point(&Barycentric(b));
            let jet = basis.eval_all_derivs(&p, 1).unwrap();
            let fx_p = basis.eval_all(&(p + Vector::x() * h)).unwrap();
            let fx_m = basis.eval_all(&(p - Vector::x() * h)).unwrap();
            let fy_p = basis.eval_all(&(p + Vector::y() * h)).unwrap();
            let fy_m = basis.eval_all(&(p - Vector::y() * h)).unwrap();
            for j in 0..NUM_BASIS {
                let (dx, dy) = ((fx_p[j] - fx_m[j]) / (2.0 * h), (fy_p[j] - fy_m[j]) / (2.0 * h));
                let scale = jet.get(1, 0)[j].abs().max(jet.get(1, 1)[j].abs()).max(1.0);
                assert!((jet.get(1, 0)[j] - dx).abs() <= 1e-6 * scale);
                assert!((jet.get(1, 1)[j] - dy).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn corner_function_is_flat_at_other_corners() {
        let t = skewed();
        let basis = BasisInstance::new(&t).unwrap();
        let jet = basis.eval_all_derivs(&t.vertex(1), 1).unwrap();
        assert!(jet.get(1, 0)[0].abs() < 1e-12 && jet.get(1, 1)[0].abs() < 1e-12);
    }

    #[test]
    fn edge_reduction_on_every_edge() {
        let basis = BasisInstance::new(&skewed()).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let m = basis.boundary_reduction(a, b).unwrap();
            assert_eq!(m.len(), 8);
            assert!(m.iter().all(|x| x.max_error <= 1e-10));
        }
        // Along [v1, v2] the matches follow the canonical order.
        let m = basis.boundary_reduction(0, 1).unwrap();
        for (i, x) in m.iter().enumerate() {
            assert_eq!((x.basis_index, x.bspline_index), (i, i));
        }
    }

    #[test]
    fn relabel_map_is_consistent() {
        let t = skewed();
        let basis = BasisInstance::new(&t).unwrap();
        let sigma = Permutation::new([2, 0, 1]).unwrap();
        let (other, map) = basis.relabeled(&sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let p = random_point(&t, &mut rng);
            let (a, b) = (basis.eval_all(&p).unwrap(), other.eval_all(&p).unwrap());
            for j in 0..NUM_BASIS {
                assert!((a[j] - b[map[j]]).abs() < 1e-11);
            }
        }
    }
}
