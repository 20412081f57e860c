//! Smoothness conditions between splines on two macrotriangles sharing the
//! edge [v1, v2], expressed on the canonically ordered Bezier ordinates.
//!
//! Indices 0..8 are the edge layer, 8..15 the next layer and 15..21 the
//! third; a C^r join fixes the first 8, 15 or 21 ordinates of the neighbour.

use std::sync::OnceLock;

use crate::basis::{canonical_entries, canonical_index, BasisInstance, SplineFunction, NUM_BASIS};
use crate::error::{Error, Result};
use crate::geometry::{Barycentric, MacroTriangle, Permutation, Point, Vector};

pub const MAX_JOIN_ORDER: usize = 2;

/// Number of ordinates fixed by a join of each order.
pub const CONSTRAINED: [usize; 3] = [8, 15, 21];

/// Position of each basis function in the layered ordering for one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingMap {
    /// `order[k]`: basis index at position `k`.
    pub order: [usize; NUM_BASIS],
}

impl OrderingMap {
    pub fn position(&self, j: usize) -> usize {
        self.order.iter().position(|&x| x == j).expect("ordering is a bijection")
    }
}

/// Layered ordering of `basis` with respect to the edge `(a, b)`, running
/// from corner `a` to corner `b`. For `(0, 1)` this is the canonical order.
pub fn ordering(basis: &BasisInstance, a: usize, b: usize) -> Result<OrderingMap> {
    let sigma = Permutation::sending_to_first_edge(a, b)?;
    let inv = sigma.inverse();
    let order = std::array::from_fn(|k| {
        let g = canonical_entries()[k].glyph.act(&inv);
        basis.index_of(&g).expect("the basis is S3 invariant")
    });
    Ok(OrderingMap { order })
}

/// Reflection of the canonical order across the perpendicular bisector of
/// [v1, v2] (swap v1 and v2).
pub fn mirror_index(j: usize) -> usize {
    static MIRROR: OnceLock<[usize; NUM_BASIS]> = OnceLock::new();
    MIRROR.get_or_init(|| {
        let swap = Permutation::new([1, 0, 2]).expect("valid permutation");
        std::array::from_fn(|k| canonical_index(&canonical_entries()[k].glyph.act(&swap)).expect("S3 invariant"))
    })[j]
}

/// `coef * b1^e[0] * b2^e[1] * b3^e[2] * c[source]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub beta_exp: [u8; 3],
    pub source: usize,
}

/// One smoothness condition `c~[target] = sum of terms`, polynomial in beta.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub target: usize,
    pub terms: Vec<Term>,
}

impl ConstraintRow {
    fn mirrored(&self) -> Self {
        Self {
            target: mirror_index(self.target),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: t.coef,
                    beta_exp: [t.beta_exp[1], t.beta_exp[0], t.beta_exp[2]],
                    source: mirror_index(t.source),
                })
                .collect(),
        }
    }

    /// Coefficients of `c` in the condition at a particular `beta`.
    pub fn weights(&self, beta: &Barycentric) -> [f64; NUM_BASIS] {
        let mut w = [0.0; NUM_BASIS];
        for t in &self.terms {
            let mono: f64 = (0..3).map(|r| beta.0[r].powi(t.beta_exp[r] as i32)).product();
            w[t.source] += t.coef * mono;
        }
        w
    }

    pub fn apply(&self, beta: &Barycentric, c: &[f64; NUM_BASIS]) -> f64 {
        self.weights(beta).iter().zip(c).map(|(w, x)| w * x).sum()
    }
}

/// Build a row from 1-based `(coef, exponents, source)` triples.
fn row(target: usize, terms: &[(f64, [u8; 3], usize)]) -> ConstraintRow {
    ConstraintRow {
        target: target - 1,
        terms: terms.iter().map(|&(coef, beta_exp, s)| Term { coef, beta_exp, source: s - 1 }).collect(),
    }
}

const B1: [u8; 3] = [1, 0, 0];
const B2: [u8; 3] = [0, 1, 0];
const B3: [u8; 3] = [0, 0, 1];
const B11: [u8; 3] = [2, 0, 0];
const B22: [u8; 3] = [0, 2, 0];
const B33: [u8; 3] = [0, 0, 2];
const B12: [u8; 3] = [1, 1, 0];
const B13: [u8; 3] = [1, 0, 1];
const B23: [u8; 3] = [0, 1, 1];

fn first_order_rows() -> Vec<ConstraintRow> {
    let third = 1.0 / 3.0;
    let printed = [
        row(9, &[(1.0, B1, 1), (1.0, B2, 2), (1.0, B3, 9)]),
        row(10, &[(1.0, B1, 2), (1.0, B2, 3), (1.0, B3, 10)]),
        row(11, &[(2.0, B1, 3), (-1.0, B1, 2), (1.0, B2, 4), (1.0, B3, 11)]),
        row(12, &[(2.0 * third, B1, 4), (third, B1, 5), (third, B2, 4), (2.0 * third, B2, 5), (1.0, B3, 12)]),
    ];
    let mut rows = printed.to_vec();
    // c~13, c~14, c~15 mirror c~11, c~10, c~9.
    rows.extend(printed[..3].iter().rev().map(ConstraintRow::mirrored));
    rows
}

fn second_order_rows() -> Vec<ConstraintRow> {
    let third = 1.0 / 3.0;
    let printed = [
        row(16, &[(1.0, B11, 1), (2.0, B12, 2), (1.0, B22, 3), (2.0, B13, 9), (2.0, B23, 10), (1.0, B33, 16)]),
        row(
            17,
            &[
                (1.0, B11, 2),
                (1.0, B22, 4),
                (1.0, B33, 17),
                (3.0, B12, 3),
                (-1.0, B12, 2),
                (3.0, B13, 10),
                (-1.0, B13, 2),
                (1.0, B23, 10),
                (2.0, B23, 11),
                (-1.0, B23, 3),
            ],
        ),
        row(
            18,
            &[
                (2.0 * third, B11, 3),
                (2.0 * third, B11, 4),
                (-third, B11, 2),
                (third, B22, 4),
                (2.0 * third, B22, 5),
                (1.0, B33, 18),
                (third, B12, 2),
                (-2.0 * third, B12, 3),
                (2.0, B12, 4),
                (third, B12, 5),
                (third, B13, 2),
                (-2.0 * third, B13, 3),
                (2.0 * third, B13, 4),
                (-third, B13, 5),
                (1.0, B13, 11),
                (1.0, B13, 12),
                (3.0, B23, 12),
                (-2.0 * third, B23, 5),
                (-third, B23, 11),
            ],
        ),
    ];
    let mut rows = printed.to_vec();
    // c~19, c~20, c~21 mirror c~18, c~17, c~16.
    rows.extend(printed.iter().rev().map(ConstraintRow::mirrored));
    rows
}

/// All conditions for a join of the given order, symbolic in beta, sorted
/// by target index.
pub fn constraint_rows(order: usize) -> Result<Vec<ConstraintRow>> {
    if order > MAX_JOIN_ORDER {
        return Err(Error::InvalidOrder { order, max: MAX_JOIN_ORDER });
    }
    let mut rows: Vec<ConstraintRow> = (1..=8).map(|i| row(i, &[(1.0, [0, 0, 0], i)])).collect();
    if order >= 1 {
        rows.extend(first_order_rows());
    }
    if order >= 2 {
        rows.extend(second_order_rows());
    }
    rows.sort_by_key(|r| r.target);
    Ok(rows)
}

/// Conditions evaluated at a particular beta: `c~[target] = weights . c`.
#[derive(Clone, Debug)]
pub struct SmoothnessConstraints {
    pub order: usize,
    pub beta: Barycentric,
    pub rows: Vec<(usize, [f64; NUM_BASIS])>,
}

pub fn constraints(beta: &Barycentric, order: usize) -> Result<SmoothnessConstraints> {
    let rows = constraint_rows(order)?.iter().map(|r| (r.target, r.weights(beta))).collect();
    Ok(SmoothnessConstraints { order, beta: *beta, rows })
}

/// Two macrotriangles `[v1, v2, v3]` and `[v1, v2, v~3]` sharing their first edge.
#[derive(Clone, Debug)]
pub struct EdgeJoin {
    pub t: MacroTriangle,
    pub t_tilde: MacroTriangle,
    /// `v~3` in barycentric coordinates of `t`.
    pub beta: Barycentric,
}

impl EdgeJoin {
    pub fn new(t: MacroTriangle, t_tilde: MacroTriangle) -> Result<Self> {
        let scale = t.diameter().max(t_tilde.diameter());
        for i in 0..2 {
            if (t.vertex(i) - t_tilde.vertex(i)).norm() > 1e-12 * scale {
                return Err(Error::InvalidInput("triangles must share their first two vertices".into()));
            }
        }
        let beta = t.barycentric(&t_tilde.vertex(2));
        Ok(Self { t, t_tilde, beta })
    }

    /// The neighbour of `t` across [v1, v2] whose third vertex has barycentric
    /// coordinates `beta` in `t`.
    pub fn from_beta(t: MacroTriangle, beta: Barycentric) -> Result<Self> {
        let t_tilde = MacroTriangle::new(t.vertex(0), t.vertex(1), t.point(&beta))?;
        Ok(Self { t, t_tilde, beta })
    }
}

/// Ordinates of the neighbour fixed by a join of the given order; `None`
/// where the neighbour is free.
pub fn propagate(c: &[f64; NUM_BASIS], beta: &Barycentric, order: usize) -> Result<[Option<f64>; NUM_BASIS]> {
    let mut out = [None; NUM_BASIS];
    for r in constraint_rows(order)? {
        out[r.target] = Some(r.apply(beta, c));
    }
    Ok(out)
}

/// Overwrite the constrained ordinates of `free` with the propagated ones.
pub fn propagate_into(
    c: &[f64; NUM_BASIS],
    beta: &Barycentric,
    order: usize,
    free: &[f64; NUM_BASIS],
) -> Result<[f64; NUM_BASIS]> {
    let fixed = propagate(c, beta, order)?;
    Ok(std::array::from_fn(|j| fixed[j].unwrap_or(free[j])))
}

pub const JOIN_SAMPLES: usize = 50;

/// Largest cross-edge jumps, per derivative order, raw and scaled by
/// `max|c| / h^k` with `h` the smaller of the two triangles' minimum heights.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinReport {
    pub order: usize,
    pub jumps: Vec<f64>,
    pub scaled: Vec<f64>,
}

impl JoinReport {
    pub fn max_scaled(&self) -> f64 {
        self.scaled.iter().copied().fold(0.0, f64::max)
    }
}

fn min_height(t: &MacroTriangle) -> f64 {
    2.0 * t.area() / t.diameter()
}

/// Compare `f` and `g` across the shared first edge of their triangles at
/// `t = (k + 1/2) / 50` (which avoids the edge midpoint), for all mixed
/// derivatives up to `order` in two transversal directions.
pub fn verify_join(f: &SplineFunction, g: &SplineFunction, order: usize) -> Result<JoinReport> {
    let (t, tt) = (f.basis().triangle(), g.basis().triangle());
    let scale_len = t.diameter().max(tt.diameter());
    if (t.vertex(0) - tt.vertex(0)).norm() > 1e-12 * scale_len
        || (t.vertex(1) - tt.vertex(1)).norm() > 1e-12 * scale_len
    {
        return Err(Error::InvalidInput("splines do not share their first edge".into()));
    }
    verify_edge(f, g, &t.vertex(0), &t.vertex(1), order)
}

/// Like [`verify_join`], across an arbitrary common edge `[a, b]`, whatever
/// the labeling of the two triangles.
pub fn verify_edge(f: &SplineFunction, g: &SplineFunction, a: &Point, b: &Point, order: usize) -> Result<JoinReport> {
    let (t, tt) = (f.basis().triangle(), g.basis().triangle());
    let tangent = (b - a).normalize();
    let normal = Vector::new(-tangent.y, tangent.x);
    let dirs = [normal, (normal + tangent).normalize()];
    let mut jumps = vec![0.0f64; order + 1];
    for k in 0..JOIN_SAMPLES {
        let s = (k as f64 + 0.5) / JOIN_SAMPLES as f64;
        let p = Point::from(a.coords * (1.0 - s) + b.coords * s);
        for (ord, jump) in jumps.iter_mut().enumerate() {
            // all multisets of size `ord` over the two directions
            for n_first in 0..=ord {
                let mut ds = vec![dirs[0]; n_first];
                ds.extend(std::iter::repeat_n(dirs[1], ord - n_first));
                let diff = f.directional(&ds, &p)? - g.directional(&ds, &p)?;
                *jump = jump.max(diff.abs());
            }
        }
    }
    let cmax = f.coeffs().iter().chain(g.coeffs()).map(|x| x.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let h = min_height(t).min(min_height(tt));
    let scaled = jumps.iter().enumerate().map(|(k, j)| j * h.powi(k as i32) / cmax).collect();
    Ok(JoinReport { order, jumps, scaled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marsden::quasi_interpolant_coeffs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn glyphs(range: std::ops::Range<usize>) -> Vec<String> {
        range.map(|k| canonical_entries()[k].glyph.to_string()).collect()
    }

    #[test]
    fn layer_contents() {
        assert_eq!(glyphs(0..8), ["600101", "500201", "410201", "320201", "230210", "140210", "050210", "060110"]);
        assert_eq!(glyphs(15..21), ["401102", "311102", "211211", "121211", "131120", "041120"]);
    }

    #[test]
    fn mirror_reverses_each_layer() {
        for i in 0..8 {
            assert_eq!(mirror_index(i), 7 - i);
        }
        for i in 8..15 {
            assert_eq!(mirror_index(i), 22 - i);
        }
        for i in 15..21 {
            assert_eq!(mirror_index(i), 35 - i);
        }
        for j in 0..NUM_BASIS {
            assert_eq!(mirror_index(mirror_index(j)), j);
        }
    }

    #[test]
    fn printed_rows_are_mirror_symmetric_where_expected() {
        let rows = constraint_rows(1).unwrap();
        let r12 = rows.iter().find(|r| r.target == 11).unwrap();
        let beta = Barycentric([0.3, -0.5, 1.2]);
        let m = r12.mirrored();
        assert_eq!(m.target, 11);
        let (w1, w2) = (r12.weights(&beta), m.weights(&Barycentric([-0.5, 0.3, 1.2])));
        // mirrored row at swapped beta, read through the mirror, is the original
        for j in 0..NUM_BASIS {
            assert!((w1[j] - w2[mirror_index(j)]).abs() < 1e-15);
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (b1, b2) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let beta = Barycentric([b1, b2, 1.0 - b1 - b2]);
            let k = constraints(&beta, 2).unwrap();
            assert_eq!(k.rows.len(), 21);
            for (_, w) in &k.rows {
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_join() {
        let c: [f64; NUM_BASIS] = std::array::from_fn(|j| (j as f64).sin());
        let out = propagate(&c, &Barycentric([0.0, 0.0, 1.0]), 2).unwrap();
        for j in 0..21 {
            assert!((out[j].unwrap() - c[j]).abs() < 1e-15);
        }
        assert!(out[21..].iter().all(Option::is_none));
        assert!(constraint_rows(3).is_err());
    }

    #[test]
    fn first_rows_match_printed_formulas() {
        let beta = Barycentric([0.2, 0.5, 0.3]);
        let c: [f64; NUM_BASIS] = std::array::from_fn(|j| 1.0 + j as f64 * j as f64);
        let out = propagate(&c, &beta, 2).unwrap();
        let cc = |i: usize| c[i - 1];
        let [b1, b2, b3] = beta.0;
        assert!((out[8].unwrap() - (b1 * cc(1) + b2 * cc(2) + b3 * cc(9))).abs() < 1e-12);
        let e16 = b1 * b1 * cc(1)
            + 2.0 * b1 * b2 * cc(2)
            + b2 * b2 * cc(3)
            + 2.0 * b1 * b3 * cc(9)
            + 2.0 * b2 * b3 * cc(10)
            + b3 * b3 * cc(16);
        assert!((out[15].unwrap() - e16).abs() < 1e-12);
    }

    #[test]
    fn polynomial_coefficients_propagate() {
        let t = MacroTriangle::from_coords([[0.0, 0.0], [1.0, 0.1], [0.4, 0.8]]).unwrap();
        let join = EdgeJoin::from_beta(t.clone(), Barycentric([0.7, 0.6, -0.3])).unwrap();
        let (b, bt) = (BasisInstance::new(&join.t).unwrap(), BasisInstance::new(&join.t_tilde).unwrap());
        let f = |p: &Point| p.x.powi(4) * p.y - 3.0 * p.y.powi(5) + p.x * p.y;
        let (c, ct) = (quasi_interpolant_coeffs(&b, f), quasi_interpolant_coeffs(&bt, f));
        let out = propagate(&c, &join.beta, 2).unwrap();
        for j in 0..21 {
            assert!((out[j].unwrap() - ct[j]).abs() < 1e-9, "index {j}");
        }
    }

    #[test]
    fn propagated_join_is_c2_and_random_is_not() {
        let t = MacroTriangle::from_coords([[0.0, 0.0], [1.0, 0.1], [0.4, 0.8]]).unwrap();
        let join = EdgeJoin::from_beta(t, Barycentric([0.2, 1.1, -0.3])).unwrap();
        let (b, bt) = (BasisInstance::new(&join.t).unwrap(), BasisInstance::new(&join.t_tilde).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c: [f64; NUM_BASIS] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let free: [f64; NUM_BASIS] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let f = SplineFunction::new(&b, c);
        let g = SplineFunction::new(&bt, propagate_into(&c, &join.beta, 2, &free).unwrap());
        let rep = verify_join(&f, &g, 2).unwrap();
        assert!(rep.max_scaled() <= 1e-8, "{rep:?}");

        let g0 = SplineFunction::new(&bt, propagate_into(&c, &join.beta, 0, &free).unwrap());
        let rep0 = verify_join(&f, &g0, 1).unwrap();
        assert!(rep0.scaled[0] <= 1e-8 && rep0.scaled[1] > 1e-3, "{rep0:?}");

        let rand = SplineFunction::new(&bt, free);
        assert!(verify_join(&f, &rand, 2).unwrap().max_scaled() > 1e-3);
    }

    #[test]
    fn ordering_for_other_edges() {
        let b = BasisInstance::new(&MacroTriangle::unit()).unwrap();
        assert_eq!(ordering(&b, 0, 1).unwrap().order, std::array::from_fn(|j| j));
        let o = ordering(&b, 1, 2).unwrap();
        let xi = crate::marsden::domain_points(&b);
        assert!((xi.points[o.order[0]] - b.triangle().vertex(1)).norm() < 1e-14);
        assert!((xi.points[o.order[7]] - b.triangle().vertex(2)).norm() < 1e-14);
        assert_eq!(o.position(o.order[5]), 5);
    }
}
