//! Pointwise evaluation of bivariate simplex splines.
//!
//! `M[K]` denotes the unit-integral simplex spline with knot multiset `K`
//! (`|K| = d + 3` for degree `d`). Values come from the degree-lowering
//! recurrence
//!
//! ```text
//! M[K](x) = n / (n - 2) * sum_i lambda_i(x) M[K \ k_i](x),   n = |K| - 1,
//! ```
//!
//! with `lambda` the barycentric coordinates of `x` in three affinely
//! independent knots, and derivatives from
//!
//! ```text
//! D_u M[K] = n * sum_i mu_i M[K \ k_i],   sum mu_i = 0,  sum mu_i k_i = u.
//! ```
//!
//! The degree-zero case is `1 / area` on the knot triangle. Points on a knot
//! line are resolved by a symbolic perturbation `x + eps d1 + eps^2 d2`,
//! where `d1` points into the macrotriangle cell containing `x`, so every
//! value is a limit from inside the macrotriangle.

use crate::bspline::univariate_bspline;
use crate::error::{Error, Result};
use crate::geometry::{barycentric_direction, barycentric_in, signed_area, Point, SplitSites, Vector};
use crate::multiplicity::MultiplicityVector;
use crate::polynomial::Polynomial;

/// A knot multiset stored as distinct positions with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotMultiset {
    points: Vec<Point>,
    mult: Vec<u8>,
}

impl KnotMultiset {
    pub fn new(points: Vec<Point>, mult: Vec<u8>) -> Result<Self> {
        if points.len() != mult.len() {
            return Err(Error::InvalidInput("points and multiplicities differ in length".into()));
        }
        Ok(Self { points, mult })
    }

    /// Knots at the primary sites v1..v6 with multiplicities `m`.
    pub fn from_sites(sites: &SplitSites, m: &MultiplicityVector) -> Self {
        Self { points: sites.points()[..6].to_vec(), mult: m.0.to_vec() }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[u8] {
        &self.mult
    }

    pub fn len(&self) -> usize {
        self.mult.iter().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Knots listed with repetition.
    pub fn expanded(&self) -> Vec<Point> {
        self.points.iter().zip(&self.mult).flat_map(|(p, &m)| std::iter::repeat_n(*p, m as usize)).collect()
    }

    pub fn is_collinear(&self) -> bool {
        let active: Vec<Point> = self.points.iter().zip(&self.mult).filter(|(_, &m)| m > 0).map(|(p, _)| *p).collect();
        choose_pivot(&active, PivotRule::MaxArea, scale_of(&active)).is_none()
    }
}

/// Which three affinely independent knots the recurrence expands over.
/// Results are independent of the choice up to round-off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// The triple spanning the largest triangle.
    #[default]
    MaxArea,
    /// The lexicographically first independent triple.
    First,
    /// The lexicographically last independent triple.
    Last,
}

fn scale_of(points: &[Point]) -> f64 {
    let mut s: f64 = 0.0;
    for a in points {
        for b in points {
            s = s.max((a - b).norm());
        }
    }
    s
}

fn choose_pivot(points: &[Point], rule: PivotRule, scale: f64) -> Option<[usize; 3]> {
    let tol = 1e-12 * scale * scale;
    let n = points.len();
    let mut best: Option<([usize; 3], f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let area = signed_area(&points[i], &points[j], &points[k]).abs();
                if area <= tol {
                    continue;
                }
                match rule {
                    PivotRule::First if best.is_none() => best = Some(([i, j, k], area)),
                    PivotRule::First => {}
                    PivotRule::Last => best = Some(([i, j, k], area)),
                    PivotRule::MaxArea => {
                        if best.is_none_or(|(_, a)| area > a) {
                            best = Some(([i, j, k], area));
                        }
                    }
                }
            }
        }
    }
    best.map(|(t, _)| t)
}

/// Perturbation frame used to break ties on knot lines.
#[derive(Clone, Copy, Debug)]
struct Approach {
    d1: Vector,
    d2: Vector,
}

impl Approach {
    fn towards(from: &Point, target: &Point) -> Self {
        let mut d1 = target - from;
        let n = d1.norm();
        d1 = if n > 0.0 { d1 / n } else { Vector::new(0.8, 0.6) };
        Self { d1, d2: Vector::new(-d1.y, d1.x) }
    }

    /// Approach `p` from inside the macrotriangle cell that contains it.
    fn inside(sites: &SplitSites, p: &Point) -> Self {
        let target = match sites.locate(p) {
            Ok(k) => sites.cell_centroid(k),
            Err(_) => sites.barycenter(),
        };
        Self::towards(p, &target)
    }
}

struct Recurrence<'a> {
    points: &'a [Point],
    radix: Vec<usize>,
    /// One memo table per number of derivative directions already applied.
    memo: Vec<Vec<f64>>,
    x: Point,
    dirs: &'a [Vector],
    approach: Approach,
    pivot: PivotRule,
    scale: f64,
}

impl<'a> Recurrence<'a> {
    fn new(knots: &'a KnotMultiset, x: Point, dirs: &'a [Vector], approach: Approach, pivot: PivotRule) -> Self {
        let mut radix = Vec::with_capacity(knots.points.len());
        let mut size = 1usize;
        for &m in &knots.mult {
            radix.push(size);
            size *= m as usize + 1;
        }
        Self {
            points: &knots.points,
            radix,
            memo: vec![vec![f64::NAN; size]; dirs.len() + 1],
            x,
            dirs,
            approach,
            pivot,
            scale: scale_of(&knots.points),
        }
    }

    fn key(&self, mult: &[u8]) -> usize {
        mult.iter().zip(&self.radix).map(|(&m, &r)| m as usize * r).sum()
    }

    fn active(&self, mult: &[u8]) -> (Vec<usize>, Vec<Point>) {
        let idx: Vec<usize> = (0..mult.len()).filter(|&i| mult[i] > 0).collect();
        let pts = idx.iter().map(|&i| self.points[i]).collect();
        (idx, pts)
    }

    /// Strict membership of the perturbed point in the triangle `(a, b, c)`.
    fn inside_perturbed(&self, tri: [Point; 3]) -> bool {
        let [a, b, c] = tri;
        let lam = barycentric_in(&a, &b, &c, &self.x);
        let g1 = barycentric_direction(&a, &b, &c, &self.approach.d1);
        let g2 = barycentric_direction(&a, &b, &c, &self.approach.d2);
        (0..3).all(|r| {
            let gscale = g1[r].abs().max(g2[r].abs());
            if lam[r].abs() > 1e-12 {
                lam[r] > 0.0
            } else if g1[r].abs() > 1e-9 * gscale {
                g1[r] > 0.0
            } else {
                g2[r] > 0.0
            }
        })
    }

    fn eval(&mut self, mult: &mut [u8], level: usize) -> f64 {
        let key = self.key(mult);
        let cached = self.memo[level][key];
        if !cached.is_nan() {
            return cached;
        }
        let v = self.compute(mult, level);
        self.memo[level][key] = v;
        v
    }

    fn compute(&mut self, mult: &mut [u8], level: usize) -> f64 {
        let total: usize = mult.iter().map(|&m| m as usize).sum();
        let (idx, pts) = self.active(mult);
        let Some(piv) = choose_pivot(&pts, self.pivot, self.scale) else {
            return 0.0;
        };
        let piv = piv.map(|i| idx[i]);
        let [a, b, c] = piv.map(|i| self.points[i]);
        if total == 3 {
            if level < self.dirs.len() {
                return 0.0;
            }
            return if self.inside_perturbed([a, b, c]) { 1.0 / signed_area(&a, &b, &c).abs() } else { 0.0 };
        }
        let n = (total - 1) as f64;
        let (weights, factor) = if level < self.dirs.len() {
            (barycentric_direction(&a, &b, &c, &self.dirs[level]), n)
        } else {
            (barycentric_in(&a, &b, &c, &self.x), n / (n - 2.0))
        };
        let next = if level < self.dirs.len() { level + 1 } else { level };
        let mut sum = 0.0;
        for (r, &i) in piv.iter().enumerate() {
            if weights[r] == 0.0 {
                continue;
            }
            mult[i] -= 1;
            sum += weights[r] * self.eval(mult, next);
            mult[i] += 1;
        }
        factor * sum
    }
}

/// Evaluate `D_{dirs} M[K](x)` with an explicit tie-break direction.
pub fn eval_unit(knots: &KnotMultiset, x: &Point, dirs: &[Vector], toward: &Point, pivot: PivotRule) -> f64 {
    let approach = Approach::towards(x, toward);
    let mut rec = Recurrence::new(knots, *x, dirs, approach, pivot);
    let mut mult = knots.mult.clone();
    rec.eval(&mut mult, 0)
}

/// A simplex spline on the split sites of a macrotriangle: `alpha * M[K]`.
#[derive(Clone, Debug)]
pub struct SimplexSplineDef {
    m: MultiplicityVector,
    sites: SplitSites,
    alpha: f64,
    knots: KnotMultiset,
}

impl SimplexSplineDef {
    pub fn new(m: MultiplicityVector, sites: SplitSites, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("normalization constant must be positive, got {alpha}")));
        }
        if m.total() < 3 {
            return Err(Error::InvalidMultiplicity(m.to_string()));
        }
        let knots = KnotMultiset::from_sites(&sites, &m);
        if knots.is_collinear() {
            return Err(Error::CollinearKnots);
        }
        Ok(Self { m, sites, alpha, knots })
    }

    /// The unit-integral spline `M[K]`.
    pub fn unit(m: MultiplicityVector, sites: SplitSites) -> Result<Self> {
        Self::new(m, sites, 1.0)
    }

    pub fn multiplicity(&self) -> &MultiplicityVector {
        &self.m
    }

    pub fn degree(&self) -> usize {
        self.m.total() - 3
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sites(&self) -> &SplitSites {
        &self.sites
    }

    pub fn knots(&self) -> &KnotMultiset {
        &self.knots
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.eval_with(p, PivotRule::MaxArea)
    }

    pub fn eval_with(&self, p: &Point, pivot: PivotRule) -> f64 {
        self.eval_directional_with(&[], p, pivot)
    }

    /// First directional derivative along `u`.
    pub fn eval_deriv(&self, u: &Vector, p: &Point) -> Result<f64> {
        self.eval_directional(std::slice::from_ref(u), p)
    }

    /// Mixed directional derivative `D_{dirs[0]} ... D_{dirs[k-1]}`.
    pub fn eval_directional(&self, dirs: &[Vector], p: &Point) -> Result<f64> {
        if dirs.len() > self.degree() {
            return Err(Error::InvalidOrder { order: dirs.len(), max: self.degree() });
        }
        Ok(self.eval_directional_with(dirs, p, PivotRule::MaxArea))
    }

    fn eval_directional_with(&self, dirs: &[Vector], p: &Point, pivot: PivotRule) -> f64 {
        let approach = Approach::inside(&self.sites, p);
        let mut rec = Recurrence::new(&self.knots, *p, dirs, approach, pivot);
        let mut mult = self.knots.mult.clone();
        self.alpha * rec.eval(&mut mult, 0)
    }

    /// Restriction to the edge from corner `a` to corner `b`.
    pub fn restrict_to_edge(&self, a: usize, b: usize) -> Result<EdgeRestriction<'_>> {
        if a > 2 || b > 2 || a == b {
            return Err(Error::InvalidInput(format!("({a}, {b}) is not an edge of the macrotriangle")));
        }
        Ok(EdgeRestriction { def: self, a: self.sites.site(a), b: self.sites.site(b) })
    }

    /// Compare `int f M` computed by quadrature over the 12 cells with the
    /// exact value `E[f(sum lambda_i k_i)]` for `lambda` uniform on the
    /// simplex. Requires `alpha == 1`.
    pub fn moment_oracle(&self, f: &Polynomial, refinement: usize) -> Result<(f64, f64)> {
        if self.alpha != 1.0 {
            return Err(Error::InvalidInput("moment oracle needs the unit-integral normalization".into()));
        }
        let lhs = integrate_over_cells(&self.sites, refinement, |p| f.eval(p) * self.eval(p));
        let rhs = dirichlet_expectation(&self.knots.expanded(), f);
        Ok((lhs, rhs))
    }
}

/// `t -> S((1 - t) a + t b)`, values taken from inside the macrotriangle.
#[derive(Clone, Copy, Debug)]
pub struct EdgeRestriction<'a> {
    def: &'a SimplexSplineDef,
    a: Point,
    b: Point,
}

impl EdgeRestriction<'_> {
    pub fn value(&self, t: f64) -> f64 {
        self.def.eval(&Point::from(self.a.coords * (1.0 - t) + self.b.coords * t))
    }

    /// Values at `n` midpoints `t = (k + 1/2) / n`.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        (0..n).map(|k| (k as f64 + 0.5) / n as f64).map(|t| (t, self.value(t))).collect()
    }

    /// Projection of the knots onto the edge parameter, for knots lying on it.
    pub fn edge_knots(&self) -> Vec<f64> {
        let e = self.b - self.a;
        let len2 = e.norm_squared();
        let mut t: Vec<f64> = self
            .def
            .knots
            .expanded()
            .into_iter()
            .filter(|k| signed_area(&self.a, &self.b, k).abs() <= 1e-12 * len2)
            .map(|k| (k - self.a).dot(&e) / len2)
            .collect();
        t.sort_by(f64::total_cmp);
        t
    }

    /// Reference univariate B-spline on the projected edge knots; meaningful
    /// when all but one knot lie on the edge.
    pub fn reference_bspline(&self, t: f64) -> Result<f64> {
        univariate_bspline(&self.edge_knots(), t)
    }
}

/// Gauss-Legendre nodes and weights on [0, 1].
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            // Newton on P_n from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            ((1.0 - x) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Collapsed (Duffy) product Gauss rule on a triangle, exact for degree
/// `2 * n - 2`: (weight relative to area, barycentric point).
pub(crate) fn triangle_rule(n: usize) -> Vec<(f64, [f64; 3])> {
    let g = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            // (u, v) in the square -> (u, (1 - u) v), Jacobian (1 - u), area 1/2.
            let (s, t) = (u, (1.0 - u) * v);
            out.push((2.0 * wu * wv * (1.0 - u), [1.0 - s - t, s, t]));
        }
    }
    out
}

/// Points per direction of the cell rule: exact for degree 8, i.e. a
/// quintic spline times a cubic test polynomial on each cell.
const CELL_RULE_POINTS: usize = 5;

/// Integrate `g` over the macrotriangle with a product Gauss rule on each
/// cell after splitting it uniformly into `refinement^2` triangles.
pub fn integrate_over_cells(sites: &SplitSites, refinement: usize, mut g: impl FnMut(&Point) -> f64) -> f64 {
    let r = refinement.max(1);
    let rule = triangle_rule(CELL_RULE_POINTS);
    let mut total = 0.0;
    for k in 0..crate::geometry::NUM_CELLS {
        let [q0, q1, q2] = sites.cell(k);
        let area = sites.cell_area(k) / (r * r) as f64;
        let at = |i: f64, j: f64| -> Point {
            let (s, t) = (i / r as f64, j / r as f64);
            Point::from(q0.coords * (1.0 - s - t) + q1.coords * s + q2.coords * t)
        };
        for i in 0..r {
            for j in 0..r - i {
                let (fi, fj) = (i as f64, j as f64);
                let mut tris = vec![[at(fi, fj), at(fi + 1.0, fj), at(fi, fj + 1.0)]];
                if i + j + 1 < r {
                    tris.push([at(fi + 1.0, fj), at(fi + 1.0, fj + 1.0), at(fi, fj + 1.0)]);
                }
                for [a, b, c] in tris {
                    for &(w, l) in &rule {
                        let p = Point::from(a.coords * l[0] + b.coords * l[1] + c.coords * l[2]);
                        total += area * w * g(&p);
                    }
                }
            }
        }
    }
    total
}

/// `E[f(sum lambda_i k_i)]` for `lambda` uniform on the standard simplex
/// over the listed knots, using the Dirichlet(1, ..., 1) moments
/// `E[prod lambda_i^{a_i}] = (n - 1)! prod a_i! / (n - 1 + sum a_i)!`.
pub fn dirichlet_expectation(knots: &[Point], f: &Polynomial) -> f64 {
    let n = knots.len();
    let mut total = 0.0;
    for &(c, a, b) in &f.terms {
        let order = (a + b) as usize;
        // Expand (sum lambda_i x_i)^a (sum lambda_i y_i)^b over index tuples.
        let mut counts = vec![0u32; n];
        let mut tuple = vec![0usize; order];
        loop {
            counts.iter_mut().for_each(|x| *x = 0);
            let mut coord = 1.0;
            for (pos, &i) in tuple.iter().enumerate() {
                counts[i] += 1;
                coord *= if pos < a as usize { knots[i].x } else { knots[i].y };
            }
            total += c * coord * dirichlet_moment(n, &counts);
            // advance the odometer
            let mut pos = 0;
            while pos < order {
                tuple[pos] += 1;
                if tuple[pos] < n {
                    break;
                }
                tuple[pos] = 0;
                pos += 1;
            }
            if pos == order {
                break;
            }
        }
    }
    total
}

fn dirichlet_moment(n: usize, counts: &[u32]) -> f64 {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let s: u32 = counts.iter().sum();
    let num: f64 = counts.iter().map(|&k| fact(k)).product();
    // (n - 1)! / (n - 1 + s)!
    let ratio: f64 = (0..s).map(|j| 1.0 / (n as f64 + j as f64)).product();
    num * ratio
}
