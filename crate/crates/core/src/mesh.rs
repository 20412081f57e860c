//! Triangulations of macrotriangles: input, refinement, fitting with
//! smoothness propagation across edges, and convergence studies.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{relabel_coeffs, BasisInstance, SplineFunction, NUM_BASIS};
use crate::error::{Error, Result};
use crate::geometry::{MacroTriangle, Permutation, Point};
use crate::join::{propagate_into, verify_edge};
use crate::marsden::{lattice_points, quasi_interpolant_coeffs, ConvergenceStudy};

/// A conforming, consistently oriented triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// Sorted vertex pair -> triangles containing that edge.
    edges: BTreeMap<(usize, usize), Vec<usize>>,
}

#[derive(Deserialize, Serialize)]
struct MeshJson {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nc = |msg: String| Error::NonConforming(msg);
        for (i, t) in triangles.iter().enumerate() {
            if let Some(&v) = t.iter().find(|&&v| v >= vertices.len()) {
                return Err(nc(format!("triangle {i} references vertex {v} of {}", vertices.len())));
            }
            MacroTriangle::new(vertices[t[0]], vertices[t[1]], vertices[t[2]])?;
        }
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        for (&(a, b), tris) in &edges {
            if tris.len() > 2 {
                return Err(nc(format!("edge ({a}, {b}) is shared by {} triangles", tris.len())));
            }
            if let [s, t] = tris[..] {
                if directed(&triangles[s], a, b) == directed(&triangles[t], a, b) {
                    return Err(nc(format!("triangles {s} and {t} are inconsistently oriented")));
                }
            }
        }
        // Hanging vertices: a mesh vertex strictly inside some edge.
        for &(a, b) in edges.keys() {
            let (pa, pb) = (vertices[a], vertices[b]);
            let len2 = (pb - pa).norm_squared();
            for (v, p) in vertices.iter().enumerate() {
                if v == a || v == b {
                    continue;
                }
                let s = (p - pa).dot(&(pb - pa)) / len2;
                let dist = crate::geometry::cross(pb - pa, p - pa).abs() / len2.sqrt();
                if s > 1e-12 && s < 1.0 - 1e-12 && dist <= 1e-12 * len2.sqrt() {
                    return Err(nc(format!("vertex {v} hangs on edge ({a}, {b})")));
                }
            }
        }
        Ok(Self { vertices, triangles, edges })
    }

    pub fn single(t: &MacroTriangle) -> Self {
        Self::new(t.vertices().to_vec(), vec![[0, 1, 2]]).expect("one triangle is conforming")
    }

    /// `{"vertices": [[x, y], ...], "triangles": [[i, j, k], ...]}`
    pub fn from_json(text: &str) -> Result<Self> {
        let m: MeshJson = serde_json::from_str(text)?;
        Self::new(m.vertices.iter().map(|v| Point::new(v[0], v[1])).collect(), m.triangles)
    }

    pub fn to_json(&self) -> String {
        let m = MeshJson {
            vertices: self.vertices.iter().map(|p| [p.x, p.y]).collect(),
            triangles: self.triangles.clone(),
        };
        serde_json::to_string_pretty(&m).expect("mesh serializes")
    }

    /// OFF with triangular faces; a z coordinate, if present, is ignored.
    pub fn from_off(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("OFF: {msg}"));
        let mut tokens = text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace);
        if tokens.next() != Some("OFF") {
            return Err(bad("missing OFF header"));
        }
        let mut next_num = |what: &str| -> Result<f64> {
            tokens
                .next()
                .ok_or_else(|| bad(&format!("unexpected end reading {what}")))?
                .parse::<f64>()
                .map_err(|_| bad(what))
        };
        let nv = next_num("vertex count")? as usize;
        let nf = next_num("face count")? as usize;
        next_num("edge count")?;
        // Vertices may have 2 or 3 coordinates; count the tokens to decide.
        let rest: Vec<f64> = std::iter::from_fn(|| next_num("data").ok()).collect();
        let faces_len = |dim: usize| rest.len().checked_sub(nv * dim);
        let dim = if faces_len(3) == Some(4 * nf) {
            3
        } else if faces_len(2) == Some(4 * nf) {
            2
        } else {
            return Err(bad("counts do not match the data (only triangular faces are supported)"));
        };
        let vertices = (0..nv).map(|i| Point::new(rest[i * dim], rest[i * dim + 1])).collect();
        let mut triangles = Vec::with_capacity(nf);
        for f in rest[nv * dim..].chunks(4) {
            if f[0] != 3.0 {
                return Err(bad("only triangular faces are supported"));
            }
            triangles.push([f[1] as usize, f[2] as usize, f[3] as usize]);
        }
        Self::new(vertices, triangles)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("off")) {
            Self::from_off(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, i: usize) -> MacroTriangle {
        let [a, b, c] = self.triangles[i].map(|v| self.vertices[v]);
        MacroTriangle::new(a, b, c).expect("validated at construction")
    }

    /// Edges shared by two triangles: `((a, b), (s, t))` with `a < b`.
    pub fn interior_edges(&self) -> Vec<((usize, usize), (usize, usize))> {
        self.edges.iter().filter(|(_, t)| t.len() == 2).map(|(&e, t)| (e, (t[0], t[1]))).collect()
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.triangles.len()).map(|i| self.triangle(i).diameter()).fold(0.0, f64::max)
    }

    /// Split every triangle into four at its edge midpoints.
    pub fn refine(&self) -> Self {
        let mut vertices = self.vertices.clone();
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vertices.push(Point::from((vertices[a].coords + vertices[b].coords) / 2.0));
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let (ab, bc, ca) =
                (midpoint(a, b, &mut vertices), midpoint(b, c, &mut vertices), midpoint(c, a, &mut vertices));
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        Self::new(vertices, triangles).expect("refinement preserves conformity")
    }

    /// The triangle containing `p` (first match), if any.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        (0..self.triangles.len()).find(|&i| self.triangle(i).barycentric(p).0.iter().all(|&b| b >= -1e-12))
    }
}

fn directed(t: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Independent,
    C1,
    C2,
}

impl FitMode {
    pub fn join_order(&self) -> Option<usize> {
        match self {
            FitMode::Independent => None,
            FitMode::C1 => Some(1),
            FitMode::C2 => Some(2),
        }
    }
}

/// One triangle of a fit; ordinates refer to the triangle's vertex order in the mesh.
#[derive(Clone, Debug)]
pub struct FittedTriangle {
    pub basis: BasisInstance,
    pub coeffs: [f64; NUM_BASIS],
    pub max_error: f64,
}

impl FittedTriangle {
    pub fn spline(&self) -> SplineFunction<'_> {
        SplineFunction::new(&self.basis, self.coeffs)
    }
}

/// Scaled jumps (see [`crate::join::JoinReport`]) of orders 0..=2 across
/// one interior edge.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeReport {
    pub vertices: (usize, usize),
    pub triangles: (usize, usize),
    /// Whether the second triangle's ordinates were propagated from the
    /// first across this edge. In propagated fits, interior edges that are
    /// not propagated close a cycle and are over-constrained.
    pub propagated: bool,
    pub jumps: [f64; 3],
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub mode: FitMode,
    pub triangles: Vec<FittedTriangle>,
    pub edges: Vec<EdgeReport>,
    /// `max |f - s|` over lattice points of every triangle.
    pub max_error: f64,
    /// `max |f|` over the same points.
    pub scale: f64,
}

impl FitResult {
    pub fn eval(&self, mesh: &Triangulation, p: &Point) -> Result<f64> {
        let i = mesh.locate(p).ok_or(Error::OutsideTriangle(p.x, p.y))?;
        self.triangles[i].spline().eval(p)
    }

    /// Edges not fed by propagation in a propagated fit.
    pub fn over_constrained(&self) -> Vec<&EdgeReport> {
        if self.mode == FitMode::Independent {
            return Vec::new();
        }
        self.edges.iter().filter(|e| !e.propagated).collect()
    }
}

const ERROR_LATTICE: usize = 12;

type Target<'f> = &'f (dyn Fn(&Point) -> f64 + Sync);

/// Quasi-interpolate `f` on every triangle; in propagated modes, sweep
/// breadth-first from triangle 0 of each component and overwrite the
/// ordinates fixed by the C1 or C2 conditions across each tree edge.
pub fn fit(mesh: &Triangulation, f: Target<'_>, mode: FitMode) -> Result<FitResult> {
    let n = mesh.triangles.len();
    let bases: Vec<BasisInstance> =
        (0..n).into_par_iter().map(|i| BasisInstance::new(&mesh.triangle(i))).collect::<Result<_>>()?;
    let mut coeffs: Vec<[f64; NUM_BASIS]> = bases.par_iter().map(|b| quasi_interpolant_coeffs(b, f)).collect();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    if let Some(order) = mode.join_order() {
        let mut adjacency: Vec<Vec<((usize, usize), usize)>> = vec![Vec::new(); n];
        for ((a, b), (s, t)) in mesh.interior_edges() {
            adjacency[s].push(((a, b), t));
            adjacency[t].push(((a, b), s));
        }
        let mut seen = vec![false; n];
        for seed in 0..n {
            if seen[seed] {
                continue;
            }
            seen[seed] = true;
            let mut queue = VecDeque::from([seed]);
            while let Some(p) = queue.pop_front() {
                for &((a, b), q) in &adjacency[p] {
                    if seen[q] {
                        continue;
                    }
                    seen[q] = true;
                    coeffs[q] = propagate_across(mesh, p, q, a, b, &coeffs[p], &coeffs[q], order)?;
                    tree_edges.push((p.min(q), p.max(q)));
                    queue.push_back(q);
                }
            }
        }
    }
    let triangles: Vec<FittedTriangle> = bases
        .into_iter()
        .zip(coeffs)
        .map(|(basis, coeffs)| {
            let s = SplineFunction::new(&basis, coeffs);
            let mut err: f64 = 0.0;
            for p in lattice_points(basis.triangle(), ERROR_LATTICE) {
                err = err.max((s.eval(&p)? - f(&p)).abs());
            }
            Ok(FittedTriangle { basis, coeffs, max_error: err })
        })
        .collect::<Result<_>>()?;
    let scale = (0..n)
        .flat_map(|i| lattice_points(triangles[i].basis.triangle(), ERROR_LATTICE))
        .map(|p| f(&p).abs())
        .fold(0.0, f64::max);
    let edges = mesh
        .interior_edges()
        .par_iter()
        .map(|&((a, b), (s, t))| {
            let rep =
                verify_edge(&triangles[s].spline(), &triangles[t].spline(), &mesh.vertices[a], &mesh.vertices[b], 2)?;
            Ok(EdgeReport {
                vertices: (a, b),
                triangles: (s, t),
                propagated: tree_edges.contains(&(s, t)),
                jumps: [rep.scaled[0], rep.scaled[1], rep.scaled[2]],
            })
        })
        .collect::<Result<_>>()?;
    let max_error = triangles.iter().map(|t| t.max_error).fold(0.0, f64::max);
    Ok(FitResult { mode, triangles, edges, max_error, scale })
}

/// New ordinates of triangle `q` after imposing the join conditions from
/// triangle `p` across the edge `(a, b)`.
#[allow(clippy::too_many_arguments)]
fn propagate_across(
    mesh: &Triangulation,
    p: usize,
    q: usize,
    a: usize,
    b: usize,
    cp: &[f64; NUM_BASIS],
    cq: &[f64; NUM_BASIS],
    order: usize,
) -> Result<[f64; NUM_BASIS]> {
    let pos = |t: usize, v: usize| mesh.triangles[t].iter().position(|&x| x == v).expect("edge vertex");
    let sp = Permutation::sending_to_first_edge(pos(p, a), pos(p, b))?;
    let sq = Permutation::sending_to_first_edge(pos(q, a), pos(q, b))?;
    let third = |t: usize| mesh.triangles[t][3 - pos(t, a) - pos(t, b)];
    let tp = MacroTriangle::new(mesh.vertices[a], mesh.vertices[b], mesh.vertices[third(p)])?;
    let beta = tp.barycentric(&mesh.vertices[third(q)]);
    let joined = propagate_into(&relabel_coeffs(cp, &sp), &beta, order, &relabel_coeffs(cq, &sq))?;
    Ok(relabel_coeffs(&joined, &sq.inverse()))
}

/// Quasi-interpolation errors on `levels` successive 4-split refinements
/// of `base` (so `levels + 1` meshes).
pub fn convergence_study(f: Target<'_>, base: &MacroTriangle, levels: usize) -> Result<ConvergenceStudy> {
    if levels < 3 {
        return Err(Error::InvalidInput(format!("a convergence study needs at least 3 levels, got {levels}")));
    }
    let mut mesh = Triangulation::single(base);
    let (mut hs, mut errors) = (Vec::new(), Vec::new());
    for level in 0..=levels {
        if level > 0 {
            mesh = mesh.refine();
        }
        let r = fit(&mesh, f, FitMode::Independent)?;
        hs.push(mesh.max_diameter());
        errors.push(r.max_error);
    }
    Ok(ConvergenceStudy::from_errors(hs, errors))
}

/// Six macrotriangles around the center of a regular hexagon of the given
/// circumradius; the center is vertex 0 and the first corner of every triangle.
pub fn regular_hexagon(radius: f64) -> Triangulation {
    let mut vertices = vec![Point::origin()];
    for k in 0..6 {
        let a = std::f64::consts::PI / 3.0 * k as f64;
        vertices.push(Point::new(radius * a.cos(), radius * a.sin()));
    }
    let triangles = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    Triangulation::new(vertices, triangles).expect("hexagon is conforming")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Triangulation {
        Triangulation::from_json(r#"{"vertices": [[0,0],[1,0],[0.3,0.9],[0.9,-0.8]], "triangles": [[0,1,2],[1,0,3]]}"#)
            .unwrap()
    }

    #[test]
    fn rejects_non_conforming_meshes() {
        // edge shared by three triangles
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 1.0),
            Point::new(0.5, -1.0),
            Point::new(0.5, 2.0),
        ];
        assert!(matches!(
            Triangulation::new(v.clone(), vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]),
            Err(Error::NonConforming(_))
        ));
        // hanging vertex at the midpoint of an edge
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, -1.0),
        ];
        assert!(matches!(Triangulation::new(v, vec![[0, 1, 2], [0, 4, 3], [3, 4, 1]]), Err(Error::NonConforming(_))));
        // inconsistent orientation
        let v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 1.0), Point::new(0.5, -1.0)];
        assert!(matches!(Triangulation::new(v, vec![[0, 1, 2], [0, 1, 3]]), Err(Error::NonConforming(_))));
    }

    #[test]
    fn off_and_json_agree() {
        let off = "OFF\n# two triangles\n4 2 0\n0 0 0\n1 0 0\n0.3 0.9 0\n0.9 -0.8 0\n3 0 1 2\n3 1 0 3\n";
        assert_eq!(Triangulation::from_off(off).unwrap(), two_triangles());
        let again = Triangulation::from_json(&two_triangles().to_json()).unwrap();
        assert_eq!(again, two_triangles());
    }

    #[test]
    fn refinement_counts() {
        let m = two_triangles().refine();
        assert_eq!(m.triangles().len(), 8);
        assert_eq!(m.vertices().len(), 4 + 5);
        assert_eq!(m.interior_edges().len(), 8);
    }

    #[test]
    fn quintic_is_reproduced_on_a_single_triangle() {
        let mesh = Triangulation::single(&MacroTriangle::unit());
        let f = |p: &Point| p.x.powi(3) * p.y * p.y - p.y.powi(5) + 2.0;
        let r = fit(&mesh, &f, FitMode::Independent).unwrap();
        assert!(r.max_error <= 1e-9 * r.scale);
    }

    #[test]
    fn propagated_fit_is_c2_across_the_shared_edge() {
        let mesh = two_triangles();
        let f = |p: &Point| (3.0 * p.x).sin() * (2.0 * p.y).exp();
        let ind = fit(&mesh, &f, FitMode::Independent).unwrap();
        let c2 = fit(&mesh, &f, FitMode::C2).unwrap();
        assert_eq!(c2.edges.len(), 1);
        assert!(c2.edges[0].propagated);
        assert!(c2.edges[0].jumps.iter().all(|&j| j <= 1e-8), "{:?}", c2.edges[0]);
        assert!(ind.edges[0].jumps[0] <= 10.0 * ind.max_error / ind.scale.max(1.0));
        assert!(ind.edges[0].jumps[2] > 1e-8);
        let c1 = fit(&mesh, &f, FitMode::C1).unwrap();
        assert!(c1.edges[0].jumps[0] <= 1e-8 && c1.edges[0].jumps[1] <= 1e-8);
    }

    #[test]
    fn vertex_stars_are_reported() {
        let mesh = regular_hexagon(1.0);
        let f = |p: &Point| (p.x + 2.0 * p.y).sin();
        let r = fit(&mesh, &f, FitMode::C2).unwrap();
        assert_eq!(r.edges.len(), 6);
        assert_eq!(r.over_constrained().len(), 1);
        for e in r.edges.iter().filter(|e| e.propagated) {
            assert!(e.jumps.iter().all(|&j| j <= 1e-8));
        }
    }

    #[test]
    fn convergence_needs_three_levels() {
        assert!(convergence_study(&|p: &Point| p.x, &MacroTriangle::unit(), 2).is_err());
    }
}
