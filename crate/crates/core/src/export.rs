//! OBJ and CSV output: spline graphs, 12-split wireframes, control nets,
//! and coefficient files.

use std::io::{Read, Write};
use std::sync::OnceLock;

use crate::basis::{canonical_index, BasisInstance, SplineFunction, NUM_BASIS};
use crate::error::{Error, Result};
use crate::geometry::{MacroTriangle, Permutation, Point, CELLS, NUM_CELLS};
use crate::hermite::eps_v1_coeffs;
use crate::marsden::domain_points;
use crate::mesh::{regular_hexagon, Triangulation};

/// Polygons and polylines in 3D, 0-based indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
    pub lines: Vec<Vec<usize>>,
}

impl ObjMesh {
    /// Indices in range, polygons with at least three corners, finite coordinates.
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.vertices.iter().find(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite vertex {v:?}")));
        }
        let n = self.vertices.len();
        for f in &self.faces {
            if f.len() < 3 || f.iter().any(|&i| i >= n) {
                return Err(Error::InvalidInput(format!("bad face {f:?}")));
            }
        }
        for l in &self.lines {
            if l.len() < 2 || l.iter().any(|&i| i >= n) {
                return Err(Error::InvalidInput(format!("bad line {l:?}")));
            }
        }
        Ok(())
    }

    fn append(&mut self, other: ObjMesh) {
        let off = self.vertices.len();
        self.vertices.extend(other.vertices);
        self.faces.extend(other.faces.into_iter().map(|f| f.into_iter().map(|i| i + off).collect()));
        self.lines.extend(other.lines.into_iter().map(|l| l.into_iter().map(|i| i + off).collect()));
    }

    pub fn write_obj(&self, mut w: impl Write) -> Result<()> {
        self.validate()?;
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            let idx: Vec<String> = f.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(w, "f {}", idx.join(" "))?;
        }
        for l in &self.lines {
            let idx: Vec<String> = l.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(w, "l {}", idx.join(" "))?;
        }
        Ok(())
    }

    /// `x,y,value` for every vertex.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y", "value"])?;
        for v in &self.vertices {
            wr.serialize((v[0], v[1], v[2]))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Graph of one spline: each cell of the split sampled on a regular
/// lattice with `resolution` segments per side, evaluated with that cell's
/// polynomial. `12 (n+1)(n+2)/2` vertices and `12 n^2` faces.
pub fn surface(s: &SplineFunction, resolution: usize) -> Result<ObjMesh> {
    if resolution == 0 {
        return Err(Error::InvalidInput("resolution must be at least 1".into()));
    }
    let n = resolution;
    let sites = s.basis().sites();
    let mut out = ObjMesh::default();
    for k in 0..NUM_CELLS {
        let [a, b, c] = sites.cell(k);
        // row i has n + 1 - i points
        let mut row_start = Vec::with_capacity(n + 1);
        for i in 0..=n {
            row_start.push(out.vertices.len());
            for j in 0..=n - i {
                let (u1, u2) = (i as f64 / n as f64, j as f64 / n as f64);
                let p = Point::from(a.coords * (1.0 - u1 - u2) + b.coords * u1 + c.coords * u2);
                out.vertices.push([p.x, p.y, s.eval_cell(k, &p)]);
            }
        }
        let cell_ccw = crate::geometry::signed_area(&a, &b, &c) > 0.0;
        for i in 0..n {
            for j in 0..n - i {
                let (p0, p1, p2) = (row_start[i] + j, row_start[i + 1] + j, row_start[i] + j + 1);
                out.faces.push(orient(vec![p0, p1, p2], !cell_ccw));
                if j + 1 < n - i {
                    let p3 = row_start[i + 1] + j + 1;
                    out.faces.push(orient(vec![p2, p1, p3], !cell_ccw));
                }
            }
        }
    }
    Ok(out)
}

fn orient(mut f: Vec<usize>, reverse: bool) -> Vec<usize> {
    if reverse {
        f.reverse();
    }
    f
}

/// The 12-split edges lifted onto the graph, as polylines with
/// `resolution` segments each.
pub fn wireframe(s: &SplineFunction, resolution: usize) -> Result<ObjMesh> {
    if resolution == 0 {
        return Err(Error::InvalidInput("resolution must be at least 1".into()));
    }
    let sites = s.basis().sites();
    let mut segments: Vec<(usize, usize, usize)> = Vec::new();
    for (k, cell) in CELLS.iter().enumerate() {
        for r in 0..3 {
            let (a, b) = (cell[r], cell[(r + 1) % 3]);
            if !segments.iter().any(|&(x, y, _)| (x, y) == (a.min(b), a.max(b))) {
                segments.push((a.min(b), a.max(b), k));
            }
        }
    }
    let mut out = ObjMesh::default();
    for (a, b, k) in segments {
        let (pa, pb) = (sites.site(a), sites.site(b));
        let mut line = Vec::with_capacity(resolution + 1);
        for i in 0..=resolution {
            let t = i as f64 / resolution as f64;
            let p = Point::from(pa.coords * (1.0 - t) + pb.coords * t);
            line.push(out.vertices.len());
            out.vertices.push([p.x, p.y, s.eval_cell(k, &p)]);
        }
        out.lines.push(line);
    }
    Ok(out)
}

/// Polygons of the control net by glyph; all their S3 images are faces too.
const NET_TEMPLATES: [&[&str]; 10] = [
    &["600101", "500201", "500102"],
    &["500201", "411101", "500102"],
    &["500201", "410201", "411101"],
    &["411101", "311201", "311102"],
    &["410201", "320201", "311201", "411101"],
    &["320201", "220211", "211211", "311201"],
    &["311201", "211211", "211112", "311102"],
    &["320201", "230210", "220211"],
    &["220211", "211211", "121211"],
    &["211211", "121211", "121121", "112121", "112112", "211112"],
];

/// Faces of the control net over the domain points: triangles, quadrilaterals
/// and one central hexagon, as canonical basis indices in cyclic order.
pub fn control_net_faces() -> &'static [Vec<usize>] {
    static FACES: OnceLock<Vec<Vec<usize>>> = OnceLock::new();
    FACES.get_or_init(|| {
        let unit = BasisInstance::new(&MacroTriangle::unit()).expect("unit basis");
        let xi = domain_points(&unit).points;
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for template in NET_TEMPLATES {
            for sigma in Permutation::all() {
                let mut f: Vec<usize> = template
                    .iter()
                    .map(|g| {
                        canonical_index(&g.parse::<crate::MultiplicityVector>().expect("glyph").act(&sigma))
                            .expect("basis glyph")
                    })
                    .collect();
                let centre = f.iter().map(|&j| xi[j].coords).sum::<nalgebra::Vector2<f64>>() / f.len() as f64;
                f.sort_by(|&i, &j| {
                    let (a, b) = (xi[i].coords - centre, xi[j].coords - centre);
                    a.y.atan2(a.x).total_cmp(&b.y.atan2(b.x))
                });
                let mut key = f.clone();
                key.sort_unstable();
                if !faces.iter().any(|g| {
                    let mut k = g.clone();
                    k.sort_unstable();
                    k == key
                }) {
                    faces.push(f);
                }
            }
        }
        faces
    })
}

/// Points `(xi_j, c_j)` with the control-net polygons.
pub fn control_net(s: &SplineFunction) -> ObjMesh {
    let xi = domain_points(s.basis()).points;
    let flip = !s.basis().triangle().is_counterclockwise();
    ObjMesh {
        vertices: xi.iter().zip(s.coeffs()).map(|(p, c)| [p.x, p.y, *c]).collect(),
        faces: control_net_faces().iter().map(|f| orient(f.clone(), flip)).collect(),
        lines: Vec::new(),
    }
}

/// Concatenate per-triangle meshes.
pub fn combine(parts: impl IntoIterator<Item = ObjMesh>) -> ObjMesh {
    let mut out = ObjMesh::default();
    for p in parts {
        out.append(p);
    }
    out
}

/// Coefficient file: `triangle,index,value` rows with a header.
pub fn write_coeffs_csv(w: impl Write, coeffs: &[[f64; NUM_BASIS]]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["triangle", "index", "value"])?;
    for (t, c) in coeffs.iter().enumerate() {
        for (j, v) in c.iter().enumerate() {
            wr.serialize((t, j, v))?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Read a coefficient file for `triangles` triangles; every entry must be present.
pub fn read_coeffs_csv(r: impl Read, triangles: usize) -> Result<Vec<[f64; NUM_BASIS]>> {
    let mut out = vec![[f64::NAN; NUM_BASIS]; triangles];
    for rec in csv::Reader::from_reader(r).deserialize() {
        let (t, j, v): (usize, usize, f64) = rec?;
        if t >= triangles || j >= NUM_BASIS {
            return Err(Error::InvalidInput(format!("coefficient ({t}, {j}) out of range")));
        }
        out[t][j] = v;
    }
    if let Some(t) = out.iter().position(|c| c.iter().any(|v| v.is_nan())) {
        return Err(Error::InvalidInput(format!("missing coefficients for triangle {t}")));
    }
    Ok(out)
}

/// Points file: `x,y` rows with a header.
pub fn read_points_csv(r: impl Read) -> Result<Vec<Point>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|rec| rec.map(|(x, y): (f64, f64)| Point::new(x, y)).map_err(Error::from))
        .collect()
}

/// The corner nodal function on the six macrotriangles of a regular
/// hexagon around its center (every triangle has the center as v1).
pub fn hexagon_eps_v1(radius: f64) -> Result<(Triangulation, Vec<BasisInstance>, Vec<[f64; NUM_BASIS]>)> {
    let mesh = regular_hexagon(radius);
    let bases: Vec<BasisInstance> =
        (0..mesh.triangles().len()).map(|i| BasisInstance::new(&mesh.triangle(i))).collect::<Result<_>>()?;
    let coeffs = bases.iter().map(eps_v1_coeffs).collect::<Result<_>>()?;
    Ok((mesh, bases, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_net_is_a_disk() {
        let faces = control_net_faces();
        assert_eq!(faces.len(), 37);
        let sizes = |k: usize| faces.iter().filter(|f| f.len() == k).count();
        assert_eq!((sizes(3), sizes(4), sizes(6)), (21, 15, 1));
        let mut edges: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
        for f in faces {
            for r in 0..f.len() {
                let (a, b) = (f[r], f[(r + 1) % f.len()]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        assert!(edges.values().all(|&c| c <= 2));
        let boundary = edges.values().filter(|&&c| c == 1).count();
        assert_eq!(boundary, 21);
        // Euler characteristic of a disk
        assert_eq!(NUM_BASIS as i64 - edges.len() as i64 + faces.len() as i64, 1);
    }

    #[test]
    fn flat_surface_for_constant_spline() {
        let b = BasisInstance::new(&MacroTriangle::unit()).unwrap();
        let s = SplineFunction::new(&b, [1.0; NUM_BASIS]);
        let m = surface(&s, 4).unwrap();
        assert_eq!(m.vertices.len(), 12 * 15);
        assert_eq!(m.faces.len(), 12 * 16);
        assert!(m.vertices.iter().all(|v| (v[2] - 1.0).abs() < 1e-12));
        m.validate().unwrap();
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 192);
    }

    #[test]
    fn surface_faces_face_up() {
        // clockwise input triangle still yields counterclockwise faces
        let t = MacroTriangle::from_coords([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let b = BasisInstance::new(&t).unwrap();
        let s = SplineFunction::new(&b, [0.0; NUM_BASIS]);
        let m = surface(&s, 2).unwrap();
        for f in &m.faces {
            let [a, b, c] = [f[0], f[1], f[2]].map(|i| Point::new(m.vertices[i][0], m.vertices[i][1]));
            assert!(crate::geometry::signed_area(&a, &b, &c) > 0.0);
        }
    }

    #[test]
    fn wireframe_has_all_split_edges() {
        let b = BasisInstance::new(&MacroTriangle::unit()).unwrap();
        let s = SplineFunction::new(&b, [1.0; NUM_BASIS]);
        let w = wireframe(&s, 3).unwrap();
        // 12 cells in a triangulated disk with 10 vertices: 10 + 12 - 1 = 21 edges
        assert_eq!(w.lines.len(), 21);
        w.validate().unwrap();
    }

    #[test]
    fn coefficient_round_trip() {
        let c = vec![std::array::from_fn(|j| j as f64 * 0.5), [2.0; NUM_BASIS]];
        let mut buf = Vec::new();
        write_coeffs_csv(&mut buf, &c).unwrap();
        assert_eq!(read_coeffs_csv(&buf[..], 2).unwrap(), c);
        assert!(read_coeffs_csv(&buf[..], 3).is_err());
    }

    #[test]
    fn hexagon_nodal_function_peaks_at_the_center() {
        let (mesh, bases, coeffs) = hexagon_eps_v1(1.0).unwrap();
        let mut peak: f64 = 0.0;
        for (b, c) in bases.iter().zip(&coeffs) {
            let s = SplineFunction::new(b, *c);
            assert!((s.eval(&Point::origin()).unwrap() - 1.0).abs() < 1e-9);
            for p in crate::marsden::lattice_points(b.triangle(), 10) {
                peak = peak.max(s.eval(&p).unwrap());
            }
            for v in 1..3 {
                assert!(s.eval(&b.triangle().vertex(v)).unwrap().abs() < 1e-9);
            }
        }
        assert!((peak - 1.0).abs() < 1e-9);
        // continuous across the spokes
        for ((a, bb), (s, t)) in mesh.interior_edges() {
            let (f, g) = (SplineFunction::new(&bases[s], coeffs[s]), SplineFunction::new(&bases[t], coeffs[t]));
            let r = crate::join::verify_edge(&f, &g, &mesh.vertices()[a], &mesh.vertices()[bb], 0).unwrap();
            assert!(r.jumps[0] < 1e-12);
        }
    }
}
