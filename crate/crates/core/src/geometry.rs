//! Macrotriangle geometry: the Powell-Sabin 12-split, its ten split sites,
//! the S3 relabeling action and point location.
//!
//! Site numbering (0-based in code, 1-based in glyph strings):
//!
//! | index | site | definition            |
//! |-------|------|-----------------------|
//! | 0..=2 | v1..v3 | corners             |
//! | 3     | v4   | (v1 + v2) / 2         |
//! | 4     | v5   | (v2 + v3) / 2         |
//! | 5     | v6   | (v3 + v1) / 2         |
//! | 6     | v7   | (v4 + v5) / 2         |
//! | 7     | v8   | (v5 + v6) / 2         |
//! | 8     | v9   | (v6 + v4) / 2         |
//! | 9     | v10  | (v1 + v2 + v3) / 3    |

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};

pub type Point = Point2<f64>;
pub type Vector = Vector2<f64>;

pub const NUM_SITES: usize = 10;
pub const NUM_CELLS: usize = 12;

/// Corner pairs defining the edge midpoints v4, v5, v6.
pub const MIDPOINT_CORNERS: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// The 12 subtriangles as site index triples, in the fixed sweep order used
/// for tie-breaking: first the six cells around the barycenter, counter-
/// clockwise starting at v4, then the two halves of each corner triangle.
pub const CELLS: [[usize; 3]; NUM_CELLS] = [
    [3, 6, 9],
    [6, 4, 9],
    [4, 7, 9],
    [7, 5, 9],
    [5, 8, 9],
    [8, 3, 9],
    [0, 3, 8],
    [0, 8, 5],
    [1, 4, 6],
    [1, 6, 3],
    [2, 5, 7],
    [2, 7, 4],
];

/// Barycentric coordinates with respect to some triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Barycentric(pub [f64; 3]);

impl Barycentric {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub(crate) fn cross(a: Vector, b: Vector) -> f64 {
    a.x * b.y - a.y * b.x
}

pub(crate) fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * cross(b - a, c - a)
}

/// Barycentric coordinates of `p` in the triangle `(a, b, c)`. The triangle
/// must be nondegenerate.
pub(crate) fn barycentric_in(a: &Point, b: &Point, c: &Point, p: &Point) -> [f64; 3] {
    let det = cross(b - a, c - a);
    let l1 = cross(p - a, c - a) / det;
    let l2 = cross(b - a, p - a) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Coordinates of a vector in the barycentric frame of `(a, b, c)`; the
/// components sum to zero.
pub(crate) fn barycentric_direction(a: &Point, b: &Point, c: &Point, u: &Vector) -> [f64; 3] {
    let det = cross(b - a, c - a);
    let m1 = cross(*u, c - a) / det;
    let m2 = cross(b - a, *u) / det;
    [-m1 - m2, m1, m2]
}

/// A triangle `[v1, v2, v3]` carrying a 12-split.
///
/// Vertex labels are preserved as given: the labeling determines the basis
/// ordering, and two triangles sharing an edge must agree on the labels of
/// that edge. Orientation is recorded, and every geometric query is
/// orientation independent.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroTriangle {
    vertices: [Point; 3],
    signed_area: f64,
}

impl MacroTriangle {
    pub fn new(v1: Point, v2: Point, v3: Point) -> Result<Self> {
        let signed_area = signed_area(&v1, &v2, &v3);
        let scale = (v2 - v1).norm().max((v3 - v1).norm()).max((v3 - v2).norm());
        if !signed_area.is_finite() || signed_area.abs() <= 1e-14 * scale * scale {
            return Err(Error::DegenerateTriangle(signed_area));
        }
        Ok(Self { vertices: [v1, v2, v3], signed_area })
    }

    pub fn from_coords(coords: [[f64; 2]; 3]) -> Result<Self> {
        let [a, b, c] = coords.map(|[x, y]| Point::new(x, y));
        Self::new(a, b, c)
    }

    /// The unit right triangle `((0,0), (1,0), (0,1))`.
    pub fn unit() -> Self {
        Self::from_coords([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    pub fn vertices(&self) -> &[Point; 3] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    pub fn area(&self) -> f64 {
        self.signed_area.abs()
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.signed_area > 0.0
    }

    pub fn diameter(&self) -> f64 {
        let [a, b, c] = &self.vertices;
        (b - a).norm().max((c - a).norm()).max((c - b).norm())
    }

    pub fn barycentric(&self, p: &Point) -> Barycentric {
        let [a, b, c] = &self.vertices;
        Barycentric(barycentric_in(a, b, c, p))
    }

    pub fn point(&self, beta: &Barycentric) -> Point {
        let [a, b, c] = &self.vertices;
        let [l0, l1, l2] = beta.0;
        Point::from(a.coords * l0 + b.coords * l1 + c.coords * l2)
    }

    /// Relabel the corners: the result has `vertex(sigma(i)) == self.vertex(i)`.
    pub fn relabel(&self, sigma: &Permutation) -> Self {
        let mut v = self.vertices;
        for i in 0..3 {
            v[sigma.apply(i)] = self.vertices[i];
        }
        Self::new(v[0], v[1], v[2]).expect("relabeling preserves nondegeneracy")
    }

    pub fn sites(&self) -> SplitSites {
        SplitSites::new(self.clone())
    }
}

/// The ten split sites of a macrotriangle together with its 12 cells.
#[derive(Clone, Debug)]
pub struct SplitSites {
    triangle: MacroTriangle,
    points: [Point; NUM_SITES],
}

impl SplitSites {
    pub fn new(triangle: MacroTriangle) -> Self {
        let [v1, v2, v3] = triangle.vertices;
        let mid = |a: Point, b: Point| Point::from((a.coords + b.coords) * 0.5);
        let v4 = mid(v1, v2);
        let v5 = mid(v2, v3);
        let v6 = mid(v3, v1);
        let v7 = mid(v4, v5);
        let v8 = mid(v5, v6);
        let v9 = mid(v6, v4);
        let v10 = Point::from((v1.coords + v2.coords + v3.coords) / 3.0);
        Self { triangle, points: [v1, v2, v3, v4, v5, v6, v7, v8, v9, v10] }
    }

    pub fn triangle(&self) -> &MacroTriangle {
        &self.triangle
    }

    pub fn points(&self) -> &[Point; NUM_SITES] {
        &self.points
    }

    pub fn site(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn barycenter(&self) -> Point {
        self.points[9]
    }

    pub fn cell(&self, k: usize) -> [Point; 3] {
        CELLS[k].map(|i| self.points[i])
    }

    pub fn cell_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.cell(k);
        signed_area(&a, &b, &c).abs()
    }

    pub fn cell_centroid(&self, k: usize) -> Point {
        let [a, b, c] = self.cell(k);
        Point::from((a.coords + b.coords + c.coords) / 3.0)
    }

    /// Barycentric coordinates of `p` with respect to cell `k`.
    pub fn cell_barycentric(&self, k: usize, p: &Point) -> [f64; 3] {
        let [a, b, c] = self.cell(k);
        barycentric_in(&a, &b, &c, p)
    }

    /// Index of the cell containing `p`. Points on shared cell boundaries go
    /// to the first containing cell in [`CELLS`] order.
    pub fn locate(&self, p: &Point) -> Result<usize> {
        const TOL: f64 = 1e-12;
        (0..NUM_CELLS)
            .find(|&k| self.cell_barycentric(k, p).iter().all(|&l| l >= -TOL))
            .ok_or(Error::OutsideTriangle(p.x, p.y))
    }
}

/// A permutation of the corner labels {1, 2, 3}, stored 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Permutation([usize; 3]);

impl Permutation {
    pub const IDENTITY: Permutation = Permutation([0, 1, 2]);

    pub fn new(images: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if i > 2 || seen[i] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation of 0..3")));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    /// All six elements of S3, identity first.
    pub fn all() -> [Permutation; 6] {
        [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]].map(Permutation)
    }

    /// The permutation sending corner `a` to 0 and `b` to 1.
    pub fn sending_to_first_edge(a: usize, b: usize) -> Result<Self> {
        Self::all()
            .into_iter()
            .find(|s| s.apply(a) == 0 && s.apply(b) == 1)
            .ok_or_else(|| Error::InvalidInput(format!("({a}, {b}) is not an edge")))
    }

    pub fn apply(&self, corner: usize) -> usize {
        self.0[corner]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0; 3];
        for i in 0..3 {
            inv[self.0[i]] = i;
        }
        Self(inv)
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self([0, 1, 2].map(|i| self.0[other.0[i]]))
    }

    /// The induced permutation of the ten split sites.
    pub fn site_map(&self) -> [usize; NUM_SITES] {
        let s = &self.0;
        let midpoint = |a: usize, b: usize| -> usize {
            let pos = MIDPOINT_CORNERS.iter().position(|&[x, y]| (x == a && y == b) || (x == b && y == a)).unwrap();
            3 + pos
        };
        // v7, v8, v9 sit on the medians from v2, v3, v1 respectively.
        let medial = |corner: usize| -> usize { [8, 6, 7][corner] };
        [
            s[0],
            s[1],
            s[2],
            midpoint(s[0], s[1]),
            midpoint(s[1], s[2]),
            midpoint(s[2], s[0]),
            medial(s[1]),
            medial(s[2]),
            medial(s[0]),
            9,
        ]
    }
}
