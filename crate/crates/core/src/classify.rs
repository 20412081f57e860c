//! Which quintic simplex splines with knots at the corners and edge
//! midpoints are C3 on the 12-split and reduce to an edge B-spline (or zero)
//! on every boundary edge.
//!
//! A combinatorial rule on knot-line multiplicities is checked against a
//! numeric oracle built from the exact piecewise form.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bspline::{edge_bspline, EDGE_DIM};
use crate::error::{Error, Result};
use crate::geometry::{MacroTriangle, Point, SplitSites, Vector, CELLS, NUM_CELLS};
use crate::multiplicity::{MultiplicityVector, NUM_PRIMARY_SITES};
use crate::piecewise::PiecewisePoly;
use crate::simplex::KnotMultiset;

const DEGREE: usize = 5;
const TOTAL_KNOTS: usize = DEGREE + 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LineKind {
    Boundary,
    MedialEdge,
    Median,
}

/// A line of the split through at least two of the six primary sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnotLine {
    pub kind: LineKind,
    /// Primary sites on the line, 0-based; boundary edges list (corner, midpoint, corner).
    pub sites: &'static [usize],
}

pub const KNOT_LINES: [KnotLine; 9] = [
    KnotLine { kind: LineKind::Boundary, sites: &[0, 3, 1] },
    KnotLine { kind: LineKind::Boundary, sites: &[1, 4, 2] },
    KnotLine { kind: LineKind::Boundary, sites: &[2, 5, 0] },
    KnotLine { kind: LineKind::MedialEdge, sites: &[3, 4] },
    KnotLine { kind: LineKind::MedialEdge, sites: &[4, 5] },
    KnotLine { kind: LineKind::MedialEdge, sites: &[5, 3] },
    KnotLine { kind: LineKind::Median, sites: &[0, 4] },
    KnotLine { kind: LineKind::Median, sites: &[1, 5] },
    KnotLine { kind: LineKind::Median, sites: &[2, 3] },
];

impl KnotLine {
    pub fn multiplicity(&self, m: &MultiplicityVector) -> usize {
        self.sites.iter().map(|&s| m.get(s) as usize).sum()
    }

    /// Active if at least two distinct sites on it carry knots.
    pub fn is_active(&self, m: &MultiplicityVector) -> bool {
        self.sites.iter().filter(|&&s| m.get(s) > 0).count() >= 2
    }
}

impl fmt::Display for KnotLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.sites.iter().map(|s| format!("v{}", s + 1)).collect();
        write!(f, "{}", names.join("-"))
    }
}

/// Smoothness across each knot line: `Some(5 + 1 - mu)` for active lines,
/// `None` where the line carries no constraint.
pub fn smoothness_class(m: &MultiplicityVector) -> Result<[Option<i32>; 9]> {
    check_candidate(m)?;
    Ok(KNOT_LINES.map(|l| l.is_active(m).then(|| (DEGREE + 1) as i32 - l.multiplicity(m) as i32)))
}

fn check_candidate(m: &MultiplicityVector) -> Result<()> {
    if m.total() != TOTAL_KNOTS {
        return Err(Error::InvalidMultiplicity(format!("{m} has {} knots, expected {TOTAL_KNOTS}", m.total())));
    }
    if is_collinear(m) {
        return Err(Error::CollinearKnots);
    }
    Ok(())
}

fn is_collinear(m: &MultiplicityVector) -> bool {
    let used: Vec<usize> = (0..NUM_PRIMARY_SITES).filter(|&s| m.get(s) > 0).collect();
    used.len() < 2 || KNOT_LINES.iter().any(|l| used.iter().all(|s| l.sites.contains(s)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Reason {
    Admissible,
    Collinear,
    /// An interior line carries more than three knots.
    InteriorLine {
        line: String,
        mu: usize,
    },
    /// A boundary edge restriction is nonzero but not an edge B-spline.
    BoundaryEdge {
        line: String,
        pattern: [u8; 3],
    },
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::Admissible => write!(f, "admissible"),
            Reason::Collinear => write!(f, "all knots collinear"),
            Reason::InteriorLine { line, mu } => write!(f, "interior line {line} has {mu} knots (C{})", 6 - *mu as i32),
            Reason::BoundaryEdge { line, pattern } => {
                write!(f, "edge {line} pattern {:?} is not 7 consecutive knots of the edge space", pattern)
            }
        }
    }
}

/// Whether the edge pattern (corner, midpoint, corner) is seven consecutive
/// knots of `{0^6, 1/2^2, 1^6}` (or carries too few knots to be nonzero).
fn edge_pattern_ok(p: [u8; 3]) -> bool {
    match p.iter().map(|&x| x as usize).sum::<usize>() {
        0..=6 => true,
        7 => p[1] == 2 || p == [6, 1, 0] || p == [0, 1, 6],
        _ => false,
    }
}

/// The combinatorial verdict.
pub fn is_admissible(m: &MultiplicityVector) -> Result<(bool, Reason)> {
    if m.total() != TOTAL_KNOTS {
        return Err(Error::InvalidMultiplicity(format!("{m} has {} knots, expected {TOTAL_KNOTS}", m.total())));
    }
    if is_collinear(m) {
        return Ok((false, Reason::Collinear));
    }
    for l in &KNOT_LINES {
        match l.kind {
            LineKind::Boundary => {
                let pattern = [l.sites[0], l.sites[1], l.sites[2]].map(|s| m.get(s));
                if !edge_pattern_ok(pattern) {
                    return Ok((false, Reason::BoundaryEdge { line: l.to_string(), pattern }));
                }
            }
            _ => {
                let mu = l.multiplicity(m);
                if l.is_active(m) && mu > 3 {
                    return Ok((false, Reason::InteriorLine { line: l.to_string(), mu }));
                }
            }
        }
    }
    Ok((true, Reason::Admissible))
}

/// Measurements behind the numeric verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericCheck {
    /// Largest relative jump of orders 0..=3 across interior cell edges.
    pub interior_jumps: [f64; 4],
    /// Per boundary edge: `None` if the restriction vanishes, otherwise the
    /// best-matching edge B-spline and its relative misfit.
    pub edges: [Option<(usize, f64)>; 3],
}

const JUMP_TOL: f64 = 1e-7;
const EDGE_TOL: f64 = 1e-8;
const LINE_SAMPLES: usize = 20;
const EDGE_SAMPLES: usize = 64;

impl NumericCheck {
    pub fn admissible(&self) -> bool {
        self.interior_jumps.iter().all(|&j| j <= JUMP_TOL) && self.edges.iter().flatten().all(|&(_, e)| e <= EDGE_TOL)
    }
}

/// Pairs of cells sharing an edge, with the shared sites.
fn interior_cell_edges() -> Vec<(usize, usize, [usize; 2])> {
    let mut out = Vec::new();
    for (a, ca) in CELLS.iter().enumerate() {
        for (b, cb) in CELLS.iter().enumerate().skip(a + 1) {
            let shared: Vec<usize> = ca.iter().copied().filter(|s| cb.contains(s)).collect();
            if shared.len() == 2 {
                out.push((a, b, [shared[0], shared[1]]));
            }
        }
    }
    out
}

/// Sample the exact piecewise form: derivative jumps across all interior
/// cell edges, and the restriction to each boundary edge against the eight
/// edge B-splines.
pub fn numeric_check(sites: &SplitSites, m: &MultiplicityVector) -> Result<NumericCheck> {
    check_candidate(m)?;
    let pw = PiecewisePoly::compile(sites, &KnotMultiset::from_sites(sites, m))?;
    let mut jumps = [0.0f64; 4];
    let mut size = [0.0f64; 4];
    for (a, b, [s, t]) in interior_cell_edges() {
        let (ps, pt) = (sites.site(s), sites.site(t));
        let tangent = (pt - ps).normalize();
        let normal = Vector::new(-tangent.y, tangent.x);
        for k in 0..LINE_SAMPLES {
            let u = (k as f64 + 0.5) / LINE_SAMPLES as f64;
            let p = Point::from(ps.coords * (1.0 - u) + pt.coords * u);
            for (ord, (jump, sz)) in jumps.iter_mut().zip(size.iter_mut()).enumerate() {
                let dirs = vec![normal; ord];
                let (fa, fb) = (pw.directional_cell(sites, a, &dirs, &p), pw.directional_cell(sites, b, &dirs, &p));
                *jump = jump.max((fa - fb).abs());
                *sz = sz.max(fa.abs()).max(fb.abs());
            }
        }
    }
    // Floor the per-order scale so that derivatives vanishing on every
    // sampled edge do not turn roundoff into relative jumps.
    let pmax =
        (0..NUM_CELLS).map(|k| pw.cell(k).coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
    let diam = sites.triangle().diameter();
    let interior_jumps = std::array::from_fn(|k| {
        let s = size[k].max(pmax / diam.powi(k as i32));
        if s > 0.0 {
            jumps[k] / s
        } else {
            0.0
        }
    });
    let edges = std::array::from_fn(|e| edge_match(sites, &pw, KNOT_LINES[e].sites[0], KNOT_LINES[e].sites[2]));
    Ok(NumericCheck { interior_jumps, edges })
}

fn edge_match(sites: &SplitSites, pw: &PiecewisePoly, a: usize, b: usize) -> Option<(usize, f64)> {
    let (pa, pb) = (sites.site(a), sites.site(b));
    let ts: Vec<f64> = (0..EDGE_SAMPLES).map(|k| (k as f64 + 0.5) / EDGE_SAMPLES as f64).collect();
    let vals: Vec<f64> = ts
        .iter()
        .map(|&t| pw.eval(sites, &Point::from(pa.coords * (1.0 - t) + pb.coords * t)).unwrap_or(0.0))
        .collect();
    let vmax = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let interior_max =
        (0..NUM_CELLS).map(|k| pw.cell(k).coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
    if vmax <= 1e-12 * interior_max.max(f64::MIN_POSITIVE) {
        return None;
    }
    (0..EDGE_DIM)
        .map(|i| {
            // least-squares scale, then relative misfit
            let n: Vec<f64> = ts.iter().map(|&t| edge_bspline(i, t)).collect();
            let nn: f64 = n.iter().map(|x| x * x).sum();
            let s = vals.iter().zip(&n).map(|(v, x)| v * x).sum::<f64>() / nn;
            let err = vals.iter().zip(&n).map(|(v, x)| (v - s * x).abs()).fold(0.0, f64::max) / vmax;
            (i, err)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

/// Combinatorial and numeric verdicts for one candidate.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    #[serde(serialize_with = "display")]
    pub m: MultiplicityVector,
    pub admissible: bool,
    pub reason: Reason,
    pub numeric: Option<NumericCheck>,
}

fn display<S: serde::Serializer>(m: &MultiplicityVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(m)
}

/// All `m` with eight knots on the six primary sites.
pub fn candidates() -> Vec<MultiplicityVector> {
    let mut out = Vec::new();
    let mut cur = [0u8; NUM_PRIMARY_SITES];
    fn rec(i: usize, left: u8, cur: &mut [u8; NUM_PRIMARY_SITES], out: &mut Vec<MultiplicityVector>) {
        if i == NUM_PRIMARY_SITES - 1 {
            cur[i] = left;
            out.push(MultiplicityVector(*cur));
            return;
        }
        for v in (0..=left).rev() {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
    }
    rec(0, TOTAL_KNOTS as u8, &mut cur, &mut out);
    out
}

/// Classify every candidate, in parallel. Collinear candidates get no
/// numeric check. Fails if the two verdicts disagree anywhere.
pub fn classify_all() -> Result<Vec<Classification>> {
    let sites = MacroTriangle::unit().sites();
    let out: Vec<Classification> = candidates()
        .par_iter()
        .map(|m| {
            let (admissible, reason) = is_admissible(m)?;
            let numeric = if reason == Reason::Collinear { None } else { Some(numeric_check(&sites, m)?) };
            if let Some(n) = &numeric {
                if n.admissible() != admissible {
                    return Err(Error::ClassificationMismatch(format!(
                        "{m}: rule says {admissible} ({reason}), sampling says {} ({n:?})",
                        n.admissible()
                    )));
                }
            }
            Ok(Classification { m: *m, admissible, reason, numeric })
        })
        .collect::<Result<_>>()?;
    Ok(out)
}

/// One S3 class of admissible splines.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitClass {
    #[serde(serialize_with = "display")]
    pub representative: MultiplicityVector,
    pub orbit_size: usize,
}

/// Admissible classes, each represented by its lexicographically greatest
/// member, sorted in decreasing order.
pub fn theorem1_list() -> Result<Vec<OrbitClass>> {
    let mut reps: Vec<MultiplicityVector> =
        classify_all()?.into_iter().filter(|c| c.admissible).map(|c| c.m.canonical()).collect();
    reps.sort_unstable_by(|a, b| b.cmp(a));
    reps.dedup();
    Ok(reps.into_iter().map(|m| OrbitClass { representative: m, orbit_size: m.orbit().len() }).collect())
}

/// The classes as listed in the literature.
pub const ADMISSIBLE_CLASSES: [&str; 20] = [
    "600101", "500201", "501200", "410102", "410201", "320201", "220211", "422000", "332000", "412100", "322100",
    "141110", "132110", "222110", "221111", "411200", "321200", "131210", "221210", "121211",
];
