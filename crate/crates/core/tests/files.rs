//! Mesh and coefficient files on disk.

use std::fs;

use ps12::export::{read_coeffs_csv, write_coeffs_csv};
use ps12::mesh::{fit, FitMode, Triangulation};
use ps12::{Error, Point};

#[test]
fn json_and_off_meshes_load_identically() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("square.json");
    fs::write(&json, r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]], "triangles": [[0,1,2],[0,2,3]]}"#).unwrap();
    let off = dir.path().join("square.off");
    fs::write(&off, "OFF\n# unit square\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n").unwrap();
    let (a, b) = (Triangulation::load(&json).unwrap(), Triangulation::load(&off).unwrap());
    assert_eq!(a.vertices(), b.vertices());
    assert_eq!(a.triangles(), b.triangles());
    assert_eq!(a.interior_edges().len(), 1);
    // the JSON writer round-trips
    assert_eq!(Triangulation::from_json(&a.to_json()).unwrap().triangles(), a.triangles());
}

#[test]
fn missing_mesh_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(Triangulation::load(&dir.path().join("none.json")), Err(Error::Io(_))));
}

#[test]
fn coefficients_round_trip_through_csv() {
    let mesh =
        Triangulation::from_json(r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]], "triangles": [[0,1,2],[0,2,3]]}"#).unwrap();
    let f = |p: &Point| (p.x - 0.3 * p.y).cos();
    let r = fit(&mesh, &f, FitMode::C2).unwrap();
    let coeffs: Vec<_> = r.triangles.iter().map(|t| t.coeffs).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    write_coeffs_csv(fs::File::create(&path).unwrap(), &coeffs).unwrap();
    let back = read_coeffs_csv(fs::File::open(&path).unwrap(), 2).unwrap();
    assert_eq!(back, coeffs);
    // a file for fewer triangles is rejected
    assert!(read_coeffs_csv(fs::File::open(&path).unwrap(), 3).is_err());
    assert!(read_coeffs_csv(fs::File::open(&path).unwrap(), 1).is_err());
}
