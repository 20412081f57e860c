use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ps12(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ps12")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TWO_TRIANGLES: &str = r#"{"vertices": [[0,0],[1,0],[0.3,0.9],[0.9,-0.8]], "triangles": [[0,1,2],[1,0,3]]}"#;

fn write_mesh(dir: &Path) -> String {
    let p = dir.join("mesh.json");
    fs::write(&p, TWO_TRIANGLES).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn classify_prints_twenty_classes() {
    let o = ps12(&["classify", "--degree", "5"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 20);
    assert_eq!(lines[0], "600101");
    assert!(lines.iter().all(|l| l.len() == 6 && l.bytes().all(|b| b.is_ascii_digit())));
    assert_eq!(ps12(&["classify", "--degree", "4"]).status.code(), Some(2));
}

#[test]
fn joins_first_order_row() {
    let o = ps12(&["joins", "--beta", "-1,1,1", "--order", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 15);
    let row9 = out.lines().find(|l| l.trim_start().starts_with("c~9 ")).unwrap();
    let mut expected = vec!["0"; 39];
    (expected[0], expected[1], expected[8]) = ("-1", "1", "1");
    assert!(row9.ends_with(&format!("[{}]", expected.join(", "))), "{row9}");
}

#[test]
fn joins_rejects_bad_beta() {
    assert_eq!(ps12(&["joins", "--beta", "0.5,0.5,0.5"]).status.code(), Some(2));
    assert_eq!(ps12(&["joins", "--beta", "1,2"]).status.code(), Some(2));
    assert_eq!(ps12(&["joins", "--beta", "0.2,0.5,0.3", "--order", "3"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let a = ps12(&["verify", "--seed", "42", "--only", "2,3,8"]);
    let b = ps12(&["verify", "--seed", "42", "--only", "2,3,8"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    assert_eq!(ps12(&["verify", "--only", "12"]).status.code(), Some(2));
}

#[test]
fn fit_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_mesh(dir.path());
    let coeffs = dir.path().join("c.csv");
    let o = ps12(&[
        "fit",
        "--mesh",
        &mesh,
        "--function",
        "quintic",
        "--mode",
        "c2",
        "--coeffs-out",
        coeffs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("mode C2"));
    let points = dir.path().join("p.csv");
    fs::write(&points, "x,y\n0.4,0.3\n0.5,-0.2\n").unwrap();
    let o =
        ps12(&["eval", "--mesh", &mesh, "--coeffs", coeffs.to_str().unwrap(), "--points", points.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,y,value"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (x, y) = (v[0], v[1]);
        let exact = x.powi(5) - 2.0 * x * x * y.powi(3) + x * y + 1.0;
        assert!((v[2] - exact).abs() < 1e-9, "{line}");
    }
}

#[test]
fn eval_outside_the_mesh_is_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_mesh(dir.path());
    let coeffs = dir.path().join("c.csv");
    assert!(ps12(&["fit", "--mesh", &mesh, "--function", "one", "--coeffs-out", coeffs.to_str().unwrap()])
        .status
        .success());
    let points = dir.path().join("p.csv");
    fs::write(&points, "x,y\n5,5\n").unwrap();
    let o =
        ps12(&["eval", "--mesh", &mesh, "--coeffs", coeffs.to_str().unwrap(), "--points", points.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_files_are_io_errors() {
    let o = ps12(&["fit", "--mesh", "/nonexistent/mesh.json", "--function", "one"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_mesh_and_function_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"vertices": [[0,0],[1,0]], "triangles": [[0,1,2]]}"#).unwrap();
    assert_eq!(ps12(&["fit", "--mesh", bad.to_str().unwrap(), "--function", "one"]).status.code(), Some(2));
    let mesh = write_mesh(dir.path());
    assert_eq!(ps12(&["fit", "--mesh", &mesh, "--function", "nope"]).status.code(), Some(2));
}

#[test]
fn off_meshes_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mesh.off");
    fs::write(&p, "OFF\n4 2 0\n0 0 0\n1 0 0\n0.3 0.9 0\n0.9 -0.8 0\n3 0 1 2\n3 1 0 3\n").unwrap();
    let o = ps12(&["fit", "--mesh", p.to_str().unwrap(), "--function", "sin-exp", "--mode", "c1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn converge_marks_quintics_exact() {
    let o = ps12(&["converge", "--function", "quintic", "--levels", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 5);
    assert_eq!(out.matches("exact").count(), 3);
    assert_eq!(ps12(&["converge", "--function", "quintic", "--levels", "2"]).status.code(), Some(2));
}

#[test]
fn converge_sin_exp_has_order_six() {
    let o = ps12(&["converge", "--function", "sin-exp", "--levels", "3"]);
    let out = stdout(&o);
    let last: f64 = out.lines().last().unwrap().split_whitespace().last().unwrap().parse().unwrap();
    assert!((last - 6.0).abs() <= 0.3, "{out}");
}

fn parse_obj(text: &str) -> (Vec<[f64; 3]>, Vec<Vec<usize>>) {
    let (mut v, mut f) = (Vec::new(), Vec::new());
    for line in text.lines() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts.map(|s| s.parse().unwrap()).collect();
                v.push([c[0], c[1], c[2]]);
            }
            Some("f") => f.push(parts.map(|s| s.parse::<usize>().unwrap()).collect()),
            _ => {}
        }
    }
    (v, f)
}

#[test]
fn export_hexagon_peaks_at_the_center() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hex");
    let o = ps12(&["export", "--out", out.to_str().unwrap(), "--hexagon", "--resolution", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["surface.obj", "wireframe.obj", "control_net.obj", "surface.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let (v, f) = parse_obj(&fs::read_to_string(out.join("surface.obj")).unwrap());
    assert_eq!(v.len(), 6 * 12 * 28);
    assert_eq!(f.len(), 6 * 12 * 36);
    assert!(f.iter().flatten().all(|&i| i >= 1 && i <= v.len()));
    assert!(v.iter().all(|p| p.iter().all(|c| c.is_finite())));
    let peak = v.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((peak[2] - 1.0).abs() < 1e-9 && peak[0].hypot(peak[1]) < 1e-12, "{peak:?}");
}

#[test]
fn export_from_mesh_and_function() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = write_mesh(dir.path());
    let out = dir.path().join("out");
    let o =
        ps12(&["export", "--out", out.to_str().unwrap(), "--mesh", &mesh, "--function", "one", "--resolution", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (v, _) = parse_obj(&fs::read_to_string(out.join("surface.obj")).unwrap());
    assert!(v.iter().all(|p| (p[2] - 1.0).abs() < 1e-12));
    let (net, faces) = parse_obj(&fs::read_to_string(out.join("control_net.obj")).unwrap());
    assert_eq!((net.len(), faces.len()), (2 * 39, 2 * 37));
    assert_eq!(ps12(&["export", "--out", out.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        ps12(&["export", "--out", out.to_str().unwrap(), "--hexagon", "--resolution", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ps12")).args(["classify"]).env("PS12_THREADS", "1").output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 20);
    let o = Command::new(env!("CARGO_BIN_EXE_ps12")).args(["classify"]).env("PS12_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
