//! Command-line front end for the ps12 spline library.

mod targets;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ps12::basis::SplineFunction;
use ps12::classify::theorem1_list;
use ps12::export::{self, ObjMesh};
use ps12::join::{constraints, MAX_JOIN_ORDER};
use ps12::marsden::lattice_points;
use ps12::mesh::{convergence_study, fit, FitMode, FitResult, Triangulation};
use ps12::suite::{run_criterion, study_triangle, NUM_CRITERIA};
use ps12::{Barycentric, BasisInstance, MacroTriangle, NUM_BASIS};

#[derive(Parser)]
#[command(name = "ps12", version, about = "C3 quintic simplex splines on the Powell-Sabin 12-split")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the S3 classes of admissible simplex splines, one per line.
    Classify {
        #[arg(long, default_value_t = 5)]
        degree: usize,
        /// Also print the orbit size of each class.
        #[arg(long)]
        orbits: bool,
    },
    /// Run the property suite; exits with status 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Run only these criteria (1-based, comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Evaluate a coefficient file at the points of a CSV file.
    Eval {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        coeffs: PathBuf,
        /// CSV with header `x,y`.
        #[arg(long)]
        points: PathBuf,
        /// Output CSV (`x,y,value`); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasi-interpolate a built-in function on a mesh.
    Fit {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long, value_enum, default_value_t = Mode::Independent)]
        mode: Mode,
        /// Write the coefficient file here.
        #[arg(long)]
        coeffs_out: Option<PathBuf>,
    },
    /// Errors of the quasi-interpolant on successively 4-split meshes.
    Converge {
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Base triangle as `x1,y1,x2,y2,x3,y3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        triangle: Option<Vec<f64>>,
    },
    /// Print the smoothness conditions across an edge: row i gives the
    /// neighbour's ordinate c~i in terms of c1..c39.
    Joins {
        /// Barycentric coordinates of the neighbour's third vertex.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Print only the nonzero entries of each row.
        #[arg(long)]
        sparse: bool,
    },
    /// Write surface, wireframe and control-net OBJ files and a surface CSV.
    Export {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, conflicts_with = "hexagon")]
        mesh: Option<PathBuf>,
        /// Coefficient file for `--mesh`.
        #[arg(long, requires = "mesh", conflicts_with = "function")]
        coeffs: Option<PathBuf>,
        /// Quasi-interpolate this built-in function on `--mesh` instead.
        #[arg(long, requires = "mesh")]
        function: Option<String>,
        /// The corner nodal function on a regular hexagon.
        #[arg(long)]
        hexagon: bool,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 8)]
        resolution: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Independent,
    C1,
    C2,
}

impl From<Mode> for FitMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Independent => FitMode::Independent,
            Mode::C1 => FitMode::C1,
            Mode::C2 => FitMode::C2,
        }
    }
}

enum Failure {
    Verification(String),
    Input(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<ps12::Error> for Failure {
    fn from(e: ps12::Error) -> Self {
        match e {
            ps12::Error::Io(e) => Failure::Io(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Io(m) => eprintln!("I/O error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("PS12_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("PS12_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("PS12_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Classify { degree, orbits } => classify(degree, orbits),
        Command::Verify { seed, only } => verify(seed, &only),
        Command::Eval { mesh, coeffs, points, out } => eval(&mesh, &coeffs, &points, out.as_deref()),
        Command::Fit { mesh, function, mode, coeffs_out } => {
            fit_cmd(&mesh, &function, mode.into(), coeffs_out.as_deref())
        }
        Command::Converge { function, levels, triangle } => converge(&function, levels, triangle.as_deref()),
        Command::Joins { beta, order, sparse } => joins(&beta, order, sparse),
        Command::Export { out, mesh, coeffs, function, hexagon, radius, resolution } => {
            export_cmd(&out, mesh.as_deref(), coeffs.as_deref(), function.as_deref(), hexagon, radius, resolution)
        }
    }
}

fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn classify(degree: usize, orbits: bool) -> Outcome {
    if degree != 5 {
        return Err(Failure::Input(format!("only degree 5 is supported, got {degree}")));
    }
    let mut w = stdout();
    for c in theorem1_list()? {
        if orbits {
            writeln!(w, "{}\t{}", c.representative, c.orbit_size)?;
        } else {
            writeln!(w, "{}", c.representative)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn verify(seed: u64, only: &[usize]) -> Outcome {
    if let Some(bad) = only.iter().find(|&&i| !(1..=NUM_CRITERIA).contains(&i)) {
        return Err(Failure::Input(format!("criterion {bad} out of range 1..={NUM_CRITERIA}")));
    }
    let ids: Vec<usize> = if only.is_empty() { (1..=NUM_CRITERIA).collect() } else { only.to_vec() };
    let mut failed = Vec::new();
    for id in ids {
        let r = run_criterion(id, seed);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("criteria {failed:?}")))
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_mesh(path: &Path) -> Result<Triangulation, Failure> {
    Triangulation::load(path).map_err(|e| match e {
        ps12::Error::Io(e) => Failure::Io(format!("{}: {e}", path.display())),
        e => Failure::Input(format!("{}: {e}", path.display())),
    })
}

fn load_spline_data(
    mesh: &Triangulation,
    coeffs: &Path,
) -> Result<(Vec<BasisInstance>, Vec<[f64; NUM_BASIS]>), Failure> {
    let c = export::read_coeffs_csv(open(coeffs)?, mesh.triangles().len())?;
    let bases =
        (0..mesh.triangles().len()).map(|i| BasisInstance::new(&mesh.triangle(i))).collect::<ps12::Result<_>>()?;
    Ok((bases, c))
}

fn target(name: &str) -> Result<&'static targets::Target, Failure> {
    targets::lookup(name)
        .ok_or_else(|| Failure::Input(format!("unknown function {name:?}; available: {}", targets::names())))
}

fn eval(mesh: &Path, coeffs: &Path, points: &Path, out: Option<&Path>) -> Outcome {
    let mesh = load_mesh(mesh)?;
    let (bases, c) = load_spline_data(&mesh, coeffs)?;
    let points = export::read_points_csv(open(points)?)?;
    let mut rows = Vec::with_capacity(points.len());
    for p in &points {
        let i = mesh.locate(p).ok_or(ps12::Error::OutsideTriangle(p.x, p.y))?;
        rows.push((p.x, p.y, SplineFunction::new(&bases[i], c[i]).eval(p)?));
    }
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["x", "y", "value"]).map_err(csv_failure)?;
    for r in rows {
        w.serialize(r).map_err(csv_failure)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn fit_cmd(mesh: &Path, function: &str, mode: FitMode, coeffs_out: Option<&Path>) -> Outcome {
    let mesh = load_mesh(mesh)?;
    let f = target(function)?.f;
    let r = fit(&mesh, &f, mode)?;
    print_fit(&mesh, &r)?;
    if let Some(path) = coeffs_out {
        let coeffs: Vec<_> = r.triangles.iter().map(|t| t.coeffs).collect();
        let mut w = create(path)?;
        export::write_coeffs_csv(&mut w, &coeffs)?;
        w.flush()?;
    }
    Ok(())
}

fn print_fit(mesh: &Triangulation, r: &FitResult) -> io::Result<()> {
    let mut w = stdout();
    writeln!(w, "triangles {}  vertices {}  mode {:?}", mesh.triangles().len(), mesh.vertices().len(), r.mode)?;
    writeln!(w, "max error {:.3e}  (max |f| {:.3e})", r.max_error, r.scale)?;
    if !r.edges.is_empty() {
        writeln!(
            w,
            "{:>6} {:>6} {:>10} {:>10} {:>10} {:>10}",
            "edge", "", "C0 jump", "C1 jump", "C2 jump", "propagated"
        )?;
        for e in &r.edges {
            writeln!(
                w,
                "{:>6} {:>6} {:>10.2e} {:>10.2e} {:>10.2e} {:>10}",
                e.vertices.0, e.vertices.1, e.jumps[0], e.jumps[1], e.jumps[2], e.propagated
            )?;
        }
    }
    let cycles = r.over_constrained();
    if !cycles.is_empty() {
        writeln!(w, "{} edge(s) close a cycle and are not propagated", cycles.len())?;
    }
    w.flush()
}

fn converge(function: &str, levels: usize, triangle: Option<&[f64]>) -> Outcome {
    let f = target(function)?.f;
    let base = match triangle {
        None => study_triangle(),
        Some(&[x1, y1, x2, y2, x3, y3]) => MacroTriangle::from_coords([[x1, y1], [x2, y2], [x3, y3]])?,
        Some(v) => return Err(Failure::Input(format!("--triangle needs 6 numbers, got {}", v.len()))),
    };
    let study = convergence_study(&f, &base, levels)?;
    let size = lattice_points(&base, 20).iter().map(|p| f(p).abs()).fold(1.0, f64::max);
    let floor = 1e-11 * size;
    let mut w = stdout();
    writeln!(w, "{:>12} {:>12} {:>8}", "h", "error", "order")?;
    for (k, (h, e)) in study.hs.iter().zip(&study.errors).enumerate() {
        let order = match k {
            0 => String::new(),
            _ if *e <= floor && study.errors[k - 1] <= floor => "exact".into(),
            _ => format!("{:.2}", study.orders[k - 1]),
        };
        writeln!(w, "{h:>12.6} {e:>12.4e} {order:>8}")?;
    }
    w.flush()?;
    Ok(())
}

fn joins(beta: &[f64], order: usize, sparse: bool) -> Outcome {
    let &[b1, b2, b3] = beta else {
        return Err(Failure::Input(format!("--beta needs 3 numbers, got {}", beta.len())));
    };
    if (b1 + b2 + b3 - 1.0).abs() > 1e-9 {
        return Err(Failure::Input(format!("beta must sum to 1, got {}", b1 + b2 + b3)));
    }
    if b3 == 0.0 {
        return Err(Failure::Input("beta3 = 0 puts the neighbour's vertex on the shared edge".into()));
    }
    if order > MAX_JOIN_ORDER {
        return Err(Failure::Input(format!("order {order} exceeds {MAX_JOIN_ORDER}")));
    }
    let k = constraints(&Barycentric([b1, b2, b3]), order)?;
    let mut w = stdout();
    for (target, row) in &k.rows {
        let label = format!("c~{}", target + 1);
        if sparse {
            let mut expr = String::new();
            for (j, v) in row.iter().enumerate().filter(|(_, v)| **v != 0.0) {
                let sign = if v < &0.0 { "-" } else { "+" };
                if expr.is_empty() {
                    expr = format!("{}{} c{}", if v < &0.0 { "-" } else { "" }, fmt_num(v.abs()), j + 1);
                } else {
                    expr += &format!(" {sign} {} c{}", fmt_num(v.abs()), j + 1);
                }
            }
            writeln!(w, "{label:>5} = {expr}")?;
        } else {
            let cols: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
            writeln!(w, "{label:>5} = [{}]", cols.join(", "))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fmt_num(v: f64) -> String {
    if v == v.round() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.12}").trim_end_matches('0').to_string()
    }
}

fn export_cmd(
    out: &Path,
    mesh: Option<&Path>,
    coeffs: Option<&Path>,
    function: Option<&str>,
    hexagon: bool,
    radius: f64,
    resolution: usize,
) -> Outcome {
    if resolution == 0 {
        return Err(Failure::Input("resolution must be at least 1".into()));
    }
    let (bases, c) = match (mesh, hexagon) {
        (_, true) => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Failure::Input(format!("radius must be positive, got {radius}")));
            }
            let (_, bases, c) = export::hexagon_eps_v1(radius)?;
            (bases, c)
        }
        (Some(path), false) => {
            let mesh = load_mesh(path)?;
            match (coeffs, function) {
                (Some(coeffs), _) => load_spline_data(&mesh, coeffs)?,
                (None, Some(name)) => {
                    let f = target(name)?.f;
                    let r = fit(&mesh, &f, FitMode::Independent)?;
                    r.triangles.into_iter().map(|t| (t.basis, t.coeffs)).unzip()
                }
                (None, None) => return Err(Failure::Input("--mesh needs --coeffs or --function".into())),
            }
        }
        (None, false) => return Err(Failure::Input("give --mesh or --hexagon".into())),
    };
    let splines: Vec<SplineFunction> = bases.iter().zip(&c).map(|(b, c)| SplineFunction::new(b, *c)).collect();
    let surface =
        export::combine(splines.iter().map(|s| export::surface(s, resolution)).collect::<ps12::Result<Vec<_>>>()?);
    let wire =
        export::combine(splines.iter().map(|s| export::wireframe(s, resolution)).collect::<ps12::Result<Vec<_>>>()?);
    let net = export::combine(splines.iter().map(export::control_net));
    std::fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    let write_obj = |name: &str, m: &ObjMesh| -> Outcome {
        m.validate()?;
        let mut w = create(&out.join(name))?;
        m.write_obj(&mut w)?;
        w.flush()?;
        Ok(())
    };
    write_obj("surface.obj", &surface)?;
    write_obj("wireframe.obj", &wire)?;
    write_obj("control_net.obj", &net)?;
    let mut w = create(&out.join("surface.csv"))?;
    surface.write_csv(&mut w)?;
    w.flush()?;
    println!(
        "wrote {} ({} vertices, {} faces), wireframe.obj, control_net.obj, surface.csv",
        out.join("surface.obj").display(),
        surface.vertices.len(),
        surface.faces.len()
    );
    Ok(())
}
