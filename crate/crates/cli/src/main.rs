use clap::{Parser, Subcommand, ValueEnum};
use framelab::cellcomplex::{build_g42, build_g52, surface_report, Complex2};
use framelab::grassmann::{complement, frame_from_gram, gram, holonomy_sign, HOLONOMY_STEP};
use framelab::io::{FrameJson, GramJson, LoopJson, PartitionJson, PathJson};
use framelab::planar::{connect_to_standard, lift_path, to_planar, validate_path};
use framelab::sampling::{random_stf, rng};
use framelab::stratification::{
    check_block_cardinalities, commutant_partition, construct_regular_point, expected_dimensions, harmonic_frame,
    tangent_report,
};
use framelab::{AnyFrame, AnyGram, EllipsoidSpec, Field, Frame, Scalar};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "framelab", version, about = "Spherical and ellipsoidal tight frames")]
struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, env = "FRAMELAB_TOL", default_value_t = framelab::DEFAULT_TOL)]
    tol: f64,

    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest coordinate move between consecutive path samples.
    #[arg(long, global = true, default_value_t = framelab::DEFAULT_MAX_STEP)]
    max_step: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    G42,
    G52,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Frame bounds, tightness, sphericity and ellipsoid membership.
    Verify {
        frame: String,
        /// Comma-separated ellipsoid weights, descending (default: unit sphere).
        #[arg(long, value_delimiter = ',')]
        axes: Option<Vec<f64>>,
    },
    /// Gram point of a spherical tight frame.
    Gram { frame: String },
    /// Naimark complement of a Gram point.
    Complement { gram: String },
    /// A frame realizing a Gram point.
    FrameFromGram { gram: String },
    /// The regular simplex frame of n + 1 vectors in R^n.
    Simplex {
        #[arg(long)]
        n: usize,
    },
    /// Harmonic frame of k vectors in dimension n.
    Harmonic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "R")]
        field: Field,
    },
    /// Seeded random spherical tight frame.
    Random {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "R")]
        field: Field,
    },
    /// Commutant partition of a Gram point.
    Partition { gram: String },
    /// Tangent rank and stratum dimension at a Gram point.
    Tangent { gram: String },
    /// Closed-form dimensions.
    Dims {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "R")]
        field: Field,
    },
    /// A real Gram point with trivial commutant partition.
    RegularPoint {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Orbit counts of the real one-redundant Gram points.
    #[command(name = "enumerate-1red")]
    Enumerate1Red {
        #[arg(long)]
        n: usize,
    },
    /// Path from a planar frame to the canonical frame.
    PlanarConnect { frame: String },
    /// Lift a chain path through the squaring map.
    Lift { chainpath: String, start: String },
    /// Check a sampled path.
    CheckPath { path: String },
    /// Sign of the holonomy of a closed loop of real Gram points.
    Holonomy {
        #[arg(name = "loop")]
        lp: String,
        /// Largest allowed Gram step between consecutive loop points.
        #[arg(long, default_value_t = HOLONOMY_STEP)]
        step: f64,
    },
    /// Emit one of the built-in complexes.
    Complex {
        #[arg(value_enum)]
        which: Which,
        /// Write the complex to this file instead of standard output.
        #[arg(long)]
        export: Option<String>,
    },
    /// Counts, Euler characteristic, surface checks and genus of a complex.
    SurfaceReport { complex: String },
}

enum Failure {
    /// Exit 1: the input was fine but a check did not pass.
    Check(String),
    /// Exit 2: malformed input or arguments.
    Input(String),
}

impl From<framelab::Error> for Failure {
    fn from(e: framelab::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Check(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("json: {e}"))
    }
}

/// A report plus an optional check failure; the report is printed either way.
struct Outcome {
    value: Value,
    failed: Option<String>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Self { value, failed: None }
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    let mut s = String::new();
    let r = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut s)).map(|_| ())
    };
    r.map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok(s)
}

fn load<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_source(path)?).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn frame_value(f: &AnyFrame) -> Result<Value, Failure> {
    Ok(serde_json::to_value(FrameJson::from_any(f))?)
}

fn gram_value(g: &AnyGram) -> Result<Value, Failure> {
    Ok(serde_json::to_value(GramJson::from_any(g))?)
}

fn verify<T: Scalar>(f: &Frame<T>, axes: Option<Vec<f64>>, tol: f64) -> Result<Outcome, Failure> {
    let ell = match axes {
        Some(a) => {
            if a.len() != f.n() {
                return Err(Failure::Input(format!("--axes has {} weights, frame has n = {}", a.len(), f.n())));
            }
            EllipsoidSpec::new(a)?
        }
        None => EllipsoidSpec::sphere(f.n()),
    };
    let t = f.is_tight(tol)?;
    let residual = f.ellipsoid_residual(&ell)?;
    let on = f.is_on_ellipsoid(&ell, tol)?;
    let expected = if f.k() > f.n() { Some(framelab::frames::expected_tight_bound(&ell, f.k())?) } else { None };
    let pass = t.tight && on;
    let value = json!({
        "field": T::FIELD,
        "n": f.n(),
        "k": f.k(),
        "lower": t.bounds.lower,
        "upper": t.bounds.upper,
        "bound": t.bound,
        "tight": t.tight,
        "spherical": f.is_spherical(tol),
        "ellipsoid_residual": residual,
        "on_ellipsoid": on,
        "expected_bound": expected,
        "pass": pass,
    });
    let failed = (!pass).then(|| {
        let mut why = Vec::new();
        if !t.tight {
            why.push(format!("not tight (bounds {:e}, {:e})", t.bounds.lower, t.bounds.upper));
        }
        if !on {
            why.push(format!("not on the ellipsoid (residual {residual:e})"));
        }
        why.join("; ")
    });
    Ok(Outcome { value, failed })
}

fn partition_report<T: Scalar>(g: &framelab::GramPoint<T>, tol: f64) -> Result<Value, Failure> {
    let p = commutant_partition(g.matrix(), tol);
    Ok(json!({
        "partition": PartitionJson::from_partition(&p),
        "orthodecomposable": p.len() > 1,
        "block_sizes_ok": check_block_cardinalities(&p, g.k(), g.n()),
    }))
}

fn tangent_value<T: Scalar>(g: &framelab::GramPoint<T>, tol: f64) -> Result<Value, Failure> {
    let t = tangent_report(g, tol)?;
    let d = expected_dimensions(g.k(), g.n(), T::FIELD)?;
    let mut v = serde_json::to_value(t)?;
    v["expected_dim_g"] = json!(d.dim_g);
    Ok(v)
}

fn planar_start(path: &str, tol: f64) -> Result<framelab::planar::PlanarFrame, Failure> {
    let f: FrameJson = load(path)?;
    match f.to_frame()? {
        AnyFrame::Real(f) => Ok(to_planar(&f, tol)?),
        AnyFrame::Complex(_) => Err(Failure::Input("planar frames are real".into())),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = cli.tol;
    match &cli.cmd {
        Cmd::Verify { frame, axes } => {
            let f: FrameJson = load(frame)?;
            match f.to_frame()? {
                AnyFrame::Real(f) => verify(&f, axes.clone(), tol),
                AnyFrame::Complex(f) => verify(&f, axes.clone(), tol),
            }
        }
        Cmd::Gram { frame } => {
            let f: FrameJson = load(frame)?;
            let g: AnyGram = match f.to_frame()? {
                AnyFrame::Real(f) => gram(&f, tol)?.into(),
                AnyFrame::Complex(f) => gram(&f, tol)?.into(),
            };
            Ok(Outcome::ok(gram_value(&g)?))
        }
        Cmd::Complement { gram: path } => {
            let g: GramJson = load(path)?;
            let c: AnyGram = match g.to_gram(tol)? {
                AnyGram::Real(g) => complement(&g).into(),
                AnyGram::Complex(g) => complement(&g).into(),
            };
            Ok(Outcome::ok(gram_value(&c)?))
        }
        Cmd::FrameFromGram { gram: path } => {
            let g: GramJson = load(path)?;
            let f: AnyFrame = match g.to_gram(tol)? {
                AnyGram::Real(g) => frame_from_gram(&g, tol)?.into(),
                AnyGram::Complex(g) => frame_from_gram(&g, tol)?.into(),
            };
            Ok(Outcome::ok(frame_value(&f)?))
        }
        Cmd::Simplex { n } => Ok(Outcome::ok(frame_value(&framelab::frames::simplex_frame(*n)?.into())?)),
        Cmd::Harmonic { k, n, field } => Ok(Outcome::ok(frame_value(&harmonic_frame(*k, *n, *field)?)?)),
        Cmd::Random { k, n, field } => {
            let mut r = rng(cli.seed);
            let f: AnyFrame = match field {
                Field::R => random_stf::<f64, _>(*k, *n, &mut r)?.into(),
                Field::C => random_stf::<Complex64, _>(*k, *n, &mut r)?.into(),
            };
            Ok(Outcome::ok(frame_value(&f)?))
        }
        Cmd::Partition { gram: path } => {
            let g: GramJson = load(path)?;
            Ok(Outcome::ok(match g.to_gram(tol)? {
                AnyGram::Real(g) => partition_report(&g, tol)?,
                AnyGram::Complex(g) => partition_report(&g, tol)?,
            }))
        }
        Cmd::Tangent { gram: path } => {
            let g: GramJson = load(path)?;
            Ok(Outcome::ok(match g.to_gram(tol)? {
                AnyGram::Real(g) => tangent_value(&g, tol)?,
                AnyGram::Complex(g) => tangent_value(&g, tol)?,
            }))
        }
        Cmd::Dims { k, n, field } => Ok(Outcome::ok(serde_json::to_value(expected_dimensions(*k, *n, *field)?)?)),
        Cmd::RegularPoint { k, n } => {
            Ok(Outcome::ok(gram_value(&construct_regular_point(*k, *n, tol)?.into())?))
        }
        Cmd::Enumerate1Red { n } => {
            let e = framelab::grassmann::enumerate_one_redundant(*n)?;
            Ok(Outcome::ok(json!({
                "n": n,
                "k": n + 1,
                "points": e.points.len(),
                "permutation_orbits": e.permutation_orbits,
                "sign_orbits": e.sign_orbits,
            })))
        }
        Cmd::PlanarConnect { frame } => {
            let z = planar_start(frame, tol)?;
            let p = connect_to_standard(&z, cli.max_step, tol)?;
            Ok(Outcome::ok(serde_json::to_value(PathJson::from_path(&p))?))
        }
        Cmd::Lift { chainpath, start } => {
            let cp: PathJson = load(chainpath)?;
            let cp = cp.to_path(cli.max_step)?;
            let z = planar_start(start, tol)?;
            let p = lift_path(&cp, &z, tol)?;
            Ok(Outcome::ok(serde_json::to_value(PathJson::from_path(&p))?))
        }
        Cmd::CheckPath { path } => {
            let p: PathJson = load(path)?;
            let p = p.to_path(cli.max_step)?;
            let r = validate_path(&p, tol, None);
            let failed = (!r.valid).then(|| match &r.worst {
                Some(v) => format!("{:?} violation at sample {} (t = {}): {:e}", v.kind, v.index, v.t, v.value),
                None => "invalid path".to_string(),
            });
            Ok(Outcome { value: serde_json::to_value(r)?, failed })
        }
        Cmd::Holonomy { lp, step } => {
            let l: LoopJson = load(lp)?;
            let pts = l
                .points
                .iter()
                .enumerate()
                .map(|(i, g)| match g.to_gram(tol)? {
                    AnyGram::Real(g) => Ok(g),
                    AnyGram::Complex(_) => Err(Failure::Input(format!("loop point {i} is complex; holonomy needs real points"))),
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let s = holonomy_sign(&pts, tol, *step)?;
            Ok(Outcome::ok(json!({ "points": pts.len(), "sign": s })))
        }
        Cmd::Complex { which, export } => {
            let c = match which {
                Which::G42 => build_g42()?,
                Which::G52 => build_g52()?,
            };
            let v = serde_json::to_value(&c)?;
            match export {
                Some(file) => {
                    let txt = serde_json::to_string_pretty(&v)? + "\n";
                    std::fs::write(file, txt).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
                    Ok(Outcome::ok(json!({
                        "exported": file,
                        "v": c.vertices.len(),
                        "e": c.edges.len(),
                        "f": c.faces.len(),
                    })))
                }
                None => Ok(Outcome::ok(v)),
            }
        }
        Cmd::SurfaceReport { complex } => {
            let c: Complex2 = load(complex)?;
            Ok(Outcome::ok(serde_json::to_value(surface_report(&c)?)?))
        }
    }
}

fn text(v: &Value) -> String {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, x)| match x {
                Value::String(s) => format!("{k}: {s}"),
                _ => format!("{k}: {x}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        _ => v.to_string(),
    }
}

fn check_config(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Failure::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    if !(cli.max_step > 0.0 && cli.max_step < 1.0) {
        return Err(Failure::Input(format!("--max-step must lie in (0, 1), got {}", cli.max_step)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("framelab: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = check_config(&cli).and_then(|_| run(&cli));
    let (out, code, diag) = match result {
        Ok(Outcome { value, failed: None }) => (Some(value), 0, None),
        Ok(Outcome { value, failed: Some(why) }) => (Some(value), 1, Some(why)),
        Err(Failure::Check(why)) => (None, 1, Some(why)),
        Err(Failure::Input(why)) => (None, 2, Some(why)),
    };
    if let Some(v) = out {
        let s = match cli.format {
            Format::Json => serde_json::to_string_pretty(&v).expect("serializable"),
            Format::Text => text(&v),
        };
        let mut stdout = std::io::stdout().lock();
        if writeln!(stdout, "{s}").is_err() {
            return ExitCode::from(1);
        }
    }
    if let Some(d) = diag {
        eprintln!("framelab: {d}");
    }
    ExitCode::from(code)
}
