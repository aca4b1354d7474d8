//! The `blaschke` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bergman::{
    adjoint_residual, e_op_apply, kernel_identity_residual, monomial_norm, quadrature_for,
    sample_points, symmetry_unitary_check, BranchField, ClassField,
};
use crate::blaschke::{thinness_profile, FiniteBlaschke, ProductSpec, ZeroSequence};
use crate::config::Tolerances;
use crate::continuation::{Segment, Tracker};
use crate::error::{Error, Result};
use crate::mobius::DiskPoint;
use crate::monodromy::{conditions_from, MonodromyContext};
use crate::qd::{cabs_f64, cfrom, cto, Qd, Real};
use crate::report;
use crate::roots::{critical_points_with, fiber_in};
use crate::thinprod::{
    construct_irreducible_stages, detect_rotational_structure, extract_all,
    extract_thin_subsequence, generate_thin_sequence, ThinSpec,
};

const STAGE_BANNER: &str = "components and multiplicities are stage-local; infinite-multiplicity phenomena of the limit product are not observable at a finite stage";

#[derive(Debug, Parser)]
#[command(
    name = "blaschke",
    version,
    about = "Monodromy and surface components of finite Blaschke products"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Report destination (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides collected from `--tol.<name>=<value>`.
    #[arg(skip)]
    pub tol: Tolerances,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical data, monodromy group, components and gluing graph.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Critical point indices left out of the simple/injective conditions.
        #[arg(long, value_delimiter = ',')]
        exempt: Vec<usize>,
        /// CSV of every accepted tracking step along the generator loops.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Gluing graph from radial collisions.
    Glue {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a thin zero sequence and its thinness profile.
    ThinGen {
        /// Sequence spec (default: factorial moduli, van der Corput arguments).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Greedy thin subsequence with its certificate.
    ThinExtract {
        #[arg(long)]
        input: PathBuf,
        /// Target length (every accepted candidate when absent).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Staged irreducible construction with per-stage audits.
    ThinConstruct {
        #[arg(long, default_value = "factorial")]
        pool: String,
        /// Candidate sequence file, used instead of a generated pool.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        stages: usize,
        #[arg(long, default_value_t = 32)]
        truncation: usize,
        /// Skip the monodromy computation of each stage.
        #[arg(long)]
        no_components: bool,
    },
    /// Adjoint, kernel and symmetry checks of the class operators.
    BergmanCheck {
        #[arg(long)]
        input: PathBuf,
        /// Largest monomial degree for test functions.
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
    /// Sample the curves `|B| = t` by tracking fibers over a circle (CSV).
    Levelset {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Glue { .. } => "glue",
            Command::ThinGen { .. } => "thin-gen",
            Command::ThinExtract { .. } => "thin-extract",
            Command::ThinConstruct { .. } => "thin-construct",
            Command::BergmanCheck { .. } => "bergman-check",
            Command::Levelset { .. } => "levelset",
        }
    }
}

enum Output {
    Json(Value),
    Csv(String),
}

/// Parse `argv` (program name first) and run; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut tol = Tolerances::default();
    let mut rest = Vec::new();
    for a in argv.into_iter().map(Into::into) {
        if let Some(spec) = a.strip_prefix("--tol.") {
            let Some((name, value)) = spec.split_once('=') else {
                let _ = writeln!(err, "error: expected --tol.<name>=<value>, got {a}");
                return 1;
            };
            let parsed = value
                .parse::<f64>()
                .map_err(|e| Error::Parameter(e.to_string()));
            if let Err(e) = parsed.and_then(|v| tol.set(name, v)) {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
        } else {
            rest.push(a);
        }
    }
    let mut cfg = match RunConfig::try_parse_from(rest) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    cfg.tol = tol;
    let name = cfg.command.name();
    match execute(&cfg) {
        Ok(doc) => match emit(&cfg, doc, out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(e) if e.is_numerical_failure() => {
            let _ = writeln!(err, "numerical failure [{}]: {e}", e.gate());
            match emit(&cfg, Output::Json(report::failure(name, &e)), out) {
                Ok(()) => 2,
                Err(_) => 2,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit(cfg: &RunConfig, doc: Output, out: &mut dyn Write) -> Result<()> {
    let text = match doc {
        Output::Json(v) => report::canonical(&v),
        Output::Csv(s) => s,
    };
    match &cfg.output {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn read_product(path: &Path, tol: &Tolerances) -> Result<FiniteBlaschke> {
    let spec: ProductSpec = serde_json::from_value(read_json(path)?)
        .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
    FiniteBlaschke::from_spec(&spec, tol)
}

/// A sequence document, or a report that carries one under `"sequence"`.
fn read_sequence(path: &Path) -> Result<ZeroSequence> {
    let doc = read_json(path)?;
    let seq = doc.get("sequence").unwrap_or(&doc);
    let bad = |what: &str| Error::InvalidSpec(format!("{}: {what}", path.display()));
    let tag = seq
        .get("source_tag")
        .and_then(Value::as_str)
        .unwrap_or("file")
        .to_string();
    let points = seq
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"points\" array"))?
        .iter()
        .map(|p| {
            let z = p
                .get("z")
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .ok_or_else(|| bad("point needs \"z\": [re, im]"))?;
            let re = z[0].as_f64().ok_or_else(|| bad("non-numeric coordinate"))?;
            let im = z[1].as_f64().ok_or_else(|| bad("non-numeric coordinate"))?;
            let c = Complex64::new(re, im);
            match p.get("decrement").and_then(Value::as_f64) {
                Some(e) => DiskPoint::from_polar_decrement(e, c.arg()),
                None => DiskPoint::new(c),
            }
            .map_err(|e| bad(&e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZeroSequence::new(points, tag))
}

fn execute(cfg: &RunConfig) -> Result<Output> {
    let tol = &cfg.tol;
    match &cfg.command {
        Command::Analyze {
            input,
            exempt,
            plot_data,
        } => {
            let b = read_product(input, tol)?;
            let (doc, rows) = if b.needs_extended(tol) {
                analyze_doc::<Qd>(&b, tol, exempt, plot_data.is_some())?
            } else {
                analyze_doc::<f64>(&b, tol, exempt, plot_data.is_some())?
            };
            if let Some(path) = plot_data {
                let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
                w.write_record(["loop", "branch", "t", "re", "im", "abs_dB"])
                    .map_err(|e| Error::Io(e.into()))?;
                for r in rows {
                    w.write_record(&r).map_err(|e| Error::Io(e.into()))?;
                }
                w.flush()?;
            }
            Ok(Output::Json(doc))
        }
        Command::Glue { input } => {
            let b = read_product(input, tol)?;
            let g = if b.needs_extended(tol) {
                MonodromyContext::<Qd>::new(&b, tol, None)?.gluing_graph()?
            } else {
                MonodromyContext::<f64>::new(&b, tol, None)?.gluing_graph()?
            };
            let mut doc = report::gluing(&g);
            doc["degree"] = json!(b.degree());
            Ok(Output::Json(doc))
        }
        Command::ThinGen { input, truncation } => {
            let mut spec = match input {
                Some(p) => serde_json::from_value::<ThinSpec>(read_json(p)?)
                    .map_err(|e| Error::InvalidSpec(format!("{}: {e}", p.display())))?,
                None => ThinSpec::factorial(24),
            };
            if let Some(n) = truncation {
                spec.n = *n;
            }
            let seq = generate_thin_sequence(&spec, tol, cfg.seed)?;
            let profile = thinness_profile(&seq, 0..seq.len())?;
            Ok(Output::Json(json!({
                "spec": serde_json::to_value(&spec)?,
                "sequence": report::sequence(&seq),
                "thinness": report::thinness(&profile),
                "seed": cfg.seed,
            })))
        }
        Command::ThinExtract { input, k } => {
            let seq = read_sequence(input)?;
            let e = match k {
                Some(k) => extract_thin_subsequence(&seq, *k)?,
                None => extract_all(&seq)?,
            };
            Ok(Output::Json(report::extraction(&e)))
        }
        Command::ThinConstruct {
            pool,
            input,
            stages,
            truncation,
            no_components,
        } => {
            let mut tol = tol.clone();
            tol.max_truncation = tol.max_truncation.max(*truncation);
            let candidates = match (input, pool.as_str()) {
                (Some(p), _) => read_sequence(p)?,
                (None, "factorial") => {
                    generate_thin_sequence(&ThinSpec::factorial(*truncation), &tol, cfg.seed)?
                }
                (None, other) => return Err(Error::Parameter(format!("unknown pool '{other}'"))),
            };
            let extracted = extract_all(&candidates)?;
            let st =
                construct_irreducible_stages(&extracted.sequence, *stages, &tol, !no_components)?;
            Ok(Output::Json(json!({
                "pool": {"source_tag": extracted.sequence.source_tag, "size": extracted.sequence.len()},
                "stages": st.iter().map(report::stage).collect::<Vec<_>>(),
                "all_gates_pass": st.iter().all(|s| s.audit.all_pass()),
                "notes": [STAGE_BANNER],
                "seed": cfg.seed,
            })))
        }
        Command::BergmanCheck { input, degree } => {
            let b = read_product(input, tol)?;
            Ok(Output::Json(bergman_doc(&b, tol, *degree)?))
        }
        Command::Levelset { input, t, samples } => {
            let b = read_product(input, tol)?;
            Ok(Output::Csv(levelset_csv(&b, tol, *t, *samples)?))
        }
    }
}

fn analyze_doc<T: Real>(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    exempt: &[usize],
    with_tracks: bool,
) -> Result<(Value, Vec<[String; 6]>)> {
    let crit = critical_points_with(b, tol)?;
    let cond = conditions_from(&crit, exempt, tol.conditions_tol);
    let ctx = MonodromyContext::<T>::new(b, tol, None)?;
    let comp = ctx.components();
    let glue = ctx.gluing_graph()?;
    let mut doc = report::components(&comp);
    doc.insert("critical".into(), report::critical(&crit));
    doc.insert("glue_edges".into(), report::glue_edges(&glue));
    doc.insert("glue_connected".into(), json!(glue.connected));
    doc.insert("conditions".into(), report::conditions(&cond));
    if b.needs_extended(tol) {
        doc.insert("notes".into(), json!([STAGE_BANNER]));
    }
    let mut rows = Vec::new();
    if with_tracks {
        let mut tr = Tracker::<T>::with_critical_data(b, tol, ctx.tracker.crit.clone());
        tr.record_samples = true;
        for (li, (_, lp)) in ctx.loops.iter().enumerate() {
            for (bi, &z) in ctx.base.points.iter().enumerate() {
                let track = tr.lift(lp, z)?;
                for (t, z) in track.samples {
                    let d = cabs_f64(b.eval_d(z).1);
                    let z = cto(z);
                    rows.push([
                        li.to_string(),
                        bi.to_string(),
                        format!("{t:.16e}"),
                        format!("{:.16e}", z.re),
                        format!("{:.16e}", z.im),
                        format!("{d:.16e}"),
                    ]);
                }
            }
        }
    }
    Ok((Value::Object(doc), rows))
}

fn levelset_csv(b: &FiniteBlaschke, tol: &Tolerances, t: f64, samples: usize) -> Result<String> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Parameter(format!("level t = {t} must lie in (0,1)")));
    }
    if samples == 0 {
        return Err(Error::Parameter("samples must be positive".into()));
    }
    if b.needs_extended(tol) {
        levelset_rows::<Qd>(b, tol, t, samples)
    } else {
        levelset_rows::<f64>(b, tol, t, samples)
    }
}

fn levelset_rows<T: Real>(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    t: f64,
    samples: usize,
) -> Result<String> {
    let tracker = Tracker::<T>::new(b, tol)?;
    let start = fiber_in::<T>(b, cfrom(Complex64::new(t, 0.0)), tol)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(["branch_id", "t_param", "re", "im"])
        .map_err(io)?;
    for (i, &z0) in start.points.iter().enumerate() {
        let mut z = z0;
        for k in 0..samples {
            if k > 0 {
                let arc = Segment::Arc {
                    center: Complex64::new(0.0, 0.0),
                    radius: t,
                    start_angle: std::f64::consts::TAU * (k - 1) as f64 / samples as f64,
                    sweep: std::f64::consts::TAU / samples as f64,
                };
                let path = crate::continuation::PlanePath::new(vec![arc]);
                z = tracker.lift(&path, z)?.end;
            }
            let p = cto(z);
            w.write_record(&[
                i.to_string(),
                format!("{:.16e}", k as f64 / samples as f64),
                format!("{:.16e}", p.re),
                format!("{:.16e}", p.im),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

fn bergman_doc(b: &FiniteBlaschke, tol: &Tolerances, degree: u32) -> Result<Value> {
    let ctx = MonodromyContext::<f64>::new(b, tol, None)?;
    let rep = ctx.components();
    let field = BranchField::new(b, tol, &rep)?;
    let quad = quadrature_for(&field, degree as usize, tol);
    let branches = field.on_quadrature(&quad)?;
    let forfeited: f64 = quad
        .nodes
        .iter()
        .zip(&branches)
        .filter(|(_, br)| br.is_none())
        .map(|(n, _)| n.1)
        .sum();
    let mut fiber_residual: f64 = 0.0;
    let mut derivative_gap: f64 = 0.0;
    for br in branches.iter().flatten() {
        fiber_residual = fiber_residual.max(br.residual);
        derivative_gap = derivative_gap.max(br.derivative_gap);
    }
    let identity = ClassField::new(&rep, 0);
    let probe = |z: Complex64| z * z * z + Complex64::new(1.0, 0.0);
    let mut identity_ok = true;
    for z in sample_points(100, 0.95) {
        identity_ok &= e_op_apply(&field, &identity, &probe, z)? == probe(z);
    }
    let mut adjoint = Vec::new();
    let mut kernels = Vec::new();
    let lambda = DiskPoint::new(Complex64::new(0.1, 0.0))?;
    let kernel_samples = sample_points(50, 0.9);
    for k in 1..rep.orbits.len() {
        let rho = ClassField::new(&rep, k);
        let inv = ClassField::new(&rep, rep.inverse_pairing[k]);
        for a in 0..=degree {
            for c in 0..=degree {
                let h = move |z: Complex64| z.powu(a);
                let g = move |z: Complex64| z.powu(c);
                let r = adjoint_residual(&rho, &inv, &h, &g, &quad, &branches, tol.forfeit_bound)?;
                adjoint.push(json!({
                    "orbit": k,
                    "paired_orbit": rep.inverse_pairing[k],
                    "h_degree": a,
                    "g_degree": c,
                    "residual": r.residual,
                    "relative": r.residual / (monomial_norm(a) * monomial_norm(c)),
                }));
            }
        }
        let r = kernel_identity_residual(&field, &rho, &inv, &lambda, &kernel_samples)?;
        kernels.push(json!({"orbit": k, "lambda": report::complex(lambda.approx), "residual": r}));
    }
    let mut pts = Vec::new();
    for z in b.zeros() {
        pts.extend(std::iter::repeat_n(z.point, z.multiplicity));
    }
    let symmetry = if pts.len() >= 4 {
        match detect_rotational_structure(&ZeroSequence::new(pts, "zeros"), tol)? {
            Some(rot) => {
                let f = |z: Complex64| z;
                let s = symmetry_unitary_check(b, &rot, &f, &f, &quad)?;
                json!({
                    "lambda": report::complex(rot.lambda.approx),
                    "n": rot.n,
                    "commutation_residual": s.commutation_residual,
                    "isometry_residual": s.isometry_residual,
                    "precondition_residual": s.precondition_residual,
                })
            }
            None => Value::Null,
        }
    } else {
        Value::Null
    };
    Ok(json!({
        "degree": b.degree(),
        "q": rep.q,
        "orbits": rep.orbits,
        "inverse_pairing": rep.inverse_pairing,
        "identity_class_ok": identity_ok,
        "adjoint_residuals": adjoint,
        "kernel_identity_residuals": kernels,
        "forfeited_weight": forfeited,
        "fiber_residual_max": fiber_residual,
        "derivative_identity_max": derivative_gap,
        "quadrature": {"radial": quad.radial_order, "angular": quad.angular_order, "offset": quad.angular_offset},
        "symmetry": symmetry,
    }))
}
