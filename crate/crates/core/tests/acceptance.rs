//! One PASS/FAIL line per acceptance criterion. Tolerances and time limits are fixed here.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::{Duration, Instant};

use blaschke_monodromy::bergman::{
    adjoint_residual, kernel_identity_residual, monomial_norm, quadrature_for, sample_points,
    BranchField, ClassField,
};
use blaschke_monodromy::blaschke::{FiniteBlaschke, Zero};
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::continuation::{PlanePath, Segment};
use blaschke_monodromy::mobius::DiskPoint;
use blaschke_monodromy::monodromy::{
    analyze_with, irreducibility_conditions, surface_components, MonodromyContext,
};
use blaschke_monodromy::perm::Permutation;
use blaschke_monodromy::qd::Qd;
use blaschke_monodromy::roots::critical_points;
use blaschke_monodromy::thinprod::{
    construct_irreducible_stages, extract_all, extract_thin_subsequence, generate_thin_sequence,
    ThinSpec,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero as _};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ADJOINT_REL: f64 = 1e-3;
const KERNEL_SQUARE: f64 = 1e-6;
const KERNEL_SQUARE_PHI: f64 = 1e-5;
const DERIVATIVE_GAP: f64 = 1e-8;
const THIN_K: usize = 20;
const STAGES: usize = 8;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bochner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..100 {
        let n = rng.gen_range(2..=7);
        let b = FiniteBlaschke::random(&mut rng, n, 0.95).map_err(|e| e.to_string())?;
        let got = critical_points(&b)
            .map_err(|e| format!("product {i}: {e}"))?
            .count();
        if got != n - 1 {
            return Err(format!("product {i} of degree {n}: {got} critical points"));
        }
    }
    Ok("100 products, count = degree - 1".into())
}

fn q_of(b: &FiniteBlaschke) -> Result<usize, String> {
    surface_components(b)
        .map(|r| r.q)
        .map_err(|e| e.to_string())
}

fn square() -> Outcome {
    let r = surface_components(&FiniteBlaschke::monomial(2).unwrap()).map_err(|e| e.to_string())?;
    check(
        r.q == 2 && r.orbits == vec![vec![0], vec![1]],
        "q = 2, orbits {0},{1}",
        format!("q = {}, orbits {:?}", r.q, r.orbits),
    )
}

fn powers() -> Outcome {
    for n in 2..=6 {
        let q = q_of(&FiniteBlaschke::monomial(n).unwrap())?;
        if q != n {
            return Err(format!("z^{n}: q = {q}"));
        }
    }
    Ok("q(z^n) = n for n = 2..6".into())
}

fn powers_times_factor() -> Outcome {
    for lambda in [c(0.4, 0.2), c(-0.35, 0.0), c(0.1, 0.55)] {
        for n in 2..=5 {
            let b = FiniteBlaschke::monomial(n)
                .unwrap()
                .times_factor(DiskPoint::new(lambda).unwrap(), true);
            let q = q_of(&b)?;
            if q != 2 {
                return Err(format!("z^{n} phi_{lambda}: q = {q}"));
            }
        }
    }
    Ok("12 products, q = 2".into())
}

fn three_squared_factors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut qs = Vec::new();
    for _ in 0..3 {
        let mut zeros = vec![Zero {
            point: DiskPoint::ORIGIN,
            multiplicity: 1,
        }];
        while zeros.len() < 4 {
            let z = Complex64::from_polar(rng.gen_range(0.2..0.8), rng.gen_range(0.0..TAU));
            if zeros.iter().all(|w| (w.point.approx - z).norm() > 0.1) {
                zeros.push(Zero {
                    point: DiskPoint::new(z).unwrap(),
                    multiplicity: 2,
                });
            }
        }
        let b = FiniteBlaschke::new(zeros, c(1.0, 0.0)).map_err(|e| e.to_string())?;
        qs.push(q_of(&b)?);
    }
    check(
        qs.iter().all(|&q| q <= 4),
        format!("q = {qs:?}"),
        format!("q = {qs:?}"),
    )
}

/// Criteria 6 and 7 share one suite of 50 products.
fn random_suite() -> (Outcome, Outcome) {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut passing, mut exceptions, mut ok_runs, mut disconnected, mut errors) =
        (0, Vec::new(), 0, Vec::new(), Vec::new());
    for i in 0..50 {
        let n = rng.gen_range(3..=6);
        let b = FiniteBlaschke::random(&mut rng, n, 0.9).unwrap();
        match analyze_with(&b, &tol, None) {
            Ok((comp, glue)) => {
                ok_runs += 1;
                if !glue.connected {
                    disconnected.push(i);
                }
                if irreducibility_conditions(&b, &[])
                    .map(|c| c.pass)
                    .unwrap_or(false)
                {
                    passing += 1;
                    if comp.q != 2 {
                        exceptions.push((i, comp.q));
                    }
                }
            }
            Err(e) => errors.push(format!("{i}: {e}")),
        }
    }
    let note = if errors.is_empty() {
        String::new()
    } else {
        format!(", {} runs failed: {:?}", errors.len(), errors)
    };
    (
        check(
            exceptions.is_empty(),
            format!("{passing} products meet the conditions, all q = 2{note}"),
            format!("exceptions {exceptions:?}{note}"),
        ),
        check(
            disconnected.is_empty() && ok_runs > 0,
            format!("{ok_runs} successful runs, all connected"),
            format!("disconnected: {disconnected:?}"),
        ),
    )
}

fn exact(q: Qd) -> BigRational {
    q.0.iter()
        .map(|&x| BigRational::from_float(x).unwrap())
        .fold(BigRational::zero(), |a, b| a + b)
}

fn distance_sq(z: &DiskPoint, w: &DiskPoint) -> BigRational {
    let (zr, zi) = (exact(z.exact.re), exact(z.exact.im));
    let (wr, wi) = (exact(w.exact.re), exact(w.exact.im));
    let num = (&zr - &wr) * (&zr - &wr) + (&zi - &wi) * (&zi - &wi);
    let re = BigRational::one() - (&wr * &zr + &wi * &zi);
    let im = &wi * &zr - &wr * &zi;
    num / (&re * &re + &im * &im)
}

fn thin_certificate() -> Outcome {
    let tol = Tolerances {
        max_truncation: 26,
        ..Tolerances::default()
    };
    let pool =
        generate_thin_sequence(&ThinSpec::factorial(26), &tol, 0).map_err(|e| e.to_string())?;
    let e = extract_thin_subsequence(&pool, THIN_K).map_err(|e| e.to_string())?;
    let pts = &e.sequence.points;
    for k in 1..=THIN_K {
        let p = (0..k - 1)
            .map(|j| distance_sq(&pts[j], &pts[k - 1]))
            .fold(BigRational::one(), |a, b| a * b);
        let kk = BigRational::from_integer(BigInt::from(k as u64 + 1));
        let bound = BigRational::one() - BigRational::one() / (&kk * &kk);
        if p <= &bound * &bound {
            return Err(format!("row {k} fails exact recomputation"));
        }
    }
    Ok(format!("K = {THIN_K}, exact rational check of every row"))
}

fn stages() -> Outcome {
    let tol = Tolerances {
        max_truncation: 32,
        ..Tolerances::default()
    };
    let pool =
        generate_thin_sequence(&ThinSpec::factorial(32), &tol, 0).map_err(|e| e.to_string())?;
    let pool = extract_all(&pool).map_err(|e| e.to_string())?.sequence;
    let st = construct_irreducible_stages(&pool, STAGES, &tol, true).map_err(|e| e.to_string())?;
    for s in &st {
        if !s.audit.all_pass() || s.q != Some(2) {
            return Err(format!(
                "stage {}: gates {:?}, q {:?}",
                s.m,
                s.audit.first_failure(),
                s.q
            ));
        }
    }
    Ok(format!(
        "{} stages, deepest 1-|lambda| = {:.2e}",
        st.len(),
        st.last().unwrap().lambda.decrement
    ))
}

fn bergman() -> Outcome {
    let tol = Tolerances::default();
    let mut worst_rel: f64 = 0.0;
    let mut notes = Vec::new();
    for (name, b, kernel_bound) in [
        ("z^2", FiniteBlaschke::monomial(2).unwrap(), KERNEL_SQUARE),
        (
            "z^2 phi_0.4",
            FiniteBlaschke::monomial(2)
                .unwrap()
                .times_factor(DiskPoint::from_re_im(0.4, 0.0).unwrap(), true),
            KERNEL_SQUARE_PHI,
        ),
    ] {
        let rep = surface_components(&b).map_err(|e| e.to_string())?;
        let field = BranchField::new(&b, &tol, &rep).map_err(|e| e.to_string())?;
        let quad = quadrature_for(&field, 6, &tol);
        let br = field.on_quadrature(&quad).map_err(|e| e.to_string())?;
        let samples = sample_points(50, 0.9);
        let mut gap = br
            .iter()
            .flatten()
            .map(|x| x.derivative_gap)
            .fold(0.0, f64::max);
        for &z in &samples {
            gap = gap.max(field.at(z).map_err(|e| e.to_string())?.derivative_gap);
        }
        if gap > DERIVATIVE_GAP {
            return Err(format!("{name}: derivative identity gap {gap:e}"));
        }
        for k in 1..rep.orbits.len() {
            let rho = ClassField::new(&rep, k);
            let inv = ClassField::new(&rep, rep.inverse_pairing[k]);
            for a in 0..=6u32 {
                for d in 0..=6u32 {
                    let r = adjoint_residual(
                        &rho,
                        &inv,
                        &move |z| z.powu(a),
                        &move |z| z.powu(d),
                        &quad,
                        &br,
                        tol.forfeit_bound,
                    )
                    .map_err(|e| e.to_string())?;
                    let rel = r.residual / (monomial_norm(a) * monomial_norm(d));
                    worst_rel = worst_rel.max(rel);
                    if rel > ADJOINT_REL {
                        return Err(format!(
                            "{name}: adjoint z^{a}, z^{d} relative residual {rel:e}"
                        ));
                    }
                }
            }
            let lam = DiskPoint::from_re_im(0.1, 0.0).unwrap();
            let r = kernel_identity_residual(&field, &rho, &inv, &lam, &samples)
                .map_err(|e| e.to_string())?;
            if r > kernel_bound {
                return Err(format!("{name}: kernel identity residual {r:e}"));
            }
            notes.push(format!("{name} kernel {r:.1e}"));
        }
    }
    Ok(format!(
        "adjoint rel <= {worst_rel:.1e}, {}",
        notes.join(", ")
    ))
}

fn outer_loop(w0: Complex64, r: f64) -> PlanePath {
    let theta = w0.arg();
    let p = Complex64::from_polar(r, theta);
    PlanePath::new(vec![
        Segment::Line { from: w0, to: p },
        Segment::Arc {
            center: c(0.0, 0.0),
            radius: r,
            start_angle: theta,
            sweep: TAU,
        },
        Segment::Line { from: p, to: w0 },
    ])
}

fn continuation() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut pairs, mut inverses, mut empties) = (0, 0, 0);
    while pairs < 20 {
        let b = FiniteBlaschke::random(&mut rng, 4, 0.85).unwrap();
        let ctx = MonodromyContext::<f64>::new(&b, &tol, None).map_err(|e| e.to_string())?;
        let w0 = ctx.w0;
        let mismatch = |what: &str| Err(format!("{what} mismatch for a degree-4 product"));
        for ((v, lp), g) in ctx.loops.iter().zip(&ctx.generators) {
            let Segment::Arc { radius, .. } = lp.segments[1] else {
                unreachable!()
            };
            if &ctx
                .tracker
                .loop_permutation(&PlanePath::petal(w0, *v, 0.5 * radius), &ctx.base)
                .map_err(|e| e.to_string())?
                != g
            {
                return mismatch("shrunken petal");
            }
            pairs += 1;
            if ctx
                .tracker
                .loop_permutation(&lp.reversed(), &ctx.base)
                .map_err(|e| e.to_string())?
                != g.inverse()
            {
                return mismatch("inverse loop");
            }
            inverses += 1;
        }
        let rmax = ctx
            .values
            .iter()
            .map(|v| v.norm())
            .fold(w0.norm(), f64::max);
        let cut = w0.arg();
        let mut order: Vec<usize> = (0..ctx.loops.len()).collect();
        let after = |v: Complex64| ((v - w0).arg() - cut).rem_euclid(TAU);
        order.sort_by(|&i, &j| after(ctx.loops[i].0).total_cmp(&after(ctx.loops[j].0)));
        let expected = order.iter().fold(Permutation::identity(4), |acc, &i| {
            ctx.generators[i].compose(&acc)
        });
        if ctx
            .tracker
            .loop_permutation(&outer_loop(w0, 0.5 * (1.0 + rmax)), &ctx.base)
            .map_err(|e| e.to_string())?
            != expected
        {
            return mismatch("outer loop");
        }
        pairs += 1;
        let gap = ctx
            .values
            .iter()
            .map(|v| (v - w0).norm())
            .fold(f64::INFINITY, f64::min);
        let empty = PlanePath::circle(w0 + 0.25 * gap, 0.25 * gap, std::f64::consts::PI);
        if !ctx
            .tracker
            .loop_permutation(&empty, &ctx.base)
            .map_err(|e| e.to_string())?
            .is_identity()
        {
            return mismatch("empty loop");
        }
        empties += 1;
    }
    Ok(format!(
        "{pairs} homotopic pairs, {inverses} inverse loops, {empties} empty loops"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let z2 = dir.path().join("z2.json");
    let zp = dir.path().join("zp.json");
    std::fs::write(
        &z2,
        r#"{"constant": [1, 0], "zeros": [{"z": [0, 0], "m": 2}]}"#,
    )
    .unwrap();
    std::fs::write(
        &zp,
        r#"{"constant": [1, 0], "zeros": [{"z": [0, 0], "m": 2}, {"z": [0.4, 0], "m": 1}]}"#,
    )
    .unwrap();
    let (z2, zp) = (z2.to_str().unwrap(), zp.to_str().unwrap());
    let commands: Vec<Vec<&str>> = vec![
        vec!["analyze", "--input", z2],
        vec!["analyze", "--input", zp],
        vec!["glue", "--input", zp],
        vec!["thin-gen", "--truncation", "20", "--seed", "0"],
        vec![
            "thin-construct",
            "--pool",
            "factorial",
            "--stages",
            "5",
            "--seed",
            "0",
        ],
        vec!["bergman-check", "--input", zp],
        vec!["levelset", "--input", z2, "--t", "0.5", "--samples", "256"],
    ];
    for args in &commands {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_blaschke"))
                .args(args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        if a.status.code() != Some(0) {
            return Err(format!("{args:?} exited {:?}", a.status.code()));
        }
        if a.stdout != b.stdout {
            return Err(format!("{args:?} differs between runs"));
        }
    }
    Ok(format!("{} commands, byte-identical", commands.len()))
}

fn main() {
    let mut failed = 0;
    let mut report =
        |id: u32, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
            let t = Instant::now();
            let mut out = f();
            let dt = t.elapsed();
            if let (Ok(msg), Some(lim)) = (&out, limit) {
                if dt > lim {
                    out = Err(format!("{msg}; took {dt:.2?}, limit {lim:?}"));
                }
            }
            match out {
                Ok(msg) => println!("PASS {id:2} {name}: {msg} ({dt:.2?})"),
                Err(msg) => {
                    failed += 1;
                    println!("FAIL {id:2} {name}: {msg} ({dt:.2?})");
                }
            }
        };
    let secs = |s| Some(Duration::from_secs(s));
    report(1, "critical point count", secs(10), &mut bochner);
    report(2, "q(z^2)", secs(1), &mut square);
    report(3, "q(z^n)", secs(5), &mut powers);
    report(4, "q(z^n phi)", secs(30), &mut powers_times_factor);
    report(
        5,
        "q(z phi1^2 phi2^2 phi3^2)",
        secs(60),
        &mut three_squared_factors,
    );
    let t = Instant::now();
    let (six, seven) = random_suite();
    let suite_time = t.elapsed();
    report(6, "conditions imply q = 2", None, &mut || {
        six.clone().map(|m| format!("{m}; suite {suite_time:.2?}"))
    });
    report(7, "gluing connectivity", None, &mut || seven.clone());
    report(8, "thinness certificate", None, &mut thin_certificate);
    report(9, "staged construction", secs(300), &mut stages);
    report(10, "Bergman identities", secs(120), &mut bergman);
    report(11, "continuation soundness", None, &mut continuation);
    report(12, "CLI determinism", None, &mut determinism);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
