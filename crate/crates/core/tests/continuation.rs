use std::f64::consts::TAU;

use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::continuation::{lift_path, PlanePath, Segment};
use blaschke_monodromy::monodromy::MonodromyContext;
use blaschke_monodromy::perm::Permutation;
use blaschke_monodromy::roots::fiber;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_products(seed: u64, count: usize, degree: usize) -> Vec<FiniteBlaschke> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| FiniteBlaschke::random(&mut rng, degree, 0.85).unwrap())
        .collect()
}

/// Out along the ray from `w0` away from the origin, once around `|w| = r`, back.
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

/// Angle of `v` seen from `w0`, measured counter-clockwise from the direction `cut`.
fn angle_after(cut: f64, w0: Complex64, v: Complex64) -> f64 {
    ((v - w0).arg() - cut).rem_euclid(TAU)
}

#[test]
fn homotopic_loop_pairs_agree() {
    let tol = Tolerances::default();
    let mut pairs = 0;
    for b in random_products(11, 5, 4) {
        let ctx = MonodromyContext::<f64>::new(&b, &tol, None).unwrap();
        let w0 = ctx.w0;
        // Shrinking a petal's circle sweeps no other critical value.
        for ((v, lp), g) in ctx.loops.iter().zip(&ctx.generators) {
            let r = match lp.segments[1] {
                Segment::Arc { radius, .. } => radius,
                _ => unreachable!("petal shape"),
            };
            let small = PlanePath::petal(w0, *v, 0.5 * r);
            assert_eq!(&ctx.tracker.loop_permutation(&small, &ctx.base).unwrap(), g);
            pairs += 1;
        }
        // The outer loop is the product of the petals in counter-clockwise order.
        let rmax = ctx
            .values
            .iter()
            .map(|v| v.norm())
            .fold(w0.norm(), f64::max);
        let outer = outer_loop(w0, 0.5 * (1.0 + rmax));
        let mut order: Vec<usize> = (0..ctx.loops.len()).collect();
        let cut = w0.arg();
        order.sort_by(|&i, &j| {
            angle_after(cut, w0, ctx.loops[i].0).total_cmp(&angle_after(cut, w0, ctx.loops[j].0))
        });
        let mut expected = Permutation::identity(b.degree());
        for i in order {
            expected = ctx.generators[i].compose(&expected);
        }
        assert_eq!(
            ctx.tracker.loop_permutation(&outer, &ctx.base).unwrap(),
            expected
        );
        pairs += 1;
    }
    assert!(pairs >= 20, "{pairs} pairs");
}

#[test]
fn inverse_and_concatenated_loops() {
    let tol = Tolerances::default();
    for b in random_products(5, 3, 5) {
        let ctx = MonodromyContext::<f64>::new(&b, &tol, None).unwrap();
        for (i, (_, lp)) in ctx.loops.iter().enumerate() {
            let back = ctx
                .tracker
                .loop_permutation(&lp.reversed(), &ctx.base)
                .unwrap();
            assert_eq!(back, ctx.generators[i].inverse());
            let j = (i + 1) % ctx.loops.len();
            let both = ctx
                .tracker
                .loop_permutation(&lp.then(&ctx.loops[j].1), &ctx.base)
                .unwrap();
            assert_eq!(both, ctx.generators[j].compose(&ctx.generators[i]));
        }
    }
}

#[test]
fn loops_enclosing_nothing_act_trivially() {
    let tol = Tolerances::default();
    for b in random_products(8, 4, 4) {
        let ctx = MonodromyContext::<f64>::new(&b, &tol, None).unwrap();
        let gap = ctx
            .values
            .iter()
            .map(|v| (v - ctx.w0).norm())
            .fold(f64::INFINITY, f64::min);
        let small = PlanePath::circle(ctx.w0 + 0.25 * gap, 0.25 * gap, std::f64::consts::PI);
        let p = ctx.tracker.loop_permutation(&small, &ctx.base).unwrap();
        assert!(p.is_identity());
    }
    let sq = FiniteBlaschke::monomial(2).unwrap();
    let base = fiber(&sq, c(0.6, 0.0)).unwrap();
    let p = blaschke_monodromy::continuation::lift_loop_permutation(
        &sq,
        &PlanePath::circle(c(0.5, 0.0), 0.1, 0.0),
        &base,
    )
    .unwrap();
    assert!(p.is_identity());
}

#[test]
fn powers_give_full_cycles() {
    for n in 2..=6 {
        let b = FiniteBlaschke::monomial(n).unwrap();
        let base = fiber(&b, c(0.3, 0.0)).unwrap();
        let p = blaschke_monodromy::continuation::lift_loop_permutation(
            &b,
            &PlanePath::circle(c(0.0, 0.0), 0.3, 0.0),
            &base,
        )
        .unwrap();
        assert_eq!(p.cycles().len(), 1, "z^{n}: {:?}", p.images());
        assert_eq!(p.order(), n);
    }
}

#[test]
fn random_paths_are_reversible() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for b in random_products(3, 10, 4) {
        let mut pick = || Complex64::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(0.0..TAU));
        let (a, m, e) = (pick(), pick(), pick());
        let path = PlanePath::new(vec![
            Segment::Line { from: a, to: m },
            Segment::Line { from: m, to: e },
        ]);
        let f = fiber(&b, a).unwrap();
        for &z in &f.points {
            let Ok(fwd) = lift_path(&b, &path, z) else {
                // A random path may graze a critical value; that is reported, not hidden.
                continue;
            };
            assert!((b.eval(fwd.end) - e).norm() <= 1e-9);
            let back = lift_path(&b, &path.reversed(), fwd.end).unwrap();
            assert!((back.end - z).norm() <= 1e-8, "{} vs {}", back.end, z);
            checked += 1;
        }
    }
    assert!(checked >= 30, "only {checked} of 40 lifts completed");
}

#[test]
fn half_turn_of_the_square() {
    let sq = FiniteBlaschke::monomial(2).unwrap();
    let half = PlanePath::new(vec![Segment::Arc {
        center: c(0.0, 0.0),
        radius: 0.25,
        start_angle: 0.0,
        sweep: std::f64::consts::PI,
    }]);
    let t = lift_path(&sq, &half, c(0.5, 0.0)).unwrap();
    assert!((t.end - c(0.0, 0.5)).norm() < 1e-12);
    let still = lift_path(&sq, &PlanePath::constant(c(0.25, 0.0)), c(0.5, 0.0)).unwrap();
    assert!((still.end - c(0.5, 0.0)).norm() < 1e-14);
}
