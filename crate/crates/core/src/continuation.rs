//! Predictor–corrector continuation of fiber points along paths in the w-plane.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::blaschke::FiniteBlaschke;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::mobius::promote;
use crate::perm::Permutation;
use crate::qd::{cabs_f64, cdiv, cfrom, cnorm_sqr, cto, Qd, Real};
use crate::roots::{critical_points_in, guarded_assignment, precision_ratio, CriticalData, Fiber};

/// A straight segment or a circular arc, parameterized over `[0,1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// Counter-clockwise when `sweep > 0`.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => {
                if s >= 1.0 {
                    to
                } else {
                    from + (to - from) * s
                }
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + Complex64::from_polar(radius, start_angle + sweep * s),
        }
    }

    pub fn velocity(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => {
                Complex64::new(0.0, sweep) * Complex64::from_polar(radius, start_angle + sweep * s)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Segment::Arc {
                center,
                radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
        }
    }

    /// The piece between parameters `a < b`.
    pub fn piece(&self, a: f64, b: f64) -> Segment {
        match *self {
            Segment::Line { .. } => Segment::Line {
                from: self.point(a),
                to: self.point(b),
            },
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Segment::Arc {
                center,
                radius,
                start_angle: start_angle + sweep * a,
                sweep: sweep * (b - a),
            },
        }
    }

    /// Smallest distance from the segment to `p`.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let s = if len2 == 0.0 {
                    0.0
                } else {
                    ((p - from) * d.conj()).re / len2
                };
                (self.point(s.clamp(0.0, 1.0)) - p).norm()
            }
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let rel = p - center;
                let mut best = (self.point(0.0) - p)
                    .norm()
                    .min((self.point(1.0) - p).norm());
                if rel.norm() > 0.0 {
                    let ang = rel.arg();
                    let (lo, span) = if sweep >= 0.0 {
                        (start_angle, sweep)
                    } else {
                        (start_angle + sweep, -sweep)
                    };
                    let off = (ang - lo).rem_euclid(TAU);
                    if off <= span || span >= TAU {
                        best = best.min((rel.norm() - radius).abs());
                    }
                } else {
                    best = radius;
                }
                best
            }
        }
    }
}

/// A piecewise path `w(t)`, `t ∈ [0,1]`, each segment taking an equal share of `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanePath {
    pub segments: Vec<Segment>,
    /// Minimal distance to the critical values (filled in by [`PlanePath::with_clearance`]).
    pub clearance: f64,
    /// Set when the path is meant to terminate at a critical value.
    pub radial_collision: bool,
}

impl PlanePath {
    pub fn new(segments: Vec<Segment>) -> Self {
        PlanePath {
            segments,
            clearance: f64::NAN,
            radial_collision: false,
        }
    }

    pub fn line(from: Complex64, to: Complex64) -> Self {
        Self::new(vec![Segment::Line { from, to }])
    }

    /// Full counter-clockwise circle starting at angle `start_angle`.
    pub fn circle(center: Complex64, radius: f64, start_angle: f64) -> Self {
        Self::new(vec![Segment::Arc {
            center,
            radius,
            start_angle,
            sweep: TAU,
        }])
    }

    /// Lasso around `v`: approach from `w0`, full circle of radius `r`, return.
    pub fn petal(w0: Complex64, v: Complex64, r: f64) -> Self {
        let dir = (w0 - v) / (w0 - v).norm();
        let entry = v + dir * r;
        Self::new(vec![
            Segment::Line {
                from: w0,
                to: entry,
            },
            Segment::Arc {
                center: v,
                radius: r,
                start_angle: dir.arg(),
                sweep: TAU,
            },
            Segment::Line {
                from: entry,
                to: w0,
            },
        ])
    }

    pub fn constant(w: Complex64) -> Self {
        Self::line(w, w)
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].point(1.0)
    }

    pub fn point(&self, t: f64) -> Complex64 {
        let m = self.segments.len();
        let x = (t.clamp(0.0, 1.0) * m as f64).min(m as f64 - 1e-300);
        let i = (x.floor() as usize).min(m - 1);
        self.segments[i].point(x - i as f64)
    }

    pub fn is_closed(&self) -> bool {
        (self.start() - self.end()).norm() <= 1e-12
    }

    pub fn reversed(&self) -> Self {
        PlanePath {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            clearance: self.clearance,
            radial_collision: false,
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PlanePath) -> Self {
        let mut segments = self.segments.clone();
        segments.extend(next.segments.iter().copied());
        PlanePath {
            segments,
            clearance: self.clearance.min(next.clearance),
            radial_collision: next.radial_collision,
        }
    }

    pub fn with_clearance(mut self, critical_values: &[Complex64]) -> Self {
        self.clearance = critical_values
            .iter()
            .flat_map(|&v| self.segments.iter().map(move |s| s.distance_to(v)))
            .fold(f64::INFINITY, f64::min);
        self
    }
}

/// Accepted steps of one lifted path.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberTrack<T: Real = f64> {
    pub start: Complex<T>,
    pub samples: Vec<(f64, Complex<T>)>,
    pub end: Complex<T>,
    pub min_b_derivative: f64,
    pub steps: usize,
}

/// Path lifting for one product at working precision `T`.
pub struct Tracker<'a, T: Real> {
    pub b: &'a FiniteBlaschke,
    pub tol: &'a Tolerances,
    pub crit: CriticalData<T>,
    pub critical_values: Vec<Complex64>,
    pub record_samples: bool,
}

impl<'a, T: Real> Tracker<'a, T> {
    pub fn new(b: &'a FiniteBlaschke, tol: &'a Tolerances) -> Result<Self> {
        let crit = critical_points_in::<T>(b, tol, false)?;
        Ok(Self::with_critical_data(b, tol, crit))
    }

    pub fn with_critical_data(
        b: &'a FiniteBlaschke,
        tol: &'a Tolerances,
        crit: CriticalData<T>,
    ) -> Self {
        let critical_values = crit.critical_values.iter().map(|&v| cto(v)).collect();
        Tracker {
            b,
            tol,
            crit,
            critical_values,
            record_samples: false,
        }
    }

    /// Distance from `w` to the critical values and to the unit circle.
    pub fn clearance_at(&self, w: Complex64) -> f64 {
        self.critical_values
            .iter()
            .map(|&v| (v - w).norm())
            .fold(1.0 - w.norm(), f64::min)
    }

    /// Split a segment so each piece is at most half as long as its clearance.
    fn subdivide(&self, seg: &Segment) -> Result<Vec<Segment>> {
        let len = seg.length();
        if len == 0.0 {
            return Ok(vec![*seg]);
        }
        let mut pieces = Vec::new();
        let mut s = 0.0;
        while s < 1.0 {
            let c = self.clearance_at(seg.point(s));
            if !(c > 0.0) {
                return Err(Error::Parameter(format!(
                    "path passes through a critical value or leaves the disk at {}",
                    seg.point(s)
                )));
            }
            let ds = (0.5 * c / len).min(1.0 - s);
            let next = if 1.0 - (s + ds) < 1e-14 { 1.0 } else { s + ds };
            pieces.push(seg.piece(s, next));
            s = next;
            if pieces.len() > 100_000 {
                return Err(Error::StepUnderflow { t: s });
            }
        }
        Ok(pieces)
    }

    fn local_sep(d1: Complex<T>, d2: Complex<T>) -> f64 {
        let a = cabs_f64(d1);
        let b = cabs_f64(d2);
        if b == 0.0 {
            1.0
        } else {
            (2.0 * a / b).min(1.0)
        }
    }

    /// Newton-correct `z` onto `B(z) = w`.
    pub fn correct(&self, z: Complex<T>, w: Complex<T>) -> Result<Complex<T>> {
        let mut z = z;
        for _ in 0..self.tol.newton_max {
            let d = self.b.derivatives(z, 2);
            let sep = Self::local_sep(d[1], d[2]);
            if cnorm_sqr(d[1]) == T::zero() {
                break;
            }
            let delta = cdiv(d[0] - w, d[1]);
            z = z - delta;
            if cabs_f64(delta) <= self.conv_tol(sep, z, cabs_f64(d[1])) {
                break;
            }
        }
        let (v, d) = self.b.eval_d(z);
        let r = cabs_f64(v - w);
        if r > self.tol.track_residual * cabs_f64(d).max(1.0) {
            return Err(Error::Parameter(format!(
                "start point residual {r:e} too large"
            )));
        }
        Ok(z)
    }

    /// Newton stopping size: relative to the separation, but never below the
    /// evaluation noise `n EPS / |B'|`.
    fn conv_tol(&self, sep: f64, z: Complex<T>, db: f64) -> f64 {
        let noise = 16.0 * self.b.degree() as f64 * T::EPSILON / db.max(1e-300);
        (1e-12 * sep)
            .max(32.0 * T::EPSILON * cabs_f64(z).max(1e-300))
            .max(noise)
    }

    /// Track `z` along `curve(s) = (w, dw/ds)` for `s` from 0 to 1.
    ///
    /// Euler predictor `dz = w' ds / B'`, at most `newton_max` corrections; the
    /// step halves when a correction exceeds `sep_fraction` of the local fiber
    /// separation `2|B'|/|B''|` or the step moves more than a third of it.
    pub fn track_curve<C>(
        &self,
        curve: C,
        z0: Complex<T>,
        t_range: (f64, f64),
        track: &mut FiberTrack<T>,
    ) -> Result<Complex<T>>
    where
        C: Fn(f64) -> (Complex64, Complex64),
    {
        let mut z = z0;
        let mut s = 0.0;
        let mut h = 1.0;
        let mut easy = 0;
        let tol = self.tol;
        while s < 1.0 {
            if h < tol.min_step {
                return Err(Error::StepUnderflow {
                    t: t_range.0 + s * (t_range.1 - t_range.0),
                });
            }
            let he = h.min(1.0 - s);
            let s1 = if 1.0 - (s + he) < 1e-15 { 1.0 } else { s + he };
            let d = self.b.derivatives(z, 2);
            let sep = Self::local_sep(d[1], d[2]);
            let (_, wdot) = curve(s);
            let dz = cdiv(cfrom::<T>(wdot * (s1 - s)), d[1]);
            if cabs_f64(dz) > sep / 3.0 {
                h = he / 2.0;
                easy = 0;
                continue;
            }
            let target: Complex<T> = cfrom(curve(s1).0);
            let mut z1 = z + dz;
            let mut converged = false;
            let mut iters = 0;
            let mut last_d = d[1];
            for k in 0..tol.newton_max {
                let (v, dv) = self.b.eval_d(z1);
                if cnorm_sqr(dv) == T::zero() {
                    break;
                }
                let delta = cdiv(v - target, dv);
                let dn = cabs_f64(delta);
                if k == 0 && dn > tol.sep_fraction * sep {
                    break;
                }
                z1 = z1 - delta;
                last_d = dv;
                iters = k + 1;
                if dn <= self.conv_tol(sep, z1, cabs_f64(dv)) {
                    converged = true;
                    break;
                }
            }
            if !converged || cabs_f64(z1 - z) > sep / 3.0 {
                h = he / 2.0;
                easy = 0;
                continue;
            }
            let db = cabs_f64(last_d);
            if db < tol.near_critical {
                return Err(Error::NearCritical {
                    t: t_range.0 + s1 * (t_range.1 - t_range.0),
                    derivative: db,
                });
            }
            track.min_b_derivative = track.min_b_derivative.min(db);
            track.steps += 1;
            s = s1;
            z = z1;
            if self.record_samples {
                track
                    .samples
                    .push((t_range.0 + s * (t_range.1 - t_range.0), z));
            }
            if iters <= 2 {
                easy += 1;
                if easy >= 4 {
                    h = (2.0 * h).min(1.0);
                    easy = 0;
                }
            } else {
                easy = 0;
            }
        }
        Ok(z)
    }

    /// Lift `path` starting from `z_start` (which must lie over `w(0)`).
    pub fn lift(&self, path: &PlanePath, z_start: Complex<T>) -> Result<FiberTrack<T>> {
        let z0 = self.correct(z_start, cfrom(path.start()))?;
        let mut track = FiberTrack {
            start: z0,
            samples: if self.record_samples {
                vec![(0.0, z0)]
            } else {
                Vec::new()
            },
            end: z0,
            min_b_derivative: f64::INFINITY,
            steps: 0,
        };
        let m = path.segments.len() as f64;
        let mut z = z0;
        for (i, seg) in path.segments.iter().enumerate() {
            let pieces = self.subdivide(seg)?;
            let np = pieces.len() as f64;
            for (k, piece) in pieces.iter().enumerate() {
                let t0 = (i as f64 + k as f64 / np) / m;
                let t1 = (i as f64 + (k + 1) as f64 / np) / m;
                z = self.track_curve(
                    |s| (piece.point(s), piece.velocity(s)),
                    z,
                    (t0, t1),
                    &mut track,
                )?;
            }
        }
        let (v, _) = self.b.eval_d(z);
        let r = cabs_f64(v - cfrom(path.end()));
        if r > self.tol.track_residual {
            return Err(Error::Consistency(format!("track end residual {r:e}")));
        }
        track.end = z;
        Ok(track)
    }

    /// Permutation of `base` induced by lifting the closed path `lp`.
    pub fn loop_permutation(&self, lp: &PlanePath, base: &Fiber<T>) -> Result<Permutation> {
        if !lp.is_closed() {
            return Err(Error::Parameter("loop is not closed".into()));
        }
        if !base.is_simple() {
            return Err(Error::Parameter("base fiber has a multiple point".into()));
        }
        let ends = base
            .points
            .par_iter()
            .map(|&z| self.lift(lp, z).map(|t| t.end))
            .collect::<Result<Vec<_>>>()?;
        let images = guarded_assignment(&ends, &base.points, self.tol.match_guard)?;
        Permutation::new(images)
    }

    /// Radial collision blocks of `base` (the fiber over `w0`) at the critical value `v`.
    pub fn radial_collision(
        &self,
        base: &Fiber<T>,
        w0: Complex64,
        v: Complex64,
    ) -> Result<Collision> {
        let tol = self.tol;
        // Values are handed over in f64, so matching cannot be finer than its spacing.
        let same = (1e-12 * (1.0 - v.norm())).max(8.0 * f64::EPSILON * v.norm());
        let over: Vec<(Complex<T>, usize)> = self
            .crit
            .critical_points
            .iter()
            .zip(&self.crit.critical_values)
            .filter(|(_, &cv)| cabs_f64(cfrom::<T>(v) - cv) <= same)
            .map(|(&p, _)| p)
            .collect();
        if over.is_empty() {
            return Err(Error::Parameter(format!("{v} is not a critical value")));
        }
        let dist = (v - w0).norm();
        let others = self
            .critical_values
            .iter()
            .filter(|&&u| (u - v).norm() > same)
            .map(|&u| (u - v).norm())
            .fold(f64::INFINITY, f64::min);
        let scale = dist.min(1.0 - v.norm()).min(others);
        let dir = (w0 - v) / dist;
        let mut eps = tol.collision_eps;
        let mut last_reason = String::new();
        for _ in 0..=tol.collision_retries {
            let w1 = v + dir * (eps * scale);
            let w2 = v + dir * (eps * scale / 16.0);
            let first = PlanePath::line(w0, w1);
            let second = PlanePath::line(w1, w2);
            let ends = base
                .points
                .par_iter()
                .map(|&z| {
                    let a = self.lift(&first, z)?.end;
                    let b = self.lift(&second, a)?.end;
                    Ok((a, b))
                })
                .collect::<Result<Vec<_>>>()?;
            match self.cluster(&over, &ends, (w2 - v).norm()) {
                Ok((blocks, orders)) => {
                    return Ok(Collision {
                        value: v,
                        blocks,
                        order_estimates: orders,
                        eps,
                    });
                }
                Err(reason) => last_reason = reason,
            }
            eps /= 10.0;
        }
        Err(Error::Refinement(last_reason))
    }

    #[allow(clippy::type_complexity)]
    fn cluster(
        &self,
        over: &[(Complex<T>, usize)],
        ends: &[(Complex<T>, Complex<T>)],
        dw: f64,
    ) -> std::result::Result<(Vec<Vec<usize>>, Vec<f64>), String> {
        let n = ends.len();
        let mut assigned: Vec<Option<usize>> = vec![None; n];
        let mut orders = vec![f64::NAN; over.len()];
        for (i, &(a, b)) in ends.iter().enumerate() {
            let (ci, d2) = over
                .iter()
                .enumerate()
                .map(|(k, &(c, _))| (k, cabs_f64(b - c)))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty");
            let d1 = cabs_f64(a - over[ci].0);
            if d1 > 0.0 && d2 / d1 < self.tol.collision_ratio {
                assigned[i] = Some(ci);
            }
        }
        let mut blocks = Vec::new();
        for (k, &(c, mu)) in over.iter().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&i| assigned[i] == Some(k)).collect();
            if members.len() != mu + 1 {
                return Err(format!(
                    "critical point {} of order {} collected {} tracks",
                    cto(c),
                    mu + 1,
                    members.len()
                ));
            }
            let ders = self.b.derivatives(c, mu + 1);
            let fact: f64 = (1..=mu + 1).map(|x| x as f64).product();
            let radius = (dw * fact / cabs_f64(ders[mu + 1])).powf(1.0 / (mu + 1) as f64);
            let spread = members
                .iter()
                .map(|&i| cabs_f64(ends[i].1 - c))
                .fold(0.0, f64::max);
            let gap = (0..n)
                .filter(|i| !members.contains(i))
                .map(|i| cabs_f64(ends[i].1 - c))
                .fold(f64::INFINITY, f64::min);
            if spread > 3.0 * radius {
                return Err(format!(
                    "cluster spread {spread:e} exceeds Puiseux radius {radius:e}"
                ));
            }
            if gap < self.tol.cluster_gap * spread {
                return Err(format!(
                    "cluster gap {gap:e} below {} x spread {spread:e}",
                    self.tol.cluster_gap
                ));
            }
            let ratio: f64 = members
                .iter()
                .map(|&i| cabs_f64(ends[i].1 - c) / cabs_f64(ends[i].0 - c))
                .sum::<f64>()
                / members.len() as f64;
            orders[k] = 16f64.ln() / (1.0 / ratio).ln();
            blocks.push(members);
        }
        Ok((blocks, orders))
    }
}

/// Fiber indices whose tracks meet at a common critical point over `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct Collision {
    pub value: Complex64,
    /// One block per critical point over `value`; points not listed do not collide.
    pub blocks: Vec<Vec<usize>>,
    /// Branching order estimated from the contraction rate, per block.
    pub order_estimates: Vec<f64>,
    /// Stopping distance actually used, relative to the local scale.
    pub eps: f64,
}

impl Collision {
    /// Full partition of `0..n`: collision blocks followed by singletons.
    pub fn partition(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = self.blocks.clone();
        for i in 0..n {
            if !self.blocks.iter().any(|b| b.contains(&i)) {
                out.push(vec![i]);
            }
        }
        out
    }
}

/// Lift `path` from `z_start` in double precision.
pub fn lift_path(b: &FiniteBlaschke, path: &PlanePath, z_start: Complex64) -> Result<FiberTrack> {
    let tol = Tolerances::default();
    if b.needs_extended(&tol) {
        let tr = Tracker::<Qd>::new(b, &tol)?;
        let t = tr.lift(path, promote(z_start))?;
        return Ok(FiberTrack {
            start: cto(t.start),
            samples: t.samples.iter().map(|&(s, z)| (s, cto(z))).collect(),
            end: cto(t.end),
            min_b_derivative: t.min_b_derivative,
            steps: t.steps,
        });
    }
    let mut tr = Tracker::<f64>::new(b, &tol)?;
    tr.record_samples = true;
    tr.lift(path, z_start)
}

/// Monodromy permutation of `base_fiber` along the closed path `lp`.
pub fn lift_loop_permutation(
    b: &FiniteBlaschke,
    lp: &PlanePath,
    base_fiber: &Fiber,
) -> Result<Permutation> {
    let tol = Tolerances::default();
    let tr = Tracker::<f64>::new(b, &tol)?;
    tr.loop_permutation(lp, base_fiber)
}

/// Partition of the fiber over `w0` by collision at the critical value `v`.
pub fn radial_collision(
    b: &FiniteBlaschke,
    w0: Complex64,
    v: Complex64,
) -> Result<Vec<Vec<usize>>> {
    let tol = Tolerances::default();
    let tr = Tracker::<f64>::new(b, &tol)?;
    let base = crate::roots::fiber_in::<f64>(b, w0, &tol)?;
    Ok(tr.radial_collision(&base, w0, v)?.partition(base.len()))
}

/// Relative tolerance for comparing values at working precision `T`.
pub fn scaled_tol<T: Real>(tol64: f64) -> f64 {
    tol64 * precision_ratio::<T>()
}
