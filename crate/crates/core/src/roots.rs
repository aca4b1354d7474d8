//! Polynomial roots, fibers `B^{-1}(w)`, critical points and the exceptional set.

use num_complex::{Complex, Complex64};

use crate::blaschke::{horner, FiniteBlaschke};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::mobius::{demote, promote, pseudo_distance};
use crate::qd::{cabs_f64, cdiv, cfrom, cnorm_sqr, cto, Qd, Real};

/// `T::EPSILON / f64::EPSILON`: rescales double-precision tolerances.
pub fn precision_ratio<T: Real>() -> f64 {
    T::EPSILON / f64::EPSILON
}

/// Distance under which two computed roots are treated as one multiple root.
pub fn cluster_tol<T: Real>() -> f64 {
    if T::EPSILON < 1e-30 {
        1e-24
    } else {
        1e-6
    }
}

fn eval_with_bound<T: Real>(
    c: &[Complex<T>],
    abs_c: &[f64],
    z: Complex<T>,
) -> (Complex<T>, Complex<T>, f64) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut dp = p;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    let r = cabs_f64(z);
    let mut bound = 0.0;
    for &a in abs_c.iter().rev() {
        bound = bound * r + a;
    }
    (p, dp, bound)
}

fn circle_start<T: Real>(c: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = c.len() - 1;
    let lead = cto(c[n]);
    let center = -cto(c[n - 1]) / (lead * n as f64);
    let cc: Vec<Complex64> = c.iter().map(|&a| cto(a)).collect();
    let mut radius = (horner(&cc, center) / lead).norm().powf(1.0 / n as f64);
    if !(radius.is_finite() && radius > 0.0) {
        radius = 1.0;
    }
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.7;
            cfrom(center + Complex64::from_polar(radius, t))
        })
        .collect()
}

/// Aberth–Ehrlich sweeps from the given start; returns the iterate and whether it converged.
fn aberth<T: Real>(
    c: &[Complex<T>],
    mut z: Vec<Complex<T>>,
    max_sweeps: usize,
) -> (Vec<Complex<T>>, bool, usize) {
    let n = z.len();
    let abs_c: Vec<f64> = c.iter().map(|&a| cabs_f64(a)).collect();
    let eps = T::EPSILON;
    let mut done = vec![false; n];
    for sweep in 0..max_sweeps {
        let mut active = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = eval_with_bound(c, &abs_c, z[i]);
            if cabs_f64(p) <= 8.0 * n as f64 * eps * bound {
                done[i] = true;
                continue;
            }
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if cnorm_sqr(d) > T::zero() {
                        s = s + cdiv(Complex::new(T::one(), T::zero()), d);
                    }
                }
            }
            let denom = dp - p * s;
            if cnorm_sqr(denom) == T::zero() {
                z[i] = z[i] + cfrom(Complex64::new(1e-3, 1e-3));
                active = true;
                continue;
            }
            let w = cdiv(p, denom);
            z[i] = z[i] - w;
            if cabs_f64(w) <= 4.0 * eps * cabs_f64(z[i]) {
                done[i] = true;
            }
            active = true;
        }
        if !active {
            return (z, true, sweep);
        }
    }
    (z, false, max_sweeps)
}

/// Roots of `sum c_k z^k` (ascending coefficients), with multiplicity.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    poly_roots_in(coeffs, &Tolerances::default())
}

pub fn poly_roots_in<T: Real>(coeffs: &[Complex<T>], tol: &Tolerances) -> Result<Vec<Complex<T>>> {
    let max = coeffs.iter().map(|&a| cabs_f64(a)).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::Parameter("zero polynomial".into()));
    }
    let trim = tol.coeff_trim * precision_ratio::<T>() * max;
    let mut hi = coeffs.len();
    while hi > 0 && cabs_f64(coeffs[hi - 1]) <= trim {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && cnorm_sqr(coeffs[lo]) == T::zero() {
        lo += 1;
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut roots = vec![zero; lo];
    let c = &coeffs[lo..hi];
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-cdiv(c[0], c[1]));
        return Ok(roots);
    }
    let start = if T::EPSILON < f64::EPSILON {
        let c64: Vec<Complex64> = c.iter().map(|&a| cto(a)).collect();
        let (z, _, _) = aberth(&c64, circle_start(&c64), tol.root_max_sweeps);
        z.into_iter().map(cfrom).collect()
    } else {
        circle_start(c)
    };
    let (mut z, _converged, _) = aberth(c, start, tol.root_max_sweeps);
    // Newton polish, kept only when it lowers the residual
    for r in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = horner_d(c, *r);
            if cnorm_sqr(dp) == T::zero() {
                break;
            }
            let cand = *r - cdiv(p, dp);
            if cabs_f64(horner(c, cand)) < cabs_f64(p) {
                *r = cand;
            } else {
                break;
            }
        }
    }
    let norm = c.iter().map(|&a| cabs_f64(a).powi(2)).sum::<f64>().sqrt();
    let bound = tol.root_residual * precision_ratio::<T>().max(1e-40) * norm;
    let bad = z.iter().any(|&r| {
        let scale = cabs_f64(r).max(1.0).powi(n as i32);
        !(cabs_f64(horner(c, r)) <= bound * scale)
    });
    if bad {
        return Err(Error::Convergence {
            sweeps: tol.root_max_sweeps,
            best: z.iter().map(|&r| cto(r)).collect(),
        });
    }
    roots.extend(z);
    Ok(roots)
}

fn horner_d<T: Real>(c: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::new(T::zero(), T::zero());
    let mut dp = p;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// The solution set `B^{-1}(w)`, listed with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber<T: Real = f64> {
    pub target: Complex<T>,
    pub points: Vec<Complex<T>>,
    /// Size of the root cluster each point belongs to.
    pub multiplicity: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl<T: Real> Fiber<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicity.iter().all(|&m| m == 1)
    }

    /// Distinct points with their multiplicities, in listing order.
    pub fn distinct(&self) -> Vec<(Complex<T>, usize)> {
        let mut out: Vec<(Complex<T>, usize)> = Vec::new();
        let tol = cluster_tol::<T>();
        for (&p, &m) in self.points.iter().zip(&self.multiplicity) {
            if m > 1 && out.iter().any(|(q, _)| cabs_f64(*q - p) <= tol) {
                continue;
            }
            out.push((p, m));
        }
        out
    }

    pub fn to_f64(&self) -> Fiber<f64> {
        Fiber {
            target: cto(self.target),
            points: self.points.iter().map(|&p| cto(p)).collect(),
            multiplicity: self.multiplicity.clone(),
            residuals: self.residuals.clone(),
        }
    }
}

fn polish_on_product<T: Real>(b: &FiniteBlaschke, w: Complex<T>, z: Complex<T>) -> Complex<T> {
    let mut z = z;
    let (v, d) = b.eval_d(z);
    let mut res = cabs_f64(v - w);
    if cnorm_sqr(d) == T::zero() {
        return z;
    }
    let mut step = cdiv(v - w, d);
    for _ in 0..3 {
        let cand = z - step;
        let (v2, d2) = b.eval_d(cand);
        let r2 = cabs_f64(v2 - w);
        if r2 < res && cnorm_sqr(d2) > T::zero() {
            z = cand;
            res = r2;
            step = cdiv(v2 - w, d2);
        } else {
            break;
        }
    }
    z
}

fn sort_key<T: Real>(z: Complex<T>) -> (f64, f64) {
    let c = cto(z);
    (c.arg(), c.norm())
}

/// Cluster sizes for a root list (distance below `cluster_tol`).
fn cluster_sizes<T: Real>(pts: &[Complex<T>]) -> Vec<usize> {
    let tol = cluster_tol::<T>();
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if cabs_f64(pts[i] - pts[j]) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    roots
        .iter()
        .map(|r| roots.iter().filter(|s| *s == r).count())
        .collect()
}

/// `B^{-1}(w)` in working precision `T`.
pub fn fiber_in<T: Real>(b: &FiniteBlaschke, w: Complex<T>, tol: &Tolerances) -> Result<Fiber<T>> {
    if !(cnorm_sqr(w) < T::one()) {
        return Err(Error::Parameter(format!(
            "fiber target {} outside the disk",
            cto(w)
        )));
    }
    let (p, q) = b.rational_in::<T>(tol)?;
    let mut c = p;
    for (i, &qi) in q.iter().enumerate() {
        c[i] = c[i] - w * qi;
    }
    let raw = poly_roots_in(&c, tol)?;
    if raw.len() != b.degree() {
        return Err(Error::Consistency(format!(
            "fiber has {} points, degree is {}",
            raw.len(),
            b.degree()
        )));
    }
    let sizes0 = cluster_sizes(&raw);
    let mut pts: Vec<Complex<T>> = raw
        .iter()
        .zip(&sizes0)
        .map(|(&z, &m)| {
            if m == 1 {
                polish_on_product(b, w, z)
            } else {
                z
            }
        })
        .collect();
    pts.sort_by(|a, b| {
        sort_key(*a)
            .partial_cmp(&sort_key(*b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let margin = tol.fiber_boundary_margin * precision_ratio::<T>();
    for &z in &pts {
        let oms = (T::one() - cnorm_sqr(z)).to_f64();
        if oms <= 2.0 * margin {
            return Err(Error::Consistency(format!(
                "fiber point {} lies within {margin:e} of the unit circle",
                cto(z)
            )));
        }
    }
    let multiplicity = cluster_sizes(&pts);
    let mut residuals = Vec::with_capacity(pts.len());
    for &z in &pts {
        let (v, d) = b.eval_d(z);
        let r = cabs_f64(v - w);
        if r > tol.fiber_residual * cabs_f64(d).max(1.0) {
            return Err(Error::Consistency(format!(
                "fiber residual {r:e} at {}",
                cto(z)
            )));
        }
        residuals.push(r);
    }
    Ok(Fiber {
        target: w,
        points: pts,
        multiplicity,
        residuals,
    })
}

/// Fiber over a quad-double target, solved in quad-double.
pub fn fiber_qd_target(b: &FiniteBlaschke, w: Complex<Qd>, tol: &Tolerances) -> Result<Fiber<Qd>> {
    fiber_in::<Qd>(b, w, tol)
}

/// `B^{-1}(w)` for `|w| < 1`, in the precision the product needs.
pub fn fiber(b: &FiniteBlaschke, w: Complex64) -> Result<Fiber> {
    fiber_with(b, w, &Tolerances::default())
}

pub fn fiber_with(b: &FiniteBlaschke, w: Complex64, tol: &Tolerances) -> Result<Fiber> {
    if b.needs_extended(tol) {
        Ok(fiber_in::<Qd>(b, promote(w), tol)?.to_f64())
    } else {
        fiber_in::<f64>(b, w, tol)
    }
}

/// Critical points in the disk with multiplicities, values and the exceptional set.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalData<T: Real = f64> {
    pub critical_points: Vec<(Complex<T>, usize)>,
    pub critical_values: Vec<Complex<T>>,
    /// `|B''|` at each critical point.
    pub second_derivatives: Vec<f64>,
    pub exceptional_preimage: Vec<Complex<T>>,
    pub warnings: Vec<String>,
}

impl<T: Real> CriticalData<T> {
    /// Number of critical points counted with multiplicity.
    pub fn count(&self) -> usize {
        self.critical_points.iter().map(|c| c.1).sum()
    }

    /// Critical values with coincidences (within `tol`) merged, in listing order.
    pub fn distinct_values(&self, tol: f64) -> Vec<Complex<T>> {
        let mut out: Vec<Complex<T>> = Vec::new();
        for &v in &self.critical_values {
            if !out.iter().any(|&u| cabs_f64(u - v) <= tol) {
                out.push(v);
            }
        }
        out
    }

    pub fn to_f64(&self) -> CriticalData<f64> {
        CriticalData {
            critical_points: self
                .critical_points
                .iter()
                .map(|&(p, m)| (cto(p), m))
                .collect(),
            critical_values: self.critical_values.iter().map(|&v| cto(v)).collect(),
            second_derivatives: self.second_derivatives.clone(),
            exceptional_preimage: self.exceptional_preimage.iter().map(|&e| cto(e)).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Numerator of `B'/B` over the distinct zeros; its disk roots are the
/// critical points of `B` away from multiple zeros.
fn critical_numerator(b: &FiniteBlaschke) -> Vec<Complex<Qd>> {
    let zq = |x: f64| Complex::new(Qd::from_f64(x), Qd::ZERO);
    let factors: Vec<[Complex<Qd>; 3]> = b
        .zeros()
        .iter()
        .map(|z| {
            let l = z.point.exact;
            let abs2 = Qd::ONE - z.point.one_minus_abs_sq;
            [l, -Complex::new(Qd::ONE + abs2, Qd::ZERO), l.conj()]
        })
        .collect();
    let k = factors.len();
    let mut total = vec![zq(0.0); 2 * k - 1];
    for (l, zl) in b.zeros().iter().enumerate() {
        let mut acc = vec![zq(1.0)];
        for (j, f) in factors.iter().enumerate() {
            if j == l {
                continue;
            }
            let mut next = vec![zq(0.0); acc.len() + 2];
            for (i, &a) in acc.iter().enumerate() {
                for (d, &fc) in f.iter().enumerate() {
                    next[i + d] = next[i + d] + a * fc;
                }
            }
            acc = next;
        }
        let scale = -zl.point.one_minus_abs_sq.mul_f64(zl.multiplicity as f64);
        for (i, a) in acc.into_iter().enumerate() {
            total[i] = total[i] + Complex::new(a.re * scale, a.im * scale);
        }
    }
    total
}

/// Critical data in working precision `T`, optionally skipping the exceptional set.
pub fn critical_points_in<T: Real>(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    with_exceptional: bool,
) -> Result<CriticalData<T>> {
    let n = b.degree();
    let mut warnings = Vec::new();
    let zs = b.zeros();
    for i in 0..zs.len() {
        for j in 0..i {
            if pseudo_distance(&zs[i].point, &zs[j].point) < tol.conditioning_warning {
                warnings.push(format!(
                    "zeros {j} and {i} are within pseudohyperbolic distance {:e}",
                    tol.conditioning_warning
                ));
            }
        }
    }
    let mut pts: Vec<(Complex<T>, usize)> = Vec::new();
    if zs.len() >= 2 {
        let num: Vec<Complex<T>> = critical_numerator(b).into_iter().map(demote).collect();
        let roots = poly_roots_in(&num, tol)?;
        let inside: Vec<Complex<T>> = roots
            .into_iter()
            .filter(|&r| cnorm_sqr(r) < T::one())
            .map(|r| polish_critical(b, r))
            .collect();
        let sizes = cluster_sizes(&inside);
        let ctol = cluster_tol::<T>();
        let mut used = vec![false; inside.len()];
        for i in 0..inside.len() {
            if used[i] {
                continue;
            }
            let members: Vec<usize> = (i..inside.len())
                .filter(|&j| !used[j] && cabs_f64(inside[j] - inside[i]) <= ctol)
                .collect();
            let s = sizes[i];
            let center = if s > 1 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &j in &members {
                    acc = acc + inside[j];
                }
                cdiv(acc, cfrom(Complex64::new(members.len() as f64, 0.0)))
            } else {
                inside[i]
            };
            let mu = derivative_multiplicity(b, center, s, tol.multiplicity_threshold);
            if mu == s {
                pts.push((center, s));
            } else {
                for &j in &members {
                    pts.push((inside[j], 1));
                }
            }
            for &j in &members {
                used[j] = true;
            }
        }
    }
    for z in zs {
        if z.multiplicity >= 2 {
            pts.push((T::zero_of(&z.point), z.multiplicity - 1));
        }
    }
    let found: usize = pts.iter().map(|p| p.1).sum();
    if found != n - 1 {
        return Err(Error::Bochner {
            expected: n - 1,
            found,
        });
    }
    pts.sort_by(|a, b| {
        sort_key(a.0)
            .partial_cmp(&sort_key(b.0))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut values = Vec::with_capacity(pts.len());
    let mut second = Vec::with_capacity(pts.len());
    for &(c, _) in &pts {
        let d = b.derivatives(c, 2);
        values.push(d[0]);
        second.push(cabs_f64(d[2]));
    }
    let mut data = CriticalData {
        critical_points: pts,
        critical_values: values,
        second_derivatives: second,
        exceptional_preimage: Vec::new(),
        warnings,
    };
    if with_exceptional {
        data.exceptional_preimage = exceptional_set(b, &data, tol)?;
    }
    Ok(data)
}

fn polish_critical<T: Real>(b: &FiniteBlaschke, c: Complex<T>) -> Complex<T> {
    let mut c = c;
    for _ in 0..2 {
        let d = b.derivatives(c, 2);
        if cnorm_sqr(d[2]) == T::zero() {
            break;
        }
        let cand = c - cdiv(d[1], d[2]);
        if cabs_f64(b.derivatives(cand, 1)[1]) < cabs_f64(d[1]) {
            c = cand;
        } else {
            break;
        }
    }
    c
}

/// Order of vanishing of `B'` at `c` read off successive derivatives, capped at `cap`.
fn derivative_multiplicity<T: Real>(
    b: &FiniteBlaschke,
    c: Complex<T>,
    cap: usize,
    threshold: f64,
) -> usize {
    if cap <= 1 {
        return 1;
    }
    let d = b.derivatives(c, cap + 1);
    let mut mu = 1;
    while mu < cap && cabs_f64(d[mu + 1]) < threshold {
        mu += 1;
    }
    mu
}

fn exceptional_set<T: Real>(
    b: &FiniteBlaschke,
    data: &CriticalData<T>,
    tol: &Tolerances,
) -> Result<Vec<Complex<T>>> {
    let dedup = if T::EPSILON < 1e-30 {
        1e-30
    } else {
        tol.exceptional_dedup
    };
    let snap = cluster_tol::<T>()
        .max(1e3 * dedup)
        .max(T::EPSILON.sqrt() * 100.0);
    let mut out: Vec<Complex<T>> = Vec::new();
    for v in data.distinct_values(0.0) {
        let fib = fiber_in(b, v, tol)?;
        for &p in &fib.points {
            let snapped = data
                .critical_points
                .iter()
                .map(|&(c, _)| c)
                .find(|&c| cabs_f64(c - p) <= snap)
                .unwrap_or(p);
            if !out.iter().any(|&e| cabs_f64(e - snapped) <= dedup) {
                out.push(snapped);
            }
        }
    }
    Ok(out)
}

/// Critical data of `B`; quad-double is used internally when the product needs it.
pub fn critical_points(b: &FiniteBlaschke) -> Result<CriticalData> {
    critical_points_with(b, &Tolerances::default())
}

pub fn critical_points_with(b: &FiniteBlaschke, tol: &Tolerances) -> Result<CriticalData> {
    if b.needs_extended(tol) {
        Ok(critical_points_in::<Qd>(b, tol, true)?.to_f64())
    } else {
        critical_points_in::<f64>(b, tol, true)
    }
}

/// Euclidean distance from `z` to the exceptional set (infinite when empty).
pub fn exceptional_distance(data: &CriticalData, z: Complex64) -> f64 {
    data.exceptional_preimage
        .iter()
        .map(|&e| (e - z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Nearest-point assignment `from[i] -> to[images[i]]` with a collision guard:
/// the second-best candidate must be more than `guard` times farther than the best.
pub fn guarded_assignment<T: Real>(
    from: &[Complex<T>],
    to: &[Complex<T>],
    guard: f64,
) -> Result<Vec<usize>> {
    if from.len() != to.len() {
        return Err(Error::Ambiguity(format!(
            "{} endpoints for {} targets",
            from.len(),
            to.len()
        )));
    }
    let mut images = Vec::with_capacity(from.len());
    for (i, &a) in from.iter().enumerate() {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (j, &b) in to.iter().enumerate() {
            let d = cabs_f64(a - b);
            if d < best.0 {
                second = best.0;
                best = (d, j);
            } else if d < second {
                second = d;
            }
        }
        if to.len() > 1 && second <= guard * best.0 {
            return Err(Error::Ambiguity(format!(
                "endpoint {i}: best distance {:e}, runner-up {:e}",
                best.0, second
            )));
        }
        images.push(best.1);
    }
    let mut seen = vec![false; to.len()];
    for &j in &images {
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::Ambiguity(format!(
                "two endpoints matched target {j}"
            )));
        }
    }
    Ok(images)
}
