//! Thin zero sequences, greedy thin extraction, the staged irreducible
//! construction, and detection of rotational symmetry in a zero set.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blaschke::{FiniteBlaschke, Zero, ZeroSequence};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::mobius::{ln_pseudo_distance, phi, DiskPoint};
use crate::monodromy::surface_components_with;
use crate::qd::{cabs_f64, cqd, Qd};
use crate::roots::{critical_points_with, CriticalData};

/// How the arguments `2 pi r_n` of the points are chosen.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgumentRule {
    Zero,
    /// Base-2 radical inverse of `n`, a dense sequence in `[0,1)`.
    #[default]
    VanDerCorput,
    /// Uniform, from the run seed.
    Random,
    List(Vec<f64>),
}

/// Ratios `c_n = (1 - |z_n|)/(1 - |z_{n-1}|)` for `n >= 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioSequence {
    /// `c_n = 1/n` (the factorial moduli when the first decrement is 1).
    Reciprocal,
    /// `c_n = base^{-n}`.
    InversePower { base: f64 },
    /// `c_2, c_3, ...`
    List(Vec<f64>),
}

impl RatioSequence {
    fn at(&self, n: usize) -> Result<f64> {
        let c = match self {
            RatioSequence::Reciprocal => 1.0 / n as f64,
            RatioSequence::InversePower { base } => base.powi(-(n as i32)),
            RatioSequence::List(v) => *v.get(n - 2).ok_or_else(|| {
                Error::InvalidSpec(format!("ratio list has no entry for n = {n}"))
            })?,
        };
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "ratio c_{n} = {c} must lie in (0,1)"
            )));
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitPoint {
    pub z: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decrement: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "args", rename_all = "snake_case")]
pub enum ThinRule {
    /// `|z_n| = 1 - 1/n!`
    Factorial,
    Ratio {
        c: RatioSequence,
        #[serde(default = "unit")]
        first_decrement: f64,
    },
    Explicit {
        points: Vec<ExplicitPoint>,
    },
}

fn unit() -> f64 {
    1.0
}

/// A zero-sequence recipe truncated at `n` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinSpec {
    #[serde(flatten)]
    pub rule: ThinRule,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    #[serde(default)]
    pub arguments: ArgumentRule,
}

impl ThinSpec {
    pub fn factorial(n: usize) -> Self {
        ThinSpec {
            rule: ThinRule::Factorial,
            n,
            arguments: ArgumentRule::VanDerCorput,
        }
    }
}

pub fn van_der_corput(mut n: usize) -> f64 {
    let mut q = 0.0;
    let mut bk = 0.5;
    while n > 0 {
        if n & 1 == 1 {
            q += bk;
        }
        n >>= 1;
        bk *= 0.5;
    }
    q
}

/// `1/n!` as a double (subnormal-free for `n <= 170`).
pub fn inverse_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc / k as f64)
}

/// Points of the sequence described by `spec`; `seed` drives random arguments.
pub fn generate_thin_sequence(
    spec: &ThinSpec,
    tol: &Tolerances,
    seed: u64,
) -> Result<ZeroSequence> {
    if spec.n > tol.max_truncation {
        return Err(Error::Capacity {
            degree: spec.n,
            max: tol.max_truncation,
        });
    }
    if spec.n == 0 {
        return Err(Error::InvalidSpec("truncation must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut angle = |n: usize| -> Result<f64> {
        let r = match &spec.arguments {
            ArgumentRule::Zero => 0.0,
            ArgumentRule::VanDerCorput => van_der_corput(n),
            ArgumentRule::Random => rng.gen::<f64>(),
            ArgumentRule::List(v) => *v.get(n - 1).ok_or_else(|| {
                Error::InvalidSpec(format!("argument list has no entry for n = {n}"))
            })?,
        };
        Ok(TAU * r)
    };
    let invalid = |e: Error| Error::InvalidSpec(e.to_string());
    let mut points = Vec::with_capacity(spec.n);
    let tag;
    match &spec.rule {
        ThinRule::Factorial => {
            tag = "factorial";
            for n in 1..=spec.n {
                points.push(
                    DiskPoint::from_polar_decrement(inverse_factorial(n), angle(n)?)
                        .map_err(invalid)?,
                );
            }
        }
        ThinRule::Ratio { c, first_decrement } => {
            tag = "ratio";
            let mut d = *first_decrement;
            for n in 1..=spec.n {
                if n >= 2 {
                    d *= c.at(n)?;
                }
                points.push(DiskPoint::from_polar_decrement(d, angle(n)?).map_err(invalid)?);
            }
        }
        ThinRule::Explicit { points: list } => {
            tag = "explicit";
            if list.len() < spec.n {
                return Err(Error::InvalidSpec(format!(
                    "{} explicit points for n = {}",
                    list.len(),
                    spec.n
                )));
            }
            for p in &list[..spec.n] {
                let z = Complex64::new(p.z[0], p.z[1]);
                let point = match p.decrement {
                    Some(e) => DiskPoint::from_polar_decrement(e, z.arg()),
                    None => DiskPoint::with_margin(z, tol.disk_margin),
                };
                points.push(point.map_err(invalid)?);
            }
        }
    }
    Ok(ZeroSequence::new(points, tag))
}

/// One accepted point of a thin extraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRow {
    /// 1-based position in the extracted sequence.
    pub k: usize,
    /// Position in the candidate pool.
    pub pool_index: usize,
    /// `prod_{j<k} d(w_j, w_k)`
    pub product: f64,
    /// `1 - 1/(k+1)^2`
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub sequence: ZeroSequence,
    pub certificate: Vec<CertificateRow>,
}

fn greedy_extract(candidates: &ZeroSequence, limit: usize) -> Extraction {
    let mut chosen: Vec<DiskPoint> = Vec::new();
    let mut certificate = Vec::new();
    for (i, p) in candidates.points.iter().enumerate() {
        if chosen.len() == limit {
            break;
        }
        let k = chosen.len() + 1;
        let ln_prod: f64 = chosen.iter().map(|w| ln_pseudo_distance(w, p)).sum();
        let bound = 1.0 - 1.0 / ((k + 1) * (k + 1)) as f64;
        if ln_prod > bound.ln() {
            chosen.push(*p);
            certificate.push(CertificateRow {
                k,
                pool_index: i,
                product: ln_prod.exp(),
                bound,
            });
        }
    }
    Extraction {
        sequence: ZeroSequence::new(chosen, format!("{}/thin-extracted", candidates.source_tag)),
        certificate,
    }
}

fn check_tail(candidates: &ZeroSequence) -> Result<()> {
    let n = candidates.len();
    if n >= 3 {
        let d: Vec<f64> = candidates.points[n - 3..]
            .iter()
            .map(|p| p.decrement)
            .collect();
        if !(d[0] > d[1] && d[1] > d[2]) {
            return Err(Error::Parameter(
                "candidate moduli do not increase towards the circle".into(),
            ));
        }
    }
    Ok(())
}

/// Greedy scan keeping a candidate when its distance product to the points
/// already kept exceeds `1 - 1/(k+1)^2`; stops at `k_target` points.
pub fn extract_thin_subsequence(candidates: &ZeroSequence, k_target: usize) -> Result<Extraction> {
    check_tail(candidates)?;
    let out = greedy_extract(candidates, k_target);
    if out.sequence.len() < k_target {
        return Err(Error::Exhausted {
            found: out.sequence.len(),
            wanted: k_target,
        });
    }
    Ok(out)
}

/// Every candidate the greedy scan accepts.
pub fn extract_all(candidates: &ZeroSequence) -> Result<Extraction> {
    check_tail(candidates)?;
    Ok(greedy_extract(candidates, usize::MAX))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateResult {
    pub pass: bool,
    pub margin: Option<f64>,
    pub detail: String,
}

impl GateResult {
    fn new(pass: bool, margin: Option<f64>, detail: impl Into<String>) -> Self {
        GateResult {
            pass,
            margin,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageAudit {
    pub a: GateResult,
    pub b: GateResult,
    pub c: GateResult,
    pub d: GateResult,
    pub budget: GateResult,
}

impl StageAudit {
    pub fn all_pass(&self) -> bool {
        self.a.pass && self.b.pass && self.c.pass && self.d.pass && self.budget.pass
    }

    pub fn first_failure(&self) -> &'static str {
        [
            ("a", &self.a),
            ("c", &self.c),
            ("b", &self.b),
            ("d", &self.d),
            ("budget", &self.budget),
        ]
        .into_iter()
        .find(|(_, g)| !g.pass)
        .map_or("none", |(n, _)| n)
    }
}

/// One stage `B_m` of the construction, with the disks and tolerance it fixes.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub m: usize,
    pub product: FiniteBlaschke,
    pub lambda: DiskPoint,
    pub pool_index: usize,
    /// Gate radius used when this stage was accepted.
    pub r_m: f64,
    pub k_tilde: f64,
    pub k_radius: f64,
    pub delta: f64,
    pub critical: CriticalData,
    pub audit: StageAudit,
    pub scanned: usize,
    pub q: Option<usize>,
}

/// Disk radii around the critical points: `K~ >= max(floor, (1 + max|c|)/2)`, `K = (1 + K~)/2`.
fn disks(crit: &CriticalData, floor: f64) -> (f64, f64) {
    let outer = crit
        .critical_points
        .iter()
        .map(|c| c.0.norm())
        .fold(0.0, f64::max);
    let kt = floor.max(0.5 * (1.0 + outer));
    (kt, 0.5 * (1.0 + kt))
}

/// Explicit Rouche tolerance `(R_K - R~)/2 * min_{|z| = R~} |B'|`, the minimum
/// sampled on a uniform grid plus the directions of zeros and critical points.
fn rouche_delta(b: &FiniteBlaschke, crit: &CriticalData, kt: f64, kr: f64) -> f64 {
    let mut angles: Vec<f64> = (0..2048).map(|j| TAU * j as f64 / 2048.0).collect();
    angles.extend(
        b.zeros()
            .iter()
            .filter(|z| !z.point.is_origin())
            .map(|z| z.point.approx.arg()),
    );
    angles.extend(crit.critical_points.iter().map(|c| c.0.arg()));
    let rq = Qd::from_f64(kt);
    let min_d = angles
        .iter()
        .map(|&t| {
            let (s, c) = t.sin_cos();
            let z = Complex::new(rq * Qd::from_f64(c), rq * Qd::from_f64(s));
            cabs_f64(b.derivatives::<Qd>(z, 1)[1])
        })
        .fold(f64::INFINITY, f64::min);
    0.5 * (kr - kt) * min_d
}

fn product_at(b: &FiniteBlaschke, z: Complex64) -> f64 {
    cabs_f64(b.eval::<Qd>(cqd(z)))
}

/// Gates of a candidate stage `m` (the new product has degree `m + 1`).
fn evaluate_gates(
    cand: &FiniteBlaschke,
    crit: &CriticalData,
    r: f64,
    lambda: &DiskPoint,
    history: &[(f64, f64)],
    margin: f64,
) -> StageAudit {
    let m = history.len();
    let outside: Vec<Complex64> = crit
        .critical_points
        .iter()
        .map(|c| c.0)
        .filter(|c| c.norm() >= r)
        .collect();
    let a = match outside
        .iter()
        .map(|&w| (w, product_at(cand, w)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
    {
        Some((w, v)) => GateResult::new(
            v > r,
            Some(v - r),
            format!("w* = {w}, |B(w*)| - r = {:e}", v - r),
        ),
        None => GateResult::new(false, None, format!("no critical point outside radius {r}")),
    };
    let inner = crit
        .critical_points
        .iter()
        .map(|c| c.0.norm())
        .filter(|&x| x < r)
        .fold(0.0, f64::max);
    let c = GateResult::new(
        outside.len() == 1,
        Some(r - inner),
        format!("{} critical points outside radius {r}", outside.len()),
    );
    let mut sep = f64::INFINITY;
    for i in 0..crit.critical_values.len() {
        for j in 0..i {
            sep = sep.min((crit.critical_values[i] - crit.critical_values[j]).norm());
        }
    }
    let b = GateResult::new(
        sep >= margin,
        sep.is_finite().then_some(sep),
        format!("minimal critical value separation {sep:e}"),
    );
    let simple = crit.critical_points.iter().all(|c| c.1 == 1);
    let min_dd = crit
        .second_derivatives
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let d = GateResult::new(
        simple && min_dd >= margin,
        min_dd.is_finite().then_some(min_dd),
        format!("minimal |B''| at critical points {min_dd:e}"),
    );
    let mut slack = f64::INFINITY;
    for (j, &(delta_j, k_j)) in history.iter().enumerate() {
        let allowance = delta_j * (1.0 - k_j) / 2f64.powi((m + 1 - (j + 1)) as i32 + 2);
        slack = slack.min(allowance - lambda.decrement);
    }
    let budget = GateResult::new(
        slack >= 0.0,
        slack.is_finite().then_some(slack),
        format!("1 - |lambda| = {:e}", lambda.decrement),
    );
    StageAudit { a, b, c, d, budget }
}

/// Stagewise product `B_{m+1} = B_m psi_lambda` with `lambda` scanned from the
/// pool in order. Stage 1 is `phi_{z_1} phi_{z_2}`.
///
/// `with_components` also runs the monodromy pipeline on each accepted stage.
pub fn construct_irreducible_stages(
    pool: &ZeroSequence,
    stages: usize,
    tol: &Tolerances,
    with_components: bool,
) -> Result<Vec<ConstructionState>> {
    if stages == 0 {
        return Err(Error::Parameter("at least one stage is required".into()));
    }
    if pool.len() < 2 {
        return Err(Error::Exhausted {
            found: pool.len(),
            wanted: 2,
        });
    }
    let margin = tol.stage_gate_margin;
    let components = |b: &FiniteBlaschke| -> Result<Option<usize>> {
        if with_components {
            Ok(Some(surface_components_with(b, tol, None)?.q))
        } else {
            Ok(None)
        }
    };
    let zeros = vec![
        Zero {
            point: pool.points[0],
            multiplicity: 1,
        },
        Zero {
            point: pool.points[1],
            multiplicity: 1,
        },
    ];
    let b1 = FiniteBlaschke::new(zeros, Complex64::new(1.0, 0.0))?;
    let crit = critical_points_with(&b1, tol)?;
    let (kt, kr) = disks(&crit, 0.5);
    let delta = rouche_delta(&b1, &crit, kt, kr);
    let base = StageAudit {
        a: GateResult::new(true, None, "base stage"),
        b: GateResult::new(
            true,
            None,
            format!("{} critical value(s)", crit.critical_values.len()),
        ),
        c: GateResult::new(
            crit.critical_points.iter().all(|c| c.0.norm() < kt),
            Some(
                kt - crit
                    .critical_points
                    .iter()
                    .map(|c| c.0.norm())
                    .fold(0.0, f64::max),
            ),
            "all critical points inside the first disk",
        ),
        d: GateResult::new(
            crit.critical_points.iter().all(|c| c.1 == 1)
                && crit.second_derivatives.iter().all(|&x| x >= margin),
            crit.second_derivatives.iter().copied().reduce(f64::min),
            "simple critical points",
        ),
        budget: GateResult::new(true, None, "base stage"),
    };
    let mut out = vec![ConstructionState {
        m: 1,
        q: components(&b1)?,
        product: b1,
        lambda: pool.points[1],
        pool_index: 1,
        r_m: 0.5,
        k_tilde: kt,
        k_radius: kr,
        delta,
        critical: crit,
        audit: base,
        scanned: 2,
    }];
    let mut history = vec![(delta, kr)];
    let mut cursor = 2;
    for m in 1..stages {
        let prev = out.last().expect("stage 1");
        let r = (0.5 * (1.0 + prev.k_radius)).max(1.0 - 1.0 / (m + 2) as f64);
        let mut scanned = 0;
        let mut last_fail = "pool";
        let mut accepted = None;
        for idx in cursor..pool.len() {
            if scanned >= tol.scan_budget {
                break;
            }
            scanned += 1;
            let lambda = pool.points[idx];
            let cand = prev.product.times_factor(lambda, true);
            let crit = match critical_points_with(&cand, tol) {
                Ok(c) => c,
                Err(_) => {
                    last_fail = "critical_points";
                    continue;
                }
            };
            let audit = evaluate_gates(&cand, &crit, r, &lambda, &history, margin);
            if audit.all_pass() {
                accepted = Some((idx, lambda, cand, crit, audit));
                break;
            }
            last_fail = audit.first_failure();
        }
        let Some((idx, lambda, cand, crit, audit)) = accepted else {
            return Err(Error::StageFailure {
                stage: m + 1,
                gate: last_fail.to_string(),
                scanned,
            });
        };
        let (kt, kr) = disks(&crit, r);
        let delta = rouche_delta(&cand, &crit, kt, kr);
        history.push((delta, kr));
        cursor = idx + 1;
        out.push(ConstructionState {
            m: m + 1,
            q: components(&cand)?,
            product: cand,
            lambda,
            pool_index: idx,
            r_m: r,
            k_tilde: kt,
            k_radius: kr,
            delta,
            critical: crit,
            audit,
            scanned,
        });
    }
    Ok(out)
}

/// `lambda` and `n` with the zero set invariant under `phi_lambda(xi phi_lambda(z))`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationalStructure {
    pub lambda: DiskPoint,
    pub n: usize,
    /// Largest displacement in the verified matching.
    pub residual: f64,
}

impl RotationalStructure {
    /// The symmetry `z -> phi_lambda(xi phi_lambda(z))` and its derivative.
    pub fn map(&self, z: Complex64) -> (Complex64, Complex64) {
        rotation_map(&self.lambda, self.n, z)
    }
}

pub fn rotation_map(lambda: &DiskPoint, n: usize, z: Complex64) -> (Complex64, Complex64) {
    let xi = Complex64::from_polar(1.0, TAU / n as f64);
    let (u, du) = phi::<f64>(lambda, z);
    let (v, dv) = phi::<f64>(lambda, xi * u);
    (v, dv * xi * du)
}

fn matching_distance(points: &[Complex64], lambda: Complex64, n: usize) -> f64 {
    let Ok(l) = DiskPoint::new(lambda) else {
        return f64::INFINITY;
    };
    points
        .iter()
        .map(|&z| {
            let t = rotation_map(&l, n, z).0;
            points
                .iter()
                .map(|&w| (w - t).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Bijective matching under the map; largest displacement, or `None`.
fn verify(points: &[Complex64], lambda: &DiskPoint, n: usize, tol: f64) -> Option<f64> {
    let mut used = vec![false; points.len()];
    let mut worst: f64 = 0.0;
    for &z in points {
        let t = rotation_map(lambda, n, z).0;
        let (j, d) = points
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &w)| (j, (w - t).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if d > tol {
            return None;
        }
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// Nelder–Mead on the plane.
fn nelder_mead(
    f: impl Fn(Complex64) -> f64,
    start: Complex64,
    step: f64,
    iters: usize,
) -> (Complex64, f64) {
    let mut s: Vec<(Complex64, f64)> = [start, start + step, start + Complex64::new(0.0, step)]
        .into_iter()
        .map(|p| (p, f(p)))
        .collect();
    for _ in 0..iters {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (s[2].0 - s[0].0).norm() < 1e-15 {
            break;
        }
        let c = (s[0].0 + s[1].0) * 0.5;
        let xr = c + (c - s[2].0);
        let fr = f(xr);
        if fr < s[0].1 {
            let xe = c + (c - s[2].0) * 2.0;
            let fe = f(xe);
            s[2] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < s[1].1 {
            s[2] = (xr, fr);
        } else {
            let xc = c + (s[2].0 - c) * 0.5;
            let fc = f(xc);
            if fc < s[2].1 {
                s[2] = (xc, fc);
            } else {
                for i in 1..3 {
                    let p = s[0].0 + (s[i].0 - s[0].0) * 0.5;
                    s[i] = (p, f(p));
                }
            }
        }
    }
    s.sort_by(|a, b| a.1.total_cmp(&b.1));
    s[0]
}

/// Searches `n = 6, 5, ..., 2` (largest order wins) with centres seeded at the origin, the centroid, and
/// pair midpoints; the result is verified by a bijective matching.
pub fn detect_rotational_structure(
    zeros: &ZeroSequence,
    tol: &Tolerances,
) -> Result<Option<RotationalStructure>> {
    if zeros.len() < 4 {
        return Err(Error::Parameter(format!(
            "rotation search needs at least 4 points, got {}",
            zeros.len()
        )));
    }
    let pts: Vec<Complex64> = zeros.points.iter().map(|p| p.approx).collect();
    let centroid = pts.iter().sum::<Complex64>() / pts.len() as f64;
    let mut seeds = vec![Complex64::new(0.0, 0.0), centroid];
    for i in 0..pts.len() {
        for j in 0..i {
            seeds.push((pts[i] + pts[j]) * 0.5);
        }
    }
    for n in (2..=6).rev() {
        for &seed in &seeds {
            if seed.norm() >= 1.0 {
                continue;
            }
            let f = |l: Complex64| matching_distance(&pts, l, n);
            let start = f(seed);
            let (best, value) = if start <= tol.rotation_tol {
                (seed, start)
            } else {
                nelder_mead(f, seed, 0.05, 400)
            };
            if value > 1e3 * tol.rotation_tol {
                continue;
            }
            let (best, _) = if value > 1e-3 * tol.rotation_tol {
                nelder_mead(f, best, 1e-6, 400)
            } else {
                (best, value)
            };
            let lambda = DiskPoint::new(best)?;
            if let Some(residual) = verify(&pts, &lambda, n, tol.rotation_tol) {
                return Ok(Some(RotationalStructure {
                    lambda,
                    n,
                    residual,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn factorial_moduli() {
        let spec = ThinSpec {
            rule: ThinRule::Factorial,
            n: 3,
            arguments: ArgumentRule::Zero,
        };
        let s = generate_thin_sequence(&spec, &tol(), 0).unwrap();
        let m: Vec<f64> = s.points.iter().map(|p| p.approx.norm()).collect();
        assert_eq!(m[0], 0.0);
        assert!((m[1] - 0.5).abs() < 1e-16);
        assert!((m[2] - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_rule_recurrence_and_rejection() {
        let spec = ThinSpec {
            rule: ThinRule::Ratio {
                c: RatioSequence::InversePower { base: 2.0 },
                first_decrement: 1.0,
            },
            n: 5,
            arguments: ArgumentRule::Zero,
        };
        let s = generate_thin_sequence(&spec, &tol(), 0).unwrap();
        for n in 2..=5 {
            let ratio = s.points[n - 1].decrement / s.points[n - 2].decrement;
            assert_eq!(ratio, 0.5f64.powi(n as i32));
        }
        let bad = ThinSpec {
            rule: ThinRule::Ratio {
                c: RatioSequence::List(vec![0.5, 1.5]),
                first_decrement: 1.0,
            },
            n: 3,
            arguments: ArgumentRule::Zero,
        };
        assert!(matches!(
            generate_thin_sequence(&bad, &tol(), 0),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn van_der_corput_prefix() {
        let v: Vec<f64> = (1..=4).map(van_der_corput).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn cluster_member_is_skipped() {
        let pts = [0.0, 0.5, 0.5000001, 0.9, 0.99]
            .iter()
            .map(|&x| DiskPoint::new(Complex64::new(x, 0.0)).unwrap())
            .collect();
        let e = extract_all(&ZeroSequence::new(pts, "test")).unwrap();
        assert!(e.certificate.iter().all(|r| r.pool_index != 2));
        let one = extract_thin_subsequence(&e.sequence, 1).unwrap();
        assert_eq!(one.sequence.points[0].approx, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rotation_about_origin() {
        let pts: Vec<DiskPoint> = [0.3, -0.3, 0.5, -0.5]
            .iter()
            .map(|&x| DiskPoint::new(Complex64::new(x, 0.1 * x)).unwrap())
            .collect();
        let r = detect_rotational_structure(&ZeroSequence::new(pts, "t"), &tol())
            .unwrap()
            .unwrap();
        assert_eq!(r.n, 2);
        assert!(r.lambda.approx.norm() < 1e-8);
    }

    #[test]
    fn spec_json_shape() {
        let f: ThinSpec = serde_json::from_str(r#"{"rule": "factorial", "N": 4}"#).unwrap();
        assert_eq!(f, ThinSpec::factorial(4));
        let r: ThinSpec = serde_json::from_str(
            r#"{"rule": "ratio", "args": {"c": {"inverse_power": {"base": 2.0}}}, "N": 5, "arguments": "zero"}"#,
        )
        .unwrap();
        assert_eq!(
            r.rule,
            ThinRule::Ratio {
                c: RatioSequence::InversePower { base: 2.0 },
                first_decrement: 1.0
            }
        );
        let back: ThinSpec = serde_json::from_value(serde_json::to_value(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
