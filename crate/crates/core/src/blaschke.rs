//! Finite Blaschke products: evaluation, Taylor data, rational form,
//! composition and thinness diagnostics.

use std::ops::Range;

use num_complex::{Complex, Complex64};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::mobius::{demote, ln_pseudo_distance, promote, DiskPoint};
use crate::qd::{cabs_f64, cfrom, cinv, cscale, cto, Qd, Real};

/// A zero of a Blaschke product with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub point: DiskPoint,
    pub multiplicity: usize,
}

/// `B(z) = c * prod phi_{lambda_i}(z)^{m_i}` with `|c| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteBlaschke {
    zeros: Vec<Zero>,
    constant: Complex64,
}

/// `B = p/q` with `q(z) = prod (1 - conj(lambda_i) z)^{m_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub numerator_coeffs: Vec<Complex64>,
    pub denominator_coeffs: Vec<Complex64>,
}

impl RationalForm {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.numerator_coeffs, z) / horner(&self.denominator_coeffs, z)
    }
}

pub(crate) fn horner<T: Real>(c: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for &a in c.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

/// A truncation of a Blaschke zero sequence, with a note on where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSequence {
    pub points: Vec<DiskPoint>,
    pub source_tag: String,
}

impl ZeroSequence {
    pub fn new(points: Vec<DiskPoint>, source_tag: impl Into<String>) -> Self {
        ZeroSequence {
            points,
            source_tag: source_tag.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Partial Blaschke sum `sum (1 - |z_j|^2)`.
    pub fn blaschke_sum(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.one_minus_abs_sq.to_f64())
            .sum()
    }

    /// The truncated product with constant 1.
    pub fn to_product(&self) -> Result<FiniteBlaschke> {
        let zeros = self
            .points
            .iter()
            .map(|&point| Zero {
                point,
                multiplicity: 1,
            })
            .collect();
        FiniteBlaschke::new(zeros, Complex64::new(1.0, 0.0))
    }
}

/// JSON form of a product: `{"constant": [re,im], "zeros": [{"z": [re,im], "m": int}]}`.
///
/// A zero may also carry `"decrement"` (`1 - |z|`); `z` then only fixes the
/// direction, so points closer to the circle than doubles can resolve survive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub constant: [f64; 2],
    pub zeros: Vec<ZeroSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroSpec {
    pub z: [f64; 2],
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decrement: Option<f64>,
}

/// Taylor coefficients of `phi_lambda(z + h)` in `h`, up to `h^order`.
fn factor_series<T: Real>(lambda: &DiskPoint, z: Complex<T>, order: usize, out: &mut [Complex<T>]) {
    let l = T::zero_of(lambda);
    let oms = T::one_minus_abs_sq(lambda);
    let a = l - z;
    let b = Complex::new(oms, T::zero()) + l.conj() * a;
    let binv = cinv(b);
    out[0] = a * binv;
    if order >= 1 {
        let mut c = cscale(binv * binv, -oms);
        out[1] = c;
        let step = l.conj() * binv;
        for slot in out.iter_mut().take(order + 1).skip(2) {
            c = c * step;
            *slot = c;
        }
    }
}

fn mul_truncated<T: Real>(acc: &mut [Complex<T>], f: &[Complex<T>]) {
    let n = acc.len();
    for i in (0..n).rev() {
        let mut s = Complex::new(T::zero(), T::zero());
        for j in 0..=i {
            s = s + acc[j] * f[i - j];
        }
        acc[i] = s;
    }
}

/// Numerator and denominator coefficients, lowest degree first.
pub type Coefficients<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

impl FiniteBlaschke {
    pub fn new(zeros: Vec<Zero>, constant: Complex64) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "constant {constant} is not unimodular"
            )));
        }
        let mut merged: Vec<Zero> = Vec::new();
        for z in zeros {
            if z.multiplicity == 0 {
                return Err(Error::InvalidSpec(
                    "zero multiplicity must be positive".into(),
                ));
            }
            match merged.iter_mut().find(|m| m.point.exact == z.point.exact) {
                Some(m) => m.multiplicity += z.multiplicity,
                None => merged.push(z),
            }
        }
        if merged.is_empty() {
            return Err(Error::InvalidSpec(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        Ok(FiniteBlaschke {
            zeros: merged,
            constant,
        })
    }

    /// Simple zeros at the given points, constant 1.
    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        let zeros = points
            .iter()
            .map(|&p| {
                Ok(Zero {
                    point: DiskPoint::new(p)?,
                    multiplicity: 1,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zeros, Complex64::new(1.0, 0.0))
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Result<Self> {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        Self::new(
            vec![Zero {
                point: DiskPoint::ORIGIN,
                multiplicity: n,
            }],
            Complex64::new(sign, 0.0),
        )
    }

    /// Random product with simple zeros uniform in the disk of radius `radius`.
    pub fn random<R: Rng>(rng: &mut R, degree: usize, radius: f64) -> Result<Self> {
        let mut pts = Vec::with_capacity(degree);
        while pts.len() < degree {
            let r = radius * rng.gen::<f64>().sqrt();
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            pts.push(Complex64::from_polar(r, t));
        }
        let c = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let zeros = pts
            .iter()
            .map(|&p| {
                Ok(Zero {
                    point: DiskPoint::new(p)?,
                    multiplicity: 1,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zeros, c)
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    /// `B_1 * B_2` by concatenating zero lists.
    pub fn mul(&self, other: &FiniteBlaschke) -> FiniteBlaschke {
        let mut zeros = self.zeros.clone();
        zeros.extend(other.zeros.iter().copied());
        let c = self.constant * other.constant;
        FiniteBlaschke::new(zeros, c / c.norm()).expect("product of valid products")
    }

    /// `B * phi_lambda`, or `B * psi_lambda` when `normalized`.
    pub fn times_factor(&self, lambda: DiskPoint, normalized: bool) -> FiniteBlaschke {
        let mut c = self.constant;
        if normalized && !lambda.is_origin() {
            let l = lambda.approx;
            c *= l.conj() / l.norm();
        }
        let mut zeros = self.zeros.clone();
        zeros.push(Zero {
            point: lambda,
            multiplicity: 1,
        });
        FiniteBlaschke::new(zeros, c / c.norm()).expect("valid factor")
    }

    /// Smallest `1 - |lambda|` over the zeros.
    pub fn min_decrement(&self) -> f64 {
        self.zeros
            .iter()
            .map(|z| z.point.decrement)
            .fold(1.0, f64::min)
    }

    /// Whether double precision is too coarse for this product.
    pub fn needs_extended(&self, tol: &Tolerances) -> bool {
        self.min_decrement() < tol.extended_threshold
    }

    /// `[B(z), B'(z), ..., B^{(order)}(z)]`, stable at zeros of `B`.
    pub fn derivatives<T: Real>(&self, z: Complex<T>, order: usize) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut acc = vec![zero; order + 1];
        acc[0] = cfrom(self.constant);
        let mut f = vec![zero; order + 1];
        for zr in &self.zeros {
            factor_series(&zr.point, z, order, &mut f);
            for _ in 0..zr.multiplicity {
                mul_truncated(&mut acc, &f);
            }
        }
        let mut fact = 1.0;
        for (j, c) in acc.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *c = cscale(*c, T::from_f64(fact));
        }
        acc
    }

    pub fn eval<T: Real>(&self, z: Complex<T>) -> Complex<T> {
        let mut acc: Complex<T> = cfrom(self.constant);
        for zr in &self.zeros {
            let l = T::zero_of(&zr.point);
            let oms = T::one_minus_abs_sq(&zr.point);
            let a = l - z;
            let b = Complex::new(oms, T::zero()) + l.conj() * a;
            let v = a * cinv(b);
            for _ in 0..zr.multiplicity {
                acc = acc * v;
            }
        }
        acc
    }

    pub fn eval_d<T: Real>(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let d = self.derivatives(z, 1);
        (d[0], d[1])
    }

    /// Coefficients of `p` and `q`, expanded in quad-double and rounded to `T`.
    pub fn rational_in<T: Real>(&self, tol: &Tolerances) -> Result<Coefficients<T>> {
        let n = self.degree();
        if n > tol.max_degree {
            return Err(Error::Capacity {
                degree: n,
                max: tol.max_degree,
            });
        }
        let one = Complex::new(Qd::ONE, Qd::ZERO);
        let mut p = vec![promote::<f64>(self.constant)];
        let mut q = vec![one];
        for zr in &self.zeros {
            let l = zr.point.exact;
            for _ in 0..zr.multiplicity {
                p = convolve(&p, &[l, -one]);
                if !zr.point.is_origin() {
                    q = convolve(&q, &[one, -l.conj()]);
                }
            }
        }
        Ok((
            p.into_iter().map(demote).collect(),
            q.into_iter().map(demote).collect(),
        ))
    }
}

fn convolve(a: &[Complex<Qd>], b: &[Complex<Qd>]) -> Vec<Complex<Qd>> {
    let zero = Complex::new(Qd::ZERO, Qd::ZERO);
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// `(B(z), B'(z))`, evaluated in the working precision the product needs.
pub fn eval_with_derivative(b: &FiniteBlaschke, z: Complex64) -> (Complex64, Complex64) {
    if b.needs_extended(&Tolerances::default()) {
        let (v, d) = b.eval_d::<Qd>(promote::<f64>(z));
        (cto(v), cto(d))
    } else {
        b.eval_d::<f64>(z)
    }
}

/// Expand `B = p/q` into coefficient lists (ascending powers).
pub fn to_rational(b: &FiniteBlaschke) -> Result<RationalForm> {
    to_rational_with(b, &Tolerances::default())
}

pub fn to_rational_with(b: &FiniteBlaschke, tol: &Tolerances) -> Result<RationalForm> {
    let (p, q) = b.rational_in::<f64>(tol)?;
    Ok(RationalForm {
        numerator_coeffs: p,
        denominator_coeffs: q,
    })
}

/// `outer ∘ inner`. Zeros are the fibers of `inner` over the zeros of `outer`.
pub fn compose(outer: &FiniteBlaschke, inner: &FiniteBlaschke) -> Result<FiniteBlaschke> {
    compose_with(outer, inner, &Tolerances::default())
}

pub fn compose_with(
    outer: &FiniteBlaschke,
    inner: &FiniteBlaschke,
    tol: &Tolerances,
) -> Result<FiniteBlaschke> {
    let n = outer.degree() * inner.degree();
    if n > tol.max_degree {
        return Err(Error::Capacity {
            degree: n,
            max: tol.max_degree,
        });
    }
    let mut zeros = Vec::new();
    for zr in outer.zeros() {
        let fib = crate::roots::fiber_qd_target(inner, zr.point.exact, tol)?;
        for (pt, mult) in fib.distinct() {
            zeros.push(Zero {
                point: DiskPoint::from_qd(promote(pt))?,
                multiplicity: mult * zr.multiplicity,
            });
        }
    }
    let unit = FiniteBlaschke::new(zeros, Complex64::new(1.0, 0.0))?;
    // fix the rotation at a probe point away from every zero
    let probe = [0.0, 0.3, -0.45, 0.6]
        .iter()
        .map(|&r| Complex64::new(r, 0.17))
        .max_by(|a, b| {
            let fa = unit.eval::<f64>(*a).norm();
            let fb = unit.eval::<f64>(*b).norm();
            fa.total_cmp(&fb)
        })
        .expect("non-empty probe list");
    let target = if outer.needs_extended(tol) || inner.needs_extended(tol) {
        let zq = promote::<f64>(probe);
        cto(outer.eval::<Qd>(inner.eval::<Qd>(zq)) / unit.eval::<Qd>(zq))
    } else {
        outer.eval::<f64>(inner.eval::<f64>(probe)) / unit.eval::<f64>(probe)
    };
    FiniteBlaschke::new(unit.zeros, target / target.norm())
}

/// One row of a thinness profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThinnessRow {
    pub k: usize,
    /// `prod_{j != k} d(z_j, z_k)`
    pub delta: f64,
    /// `(1 - |z_k|^2) |B'(z_k)|` for the truncated product
    pub cross_check: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThinnessProfile {
    pub rows: Vec<ThinnessRow>,
    pub max_identity_gap: f64,
    /// First index from which `delta` never decreases, if any.
    pub nondecreasing_from: Option<usize>,
    pub blaschke_sum: f64,
}

/// Thinness diagnostics of a truncated zero sequence over `k_range`.
pub fn thinness_profile(seq: &ZeroSequence, k_range: Range<usize>) -> Result<ThinnessProfile> {
    let n = seq.len();
    if k_range.end > n || k_range.start > k_range.end {
        return Err(Error::Parameter(format!(
            "k range {k_range:?} outside truncation {n}"
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if seq.points[i].exact == seq.points[j].exact {
                return Err(Error::DegenerateSequence(j, i));
            }
        }
    }
    let product = seq.to_product()?;
    let mut rows = Vec::new();
    for k in k_range {
        let zk = &seq.points[k];
        let ln_delta: f64 = seq
            .points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, zj)| ln_pseudo_distance(zj, zk))
            .sum();
        let d = product.derivatives::<Qd>(zk.exact, 1)[1];
        let cross = zk.one_minus_abs_sq.to_f64() * cabs_f64(d);
        rows.push(ThinnessRow {
            k,
            delta: ln_delta.exp(),
            cross_check: cross,
        });
    }
    let max_identity_gap = rows
        .iter()
        .map(|r| (r.delta - r.cross_check).abs())
        .fold(0.0, f64::max);
    let mut nondecreasing_from = None;
    if !rows.is_empty() {
        let mut start = rows.len() - 1;
        while start > 0 && rows[start - 1].delta <= rows[start].delta {
            start -= 1;
        }
        nondecreasing_from = Some(rows[start].k);
    }
    Ok(ThinnessProfile {
        rows,
        max_identity_gap,
        nondecreasing_from,
        blaschke_sum: seq.blaschke_sum(),
    })
}

/// Radius `t(a) = a / (1 + sqrt(1 - a^2))` of the univalence disk.
pub fn univalence_radius(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Parameter(format!(
            "univalence radius needs a in (0,1), got {a}"
        )));
    }
    Ok(a / (1.0 + (1.0 - a * a).sqrt()))
}

impl FiniteBlaschke {
    pub fn from_spec(spec: &ProductSpec, tol: &Tolerances) -> Result<Self> {
        let constant = Complex64::new(spec.constant[0], spec.constant[1]);
        let mut zeros = Vec::new();
        for z in &spec.zeros {
            let c = Complex64::new(z.z[0], z.z[1]);
            let point = match z.decrement {
                Some(e) => DiskPoint::from_polar_decrement(e, c.arg()),
                None => DiskPoint::with_margin(c, tol.disk_margin),
            }
            .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            zeros.push(Zero {
                point,
                multiplicity: z.m,
            });
        }
        let b = Self::new(zeros, constant)?;
        if b.degree() > tol.max_degree {
            return Err(Error::Capacity {
                degree: b.degree(),
                max: tol.max_degree,
            });
        }
        Ok(b)
    }

    pub fn to_spec(&self) -> ProductSpec {
        ProductSpec {
            constant: [self.constant.re, self.constant.im],
            zeros: self
                .zeros
                .iter()
                .map(|z| ZeroSpec {
                    z: [z.point.approx.re, z.point.approx.im],
                    m: z.multiplicity,
                    decrement: (z.point.decrement < 1e-8).then_some(z.point.decrement),
                })
                .collect(),
        }
    }
}
