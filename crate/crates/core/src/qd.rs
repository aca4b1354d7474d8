//! Quad-double arithmetic and the `Real` abstraction used by the numerical kernels.
//!
//! A [`Qd`] is an unevaluated sum of four `f64` components, giving roughly 212
//! bits of significand. Products whose zeros sit within ~1e-4 of the unit circle
//! are evaluated in `Qd`; everything else runs in plain `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};

use crate::mobius::DiskPoint;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[cfg(target_feature = "fma")]
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(not(target_feature = "fma"))]
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[cfg(not(target_feature = "fma"))]
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// Distill an exact sum of doubles into four non-overlapping components.
///
/// Bottom-up error-free passes push the rounded sum to the front; the pass is
/// repeated until the leading term is stable, then the tail is processed the
/// same way. Whatever is left after four components is folded into the last.
fn renormalize(x: &mut [f64]) -> Qd {
    let n = x.len();
    let mut out = [0.0; 4];
    let mut start = 0;
    for slot in out.iter_mut() {
        if start >= n {
            break;
        }
        let mut prev = f64::NAN;
        for _ in 0..4 {
            for i in (start + 1..n).rev() {
                let (s, e) = two_sum(x[i - 1], x[i]);
                x[i - 1] = s;
                x[i] = e;
            }
            if x[start] == prev {
                break;
            }
            prev = x[start];
        }
        *slot = x[start];
        start += 1;
    }
    if start < n {
        let rest: f64 = x[start..].iter().rev().sum();
        out[3] += rest;
    }
    Qd(out)
}

/// Quad-double real number.
#[derive(Clone, Copy, Default)]
pub struct Qd(pub [f64; 4]);

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);

    pub fn from_f64(x: f64) -> Self {
        Qd([x, 0.0, 0.0, 0.0])
    }

    pub fn to_f64(self) -> f64 {
        ((self.0[3] + self.0[2]) + self.0[1]) + self.0[0]
    }

    pub fn is_zero_value(self) -> bool {
        self.0[0] == 0.0
    }

    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn signum_f64(self) -> f64 {
        if self.0[0] > 0.0 {
            1.0
        } else if self.0[0] < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let a = self.0;
        let (p0, e0) = two_prod(a[0], b);
        let (p1, e1) = two_prod(a[1], b);
        let (p2, e2) = two_prod(a[2], b);
        let p3 = a[3] * b;
        renormalize(&mut [p0, e0, p1, e1, p2, e2, p3])
    }

    pub fn sqrt(self) -> Self {
        if self.0[0] <= 0.0 {
            return if self.0[0] == 0.0 {
                Qd::ZERO
            } else {
                Qd::from_f64(f64::NAN)
            };
        }
        let mut x = Qd::from_f64(self.0[0].sqrt());
        // each Newton step doubles the number of correct bits: 53 -> 106 -> 212
        for _ in 0..3 {
            x = (x + self / x).mul_f64(0.5);
        }
        x
    }

    /// Round-trip through the components: `f64` parts must be finite.
    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Qd({:e}, {:e}, {:e}, {:e})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

impl fmt::Display for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl From<f64> for Qd {
    fn from(x: f64) -> Self {
        Qd::from_f64(x)
    }
}

impl Neg for Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, b: Qd) -> Qd {
        let a = self.0;
        let b = b.0;
        renormalize(&mut [a[0], b[0], a[1], b[1], a[2], b[2], a[3], b[3]])
    }
}

impl Sub for Qd {
    type Output = Qd;
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, b: Qd) -> Qd {
        let a = self.0;
        let b = b.0;
        let (p00, e00) = two_prod(a[0], b[0]);
        let (p01, e01) = two_prod(a[0], b[1]);
        let (p10, e10) = two_prod(a[1], b[0]);
        let (p02, e02) = two_prod(a[0], b[2]);
        let (p11, e11) = two_prod(a[1], b[1]);
        let (p20, e20) = two_prod(a[2], b[0]);
        let t3 = a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0];
        renormalize(&mut [
            p00, e00, p01, p10, e01, e10, p02, p11, p20, e02, e11, e20, t3,
        ])
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let b0 = b.0[0];
        let q0 = self.0[0] / b0;
        let mut r = self - b.mul_f64(q0);
        let q1 = r.0[0] / b0;
        r -= b.mul_f64(q1);
        let q2 = r.0[0] / b0;
        r -= b.mul_f64(q2);
        let q3 = r.0[0] / b0;
        r -= b.mul_f64(q3);
        let q4 = r.0[0] / b0;
        renormalize(&mut [q0, q1, q2, q3, q4])
    }
}

impl Rem for Qd {
    type Output = Qd;
    fn rem(self, b: Qd) -> Qd {
        let q = (self / b).to_f64().trunc();
        self - b.mul_f64(q)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Qd {
            fn $m(&mut self, rhs: Qd) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl PartialEq for Qd {
    fn eq(&self, other: &Qd) -> bool {
        (*self - *other).0[0] == 0.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<Ordering> {
        (*self - *other).0[0].partial_cmp(&0.0)
    }
}

impl Zero for Qd {
    fn zero() -> Qd {
        Qd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for Qd {
    fn one() -> Qd {
        Qd::ONE
    }
}

impl Num for Qd {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Qd, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Qd::from_f64)
    }
}

impl Sum for Qd {
    fn sum<I: Iterator<Item = Qd>>(iter: I) -> Qd {
        iter.fold(Qd::ZERO, |a, b| a + b)
    }
}

/// Scalar type of the numerical kernels: `f64` or [`Qd`].
pub trait Real:
    Num
    + Copy
    + Neg<Output = Self>
    + PartialOrd
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + fmt::Debug
    + 'static
{
    /// Unit roundoff of the working precision.
    const EPSILON: f64;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn to_qd(self) -> Qd;
    fn from_qd(q: Qd) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// The stored zero, at this precision.
    fn zero_of(p: &DiskPoint) -> Complex<Self>;
    /// `1 - |p|^2` without cancellation.
    fn one_minus_abs_sq(p: &DiskPoint) -> Self;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
    const NAME: &'static str = "f64";

    fn from_f64(x: f64) -> f64 {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn to_qd(self) -> Qd {
        Qd::from_f64(self)
    }
    fn from_qd(q: Qd) -> f64 {
        q.to_f64()
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn zero_of(p: &DiskPoint) -> Complex64 {
        p.approx
    }
    fn one_minus_abs_sq(p: &DiskPoint) -> f64 {
        p.one_minus_abs_sq.to_f64()
    }
}

impl Real for Qd {
    const EPSILON: f64 = 1.0e-62;
    const NAME: &'static str = "qd";

    fn from_f64(x: f64) -> Qd {
        Qd::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        Qd::to_f64(self)
    }
    fn to_qd(self) -> Qd {
        self
    }
    fn from_qd(q: Qd) -> Qd {
        q
    }
    fn sqrt(self) -> Qd {
        Qd::sqrt(self)
    }
    fn abs(self) -> Qd {
        Qd::abs(self)
    }
    fn zero_of(p: &DiskPoint) -> Complex<Qd> {
        p.exact
    }
    fn one_minus_abs_sq(p: &DiskPoint) -> Qd {
        p.one_minus_abs_sq
    }
}

pub fn cnorm_sqr<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

pub fn cabs<T: Real>(z: Complex<T>) -> T {
    cnorm_sqr(z).sqrt()
}

/// `|z|` as a double, without squaring tiny or huge parts.
pub fn cabs_f64<T: Real>(z: Complex<T>) -> f64 {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    re.hypot(im)
}

pub fn cfrom<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn cto<T: Real>(z: Complex<T>) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

pub fn cscale<T: Real>(z: Complex<T>, s: T) -> Complex<T> {
    Complex::new(z.re * s, z.im * s)
}

/// Complex division with a single real reciprocal.
pub fn cdiv<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    let inv = T::one() / cnorm_sqr(b);
    Complex::new(
        (a.re * b.re + a.im * b.im) * inv,
        (a.im * b.re - a.re * b.im) * inv,
    )
}

pub fn cinv<T: Real>(b: Complex<T>) -> Complex<T> {
    let inv = T::one() / cnorm_sqr(b);
    Complex::new(b.re * inv, -b.im * inv)
}

pub fn cqd(z: Complex64) -> Complex<Qd> {
    cfrom::<Qd>(z)
}
