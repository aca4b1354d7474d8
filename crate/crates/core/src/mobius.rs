//! Pseudohyperbolic geometry of the unit disk.

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::qd::{cabs, cdiv, cnorm_sqr, cqd, cto, Qd, Real};

/// A point of the open unit disk.
///
/// Besides the double approximation the point keeps a quad-double copy and
/// its decrement `1 - |z|`, so points within 1e-20 of the circle stay distinct.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint {
    pub approx: Complex64,
    pub exact: Complex<Qd>,
    /// `1 - |z|`
    pub decrement: f64,
    pub one_minus_abs_sq: Qd,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint {
        approx: Complex64 { re: 0.0, im: 0.0 },
        exact: Complex {
            re: Qd::ZERO,
            im: Qd::ZERO,
        },
        decrement: 1.0,
        one_minus_abs_sq: Qd::ONE,
    };

    /// Interior point from doubles; `|z| < 1 - 1e-12` is enforced.
    pub fn new(z: Complex64) -> Result<Self> {
        Self::with_margin(z, 1e-12)
    }

    pub fn with_margin(z: Complex64, margin: f64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Parameter(format!("non-finite disk point {z}")));
        }
        let p = Self::from_qd(cqd(z))?;
        if p.decrement <= margin {
            return Err(Error::Parameter(format!(
                "point {z} is not inside the disk with margin {margin:e}"
            )));
        }
        Ok(p)
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// Point with modulus `1 - decrement` and argument `angle` (radians).
    pub fn from_polar_decrement(decrement: f64, angle: f64) -> Result<Self> {
        if !(decrement > 0.0 && decrement <= 1.0) {
            return Err(Error::Parameter(format!(
                "decrement {decrement:e} outside (0,1]"
            )));
        }
        let e = Qd::from_f64(decrement);
        let modulus = Qd::ONE - e;
        let (s, c) = angle.sin_cos();
        let dir = Complex::new(Qd::from_f64(c), Qd::from_f64(s));
        let norm = cabs(dir);
        let exact = Complex::new(dir.re * modulus / norm, dir.im * modulus / norm);
        Ok(DiskPoint {
            approx: cto(exact),
            exact,
            decrement,
            one_minus_abs_sq: e * (Qd::from_f64(2.0) - e),
        })
    }

    /// Interior point from a quad-double value.
    pub fn from_qd(z: Complex<Qd>) -> Result<Self> {
        let oms = Qd::ONE - cnorm_sqr(z);
        if oms <= Qd::ZERO {
            return Err(Error::Parameter(format!(
                "point {} is not inside the disk",
                cto(z)
            )));
        }
        let decrement = oms / (Qd::ONE + cabs(z));
        Ok(DiskPoint {
            approx: cto(z),
            exact: z,
            decrement: decrement.to_f64(),
            one_minus_abs_sq: oms,
        })
    }

    pub fn value(&self) -> Complex64 {
        self.approx
    }

    pub fn is_origin(&self) -> bool {
        self.exact.re.is_zero_value() && self.exact.im.is_zero_value()
    }

    pub fn at<T: Real>(&self) -> Complex<T> {
        T::zero_of(self)
    }
}

/// The involution `phi_lambda(z) = (lambda - z)/(1 - conj(lambda) z)`,
/// optionally rotated to `psi_lambda = (|lambda|/lambda) phi_lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    pub pole_param: DiskPoint,
    pub normalized: bool,
}

impl MoebiusMap {
    pub fn new(pole_param: DiskPoint) -> Self {
        MoebiusMap {
            pole_param,
            normalized: false,
        }
    }

    pub fn normalized(pole_param: DiskPoint) -> Self {
        MoebiusMap {
            pole_param,
            normalized: true,
        }
    }

    fn rotation(&self) -> Complex64 {
        let l = self.pole_param.approx;
        if self.normalized && l.norm() > 0.0 {
            l.conj() / l.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        Ok(moebius_apply(&self.pole_param, z, false)?.0 * self.rotation())
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let d = moebius_apply(&self.pole_param, z, true)?
            .1
            .unwrap_or_default();
        Ok(d * self.rotation())
    }
}

/// Generic evaluation of `phi_lambda` and its derivative at `z`.
///
/// The denominator is formed as `(1-|lambda|^2) + conj(lambda)(lambda - z)`,
/// which is exact in the stored decrement.
pub fn phi<T: Real>(lambda: &DiskPoint, z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let l = T::zero_of(lambda);
    let oms = T::one_minus_abs_sq(lambda);
    let a = l - z;
    let b = Complex::new(oms, T::zero()) + l.conj() * a;
    let value = cdiv(a, b);
    let deriv = cdiv(Complex::new(-oms, T::zero()), b * b);
    (value, deriv)
}

/// `phi_lambda(z)` and, when requested, `phi_lambda'(z)`.
///
/// `z` may lie on the closed disk; only `|lambda| = |z| = 1` can make the
/// denominator vanish.
pub fn moebius_apply(
    lambda: &DiskPoint,
    z: Complex64,
    want_derivative: bool,
) -> Result<(Complex64, Option<Complex64>)> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::Parameter(format!(
            "point {z} lies outside the closed disk"
        )));
    }
    let l = lambda.approx;
    let denom = Complex64::new(1.0, 0.0) - l.conj() * z;
    if denom.norm() < 1e-14 {
        return Err(Error::Singularity {
            modulus: denom.norm(),
        });
    }
    let (v, d) = phi::<f64>(lambda, z);
    Ok((v, want_derivative.then_some(d)))
}

/// Pseudohyperbolic distance and its complement `1 - d^2`.
///
/// Uses `|1 - conj(w) z|^2 = |z - w|^2 + (1-|z|^2)(1-|w|^2)` so both numbers
/// keep full relative precision near the circle.
pub fn pseudo_distance_pair(z: &DiskPoint, w: &DiskPoint) -> (f64, f64) {
    let diff = cnorm_sqr(z.exact - w.exact);
    let prod = z.one_minus_abs_sq * w.one_minus_abs_sq;
    let denom = diff + prod;
    if denom.is_zero_value() {
        return (0.0, 1.0);
    }
    let d2 = (diff / denom).to_f64();
    let comp = (prod / denom).to_f64();
    (d2.sqrt(), comp)
}

pub fn pseudo_distance(z: &DiskPoint, w: &DiskPoint) -> f64 {
    pseudo_distance_pair(z, w).0
}

/// `ln d(z,w)`, accurate when `d` is close to 1.
pub fn ln_pseudo_distance(z: &DiskPoint, w: &DiskPoint) -> f64 {
    let (d, comp) = pseudo_distance_pair(z, w);
    if comp < 0.5 {
        0.5 * (-comp).ln_1p()
    } else {
        d.ln()
    }
}

/// Whether `z` lies in the pseudohyperbolic disk of radius `r` about `center`.
pub fn pseudo_disk_contains(center: &DiskPoint, r: f64, z: &DiskPoint) -> Result<bool> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!(
            "pseudohyperbolic radius {r} outside (0,1)"
        )));
    }
    Ok(pseudo_distance(center, z) < r)
}

/// Pseudohyperbolic distance between raw points of working precision `T`.
pub fn pseudo_distance_raw<T: Real>(z: Complex<T>, w: Complex<T>) -> f64 {
    let num = z - w;
    let den = Complex::new(T::one(), T::zero()) - w.conj() * z;
    cabs(cdiv(num, den)).to_f64()
}

pub fn to_disk_point<T: Real>(z: Complex<T>) -> Result<DiskPoint> {
    DiskPoint::from_qd(promote(z))
}

/// Lift a working-precision value to quad-double without losing digits.
pub fn promote<T: Real>(z: Complex<T>) -> Complex<Qd> {
    Complex::new(z.re.to_qd(), z.im.to_qd())
}

/// Round a quad-double value to working precision `T`.
pub fn demote<T: Real>(z: Complex<Qd>) -> Complex<T> {
    Complex::new(T::from_qd(z.re), T::from_qd(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> DiskPoint {
        let r = 0.95 * rng.gen::<f64>().sqrt();
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        DiskPoint::new(Complex64::from_polar(r, t)).unwrap()
    }

    #[test]
    fn fixed_values() {
        let half = DiskPoint::from_re_im(0.5, 0.0).unwrap();
        let (v, _) = moebius_apply(&half, Complex64::new(0.5, 0.0), false).unwrap();
        assert!(v.norm() < 1e-16);
        let (v, d) = moebius_apply(&half, Complex64::new(0.0, 0.0), true).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-16);
        assert!((d.unwrap() - Complex64::new(-0.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn involution_and_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let l = random_point(&mut rng);
            let z = random_point(&mut rng);
            let w = random_point(&mut rng);
            let once = moebius_apply(&l, z.approx, false).unwrap().0;
            let twice = moebius_apply(&l, once, false).unwrap().0;
            assert!((twice - z.approx).norm() < 1e-12);
            let a = l;
            let fz = DiskPoint::new(moebius_apply(&a, z.approx, false).unwrap().0).unwrap();
            let fw = DiskPoint::new(moebius_apply(&a, w.approx, false).unwrap().0).unwrap();
            assert!((pseudo_distance(&fz, &fw) - pseudo_distance(&z, &w)).abs() < 1e-12);
        }
    }

    #[test]
    fn strong_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let (a, b, c) = (
                random_point(&mut rng),
                random_point(&mut rng),
                random_point(&mut rng),
            );
            let x = pseudo_distance(&a, &b);
            let y = pseudo_distance(&b, &c);
            assert!(pseudo_distance(&a, &c) <= (x + y) / (1.0 + x * y) + 1e-14);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let l = random_point(&mut rng);
            let z = random_point(&mut rng).approx * 0.9;
            let h = 1e-6;
            let f = |x: Complex64| moebius_apply(&l, x, false).unwrap().0;
            let fd = (f(z + h) - f(z - h)) / (2.0 * h);
            let d = moebius_apply(&l, z, true).unwrap().1.unwrap();
            assert!((fd - d).norm() <= 1e-6 * d.norm());
        }
    }

    #[test]
    fn disk_membership() {
        let o = DiskPoint::ORIGIN;
        let p = |x: f64| DiskPoint::from_re_im(x, 0.0).unwrap();
        assert!(pseudo_disk_contains(&o, 0.5, &p(0.4)).unwrap());
        assert!(!pseudo_disk_contains(&o, 0.5, &p(0.6)).unwrap());
        assert!(pseudo_disk_contains(&p(0.5), 0.3, &p(0.5)).unwrap());
        assert!(pseudo_disk_contains(&o, 1.5, &p(0.5)).is_err());
    }

    #[test]
    fn deep_points_stay_distinct() {
        let a = DiskPoint::from_polar_decrement(1e-25, 0.3).unwrap();
        let b = DiskPoint::from_polar_decrement(2e-25, 0.3).unwrap();
        let (d, comp) = pseudo_distance_pair(&a, &b);
        // radial pair: d = (e_b - e_a)/(e_a + e_b) to leading order
        assert!((d - 1.0 / 3.0).abs() < 1e-12, "{d}");
        assert!((comp - 8.0 / 9.0).abs() < 1e-12);
        assert!((a.decrement - 1e-25).abs() < 1e-40);
    }

    #[test]
    fn boundary_singularity() {
        let l = DiskPoint::from_polar_decrement(1e-15, 0.0).unwrap();
        assert!(matches!(
            moebius_apply(&l, Complex64::new(1.0, 0.0), false),
            Err(Error::Singularity { .. })
        ));
    }
}
