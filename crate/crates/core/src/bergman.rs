//! Bergman-space checks of the class operators `E_[rho]`: adjoint pairs,
//! the reproducing-kernel expansion, and symmetry unitaries.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::blaschke::FiniteBlaschke;
use crate::config::Tolerances;
use crate::continuation::{FiberTrack, Segment, Tracker};
use crate::error::{Error, Result};
use crate::mobius::DiskPoint;
use crate::monodromy::ComponentReport;
use crate::thinprod::RotationalStructure;

/// Gauss–Legendre nodes and weights on `[0,1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Product rule for the normalized area measure: Gauss–Legendre in `r^2`
/// times the trapezoid rule in angle.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskQuadrature {
    pub nodes: Vec<(Complex64, f64)>,
    pub radial_order: usize,
    pub angular_order: usize,
    pub angular_offset: f64,
    /// Ring index and angle index of each node.
    pub layout: Vec<(usize, usize)>,
}

impl DiskQuadrature {
    pub fn new(radial_order: usize, angular_order: usize) -> Self {
        Self::with_offset(radial_order, angular_order, 0.0)
    }

    pub fn with_offset(radial_order: usize, angular_order: usize, offset: f64) -> Self {
        let gl = gauss_legendre(radial_order);
        let mut nodes = Vec::new();
        let mut layout = Vec::new();
        for (k, &(s, ws)) in gl.iter().enumerate() {
            let r = s.sqrt();
            for j in 0..angular_order {
                let t = offset + TAU * j as f64 / angular_order as f64;
                nodes.push((Complex64::from_polar(r, t), ws / angular_order as f64));
                layout.push((k, j));
            }
        }
        DiskQuadrature {
            nodes,
            radial_order,
            angular_order,
            angular_offset: offset,
            layout,
        }
    }

    /// Rule whose nodes all keep `clearance` from `avoid`, trying a sequence of
    /// angular offsets; the plain rule if none succeeds.
    pub fn avoiding(
        radial_order: usize,
        angular_order: usize,
        avoid: &[Complex64],
        clearance: f64,
    ) -> Self {
        let step = TAU / angular_order as f64;
        for k in 0..97 {
            let q = Self::with_offset(radial_order, angular_order, step * k as f64 / 97.0);
            if q.nodes
                .iter()
                .all(|(z, _)| avoid.iter().all(|p| (p - z).norm() > clearance))
            {
                return q;
            }
        }
        Self::new(radial_order, angular_order)
    }

    pub fn ring_radius(&self, k: usize) -> f64 {
        self.nodes[k * self.angular_order].0.norm()
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().map(|&(z, w)| f(z) * w).sum()
    }
}

/// Bergman kernel `1/(1 - conj(lambda) z)^2`.
pub fn kernel(lambda: &DiskPoint, z: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - lambda.approx.conj() * z;
    Complex64::new(1.0, 0.0) / (d * d)
}

/// Bergman norm of `z^k`.
pub fn monomial_norm(k: u32) -> f64 {
    1.0 / ((k + 1) as f64).sqrt()
}

/// Straight route from `a` to `b` with detours keeping `2 clearance` from `avoid`.
fn route(
    a: Complex64,
    b: Complex64,
    avoid: &[Complex64],
    clearance: f64,
    depth: usize,
) -> Vec<Segment> {
    let seg = Segment::Line { from: a, to: b };
    let hit = avoid
        .iter()
        .filter(|&&p| (p - a).norm() > 2.0 * clearance && (p - b).norm() > 2.0 * clearance)
        .map(|&p| (p, seg.distance_to(p)))
        .filter(|&(_, d)| d < 2.0 * clearance)
        .min_by(|x, y| x.1.total_cmp(&y.1));
    match hit {
        Some((p, _)) if depth > 0 => {
            let d = b - a;
            let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            let foot = a + d * s;
            let away = if (foot - p).norm() > 1e-14 {
                (foot - p) / (foot - p).norm()
            } else {
                Complex64::new(-d.im, d.re) / d.norm()
            };
            let mid = p + away * (4.0 * clearance);
            let mut out = route(a, mid, avoid, clearance, depth - 1);
            out.extend(route(mid, b, avoid, clearance, depth - 1));
            out
        }
        _ => vec![seg],
    }
}

/// All local inverses `rho_i` at points of the disk, continued from the
/// base fiber of a component report.
pub struct BranchField<'a> {
    pub tracker: Tracker<'a, f64>,
    pub report: &'a ComponentReport,
    pub clearance: f64,
    exceptional: Vec<Complex64>,
}

/// Values and derivatives of the `n` branches at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Branches {
    pub z: Complex64,
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
    /// `max |B(rho_i(z)) - B(z)|`
    pub residual: f64,
    /// `max | |B'(rho_i)| |rho_i'| - |B'(z)| |`
    pub derivative_gap: f64,
}

impl<'a> BranchField<'a> {
    pub fn new(
        b: &'a FiniteBlaschke,
        tol: &'a Tolerances,
        report: &'a ComponentReport,
    ) -> Result<Self> {
        if b.needs_extended(tol) {
            return Err(Error::Parameter(
                "Bergman checks need a product resolvable in double precision".into(),
            ));
        }
        let tracker = Tracker::<f64>::new(b, tol)?;
        let exceptional =
            crate::roots::critical_points_in::<f64>(b, tol, true)?.exceptional_preimage;
        Ok(BranchField {
            tracker,
            report,
            clearance: tol.bergman_clearance,
            exceptional,
        })
    }

    pub fn exceptional(&self) -> &[Complex64] {
        &self.exceptional
    }

    pub fn is_clear(&self, z: Complex64) -> bool {
        self.exceptional
            .iter()
            .all(|p| (p - z).norm() > self.clearance)
    }

    fn advance(
        &self,
        from: Complex64,
        to: Complex64,
        values: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        let b = self.tracker.b;
        let segs = route(from, to, &self.exceptional, self.clearance, 6);
        let mut cur = values.to_vec();
        for seg in segs {
            if seg.length() == 0.0 {
                continue;
            }
            let curve = |s: f64| {
                let z = seg.point(s);
                let (v, d) = b.eval_d(z);
                (v, d * seg.velocity(s))
            };
            cur = cur
                .iter()
                .map(|&z| {
                    let mut track = FiberTrack {
                        start: z,
                        samples: Vec::new(),
                        end: z,
                        min_b_derivative: f64::INFINITY,
                        steps: 0,
                    };
                    self.tracker.track_curve(curve, z, (0.0, 1.0), &mut track)
                })
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(cur)
    }

    fn finish(&self, z: Complex64, values: Vec<Complex64>) -> Branches {
        let b = self.tracker.b;
        let (bz, dz) = b.eval_d(z);
        let mut residual: f64 = 0.0;
        let mut derivative_gap: f64 = 0.0;
        let derivatives = values
            .iter()
            .map(|&r| {
                let (br, dr) = b.eval_d(r);
                residual = residual.max((br - bz).norm());
                let d = dz / dr;
                derivative_gap = derivative_gap.max((dr.norm() * d.norm() - dz.norm()).abs());
                d
            })
            .collect();
        Branches {
            z,
            values,
            derivatives,
            residual,
            derivative_gap,
        }
    }

    /// Branches at `z`, tracked along a detoured straight route from the base point.
    pub fn at(&self, z: Complex64) -> Result<Branches> {
        let base = self.report.basepoint;
        let values = self.advance(base, z, &self.report.fiber.points)?;
        Ok(self.finish(z, values))
    }

    /// Branches at every quadrature node, following one ray per angle outward.
    /// Entries are `None` for forfeited nodes.
    pub fn on_quadrature(&self, quad: &DiskQuadrature) -> Result<Vec<Option<Branches>>> {
        let a = quad.angular_order;
        let rays = (0..a)
            .into_par_iter()
            .map(|j| {
                let mut out = Vec::with_capacity(quad.radial_order);
                let mut pos = self.report.basepoint;
                let mut vals = self.report.fiber.points.clone();
                for k in 0..quad.radial_order {
                    let z = quad.nodes[k * a + j].0;
                    vals = self.advance(pos, z, &vals)?;
                    pos = z;
                    out.push(self.is_clear(z).then(|| self.finish(z, vals.clone())));
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(quad.nodes.len());
        for k in 0..quad.radial_order {
            for ray in &rays {
                out.push(ray[k].clone());
            }
        }
        Ok(out)
    }
}

/// One class `[rho]`: an orbit of fiber indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassField {
    pub orbit: Vec<usize>,
}

impl ClassField {
    pub fn new(report: &ComponentReport, orbit_index: usize) -> Self {
        ClassField {
            orbit: report.orbits[orbit_index].clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.orbit == [0]
    }

    /// `sum_{i in orbit} h(rho_i(z)) rho_i'(z)`
    pub fn apply(&self, br: &Branches, h: &dyn Fn(Complex64) -> Complex64) -> Complex64 {
        self.orbit
            .iter()
            .map(|&i| h(br.values[i]) * br.derivatives[i])
            .sum()
    }
}

/// `E_[rho] h (z)`. The identity class needs no tracking.
pub fn e_op_apply(
    field: &BranchField,
    class: &ClassField,
    h: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
) -> Result<Complex64> {
    if class.is_identity() {
        return Ok(h(z));
    }
    Ok(class.apply(&field.at(z)?, h))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointCheck {
    pub residual: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub forfeited: f64,
}

/// `|<E_rho h, g> - <h, E_rho' g>|` over the quadrature; `branches` from
/// [`BranchField::on_quadrature`].
pub fn adjoint_residual(
    rho: &ClassField,
    rho_inv: &ClassField,
    h: &dyn Fn(Complex64) -> Complex64,
    g: &dyn Fn(Complex64) -> Complex64,
    quad: &DiskQuadrature,
    branches: &[Option<Branches>],
    forfeit_bound: f64,
) -> Result<AdjointCheck> {
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut forfeited = 0.0;
    for (&(z, w), br) in quad.nodes.iter().zip(branches) {
        match br {
            Some(br) => {
                lhs += rho.apply(br, h) * g(z).conj() * w;
                rhs += h(z) * rho_inv.apply(br, g).conj() * w;
            }
            None => forfeited += w,
        }
    }
    if forfeited > forfeit_bound {
        return Err(Error::Coverage {
            forfeited,
            bound: forfeit_bound,
        });
    }
    Ok(AdjointCheck {
        residual: (lhs - rhs).norm(),
        lhs,
        rhs,
        forfeited,
    })
}

/// `max_z |E_rho K_lambda(z) - sum_{sigma in [rho^-]} conj(sigma'(lambda)) K_{sigma(lambda)}(z)|`.
pub fn kernel_identity_residual(
    field: &BranchField,
    rho: &ClassField,
    rho_inv: &ClassField,
    lambda: &DiskPoint,
    samples: &[Complex64],
) -> Result<f64> {
    let at_lambda = field.at(lambda.approx)?;
    let targets: Vec<(DiskPoint, Complex64)> = rho_inv
        .orbit
        .iter()
        .map(|&i| {
            Ok((
                DiskPoint::new(at_lambda.values[i])?,
                at_lambda.derivatives[i].conj(),
            ))
        })
        .collect::<Result<_>>()?;
    let k = |z: Complex64| kernel(lambda, z);
    samples
        .par_iter()
        .map(|&z| {
            let lhs = if rho.is_identity() {
                k(z)
            } else {
                rho.apply(&field.at(z)?, &k)
            };
            let rhs: Complex64 = targets.iter().map(|(p, c)| c * kernel(p, z)).sum();
            Ok((lhs - rhs).norm())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCheck {
    pub commutation_residual: f64,
    pub isometry_residual: f64,
    pub precondition_residual: f64,
}

/// Deterministic spread of `count` points in the disk of radius `radius`.
pub fn sample_points(count: usize, radius: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            Complex64::from_polar(
                radius * ((k as f64 + 0.5) / count as f64).sqrt(),
                golden * k as f64,
            )
        })
        .collect()
}

/// Residuals of `U f = f(rho) rho'` commuting with multiplication by `B` and
/// preserving `<f, g>`.
pub fn symmetry_unitary_check(
    b: &FiniteBlaschke,
    rot: &RotationalStructure,
    f: &dyn Fn(Complex64) -> Complex64,
    g: &dyn Fn(Complex64) -> Complex64,
    quad: &DiskQuadrature,
) -> Result<SymmetryCheck> {
    let pre = sample_points(100, 0.95)
        .iter()
        .map(|&z| (b.eval(rot.map(z).0) - b.eval(z)).norm())
        .fold(0.0, f64::max);
    if pre > 1e-8 {
        return Err(Error::NotSymmetric(format!(
            "max |B(rho(z)) - B(z)| = {pre:e}"
        )));
    }
    let u = |p: &dyn Fn(Complex64) -> Complex64, z: Complex64| {
        let (r, dr) = rot.map(z);
        p(r) * dr
    };
    let bf = |z: Complex64| b.eval(z) * f(z);
    let mut comm = 0.0;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    for &(z, w) in &quad.nodes {
        comm += (u(&bf, z) - b.eval(z) * u(f, z)).norm_sqr() * w;
        lhs += u(f, z) * u(g, z).conj() * w;
        rhs += f(z) * g(z).conj() * w;
    }
    Ok(SymmetryCheck {
        commutation_residual: comm.sqrt(),
        isometry_residual: (lhs - rhs).norm(),
        precondition_residual: pre,
    })
}

/// Quadrature sized for monomials up to `degree`, kept clear of the exceptional set.
pub fn quadrature_for(field: &BranchField, degree: usize, tol: &Tolerances) -> DiskQuadrature {
    let angular = (4 * degree + 4).max(64);
    DiskQuadrature::avoiding(24, angular, field.exceptional(), tol.bergman_clearance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::surface_components;

    #[test]
    fn quadrature_weights_and_exactness() {
        let q = DiskQuadrature::new(8, 32);
        let total: f64 = q.nodes.iter().map(|n| n.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for m in 0..=14u32 {
            for n in 0..=14u32 {
                let v = q.integrate(|z| z.powu(m) * z.powu(n).conj());
                let want = if m == n { 1.0 / (n + 1) as f64 } else { 0.0 };
                assert!((v - want).norm() < 1e-10, "{m} {n} {v}");
            }
        }
    }

    #[test]
    fn kernel_reproduces() {
        let q = DiskQuadrature::new(8, 32);
        let l = DiskPoint::new(Complex64::new(0.3, 0.0)).unwrap();
        assert_eq!(
            kernel(&DiskPoint::ORIGIN, Complex64::new(0.2, 0.4)),
            Complex64::new(1.0, 0.0)
        );
        let v = q.integrate(|z| z * z * kernel(&l, z).conj());
        assert!((v - 0.09).norm() < 1e-9);
    }

    #[test]
    fn square_class_is_negation() {
        let b = FiniteBlaschke::monomial(2).unwrap();
        let tol = Tolerances::default();
        let report = surface_components(&b).unwrap();
        let field = BranchField::new(&b, &tol, &report).unwrap();
        let rho = ClassField::new(&report, 1);
        let z = Complex64::new(0.3, -0.2);
        let one = e_op_apply(&field, &rho, &|_| Complex64::new(1.0, 0.0), z).unwrap();
        assert!((one + 1.0).norm() < 1e-12);
        let id = e_op_apply(&field, &rho, &|w| w, z).unwrap();
        assert!((id - z).norm() < 1e-12);
    }
}
