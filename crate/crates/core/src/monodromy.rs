//! Monodromy group, components of the surface `{B(z) = B(w)}`, gluing graph,
//! and the simple/injective critical-value conditions.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::blaschke::FiniteBlaschke;
use crate::config::Tolerances;
use crate::continuation::{Collision, PlanePath, Segment, Tracker};
use crate::error::{Error, Result};
use crate::perm::{orbit_with_transversal, orbits, stabilizer_generators, PermGroup, Permutation};
use crate::qd::{cabs_f64, cfrom, cto, Qd, Real};
use crate::roots::{critical_points_in, fiber_in, CriticalData, Fiber};

/// Distinct critical values, merged relative to their distance from the circle.
pub fn distinct_critical_values<T: Real>(crit: &CriticalData<T>) -> Vec<Complex<T>> {
    let rel = if T::EPSILON < 1e-20 { 1e-30 } else { 1e-10 };
    let mut out: Vec<Complex<T>> = Vec::new();
    for &v in &crit.critical_values {
        let gap = (1.0 - cabs_f64(v)).clamp(1e-300, 1.0);
        if !out.iter().any(|&u| cabs_f64(u - v) <= rel * gap) {
            out.push(v);
        }
    }
    out
}

/// Radius of the petal circle around `values[i]` before tail adjustments.
pub fn loop_radius(values: &[Complex64], i: usize, tol: &Tolerances) -> f64 {
    let v = values[i];
    let half_gap = values
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &u)| 0.5 * (u - v).norm())
        .fold(f64::INFINITY, f64::min);
    tol.loop_radius_max
        .min(half_gap)
        .min(0.5 * (1.0 - v.norm()))
}

/// Loop radii at basepoint `w0`, shrunk so no approach tail enters another petal;
/// an error names the obstruction when `w0` is inadmissible.
pub fn petal_radii(
    values: &[Complex64],
    w0: Complex64,
    tol: &Tolerances,
) -> std::result::Result<Vec<f64>, String> {
    if w0.norm() >= 0.96 {
        return Err(format!("{w0} is too close to the unit circle"));
    }
    let mut radii: Vec<f64> = (0..values.len())
        .map(|i| loop_radius(values, i, tol))
        .collect();
    for (i, &v) in values.iter().enumerate() {
        if (w0 - v).norm() <= 2.0 * radii[i] {
            return Err(format!(
                "{w0} lies within twice the loop radius of critical value {v}"
            ));
        }
    }
    let base = radii.clone();
    for (i, &v) in values.iter().enumerate() {
        let tail = Segment::Line { from: w0, to: v };
        for (j, &u) in values.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = tail.distance_to(u);
            if d < (0.25 * base[j]).min(tol.path_clearance) {
                return Err(format!(
                    "approach to {v} passes within {d:e} of critical value {u}"
                ));
            }
            radii[j] = radii[j].min(0.5 * d);
        }
    }
    Ok(radii)
}

/// Deterministic basepoint: the origin if admissible, else the first admissible
/// point on rings of radius `0.05 j` carrying `8 j` equally spaced candidates.
pub fn select_basepoint(values: &[Complex64], tol: &Tolerances) -> Result<Complex64> {
    let origin = Complex64::new(0.0, 0.0);
    let mut why = match petal_radii(values, origin, tol) {
        Ok(_) => return Ok(origin),
        Err(w) => w,
    };
    let mut j = 1;
    while tol.basepoint_step * j as f64 <= 0.95 {
        let rho = tol.basepoint_step * j as f64;
        let count = 8 * j;
        for k in 0..count {
            let w0 = Complex64::from_polar(rho, TAU * k as f64 / count as f64);
            match petal_radii(values, w0, tol) {
                Ok(_) => return Ok(w0),
                Err(w) => why = w,
            }
        }
        j += 1;
    }
    Err(Error::Basepoint(format!(
        "no admissible basepoint on the search spiral; last: {why}"
    )))
}

/// One petal per distinct critical value, ordered by `arg(v - w0)`.
pub fn loops_for_values(
    values: &[Complex64],
    w0: Complex64,
    tol: &Tolerances,
) -> Result<Vec<(Complex64, PlanePath)>> {
    let radii = petal_radii(values, w0, tol).map_err(Error::Basepoint)?;
    let mut out: Vec<(Complex64, PlanePath)> = values
        .iter()
        .zip(&radii)
        .map(|(&v, &r)| (v, PlanePath::petal(w0, v, r).with_clearance(values)))
        .collect();
    out.sort_by(|a, b| (a.0 - w0).arg().total_cmp(&(b.0 - w0).arg()));
    Ok(out)
}

/// Petal loops based at `w0` around each distinct critical value of `b`.
pub fn generator_loops(b: &FiniteBlaschke, w0: Complex64) -> Result<Vec<PlanePath>> {
    let tol = Tolerances::default();
    let values = if b.needs_extended(&tol) {
        let crit = critical_points_in::<Qd>(b, &tol, false)?;
        distinct_critical_values(&crit)
            .iter()
            .map(|&v| cto(v))
            .collect::<Vec<_>>()
    } else {
        let crit = critical_points_in::<f64>(b, &tol, false)?;
        distinct_critical_values(&crit)
    };
    Ok(loops_for_values(&values, w0, &tol)?
        .into_iter()
        .map(|(_, p)| p)
        .collect())
}

/// Tracker, basepoint, base fiber and loop generators at precision `T`.
pub struct MonodromyContext<'a, T: Real> {
    pub tracker: Tracker<'a, T>,
    pub values: Vec<Complex64>,
    pub w0: Complex64,
    pub base: Fiber<T>,
    pub loops: Vec<(Complex64, PlanePath)>,
    pub generators: Vec<Permutation>,
    pub group: PermGroup,
}

impl<'a, T: Real> MonodromyContext<'a, T> {
    pub fn new(b: &'a FiniteBlaschke, tol: &'a Tolerances, w0: Option<Complex64>) -> Result<Self> {
        let tracker = Tracker::<T>::new(b, tol)?;
        let values: Vec<Complex64> = distinct_critical_values(&tracker.crit)
            .iter()
            .map(|&v| cto(v))
            .collect();
        let w0 = match w0 {
            Some(w) => w,
            None => select_basepoint(&values, tol)?,
        };
        let loops = loops_for_values(&values, w0, tol)?;
        let base = fiber_in::<T>(b, cfrom(w0), tol)?;
        if !base.is_simple() {
            return Err(Error::Basepoint(format!(
                "fiber over {w0} has a multiple point"
            )));
        }
        let n = base.len();
        let generators = loops
            .par_iter()
            .map(|(_, lp)| tracker.loop_permutation(lp, &base))
            .collect::<Result<Vec<_>>>()?;
        let group = PermGroup::new(n, generators.clone(), tol.group_enum_bound)?;
        let orbit = group.orbit(0).len();
        if orbit != n {
            return Err(Error::NonTransitive { orbit, degree: n });
        }
        Ok(MonodromyContext {
            tracker,
            values,
            w0,
            base,
            loops,
            generators,
            group,
        })
    }

    pub fn components(&self) -> ComponentReport {
        let n = self.base.len();
        let stab = stabilizer_generators(&self.generators, n, 0);
        let orbs = orbits(&stab, n);
        let orbit_of = |i: usize| orbs.iter().position(|o| o.contains(&i)).expect("partition");
        let (_, transversal) = orbit_with_transversal(&self.generators, n, 0);
        let inverse_pairing = orbs
            .iter()
            .map(|o| {
                let j = o[0];
                let u = transversal[j].as_ref().expect("transitive");
                orbit_of(u.inverse().apply(0))
            })
            .collect();
        ComponentReport {
            w0: self.w0,
            basepoint: cto(self.base.points[0]),
            fiber: self.base.to_f64(),
            critical_values: self.values.clone(),
            generators: self.generators.clone(),
            group_order: self.group.order(),
            q: orbs.len(),
            multiplicities: orbs.iter().map(|o| o.len()).collect(),
            orbits: orbs,
            inverse_pairing,
            precision: T::NAME,
        }
    }

    pub fn collision(&self, v: Complex64) -> Result<Collision> {
        self.tracker.radial_collision(&self.base, self.w0, v)
    }

    pub fn gluing_graph(&self) -> Result<GluingGraph> {
        let n = self.base.len();
        let collisions = self
            .values
            .par_iter()
            .map(|&v| self.collision(v))
            .collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for c in &collisions {
            for block in &c.blocks {
                for (a, &i) in block.iter().enumerate() {
                    for &j in &block[a + 1..] {
                        edges.push((i.min(j), i.max(j), c.value));
                    }
                }
            }
        }
        let components = count_components(n, edges.iter().map(|e| (e.0, e.1)));
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(GluingGraph {
            vertices: (0..n).collect(),
            edges,
            connected: true,
            w0: self.w0,
        })
    }
}

fn count_components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for (i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Orbits of the stabilizer of fiber index 0: the components of the surface.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub w0: Complex64,
    /// Fiber point with index 0.
    pub basepoint: Complex64,
    pub fiber: Fiber,
    pub critical_values: Vec<Complex64>,
    pub generators: Vec<Permutation>,
    pub group_order: u128,
    pub orbits: Vec<Vec<usize>>,
    pub q: usize,
    pub multiplicities: Vec<usize>,
    /// `inverse_pairing[k]` is the orbit of the inverse class of orbit `k`.
    pub inverse_pairing: Vec<usize>,
    pub precision: &'static str,
}

/// Collision cliques over every critical value.
#[derive(Clone, Debug, PartialEq)]
pub struct GluingGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize, Complex64)>,
    pub connected: bool,
    pub w0: Complex64,
}

/// Margins for simple critical points and distinct critical values.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    /// Minimal `|B''|` over non-exempt critical points (zero for a multiple one).
    pub simple_margin: Option<f64>,
    /// Minimal distance between critical values of distinct non-exempt points.
    pub injectivity_margin: Option<f64>,
    pub exempt: Vec<usize>,
    pub pass: bool,
}

fn with_precision<R>(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    w0: Option<Complex64>,
    f64_run: impl FnOnce(&MonodromyContext<f64>) -> Result<R>,
    qd_run: impl FnOnce(&MonodromyContext<Qd>) -> Result<R>,
) -> Result<R> {
    if b.needs_extended(tol) {
        qd_run(&MonodromyContext::<Qd>::new(b, tol, w0)?)
    } else {
        f64_run(&MonodromyContext::<f64>::new(b, tol, w0)?)
    }
}

/// Group generated by the petal-loop permutations at `w0`, and those generators.
pub fn monodromy_group(b: &FiniteBlaschke, w0: Complex64) -> Result<(PermGroup, Vec<Permutation>)> {
    let tol = Tolerances::default();
    with_precision(
        b,
        &tol,
        Some(w0),
        |c| Ok((c.group.clone(), c.generators.clone())),
        |c| Ok((c.group.clone(), c.generators.clone())),
    )
}

pub fn surface_components(b: &FiniteBlaschke) -> Result<ComponentReport> {
    surface_components_with(b, &Tolerances::default(), None)
}

pub fn surface_components_with(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    w0: Option<Complex64>,
) -> Result<ComponentReport> {
    with_precision(b, tol, w0, |c| Ok(c.components()), |c| Ok(c.components()))
}

pub fn gluing_graph(b: &FiniteBlaschke) -> Result<GluingGraph> {
    gluing_graph_with(b, &Tolerances::default(), None)
}

pub fn gluing_graph_with(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    w0: Option<Complex64>,
) -> Result<GluingGraph> {
    with_precision(b, tol, w0, |c| c.gluing_graph(), |c| c.gluing_graph())
}

/// Components and gluing graph from one set of loop lifts.
pub fn analyze_with(
    b: &FiniteBlaschke,
    tol: &Tolerances,
    w0: Option<Complex64>,
) -> Result<(ComponentReport, GluingGraph)> {
    with_precision(
        b,
        tol,
        w0,
        |c| Ok((c.components(), c.gluing_graph()?)),
        |c| Ok((c.components(), c.gluing_graph()?)),
    )
}

/// Conditions on the critical points outside `exempt` (indices into the
/// critical point list of [`crate::roots::critical_points`]).
pub fn irreducibility_conditions(b: &FiniteBlaschke, exempt: &[usize]) -> Result<ConditionReport> {
    let tol = Tolerances::default();
    let crit = crate::roots::critical_points_with(b, &tol)?;
    Ok(conditions_from(&crit, exempt, tol.conditions_tol))
}

pub fn conditions_from(crit: &CriticalData, exempt: &[usize], threshold: f64) -> ConditionReport {
    let kept: Vec<usize> = (0..crit.critical_points.len())
        .filter(|i| !exempt.contains(i))
        .collect();
    let simple_margin = kept
        .iter()
        .map(|&i| {
            if crit.critical_points[i].1 > 1 {
                0.0
            } else {
                crit.second_derivatives[i]
            }
        })
        .reduce(f64::min);
    let mut injectivity_margin: Option<f64> = None;
    for (a, &i) in kept.iter().enumerate() {
        for &j in &kept[a + 1..] {
            let d = (crit.critical_values[i] - crit.critical_values[j]).norm();
            injectivity_margin = Some(injectivity_margin.map_or(d, |m| m.min(d)));
        }
    }
    let pass = simple_margin.is_none_or(|m| m >= threshold)
        && injectivity_margin.is_none_or(|m| m >= threshold);
    ConditionReport {
        simple_margin,
        injectivity_margin,
        exempt: exempt.to_vec(),
        pass,
    }
}
