//! Tracking fiber points along paths in the w-plane.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::continuation::{lift_loop_permutation, lift_path, PlanePath, Segment};
use blaschke_monodromy::roots::fiber;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::monomial(3)?;
    let w0 = Complex64::new(0.5, 0.0);
    let base = fiber(&b, w0)?;

    // Half of the circle |w| = 1/2.
    let half = PlanePath::new(vec![Segment::Arc {
        center: Complex64::new(0.0, 0.0),
        radius: 0.5,
        start_angle: 0.0,
        sweep: std::f64::consts::PI,
    }]);
    let track = lift_path(&b, &half, base.points[0])?;
    println!(
        "start {:.12} -> end {:.12} in {} steps",
        track.start, track.end, track.steps
    );
    println!(
        "cube root of -1/2: {:.12}",
        Complex64::new(-0.5, 0.0).powf(1.0 / 3.0)
    );

    // A full turn around the only critical value permutes the fiber cyclically.
    let full = PlanePath::circle(Complex64::new(0.0, 0.0), 0.5, 0.0);
    let p = lift_loop_permutation(&b, &full, &base)?;
    println!("loop permutation {:?}", p.images());
    Ok(())
}
