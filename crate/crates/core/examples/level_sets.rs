//! Tracing a level curve {|B| = t} by following the fiber over |w| = t.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::continuation::{lift_path, PlanePath, Segment};
use blaschke_monodromy::roots::fiber;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::from_points(&[Complex64::new(0.3, 0.0), Complex64::new(-0.3, 0.0)])?;
    let t = 0.5;
    let samples = 12;
    for z0 in fiber(&b, Complex64::new(t, 0.0))?.points {
        let mut z = z0;
        print!("branch from {z0:.4}:");
        for k in 0..samples {
            let arc = PlanePath::new(vec![Segment::Arc {
                center: Complex64::new(0.0, 0.0),
                radius: t,
                start_angle: std::f64::consts::TAU * k as f64 / samples as f64,
                sweep: std::f64::consts::TAU / samples as f64,
            }]);
            z = lift_path(&b, &arc, z)?.end;
            print!(" {:.3}", b.eval(z).norm());
        }
        println!();
    }
    Ok(())
}
