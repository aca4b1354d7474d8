//! Solving B(z) = w inside the disk.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::roots::fiber;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::from_points(&[
        Complex64::new(0.2, 0.1),
        Complex64::new(-0.6, 0.3),
        Complex64::new(0.0, -0.7),
    ])?;
    let w = Complex64::new(0.25, -0.1);
    let f = fiber(&b, w)?;
    println!(
        "fiber over {w}: {} points, simple = {}",
        f.len(),
        f.is_simple()
    );
    for z in &f.points {
        println!(
            "  z = {z:.14}  |B(z) - w| = {:.2e}",
            (b.eval(*z) - w).norm()
        );
    }

    // Over a critical value two points coalesce.
    let sq = FiniteBlaschke::monomial(2)?;
    let f0 = fiber(&sq, Complex64::new(0.0, 0.0))?;
    println!("z^2 over 0: distinct = {:?}", f0.distinct());
    Ok(())
}
