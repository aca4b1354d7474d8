//! Monodromy generators and the group they generate.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::monodromy::{distinct_critical_values, monodromy_group, select_basepoint};
use blaschke_monodromy::roots::critical_points;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::from_points(&[
        Complex64::new(0.1, 0.2),
        Complex64::new(-0.5, 0.3),
        Complex64::new(0.6, -0.1),
        Complex64::new(-0.2, -0.7),
    ])?;
    let values = distinct_critical_values(&critical_points(&b)?);
    let w0 = select_basepoint(&values, &Tolerances::default())?;
    let (group, gens) = monodromy_group(&b, w0)?;
    println!("basepoint {w0:.6}");
    for (v, g) in values.iter().zip(&gens) {
        println!("  around {v:.6}: {:?}", g.images());
    }
    // Generic products have the full symmetric group.
    println!("group order {}", group.order());
    Ok(())
}
