//! Critical points, critical values and the exceptional set.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::roots::critical_points;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::from_points(&[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.1, -0.6),
    ])?;
    let crit = critical_points(&b)?;
    // A degree n product has n - 1 critical points in the disk.
    println!("{} critical points", crit.count());
    for ((c, m), (v, s)) in crit
        .critical_points
        .iter()
        .zip(crit.critical_values.iter().zip(&crit.second_derivatives))
    {
        println!("  c = {c:.10} (mult {m})  B(c) = {v:.10}  |B''(c)| = {s:.4}");
    }
    println!(
        "exceptional preimage: {} points",
        crit.exceptional_preimage.len()
    );
    Ok(())
}
