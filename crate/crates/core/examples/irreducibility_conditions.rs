//! Simple critical points with injective critical values, up to an exempt set.
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::monodromy::{irreducibility_conditions, surface_components};
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let generic = FiniteBlaschke::from_points(&[
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.4, 0.5),
        Complex64::new(0.2, -0.6),
    ])?;
    let c = irreducibility_conditions(&generic, &[])?;
    println!(
        "generic: pass = {}, margins {:?} {:?}",
        c.pass, c.simple_margin, c.injectivity_margin
    );
    println!("generic: q = {}", surface_components(&generic)?.q);

    // z^2 * phi: the double critical point at 0 fails unless exempted.
    let b = FiniteBlaschke::from_points(&[Complex64::new(0.0, 0.0); 3])?.times_factor(
        blaschke_monodromy::mobius::DiskPoint::from_re_im(0.5, 0.0)?,
        true,
    );
    println!(
        "z^3 phi: pass = {}",
        irreducibility_conditions(&b, &[])?.pass
    );
    println!(
        "z^3 phi with 0 exempt: pass = {}",
        irreducibility_conditions(&b, &[0])?.pass
    );
    Ok(())
}
