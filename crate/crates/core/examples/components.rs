//! Components of the surface {B(z) = B(w)} via stabilizer orbits.
use blaschke_monodromy::blaschke::{compose, FiniteBlaschke};
use blaschke_monodromy::monodromy::surface_components;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let products = [
        ("z^2", FiniteBlaschke::monomial(2)?),
        ("z^4", FiniteBlaschke::monomial(4)?),
        (
            "generic degree 4",
            FiniteBlaschke::from_points(&[
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.5, 0.3),
                Complex64::new(0.6, -0.1),
                Complex64::new(-0.2, -0.7),
            ])?,
        ),
        // A composition factors through z^2, which forces extra components.
        (
            "B1(z^2)",
            compose(
                &FiniteBlaschke::from_points(&[
                    Complex64::new(0.3, 0.1),
                    Complex64::new(-0.2, 0.5),
                ])?,
                &FiniteBlaschke::monomial(2)?,
            )?,
        ),
    ];
    for (name, b) in &products {
        let r = surface_components(b)?;
        println!(
            "{name}: q = {}, orbits {:?}, inverse pairing {:?}",
            r.q, r.orbits, r.inverse_pairing
        );
    }
    Ok(())
}
