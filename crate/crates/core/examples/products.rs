//! Building, evaluating, expanding and composing finite Blaschke products.
use blaschke_monodromy::blaschke::{compose, eval_with_derivative, to_rational, FiniteBlaschke};
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let b = FiniteBlaschke::from_points(&[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.4, 0.2),
        Complex64::new(-0.5, 0.1),
    ])?;
    let z = Complex64::new(0.3, -0.2);
    let (v, d) = eval_with_derivative(&b, z);
    println!("degree {}: B(z) = {v:.12}, B'(z) = {d:.12}", b.degree());

    let r = to_rational(&b)?;
    println!("numerator {:?}", r.numerator_coeffs);
    println!("p/q at z = {:.12}", r.eval(z));
    println!(
        "|B| on the circle = {:.15}",
        b.eval(Complex64::from_polar(1.0, 2.0)).norm()
    );

    let inner = FiniteBlaschke::monomial(2)?;
    let c = compose(&b, &inner)?;
    println!(
        "B(z^2) has degree {} and value {:.12}",
        c.degree(),
        c.eval(z)
    );
    println!("check      {:.12}", b.eval(z * z));
    Ok(())
}
