//! Pseudohyperbolic distance and disk automorphisms.
use blaschke_monodromy::mobius::{
    moebius_apply, pseudo_distance, pseudo_distance_pair, DiskPoint, MoebiusMap,
};
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let a = DiskPoint::from_re_im(0.5, 0.1)?;
    let b = DiskPoint::from_re_im(-0.2, 0.6)?;
    println!("d(a, b) = {:.15}", pseudo_distance(&a, &b));

    // Distances are invariant under any automorphism.
    let m = MoebiusMap::normalized(DiskPoint::from_re_im(0.3, -0.4)?);
    let (fa, fb) = (
        DiskPoint::new(m.apply(a.approx)?)?,
        DiskPoint::new(m.apply(b.approx)?)?,
    );
    println!("d(f a, f b) = {:.15}", pseudo_distance(&fa, &fb));

    // phi_a sends a to 0 and maps the circle to itself.
    let (v, d) = moebius_apply(&a, a.approx, true)?;
    println!("phi_a(a) = {v}, phi_a'(a) = {}", d.unwrap());
    let on_circle = moebius_apply(&a, Complex64::from_polar(1.0, 0.7), false)?.0;
    println!("|phi_a(e^0.7i)| = {:.15}", on_circle.norm());

    // Near the circle the complement 1 - d^2 keeps its relative precision.
    let p = DiskPoint::from_polar_decrement(1e-18, 0.0)?;
    let q = DiskPoint::from_polar_decrement(2e-18, 1e-18)?;
    let (dist, comp) = pseudo_distance_pair(&p, &q);
    println!("deep pair: d = {dist}, 1 - d^2 = {comp:.6e}");
    Ok(())
}
