//! Detecting zero sets invariant under a conjugated rotation.
use blaschke_monodromy::blaschke::ZeroSequence;
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::mobius::DiskPoint;
use blaschke_monodromy::thinprod::detect_rotational_structure;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let tol = Tolerances::default();
    // Four points rotated about 0.2 (in the disk automorphism sense).
    let center = DiskPoint::from_re_im(0.2, 0.0)?;
    let pts: Vec<DiskPoint> = (0..4)
        .map(|k| {
            let u = Complex64::from_polar(0.5, std::f64::consts::TAU * k as f64 / 4.0 + 0.3);
            let c = center.approx;
            DiskPoint::new((u + c) / (Complex64::new(1.0, 0.0) + c.conj() * u))
        })
        .collect::<Result<_, _>>()?;
    match detect_rotational_structure(&ZeroSequence::new(pts, "example"), &tol)? {
        Some(r) => println!(
            "order {} about {:.10} (residual {:.1e})",
            r.n, r.lambda.approx, r.residual
        ),
        None => println!("no rotational structure"),
    }
    Ok(())
}
