//! Class operators on the Bergman space: adjoints and the kernel identity.
use blaschke_monodromy::bergman::{
    adjoint_residual, kernel_identity_residual, quadrature_for, sample_points, BranchField,
    ClassField,
};
use blaschke_monodromy::blaschke::FiniteBlaschke;
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::mobius::DiskPoint;
use blaschke_monodromy::monodromy::surface_components;
use num_complex::Complex64;

fn main() -> blaschke_monodromy::error::Result<()> {
    let tol = Tolerances::default();
    let b = FiniteBlaschke::from_points(&[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])?
        .times_factor(DiskPoint::from_re_im(0.4, 0.0)?, true);
    let rep = surface_components(&b)?;
    let field = BranchField::new(&b, &tol, &rep)?;
    let quad = quadrature_for(&field, 4, &tol);
    let branches = field.on_quadrature(&quad)?;
    for k in 1..rep.orbits.len() {
        let rho = ClassField::new(&rep, k);
        let inv = ClassField::new(&rep, rep.inverse_pairing[k]);
        let h = |z: Complex64| z * z + 1.0;
        let g = |z: Complex64| z.powu(3);
        let a = adjoint_residual(&rho, &inv, &h, &g, &quad, &branches, tol.forfeit_bound)?;
        println!(
            "class {k}: <E h, g> - <h, E* g> = {:.2e} (forfeited weight {:.1e})",
            a.residual, a.forfeited
        );
        let lam = DiskPoint::from_re_im(0.1, 0.0)?;
        let r = kernel_identity_residual(&field, &rho, &inv, &lam, &sample_points(50, 0.9))?;
        println!("class {k}: kernel identity residual {r:.2e}");
    }
    Ok(())
}
