use blaschke_monodromy::bergman::{
    adjoint_residual, e_op_apply, kernel, kernel_identity_residual, monomial_norm, quadrature_for,
    sample_points, symmetry_unitary_check, BranchField, ClassField,
};
use blaschke_monodromy::blaschke::{compose, FiniteBlaschke};
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::error::Error;
use blaschke_monodromy::mobius::DiskPoint;
use blaschke_monodromy::monodromy::surface_components;
use blaschke_monodromy::thinprod::RotationalStructure;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn square_times(lambda: f64) -> FiniteBlaschke {
    FiniteBlaschke::monomial(2)
        .unwrap()
        .times_factor(DiskPoint::from_re_im(lambda, 0.0).unwrap(), true)
}

#[test]
fn negation_class_of_the_square() {
    let tol = Tolerances::default();
    let b = FiniteBlaschke::monomial(2).unwrap();
    let rep = surface_components(&b).unwrap();
    let field = BranchField::new(&b, &tol, &rep).unwrap();
    let minus = ClassField::new(&rep, 1);
    for z in sample_points(20, 0.9) {
        let one = e_op_apply(&field, &minus, &|_| c(1.0, 0.0), z).unwrap();
        assert!((one + 1.0).norm() < 1e-12);
        let id = e_op_apply(&field, &minus, &|w| w, z).unwrap();
        assert!((id - z).norm() < 1e-12);
        let same = e_op_apply(&field, &ClassField::new(&rep, 0), &|w| w * w + 3.0, z).unwrap();
        assert_eq!(same, z * z + 3.0);
    }
    // E K_lambda = -K_{-lambda} in closed form.
    let lam = DiskPoint::from_re_im(0.3, -0.2).unwrap();
    for z in sample_points(30, 0.9) {
        let lhs = e_op_apply(&field, &minus, &|w| kernel(&lam, w), z).unwrap();
        let rhs = -1.0 / (1.0 + lam.approx.conj() * z).powu(2);
        assert!((lhs - rhs).norm() <= 1e-10);
    }
    let r =
        kernel_identity_residual(&field, &minus, &minus, &lam, &sample_points(50, 0.9)).unwrap();
    assert!(r <= 1e-10, "{r}");
}

#[test]
fn square_adjoints_by_parity() {
    let tol = Tolerances::default();
    let b = FiniteBlaschke::monomial(2).unwrap();
    let rep = surface_components(&b).unwrap();
    let field = BranchField::new(&b, &tol, &rep).unwrap();
    let quad = quadrature_for(&field, 6, &tol);
    let br = field.on_quadrature(&quad).unwrap();
    let minus = ClassField::new(&rep, 1);
    let one = |_: Complex64| c(1.0, 0.0);
    let a = adjoint_residual(&minus, &minus, &one, &one, &quad, &br, tol.forfeit_bound).unwrap();
    assert!(a.residual <= 1e-6);
    let a = adjoint_residual(
        &minus,
        &minus,
        &|z| z * z,
        &|z| z.powu(4),
        &quad,
        &br,
        tol.forfeit_bound,
    )
    .unwrap();
    assert!(a.residual <= 1e-6);
    // <E 1, 1> = -1 exactly.
    let a = adjoint_residual(&minus, &minus, &one, &one, &quad, &br, tol.forfeit_bound).unwrap();
    assert!((a.lhs + 1.0).norm() < 1e-12);
}

#[test]
fn cube_rotation_kernel_identity() {
    let tol = Tolerances::default();
    let b = FiniteBlaschke::monomial(3).unwrap();
    let rep = surface_components(&b).unwrap();
    let field = BranchField::new(&b, &tol, &rep).unwrap();
    let lam = DiskPoint::from_re_im(0.2, 0.0).unwrap();
    for k in 1..3 {
        let rho = ClassField::new(&rep, k);
        let inv = ClassField::new(&rep, rep.inverse_pairing[k]);
        let r =
            kernel_identity_residual(&field, &rho, &inv, &lam, &sample_points(50, 0.9)).unwrap();
        assert!(r <= 1e-8, "{r}");
    }
}

#[test]
fn square_times_factor_adjoint_and_kernel() {
    let tol = Tolerances::default();
    for lambda in [0.4, 0.5] {
        let b = square_times(lambda);
        let rep = surface_components(&b).unwrap();
        assert_eq!(rep.q, 2);
        let field = BranchField::new(&b, &tol, &rep).unwrap();
        let quad = quadrature_for(&field, 6, &tol);
        let br = field.on_quadrature(&quad).unwrap();
        let rho = ClassField::new(&rep, 1);
        let inv = ClassField::new(&rep, rep.inverse_pairing[1]);
        for a in 0..=6u32 {
            for d in 0..=6u32 {
                let r = adjoint_residual(
                    &rho,
                    &inv,
                    &move |z| z.powu(a),
                    &move |z| z.powu(d),
                    &quad,
                    &br,
                    tol.forfeit_bound,
                )
                .unwrap();
                assert!(
                    r.residual <= 1e-3 * monomial_norm(a) * monomial_norm(d),
                    "{a} {d}: {}",
                    r.residual
                );
            }
        }
        let lam = DiskPoint::from_re_im(0.1, 0.0).unwrap();
        let r =
            kernel_identity_residual(&field, &rho, &inv, &lam, &sample_points(50, 0.9)).unwrap();
        assert!(r <= 1e-6, "{r}");
        for x in br.iter().flatten() {
            assert!(x.derivative_gap <= 1e-8);
        }
    }
}

#[test]
fn symmetric_products_give_unitaries() {
    let tol = Tolerances::default();
    let b1 = FiniteBlaschke::from_points(&[c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
    let b = compose(&b1, &FiniteBlaschke::monomial(2).unwrap()).unwrap();
    let rep = surface_components(&b).unwrap();
    let field = BranchField::new(&b, &tol, &rep).unwrap();
    let quad = quadrature_for(&field, 4, &tol);
    let rot = RotationalStructure {
        lambda: DiskPoint::ORIGIN,
        n: 2,
        residual: 0.0,
    };
    let s = symmetry_unitary_check(&b, &rot, &|z| z, &|z| z, &quad).unwrap();
    assert!(
        s.commutation_residual <= 1e-9 && s.isometry_residual <= 1e-9,
        "{s:?}"
    );
    let one = |_: Complex64| c(1.0, 0.0);
    let s = symmetry_unitary_check(&b, &rot, &one, &one, &quad).unwrap();
    assert!(s.isometry_residual <= 1e-9);

    let generic = FiniteBlaschke::from_points(&[c(0.3, 0.2), c(-0.5, 0.1), c(0.0, -0.4)]).unwrap();
    assert!(matches!(
        symmetry_unitary_check(&generic, &rot, &one, &one, &quad),
        Err(Error::NotSymmetric(_))
    ));
}
