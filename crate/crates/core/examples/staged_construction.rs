//! Staged construction of products whose surfaces have two components.
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::thinprod::{
    construct_irreducible_stages, extract_all, generate_thin_sequence, ThinSpec,
};

fn main() -> blaschke_monodromy::error::Result<()> {
    let tol = Tolerances {
        max_truncation: 32,
        ..Tolerances::default()
    };
    let pool = extract_all(&generate_thin_sequence(&ThinSpec::factorial(32), &tol, 0)?)?.sequence;
    let stages = construct_irreducible_stages(&pool, 5, &tol, true)?;
    for s in &stages {
        println!(
            "stage {}: degree {}, 1-|lambda| = {:.3e}, r = {:.6}, gates pass = {}, q = {:?}",
            s.m,
            s.product.degree(),
            s.lambda.decrement,
            s.r_m,
            s.audit.all_pass(),
            s.q
        );
    }
    Ok(())
}
