//! Thin zero sequences and their thinness profile.
use blaschke_monodromy::blaschke::thinness_profile;
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::thinprod::{generate_thin_sequence, RatioSequence, ThinRule, ThinSpec};

fn main() -> blaschke_monodromy::error::Result<()> {
    let tol = Tolerances::default();
    let seq = generate_thin_sequence(&ThinSpec::factorial(12), &tol, 0)?;
    let p = thinness_profile(&seq, 0..seq.len())?;
    for r in &p.rows {
        println!(
            "k = {:2}  1-|z| = {:.3e}  delta = {:.12}",
            r.k, seq.points[r.k].decrement, r.delta
        );
    }
    println!(
        "sum (1-|z|) = {:.6}, identity gap {:.1e}",
        p.blaschke_sum, p.max_identity_gap
    );

    let spec = ThinSpec {
        rule: ThinRule::Ratio {
            c: RatioSequence::InversePower { base: 2.0 },
            first_decrement: 0.5,
        },
        ..ThinSpec::factorial(8)
    };
    let geo = generate_thin_sequence(&spec, &tol, 0)?;
    println!(
        "ratio rule decrements: {:?}",
        geo.points.iter().map(|p| p.decrement).collect::<Vec<_>>()
    );
    Ok(())
}
