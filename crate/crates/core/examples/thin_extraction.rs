//! Greedy extraction of a thin subsequence with a certificate.
use blaschke_monodromy::config::Tolerances;
use blaschke_monodromy::thinprod::{
    extract_thin_subsequence, generate_thin_sequence, ArgumentRule, RatioSequence, ThinRule,
    ThinSpec,
};

fn main() -> blaschke_monodromy::error::Result<()> {
    // Slowly thinning pool: ratios 1/2, so only a subsequence is thin.
    let spec = ThinSpec {
        rule: ThinRule::Ratio {
            c: RatioSequence::List(vec![0.5; 23]),
            first_decrement: 0.5,
        },
        n: 24,
        arguments: ArgumentRule::Zero,
    };
    let pool = generate_thin_sequence(&spec, &Tolerances::default(), 0)?;
    let e = extract_thin_subsequence(&pool, 5)?;
    for row in &e.certificate {
        println!(
            "k = {} from pool index {:2}: product {:.6} >= bound {:.6}",
            row.k, row.pool_index, row.product, row.bound
        );
    }
    Ok(())
}
