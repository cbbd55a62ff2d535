//! The asymptotic-freeness criterion: exact agreement fractions, symbolic
//! divergence clauses, pairwise verdicts, and their Monte Carlo witnesses.
//!
//! Run with `cargo run -p haarpt --example freeness_criterion`.

use num_rational::Rational64;
use num_traits::ToPrimitive;

use haarpt::freeness::{
    condition19_fraction, lemma_equivalent_predicate, nonfreeness_witness, predict_family,
    DimRule, TransposeSpec,
};
use haarpt::moments::{Letter, Word};
use haarpt::ncpart::Sign;
use haarpt::perms::Side;
use haarpt::sampler::estimate_word_trace;

fn main() {
    // A partial transpose against its own transpose: fractions fall like
    // 1/M and the mixed-side clause predicts freeness.
    let s1 = TransposeSpec::new(Side::Right, DimRule::Const(2), DimRule::OverK(2));
    let s2 = TransposeSpec::new(Side::Left, DimRule::Const(2), DimRule::OverK(2));
    println!("{s1}  vs  {s2}");
    for m in [8u64, 16, 32, 64] {
        let f = condition19_fraction(&s1, &s2, m).unwrap();
        println!("  agreement fraction at M = {m:2}: {f}");
    }
    let outcome = lemma_equivalent_predicate(&s1, &s2);
    println!("  clause {}: free = {:?} ({})", outcome.clause, outcome.predicted_free, outcome.detail);

    // The witness fraction is the exact finite-size value of E tr(X Y*);
    // a Monte Carlo run reproduces it.
    let m = 16u64;
    let witness = nonfreeness_witness(&s1, &s2, m).unwrap();
    let word = Word::new(
        vec![
            Letter::new("U", s1.gamma_at(m).unwrap(), Sign::One),
            Letter::new("U", s2.gamma_at(m).unwrap(), Sign::Star),
        ],
        m as usize,
    )
    .unwrap();
    let est = estimate_word_trace(&word, 4_000, 31).unwrap();
    println!(
        "  witness at M = {m}: exact {} ≈ {:.5}, sampled {:+.5} ± {:.5}",
        witness,
        witness.to_f64().unwrap(),
        est.mean_re,
        est.std_error
    );

    // A four-member family, all pairs free when b = d = √N.
    let half = Rational64::new(1, 2);
    let family = vec![
        TransposeSpec::new(Side::Left, DimRule::Const(1), DimRule::Full),
        TransposeSpec::new(Side::Right, DimRule::Const(1), DimRule::Full),
        TransposeSpec::new(Side::Right, DimRule::Power(half), DimRule::Power(half)),
        TransposeSpec::new(Side::Left, DimRule::Power(half), DimRule::Power(half)),
    ];
    let prediction = predict_family(&family, &[16, 64, 256]).unwrap();
    println!("family of four on M ∈ {{16, 64, 256}}:");
    for verdict in &prediction.verdicts {
        println!(
            "  {} vs {}: {:?}",
            verdict.pair.0, verdict.pair.1, verdict.predicted_free
        );
    }
    println!("family free: {:?}", prediction.family_free);

    // Identical specs are never free; the witness fraction stays at 1.
    let outcome = lemma_equivalent_predicate(&s1, &s1);
    println!(
        "identical specs: free = {:?}, witness at M = 8 is {}",
        outcome.predicted_free,
        nonfreeness_witness(&s1, &s1, 8).unwrap()
    );
}
