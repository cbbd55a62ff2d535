//! Seeded Monte Carlo estimation of word traces, checked against the
//! exact evaluator at a size where both are affordable.
//!
//! Run with `cargo run -p haarpt --example monte_carlo_estimates`.

use num_traits::ToPrimitive;

use haarpt::moments::{exact_trace_expectation_pairing, Letter, Word};
use haarpt::ncpart::Sign;
use haarpt::perms::EntryPermutation;
use haarpt::sampler::estimate_word_trace;

fn main() {
    let dim = 8;
    let g = EntryPermutation::gamma(1, 2, 4).unwrap();
    let word = Word::new(
        vec![
            Letter::new("U", g.clone(), Sign::One),
            Letter::new("U", g.clone(), Sign::Star),
            Letter::new("U", g.clone(), Sign::One),
            Letter::new("U", g, Sign::Star),
        ],
        dim,
    )
    .unwrap();

    let exact = exact_trace_expectation_pairing(&word).unwrap();
    println!(
        "exact E tr({}) = {} ≈ {:.6}",
        word.description(),
        exact,
        exact.to_f64().unwrap()
    );

    for samples in [500u64, 2_000, 8_000] {
        let est = estimate_word_trace(&word, samples, 42).unwrap();
        let gap = (est.mean_re - exact.to_f64().unwrap()).abs();
        println!(
            "{samples:>5} samples: mean {:+.6} ± {:.6}  (|gap| = {:.1} SE)",
            est.mean_re,
            est.std_error,
            gap / est.std_error
        );
    }

    // Same seed, same answer, bit for bit.
    let a = estimate_word_trace(&word, 1_000, 7).unwrap();
    let b = estimate_word_trace(&word, 1_000, 7).unwrap();
    println!(
        "seed 7 reproducibility: {}",
        if a == b { "bit-identical" } else { "BROKEN" }
    );
}
