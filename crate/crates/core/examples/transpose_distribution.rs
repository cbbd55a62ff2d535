//! The fourth moment of a grid-transposed Haar unitary: exact finite-size
//! values marching to the limit 2 − 1/b², and a Monte Carlo run at a size
//! the exact evaluator cannot reach.
//!
//! Run with `cargo run -p haarpt --example transpose_distribution`.

use num_traits::ToPrimitive;

use haarpt::moments::{exact_trace_expectation_pairing, predicted_transpose_moment, Letter, Word};
use haarpt::ncpart::Sign;
use haarpt::perms::EntryPermutation;
use haarpt::sampler::estimate_word_trace;

fn fourth_moment_word(b: usize, d: usize) -> Word {
    let g = EntryPermutation::gamma(-1, b, d).unwrap();
    Word::new(
        vec![
            Letter::new("U", g.clone(), Sign::One),
            Letter::new("U", g.clone(), Sign::Star),
            Letter::new("U", g.clone(), Sign::One),
            Letter::new("U", g, Sign::Star),
        ],
        b * d,
    )
    .unwrap()
}

fn main() {
    let b = 2;
    let limit = predicted_transpose_moment(&Sign::alternating(4), b as u64);
    println!(
        "limit prediction: 2 − 1/b² = {} ≈ {:.6}",
        limit,
        limit.to_f64().unwrap()
    );

    println!("exact E tr((X X*)²) for X = U^G(-1,{b},d):");
    for d in [2usize, 4, 8, 16] {
        let word = fourth_moment_word(b, d);
        let exact = exact_trace_expectation_pairing(&word).unwrap();
        println!(
            "  N = {:3}: {} ≈ {:.8}  (gap to limit {:+.2e})",
            b * d,
            exact,
            exact.to_f64().unwrap(),
            exact.to_f64().unwrap() - limit.to_f64().unwrap()
        );
    }

    // Beyond the exact budget, sample.
    let d = 32;
    let word = fourth_moment_word(b, d);
    let est = estimate_word_trace(&word, 3_000, 11).unwrap();
    println!(
        "N = {:3}: Monte Carlo mean {:+.6} ± {:.6} (3000 samples, seed 11)",
        b * d,
        est.mean_re,
        est.std_error
    );
}
