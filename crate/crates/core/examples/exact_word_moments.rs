//! Exact expected traces of words in entry-permuted Haar unitaries,
//! evaluated along both independent routes.
//!
//! Run with `cargo run -p haarpt --example exact_word_moments`.

use num_traits::ToPrimitive;

use haarpt::moments::{
    admissible_pairings, exact_trace_expectation_direct, exact_trace_expectation_pairing, v_pq,
    Letter, Word,
};
use haarpt::ncpart::Sign;
use haarpt::perms::EntryPermutation;

fn show(word: &Word) {
    let pairing = exact_trace_expectation_pairing(word).unwrap();
    println!(
        "E tr({}) = {} ≈ {:.6}",
        word.description(),
        pairing,
        pairing.to_f64().unwrap()
    );
    let single_label = word
        .letters()
        .iter()
        .all(|l| l.label == word.letters()[0].label);
    if single_label {
        let direct = exact_trace_expectation_direct(word).unwrap();
        assert_eq!(direct, pairing, "the two exact routes must agree");
    }
}

fn main() {
    let dim = 4;
    let id = EntryPermutation::identity(dim);
    let g = EntryPermutation::gamma(1, 2, 2).unwrap();

    // Unitarity makes U U* deterministic.
    show(&Word::new(
        vec![
            Letter::new("U", id.clone(), Sign::One),
            Letter::new("U", id.clone(), Sign::Star),
        ],
        dim,
    )
    .unwrap());

    // A partial-transpose word with a nontrivial exact value.
    let word = Word::new(
        vec![
            Letter::new("U", g.clone(), Sign::One),
            Letter::new("U", g.clone(), Sign::Star),
            Letter::new("U", g.clone(), Sign::One),
            Letter::new("U", g.clone(), Sign::Star),
        ],
        dim,
    )
    .unwrap();
    show(&word);

    // The same value split into its pairing-expansion terms V(p, q).
    let pairings = admissible_pairings(&word);
    for p in &pairings {
        for q in &pairings {
            let v = v_pq(&word, p, q).unwrap();
            println!(
                "  V({}, {}) = {v}",
                p.to_partition(),
                q.to_partition()
            );
        }
    }

    // Independent labels: E tr(U V U* V*) = 1/N².
    show(&Word::new(
        vec![
            Letter::new("U", id.clone(), Sign::One),
            Letter::new("V", id.clone(), Sign::One),
            Letter::new("U", id.clone(), Sign::Star),
            Letter::new("V", id, Sign::Star),
        ],
        dim,
    )
    .unwrap());
}
