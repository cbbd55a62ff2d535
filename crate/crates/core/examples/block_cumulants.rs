//! Blocks of a Haar unitary: the predicted cumulants b^{1−2r}·β_r, the
//! colored moment sums they generate, and a Monte Carlo check.
//!
//! Run with `cargo run -p haarpt --example block_cumulants`.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use haarpt::moments::{beta, moments_from_cumulants, predicted_block_cumulant, CumulantSpec};
use haarpt::ncpart::Sign;
use haarpt::sampler::{monte_carlo, sample_haar, sample_rng, ComplexMatrix};

fn main() {
    let b = 2u64;
    println!("signed Catalan numbers β_r and block cumulants b^(1−2r)·β_r at b = {b}:");
    for r in 1..=4 {
        println!(
            "  r = {r}: β = {}, block cumulant = {}",
            beta(r),
            predicted_block_cumulant(r, b)
        );
    }

    let pattern = [
        (0usize, Sign::One),
        (0, Sign::Star),
        (0, Sign::One),
        (0, Sign::Star),
    ];
    let predicted = moments_from_cumulants(&[CumulantSpec::BlockEntry { b }], &pattern).unwrap();
    println!(
        "predicted E tr_d((U11 U11*)²) → {} ≈ {:.6}",
        predicted,
        predicted.to_f64().unwrap()
    );

    // Monte Carlo at b = 2, d = 24 (N = 48).
    let d = 24usize;
    let n = b as usize * d;
    let seed = 5u64;
    let (mean, se) = monte_carlo(2_000, |index| {
        let mut rng = sample_rng(seed, index);
        let u = sample_haar(n, &mut rng).unwrap().into_matrix();
        let mut top_left = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                top_left.set(i, j, u.get(i, j));
            }
        }
        let p = top_left.mul(&top_left.adjoint());
        p.trace_of_product(&p) / d as f64
    })
    .unwrap();
    let gap = (mean - Complex64::new(predicted.to_f64().unwrap(), 0.0)).norm();
    println!(
        "measured {:+.6} ± {:.6} at N = {n} (gap {:.1} SE)",
        mean.re,
        se,
        gap / se
    );
}
