//! Exact unitary Weingarten tables and their leading-order behavior.
//!
//! Run with `cargo run -p haarpt --example weingarten_tables`.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use haarpt::ncpart::canonical_pairings;
use haarpt::weingarten::{leading_term, WeingartenTable};

fn main() {
    for (n, dim) in [(1usize, 4u64), (2, 4), (3, 4), (4, 7)] {
        let table = WeingartenTable::cached(n, dim).unwrap();
        println!("Wg_N on S_{n} at N = {dim}:");
        for (class, value) in table.entries() {
            println!("  class {class}: {value}");
        }
    }

    // The leading term: Wg_N(σ) ≈ w₁(σ)·N^{−2n+#(σ)}.
    let table = WeingartenTable::cached(3, 50).unwrap();
    println!("leading-order check at N = 50, S_3:");
    for (class, value) in table.entries() {
        let (w1, exponent) = leading_term(class);
        let scaled = value * BigRational::from_integer(num_bigint::BigInt::from(50u64).pow(
            (2 * 3 - class.num_cycles()) as u32,
        ));
        println!(
            "  class {class}: N^{{{}}} coefficient → {:.6} (limit {w1})",
            exponent,
            scaled.to_f64().unwrap()
        );
    }

    // Pairing lookups feed the moment expansion: Wg_N(p̃₂, q̃₂) is the
    // value on a 2-cycle of S₂.
    let (p, q) = canonical_pairings(2);
    let table = WeingartenTable::cached(2, 8).unwrap();
    println!(
        "Wg_8(p̃₂, q̃₂) = {}",
        table.wg_pairings(&p, &q).unwrap()
    );
}
