//! The non-crossing partition lattice: enumeration, Kreweras complements,
//! Möbius values, and the sign-constrained families that moment
//! expansions range over.
//!
//! Run with `cargo run -p haarpt --example noncrossing_partitions`.

use haarpt::ncpart::{
    canonical_pairings, enumerate_eps_pairings, enumerate_nc, enumerate_nc_eps_alt, mobius_nc,
    SetPartition, Sign,
};

fn main() {
    for n in 1..=6 {
        println!("|NC({n})| = {}", enumerate_nc(n).len());
    }

    // Kreweras complement: sizes satisfy |π| + |Kr(π)| = n + 1.
    let pi = SetPartition::from_blocks(4, vec![vec![1, 2], vec![3, 4]]).unwrap();
    let kr = pi.kreweras().unwrap();
    println!("Kr({pi}) = {kr}");

    // Möbius values against the top element.
    for n in 1..=5 {
        let mu = mobius_nc(&SetPartition::discrete(n), &SetPartition::full(n)).unwrap();
        println!("μ(0_{n}, 1_{n}) = {mu}");
    }

    // The alternating pattern (1, *, 1, *) admits two sign-compatible
    // pairings and three NC_{ε,alt} partitions.
    let eps = Sign::alternating(4);
    let pairings = enumerate_eps_pairings(4, &eps).unwrap();
    println!("P₂^ε(4) for ε = (1,*,1,*):");
    for p in &pairings {
        println!("  {}", p.to_partition());
    }
    let alt = enumerate_nc_eps_alt(4, &eps).unwrap();
    println!("NC_{{ε,alt}}(4):");
    for p in &alt {
        println!("  {p}");
    }

    // The canonical pairings join to the one-block partition.
    let (p, q) = canonical_pairings(3);
    let join = p.to_partition().join(&q.to_partition()).unwrap();
    println!(
        "canonical pairings of [6]: p̃ = {}, q̃ = {}, p̃ ∨ q̃ = {join}",
        p.to_partition(),
        q.to_partition()
    );
}
