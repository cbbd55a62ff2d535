//! Entry permutations of a block matrix: block coordinates, the left and
//! right partial transposes, and the exact counting utilities.
//!
//! Run with `cargo run -p haarpt --example entry_permutations`.

use haarpt::perms::{
    fixed_point_count, overlap_triple_count, BlockShape, EntryPermutation, OverlapMode,
};

fn main() {
    // Shape b=2, d=3: a 2×2 grid of 3×3 blocks, M = 6. Index (4, 6)
    // sits at in-block position (1, 3) of block (2, 2).
    let shape = BlockShape::new(2, 3).unwrap();
    let coords = shape.split(4, 6).unwrap();
    println!(
        "shape b=2, d=3: index (4,6) → block ({}, {}), inside ({}, {})",
        coords.block_row, coords.block_col, coords.inner_row, coords.inner_col
    );

    // The right partial transpose flips every block in place; the left one
    // flips the grid of blocks. Their composite is the full transpose.
    let m = shape.m();
    let right = EntryPermutation::gamma(1, 2, 3).unwrap();
    let left = EntryPermutation::gamma(-1, 2, 3).unwrap();
    let t = EntryPermutation::full_transpose(m);
    let composite = EntryPermutation::compose(vec![right.clone(), left.clone()]).unwrap();
    let matches = (1..=m).all(|i| {
        (1..=m).all(|j| composite.apply(i, j).unwrap() == t.apply(i, j).unwrap())
    });
    println!("Γ(1)∘Γ(-1) equals the full transpose on [6]²: {matches}");

    // Involutions: applying a partial transpose twice is the identity.
    let twice = EntryPermutation::compose(vec![right.clone(), right.clone()]).unwrap();
    let id = (1..=m).all(|i| (1..=m).all(|j| twice.apply(i, j).unwrap() == (i, j)));
    println!("Γ(1) is an involution: {id}");

    // Exact agreement counts drive the freeness criterion: the right
    // partial transpose agrees with the identity on b²·d = 12 of 36 pairs.
    let identity = EntryPermutation::identity(m);
    let agree = fixed_point_count(&right, &identity, m).unwrap();
    println!("Γ(1) vs identity: {agree} / {} agreeing positions", m * m);

    // Triple overlaps compare images over (i₁, i₂, j) ∈ [M]³.
    let full = overlap_triple_count(&right, &left, m, OverlapMode::Full).unwrap();
    let first = overlap_triple_count(&right, &left, m, OverlapMode::Coord(1)).unwrap();
    println!("Γ(1) vs Γ(-1) triple overlaps: full {full}, first coordinate {first}");
}
