//! Entry permutations of `[M]²` for block matrices, including the left and
//! right partial transposes, plus the exact counting utilities behind the
//! asymptotic-freeness criterion.
//!
//! All indices at the API boundary are 1-based. For `M = b·d` an index pair
//! `(i, j)` splits into four block coordinates: `i = (a₁−1)d + a₂` and
//! `j = (a₋₁−1)d + a₋₂`, so that `(a₂, a₋₂)` locates an entry inside the
//! `(a₁, a₋₁)` block. The right partial transpose swaps `a₂ ↔ a₋₂`
//! (transpose every block in place); the left one swaps `a₁ ↔ a₋₁`
//! (transpose the grid of blocks).

use crate::error::{Error, Result};

/// Largest `M` for which [`EntryPermutation::materialize`] will build a table.
pub const MATERIALIZE_LIMIT: usize = 1 << 14;

/// Budget guards for the `M²` and `M³` counting enumerations.
const PAIR_BUDGET: u128 = 1 << 31;
const TRIPLE_BUDGET: u128 = 1 << 31;

/// A block structure `M = b·d`: a `b×b` grid of `d×d` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockShape {
    b: usize,
    d: usize,
}

impl BlockShape {
    pub fn new(b: usize, d: usize) -> Result<Self> {
        if b == 0 || d == 0 {
            return Err(Error::domain(format!(
                "block shape needs b ≥ 1 and d ≥ 1, got b={b}, d={d}"
            )));
        }
        Ok(BlockShape { b, d })
    }

    /// Number of block rows/columns.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Side length of each block.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Total matrix dimension `M = b·d`.
    pub fn m(&self) -> usize {
        self.b * self.d
    }

    /// Split a 1-based index pair into block coordinates.
    pub fn split(&self, i: usize, j: usize) -> Result<BlockCoords> {
        let m = self.m();
        if i < 1 || i > m || j < 1 || j > m {
            return Err(Error::domain(format!(
                "index pair ({i}, {j}) outside [1, {m}]²"
            )));
        }
        Ok(self.split_unchecked(i, j))
    }

    #[inline]
    fn split_unchecked(&self, i: usize, j: usize) -> BlockCoords {
        BlockCoords {
            block_row: (i - 1) / self.d + 1,
            inner_row: (i - 1) % self.d + 1,
            block_col: (j - 1) / self.d + 1,
            inner_col: (j - 1) % self.d + 1,
        }
    }

    /// Reassemble block coordinates into the 1-based index pair.
    pub fn fuse(&self, c: BlockCoords) -> Result<(usize, usize)> {
        if c.block_row < 1
            || c.block_row > self.b
            || c.block_col < 1
            || c.block_col > self.b
            || c.inner_row < 1
            || c.inner_row > self.d
            || c.inner_col < 1
            || c.inner_col > self.d
        {
            return Err(Error::domain(format!(
                "coordinates {c:?} outside [{b}]×[{d}]×[{b}]×[{d}]",
                b = self.b,
                d = self.d
            )));
        }
        Ok(self.fuse_unchecked(c))
    }

    #[inline]
    fn fuse_unchecked(&self, c: BlockCoords) -> (usize, usize) {
        (
            (c.block_row - 1) * self.d + c.inner_row,
            (c.block_col - 1) * self.d + c.inner_col,
        )
    }
}

/// The four block coordinates `(a₁, a₂, a₋₁, a₋₂)` of an entry position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCoords {
    /// `a₁`: block row.
    pub block_row: usize,
    /// `a₂`: row inside the block.
    pub inner_row: usize,
    /// `a₋₁`: block column.
    pub block_col: usize,
    /// `a₋₂`: column inside the block.
    pub inner_col: usize,
}

/// Which pair of coordinates a partial transpose swaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// ϑ = −1: swap block indices (transpose the grid of blocks).
    Left,
    /// ϑ = +1: swap in-block indices (transpose each block in place).
    Right,
}

impl Side {
    /// The sign ϑ ∈ {−1, +1} used in formulas and in the CLI grammar.
    pub fn theta(&self) -> i8 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }

    pub fn from_theta(theta: i64) -> Result<Self> {
        match theta {
            -1 => Ok(Side::Left),
            1 => Ok(Side::Right),
            _ => Err(Error::domain(format!("ϑ must be ±1, got {theta}"))),
        }
    }
}

/// A bijection of `[M]²` built from the transpose family.
///
/// `Compose` is read like function composition: the last element of the list
/// acts first. Every variant evaluates lazily per point; nothing is
/// materialized unless [`EntryPermutation::materialize`] is called.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EntryPermutation {
    Identity(usize),
    FullTranspose(usize),
    PartialTranspose(BlockShape, Side),
    Compose(Vec<EntryPermutation>),
    Inverse(Box<EntryPermutation>),
}

impl EntryPermutation {
    pub fn identity(m: usize) -> Self {
        EntryPermutation::Identity(m)
    }

    pub fn full_transpose(m: usize) -> Self {
        EntryPermutation::FullTranspose(m)
    }

    pub fn partial(side: Side, shape: BlockShape) -> Self {
        EntryPermutation::PartialTranspose(shape, side)
    }

    /// `Γ^{(ϑ)}_{b,d}` by its parameters.
    pub fn gamma(theta: i64, b: usize, d: usize) -> Result<Self> {
        Ok(EntryPermutation::PartialTranspose(
            BlockShape::new(b, d)?,
            Side::from_theta(theta)?,
        ))
    }

    /// Composition `list[0] ∘ list[1] ∘ …`; the last entry acts first.
    pub fn compose(parts: Vec<EntryPermutation>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::contract("compose needs at least one permutation".to_string()));
        }
        let m = parts[0].domain_size();
        for p in &parts {
            if p.domain_size() != m {
                return Err(Error::contract(format!(
                    "compose mixes domain sizes {m} and {}",
                    p.domain_size()
                )));
            }
        }
        Ok(EntryPermutation::Compose(parts))
    }

    pub fn inverse(self) -> Self {
        EntryPermutation::Inverse(Box::new(self))
    }

    /// Side length `M` of the index domain `[M]²`.
    pub fn domain_size(&self) -> usize {
        match self {
            EntryPermutation::Identity(m) | EntryPermutation::FullTranspose(m) => *m,
            EntryPermutation::PartialTranspose(shape, _) => shape.m(),
            EntryPermutation::Compose(parts) => parts[0].domain_size(),
            EntryPermutation::Inverse(p) => p.domain_size(),
        }
    }

    /// Apply the permutation to a 1-based pair.
    pub fn apply(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let m = self.domain_size();
        if i < 1 || i > m || j < 1 || j > m {
            return Err(Error::domain(format!(
                "index pair ({i}, {j}) outside [1, {m}]²"
            )));
        }
        Ok(self.apply_unchecked(i, j))
    }

    fn apply_unchecked(&self, i: usize, j: usize) -> (usize, usize) {
        match self {
            EntryPermutation::Identity(_) => (i, j),
            EntryPermutation::FullTranspose(_) => (j, i),
            EntryPermutation::PartialTranspose(shape, side) => {
                let mut c = shape.split_unchecked(i, j);
                match side {
                    Side::Right => std::mem::swap(&mut c.inner_row, &mut c.inner_col),
                    Side::Left => std::mem::swap(&mut c.block_row, &mut c.block_col),
                }
                shape.fuse_unchecked(c)
            }
            EntryPermutation::Compose(parts) => {
                let mut p = (i, j);
                for part in parts.iter().rev() {
                    p = part.apply_unchecked(p.0, p.1);
                }
                p
            }
            EntryPermutation::Inverse(inner) => inner.apply_inverse_unchecked(i, j),
        }
    }

    /// Apply the inverse permutation to a 1-based pair.
    pub fn apply_inverse(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let m = self.domain_size();
        if i < 1 || i > m || j < 1 || j > m {
            return Err(Error::domain(format!(
                "index pair ({i}, {j}) outside [1, {m}]²"
            )));
        }
        Ok(self.apply_inverse_unchecked(i, j))
    }

    fn apply_inverse_unchecked(&self, i: usize, j: usize) -> (usize, usize) {
        match self {
            // The three primitives are involutions.
            EntryPermutation::Identity(_)
            | EntryPermutation::FullTranspose(_)
            | EntryPermutation::PartialTranspose(..) => self.apply_unchecked(i, j),
            EntryPermutation::Compose(parts) => {
                let mut p = (i, j);
                for part in parts.iter() {
                    p = part.apply_inverse_unchecked(p.0, p.1);
                }
                p
            }
            EntryPermutation::Inverse(inner) => inner.apply_unchecked(i, j),
        }
    }

    /// Flatten into a lookup table mapping `(i−1)·M + (j−1)` to the image's
    /// flat index. Refused above [`MATERIALIZE_LIMIT`].
    pub fn materialize(&self) -> Result<PermTable> {
        let m = self.domain_size();
        if m > MATERIALIZE_LIMIT {
            return Err(Error::capacity(format!(
                "materialization limited to M ≤ {MATERIALIZE_LIMIT}, got M = {m}"
            )));
        }
        let mut target = vec![0u32; m * m];
        for i in 1..=m {
            for j in 1..=m {
                let (ti, tj) = self.apply_unchecked(i, j);
                target[(i - 1) * m + (j - 1)] = ((ti - 1) * m + (tj - 1)) as u32;
            }
        }
        Ok(PermTable { m, target })
    }
}

impl std::fmt::Display for EntryPermutation {
    /// The CLI word-grammar spelling: `I`, `T`, `G(ϑ,b,d)`; compositions
    /// and inverses only arise programmatically and print structurally.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntryPermutation::Identity(_) => write!(f, "I"),
            EntryPermutation::FullTranspose(_) => write!(f, "T"),
            EntryPermutation::PartialTranspose(shape, side) => {
                write!(f, "G({},{},{})", side.theta(), shape.b(), shape.d())
            }
            EntryPermutation::Compose(parts) => {
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            EntryPermutation::Inverse(p) => write!(f, "inv({p})"),
        }
    }
}

/// A materialized entry permutation; `target[src] = dst` over flat indices.
#[derive(Debug, Clone)]
pub struct PermTable {
    m: usize,
    target: Vec<u32>,
}

impl PermTable {
    pub fn domain_size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn flat(&self, src: usize) -> usize {
        self.target[src] as usize
    }

    /// True when the table is a bijection of `[M]²`.
    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &t in &self.target {
            if seen[t as usize] {
                return false;
            }
            seen[t as usize] = true;
        }
        true
    }
}

fn check_same_domain(p1: &EntryPermutation, p2: &EntryPermutation, m: usize) -> Result<()> {
    if p1.domain_size() != m || p2.domain_size() != m {
        return Err(Error::contract(format!(
            "permutations act on M = {} and M = {}, expected {m}",
            p1.domain_size(),
            p2.domain_size()
        )));
    }
    Ok(())
}

/// Exact number of `(i, j) ∈ [M]²` with `p1(i, j) = p2(i, j)`.
pub fn fixed_point_count(p1: &EntryPermutation, p2: &EntryPermutation, m: usize) -> Result<u64> {
    check_same_domain(p1, p2, m)?;
    if (m as u128).pow(2) > PAIR_BUDGET {
        return Err(Error::capacity(format!(
            "fixed-point enumeration over [{m}]² exceeds the budget"
        )));
    }
    let mut count = 0u64;
    for i in 1..=m {
        for j in 1..=m {
            if p1.apply_unchecked(i, j) == p2.apply_unchecked(i, j) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Which comparison the triple-overlap count applies to the two images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMode {
    /// Compare the full image pairs: `p1(i₁, j) = p2(i₂, j)`.
    Full,
    /// Compare only the s-th output coordinate, `s ∈ {1, 2}`.
    Coord(u8),
}

/// Exact cardinality of `{(i₁, i₂, j) ∈ [M]³ : p1(i₁, j) ≈ p2(i₂, j)}`
/// where `≈` is selected by `mode`.
pub fn overlap_triple_count(
    p1: &EntryPermutation,
    p2: &EntryPermutation,
    m: usize,
    mode: OverlapMode,
) -> Result<u64> {
    check_same_domain(p1, p2, m)?;
    if let OverlapMode::Coord(s) = mode {
        if s != 1 && s != 2 {
            return Err(Error::domain(format!("coordinate selector must be 1 or 2, got {s}")));
        }
    }
    if (m as u128).pow(3) > TRIPLE_BUDGET {
        return Err(Error::capacity(format!(
            "triple overlap enumeration over [{m}]³ exceeds the budget"
        )));
    }
    let pick = |pair: (usize, usize)| -> (usize, usize) {
        match mode {
            OverlapMode::Full => pair,
            OverlapMode::Coord(1) => (pair.0, 0),
            OverlapMode::Coord(_) => (pair.1, 0),
        }
    };
    // For each j, bucket the i₂ images of p2 and look the p1 images up.
    let mut count = 0u64;
    let mut bucket: std::collections::HashMap<(usize, usize), u64> = std::collections::HashMap::new();
    for j in 1..=m {
        bucket.clear();
        for i2 in 1..=m {
            *bucket.entry(pick(p2.apply_unchecked(i2, j))).or_insert(0) += 1;
        }
        for i1 in 1..=m {
            if let Some(&c) = bucket.get(&pick(p1.apply_unchecked(i1, j))) {
                count += c;
            }
        }
    }
    Ok(count)
}
