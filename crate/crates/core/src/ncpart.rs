//! Set partitions, pairings and non-crossing partitions of `[n]`, with the
//! lattice operations the moment expansions range over: join, Möbius
//! function, Kreweras complement, and the sign-constrained families `P₂^ε`
//! and `NC_{ε,alt}`.
//!
//! Elements are 1-based. Partitions are kept in canonical form: blocks
//! sorted by least element, elements sorted inside each block; equality and
//! hashing are defined on that form.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// An exponent mark: `1` (plain) or `*` (conjugate transpose).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    One,
    Star,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::One => Sign::Star,
            Sign::Star => Sign::One,
        }
    }

    /// The alternating pattern `1, *, 1, *, …` of a given length.
    pub fn alternating(len: usize) -> Vec<Sign> {
        (0..len)
            .map(|k| if k % 2 == 0 { Sign::One } else { Sign::Star })
            .collect()
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::One => write!(f, "1"),
            Sign::Star => write!(f, "*"),
        }
    }
}

/// A partition of `{1, …, n}` into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Build from blocks, validating disjointness and coverage.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut covered = 0usize;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::contract("empty block".to_string()));
            }
            for &e in block {
                if e < 1 || e > n {
                    return Err(Error::domain(format!("element {e} outside [1, {n}]")));
                }
                if seen[e] {
                    return Err(Error::contract(format!("element {e} appears twice")));
                }
                seen[e] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(Error::contract(format!(
                "blocks cover {covered} of {n} elements"
            )));
        }
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// The partition into singletons, `0_n`.
    pub fn discrete(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|e| vec![e]).collect(),
        }
    }

    /// The one-block partition, `1_n`.
    pub fn full(n: usize) -> Self {
        SetPartition {
            n,
            blocks: if n == 0 { vec![] } else { vec![(1..=n).collect()] },
        }
    }

    /// From a block assignment: `assign[e-1]` identifies the block of `e`.
    pub fn from_assignment(assign: &[usize]) -> Self {
        let n = assign.len();
        let mut by_id: HashMap<usize, Vec<usize>> = HashMap::new();
        for (e, &id) in assign.iter().enumerate() {
            by_id.entry(id).or_default().push(e + 1);
        }
        let mut blocks: Vec<Vec<usize>> = by_id.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        SetPartition { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `e` (1-based element).
    pub fn block_index_of(&self, e: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&e).is_ok())
    }

    fn assignment(&self) -> Vec<usize> {
        let mut assign = vec![0usize; self.n];
        for (id, block) in self.blocks.iter().enumerate() {
            for &e in block {
                assign[e - 1] = id;
            }
        }
        assign
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &SetPartition) -> bool {
        if self.n != other.n {
            return false;
        }
        let coarse = other.assignment();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&e| coarse[e - 1] == coarse[b[0] - 1]))
    }

    /// Least upper bound in the full partition lattice.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        if self.n != other.n {
            return Err(Error::contract(format!(
                "join of partitions of [{}] and [{}]",
                self.n, other.n
            )));
        }
        let mut uf = UnionFind::new(self.n);
        for part in [self, other] {
            for block in &part.blocks {
                for w in block.windows(2) {
                    uf.union(w[0] - 1, w[1] - 1);
                }
            }
        }
        let assign: Vec<usize> = (0..self.n).map(|e| uf.find(e)).collect();
        Ok(SetPartition::from_assignment(&assign))
    }

    /// True when no `a < b < c < d` has `{a, c}` in one block and `{b, d}`
    /// in another.
    pub fn is_noncrossing(&self) -> bool {
        let assign = self.assignment();
        // Scan with a stack of open blocks; a block must close before any
        // block opened after it sees another element.
        let mut stack: Vec<usize> = Vec::new();
        let mut remaining: Vec<usize> = vec![0; self.blocks.len()];
        for &id in &assign {
            remaining[id] += 1;
        }
        for &id in &assign {
            match stack.iter().rposition(|&open| open == id) {
                Some(pos) => {
                    if pos != stack.len() - 1 {
                        return false;
                    }
                }
                None => stack.push(id),
            }
            remaining[id] -= 1;
            if remaining[id] == 0 {
                // Must be the innermost open block.
                if stack.last() != Some(&id) {
                    return false;
                }
                stack.pop();
            }
        }
        true
    }

    /// Kreweras complement of a non-crossing partition.
    ///
    /// Computed through the standard bijection with permutations below the
    /// full cycle: each block read in increasing order is a cycle of a
    /// permutation `π`, and the cycles of `π⁻¹ ∘ (1 2 … n)` are the blocks
    /// of the complement. Satisfies `|π| + |Kr(π)| = n + 1`.
    pub fn kreweras(&self) -> Result<SetPartition> {
        if !self.is_noncrossing() {
            return Err(Error::contract(
                "Kreweras complement requires a non-crossing partition".to_string(),
            ));
        }
        let n = self.n;
        if n == 0 {
            return Ok(self.clone());
        }
        // π as a permutation: block (a₁ < a₂ < … < a_r) maps a_t ↦ a_{t+1}.
        let mut perm = vec![0usize; n + 1];
        for block in &self.blocks {
            for (t, &e) in block.iter().enumerate() {
                perm[e] = block[(t + 1) % block.len()];
            }
        }
        let mut inv = vec![0usize; n + 1];
        for e in 1..=n {
            inv[perm[e]] = e;
        }
        // Cycles of k ↦ π⁻¹(γ(k)) with γ(k) = k mod n + 1.
        let mut seen = vec![false; n + 1];
        let mut blocks = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k);
                k = inv[k % n + 1];
            }
            blocks.push(cycle);
        }
        SetPartition::from_blocks(n, blocks)
    }
}

impl std::fmt::Display for SetPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for block in &self.blocks {
            write!(f, "(")?;
            for (k, e) in block.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// A perfect matching of `[n]`: a fixed-point-free involution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    /// `partner[e-1]` is the partner of `e` (1-based).
    partner: Vec<usize>,
}

impl Pairing {
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.len() * 2 != n {
            return Err(Error::contract(format!(
                "{} pairs cannot cover [{n}]",
                pairs.len()
            )));
        }
        let mut partner = vec![0usize; n];
        for &(a, b) in pairs {
            if a < 1 || a > n || b < 1 || b > n || a == b {
                return Err(Error::domain(format!("invalid pair ({a}, {b}) in [1, {n}]")));
            }
            if partner[a - 1] != 0 || partner[b - 1] != 0 {
                return Err(Error::contract(format!("element reused in pair ({a}, {b})")));
            }
            partner[a - 1] = b;
            partner[b - 1] = a;
        }
        Ok(Pairing { partner })
    }

    pub fn n(&self) -> usize {
        self.partner.len()
    }

    /// Partner of `e` (1-based).
    pub fn partner(&self, e: usize) -> usize {
        self.partner[e - 1]
    }

    /// The pairs, each reported as `(min, max)`, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.partner.len() / 2);
        for e in 1..=self.partner.len() {
            let p = self.partner(e);
            if e < p {
                out.push((e, p));
            }
        }
        out
    }

    pub fn to_partition(&self) -> SetPartition {
        let blocks = self.pairs().into_iter().map(|(a, b)| vec![a, b]).collect();
        SetPartition::from_blocks(self.partner.len(), blocks).expect("pairing is a partition")
    }

    /// Cycles of the composite permutation `p∘q` (apply `q`, then `p`).
    pub fn compose_cycles(&self, q: &Pairing) -> Result<Vec<Vec<usize>>> {
        let n = self.n();
        if q.n() != n {
            return Err(Error::contract(format!(
                "composing pairings of [{n}] and [{}]",
                q.n()
            )));
        }
        let mut seen = vec![false; n + 1];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k);
                k = self.partner(q.partner(k));
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }
}

/// Cycle type of `p∘q`, non-increasing. Checks `2·#(p ∨ q) = #(p∘q)` along
/// the way; the identity holds for every pair of pairings.
pub fn product_cycle_structure(p: &Pairing, q: &Pairing) -> Result<Vec<usize>> {
    let cycles = p.compose_cycles(q)?;
    let join = p.to_partition().join(&q.to_partition())?;
    if 2 * join.num_blocks() != cycles.len() {
        return Err(Error::contract(format!(
            "2·#(p∨q) = {} but #(pq) = {}",
            2 * join.num_blocks(),
            cycles.len()
        )));
    }
    let mut lengths: Vec<usize> = cycles.iter().map(|c| c.len()).collect();
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Ok(lengths)
}

/// All pairings of `[n]`; empty when `n` is odd.
pub fn enumerate_pairings(n: usize) -> Vec<Pairing> {
    enumerate_pairings_filtered(n, |_, _| true)
}

/// Pairings joining only positions with opposite signs (`P₂^ε(n)`).
pub fn enumerate_eps_pairings(n: usize, eps: &[Sign]) -> Result<Vec<Pairing>> {
    if eps.len() != n {
        return Err(Error::contract(format!(
            "sign pattern of length {} on [{n}]",
            eps.len()
        )));
    }
    Ok(enumerate_pairings_filtered(n, |a, b| {
        eps[a - 1] != eps[b - 1]
    }))
}

/// Pairings whose every pair `(a, b)` satisfies `admit(a, b)`.
pub fn enumerate_pairings_filtered(
    n: usize,
    admit: impl Fn(usize, usize) -> bool,
) -> Vec<Pairing> {
    if !n.is_multiple_of(2) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut partner = vec![0usize; n];
    fn rec(
        partner: &mut Vec<usize>,
        admit: &impl Fn(usize, usize) -> bool,
        out: &mut Vec<Pairing>,
    ) {
        let n = partner.len();
        let first = match partner.iter().position(|&p| p == 0) {
            None => {
                out.push(Pairing {
                    partner: partner.clone(),
                });
                return;
            }
            Some(idx) => idx + 1,
        };
        for mate in first + 1..=n {
            if partner[mate - 1] == 0 && admit(first, mate) {
                partner[first - 1] = mate;
                partner[mate - 1] = first;
                rec(partner, admit, out);
                partner[first - 1] = 0;
                partner[mate - 1] = 0;
            }
        }
    }
    rec(&mut partner, &admit, &mut out);
    out
}

/// All set partitions of `[n]` via restricted-growth strings.
pub fn enumerate_partitions(n: usize) -> Vec<SetPartition> {
    if n == 0 {
        return vec![SetPartition::discrete(0)];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        out.push(SetPartition::from_assignment(&rgs));
        // Next restricted-growth string.
        let mut k = n - 1;
        loop {
            if k == 0 {
                return out;
            }
            let cap = rgs[..k].iter().copied().max().unwrap() + 1;
            if rgs[k] < cap {
                rgs[k] += 1;
                for r in rgs.iter_mut().skip(k + 1) {
                    *r = 0;
                }
                break;
            }
            k -= 1;
        }
    }
}

/// All non-crossing partitions of `[n]`; `|NC(n)| = Catalan(n)`.
pub fn enumerate_nc(n: usize) -> Vec<SetPartition> {
    enumerate_partitions(n)
        .into_iter()
        .filter(SetPartition::is_noncrossing)
        .collect()
}

/// `NC_{ε,alt}(n)`: non-crossing partitions all of whose blocks have even
/// size and alternate signs when read in increasing order.
pub fn enumerate_nc_eps_alt(n: usize, eps: &[Sign]) -> Result<Vec<SetPartition>> {
    if eps.len() != n {
        return Err(Error::contract(format!(
            "sign pattern of length {} on [{n}]",
            eps.len()
        )));
    }
    Ok(enumerate_nc(n)
        .into_iter()
        .filter(|p| {
            p.blocks().iter().all(|block| {
                block.len() % 2 == 0
                    && block
                        .windows(2)
                        .all(|w| eps[w[0] - 1] != eps[w[1] - 1])
            })
        })
        .collect())
}

/// Möbius function of the interval `[σ, π]` in the non-crossing lattice.
///
/// Computed by inverting the zeta function over the interval (exact integer
/// recursion). The multiplicative Catalan formula through the Kreweras
/// complement serves as an independent cross-check in the tests.
pub fn mobius_nc(sigma: &SetPartition, pi: &SetPartition) -> Result<i64> {
    if sigma.n() != pi.n() {
        return Err(Error::contract("Möbius of partitions with different n".to_string()));
    }
    if !sigma.is_noncrossing() || !pi.is_noncrossing() {
        return Err(Error::contract("Möbius requires non-crossing arguments".to_string()));
    }
    if !sigma.leq(pi) {
        return Err(Error::contract(format!("{sigma} ≰ {pi} in NC order")));
    }
    let mut interval: Vec<SetPartition> = enumerate_nc(sigma.n())
        .into_iter()
        .filter(|tau| sigma.leq(tau) && tau.leq(pi))
        .collect();
    // Refinement order: more blocks = finer, so computing upward works.
    interval.sort_by_key(|p| std::cmp::Reverse(p.num_blocks()));
    let mut mu: HashMap<&SetPartition, i64> = HashMap::new();
    for (idx, tau) in interval.iter().enumerate() {
        if tau == sigma {
            mu.insert(tau, 1);
            continue;
        }
        let mut acc = 0i64;
        for rho in &interval[..idx] {
            if rho.leq(tau) && rho != tau {
                acc += mu[rho];
            }
        }
        mu.insert(tau, -acc);
    }
    Ok(mu[pi])
}

/// The canonical pairings `(p̃_k, q̃_k)` on `[2k]`: `p̃_k` joins `2l` with
/// `2l+1 (mod 2k)` and `q̃_k` joins `2l` with `2l−1`.
pub fn canonical_pairings(k: usize) -> (Pairing, Pairing) {
    let n = 2 * k;
    let wrap = |x: usize| (x - 1) % n + 1;
    let p_pairs: Vec<(usize, usize)> = (1..=k).map(|l| (wrap(2 * l), wrap(2 * l + 1))).collect();
    let q_pairs: Vec<(usize, usize)> = (1..=k).map(|l| (2 * l - 1, 2 * l)).collect();
    (
        Pairing::from_pairs(n, &p_pairs).expect("canonical p̃ is a pairing"),
        Pairing::from_pairs(n, &q_pairs).expect("canonical q̃ is a pairing"),
    )
}
