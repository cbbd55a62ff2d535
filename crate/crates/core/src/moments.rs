//! Exact expected normalized traces of words in entry-permuted Haar
//! unitaries, computed along two independent routes, plus the limit
//! predictions coming from free cumulants.
//!
//! The two routes must agree to the last digit:
//!
//! * the **direct** route sums the Weingarten entry-moment formula over all
//!   index tuples and over `S_m × S_m`;
//! * the **pairing** route sums `V(p, q) = Wg_N(p, q)·|A^{(p,q)}|/N` over
//!   pairs of sign-alternating pairings, the form the asymptotic analysis
//!   works with.
//!
//! Both are exact rational computations; floating point never enters.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ncpart::{enumerate_nc_eps_alt, enumerate_pairings_filtered, Pairing, Sign};
use crate::perms::{EntryPermutation, PermTable, MATERIALIZE_LIMIT};
use crate::util::{catalan, rational_pow};
use crate::weingarten::{CycleType, WeingartenTable};

/// Ceiling on `N^n` for the exact index-tuple enumerations.
pub const STEP_BUDGET: u128 = 1_000_000_000;

/// One factor of a word: which independent Haar unitary, how its entries
/// are rearranged, and whether it enters starred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Letter {
    pub label: String,
    pub perm: EntryPermutation,
    pub sign: Sign,
}

impl Letter {
    pub fn new(label: impl Into<String>, perm: EntryPermutation, sign: Sign) -> Self {
        Letter {
            label: label.into(),
            perm,
            sign,
        }
    }
}

/// A cyclic word whose expected normalized trace is computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<Letter>,
    dim: usize,
}

impl Word {
    pub fn new(letters: Vec<Letter>, dim: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::contract("a word needs at least one letter".to_string()));
        }
        if dim == 0 {
            return Err(Error::domain("matrix dimension must be positive".to_string()));
        }
        for l in &letters {
            if l.perm.domain_size() != dim {
                return Err(Error::contract(format!(
                    "letter {}:{} acts on [{}]² but the word has N = {dim}",
                    l.label,
                    l.perm,
                    l.perm.domain_size()
                )));
            }
        }
        Ok(Word { letters, dim })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.letters.iter().map(|l| l.sign).collect()
    }

    /// The word in CLI grammar form, e.g. `A:G(1,2,4) A:G(1,2,4)'`.
    pub fn description(&self) -> String {
        self.letters
            .iter()
            .map(|l| {
                let star = if l.sign == Sign::Star { "'" } else { "" };
                format!("{}:{}{}", l.label, l.perm, star)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Cyclic rotation by `k` letters; the trace is invariant under this.
    pub fn rotated(&self, k: usize) -> Word {
        let n = self.letters.len();
        let letters = (0..n).map(|s| self.letters[(s + k) % n].clone()).collect();
        Word {
            letters,
            dim: self.dim,
        }
    }
}

/// Pairings of the word positions compatible with both the sign pattern
/// (`ε_s ≠ ε_{p(s)}`) and the labels (independent matrices never pair).
pub fn admissible_pairings(word: &Word) -> Vec<Pairing> {
    let letters = word.letters();
    enumerate_pairings_filtered(letters.len(), |a, b| {
        letters[a - 1].sign != letters[b - 1].sign && letters[a - 1].label == letters[b - 1].label
    })
}

/// Evaluates letters on index pairs, through a table when affordable.
enum Applier<'a> {
    Table(PermTable),
    Lazy(&'a EntryPermutation),
}

impl<'a> Applier<'a> {
    fn build(perm: &'a EntryPermutation) -> Result<Applier<'a>> {
        if perm.domain_size() <= MATERIALIZE_LIMIT {
            Ok(Applier::Table(perm.materialize()?))
        } else {
            Ok(Applier::Lazy(perm))
        }
    }

    #[inline]
    fn apply(&self, m: usize, i: usize, j: usize) -> (usize, usize) {
        match self {
            Applier::Table(t) => {
                let flat = t.flat((i - 1) * m + (j - 1));
                (flat / m + 1, flat % m + 1)
            }
            Applier::Lazy(p) => p.apply(i, j).expect("indices stay in range"),
        }
    }
}

fn check_budget(dim: usize, n: usize) -> Result<()> {
    let steps = (dim as u128).pow(n as u32);
    if steps > STEP_BUDGET {
        return Err(Error::capacity(format!(
            "index enumeration needs N^n = {dim}^{n} = {steps} steps, budget is {STEP_BUDGET}"
        )));
    }
    Ok(())
}

/// Run `f` over every tuple in `{1..=dim}^n`.
fn for_each_tuple(dim: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut tuple = vec![1usize; n];
    loop {
        f(&tuple);
        let mut pos = 0;
        loop {
            if pos == n {
                return;
            }
            if tuple[pos] < dim {
                tuple[pos] += 1;
                break;
            }
            tuple[pos] = 1;
            pos += 1;
        }
    }
}

/// The per-letter images `(k_s, l_s) = σ_s ∘ ε_s(i_s, i_{s+1})`, cyclically.
#[inline]
fn letter_images(
    word: &Word,
    appliers: &[Applier<'_>],
    tuple: &[usize],
    out: &mut Vec<(usize, usize)>,
) {
    let n = tuple.len();
    let m = word.dim();
    out.clear();
    for (s, letter) in word.letters().iter().enumerate() {
        let (row, col) = (tuple[s], tuple[(s + 1) % n]);
        let pair = match letter.sign {
            Sign::One => appliers[s].apply(m, row, col),
            Sign::Star => appliers[s].apply(m, col, row),
        };
        out.push(pair);
    }
}

/// Exact `E ∘ tr` of a single-label word by direct Weingarten summation
/// over index tuples and `S_m × S_m`. Unbalanced sign patterns give 0.
pub fn exact_trace_expectation_direct(word: &Word) -> Result<BigRational> {
    let letters = word.letters();
    let label = &letters[0].label;
    if letters.iter().any(|l| &l.label != label) {
        return Err(Error::contract(
            "the direct route supports a single matrix label; use the pairing route".to_string(),
        ));
    }
    let plain: Vec<usize> = (0..letters.len())
        .filter(|&s| letters[s].sign == Sign::One)
        .collect();
    let starred: Vec<usize> = (0..letters.len())
        .filter(|&s| letters[s].sign == Sign::Star)
        .collect();
    if plain.len() != starred.len() {
        return Ok(BigRational::zero());
    }
    let m = plain.len();
    let n = word.len();
    let dim = word.dim();
    check_budget(dim, n)?;
    let table = WeingartenTable::cached(m, dim as u64)?;

    // Class of σ⁻¹∘π for every (σ, π), plus the class values.
    let sym = crate::weingarten::all_permutations(m);
    let classes: Vec<CycleType> = {
        let mut seen = Vec::new();
        for p in &sym {
            let ct = CycleType::of_permutation(p);
            if !seen.contains(&ct) {
                seen.push(ct);
            }
        }
        seen
    };
    let class_idx: HashMap<&CycleType, usize> =
        classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut product_class = vec![vec![0usize; sym.len()]; sym.len()];
    for (si, sigma) in sym.iter().enumerate() {
        let mut inv = vec![0usize; m];
        for (x, &img) in sigma.iter().enumerate() {
            inv[img] = x;
        }
        for (pi_i, pi) in sym.iter().enumerate() {
            let composed: Vec<usize> = (0..m).map(|x| inv[pi[x]]).collect();
            product_class[si][pi_i] = class_idx[&CycleType::of_permutation(&composed)];
        }
    }

    let appliers: Vec<Applier> = letters
        .iter()
        .map(|l| Applier::build(&l.perm))
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; classes.len()];
    let mut images: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut sigma_hits: Vec<usize> = Vec::new();
    let mut pi_hits: Vec<usize> = Vec::new();
    for_each_tuple(dim, n, |tuple| {
        letter_images(word, &appliers, tuple, &mut images);
        sigma_hits.clear();
        pi_hits.clear();
        for (idx, perm) in sym.iter().enumerate() {
            if (0..m).all(|t| images[plain[t]].0 == images[starred[perm[t]]].0) {
                sigma_hits.push(idx);
            }
            if (0..m).all(|t| images[plain[t]].1 == images[starred[perm[t]]].1) {
                pi_hits.push(idx);
            }
        }
        for &si in &sigma_hits {
            for &pi_i in &pi_hits {
                counts[product_class[si][pi_i]] += 1;
            }
        }
    });

    let mut acc = BigRational::zero();
    for (class, &count) in classes.iter().zip(&counts) {
        if count > 0 {
            acc += table.wg(class)? * BigRational::from_integer(BigInt::from(count));
        }
    }
    Ok(acc / BigRational::from_integer(BigInt::from(dim)))
}

fn validate_pairing_for_word(word: &Word, p: &Pairing) -> Result<()> {
    if p.n() != word.len() {
        return Err(Error::contract(format!(
            "pairing of [{}] against a word of length {}",
            p.n(),
            word.len()
        )));
    }
    let letters = word.letters();
    for (a, b) in p.pairs() {
        if letters[a - 1].sign == letters[b - 1].sign {
            return Err(Error::contract(format!(
                "pairing joins positions {a}, {b} with equal signs"
            )));
        }
        if letters[a - 1].label != letters[b - 1].label {
            return Err(Error::contract(format!(
                "pairing joins positions {a}, {b} with different labels"
            )));
        }
    }
    Ok(())
}

/// The Weingarten factor of a `(p, q)` pair: over each label, the cycles of
/// `p∘q` restricted to that label pair up by length, and the halved cycle
/// type is looked up in the table for that label's half-count.
fn wg_factor(word: &Word, p: &Pairing, q: &Pairing) -> Result<BigRational> {
    let letters = word.letters();
    let cycles = p.compose_cycles(q)?;
    let mut lengths_by_label: HashMap<&str, Vec<usize>> = HashMap::new();
    for cycle in &cycles {
        let label = letters[cycle[0] - 1].label.as_str();
        if cycle.iter().any(|&e| letters[e - 1].label != label) {
            return Err(Error::contract(
                "a cycle of p∘q mixes labels; pairings must preserve labels".to_string(),
            ));
        }
        lengths_by_label.entry(label).or_default().push(cycle.len());
    }
    let mut factor = BigRational::one();
    for (_, mut lengths) in lengths_by_label {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let mut halved = Vec::with_capacity(lengths.len() / 2);
        let mut iter = lengths.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) if a == b => halved.push(a),
                _ => {
                    return Err(Error::contract(
                        "cycles of p∘q do not pair up by length".to_string(),
                    ))
                }
            }
        }
        let half_n: usize = halved.iter().sum();
        let table = WeingartenTable::cached(half_n, word.dim() as u64)?;
        factor *= table.wg(&CycleType::new(halved)?)?;
    }
    Ok(factor)
}

/// `|A^{(p,q)}|`: the number of index tuples `(i₁, …, i_n) ∈ [N]^n` whose
/// letter images satisfy `k_s = k_{p(s)}` and `l_s = l_{q(s)}` for all `s`.
pub fn count_a(word: &Word, p: &Pairing, q: &Pairing) -> Result<u64> {
    validate_pairing_for_word(word, p)?;
    validate_pairing_for_word(word, q)?;
    let n = word.len();
    let dim = word.dim();
    check_budget(dim, n)?;
    let appliers: Vec<Applier> = word
        .letters()
        .iter()
        .map(|l| Applier::build(&l.perm))
        .collect::<Result<_>>()?;
    let mut count = 0u64;
    let mut images: Vec<(usize, usize)> = Vec::with_capacity(n);
    for_each_tuple(dim, n, |tuple| {
        letter_images(word, &appliers, tuple, &mut images);
        let ok = (1..=n).all(|s| {
            images[s - 1].0 == images[p.partner(s) - 1].0
                && images[s - 1].1 == images[q.partner(s) - 1].1
        });
        if ok {
            count += 1;
        }
    });
    Ok(count)
}

/// `F^{(p,q)}(S)`: how many distinct projections onto the positions of the
/// interval `S` the tuples of `A^{(p,q)}` realize.
pub fn count_f(word: &Word, p: &Pairing, q: &Pairing, s: RangeInclusive<usize>) -> Result<u64> {
    validate_pairing_for_word(word, p)?;
    validate_pairing_for_word(word, q)?;
    let n = word.len();
    if *s.start() < 1 || *s.end() > n || s.is_empty() {
        return Err(Error::domain(format!(
            "interval {}..={} outside [1, {n}]",
            s.start(),
            s.end()
        )));
    }
    let dim = word.dim();
    check_budget(dim, n)?;
    let appliers: Vec<Applier> = word
        .letters()
        .iter()
        .map(|l| Applier::build(&l.perm))
        .collect::<Result<_>>()?;
    let mut seen: std::collections::HashSet<Vec<(usize, usize)>> =
        std::collections::HashSet::new();
    let mut images: Vec<(usize, usize)> = Vec::with_capacity(n);
    for_each_tuple(dim, n, |tuple| {
        letter_images(word, &appliers, tuple, &mut images);
        let ok = (1..=n).all(|s| {
            images[s - 1].0 == images[p.partner(s) - 1].0
                && images[s - 1].1 == images[q.partner(s) - 1].1
        });
        if ok {
            // (i_pos, j_pos) with j_pos = i_{pos+1}, cyclically.
            let projection: Vec<(usize, usize)> = s
                .clone()
                .map(|pos| (tuple[pos - 1], tuple[pos % n]))
                .collect();
            seen.insert(projection);
        }
    });
    Ok(seen.len() as u64)
}

/// One term of the pairing expansion: `V(p,q) = Wg_N(p,q)·|A^{(p,q)}|/N`.
pub fn v_pq(word: &Word, p: &Pairing, q: &Pairing) -> Result<BigRational> {
    let factor = wg_factor(word, p, q)?;
    let count = count_a(word, p, q)?;
    Ok(factor * BigRational::from_integer(BigInt::from(count))
        / BigRational::from_integer(BigInt::from(word.dim())))
}

/// Exact `E ∘ tr` by the pairing expansion; supports several independent
/// labels. Words admitting no sign- and label-compatible pairing give 0.
pub fn exact_trace_expectation_pairing(word: &Word) -> Result<BigRational> {
    let pairings = admissible_pairings(word);
    let mut acc = BigRational::zero();
    for p in &pairings {
        for q in &pairings {
            acc += v_pq(word, p, q)?;
        }
    }
    Ok(acc)
}

/// The signed Catalan numbers `β_r = (−1)^{r−1}·Cat_{r−1}`, the alternating
/// free cumulants of a Haar unitary.
pub fn beta(r: usize) -> BigInt {
    assert!(r >= 1, "beta is defined for r ≥ 1");
    let sign = if (r - 1).is_multiple_of(2) { 1 } else { -1 };
    BigInt::from(sign) * catalan(r - 1)
}

/// An R-diagonal cumulant rule: the value of `κ_{2r}` on alternating
/// patterns, zero everywhere else.
#[derive(Debug, Clone, PartialEq)]
pub enum CumulantSpec {
    /// `κ_{2r} = β_r`: a Haar unitary element.
    HaarUnitary,
    /// `κ_{2r} = b^{2−2r}·β_r`: the limit of the grid transpose of a Haar
    /// unitary cut into `b×b` blocks.
    TransposeLimit { b: u64 },
    /// `κ_{2r} = b^{1−2r}·β_r`: the limit of a single `d×d` block.
    BlockEntry { b: u64 },
    /// Explicit values for `κ₂, κ₄, …`; zero past the end of the list.
    Explicit(Vec<BigRational>),
}

impl CumulantSpec {
    /// The alternating cumulant `κ_{2r}`.
    pub fn kappa(&self, r: usize) -> BigRational {
        assert!(r >= 1, "kappa is defined for r ≥ 1");
        match self {
            CumulantSpec::HaarUnitary => BigRational::from_integer(beta(r)),
            CumulantSpec::TransposeLimit { b } => {
                rational_pow(*b, 2 - 2 * r as i64) * BigRational::from_integer(beta(r))
            }
            CumulantSpec::BlockEntry { b } => {
                rational_pow(*b, 1 - 2 * r as i64) * BigRational::from_integer(beta(r))
            }
            CumulantSpec::Explicit(values) => {
                values.get(r - 1).cloned().unwrap_or_else(BigRational::zero)
            }
        }
    }
}

/// Moment of a mixed word from R-diagonal cumulant rules assumed *-free:
/// the sum over `NC_{ε,alt}` partitions with single-label blocks of the
/// per-block cumulants. `pattern` pairs a spec index with a sign.
pub fn moments_from_cumulants(
    specs: &[CumulantSpec],
    pattern: &[(usize, Sign)],
) -> Result<BigRational> {
    for &(label, _) in pattern {
        if label >= specs.len() {
            return Err(Error::domain(format!(
                "pattern references spec {label}, only {} given",
                specs.len()
            )));
        }
    }
    let eps: Vec<Sign> = pattern.iter().map(|&(_, s)| s).collect();
    let mut acc = BigRational::zero();
    for pi in enumerate_nc_eps_alt(pattern.len(), &eps)? {
        let mut term = BigRational::one();
        let mut alive = true;
        for block in pi.blocks() {
            let label = pattern[block[0] - 1].0;
            if block.iter().any(|&e| pattern[e - 1].0 != label) {
                alive = false;
                break;
            }
            term *= specs[label].kappa(block.len() / 2);
        }
        if alive {
            acc += term;
        }
    }
    Ok(acc)
}

/// The predicted block cumulant `κ_{2r} = b^{1−2r}·β_r` of one block of a
/// Haar unitary in the large-`d` limit.
pub fn predicted_block_cumulant(r: usize, b: u64) -> BigRational {
    assert!(r >= 1 && b >= 1);
    rational_pow(b, 1 - 2 * r as i64) * BigRational::from_integer(beta(r))
}

/// Moment of the grid-transpose limit element for a sign pattern, via the
/// `NC_{ε,alt}` sum with `κ_{2r} = b^{2−2r}·β_r`.
pub fn predicted_transpose_moment(pattern: &[Sign], b: u64) -> BigRational {
    let spec = [CumulantSpec::TransposeLimit { b }];
    let colored: Vec<(usize, Sign)> = pattern.iter().map(|&s| (0, s)).collect();
    moments_from_cumulants(&spec, &colored).expect("single-spec pattern is valid")
}

/// The limit of `Φ(v^t A (v^t)* A v^t A (v^t)* A)` for the 2×2 swap `A`:
/// `−4·b⁻⁴`, nonzero, witnessing that `v^t` is not free from scalar block
/// matrices.
pub fn counterexample_prediction(b: u64) -> BigRational {
    assert!(b >= 2, "the swap matrix needs at least two blocks");
    BigRational::new(BigInt::from(-4), BigInt::from(b).pow(4))
}
