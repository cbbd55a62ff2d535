//! Haar unitary sampling, entry-permutation application to samples, block
//! and diagonal decompositions, and seeded Monte Carlo estimation of word
//! traces.
//!
//! Reproducibility contract: every sample index gets its own ChaCha stream
//! derived from `(seed, index)`, chunks have fixed boundaries, and the
//! chunk results are combined in index order with compensated summation,
//! so a run is bit-identical for a given `(word, N, n_samples, seed)`,
//! whatever the thread count.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::Word;
use crate::ncpart::Sign;
use crate::perms::{BlockShape, EntryPermutation, PermTable};
use crate::util::KahanSum;

/// Hard caps for Monte Carlo runs.
pub const MAX_DIM: usize = 4096;
pub const MAX_SAMPLES: u64 = 10_000_000;

/// Samples per parallel chunk; fixed so reductions are order-stable.
const CHUNK: u64 = 128;

/// A dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// 0-based entry access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row_b = &rhs.data[k * n..(k + 1) * n];
                let row_o = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    row_o[j] += a * row_b[j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Normalized trace `tr = Tr/N`.
    pub fn normalized_trace(&self) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for i in 0..self.n {
            acc += self.data[i * self.n + i];
        }
        acc / self.n as f64
    }

    /// `Tr(self · rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &ComplexMatrix) -> Complex64 {
        assert_eq!(self.n, rhs.n, "dimension mismatch in trace of product");
        let n = self.n;
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * rhs.data[j * n + i];
            }
        }
        acc
    }

    /// `max |(U·U*)_{ij} − δ_{ij}|`: how far from unitary the matrix is.
    pub fn unitarity_residual(&self) -> f64 {
        let product = self.mul(&self.adjoint());
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((product.data[i * n + j] - target).norm());
            }
        }
        worst
    }

    /// Relocate entries: `out[i][j] = self[perm(i, j)]`.
    pub fn permute_entries(&self, table: &PermTable) -> ComplexMatrix {
        assert_eq!(self.n, table.domain_size(), "permutation table dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.n);
        for src in 0..self.data.len() {
            out.data[src] = self.data[table.flat(src)];
        }
        out
    }
}

/// A sampled Haar unitary.
#[derive(Debug, Clone)]
pub struct UnitarySample {
    dim: usize,
    matrix: ComplexMatrix,
}

impl UnitarySample {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draw a Haar-distributed `N×N` unitary: a complex Ginibre matrix
/// orthonormalized row by row (modified Gram–Schmidt). The triangular
/// factor's diagonal is the positive row norms, which is exactly the phase
/// convention Haar distribution requires. Rows that collapse numerically
/// (probability zero) are redrawn.
pub fn sample_haar(dim: usize, rng: &mut impl Rng) -> Result<UnitarySample> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive".to_string()));
    }
    let n = dim;
    let mut q = ComplexMatrix::zeros(n);
    let mut row = vec![Complex64::ZERO; n];
    for r in 0..n {
        loop {
            for v in row.iter_mut() {
                *v = standard_complex(rng);
            }
            for prev in 0..r {
                let prev_row = &q.data[prev * n..(prev + 1) * n];
                let mut dot = Complex64::ZERO;
                for j in 0..n {
                    dot += prev_row[j].conj() * row[j];
                }
                for j in 0..n {
                    row[j] -= dot * prev_row[j];
                }
            }
            let norm = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                let inv = 1.0 / norm;
                for (dst, v) in q.data[r * n..(r + 1) * n].iter_mut().zip(&row) {
                    *dst = v * inv;
                }
                break;
            }
        }
    }
    Ok(UnitarySample { dim, matrix: q })
}

/// `[U^σ]_{ij} = [U]_{σ(i,j)}` for a sampled matrix.
pub fn apply_entry_permutation(
    matrix: &ComplexMatrix,
    perm: &EntryPermutation,
) -> Result<ComplexMatrix> {
    if perm.domain_size() != matrix.dim() {
        return Err(Error::contract(format!(
            "permutation acts on [{}]², matrix is {}×{}",
            perm.domain_size(),
            matrix.dim(),
            matrix.dim()
        )));
    }
    Ok(matrix.permute_entries(&perm.materialize()?))
}

/// Cut an `M×M` matrix into the `b×b` grid of `d×d` blocks.
pub fn extract_blocks(matrix: &ComplexMatrix, shape: BlockShape) -> Result<Vec<Vec<ComplexMatrix>>> {
    if shape.m() != matrix.dim() {
        return Err(Error::contract(format!(
            "shape {}·{} does not match matrix dimension {}",
            shape.b(),
            shape.d(),
            matrix.dim()
        )));
    }
    let (b, d) = (shape.b(), shape.d());
    let mut grid = Vec::with_capacity(b);
    for bi in 0..b {
        let mut row = Vec::with_capacity(b);
        for bj in 0..b {
            let mut block = ComplexMatrix::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    block.set(i, j, matrix.get(bi * d + i, bj * d + j));
                }
            }
            row.push(block);
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Reassemble a `b×b` grid of `d×d` blocks into the full matrix.
pub fn reassemble_blocks(grid: &[Vec<ComplexMatrix>]) -> Result<ComplexMatrix> {
    let b = grid.len();
    if b == 0 || grid.iter().any(|row| row.len() != b) {
        return Err(Error::contract("grid must be square and nonempty".to_string()));
    }
    let d = grid[0][0].dim();
    if grid.iter().flatten().any(|m| m.dim() != d) {
        return Err(Error::contract("all blocks must share one dimension".to_string()));
    }
    let mut out = ComplexMatrix::zeros(b * d);
    for (bi, row) in grid.iter().enumerate() {
        for (bj, block) in row.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out.set(bi * d + i, bj * d + j, block.get(i, j));
                }
            }
        }
    }
    Ok(out)
}

/// The `k`-th wrapped-diagonal component of the grid transpose: the result
/// keeps, at grid position `(i, i+k mod b)`, the block of the transposed
/// grid (i.e. `A`'s block `(i+k mod b, i)`), and is zero elsewhere. The
/// components over `k = 0, …, b−1` sum to the grid transpose. `k` is
/// normalized mod `b`.
pub fn diagonal_decomposition(
    matrix: &ComplexMatrix,
    shape: BlockShape,
    k: usize,
) -> Result<ComplexMatrix> {
    if shape.m() != matrix.dim() {
        return Err(Error::contract(format!(
            "shape {}·{} does not match matrix dimension {}",
            shape.b(),
            shape.d(),
            matrix.dim()
        )));
    }
    let (b, d) = (shape.b(), shape.d());
    let k = k % b;
    let mut out = ComplexMatrix::zeros(matrix.dim());
    for bi in 0..b {
        let bj = (bi + k) % b;
        // Block (bi, bj) of the output = block (bj, bi) of the input.
        for i in 0..d {
            for j in 0..d {
                out.set(bi * d + i, bj * d + j, matrix.get(bj * d + i, bi * d + j));
            }
        }
    }
    Ok(out)
}

/// The cyclic shift `s` with `s_{i,i+1} = 1` (indices mod `b`), `s^b = I`.
pub fn shift_matrix(b: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(b);
    for i in 0..b {
        s.set(i, (i + 1) % b, Complex64::ONE);
    }
    s
}

/// A Monte Carlo estimate of one word's expected normalized trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub word: String,
    pub dim: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_error: f64,
}

impl EstimatorResult {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }

    /// Absolute deviation of the estimate from a prediction, in units of
    /// the standard error.
    pub fn deviation_sigmas(&self, prediction: Complex64) -> f64 {
        let gap = (self.mean() - prediction).norm();
        if self.std_error > 0.0 {
            gap / self.std_error
        } else if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// The per-sample RNG: an independent ChaCha stream per `(seed, index)`.
pub fn sample_rng(seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    rng
}

struct CompiledWord {
    labels: Vec<String>,
    // Distinct (label index, permutation table index, starred) letters ...
    distinct: Vec<(usize, usize, bool)>,
    tables: Vec<PermTable>,
    // ... and the word as indices into `distinct`.
    sequence: Vec<usize>,
    dim: usize,
}

fn compile(word: &Word) -> Result<CompiledWord> {
    let mut labels: Vec<String> = word.letters().iter().map(|l| l.label.clone()).collect();
    labels.sort();
    labels.dedup();
    let mut perms: Vec<&EntryPermutation> = Vec::new();
    let mut distinct: Vec<(usize, usize, bool)> = Vec::new();
    let mut sequence = Vec::with_capacity(word.len());
    for letter in word.letters() {
        let label_idx = labels.binary_search(&letter.label).expect("label present");
        let perm_idx = match perms.iter().position(|p| **p == letter.perm) {
            Some(idx) => idx,
            None => {
                perms.push(&letter.perm);
                perms.len() - 1
            }
        };
        let key = (label_idx, perm_idx, letter.sign == Sign::Star);
        let idx = match distinct.iter().position(|k| *k == key) {
            Some(idx) => idx,
            None => {
                distinct.push(key);
                distinct.len() - 1
            }
        };
        sequence.push(idx);
    }
    let tables = perms
        .into_iter()
        .map(|p| p.materialize())
        .collect::<Result<Vec<_>>>()?;
    Ok(CompiledWord {
        labels,
        distinct,
        tables,
        sequence,
        dim: word.dim(),
    })
}

fn sample_trace(compiled: &CompiledWord, seed: u64, index: u64) -> Complex64 {
    let mut rng = sample_rng(seed, index);
    let samples: Vec<ComplexMatrix> = compiled
        .labels
        .iter()
        .map(|_| {
            sample_haar(compiled.dim, &mut rng)
                .expect("dimension validated")
                .into_matrix()
        })
        .collect();
    let letters: Vec<ComplexMatrix> = compiled
        .distinct
        .iter()
        .map(|&(label, perm, star)| {
            let permuted = samples[label].permute_entries(&compiled.tables[perm]);
            if star {
                permuted.adjoint()
            } else {
                permuted
            }
        })
        .collect();
    let seq = &compiled.sequence;
    let n = seq.len();
    
    if n == 1 {
        letters[seq[0]].normalized_trace()
    } else if n.is_multiple_of(2) && seq[..n / 2] == seq[n / 2..] {
        // tr(P²) for the repeated half-product P.
        let mut half = letters[seq[0]].clone();
        for &s in &seq[1..n / 2] {
            half = half.mul(&letters[s]);
        }
        half.trace_of_product(&half) / compiled.dim as f64
    } else {
        let mut acc = letters[seq[0]].clone();
        for &s in &seq[1..n - 1] {
            acc = acc.mul(&letters[s]);
        }
        acc.trace_of_product(&letters[seq[n - 1]]) / compiled.dim as f64
    }
}

/// Chunk-deterministic parallel Monte Carlo: `eval` maps a sample index to
/// `width` tracked quantities; the result is one `(mean, std error)` per
/// quantity, bit-identical for a given seed whatever the thread count.
pub fn monte_carlo_multi(
    n_samples: u64,
    width: usize,
    eval: impl Fn(u64) -> Vec<Complex64> + Sync,
) -> Result<Vec<(Complex64, f64)>> {
    if n_samples == 0 || n_samples > MAX_SAMPLES {
        return Err(Error::capacity(format!(
            "sample count must lie in 1..={MAX_SAMPLES}, got {n_samples}"
        )));
    }
    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunk_sums: Vec<Vec<(f64, f64, f64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n_samples);
            let mut acc = vec![(KahanSum::default(), KahanSum::default(), KahanSum::default()); width];
            for index in start..end {
                let values = eval(index);
                debug_assert_eq!(values.len(), width);
                for (slot, z) in acc.iter_mut().zip(values) {
                    slot.0.add(z.re);
                    slot.1.add(z.im);
                    slot.2.add(z.norm_sqr());
                }
            }
            acc.into_iter()
                .map(|(re, im, abs2)| (re.value(), im.value(), abs2.value()))
                .collect()
        })
        .collect();

    let mut totals = vec![(KahanSum::default(), KahanSum::default(), KahanSum::default()); width];
    for chunk in chunk_sums {
        for (slot, (re, im, abs2)) in totals.iter_mut().zip(chunk) {
            slot.0.add(re);
            slot.1.add(im);
            slot.2.add(abs2);
        }
    }
    let n = n_samples as f64;
    Ok(totals
        .into_iter()
        .map(|(re, im, abs2)| {
            let mean = Complex64::new(re.value() / n, im.value() / n);
            let std_error = if n_samples > 1 {
                let var = ((abs2.value() - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            (mean, std_error)
        })
        .collect())
}

/// Single-quantity wrapper around [`monte_carlo_multi`].
pub fn monte_carlo(
    n_samples: u64,
    eval: impl Fn(u64) -> Complex64 + Sync,
) -> Result<(Complex64, f64)> {
    let out = monte_carlo_multi(n_samples, 1, |index| vec![eval(index)])?;
    Ok(out[0])
}

/// Seeded Monte Carlo estimate of `E ∘ tr` of a word. Distinct labels get
/// independent Haar samples per draw; repeated labels reuse the draw.
pub fn estimate_word_trace(word: &Word, n_samples: u64, seed: u64) -> Result<EstimatorResult> {
    if word.dim() > MAX_DIM {
        return Err(Error::capacity(format!(
            "Monte Carlo supports N ≤ {MAX_DIM}, got {}",
            word.dim()
        )));
    }
    let compiled = compile(word)?;
    let (mean, std_error) =
        monte_carlo(n_samples, |index| sample_trace(&compiled, seed, index))?;
    Ok(EstimatorResult {
        word: word.description(),
        dim: word.dim(),
        n_samples,
        seed,
        mean_re: mean.re,
        mean_im: mean.im,
        std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{exact_trace_expectation_pairing, Letter};
    use crate::ncpart::Sign::{One, Star};

    fn haar(dim: usize, seed: u64) -> ComplexMatrix {
        let mut rng = sample_rng(seed, 0);
        sample_haar(dim, &mut rng).unwrap().into_matrix()
    }

    fn word_xxstar_squared(perm: EntryPermutation, dim: usize) -> Word {
        Word::new(
            vec![
                Letter::new("U", perm.clone(), One),
                Letter::new("U", perm.clone(), Star),
                Letter::new("U", perm.clone(), One),
                Letter::new("U", perm, Star),
            ],
            dim,
        )
        .unwrap()
    }

    #[test]
    fn samples_are_unitary() {
        for (dim, seed) in [(1usize, 1u64), (2, 2), (3, 3), (8, 4), (64, 5), (256, 6)] {
            let u = haar(dim, seed);
            assert!(
                u.unitarity_residual() < 1e-10,
                "residual {} at N = {dim}",
                u.unitarity_residual()
            );
        }
    }

    #[test]
    fn haar_mean_trace_vanishes() {
        let id = EntryPermutation::identity(8);
        let w = Word::new(vec![Letter::new("U", id, One)], 8).unwrap();
        let est = estimate_word_trace(&w, 20_000, 11).unwrap();
        assert!(
            est.deviation_sigmas(Complex64::ZERO) < 4.0,
            "mean {} ± {}",
            est.mean(),
            est.std_error
        );
    }

    #[test]
    fn uu_star_is_deterministic() {
        let id = EntryPermutation::identity(16);
        let w = Word::new(
            vec![
                Letter::new("U", id.clone(), One),
                Letter::new("U", id, Star),
            ],
            16,
        )
        .unwrap();
        let est = estimate_word_trace(&w, 100, 3).unwrap();
        assert!((est.mean() - Complex64::ONE).norm() < 1e-12);
        assert!(est.std_error < 1e-12);
    }

    #[test]
    fn estimates_are_bit_reproducible() {
        let w = word_xxstar_squared(EntryPermutation::gamma(1, 2, 4).unwrap(), 8);
        let a = estimate_word_trace(&w, 500, 42).unwrap();
        let b = estimate_word_trace(&w, 500, 42).unwrap();
        assert_eq!(a.mean_re.to_bits(), b.mean_re.to_bits());
        assert_eq!(a.mean_im.to_bits(), b.mean_im.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = estimate_word_trace(&w, 500, 43).unwrap();
        assert_ne!(a.mean_re.to_bits(), c.mean_re.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let w = word_xxstar_squared(EntryPermutation::gamma(-1, 2, 4).unwrap(), 8);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_word_trace(&w, 700, 9).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| estimate_word_trace(&w, 700, 9).unwrap());
        assert_eq!(single.mean_re.to_bits(), multi.mean_re.to_bits());
        assert_eq!(single.mean_im.to_bits(), multi.mean_im.to_bits());
        assert_eq!(single.std_error.to_bits(), multi.std_error.to_bits());
    }

    #[test]
    fn standard_error_shrinks_with_samples() {
        let w = word_xxstar_squared(EntryPermutation::gamma(1, 4, 2).unwrap(), 8);
        let small = estimate_word_trace(&w, 2_000, 5).unwrap();
        let large = estimate_word_trace(&w, 8_000, 5).unwrap();
        let ratio = small.std_error / large.std_error;
        assert!(
            (1.4..=2.9).contains(&ratio),
            "4× samples changed SE by {ratio}"
        );
    }

    #[test]
    fn monte_carlo_matches_exact_in_most_runs() {
        // Meta-test with pinned seeds 0..100: the exact value must land
        // within 4 standard errors in at least 95 runs.
        let w = word_xxstar_squared(EntryPermutation::gamma(1, 2, 4).unwrap(), 8);
        let exact = exact_trace_expectation_pairing(&w).unwrap();
        let exact: f64 = {
            use num_traits::ToPrimitive;
            exact.to_f64().unwrap()
        };
        let mut hits = 0;
        for seed in 0..100u64 {
            let est = estimate_word_trace(&w, 200, seed).unwrap();
            if est.deviation_sigmas(Complex64::new(exact, 0.0)) < 4.0 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "only {hits} of 100 runs within 4·SE");
    }

    #[test]
    fn budget_guards() {
        let id = EntryPermutation::identity(2);
        let w = Word::new(vec![Letter::new("U", id, One)], 2).unwrap();
        assert!(matches!(
            estimate_word_trace(&w, 0, 1),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            estimate_word_trace(&w, MAX_SAMPLES + 1, 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn entry_permutation_on_samples() {
        let u = haar(6, 21);
        let id = EntryPermutation::identity(6);
        assert_eq!(apply_entry_permutation(&u, &id).unwrap(), u);
        let t = EntryPermutation::full_transpose(6);
        let double = apply_entry_permutation(&apply_entry_permutation(&u, &t).unwrap(), &t).unwrap();
        assert_eq!(double, u);
        // The right partial transpose is the blockwise transpose.
        let shape = BlockShape::new(2, 3).unwrap();
        let g = EntryPermutation::partial(crate::perms::Side::Right, shape);
        let via_perm = apply_entry_permutation(&u, &g).unwrap();
        let grid = extract_blocks(&u, shape).unwrap();
        for bi in 0..2 {
            for bj in 0..2 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert_eq!(via_perm.get(bi * 3 + i, bj * 3 + j), grid[bi][bj].get(j, i));
                    }
                }
            }
        }
        // The left partial transpose swaps blocks without touching them.
        let g = EntryPermutation::partial(crate::perms::Side::Left, shape);
        let via_perm = apply_entry_permutation(&u, &g).unwrap();
        for bi in 0..2 {
            for bj in 0..2 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert_eq!(via_perm.get(bi * 3 + i, bj * 3 + j), grid[bj][bi].get(i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn blocks_round_trip() {
        let u = haar(6, 33);
        let shape = BlockShape::new(3, 2).unwrap();
        let grid = extract_blocks(&u, shape).unwrap();
        assert_eq!(reassemble_blocks(&grid).unwrap(), u);
        let whole = extract_blocks(&u, BlockShape::new(1, 6).unwrap()).unwrap();
        assert_eq!(whole[0][0], u);
    }

    #[test]
    fn first_block_mean_square_norm() {
        // E (1/d)·Tr(U₁₁U₁₁*) = 1/b; checked within 4·SE at N = 64, b = 2.
        let shape = BlockShape::new(2, 32).unwrap();
        let n_samples = 400u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for index in 0..n_samples {
            let mut rng = sample_rng(77, index);
            let u = sample_haar(64, &mut rng).unwrap().into_matrix();
            let grid = extract_blocks(&u, shape).unwrap();
            let b11 = &grid[0][0];
            let v = (b11.trace_of_product(&b11.adjoint()) / 32.0).re;
            sum += v;
            sum_sq += v * v;
        }
        let n = n_samples as f64;
        let mean = sum / n;
        let se = (((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) / n).sqrt();
        assert!(
            (mean - 0.5).abs() < 4.0 * se,
            "mean {mean} ± {se} vs 1/b = 0.5"
        );
    }

    #[test]
    fn diagonal_components_sum_to_grid_transpose() {
        let u = haar(6, 55);
        let shape = BlockShape::new(3, 2).unwrap();
        let left = EntryPermutation::partial(crate::perms::Side::Left, shape);
        let grid_t = apply_entry_permutation(&u, &left).unwrap();
        let mut sum = ComplexMatrix::zeros(6);
        for k in 0..3 {
            let vk = diagonal_decomposition(&u, shape, k).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    // Supports are disjoint across k.
                    if vk.get(i, j) != Complex64::ZERO {
                        assert_eq!(sum.get(i, j), Complex64::ZERO);
                    }
                    sum.set(i, j, sum.get(i, j) + vk.get(i, j));
                }
            }
        }
        assert_eq!(sum, grid_t);
        // k is normalized mod b.
        assert_eq!(
            diagonal_decomposition(&u, shape, 4).unwrap(),
            diagonal_decomposition(&u, shape, 1).unwrap()
        );
    }

    #[test]
    fn diagonal_component_placement_matches_block_pattern() {
        // For b = 3 the k = 1 component has blocks at (1,2), (2,3), (3,1)
        // holding the transposed grid's entries there.
        let u = haar(6, 91);
        let shape = BlockShape::new(3, 2).unwrap();
        let v1 = diagonal_decomposition(&u, shape, 1).unwrap();
        let grid = extract_blocks(&u, shape).unwrap();
        for (bi, bj) in [(0usize, 1usize), (1, 2), (2, 0)] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(v1.get(bi * 2 + i, bj * 2 + j), grid[bj][bi].get(i, j));
                }
            }
        }
        for (bi, bj) in [(0usize, 0usize), (1, 1), (0, 2), (2, 1)] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(v1.get(bi * 2 + i, bj * 2 + j), Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn shift_matrix_properties() {
        let s2 = shift_matrix(2);
        assert_eq!(s2.get(0, 1), Complex64::ONE);
        assert_eq!(s2.get(1, 0), Complex64::ONE);
        assert_eq!(s2.get(0, 0), Complex64::ZERO);
        for b in 2..6 {
            let s = shift_matrix(b);
            let mut power = s.clone();
            for _ in 1..b {
                assert!(power.normalized_trace().norm() < 1e-15);
                power = power.mul(&s);
            }
            assert_eq!(power, ComplexMatrix::identity(b));
        }
    }
}
