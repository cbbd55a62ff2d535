//! The unitary Weingarten function `Wg_N` on `S_n` for fixed integer
//! dimension `N`, in exact rational arithmetic.
//!
//! `Wg_N` is the inverse, in the group algebra of `S_n`, of the Gram
//! function `σ ↦ N^{#(σ)}` (`#` = number of cycles). Being central, it is
//! constant on conjugacy classes, so the primary route solves the
//! `p(n) × p(n)` class-sum system. An independent full `n! × n!` solve is
//! kept as an oracle for small `n`; the two must agree exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ncpart::Pairing;
use crate::util::{catalan, partitions};

/// Cycle-type ceiling of the class-algebra route.
pub const MAX_N: usize = 8;

/// Ceiling of the full group-algebra oracle.
pub const MAX_N_GROUP_ALGEBRA: usize = 5;

/// A conjugacy class of `S_n`: the multiset of cycle lengths, non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::domain("cycle lengths must be positive".to_string()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn identity(n: usize) -> Self {
        CycleType { parts: vec![1; n] }
    }

    /// Cycle type of a permutation given as 0-based images.
    pub fn of_permutation(perm: &[usize]) -> Self {
        let mut seen = vec![false; perm.len()];
        let mut parts = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                len += 1;
                k = perm[k];
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    /// Sum of the parts.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of cycles (including fixed points).
    pub fn num_cycles(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }
}

impl std::fmt::Display for CycleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for p in &self.parts {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

/// Exact `Wg_N` on the conjugacy classes of `S_n` for one `(n, N)`.
#[derive(Debug, Clone)]
pub struct WeingartenTable {
    n: usize,
    dim: u64,
    values: HashMap<CycleType, BigRational>,
}

impl WeingartenTable {
    /// Solve the class-sum system; the primary construction.
    pub fn compute(n: usize, dim: u64) -> Result<Self> {
        check_args(n, dim, MAX_N)?;
        let perms = all_permutations(n);
        let classes: Vec<Vec<usize>> = partitions(n);
        let class_index: HashMap<Vec<usize>, usize> =
            classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let k = classes.len();

        let class_of: Vec<usize> = perms
            .iter()
            .map(|p| class_index[CycleType::of_permutation(p).parts()])
            .collect();
        let mut rep_of_class: Vec<Option<usize>> = vec![None; k];
        for (idx, &c) in class_of.iter().enumerate() {
            rep_of_class[c].get_or_insert(idx);
        }

        // counts[row][col][c] = #{σ in class `col` : σ⁻¹·h_row has c cycles}.
        let mut counts = vec![vec![vec![0u64; n + 1]; k]; k];
        let mut inv = vec![0usize; n];
        let mut composed = vec![0usize; n];
        for (s_idx, sigma) in perms.iter().enumerate() {
            for (x, &img) in sigma.iter().enumerate() {
                inv[img] = x;
            }
            for (row, rep) in rep_of_class.iter().enumerate() {
                let h = &perms[rep.expect("every class has a representative")];
                for x in 0..n {
                    composed[x] = inv[h[x]];
                }
                let c = CycleType::of_permutation(&composed).num_cycles();
                counts[row][class_of[s_idx]][c] += 1;
            }
        }

        let n_pow: Vec<BigInt> = (0..=n).map(|c| BigInt::from(dim).pow(c as u32)).collect();
        let mut matrix = vec![vec![BigRational::zero(); k]; k];
        for row in 0..k {
            for col in 0..k {
                let mut acc = BigInt::zero();
                for c in 0..=n {
                    if counts[row][col][c] > 0 {
                        acc += BigInt::from(counts[row][col][c]) * &n_pow[c];
                    }
                }
                matrix[row][col] = BigRational::from_integer(acc);
            }
        }
        let identity_row = class_index[CycleType::identity(n).parts()];
        let mut rhs = vec![BigRational::zero(); k];
        rhs[identity_row] = BigRational::one();

        let solution = solve_rational(matrix, rhs)?;
        let values = classes
            .into_iter()
            .zip(solution)
            .map(|(parts, v)| (CycleType { parts }, v))
            .collect();
        Ok(WeingartenTable { n, dim, values })
    }

    /// Independent oracle: solve the full `n! × n!` convolution system and
    /// read class values off it (verifying centrality on the way).
    pub fn compute_group_algebra(n: usize, dim: u64) -> Result<Self> {
        check_args(n, dim, MAX_N_GROUP_ALGEBRA)?;
        let perms = all_permutations(n);
        let size = perms.len();
        let index: HashMap<Vec<usize>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        let mut matrix = vec![vec![BigRational::zero(); size]; size];
        let mut inv = vec![0usize; n];
        let mut composed = vec![0usize; n];
        for (s_idx, sigma) in perms.iter().enumerate() {
            for (x, &img) in sigma.iter().enumerate() {
                inv[img] = x;
            }
            for (p_idx, pi) in perms.iter().enumerate() {
                for x in 0..n {
                    composed[x] = inv[pi[x]];
                }
                let c = CycleType::of_permutation(&composed).num_cycles();
                matrix[p_idx][s_idx] =
                    BigRational::from_integer(BigInt::from(dim).pow(c as u32));
            }
        }
        let identity_idx = index[&(0..n).collect::<Vec<usize>>()];
        let mut rhs = vec![BigRational::zero(); size];
        rhs[identity_idx] = BigRational::one();
        let solution = solve_rational(matrix, rhs)?;

        let mut values: HashMap<CycleType, BigRational> = HashMap::new();
        for (perm, value) in perms.iter().zip(&solution) {
            let ct = CycleType::of_permutation(perm);
            match values.get(&ct) {
                None => {
                    values.insert(ct, value.clone());
                }
                Some(prev) => {
                    if prev != value {
                        return Err(Error::Contract(format!(
                            "group-algebra Weingarten is not central at {ct}"
                        )));
                    }
                }
            }
        }
        Ok(WeingartenTable { n, dim, values })
    }

    /// Shared cache over `(n, N)`.
    pub fn cached(n: usize, dim: u64) -> Result<Arc<WeingartenTable>> {
        type TableCache = Mutex<HashMap<(usize, u64), Arc<WeingartenTable>>>;
        static CACHE: OnceLock<TableCache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().unwrap().get(&(n, dim)) {
            return Ok(hit.clone());
        }
        let table = Arc::new(WeingartenTable::compute(n, dim)?);
        cache
            .lock()
            .unwrap()
            .entry((n, dim))
            .or_insert_with(|| table.clone());
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// Value on a conjugacy class.
    pub fn wg(&self, ct: &CycleType) -> Result<&BigRational> {
        if ct.n() != self.n {
            return Err(Error::contract(format!(
                "cycle type of {} in a table for S_{}",
                ct.n(),
                self.n
            )));
        }
        self.values
            .get(ct)
            .ok_or_else(|| Error::contract(format!("unknown class {ct}")))
    }

    /// Value on a permutation given as 0-based images.
    pub fn wg_permutation(&self, perm: &[usize]) -> Result<&BigRational> {
        self.wg(&CycleType::of_permutation(perm))
    }

    /// `Wg_N(p, q)` for pairings of `[2n]`: the cycles of `p∘q` come in
    /// pairs of equal length; one from each pair forms a permutation in
    /// `S_n` whose class is looked up.
    pub fn wg_pairings(&self, p: &Pairing, q: &Pairing) -> Result<&BigRational> {
        let ct = half_cycle_type(p, q)?;
        self.wg(&ct)
    }

    /// Iterate `(class, value)` pairs, sorted by class for stable output.
    pub fn entries(&self) -> Vec<(&CycleType, &BigRational)> {
        let mut out: Vec<_> = self.values.iter().collect();
        out.sort_by(|a, b| a.0.parts().cmp(b.0.parts()).reverse());
        out
    }
}

/// Cycle type of the "half" permutation of a pairing pair: the cycle
/// lengths of `p∘q` with multiplicities halved.
pub fn half_cycle_type(p: &Pairing, q: &Pairing) -> Result<CycleType> {
    if !p.n().is_multiple_of(2) {
        return Err(Error::contract("pairings need even ground sets".to_string()));
    }
    let mut lengths: Vec<usize> = p
        .compose_cycles(q)?
        .iter()
        .map(|c| c.len())
        .collect();
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    let mut parts = Vec::with_capacity(lengths.len() / 2);
    let mut iter = lengths.into_iter();
    while let Some(a) = iter.next() {
        let b = iter.next().ok_or_else(|| {
            Error::contract("cycles of p∘q do not pair up".to_string())
        })?;
        if a != b {
            return Err(Error::contract(
                "cycles of p∘q do not pair up by length".to_string(),
            ));
        }
        parts.push(a);
    }
    CycleType::new(parts)
}

/// Leading asymptotics of `Wg_N(σ)`: the coefficient
/// `w₁(σ) = ∏ (−1)^{lᵢ−1} Cat_{lᵢ−1}` and the exponent `−2n + #(σ)` of the
/// order term `w₁(σ)·N^{−2n+#(σ)}`.
pub fn leading_term(ct: &CycleType) -> (BigInt, i64) {
    let mut w1 = BigInt::one();
    for &l in ct.parts() {
        let sign = if (l - 1) % 2 == 0 { 1 } else { -1 };
        w1 *= BigInt::from(sign) * catalan(l - 1);
    }
    let exponent = -2 * ct.n() as i64 + ct.num_cycles() as i64;
    (w1, exponent)
}

/// All permutations of `[n]` as 0-based image vectors, lexicographic.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

fn check_args(n: usize, dim: u64, ceiling: usize) -> Result<()> {
    if n == 0 || n > ceiling {
        return Err(Error::capacity(format!(
            "Weingarten tables support 1 ≤ n ≤ {ceiling}, got n = {n}"
        )));
    }
    if (dim as usize) < n {
        return Err(Error::singular(format!(
            "the Gram function of S_{n} is singular for N = {dim} < n"
        )));
    }
    Ok(())
}

/// Gaussian elimination with partial (first nonzero) pivoting.
fn solve_rational(
    mut matrix: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
) -> Result<Vec<BigRational>> {
    let k = rhs.len();
    for col in 0..k {
        let pivot_row = (col..k)
            .find(|&r| !matrix[r][col].is_zero())
            .ok_or_else(|| Error::singular("singular linear system".to_string()))?;
        matrix.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = matrix[col][col].clone();
        for r in 0..k {
            if r == col || matrix[r][col].is_zero() {
                continue;
            }
            let factor = matrix[r][col].clone() / &pivot;
            let (pivot_row, target_row) = if r < col {
                let (head, tail) = matrix.split_at_mut(col);
                (&tail[0], &mut head[r])
            } else {
                let (head, tail) = matrix.split_at_mut(r);
                (&head[col], &mut tail[0])
            };
            for (t, p) in target_row[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= &factor * p;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Ok((0..k).map(|r| &rhs[r] / &matrix[r][r]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpart::canonical_pairings;
    use num_traits::Signed;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn n1_is_reciprocal_dimension() {
        for dim in 1..=10u64 {
            let t = WeingartenTable::compute(1, dim).unwrap();
            assert_eq!(t.wg(&CycleType::identity(1)).unwrap(), &rat(1, dim as i64));
        }
    }

    #[test]
    fn n2_closed_forms() {
        for dim in 2..=10i64 {
            let t = WeingartenTable::compute(2, dim as u64).unwrap();
            assert_eq!(
                t.wg(&CycleType::identity(2)).unwrap(),
                &rat(1, dim * dim - 1)
            );
            assert_eq!(
                t.wg(&CycleType::new(vec![2]).unwrap()).unwrap(),
                &rat(-1, dim * (dim * dim - 1))
            );
        }
    }

    #[test]
    fn convolution_identity_n3() {
        // Σ_σ Wg(σ)·N^{#(σ⁻¹π)} = [π = e] summed over all of S₃ at N = 5.
        let dim = 5u64;
        let t = WeingartenTable::compute(3, dim).unwrap();
        let perms = all_permutations(3);
        for pi in &perms {
            let mut acc = BigRational::zero();
            for sigma in &perms {
                let mut inv = [0usize; 3];
                for (x, &img) in sigma.iter().enumerate() {
                    inv[img] = x;
                }
                let composed: Vec<usize> = (0..3).map(|x| inv[pi[x]]).collect();
                let cycles = CycleType::of_permutation(&composed).num_cycles();
                acc += t.wg_permutation(sigma).unwrap()
                    * BigRational::from_integer(BigInt::from(dim).pow(cycles as u32));
            }
            let expected = if pi.iter().enumerate().all(|(x, &v)| x == v) {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            assert_eq!(acc, expected);
        }
    }

    #[test]
    fn known_closed_forms_for_small_orders() {
        // Published closed forms, independent of both solvers here.
        for dim in 4..=9i64 {
            let n2 = dim * dim;
            let t3 = WeingartenTable::compute(3, dim as u64).unwrap();
            let den = dim * (n2 - 1) * (n2 - 4);
            assert_eq!(
                t3.wg(&CycleType::identity(3)).unwrap(),
                &rat(n2 - 2, den)
            );
            assert_eq!(
                t3.wg(&CycleType::new(vec![2, 1]).unwrap()).unwrap(),
                &(rat(-1, (n2 - 1) * (n2 - 4)))
            );
            assert_eq!(
                t3.wg(&CycleType::new(vec![3]).unwrap()).unwrap(),
                &rat(2, den)
            );
            let t4 = WeingartenTable::compute(4, dim as u64).unwrap();
            assert_eq!(
                t4.wg(&CycleType::identity(4)).unwrap(),
                &rat(
                    n2 * n2 - 8 * n2 + 6,
                    n2 * (n2 - 1) * (n2 - 4) * (n2 - 9)
                )
            );
        }
    }

    #[test]
    fn class_route_matches_group_algebra_oracle() {
        for n in 1..=4usize {
            for dim in [n as u64, n as u64 + 1, 9] {
                let fast = WeingartenTable::compute(n, dim).unwrap();
                let oracle = WeingartenTable::compute_group_algebra(n, dim).unwrap();
                for (ct, v) in fast.entries() {
                    assert_eq!(oracle.wg(ct).unwrap(), v, "n={n}, N={dim}, class {ct}");
                }
            }
        }
    }

    #[test]
    fn small_dimension_is_singular() {
        assert!(matches!(
            WeingartenTable::compute(3, 2),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            WeingartenTable::compute(9, 20),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn wg_is_a_class_function() {
        let t = WeingartenTable::compute(4, 7).unwrap();
        let perms = all_permutations(4);
        // Conjugate a 4-cycle by every τ: all lookups agree.
        let four_cycle = vec![1usize, 2, 3, 0];
        let base = t.wg_permutation(&four_cycle).unwrap().clone();
        for tau in &perms {
            let mut inv = [0usize; 4];
            for (x, &img) in tau.iter().enumerate() {
                inv[img] = x;
            }
            let conj: Vec<usize> = (0..4).map(|x| tau[four_cycle[inv[x]]]).collect();
            assert_eq!(t.wg_permutation(&conj).unwrap(), &base);
        }
    }

    #[test]
    fn pairing_lookup_uses_half_cycles() {
        let n_dim = 6u64;
        let t1 = WeingartenTable::compute(1, n_dim).unwrap();
        let t2 = WeingartenTable::compute(2, n_dim).unwrap();
        // p = q: p∘q is the identity; class e in S_k.
        let (p, q) = canonical_pairings(1);
        assert_eq!(t1.wg_pairings(&p, &q).unwrap(), &rat(1, 6));
        let (p, q) = canonical_pairings(2);
        // p̃₂∘q̃₂ has two 2-cycles, halved to one 2-cycle in S₂.
        assert_eq!(
            half_cycle_type(&p, &q).unwrap(),
            CycleType::new(vec![2]).unwrap()
        );
        assert_eq!(
            t2.wg_pairings(&p, &q).unwrap(),
            &rat(-1, 6 * (36 - 1))
        );
        // Consistency with 2#(p∨q) = #(pq) over all pairings of [6].
        let t3 = WeingartenTable::compute(3, n_dim).unwrap();
        for p in crate::ncpart::enumerate_pairings(6) {
            for q in crate::ncpart::enumerate_pairings(6) {
                let ct = half_cycle_type(&p, &q).unwrap();
                let join = p.to_partition().join(&q.to_partition()).unwrap();
                assert_eq!(ct.num_cycles(), join.num_blocks());
                t3.wg_pairings(&p, &q).unwrap();
            }
        }
    }

    #[test]
    fn leading_term_examples() {
        let (w1, exp) = leading_term(&CycleType::identity(5));
        assert_eq!(w1, BigInt::from(1));
        assert_eq!(exp, -5);
        let (w1, exp) = leading_term(&CycleType::new(vec![3]).unwrap());
        assert_eq!(w1, BigInt::from(2));
        assert_eq!(exp, -5);
        let (w1, _) = leading_term(&CycleType::new(vec![2]).unwrap());
        assert_eq!(w1, BigInt::from(-1));
    }

    #[test]
    fn asymptotics_approach_leading_term() {
        // N^{2n−#σ}·Wg_N(σ) = w₁ + O(N⁻²); the deviation at N = 50 must sit
        // inside a loose band around |w₁|/N² (factor 100: the subleading
        // coefficient of a 4-cycle is already ≈ 14·|w₁|).
        let dim = 50u64;
        for n in 1..=4usize {
            let t = WeingartenTable::compute(n, dim).unwrap();
            for (ct, value) in t.entries() {
                let (w1, _) = leading_term(ct);
                let scale = BigRational::from_integer(
                    BigInt::from(dim).pow((2 * n - ct.num_cycles()) as u32),
                );
                let dev = (scale * value - BigRational::from_integer(w1.clone())).abs();
                let mag = w1.magnitude().clone().max(num_bigint::BigUint::from(1u32));
                let band = BigRational::new(
                    BigInt::from(100) * BigInt::from(mag),
                    BigInt::from(dim * dim),
                );
                assert!(dev <= band, "n={n}, class {ct}: dev {dev} > band {band}");
            }
        }
    }

    #[test]
    fn cached_tables_are_shared() {
        let a = WeingartenTable::cached(3, 9).unwrap();
        let b = WeingartenTable::cached(3, 9).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
