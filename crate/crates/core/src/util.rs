//! Small combinatorial helpers used across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// n-th Catalan number, `C_n = binom(2n, n) / (n + 1)`.
pub fn catalan(n: usize) -> BigInt {
    // C_0 = 1, C_{k+1} = C_k * 2(2k+1)/(k+2); the division is exact.
    let mut c = BigInt::one();
    for k in 0..n {
        c = c * (2 * (2 * k as u64 + 1)) / (k as u64 + 2);
    }
    c
}

/// All integer partitions of `n`, parts in non-increasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(n, n.max(1), &mut current, &mut out);
    out
}

/// `base^exp` as an exact rational, with negative exponents allowed.
pub fn rational_pow(base: u64, exp: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    if exp >= 0 {
        let mut acc = BigRational::one();
        for _ in 0..exp {
            acc *= &b;
        }
        acc
    } else {
        rational_pow(base, -exp).recip()
    }
}

/// Kahan compensated accumulator for f64 sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_small_values() {
        let expect = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(catalan(n), BigInt::from(c));
        }
    }

    #[test]
    fn partition_counts() {
        // p(1)..p(8)
        let expect = [1, 2, 3, 5, 7, 11, 15, 22];
        for (n, &p) in expect.iter().enumerate() {
            assert_eq!(partitions(n + 1).len(), p);
        }
        assert_eq!(partitions(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn kahan_handles_cancellation() {
        let mut acc = KahanSum::default();
        for _ in 0..1_000_000 {
            acc.add(0.1);
        }
        assert!((acc.value() - 100_000.0).abs() < 1e-9);
    }
}
