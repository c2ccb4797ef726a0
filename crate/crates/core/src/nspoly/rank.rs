//! Exact and modular matrix rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::rational::Rational;

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pv = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..cols {
                let v = &pv * &row[j] - &f * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pv;
        r += 1;
    }
    r
}

/// Rank of rational rows, scaling each row to integers first.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let ints = rows
        .iter()
        .map(|row| {
            let den = row
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter()
                .map(|v| v.numer() * (&den / v.denom()))
                .collect()
        })
        .collect();
    bareiss_rank(ints)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // deterministic for all 64-bit inputs
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly drawn prime in [2^60, 2^61).
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(1u64 << 60..1u64 << 61) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Incremental row echelon form modulo a prime.
pub struct ModularEchelon {
    p: u64,
    pivots: Vec<(usize, Vec<u64>)>,
}

impl ModularEchelon {
    pub fn new(p: u64) -> Self {
        Self {
            p,
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a row of small signed integers; returns whether it raised the rank.
    pub fn insert(&mut self, row: &[i64]) -> bool {
        let p = self.p;
        let mut v: Vec<u64> = row
            .iter()
            .map(|&x| x.rem_euclid(p as i64) as u64)
            .collect();
        for (col, prow) in &self.pivots {
            let f = v[*col];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in v.iter_mut().zip(prow) {
                if y != 0 {
                    *x = (*x + mul_mod(nf, y, p)) % p;
                }
            }
        }
        let Some(col) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = pow_mod(v[col], p - 2, p);
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        self.pivots.push((col, v));
        true
    }
}

/// Affine dimension of a point cloud with signed-integer coordinates,
/// computed modulo `p`. Never exceeds the rational value.
pub fn modular_affine_rank(points: &[Vec<i64>], p: u64, stop_at: usize) -> usize {
    let Some(base) = points.first() else {
        return 0;
    };
    let mut ech = ModularEchelon::new(p);
    for q in &points[1..] {
        let diff: Vec<i64> = q.iter().zip(base).map(|(a, b)| a - b).collect();
        ech.insert(&diff);
        if ech.rank() >= stop_at {
            break;
        }
    }
    ech.rank()
}

/// Exact affine dimension of integer points.
pub fn exact_affine_rank(points: &[Vec<i64>]) -> usize {
    let Some(base) = points.first() else {
        return 0;
    };
    let rows = points[1..]
        .iter()
        .map(|q| q.iter().zip(base).map(|(a, b)| BigInt::from(a - b)).collect())
        .collect();
    bareiss_rank(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bareiss_small() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(5)],
        ];
        assert_eq!(bareiss_rank(m), 2);
        assert_eq!(bareiss_rank(vec![]), 0);
    }

    #[test]
    fn primes() {
        assert!(is_prime(2_305_843_009_213_693_951));
        assert!(!is_prime(2_305_843_009_213_693_953));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = random_prime(&mut rng);
        assert!(p >= 1 << 60 && is_prime(p));
    }

    #[test]
    fn modular_matches_exact() {
        let pts = vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]];
        assert_eq!(modular_affine_rank(&pts, 2_305_843_009_213_693_951, usize::MAX), 2);
        assert_eq!(exact_affine_rank(&pts), 2);
        let neg = vec![vec![-3, 2], vec![5, -7]];
        assert_eq!(modular_affine_rank(&neg, 1_000_000_007, usize::MAX), 1);
    }
}
