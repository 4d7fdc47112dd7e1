//! Arithmetic in GF(p) for word-sized primes, and an incremental echelon
//! basis used to track ranks of growing column sets.

use rand::Rng;

use crate::error::{Error, Result};

/// The Mersenne prime 2⁶¹ − 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Prime field with modulus below 2⁶³.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        Self { p: MERSENNE_61 }
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not an odd prime below 2^63")));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let w = a as u128 * b as u128;
        if self.p == MERSENNE_61 {
            let lo = (w as u64) & MERSENNE_61;
            let hi = (w >> 61) as u64;
            self.add(lo, hi)
        } else {
            (w % self.p as u128) as u64
        }
    }

    /// `a·b + c`.
    #[inline]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        let w = a as u128 * b as u128 + c as u128;
        if self.p == MERSENNE_61 {
            let lo = (w as u64) & MERSENNE_61;
            let hi = (w >> 61) as u64;
            self.add(lo, hi)
        } else {
            (w % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Inverse by Fermat; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.p - 2))
    }

    /// Reduce a signed integer into `[0, p)`.
    pub fn from_i64(&self, v: i64) -> u64 {
        let r = (v as i128).rem_euclid(self.p as i128);
        r as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
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

/// Row-echelon basis of a subspace of GF(p)ⁿ, grown one vector at a time.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: PrimeField,
    dim: usize,
    // (pivot, vector normalized so that vector[pivot] == 1)
    rows: Vec<(usize, Vec<u64>)>,
}

impl EchelonBasis {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        Self { field, dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Insert `v`; returns `true` when it was independent of the basis.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.dim, "vector length does not match the ambient dimension");
        if self.is_full() {
            return false;
        }
        let f = self.field;
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            let nc = f.neg(c);
            for (x, &r) in v[*piv..].iter_mut().zip(&row[*piv..]) {
                *x = f.mul_add(nc, r, *x);
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[piv]).expect("nonzero pivot");
        for x in v.iter_mut().skip(piv) {
            *x = f.mul(*x, inv);
        }
        self.rows.push((piv, v));
        true
    }
}

/// Rank of a list of equal-length vectors over GF(p).
pub fn rank_of_vectors(field: PrimeField, dim: usize, vectors: impl IntoIterator<Item = Vec<u64>>) -> usize {
    let mut basis = EchelonBasis::new(field, dim);
    for v in vectors {
        basis.insert(v);
        if basis.is_full() {
            break;
        }
    }
    basis.rank()
}
