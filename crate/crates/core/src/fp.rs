//! Arithmetic and small-scale linear algebra over the prime field Z/pZ.
//!
//! Everything here is desk-scale: p is an odd prime, capped by default at 97,
//! and the matrices involved have at most p-1 columns. Values are kept in
//! canonical form `0..p` throughout.

use thiserror::Error;

/// Largest modulus accepted by [`PrimeField::new`]. Recursions over larger
/// primes are rejected to keep closure enumerations and word-problem runs
/// within interactive time.
pub const DEFAULT_PRIME_LIMIT: u32 = 97;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} must be an odd prime (p >= 3)")]
    NotOdd(u32),
    #[error("modulus {p} exceeds the supported limit {limit}")]
    PrimeTooLarge { p: u32, limit: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("vector length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// The field Z/pZ for an odd prime p.
///
/// Scalars are plain `u32` values held in `0..p`; the field object carries
/// the modulus and performs all reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Builds the field, validating that `p` is an odd prime within the
    /// default limit.
    pub fn new(p: u32) -> Result<Self, FpError> {
        Self::with_limit(p, DEFAULT_PRIME_LIMIT)
    }

    /// Same as [`PrimeField::new`] with a caller-chosen size limit.
    pub fn with_limit(p: u32, limit: u32) -> Result<Self, FpError> {
        if !is_prime(p) {
            return Err(FpError::NotPrime(p));
        }
        if p == 2 {
            return Err(FpError::NotOdd(p));
        }
        if p > limit {
            return Err(FpError::PrimeTooLarge { p, limit });
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Canonical representative of an arbitrary signed integer.
    pub fn reduce(&self, x: i64) -> u32 {
        let p = self.p as i64;
        (((x % p) + p) % p) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b % self.p) % self.p
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u32) -> u32 {
        a %= self.p;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat: x^(p-2) mod p.
    pub fn inverse(&self, x: u32) -> Result<u32, FpError> {
        if x.is_multiple_of(self.p) {
            return Err(FpError::ZeroInverse);
        }
        Ok(self.pow(x, self.p - 2))
    }
}

/// Dense row vector over Z/pZ with entries in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    field: PrimeField,
    entries: Vec<u32>,
}

impl FpVector {
    pub fn new(field: PrimeField, entries: Vec<u32>) -> Self {
        let entries = entries.into_iter().map(|e| e % field.modulus()).collect();
        FpVector { field, entries }
    }

    pub fn from_ints(field: PrimeField, ints: &[i64]) -> Self {
        FpVector {
            field,
            entries: ints.iter().map(|&x| field.reduce(x)).collect(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

/// Rank of the span of `rows` over Z/pZ, by Gaussian elimination with the
/// first nonzero entry of each remaining row as pivot. The empty list has
/// rank 0; rows of unequal length are rejected.
pub fn rank_mod_p(field: PrimeField, rows: &[FpVector]) -> Result<usize, FpError> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let width = first.len();
    for row in rows {
        if row.len() != width {
            return Err(FpError::DimensionMismatch {
                expected: width,
                found: row.len(),
            });
        }
    }

    let mut mat: Vec<Vec<u32>> = rows.iter().map(|r| r.entries.clone()).collect();
    let mut rank = 0;
    let mut col = 0;
    while rank < mat.len() && col < width {
        let pivot = (rank..mat.len()).find(|&r| mat[r][col] != 0);
        let Some(pivot) = pivot else {
            col += 1;
            continue;
        };
        mat.swap(rank, pivot);
        let inv = field.inverse(mat[rank][col])?;
        for entry in mat[rank].iter_mut().skip(col) {
            *entry = field.mul(*entry, inv);
        }
        let pivot_row = mat[rank].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (entry, &pivot_entry) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *entry = field.sub(*entry, field.mul(factor, pivot_entry));
                }
            }
        }
        rank += 1;
        col += 1;
    }
    Ok(rank)
}
