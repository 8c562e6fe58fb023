//! Arithmetic in the prime field `Z/qZ`.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The field of integers modulo a prime `q`. Elements are `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    order: usize,
}

impl PrimeField {
    pub fn new(order: u64) -> Result<Self> {
        if !is_prime(order) {
            return Err(Error::NotPrime(order));
        }
        let order = usize::try_from(order).map_err(|_| Error::ResourceLimit {
            points: order,
            limit: usize::MAX as u64,
        })?;
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        ((a as u128 * b as u128) % self.order as u128) as usize
    }

    /// `a·x + b`
    pub fn affine(&self, a: usize, x: usize, b: usize) -> usize {
        self.add(self.mul(a, x), b)
    }
}
