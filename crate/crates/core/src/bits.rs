//! Fixed-length binary vectors.

use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;
use std::ops::Index;

/// A vector of binary symbols. Every element is 0 or 1 and the length is
/// fixed at construction; individual symbols may be rewritten but the vector
/// never grows or shrinks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    /// Builds a bit vector, rejecting any symbol other than 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "bit vector contains non-binary symbol {b}"
            )));
        }
        Ok(Self { bits })
    }

    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![0; len],
        }
    }

    /// Uniformly random bits drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Self {
        Self {
            bits: (0..len).map(|_| rng.random_range(0..2u8)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    /// Rewrites one symbol in place. Panics if `value > 1` or out of range.
    pub fn set(&mut self, idx: usize, value: u8) {
        assert!(value <= 1, "non-binary symbol {value}");
        self.bits[idx] = value;
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.bits.iter()
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self { bits }
    }
}

impl Index<usize> for BitVector {
    type Output = u8;

    fn index(&self, idx: usize) -> &u8 {
        &self.bits[idx]
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u8>> for BitVector {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary() {
        assert!(BitVector::new(vec![0, 1, 2]).is_err());
        assert!(BitVector::new(vec![0, 1, 1, 0]).is_ok());
    }

    #[test]
    fn zeros_and_weight() {
        let v = BitVector::zeros(5);
        assert_eq!(v.len(), 5);
        assert_eq!(v.weight(), 0);
        let w = BitVector::new(vec![1, 0, 1, 1]).unwrap();
        assert_eq!(w.weight(), 3);
    }

    #[test]
    fn set_keeps_length() {
        let mut v = BitVector::zeros(3);
        v.set(1, 1);
        assert_eq!(v.as_slice(), &[0, 1, 0]);
        assert_eq!(v.len(), 3);
    }
}
