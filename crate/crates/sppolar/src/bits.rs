//! Fixed-length binary vectors over GF(2).

use crate::{Error, Result};
use std::fmt;

/// A fixed-length bit vector backed by 64-bit blocks.
///
/// The length is set at creation; all GF(2) operations require equal
/// lengths. Word-level storage keeps XOR and weight cheap, which the
/// exhaustive weight-spectrum enumeration leans on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    blocks: Vec<u64>,
    len: usize,
}

impl BitVec {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVec {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Build from 0/1 bytes.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Unit vector e_i of the given length.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.blocks[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.blocks[i >> 6] |= mask;
        } else {
            self.blocks[i >> 6] &= !mask;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// In-place GF(2) addition.
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a ^= b;
        }
    }

    /// GF(2) sum of two equal-length vectors.
    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// Support of the binary expansion of `i`: the set of bit positions
/// k in [0, n) with the k-th bit of `i` set.
pub fn support(i: usize) -> Vec<usize> {
    let mut s = Vec::new();
    let mut v = i;
    while v != 0 {
        let k = v.trailing_zeros() as usize;
        s.push(k);
        v &= v - 1;
    }
    s
}

/// Validated bit index in [0, N) for a block length N = 2^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitIndex {
    value: usize,
    n: usize,
}

impl BitIndex {
    pub fn new(value: usize, block_len: usize) -> Result<Self> {
        if !block_len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(block_len));
        }
        if value >= block_len {
            return Err(Error::IndexOutOfRange {
                index: value,
                n: block_len,
            });
        }
        Ok(BitIndex {
            value,
            n: block_len.trailing_zeros() as usize,
        })
    }

    pub fn value(&self) -> usize {
        self.value
    }

    /// log2 of the block length.
    pub fn stages(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> Vec<usize> {
        support(self.value)
    }
}
