//! The polar transform and row-weight combinatorics.
//!
//! The transform matrix is the n-fold Kronecker power of the 2x2 kernel
//! [[1,0],[1,1]], without any bit-reversal permutation. It is
//! self-inverse over GF(2).

use crate::bits::{support, BitVec};
use crate::{Error, Result};

/// Applies the polar transform x = u * G_N in O(N log N) butterfly form.
///
/// The butterfly stages are Kronecker factors and commute, so the stage
/// order does not affect the result.
pub fn polar_transform(u: &BitVec) -> Result<BitVec> {
    let n = u.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut x = u.clone();
    polar_transform_in_place(&mut x);
    Ok(x)
}

pub(crate) fn polar_transform_in_place(x: &mut BitVec) {
    let n = x.len();
    let mut half = 1;
    while half < n {
        let step = half * 2;
        let mut block = 0;
        while block < n {
            for i in block..block + half {
                let b = x.get(i + half);
                if b {
                    let a = x.get(i);
                    x.set(i, !a);
                }
            }
            block += step;
        }
        half = step;
    }
}

/// Weight of row `i` of G_N: 2^|S_i| where S_i is the support of the
/// binary expansion of `i`.
pub fn row_weight(i: usize, block_len: usize) -> Result<usize> {
    if !block_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(block_len));
    }
    if i >= block_len {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: block_len,
        });
    }
    Ok(1 << support(i).len())
}

/// Row `i` of G_N as a bit vector. Entry j is 1 iff the support of j is
/// contained in the support of i.
pub fn transform_row(i: usize, block_len: usize) -> Result<BitVec> {
    if i >= block_len {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: block_len,
        });
    }
    polar_transform(&BitVec::unit(block_len, i))
}

/// Dense G_N, row major. Oracle-sized helper for tests and for the
/// small local kernels of the pre-transform.
pub fn dense_transform(block_len: usize) -> Result<Vec<BitVec>> {
    (0..block_len).map(|i| transform_row(i, block_len)).collect()
}
