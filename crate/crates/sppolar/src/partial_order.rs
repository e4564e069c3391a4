//! The universal (channel-independent) partial order on bit-channel
//! indices.
//!
//! Index j is dominated by index i (`dominates(i, j)` is true) when the
//! synthesized channel of i is at least as reliable as that of j on
//! every B-DMC. The covering moves are: turning a 0 of bin(j) into a 1,
//! and moving a 1 of bin(j) to a more significant position. The
//! transitive closure has a direct test: sort both supports descending
//! and match greedily; i dominates j iff every element of S_j can be
//! injected into S_i without decreasing.

use crate::bits::support;

/// True iff i dominates j (j is universally no more reliable than i).
/// Reflexive.
pub fn dominates(i: usize, j: usize) -> bool {
    let mut si = support(i);
    let mut sj = support(j);
    if sj.len() > si.len() {
        return false;
    }
    si.sort_unstable_by(|a, b| b.cmp(a));
    sj.sort_unstable_by(|a, b| b.cmp(a));
    sj.iter().zip(&si).all(|(a, b)| b >= a)
}

/// True iff the pair is strictly ordered with i above j.
pub fn strictly_dominates(i: usize, j: usize) -> bool {
    i != j && dominates(i, j)
}

/// True iff the two indices are comparable under the partial order.
pub fn comparable(i: usize, j: usize) -> bool {
    dominates(i, j) || dominates(j, i)
}
