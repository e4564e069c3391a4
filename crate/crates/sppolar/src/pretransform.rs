//! Sparse upper-triangular pre-transforms and the v-domain bookkeeping
//! shared by the encoders and the list decoder.

use crate::bits::BitVec;
use crate::codespec::{CodeSpec, Family};
use crate::{Error, Result};

/// Upper-triangular N x N GF(2) matrix with unit diagonal, stored by
/// column: `cols[i]` lists the off-diagonal rows k < i with T[k,i] = 1.
///
/// u = v T expands to u_i = v_i + sum over k in cols[i] of v_k, and the
/// inverse recursion v_i = u_i + sum over k in cols[i] of v_k runs in
/// the same sparsity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreTransform {
    block_len: usize,
    cols: Vec<Vec<u32>>,
}

impl PreTransform {
    pub fn identity(block_len: usize) -> Self {
        PreTransform {
            block_len,
            cols: vec![Vec::new(); block_len],
        }
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Off-diagonal rows of column `i`.
    pub fn column(&self, i: usize) -> &[u32] {
        &self.cols[i]
    }

    pub fn is_identity(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Largest number of off-diagonal entries in any column.
    pub fn max_column_fill(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// u = v T.
    pub fn apply(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.block_len {
            return Err(Error::LengthMismatch {
                expected: self.block_len,
                got: v.len(),
            });
        }
        let mut u = v.clone();
        for (i, col) in self.cols.iter().enumerate() {
            let mut bit = u.get(i);
            for &k in col {
                bit ^= v.get(k as usize);
            }
            u.set(i, bit);
        }
        Ok(u)
    }

    /// The u-domain value forced at position `i` when v_i is frozen to
    /// zero, given the v-domain prefix decided so far: the sum of
    /// T[k,i] v_k over k < i. The pure polar case returns 0.
    pub fn dynamic_frozen_value(&self, v_prefix: &BitVec, i: usize) -> bool {
        let mut bit = false;
        for &k in &self.cols[i] {
            debug_assert!((k as usize) < i && (k as usize) < v_prefix.len());
            bit ^= v_prefix.get(k as usize);
        }
        bit
    }

    /// Dense rows of T, for oracle comparisons.
    pub fn dense_rows(&self) -> Vec<BitVec> {
        let mut rows: Vec<BitVec> = (0..self.block_len)
            .map(|r| BitVec::unit(self.block_len, r))
            .collect();
        for (i, col) in self.cols.iter().enumerate() {
            for &k in col {
                rows[k as usize].set(i, true);
            }
        }
        rows
    }

    fn from_dense_rows(rows: &[BitVec]) -> Result<Self> {
        let n = rows.len();
        let mut cols = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for c in 0..n {
                if row.get(c) {
                    match c.cmp(&r) {
                        std::cmp::Ordering::Less => {
                            return Err(Error::Infeasible(format!(
                                "pre-transform has a lower-triangular entry at ({r},{c})"
                            )))
                        }
                        std::cmp::Ordering::Equal => {}
                        std::cmp::Ordering::Greater => cols[c].push(r as u32),
                    }
                }
            }
            if !row.get(r) {
                return Err(Error::Infeasible(format!(
                    "pre-transform has a zero diagonal at {r}"
                )));
            }
        }
        for col in &mut cols {
            col.sort_unstable();
        }
        Ok(PreTransform { block_len: n, cols })
    }

    /// Embeds the transposed kernel of size `positions.len()` on the
    /// given ascending global positions: T[p_r, p_c] = G[c][r], an
    /// upper-triangular block since G is lower triangular.
    fn add_kernel_block(&mut self, positions: &[usize]) -> Result<()> {
        let m = positions.len();
        if !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(m));
        }
        for c in 0..m {
            for r in 0..c {
                // G[c][r] = 1 iff supp(r) subset of supp(c)
                if r & c == r {
                    let row = positions[r] as u32;
                    let col = positions[c];
                    if self.cols[col].contains(&row) {
                        return Err(Error::Infeasible(format!(
                            "overlapping pre-transform entry at ({row},{col})"
                        )));
                    }
                    self.cols[col].push(row);
                }
            }
        }
        Ok(())
    }
}

/// Assembles the pre-transform of a code spec.
///
/// Identity plus, per family: the local transposed kernels on each
/// connection set and a 2x2 block per merged pair (spp), the
/// upper-triangular Toeplitz matrix of the convolution polynomial (pac),
/// or the serial composition of the nested chain kernels (deep polar).
pub fn assemble_pretransform(spec: &CodeSpec) -> Result<PreTransform> {
    spec.validate()?;
    let n = spec.block_len;
    match spec.family {
        Family::Polar | Family::CaPolar => Ok(PreTransform::identity(n)),
        Family::Spp => {
            let mut t = PreTransform::identity(n);
            for layer in &spec.profile.layers {
                t.add_kernel_block(&layer.connections)?;
            }
            for &(i, j) in &spec.merged_pairs {
                t.add_kernel_block(&[i, j])?;
            }
            for col in &mut t.cols {
                col.sort_unstable();
            }
            Ok(t)
        }
        Family::Pac => {
            let poly = spec
                .conv_poly
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("missing convolution polynomial".into()))?;
            let mut t = PreTransform::identity(n);
            for i in 0..n {
                for (d, &c) in poly.iter().enumerate().skip(1) {
                    if c == 1 && d <= i {
                        t.cols[i].push((i - d) as u32);
                    }
                }
                t.cols[i].sort_unstable();
            }
            Ok(t)
        }
        Family::DeepPolar => {
            let chain = spec
                .deep_chain
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("missing deep chain".into()))?;
            // Serial composition: rows of T are the images of the unit
            // vectors under the chain, innermost kernel applied first.
            let mut rows: Vec<BitVec> =
                (0..n).map(|r| BitVec::unit(n, r)).collect();
            for layer in chain {
                let m = layer.size();
                let kernel = local_kernel_rows(m);
                for row in &mut rows {
                    apply_embedded_transposed_kernel(row, &layer.connections, &kernel);
                }
            }
            PreTransform::from_dense_rows(&rows)
        }
    }
}

/// Rows of the lower-triangular kernel G_m (row i has ones where the
/// column support is contained in i).
pub(crate) fn local_kernel_rows(m: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|i| (0..=i).filter(|&j| j & i == j).collect())
        .collect()
}

/// In-place x_{positions} = x_{positions} * G^T for the local kernel,
/// leaving all other coordinates untouched. Row j of the result is the
/// inner product of x with row j of G (restricted to the positions).
pub(crate) fn apply_embedded_transposed_kernel(
    x: &mut BitVec,
    positions: &[usize],
    kernel_rows: &[Vec<usize>],
) {
    let local: Vec<bool> = positions.iter().map(|&p| x.get(p)).collect();
    for (j, row) in kernel_rows.iter().enumerate() {
        let mut bit = false;
        for &c in row {
            bit ^= local[c];
        }
        x.set(positions[j], bit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{Layer, RateProfile};

    fn plain_spec(n: usize, info: Vec<usize>) -> CodeSpec {
        CodeSpec {
            family: Family::Polar,
            block_len: n,
            k: info.len(),
            profile: RateProfile {
                block_len: n,
                base_info: info,
                layers: Vec::new(),
            },
            merged_pairs: Vec::new(),
            crc_poly: None,
            conv_poly: None,
            deep_chain: None,
        }
    }

    #[test]
    fn plain_polar_gives_identity() {
        let t = assemble_pretransform(&plain_spec(8, vec![5, 6, 7])).unwrap();
        assert!(t.is_identity());
        assert_eq!(t.max_column_fill(), 0);
    }

    #[test]
    fn single_pair_has_one_entry() {
        let mut spec = plain_spec(8, vec![5, 6, 7]);
        spec.family = Family::Spp;
        spec.k = 4;
        spec.merged_pairs = vec![(2, 4)];
        let t = assemble_pretransform(&spec).unwrap();
        assert_eq!(t.column(4), &[2]);
        assert_eq!(
            t.cols.iter().map(Vec::len).sum::<usize>(),
            1,
            "exactly one off-diagonal entry"
        );
    }

    #[test]
    fn pair_forces_dynamic_frozen_copy() {
        let mut spec = plain_spec(8, vec![5, 6, 7]);
        spec.family = Family::Spp;
        spec.k = 4;
        spec.merged_pairs = vec![(2, 4)];
        let t = assemble_pretransform(&spec).unwrap();
        let mut v = BitVec::zeros(8);
        v.set(2, true);
        assert!(t.dynamic_frozen_value(&v, 4));
        let u = t.apply(&v).unwrap();
        assert!(u.get(2) && u.get(4));
    }

    #[test]
    fn identity_frozen_value_is_zero() {
        let t = PreTransform::identity(8);
        let mut v = BitVec::zeros(8);
        v.set(1, true);
        for i in 2..8 {
            assert!(!t.dynamic_frozen_value(&v, i));
        }
    }

    #[test]
    fn inverse_recursion_matches_dense_inverse() {
        // v = u T^{-1} recovered by the column recursion must agree with
        // a dense Gauss-Jordan inverse.
        let mut spec = plain_spec(16, vec![11, 13, 14, 15]);
        spec.family = Family::Spp;
        spec.profile.layers = vec![Layer {
            connections: vec![6, 9, 10, 12],
            local_info: vec![0, 1],
        }];
        spec.k = 7;
        spec.merged_pairs = vec![(3, 5)];
        let t = assemble_pretransform(&spec).unwrap();

        // dense inverse over GF(2)
        let rows = t.dense_rows();
        let n = 16;
        let mut aug: Vec<(BitVec, BitVec)> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVec::unit(n, i)))
            .collect();
        for col in 0..n {
            assert!(aug[col].0.get(col), "unit diagonal expected");
            for r in 0..n {
                if r != col && aug[r].0.get(col) {
                    let src = aug[col].clone();
                    aug[r].0.xor_assign(&src.0);
                    aug[r].1.xor_assign(&src.1);
                }
            }
        }
        let inv_rows: Vec<BitVec> = aug.into_iter().map(|(_, inv)| inv).collect();

        let mut u = BitVec::zeros(n);
        for i in [1, 3, 6, 9, 13] {
            u.set(i, true);
        }
        // dense: v = u T^{-1}
        let mut v_dense = BitVec::zeros(n);
        for i in 0..n {
            if u.get(i) {
                v_dense.xor_assign(&inv_rows[i]);
            }
        }
        // recursion: v_i = u_i + sum T[k,i] v_k
        let mut v_rec = BitVec::zeros(n);
        for i in 0..n {
            let mut bit = u.get(i);
            bit ^= t.dynamic_frozen_value(&v_rec, i);
            v_rec.set(i, bit);
        }
        assert_eq!(v_dense, v_rec);
        // and forward application round-trips
        assert_eq!(t.apply(&v_rec).unwrap(), u);
    }
}
