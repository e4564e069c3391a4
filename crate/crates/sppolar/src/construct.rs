//! Code construction: rate profiling with local kernel layers,
//! row-merging pair selection, and the minimum-weight coset counting
//! that justifies both.

use crate::bits::support;
use crate::partial_order::dominates;
use crate::reliability::Reliability;
use crate::transform;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One local pre-transform layer: `connections` is the global index set
/// the layer's output occupies (ascending), `local_info` the information
/// positions inside the local kernel of size `connections.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(rename = "A")]
    pub connections: Vec<usize>,
    #[serde(rename = "I")]
    pub local_info: Vec<usize>,
}

impl Layer {
    pub fn size(&self) -> usize {
        self.connections.len()
    }

    pub fn info_len(&self) -> usize {
        self.local_info.len()
    }
}

/// Partition of [0, N) into the frozen set, the base information set and
/// the connection sets of the local layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateProfile {
    #[serde(rename = "N")]
    pub block_len: usize,
    #[serde(rename = "I0")]
    pub base_info: Vec<usize>,
    #[serde(default, rename = "layers")]
    pub layers: Vec<Layer>,
}

impl RateProfile {
    /// Plain profile: the K most reliable indices, no layers.
    pub fn plain(reliability: &Reliability, k: usize) -> Result<Self> {
        if k > reliability.len() {
            return Err(Error::Infeasible(format!(
                "K={k} exceeds N={}",
                reliability.len()
            )));
        }
        Ok(RateProfile {
            block_len: reliability.len(),
            base_info: reliability.top_k(k),
            layers: Vec::new(),
        })
    }

    /// Total number of information bits carried by base set and layers.
    pub fn info_len(&self) -> usize {
        self.base_info.len() + self.layers.iter().map(Layer::info_len).sum::<usize>()
    }

    /// The frozen set F_0: indices in no connection set and not in I_0.
    pub fn frozen(&self) -> Vec<usize> {
        let mut used = vec![false; self.block_len];
        for &i in &self.base_info {
            used[i] = true;
        }
        for layer in &self.layers {
            for &i in &layer.connections {
                used[i] = true;
            }
        }
        (0..self.block_len).filter(|&i| !used[i]).collect()
    }

    /// Checks the partition invariants: disjointness, ranges, ascending
    /// connection sets, local info sets within bounds.
    pub fn validate(&self) -> Result<()> {
        let mut used = vec![false; self.block_len];
        let mut mark = |i: usize| -> Result<()> {
            if i >= self.block_len {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.block_len,
                });
            }
            if used[i] {
                return Err(Error::Infeasible(format!("index {i} used twice in profile")));
            }
            used[i] = true;
            Ok(())
        };
        for &i in &self.base_info {
            mark(i)?;
        }
        for layer in &self.layers {
            if !layer.size().is_power_of_two() {
                return Err(Error::NotPowerOfTwo(layer.size()));
            }
            if !layer.connections.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Infeasible(
                    "connection set not strictly ascending".into(),
                ));
            }
            for &i in &layer.connections {
                mark(i)?;
            }
            if layer.local_info.is_empty() || layer.info_len() > layer.size() {
                return Err(Error::Infeasible("bad local information set".into()));
            }
            for &j in &layer.local_info {
                if j >= layer.size() {
                    return Err(Error::IndexOutOfRange {
                        index: j,
                        n: layer.size(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Row-merging pairs: `(info, merged)` with `info < merged`; the merged
/// index is a frozen index outside every connection set.
pub type MergedPair = (usize, usize);

/// The set K_i: information indices j > i whose binary support exceeds
/// that of i by exactly one element. Each subset of K_i yields a
/// distinct minimum-weight codeword in the coset led by row i.
pub fn coset_core_indices(i: usize, info: &BTreeSet<usize>, block_len: usize) -> Result<BTreeSet<usize>> {
    if i >= block_len {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: block_len,
        });
    }
    let si: BTreeSet<usize> = support(i).into_iter().collect();
    Ok(info
        .iter()
        .copied()
        .filter(|&j| j > i && support(j).iter().filter(|k| !si.contains(k)).count() == 1)
        .collect())
}

/// Per-coset contribution to the lower bound on the number of
/// minimum-weight codewords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetCount {
    pub leader: usize,
    pub core_len: usize,
    pub count: u64,
}

/// Lower bound on the number of minimum-weight codewords: each leader i
/// with minimal row weight contributes 2^|K_i|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetReport {
    pub min_weight: usize,
    pub cosets: Vec<CosetCount>,
    pub total: u64,
}

pub fn min_weight_lower_bound(info: &BTreeSet<usize>, block_len: usize) -> Result<CosetReport> {
    if info.is_empty() {
        return Err(Error::InvalidParameter("empty information set".into()));
    }
    let min_weight = info
        .iter()
        .map(|&i| transform::row_weight(i, block_len))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .unwrap();
    let mut cosets = Vec::new();
    let mut total = 0u64;
    for &i in info {
        if transform::row_weight(i, block_len)? == min_weight {
            let core = coset_core_indices(i, info, block_len)?;
            let count = 1u64 << core.len();
            total += count;
            cosets.push(CosetCount {
                leader: i,
                core_len: core.len(),
                count,
            });
        }
    }
    Ok(CosetReport {
        min_weight,
        cosets,
        total,
    })
}

/// Predicted reduction in the minimum-weight count when swapping the
/// frozen minimum-weight row `frozen_idx` into the information set while
/// freezing the information minimum-weight row `info_idx`.
///
/// Returns the gain
///   (sum over x in D_j of 2^{|K_x|-1}) + 2^{|K_j|} - 2^{|K_i|-1}
/// when it is a positive integer, where j = info_idx, i = frozen_idx and
/// D_j collects the minimum-weight information leaders whose core set
/// contains j. Degenerate inputs with |K_i| = 0 are rejected: the
/// half-count 2^{|K_i|-1} is meaningless for codeword counting.
pub fn swap_gain(
    frozen_idx: usize,
    info_idx: usize,
    info: &BTreeSet<usize>,
    block_len: usize,
) -> Result<Option<i64>> {
    let min_weight = info
        .iter()
        .map(|&i| transform::row_weight(i, block_len))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::InvalidParameter("empty information set".into()))?;
    if transform::row_weight(frozen_idx, block_len)? != min_weight
        || transform::row_weight(info_idx, block_len)? != min_weight
    {
        return Err(Error::InvalidParameter(
            "swap candidates must both have minimal row weight".into(),
        ));
    }
    if info.contains(&frozen_idx) || !info.contains(&info_idx) {
        return Err(Error::InvalidParameter(
            "expected a frozen index and an information index".into(),
        ));
    }
    let k_i = coset_core_indices(frozen_idx, info, block_len)?;
    if k_i.is_empty() {
        return Ok(None);
    }
    let k_j = coset_core_indices(info_idx, info, block_len)?;
    let mut gain: i64 = 1 << k_j.len();
    for &x in info {
        if transform::row_weight(x, block_len)? != min_weight {
            continue;
        }
        let k_x = coset_core_indices(x, info, block_len)?;
        if k_x.contains(&info_idx) {
            debug_assert!(!k_x.is_empty());
            gain += 1 << (k_x.len() - 1);
        }
    }
    gain -= 1 << (k_i.len() - 1);
    Ok(if gain > 0 { Some(gain) } else { None })
}

/// Builds a rate profile with local pre-transform layers.
///
/// `layer_dims` lists (N_l, K_l) per layer. The union of connection
/// sets is drawn from the K_0 + sum(N_l) most reliable indices,
/// filling from the minimum-row-weight stratum least-reliable-first and
/// doubling the weight when a stratum is exhausted. The filled set is
/// sorted ascending and cut consecutively into the per-layer connection
/// sets. Local information sets pick the K_l local indices with the
/// largest transposed-kernel row weight (fewest support bits), ties to
/// the smaller index.
pub fn rate_profile(
    reliability: &Reliability,
    base_info_len: usize,
    layer_dims: &[(usize, usize)],
) -> Result<RateProfile> {
    let block_len = reliability.len();
    let needed: usize = layer_dims.iter().map(|&(nl, _)| nl).sum();
    if base_info_len + needed > block_len {
        return Err(Error::Infeasible(format!(
            "K0 + sum(N_l) = {} exceeds N = {block_len}",
            base_info_len + needed
        )));
    }
    for &(nl, kl) in layer_dims {
        if !nl.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(nl));
        }
        if kl == 0 || kl > nl {
            return Err(Error::Infeasible(format!(
                "layer information length {kl} invalid for size {nl}"
            )));
        }
        if nl > block_len {
            return Err(Error::Infeasible(format!(
                "layer size {nl} exceeds N = {block_len}"
            )));
        }
    }

    // Most reliable K0 + n_p indices, kept in ascending reliability so
    // "least reliable first" is a prefix scan.
    let take = base_info_len + needed;
    let selected: Vec<usize> = reliability.order()[block_len - take..].to_vec();

    let mut aux: Vec<usize> = Vec::with_capacity(needed);
    if needed > 0 {
        let mut weight = selected
            .iter()
            .map(|&i| transform::row_weight(i, block_len))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap();
        let mut remaining = needed;
        while remaining > 0 {
            let stratum: Vec<usize> = selected
                .iter()
                .copied()
                .filter(|&i| transform::row_weight(i, block_len).unwrap() == weight)
                .collect();
            let take_now = remaining.min(stratum.len());
            aux.extend_from_slice(&stratum[..take_now]);
            remaining -= take_now;
            if weight > 2 * block_len {
                return Err(Error::Infeasible(
                    "weight strata exhausted before filling connection sets".into(),
                ));
            }
            weight *= 2;
        }
    }

    let aux_set: BTreeSet<usize> = aux.iter().copied().collect();
    let mut base_info: Vec<usize> = selected
        .iter()
        .copied()
        .filter(|i| !aux_set.contains(i))
        .collect();
    base_info.sort_unstable();

    let mut aux_sorted: Vec<usize> = aux;
    aux_sorted.sort_unstable();

    let mut layers = Vec::with_capacity(layer_dims.len());
    let mut cursor = 0;
    for &(nl, kl) in layer_dims {
        let connections = aux_sorted[cursor..cursor + nl].to_vec();
        cursor += nl;
        layers.push(Layer {
            connections,
            local_info: local_kernel_info(nl, kl),
        });
    }

    let profile = RateProfile {
        block_len,
        base_info,
        layers,
    };
    profile.validate()?;
    Ok(profile)
}

/// Local information set of a kernel of size `nl`: the `kl` indices with
/// the largest transposed-kernel row weight 2^{log2(nl) - |S_i|}, ties
/// to the smaller index.
fn local_kernel_info(nl: usize, kl: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..nl).collect();
    idx.sort_by_key(|&i| (support(i).len(), i));
    let mut info: Vec<usize> = idx[..kl].to_vec();
    info.sort_unstable();
    info
}

/// Greedy row-merging pair selection over the minimum-weight rows of the
/// base information set.
///
/// Three passes in ascending leader order. Pass 0 merges leader i with
/// the first eligible subsequent frozen j whose row weight is at least
/// the minimum weight; pass 1 requires wt(g_i + g_j) to exceed the
/// minimum weight; pass 2 accepts wt(g_i + g_j) equal to it. Eligible
/// means j > i, j outside every connection set and the base set, and not
/// already merged. A merged leader leaves the base set: the pair becomes
/// a 2x2 local block carrying its bit.
pub fn select_type2_pairs(profile: &RateProfile, _reliability: &Reliability) -> Result<(RateProfile, Vec<MergedPair>)> {
    profile.validate()?;
    let block_len = profile.block_len;
    let mut base: BTreeSet<usize> = profile.base_info.iter().copied().collect();
    let mut blocked = vec![false; block_len];
    for &i in &profile.base_info {
        blocked[i] = true;
    }
    for layer in &profile.layers {
        for &i in &layer.connections {
            blocked[i] = true;
        }
    }

    if base.is_empty() {
        return Ok((profile.clone(), Vec::new()));
    }
    let min_weight = base
        .iter()
        .map(|&i| transform::row_weight(i, block_len))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .unwrap();
    let mut leaders: Vec<usize> = base
        .iter()
        .copied()
        .filter(|&i| transform::row_weight(i, block_len).unwrap() == min_weight)
        .collect();

    let mut pairs: Vec<MergedPair> = Vec::new();
    let mut merged_target = vec![false; block_len];

    for state in 0..3u8 {
        let mut still_unpaired = Vec::new();
        for &leader in &leaders {
            let leader_row = transform::transform_row(leader, block_len)?;
            let mut chosen = None;
            for j in leader + 1..block_len {
                if blocked[j] || merged_target[j] {
                    continue;
                }
                let ok = match state {
                    0 => transform::row_weight(j, block_len)? >= min_weight,
                    1 => {
                        let sum = leader_row.xor(&transform::transform_row(j, block_len)?)?;
                        sum.weight() > min_weight
                    }
                    _ => {
                        let sum = leader_row.xor(&transform::transform_row(j, block_len)?)?;
                        sum.weight() == min_weight
                    }
                };
                if ok {
                    chosen = Some(j);
                    break;
                }
            }
            if let Some(j) = chosen {
                pairs.push((leader, j));
                merged_target[j] = true;
                base.remove(&leader);
            } else {
                still_unpaired.push(leader);
            }
        }
        leaders = still_unpaired;
        if leaders.is_empty() {
            break;
        }
    }

    let reduced = RateProfile {
        block_len,
        base_info: base.into_iter().collect(),
        layers: profile.layers.clone(),
    };
    Ok((reduced, pairs))
}

/// Checks the pre-transform elimination condition for a merged pair:
/// true when adding row j to any codeword of the coset led by row i
/// must raise the weight above the minimum.
///
/// Every row that can participate in a minimum-weight formation for
/// leader i dominates i in the universal partial order, so merging a
/// subsequent row j is guaranteed to eliminate the coset's
/// minimum-weight codewords whenever j does not dominate i. For j < i
/// the word c + g_j falls into the coset led by j and no guarantee
/// exists (g_3 + g_5 already has minimal weight at N = 8), so the check
/// is false there. The trivial pair (i, i) is accepted.
pub fn merge_removes_min_weight(
    i: usize,
    j: usize,
    info: &BTreeSet<usize>,
    block_len: usize,
) -> Result<bool> {
    let min_weight = info
        .iter()
        .map(|&x| transform::row_weight(x, block_len))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::InvalidParameter("empty information set".into()))?;
    if transform::row_weight(i, block_len)? != min_weight {
        return Err(Error::InvalidParameter(format!(
            "leader {i} does not have minimal row weight {min_weight}"
        )));
    }
    if transform::row_weight(j, block_len)? < min_weight {
        return Err(Error::InvalidParameter(format!(
            "merged row {j} has weight below the minimum {min_weight}"
        )));
    }
    Ok(i == j || (j > i && !dominates(j, i)))
}
