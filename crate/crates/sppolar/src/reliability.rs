//! Bit-channel reliability metrics for the three construction channels:
//! the exact BEC erasure recursion, the Gaussian approximation for the
//! BI-AWGN channel, and a channel-independent rank sequence loaded from
//! a file.

use crate::{Error, Result};
use std::path::Path;

/// Per-index reliability metrics together with the induced ordering.
///
/// `order` is a permutation of [0, N) from least to most reliable; ties
/// in the metric are broken by the smaller index first, everywhere.
#[derive(Debug, Clone)]
pub struct Reliability {
    values: Vec<f64>,
    order: Vec<usize>,
}

impl Reliability {
    fn from_values(values: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .expect("reliability metrics are finite")
                .then(a.cmp(&b))
        });
        Reliability { values, order }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Metric for one index (capacity for the BEC, mean LLR for the
    /// Gaussian approximation, rank for a loaded sequence).
    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Permutation of [0, N) from least to most reliable.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The K most reliable indices, ascending by index.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut set: Vec<usize> = self.order[self.len() - k..].to_vec();
        set.sort_unstable();
        set
    }
}

/// Exact bit-channel capacities for the BEC via the erasure-probability
/// recursion: a 0-bit of the index maps z to 2z - z^2 and a 1-bit maps
/// z to z^2, applied from the most significant bit inward. The capacity
/// of index i is 1 - z_i.
pub fn bec_reliability(stages: usize, eps: f64) -> Result<Reliability> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "erasure probability must lie in (0,1), got {eps}"
        )));
    }
    let n = 1usize << stages;
    let mut z = vec![eps];
    for _ in 0..stages {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &zi in &z {
            next.push(2.0 * zi - zi * zi);
            next.push(zi * zi);
        }
        z = next;
    }
    debug_assert_eq!(z.len(), n);
    Ok(Reliability::from_values(
        z.into_iter().map(|zi| 1.0 - zi).collect(),
    ))
}

/// Mean-LLR reliabilities for the BI-AWGN channel via the Gaussian
/// approximation.
///
/// The density-evolution messages are approximated as N(m, 2m); the
/// variable-node (better) branch doubles the mean and the check-node
/// (worse) branch evolves through the two-segment phi approximation
///
///   phi(x) = exp(-0.4527 x^0.86 + 0.0218)                 (small x)
///   phi(x) = sqrt(pi/x) exp(-x/4) (1 - 10/(7x))           (large x)
///
/// with m_worse = phi^{-1}(1 - (1 - phi(m))^2), inverted numerically.
/// The large-x segment takes over where it first drops below the
/// small-x one (near x = 14.2; at the textbook x = 10 the segments
/// cross in the wrong direction, which would break monotonicity), and
/// the first segment is capped at 1. Below m = 0.3 the check update
/// uses the asymptote m^2/2: there the phi formula saturates and would
/// order deeply degraded channels against the universal partial order.
/// The channel mean is 4 R 10^{EbN0/10} for code rate R.
pub fn ga_reliability(stages: usize, design_ebn0_db: f64, rate: f64) -> Result<Reliability> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rate must lie in (0,1], got {rate}"
        )));
    }
    let m0 = 4.0 * rate * 10f64.powf(design_ebn0_db / 10.0);
    let mut m = vec![m0];
    for _ in 0..stages {
        let mut next = Vec::with_capacity(m.len() * 2);
        for &mi in &m {
            next.push(ga_check_mean(mi));
            next.push(2.0 * mi);
        }
        m = next;
    }
    Ok(Reliability::from_values(m))
}

fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let small = (-0.4527 * x.powf(0.86) + 0.0218).exp().min(1.0);
    if x < 10.0 {
        small
    } else {
        let large = (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x));
        small.min(large)
    }
}

/// phi^{-1} by bisection; phi is non-increasing on [0, inf).
fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while phi(hi) > y {
        hi *= 2.0;
        if hi > 1e9 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ln_phi_large(x: f64) -> f64 {
    0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (-10.0 / (7.0 * x)).ln_1p()
}

fn ga_check_mean(m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    if m < 0.3 {
        return 0.5 * m * m;
    }
    let p = phi(m);
    if p < 1e-30 {
        // deep tail: 1 - (1-p)^2 = p(2-p) ~ 2p; solve ln phi(x) = ln 2p
        // entirely in the log domain so nothing underflows
        let target = std::f64::consts::LN_2 + ln_phi_large(m);
        let mut lo = 10.0f64;
        let mut hi = m + 64.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ln_phi_large(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    // numerically safe form of 1 - (1-p)^2
    let target = p * (2.0 - p);
    phi_inv(target)
}

/// Maximum block length supported by a loaded reliability sequence.
pub const SEQUENCE_LEN: usize = 1024;

/// Loads a channel-independent reliability sequence from a plain-text
/// file (one integer per line, a permutation of [0, 1024)) and restricts
/// it to block length `block_len`: entries >= block_len are dropped and
/// the relative order is preserved. The metric assigned to each index is
/// its rank in the restricted sequence.
pub fn load_sequence_file<P: AsRef<Path>>(path: P, block_len: usize) -> Result<Reliability> {
    let text = std::fs::read_to_string(path)?;
    sequence_from_text(&text, block_len)
}

/// Same as [`load_sequence_file`] but from in-memory text.
pub fn sequence_from_text(text: &str, block_len: usize) -> Result<Reliability> {
    if !block_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(block_len));
    }
    if block_len > SEQUENCE_LEN {
        return Err(Error::InvalidParameter(format!(
            "block length {block_len} exceeds the sequence length {SEQUENCE_LEN}"
        )));
    }
    let mut entries = Vec::with_capacity(SEQUENCE_LEN);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line.parse().map_err(|_| {
            Error::MalformedSequence(format!("line {}: not an integer: {line:?}", lineno + 1))
        })?;
        entries.push(v);
    }
    if entries.len() != SEQUENCE_LEN {
        return Err(Error::MalformedSequence(format!(
            "expected {SEQUENCE_LEN} entries, found {}",
            entries.len()
        )));
    }
    let mut seen = vec![false; SEQUENCE_LEN];
    for &v in &entries {
        if v >= SEQUENCE_LEN {
            return Err(Error::MalformedSequence(format!("entry {v} out of range")));
        }
        if seen[v] {
            return Err(Error::MalformedSequence(format!("duplicate entry {v}")));
        }
        seen[v] = true;
    }
    let restricted: Vec<usize> = entries.into_iter().filter(|&v| v < block_len).collect();
    let mut values = vec![0.0; block_len];
    for (rank, &idx) in restricted.iter().enumerate() {
        values[idx] = rank as f64;
    }
    Ok(Reliability::from_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partial_order::strictly_dominates;

    #[test]
    fn bec_no_polarization() {
        let r = bec_reliability(0, 0.5).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.value(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bec_single_step() {
        // one-step erasure recursion at eps = 0.5
        let r = bec_reliability(1, 0.5).unwrap();
        assert!((r.value(0) - 0.25).abs() < 1e-15);
        assert!((r.value(1) - 0.75).abs() < 1e-15);
        assert_eq!(r.order(), &[0, 1]);
    }

    #[test]
    fn bec_rejects_bad_eps() {
        assert!(bec_reliability(3, 0.0).is_err());
        assert!(bec_reliability(3, 1.0).is_err());
    }

    #[test]
    fn bec_example_top8_at_n16() {
        // 0-based {7,9,10,11,12,13,14,15}
        let r = bec_reliability(4, 0.5).unwrap();
        assert_eq!(r.top_k(8), vec![7, 9, 10, 11, 12, 13, 14, 15]);
    }

    #[test]
    fn bec_capacity_conservation() {
        for (stages, eps) in [(4usize, 0.5f64), (6, 0.3), (8, 0.7)] {
            let r = bec_reliability(stages, eps).unwrap();
            let total: f64 = (0..r.len()).map(|i| r.value(i)).sum();
            let expected = (1u64 << stages) as f64 * (1.0 - eps);
            assert!(
                (total - expected).abs() < 1e-12,
                "stages={stages} eps={eps}: {total} vs {expected}"
            );
        }
    }

    #[test]
    fn ga_channel_mean_without_split() {
        let r = ga_reliability(0, 2.0, 0.5).unwrap();
        let expected = 4.0 * 0.5 * 10f64.powf(0.2);
        assert!((r.value(0) - expected).abs() < 1e-12);
    }

    #[test]
    fn ga_n4_respects_forced_order() {
        let r = ga_reliability(2, 1.0, 0.5).unwrap();
        assert_eq!(r.order()[0], 0);
        assert_eq!(r.order()[3], 3);
    }

    #[test]
    fn ga_and_bec_agree_on_partial_order_comparable_pairs() {
        let ga = ga_reliability(7, 2.0, 0.5).unwrap();
        let bec = bec_reliability(7, 0.5).unwrap();
        for i in 0..128 {
            for j in 0..128 {
                if strictly_dominates(i, j) {
                    assert!(ga.value(i) >= ga.value(j), "GA violates order at ({i},{j})");
                    assert!(bec.value(i) >= bec.value(j), "BEC violates order at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn ga_deep_tail_respects_partial_order() {
        // high design SNR at n=10 pushes means past the underflow range
        // of the phi formula; the log-domain tail must keep the order
        let ga = ga_reliability(10, 6.0, 0.5).unwrap();
        for i in 0..1024 {
            for j in 0..1024 {
                if strictly_dominates(i, j) {
                    assert!(
                        ga.value(i) >= ga.value(j),
                        "GA violates order at ({i},{j}): {} < {}",
                        ga.value(i),
                        ga.value(j)
                    );
                }
            }
        }
    }

    #[test]
    fn phi_inverse_round_trip() {
        // below ~0.03 the capped first segment sits at 1 and the inverse
        // is pinned to 0, so start above it
        for x in [0.05, 0.3, 1.0, 5.0, 9.9, 10.1, 40.0, 200.0] {
            let y = phi(x);
            let back = phi_inv(y);
            assert!((back - x).abs() / x < 1e-6, "x={x} back={back}");
        }
    }

    #[test]
    fn sequence_identity_restriction() {
        let text: String = (0..1024).map(|i| format!("{i}\n")).collect();
        let r = sequence_from_text(&text, 4).unwrap();
        assert_eq!(r.order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn sequence_rejects_duplicates_and_short_files() {
        let mut entries: Vec<usize> = (0..1024).collect();
        entries[10] = 9;
        let text: String = entries.iter().map(|i| format!("{i}\n")).collect();
        assert!(sequence_from_text(&text, 8).is_err());
        let text: String = (0..1000).map(|i| format!("{i}\n")).collect();
        assert!(sequence_from_text(&text, 8).is_err());
    }

    #[test]
    fn sequence_rejects_oversized_block() {
        let text: String = (0..1024).map(|i| format!("{i}\n")).collect();
        assert!(sequence_from_text(&text, 2048).is_err());
    }
}
