//! Weight-spectrum computation, the union bound, path-metric-range
//! summaries and the genie error-event split.

use crate::bits::BitVec;
use crate::codespec::CodeSpec;
use crate::decode::{DecodeOptions, MetricMode, PreparedCode};
use crate::sim::SimRecord;
use crate::transform::polar_transform;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Weight spectrum of a code: counts per Hamming weight, labelled exact
/// or estimated (with the list size used).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpectrum {
    pub counts: BTreeMap<usize, u64>,
    pub exactness: Exactness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    Estimated { list_size: usize },
}

impl WeightSpectrum {
    pub fn min_weight(&self) -> Option<usize> {
        self.counts.keys().copied().find(|&w| w > 0)
    }

    pub fn min_weight_count(&self) -> Option<u64> {
        self.min_weight().map(|w| self.counts[&w])
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Default guard on exhaustive enumeration size.
pub const EXHAUSTIVE_GUARD: usize = 28;

/// Exact weight spectrum by enumerating all 2^K codewords with a
/// Gray-code walk so each step flips a single message bit and XORs one
/// generator row.
pub fn weight_spectrum_exhaustive(spec: &CodeSpec) -> Result<WeightSpectrum> {
    weight_spectrum_exhaustive_guarded(spec, EXHAUSTIVE_GUARD)
}

pub fn weight_spectrum_exhaustive_guarded(
    spec: &CodeSpec,
    guard: usize,
) -> Result<WeightSpectrum> {
    let k = spec.k;
    if k > guard {
        return Err(Error::GuardExceeded { k, guard });
    }
    let code = PreparedCode::new(spec)?;
    let rows: Vec<BitVec> = (0..k)
        .map(|i| code.encode(&BitVec::unit(k, i)))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cw = code.encode(&BitVec::zeros(k))?;
    *counts.entry(cw.weight()).or_insert(0) += 1;
    for m in 1u64..(1u64 << k) {
        let flip = m.trailing_zeros() as usize;
        // Gray step: message m^(m>>1) differs from its predecessor in
        // exactly bit `flip`; CRC linearity keeps row XOR valid.
        cw.xor_assign(&rows[flip]);
        *counts.entry(cw.weight()).or_insert(0) += 1;
    }
    Ok(WeightSpectrum {
        counts,
        exactness: Exactness::Exact,
    })
}

/// Minimum-weight estimate via list decoding of the noiseless all-zero
/// transmission: run the list decoder with a large `list_size` and no
/// final selection, re-encode every surviving path, and report the
/// minimum nonzero codeword weight seen together with its multiplicity.
///
/// The reported weight is an upper bound on the true minimum distance
/// and the count a lower bound on the multiplicity at that weight.
/// Returns None when the final list holds no nonzero codeword.
pub fn min_weight_estimate_scl(
    spec: &CodeSpec,
    list_size: usize,
) -> Result<Option<(usize, u64)>> {
    if list_size < 2 {
        return Err(Error::InvalidParameter(
            "minimum-weight estimation needs a list size of at least 2".into(),
        ));
    }
    let code = PreparedCode::new(spec)?;
    let llr = vec![crate::channel::LLR_CLAMP; spec.block_len];
    let opts = DecodeOptions {
        mode: MetricMode::Approx,
        ..Default::default()
    };
    let result = code.decode(&llr, list_size, &opts)?;
    let mut min_weight = usize::MAX;
    let mut count = 0u64;
    for path in &result.list {
        let cw = polar_transform(&path.input)?;
        let w = cw.weight();
        if w == 0 {
            continue;
        }
        match w.cmp(&min_weight) {
            std::cmp::Ordering::Less => {
                min_weight = w;
                count = 1;
            }
            std::cmp::Ordering::Equal => count += 1,
            std::cmp::Ordering::Greater => {}
        }
    }
    Ok(if count == 0 {
        None
    } else {
        Some((min_weight, count))
    })
}

/// Q-function: upper tail of the standard normal distribution.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Union bound on the maximum-likelihood block error rate:
/// sum over d of A_d Q(sqrt(2 d R Eb/N0)) per Eb/N0 point.
pub fn union_bound(spectrum: &WeightSpectrum, rate: f64, ebn0_db: &[f64]) -> Vec<f64> {
    ebn0_db
        .iter()
        .map(|&snr| {
            let ebn0 = 10f64.powf(snr / 10.0);
            spectrum
                .counts
                .iter()
                .filter(|&(&d, _)| d > 0)
                .map(|(&d, &a)| a as f64 * q_function((2.0 * d as f64 * rate * ebn0).sqrt()))
                .sum()
        })
        .collect()
}

/// Mean path-metric range per decoding step across a collection of
/// traces from identical decoder configurations.
pub fn path_metric_range(traces: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    let Some(first) = traces.first() else {
        return Err(Error::InvalidParameter("no traces given".into()));
    };
    let steps = first.len();
    if traces.iter().any(|t| t.len() != steps) {
        return Err(Error::InvalidParameter(
            "traces come from different specs".into(),
        ));
    }
    let mut means = vec![0.0; steps];
    for trace in traces {
        for (i, metrics) in trace.iter().enumerate() {
            let max = metrics.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = metrics.iter().cloned().fold(f64::INFINITY, f64::min);
            means[i] += max - min;
        }
    }
    for m in &mut means {
        *m /= traces.len() as f64;
    }
    Ok(means)
}

/// Splits a genie-instrumented simulation record into the two exclusive
/// error probabilities: the transmitted path missing from the final
/// list, and present but out-scored.
pub fn error_event_split(record: &SimRecord) -> Result<(f64, f64, f64)> {
    if !record.genie {
        return Err(Error::InvalidParameter(
            "error-event split requires genie instrumentation".into(),
        ));
    }
    let trials = record.trials as f64;
    let p_e1 = record.e1 as f64 / trials;
    let p_e2 = record.e2 as f64 / trials;
    Ok((p_e1, p_e2, p_e1 + p_e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespec::Family;
    use crate::construct::{Layer, RateProfile};

    fn polar_16_8() -> CodeSpec {
        CodeSpec {
            family: Family::Polar,
            block_len: 16,
            k: 8,
            profile: RateProfile {
                block_len: 16,
                base_info: vec![7, 9, 10, 11, 12, 13, 14, 15],
                layers: Vec::new(),
            },
            merged_pairs: vec![],
            crc_poly: None,
            conv_poly: None,
            deep_chain: None,
        }
    }

    fn spp_16_8() -> CodeSpec {
        CodeSpec {
            family: Family::Spp,
            block_len: 16,
            k: 8,
            profile: RateProfile {
                block_len: 16,
                base_info: vec![7, 10, 11, 12, 13, 14, 15],
                layers: vec![Layer {
                    connections: vec![6, 9],
                    local_info: vec![0],
                }],
            },
            merged_pairs: vec![],
            crc_poly: None,
            conv_poly: None,
            deep_chain: None,
        }
    }

    #[test]
    fn spectrum_polar_16_8() {
        let s = weight_spectrum_exhaustive(&polar_16_8()).unwrap();
        let expected: BTreeMap<usize, u64> =
            [(0, 1), (4, 28), (8, 198), (12, 28), (16, 1)].into();
        assert_eq!(s.counts, expected);
    }

    #[test]
    fn spectrum_spp_16_8() {
        let s = weight_spectrum_exhaustive(&spp_16_8()).unwrap();
        let expected: BTreeMap<usize, u64> = [
            (0, 1),
            (4, 12),
            (6, 64),
            (8, 102),
            (10, 64),
            (12, 12),
            (16, 1),
        ]
        .into();
        assert_eq!(s.counts, expected);
    }

    #[test]
    fn spectrum_basics_hold() {
        let s = weight_spectrum_exhaustive(&spp_16_8()).unwrap();
        assert_eq!(s.counts[&0], 1);
        assert_eq!(s.total(), 1 << 8);
        assert_eq!(s.min_weight(), Some(4));
        assert_eq!(s.min_weight_count(), Some(12));
    }

    #[test]
    fn spectrum_guard() {
        let mut spec = polar_16_8();
        spec.k = 8;
        assert!(weight_spectrum_exhaustive_guarded(&spec, 4).is_err());
    }

    #[test]
    fn scl_estimate_matches_exhaustive_on_small_code() {
        let spec = spp_16_8();
        let est = min_weight_estimate_scl(&spec, 1 << 8).unwrap().unwrap();
        assert_eq!(est, (4, 12));
    }

    #[test]
    fn scl_estimate_none_for_all_frozen() {
        let spec = CodeSpec {
            family: Family::Polar,
            block_len: 8,
            k: 0,
            profile: RateProfile {
                block_len: 8,
                base_info: vec![],
                layers: vec![],
            },
            merged_pairs: vec![],
            crc_poly: None,
            conv_poly: None,
            deep_chain: None,
        };
        assert_eq!(min_weight_estimate_scl(&spec, 4).unwrap(), None);
    }

    #[test]
    fn union_bound_empty_and_single_term() {
        let empty = WeightSpectrum {
            counts: [(0usize, 1u64)].into(),
            exactness: Exactness::Exact,
        };
        assert_eq!(union_bound(&empty, 0.5, &[0.0]), vec![0.0]);

        let single = WeightSpectrum {
            counts: [(4usize, 1u64)].into(),
            exactness: Exactness::Exact,
        };
        // A_4 = 1, R = 0.5, Eb/N0 = 0 dB: Q(sqrt(2*4*0.5)) = Q(2)
        let b = union_bound(&single, 0.5, &[0.0]);
        assert!((b[0] - 0.022750131948179195).abs() < 1e-12);
    }

    #[test]
    fn union_bound_monotone_in_snr() {
        let s = weight_spectrum_exhaustive(&polar_16_8()).unwrap();
        let snrs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let bounds = union_bound(&s, 0.5, &snrs);
        for w in bounds.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn pmr_mean_is_arithmetic() {
        let t1 = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let t2 = vec![vec![0.0, 2.0], vec![1.0, 4.0]];
        let means = path_metric_range(&[t1, t2]).unwrap();
        assert_eq!(means, vec![1.0, 1.5]);
    }

    #[test]
    fn pmr_single_path_is_zero() {
        let t = vec![vec![0.3], vec![0.7], vec![0.7]];
        let means = path_metric_range(&[t]).unwrap();
        assert!(means.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn pmr_rejects_mixed_lengths() {
        assert!(path_metric_range(&[vec![vec![0.0]], vec![vec![0.0], vec![0.0]]]).is_err());
    }
}
