//! Convenience constructors assembling full code specs per family.

use crate::codespec::{CodeSpec, Family};
use crate::construct::{rate_profile, select_type2_pairs, Layer, RateProfile};
use crate::reliability::{bec_reliability, ga_reliability, sequence_from_text, Reliability};
use crate::transform::row_weight;
use crate::{Error, Result};

/// CRC-11 polynomial used by the CA-polar benchmark:
/// x^11 + x^10 + x^9 + x^5 + 1.
pub const CRC11: [u8; 12] = [1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1];

/// CRC-3 polynomial 1 + x + x^3.
pub const CRC3: [u8; 4] = [1, 1, 0, 1];

/// Rate-1 convolution polynomial 1 + x^2 + x^3 + x^5 + x^6 (octal 133),
/// the common degree-6 choice for convolutional pre-transforms.
pub const CONV_133: [u8; 7] = [1, 0, 1, 1, 0, 1, 1];

/// Construction channel: how bit-channel reliabilities are derived, at
/// any block length the construction needs.
#[derive(Debug, Clone)]
pub enum ConstructionChannel {
    Bec { eps: f64 },
    Ga { design_ebn0_db: f64, rate: f64 },
    /// Channel-independent sequence file contents.
    Sequence { text: String },
}

impl ConstructionChannel {
    pub fn reliability(&self, stages: usize) -> Result<Reliability> {
        match self {
            ConstructionChannel::Bec { eps } => bec_reliability(stages, *eps),
            ConstructionChannel::Ga {
                design_ebn0_db,
                rate,
            } => ga_reliability(stages, *design_ebn0_db, *rate),
            ConstructionChannel::Sequence { text } => sequence_from_text(text, 1 << stages),
        }
    }
}

fn stages_of(block_len: usize) -> Result<usize> {
    if !block_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(block_len));
    }
    Ok(block_len.trailing_zeros() as usize)
}

/// Plain polar code: the K most reliable positions carry the message.
pub fn build_polar(channel: &ConstructionChannel, block_len: usize, k: usize) -> Result<CodeSpec> {
    let rel = channel.reliability(stages_of(block_len)?)?;
    let spec = CodeSpec {
        family: Family::Polar,
        block_len,
        k,
        profile: RateProfile::plain(&rel, k)?,
        merged_pairs: Vec::new(),
        crc_poly: None,
        conv_poly: None,
        deep_chain: None,
    };
    spec.validate()?;
    Ok(spec)
}

/// CRC-aided polar code: K + |crc| most reliable positions carry the
/// message and its check bits as one block.
pub fn build_ca_polar(
    channel: &ConstructionChannel,
    block_len: usize,
    k: usize,
    crc_poly: &[u8],
) -> Result<CodeSpec> {
    let rel = channel.reliability(stages_of(block_len)?)?;
    let crc_len = crc_poly.len() - 1;
    let spec = CodeSpec {
        family: Family::CaPolar,
        block_len,
        k,
        profile: RateProfile::plain(&rel, k + crc_len)?,
        merged_pairs: Vec::new(),
        crc_poly: Some(crc_poly.to_vec()),
        conv_poly: None,
        deep_chain: None,
    };
    spec.validate()?;
    Ok(spec)
}

/// Row-merging policy for the sparsely pre-transformed builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergePolicy {
    /// No row-merging pairs.
    Off,
    /// Run pair selection whenever the base layer's minimum-row-weight
    /// stratum is (weakly) the lightest part of the effective generator.
    /// The elimination guarantee presumes the merged cosets lead actual
    /// minimum-weight codewords; when a local layer already produces
    /// lighter codewords than any base row, merging targets the wrong
    /// stratum and is skipped.
    Auto,
    /// Run pair selection unconditionally.
    Always,
}

/// Sparsely pre-transformed code: rate profile with the given local
/// layer dimensions, optionally followed by row-merging pair selection
/// and an outer CRC on the base layer.
pub fn build_spp(
    channel: &ConstructionChannel,
    block_len: usize,
    k: usize,
    layer_dims: &[(usize, usize)],
    merge: MergePolicy,
    crc_poly: Option<&[u8]>,
) -> Result<CodeSpec> {
    let rel = channel.reliability(stages_of(block_len)?)?;
    let crc_len = crc_poly.map_or(0, |p| p.len() - 1);
    let layer_info: usize = layer_dims.iter().map(|&(_, kl)| kl).sum();
    let base_info_len = (k + crc_len)
        .checked_sub(layer_info)
        .ok_or_else(|| Error::Infeasible("layers carry more than K + CRC bits".into()))?;
    let profile = rate_profile(&rel, base_info_len, layer_dims)?;

    let do_merge = match merge {
        MergePolicy::Off => false,
        MergePolicy::Always => true,
        MergePolicy::Auto => base_rows_lead_min_weight(&profile)?,
    };
    let (profile, merged_pairs) = if do_merge {
        select_type2_pairs(&profile, &rel)?
    } else {
        (profile, Vec::new())
    };
    let spec = CodeSpec {
        family: Family::Spp,
        block_len,
        k,
        profile,
        merged_pairs,
        crc_poly: crc_poly.map(<[u8]>::to_vec),
        conv_poly: None,
        deep_chain: None,
    };
    spec.validate()?;
    Ok(spec)
}

/// True when the lightest base-layer row weighs no more than every
/// single-bit codeword of the local layers, so the pair-selection
/// leaders are the code's minimum-weight stratum.
fn base_rows_lead_min_weight(profile: &RateProfile) -> Result<bool> {
    if profile.layers.is_empty() {
        return Ok(true);
    }
    let probe = CodeSpec {
        family: Family::Spp,
        block_len: profile.block_len,
        k: profile.info_len(),
        profile: profile.clone(),
        merged_pairs: Vec::new(),
        crc_poly: None,
        conv_poly: None,
        deep_chain: None,
    };
    let rows = crate::encode::generator_rows(&probe)?;
    let base_len = profile.base_info.len();
    let base_min = rows[..base_len].iter().map(crate::bits::BitVec::weight).min();
    let layer_min = rows[base_len..].iter().map(crate::bits::BitVec::weight).min();
    Ok(match (base_min, layer_min) {
        (Some(b), Some(l)) => b <= l,
        (Some(_), None) => true,
        (None, _) => false,
    })
}

/// PAC rate-profile rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacProfile {
    /// K most reliable positions.
    Reliability,
    /// K positions of largest row weight, ties broken by reliability.
    RmRule,
}

/// Polarization-adjusted convolutional code: rate profile plus an
/// upper-triangular Toeplitz pre-transform from the convolution
/// polynomial.
pub fn build_pac(
    channel: &ConstructionChannel,
    block_len: usize,
    k: usize,
    conv_poly: &[u8],
    profile_rule: PacProfile,
) -> Result<CodeSpec> {
    let rel = channel.reliability(stages_of(block_len)?)?;
    let base_info = match profile_rule {
        PacProfile::Reliability => rel.top_k(k),
        PacProfile::RmRule => {
            let mut idx: Vec<usize> = (0..block_len).collect();
            // largest row weight first; ties to the more reliable index
            idx.sort_by(|&a, &b| {
                let wa = row_weight(a, block_len).unwrap();
                let wb = row_weight(b, block_len).unwrap();
                wb.cmp(&wa).then(
                    rel.value(b)
                        .partial_cmp(&rel.value(a))
                        .expect("finite metrics")
                        .then(a.cmp(&b)),
                )
            });
            let mut set: Vec<usize> = idx[..k].to_vec();
            set.sort_unstable();
            set
        }
    };
    let spec = CodeSpec {
        family: Family::Pac,
        block_len,
        k,
        profile: RateProfile {
            block_len,
            base_info,
            layers: Vec::new(),
        },
        merged_pairs: Vec::new(),
        crc_poly: None,
        conv_poly: Some(conv_poly.to_vec()),
        deep_chain: None,
    };
    spec.validate()?;
    Ok(spec)
}

/// Deep polar code: serial nesting with the given (N_l, K_l) dims,
/// innermost first; the last entry is the outer (N, K_outer) layer.
/// Each enclosing layer reserves its least reliable selected positions
/// for the inner layer's image.
pub fn build_deep_polar(
    channel: &ConstructionChannel,
    block_len: usize,
    k: usize,
    dims: &[(usize, usize)],
) -> Result<CodeSpec> {
    if dims.len() < 2 {
        return Err(Error::Infeasible(
            "deep polar needs at least one inner layer plus the outer code".into(),
        ));
    }
    let (outer_n, _) = *dims.last().unwrap();
    if outer_n != block_len {
        return Err(Error::Infeasible(format!(
            "outer layer size {outer_n} must equal N = {block_len}"
        )));
    }
    let total: usize = dims.iter().map(|&(_, kl)| kl).sum();
    if total != k {
        return Err(Error::Infeasible(format!(
            "layer information lengths sum to {total}, expected K = {k}"
        )));
    }

    // Walk outer to inner. Each enclosing layer selects its K_l + N_inner
    // most reliable local positions, hands the N_inner least reliable of
    // them to the inner layer's image and keeps the rest as information.
    // `positions` tracks the current layer's global coordinates.
    let mut positions: Vec<usize> = (0..block_len).collect();
    let mut base_info: Vec<usize> = Vec::new();
    let mut chain_outer_first: Vec<Layer> = Vec::new();

    for idx in (1..dims.len()).rev() {
        let (nl, kl) = dims[idx];
        let (inner_n, _) = dims[idx - 1];
        if nl != positions.len() {
            return Err(Error::Infeasible(format!(
                "layer size {nl} does not match its {} reserved positions",
                positions.len()
            )));
        }
        if inner_n >= nl || kl + inner_n > nl {
            return Err(Error::Infeasible(
                "layer sizes must nest strictly with room for the inner image".into(),
            ));
        }
        let rel = channel.reliability(stages_of(nl)?)?;
        let selected = &rel.order()[nl - (kl + inner_n)..];
        let mut conn_local: Vec<usize> = selected[..inner_n].to_vec();
        conn_local.sort_unstable();
        let mut info_local: Vec<usize> = selected[inner_n..].to_vec();
        info_local.sort_unstable();

        if idx == dims.len() - 1 {
            base_info = info_local;
        } else {
            chain_outer_first.push(Layer {
                connections: positions.clone(),
                local_info: info_local,
            });
        }
        positions = conn_local.iter().map(|&c| positions[c]).collect();
    }

    let (inner_n, inner_k) = dims[0];
    if inner_n != positions.len() {
        return Err(Error::Infeasible(
            "innermost layer size does not match its reserved positions".into(),
        ));
    }
    let rel = channel.reliability(stages_of(inner_n)?)?;
    let mut inner_info: Vec<usize> = rel.order()[inner_n - inner_k..].to_vec();
    inner_info.sort_unstable();
    chain_outer_first.push(Layer {
        connections: positions,
        local_info: inner_info,
    });

    let chain: Vec<Layer> = chain_outer_first.into_iter().rev().collect();
    let spec = CodeSpec {
        family: Family::DeepPolar,
        block_len,
        k,
        profile: RateProfile {
            block_len,
            base_info,
            layers: Vec::new(),
        },
        merged_pairs: Vec::new(),
        crc_poly: None,
        conv_poly: None,
        deep_chain: Some(chain),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVec;
    use crate::encode::{encode, encode_via_pretransform};
    use crate::pretransform::assemble_pretransform;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn spp_example1_spec() {
        let ch = ConstructionChannel::Bec { eps: 0.5 };
        let spec = build_spp(&ch, 16, 8, &[(2, 1)], MergePolicy::Off, None).unwrap();
        assert_eq!(spec.profile.layers[0].connections, vec![6, 9]);
        assert_eq!(spec.profile.base_info, vec![7, 10, 11, 12, 13, 14, 15]);
    }

    #[test]
    fn ca_polar_dimensions() {
        let ch = ConstructionChannel::Bec { eps: 0.5 };
        let spec = build_ca_polar(&ch, 64, 20, &CRC11).unwrap();
        assert_eq!(spec.profile.base_info.len(), 31);
        assert_eq!(spec.info_positions(), 31);
    }

    #[test]
    fn deep_polar_is_valid_and_linear() {
        let ch = ConstructionChannel::Bec { eps: 0.5 };
        let k = 20;
        let spec = build_deep_polar(&ch, 128, k, &[(2, 1), (16, 10), (128, k - 11)]).unwrap();
        // upper-triangular with unit diagonal holds by construction
        let t = assemble_pretransform(&spec).unwrap();
        assert!(t.max_column_fill() >= 1);
        // zero message -> zero codeword
        assert!(encode(&spec, &BitVec::zeros(k)).unwrap().is_zero());
        // layered dataflow equals the composed pre-transform route
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let d = BitVec::from_bits(&(0..k).map(|_| rng.gen_range(0..2u8)).collect::<Vec<_>>());
            assert_eq!(
                encode(&spec, &d).unwrap(),
                encode_via_pretransform(&spec, &d).unwrap()
            );
        }
    }

    #[test]
    fn pac_rm_profile_prefers_heavy_rows() {
        let ch = ConstructionChannel::Bec { eps: 0.5 };
        let spec = build_pac(&ch, 32, 6, &CONV_133, PacProfile::RmRule).unwrap();
        // top weights at N=32: index 31 (weight 32) and the five
        // weight-16 rows
        assert!(spec.profile.base_info.contains(&31));
        for &i in &spec.profile.base_info {
            assert!(row_weight(i, 32).unwrap() >= 16);
        }
    }
}
