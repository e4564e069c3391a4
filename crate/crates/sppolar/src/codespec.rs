//! Serializable description of a code instance, sufficient to encode
//! and decode deterministically.

use crate::construct::{Layer, MergedPair, RateProfile};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Code family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Polar,
    Spp,
    CaPolar,
    Pac,
    DeepPolar,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Polar => "polar",
            Family::Spp => "spp",
            Family::CaPolar => "ca_polar",
            Family::Pac => "pac",
            Family::DeepPolar => "deep_polar",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(Family::Polar),
            "spp" => Ok(Family::Spp),
            "ca_polar" => Ok(Family::CaPolar),
            "pac" => Ok(Family::Pac),
            "deep_polar" => Ok(Family::DeepPolar),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// Full description of a code instance.
///
/// `k` counts message bits only; CRC bits (when a polynomial is present)
/// occupy additional information positions of the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    #[serde(rename = "type")]
    pub family: Family,
    #[serde(rename = "N")]
    pub block_len: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub profile: RateProfile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged_pairs: Vec<MergedPair>,
    /// CRC generator polynomial coefficients c_0..c_m (constant term
    /// first, both end coefficients 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc_poly: Option<Vec<u8>>,
    /// Convolution polynomial coefficients c_0..c_m for the PAC family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conv_poly: Option<Vec<u8>>,
    /// Serial pre-transform chain for the deep polar family, innermost
    /// layer first. Each entry embeds a transposed kernel of size
    /// `connections.len()` on nested global position sets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deep_chain: Option<Vec<Layer>>,
}

impl CodeSpec {
    /// Number of information positions of the inner profile, including
    /// CRC positions when present.
    pub fn info_positions(&self) -> usize {
        self.k + self.crc_len()
    }

    pub fn crc_len(&self) -> usize {
        self.crc_poly.as_ref().map_or(0, |p| p.len() - 1)
    }

    pub fn stages(&self) -> usize {
        self.block_len.trailing_zeros() as usize
    }

    /// Nested layer sizes (N_l, K_l) of the deep polar chain, innermost
    /// first, followed by the outer (N, K_outer) pair.
    pub fn deep_layer_dims(&self) -> Option<Vec<(usize, usize)>> {
        self.deep_chain.as_ref().map(|chain| {
            let mut dims: Vec<(usize, usize)> = chain
                .iter()
                .map(|l| (l.size(), l.info_len()))
                .collect();
            dims.push((self.block_len, self.profile.base_info.len()));
            dims
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.block_len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.block_len));
        }
        if self.profile.block_len != self.block_len {
            return Err(Error::Infeasible(
                "profile block length differs from spec".into(),
            ));
        }
        self.profile.validate()?;
        let mut in_profile = vec![false; self.block_len];
        for &i in &self.profile.base_info {
            in_profile[i] = true;
        }
        for layer in &self.profile.layers {
            for &i in &layer.connections {
                in_profile[i] = true;
            }
        }
        let mut info_bits = self.profile.info_len();

        let mut merged_seen = vec![false; self.block_len];
        for &(i, j) in &self.merged_pairs {
            if i >= j {
                return Err(Error::Infeasible(format!(
                    "merged pair ({i},{j}) is not upper triangular"
                )));
            }
            if j >= self.block_len {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    n: self.block_len,
                });
            }
            if in_profile[i] || merged_seen[i] {
                return Err(Error::Infeasible(format!(
                    "merged pair leader {i} overlaps the profile"
                )));
            }
            if in_profile[j] || merged_seen[j] {
                return Err(Error::Infeasible(format!(
                    "merged index {j} overlaps the profile or another pair"
                )));
            }
            merged_seen[i] = true;
            merged_seen[j] = true;
        }
        info_bits += self.merged_pairs.len();

        if let Some(poly) = &self.crc_poly {
            validate_poly(poly)?;
        }
        if let Some(poly) = &self.conv_poly {
            validate_poly(poly)?;
        }
        if self.family == Family::Pac && self.conv_poly.is_none() {
            return Err(Error::InvalidParameter(
                "pac family requires a convolution polynomial".into(),
            ));
        }

        if let Some(chain) = &self.deep_chain {
            if self.family != Family::DeepPolar {
                return Err(Error::Infeasible(
                    "deep chain is only valid for the deep_polar family".into(),
                ));
            }
            // Chain layers are nested: each layer's positions must be a
            // subset of the next layer's positions (the outermost chain
            // layer lives inside [0, N)). Local info must avoid the
            // positions occupied by the deeper layer's image.
            for (idx, layer) in chain.iter().enumerate() {
                if !layer.size().is_power_of_two() {
                    return Err(Error::NotPowerOfTwo(layer.size()));
                }
                if !layer.connections.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Infeasible(
                        "deep chain positions not strictly ascending".into(),
                    ));
                }
                for &p in &layer.connections {
                    if p >= self.block_len {
                        return Err(Error::IndexOutOfRange {
                            index: p,
                            n: self.block_len,
                        });
                    }
                    if in_profile[p] {
                        return Err(Error::Infeasible(format!(
                            "deep chain position {p} collides with the outer profile"
                        )));
                    }
                }
                if idx + 1 < chain.len() {
                    let outer = &chain[idx + 1];
                    let local: Vec<usize> = layer
                        .connections
                        .iter()
                        .map(|p| {
                            outer
                                .connections
                                .binary_search(p)
                                .map_err(|_| {
                                    Error::Infeasible(format!(
                                        "deep chain layer {idx} not nested in layer {}",
                                        idx + 1
                                    ))
                                })
                        })
                        .collect::<Result<_>>()?;
                    for &li in &outer.local_info {
                        if local.contains(&li) {
                            return Err(Error::Infeasible(
                                "deep chain info collides with inner image".into(),
                            ));
                        }
                    }
                }
                for &j in &layer.local_info {
                    if j >= layer.size() {
                        return Err(Error::IndexOutOfRange {
                            index: j,
                            n: layer.size(),
                        });
                    }
                }
                info_bits += layer.info_len();
            }
        }

        if info_bits != self.info_positions() {
            return Err(Error::Infeasible(format!(
                "spec carries {info_bits} information bits, expected K + CRC = {}",
                self.info_positions()
            )));
        }
        Ok(())
    }

    /// Round-trip stable JSON form.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CodeSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

pub(crate) fn validate_poly(poly: &[u8]) -> Result<()> {
    if poly.is_empty() || poly.first() != Some(&1) || poly.last() != Some(&1) {
        return Err(Error::InvalidParameter(
            "polynomial must have unit constant and leading coefficients".into(),
        ));
    }
    if poly.iter().any(|&c| c > 1) {
        return Err(Error::InvalidParameter(
            "polynomial coefficients must be bits".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_spp_spec() -> CodeSpec {
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
    fn json_round_trip_is_stable() {
        let spec = example_spp_spec();
        let json = spec.to_json().unwrap();
        let back = CodeSpec::from_json(&json).unwrap();
        assert_eq!(spec, back);
        assert_eq!(json, back.to_json().unwrap());
    }

    #[test]
    fn validation_rejects_overlapping_pair() {
        let mut spec = example_spp_spec();
        spec.k = 9;
        spec.merged_pairs = vec![(5, 9)]; // 9 is inside a connection set
        assert!(spec.validate().is_err());
    }

    #[test]
    fn validation_rejects_lower_triangular_pair() {
        let mut spec = example_spp_spec();
        spec.k = 9;
        spec.merged_pairs = vec![(8, 5)];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn validation_accepts_disjoint_pair() {
        let mut spec = example_spp_spec();
        spec.k = 9;
        spec.merged_pairs = vec![(5, 8)];
        spec.validate().unwrap();
    }

    #[test]
    fn json_field_names_follow_interface() {
        let spec = example_spp_spec();
        let json = spec.to_json().unwrap();
        for key in ["\"type\"", "\"N\"", "\"K\"", "\"profile\"", "\"I0\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
