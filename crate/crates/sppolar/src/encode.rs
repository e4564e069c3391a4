//! Encoders for all code families.
//!
//! The reference path mirrors the layered dataflow: split the message,
//! run each local transposed kernel onto its connection set, place the
//! base bits, then apply the global polar transform. The pre-transform
//! path builds u = v T explicitly; the two must agree bit for bit, which
//! the oracle tests enforce.

use crate::bits::BitVec;
use crate::codespec::{CodeSpec, Family};
use crate::pretransform::{
    apply_embedded_transposed_kernel, assemble_pretransform, local_kernel_rows,
};
use crate::transform::polar_transform;
use crate::{Error, Result};

/// CRC remainder of `message` for the generator polynomial `poly`
/// (coefficients c_0..c_m, constant first). The message is treated as a
/// polynomial with its first bit as the highest-degree term; the
/// remainder of message(x) * x^m is returned highest-degree first, ready
/// to append.
pub fn crc_remainder(message: &[u8], poly: &[u8]) -> Vec<u8> {
    let m = poly.len() - 1;
    // register holds the running remainder, highest degree at index 0
    let mut reg = vec![0u8; m];
    for &bit in message {
        let feedback = bit ^ reg.first().copied().unwrap_or(bit);
        if m > 0 {
            reg.rotate_left(1);
            reg[m - 1] = 0;
            if feedback == 1 {
                for d in 1..=m {
                    // poly coefficient of x^{m-d} taps register slot d-1
                    if poly[m - d] == 1 {
                        reg[d - 1] ^= 1;
                    }
                }
            }
        }
    }
    reg
}

/// True iff `message` followed by `check` is a valid CRC word.
pub fn crc_check(message: &[u8], check: &[u8], poly: &[u8]) -> bool {
    crc_remainder(message, poly) == check
}

/// The v-domain layout of a spec: which positions are frozen and the
/// global position of every information bit in payload order.
#[derive(Debug, Clone)]
pub struct VLayout {
    pub frozen: Vec<bool>,
    /// Global v positions in payload-bit order: base information set
    /// ascending, then each layer's local information set in layer
    /// order, then one position per merged pair.
    pub info_positions: Vec<usize>,
    /// Payload positions occupied by CRC bits: the tail of the base
    /// layer, so the check bits ride the most reliable block.
    pub crc_slot: std::ops::Range<usize>,
}

impl VLayout {
    /// Reorders payload bits back into message order, dropping the CRC.
    pub fn payload_message_indices(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.info_positions.len())
            .filter(move |i| !self.crc_slot.contains(i))
            .take(k)
    }
}

/// Computes the v-domain layout of a validated spec.
pub fn v_layout(spec: &CodeSpec) -> Result<VLayout> {
    spec.validate()?;
    let n = spec.block_len;
    let crc_len = spec.crc_len();
    if crc_len > spec.profile.base_info.len() {
        return Err(Error::Infeasible(format!(
            "CRC length {crc_len} exceeds the base information set"
        )));
    }
    let mut frozen = vec![true; n];
    let mut info_positions = Vec::with_capacity(spec.info_positions());
    for &i in &spec.profile.base_info {
        frozen[i] = false;
        info_positions.push(i);
    }
    for layer in &spec.profile.layers {
        for &j in &layer.local_info {
            let p = layer.connections[j];
            frozen[p] = false;
            info_positions.push(p);
        }
    }
    if let Some(chain) = &spec.deep_chain {
        for layer in chain {
            for &j in &layer.local_info {
                let p = layer.connections[j];
                frozen[p] = false;
                info_positions.push(p);
            }
        }
    }
    for &(i, _) in &spec.merged_pairs {
        frozen[i] = false;
        info_positions.push(i);
    }
    debug_assert_eq!(info_positions.len(), spec.info_positions());
    let base_len = spec.profile.base_info.len();
    Ok(VLayout {
        frozen,
        info_positions,
        crc_slot: base_len - crc_len..base_len,
    })
}

/// Builds the payload: the message with the CRC over all K message bits
/// spliced in at the tail of the base layer's share.
pub fn build_payload(spec: &CodeSpec, message: &BitVec) -> BitVec {
    match &spec.crc_poly {
        None => message.clone(),
        Some(poly) => {
            let bytes = message.to_bytes();
            let crc = crc_remainder(&bytes, poly);
            let cut = spec.profile.base_info.len() - crc.len();
            let mut all = Vec::with_capacity(bytes.len() + crc.len());
            all.extend_from_slice(&bytes[..cut]);
            all.extend_from_slice(&crc);
            all.extend_from_slice(&bytes[cut..]);
            BitVec::from_bits(&all)
        }
    }
}

/// Builds the v-domain vector for a message, per the layout order.
pub fn message_to_v(spec: &CodeSpec, message: &BitVec) -> Result<BitVec> {
    if message.len() != spec.k {
        return Err(Error::LengthMismatch {
            expected: spec.k,
            got: message.len(),
        });
    }
    let layout = v_layout(spec)?;
    let payload = build_payload(spec, message);
    debug_assert_eq!(payload.len(), layout.info_positions.len());
    let mut v = BitVec::zeros(spec.block_len);
    for (bit_idx, &pos) in layout.info_positions.iter().enumerate() {
        if payload.get(bit_idx) {
            v.set(pos, true);
        }
    }
    Ok(v)
}

/// Reads the message back out of a decoded v vector, dropping CRC bits.
pub fn v_to_message(spec: &CodeSpec, layout: &VLayout, v: &BitVec) -> BitVec {
    let mut bits = Vec::with_capacity(spec.k);
    for idx in layout.payload_message_indices(spec.k) {
        bits.push(u8::from(v.get(layout.info_positions[idx])));
    }
    BitVec::from_bits(&bits)
}

/// Extracts (message, crc) payload parts of a decoded v vector and
/// verifies the check bits.
pub fn v_crc_ok(spec: &CodeSpec, layout: &VLayout, v: &BitVec) -> bool {
    let Some(poly) = &spec.crc_poly else {
        return true;
    };
    let message = v_to_message(spec, layout, v);
    let crc: Vec<u8> = layout
        .crc_slot
        .clone()
        .map(|idx| u8::from(v.get(layout.info_positions[idx])))
        .collect();
    crc_check(&message.to_bytes(), &crc, poly)
}

/// Encodes a K-bit message to an N-bit codeword along the layered
/// dataflow of the spec's family.
pub fn encode(spec: &CodeSpec, message: &BitVec) -> Result<BitVec> {
    if message.len() != spec.k {
        return Err(Error::LengthMismatch {
            expected: spec.k,
            got: message.len(),
        });
    }
    spec.validate()?;
    let n = spec.block_len;
    let payload = build_payload(spec, message);
    let mut cursor = 0usize;
    let mut take = |count: usize, payload: &BitVec| -> Vec<bool> {
        let bits = (cursor..cursor + count).map(|i| payload.get(i)).collect();
        cursor += count;
        bits
    };

    let mut u = BitVec::zeros(n);
    // base layer bits first, per the split order
    let base_bits = take(spec.profile.base_info.len(), &payload);
    // local transposed kernels on each connection set
    for layer in &spec.profile.layers {
        let bits = take(layer.info_len(), &payload);
        let mut local = BitVec::zeros(layer.size());
        for (&j, &b) in layer.local_info.iter().zip(&bits) {
            if b {
                local.set(j, true);
            }
        }
        let kernel = local_kernel_rows(layer.size());
        let positions: Vec<usize> = (0..layer.size()).collect();
        apply_embedded_transposed_kernel(&mut local, &positions, &kernel);
        for (idx, &pos) in layer.connections.iter().enumerate() {
            if local.get(idx) {
                u.set(pos, true);
            }
        }
    }
    // serial chain for deep polar: innermost first, each output feeding
    // the enclosing layer's positions
    if let Some(chain) = &spec.deep_chain {
        for layer in chain {
            let bits = take(layer.info_len(), &payload);
            for (&j, &b) in layer.local_info.iter().zip(&bits) {
                if b {
                    u.set(layer.connections[j], true);
                }
            }
            let kernel = local_kernel_rows(layer.size());
            apply_embedded_transposed_kernel(&mut u, &layer.connections, &kernel);
        }
    }
    // merged pairs copy their bit onto both coordinates
    for &(i, j) in &spec.merged_pairs {
        let bits = take(1, &payload);
        if bits[0] {
            u.set(i, true);
            u.set(j, true);
        }
    }
    for (&pos, &b) in spec.profile.base_info.iter().zip(&base_bits) {
        if b {
            u.set(pos, true);
        }
    }
    // PAC runs the convolution over the whole input instead
    if spec.family == Family::Pac {
        let t = assemble_pretransform(spec)?;
        u = t.apply(&u)?;
    }
    debug_assert_eq!(cursor, payload.len());
    polar_transform(&u)
}

/// Encodes through the assembled pre-transform: x = v T G_N.
pub fn encode_via_pretransform(spec: &CodeSpec, message: &BitVec) -> Result<BitVec> {
    let v = message_to_v(spec, message)?;
    let t = assemble_pretransform(spec)?;
    polar_transform(&t.apply(&v)?)
}

/// Effective generator rows: the codewords of the unit messages. Row k
/// is encode(e_k); any message encodes as the GF(2) combination of these
/// rows (plus CRC handling, which is linear as well).
pub fn generator_rows(spec: &CodeSpec) -> Result<Vec<BitVec>> {
    (0..spec.k)
        .map(|k| encode(spec, &BitVec::unit(spec.k, k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespec::Family;
    use crate::construct::{Layer, RateProfile};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

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

    fn random_message(k: usize, rng: &mut StdRng) -> BitVec {
        BitVec::from_bits(&(0..k).map(|_| rng.gen_range(0..2u8)).collect::<Vec<_>>())
    }

    #[test]
    fn zero_message_is_zero_codeword() {
        let spec = example_spp_spec();
        assert!(encode(&spec, &BitVec::zeros(8)).unwrap().is_zero());
    }

    #[test]
    fn layered_route_equals_pretransform_route() {
        let spec = example_spp_spec();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let d = random_message(8, &mut rng);
            assert_eq!(
                encode(&spec, &d).unwrap(),
                encode_via_pretransform(&spec, &d).unwrap()
            );
        }
    }

    #[test]
    fn encoder_linearity() {
        let spec = example_spp_spec();
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..100 {
            let a = random_message(8, &mut rng);
            let b = random_message(8, &mut rng);
            let lhs = encode(&spec, &a.xor(&b).unwrap()).unwrap();
            let rhs = encode(&spec, &a).unwrap().xor(&encode(&spec, &b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn crc3_matches_long_division_oracle() {
        // g(x) = 1 + x + x^3
        let poly = [1u8, 1, 0, 1];
        let message = [1u8, 0, 1, 1, 0, 0, 1, 0];

        // Oracle: schoolbook long division of message(x) * x^3 by g(x),
        // message bit 0 as the highest-degree coefficient.
        let m = poly.len() - 1;
        let mut work: Vec<u8> = message.to_vec();
        work.extend(std::iter::repeat(0).take(m));
        for i in 0..message.len() {
            if work[i] == 1 {
                for (d, &c) in poly.iter().rev().enumerate() {
                    work[i + d] ^= c;
                }
            }
        }
        let oracle: Vec<u8> = work[message.len()..].to_vec();

        assert_eq!(crc_remainder(&message, &poly), oracle);
        assert!(crc_check(&message, &oracle, &poly));
        let mut bad = oracle.clone();
        bad[0] ^= 1;
        assert!(!crc_check(&message, &bad, &poly));
    }

    #[test]
    fn crc_distinguishes_messages() {
        let poly = [1u8, 1, 1, 0, 1, 1, 0, 1, 1]; // degree-8 polynomial
        let a = crc_remainder(&[1, 0, 0, 1, 1, 0, 1, 0, 1, 1], &poly);
        let b = crc_remainder(&[1, 0, 0, 1, 1, 0, 1, 0, 1, 0], &poly);
        assert_ne!(a, b);
    }

    #[test]
    fn pac_trivial_polynomial_is_plain_polar() {
        let mut pac = CodeSpec {
            family: Family::Pac,
            block_len: 32,
            k: 12,
            profile: RateProfile {
                block_len: 32,
                base_info: vec![15, 21, 22, 23, 25, 26, 27, 28, 29, 30, 31, 14],
                layers: Vec::new(),
            },
            merged_pairs: Vec::new(),
            crc_poly: None,
            conv_poly: Some(vec![1]),
            deep_chain: None,
        };
        pac.profile.base_info.sort_unstable();
        let polar = CodeSpec {
            family: Family::Polar,
            conv_poly: None,
            ..pac.clone()
        };
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..50 {
            let d = random_message(12, &mut rng);
            assert_eq!(encode(&pac, &d).unwrap(), encode(&polar, &d).unwrap());
        }
    }

    #[test]
    fn message_length_is_enforced() {
        let spec = example_spp_spec();
        assert!(matches!(
            encode(&spec, &BitVec::zeros(7)),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
