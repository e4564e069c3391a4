//! Channel models and BPSK LLR generation.

use crate::bits::BitVec;
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Finite stand-in for certain LLRs (BEC non-erasures, noiseless tests).
pub const LLR_CLAMP: f64 = 1e6;

/// Channel configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelConfig {
    /// Binary-input AWGN with BPSK mapping s = 1 - 2x. The noise
    /// variance is sigma^2 = 1 / (2 R 10^{EbN0/10}).
    BiAwgn { ebn0_db: f64, rate: f64 },
    /// Binary erasure channel: an erased position carries LLR 0, a seen
    /// position carries +/- LLR_CLAMP signed by the transmitted bit.
    Bec { eps: f64 },
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelConfig::BiAwgn { rate, .. } => {
                if !(rate > 0.0 && rate <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "rate must lie in (0,1], got {rate}"
                    )));
                }
            }
            ChannelConfig::Bec { eps } => {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::InvalidParameter(format!(
                        "erasure probability must lie in [0,1], got {eps}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Noise variance of the BI-AWGN configuration.
    pub fn noise_variance(&self) -> Option<f64> {
        match *self {
            ChannelConfig::BiAwgn { ebn0_db, rate } => {
                Some(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)))
            }
            ChannelConfig::Bec { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            ChannelConfig::BiAwgn { ebn0_db, rate } => {
                format!("bi_awgn(ebn0={ebn0_db}dB,R={rate})")
            }
            ChannelConfig::Bec { eps } => format!("bec(eps={eps})"),
        }
    }
}

/// Sends a codeword through the channel and returns per-position LLRs
/// (positive favours bit 0).
///
/// BI-AWGN: y = (1 - 2x) + n with n ~ N(0, sigma^2) and llr = 2y/sigma^2.
pub fn channel_llr(x: &BitVec, config: &ChannelConfig, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    config.validate()?;
    let llrs = match *config {
        ChannelConfig::BiAwgn { .. } => {
            let sigma2 = config.noise_variance().unwrap();
            let sigma = sigma2.sqrt();
            let scale = 2.0 / sigma2;
            x.iter()
                .map(|bit| {
                    let s = if bit { -1.0 } else { 1.0 };
                    let y = s + sigma * standard_normal(rng);
                    (scale * y).clamp(-LLR_CLAMP, LLR_CLAMP)
                })
                .collect()
        }
        ChannelConfig::Bec { eps } => x
            .iter()
            .map(|bit| {
                if rng.gen::<f64>() < eps {
                    0.0
                } else if bit {
                    -LLR_CLAMP
                } else {
                    LLR_CLAMP
                }
            })
            .collect(),
    };
    Ok(llrs)
}

/// Box-Muller standard normal draw. Two uniforms per call keeps the
/// draw count per position fixed, which the per-trial stream
/// reproducibility relies on.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn noiseless_limit_signs_follow_codeword() {
        let x = BitVec::from_bits(&[0, 1, 1, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = ChannelConfig::BiAwgn {
            ebn0_db: 60.0,
            rate: 0.5,
        };
        let llr = channel_llr(&x, &cfg, &mut rng).unwrap();
        for (l, bit) in llr.iter().zip(x.iter()) {
            assert_eq!(*l < 0.0, bit);
        }
    }

    #[test]
    fn bec_full_erasure_gives_zero_llrs() {
        let x = BitVec::from_bits(&[0, 1, 0, 1, 1, 0, 1, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = ChannelConfig::Bec { eps: 1.0 };
        let llr = channel_llr(&x, &cfg, &mut rng).unwrap();
        assert!(llr.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn awgn_llr_moments_match_theory() {
        // llr = 2y/sigma^2 has mean +/- 2/sigma^2 and variance 4/sigma^2.
        let n = 100_000;
        let x = BitVec::zeros(n);
        let cfg = ChannelConfig::BiAwgn {
            ebn0_db: 1.0,
            rate: 0.5,
        };
        let sigma2 = cfg.noise_variance().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let llr = channel_llr(&x, &cfg, &mut rng).unwrap();
        let mean: f64 = llr.iter().sum::<f64>() / n as f64;
        let var: f64 = llr.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n as f64;
        let exp_mean = 2.0 / sigma2;
        let exp_var = 4.0 / sigma2;
        let se_mean = (exp_var / n as f64).sqrt();
        assert!(
            (mean - exp_mean).abs() < 3.0 * se_mean,
            "mean {mean} vs {exp_mean}"
        );
        // loose 3-sigma-style band for the variance of the variance
        let se_var = exp_var * (2.0 / n as f64).sqrt();
        assert!((var - exp_var).abs() < 4.0 * se_var, "var {var} vs {exp_var}");
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ChannelConfig::Bec { eps: 1.5 }.validate().is_err());
        assert!(ChannelConfig::BiAwgn {
            ebn0_db: 0.0,
            rate: 0.0
        }
        .validate()
        .is_err());
    }
}
