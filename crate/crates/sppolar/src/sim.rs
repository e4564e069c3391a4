//! Monte-Carlo block-error-rate harness with reproducible seeding and
//! early stopping.
//!
//! Every trial owns an RNG stream derived from (master seed, trial
//! index), so outcomes are a pure function of the trial index. Trials
//! run in fixed-size chunks whose members may be evaluated in parallel;
//! the stopping rule scans outcomes in trial order, which makes the
//! record identical for any worker count.

use crate::bits::BitVec;
use crate::channel::{channel_llr, ChannelConfig};
use crate::codespec::CodeSpec;
use crate::decode::{DecodeOptions, MetricMode, PreparedCode};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Stopping rule: stop after `min_errors` block errors or `max_trials`
/// trials, whichever comes first.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stopping {
    pub min_errors: u64,
    pub max_trials: u64,
}

impl Default for Stopping {
    fn default() -> Self {
        Stopping {
            min_errors: 100,
            max_trials: 1_000_000,
        }
    }
}

/// Aggregate result of one simulation point.
#[derive(Debug, Clone, Serialize)]
pub struct SimRecord {
    pub spec_id: String,
    pub list_size: usize,
    pub channel: String,
    pub ebn0_db: Option<f64>,
    pub trials: u64,
    pub errors: u64,
    pub e1: u64,
    pub e2: u64,
    pub seed: u64,
    pub genie: bool,
    pub wall_seconds: f64,
}

impl SimRecord {
    pub fn bler(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.errors as f64 / self.trials as f64
        }
    }

    /// 95% normal-approximation confidence interval for the BLER.
    pub fn bler_ci95(&self) -> (f64, f64) {
        let p = self.bler();
        let n = self.trials.max(1) as f64;
        let half = 1.96 * (p * (1.0 - p) / n).sqrt();
        ((p - half).max(0.0), (p + half).min(1.0))
    }
}

/// splitmix64 finalizer; decorrelates (seed, trial) into a stream seed.
fn mix_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// RNG stream for one trial.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(master_seed, trial))
}

/// Uniform random message of length k.
pub fn random_message(k: usize, rng: &mut ChaCha8Rng) -> BitVec {
    BitVec::from_bits(&(0..k).map(|_| rng.gen_range(0..2u8)).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    error: bool,
    in_list: bool,
}

/// Runs Monte-Carlo BLER estimation for one (spec, list size, channel)
/// point.
///
/// `workers` sets the rayon fan-out; the returned record does not depend
/// on it. Genie instrumentation tracks whether the transmitted path
/// survived to the final list, splitting errors into the pruned (e1)
/// and out-scored (e2) classes.
pub fn simulate_bler(
    spec: &CodeSpec,
    list_size: usize,
    channel: &ChannelConfig,
    stopping: Stopping,
    master_seed: u64,
    genie: bool,
    workers: usize,
) -> Result<SimRecord> {
    if stopping.min_errors == 0 {
        return Err(Error::InvalidParameter(
            "stopping rule needs min_errors >= 1".into(),
        ));
    }
    if stopping.max_trials == 0 {
        return Err(Error::InvalidParameter(
            "stopping rule needs max_trials >= 1".into(),
        ));
    }
    channel.validate()?;
    let code = PreparedCode::new(spec)?;
    let start = std::time::Instant::now();

    let run_trial = |trial: u64| -> TrialOutcome {
        let mut rng = trial_rng(master_seed, trial);
        let message = random_message(code.message_len(), &mut rng);
        let x = code.encode(&message).expect("prepared encode");
        let llr = channel_llr(&x, channel, &mut rng).expect("validated channel");
        let opts = DecodeOptions {
            mode: MetricMode::Approx,
            genie_message: genie.then(|| message.clone()),
            trace: false,
        };
        let res = code.decode(&llr, list_size, &opts).expect("validated decode");
        TrialOutcome {
            error: res.message() != &message,
            in_list: res.transmitted_in_list.unwrap_or(false),
        }
    };

    let chunk: u64 = 512;
    let mut trials = 0u64;
    let mut errors = 0u64;
    let mut e1 = 0u64;
    let mut e2 = 0u64;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    'outer: while trials < stopping.max_trials {
        let begin = trials;
        let end = (begin + chunk).min(stopping.max_trials);
        let outcomes: Vec<TrialOutcome> = pool.install(|| {
            use rayon::prelude::*;
            (begin..end).into_par_iter().map(run_trial).collect()
        });
        for (offset, outcome) in outcomes.iter().enumerate() {
            trials = begin + offset as u64 + 1;
            if outcome.error {
                errors += 1;
                if genie {
                    if outcome.in_list {
                        e2 += 1;
                    } else {
                        e1 += 1;
                    }
                }
                if errors >= stopping.min_errors {
                    break 'outer;
                }
            }
        }
    }

    Ok(SimRecord {
        spec_id: format!("{}_{}_{}", spec.family, spec.block_len, spec.k),
        list_size,
        channel: channel.describe(),
        ebn0_db: match channel {
            ChannelConfig::BiAwgn { ebn0_db, .. } => Some(*ebn0_db),
            ChannelConfig::Bec { .. } => None,
        },
        trials,
        errors,
        e1,
        e2,
        seed: master_seed,
        genie,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
