//! LLR-domain successive cancellation list decoding with dynamic frozen
//! bit constraints.
//!
//! Decoding runs in the u-domain; frozen conditions live in the
//! v-domain. The upper-triangular pre-transform gives v_i = u_i + sum of
//! T[k,i] v_k over k < i, so at a frozen position every path extends
//! only with the u value that forces v_i = 0. At free positions paths
//! duplicate and the best `S` by path metric survive, ties broken by the
//! lower path index.

use crate::bits::BitVec;
use crate::codespec::CodeSpec;
use crate::encode::{generator_rows, message_to_v, v_crc_ok, v_layout, v_to_message, VLayout};
use crate::pretransform::{assemble_pretransform, PreTransform};
use crate::{Error, Result};

/// Path-metric arithmetic.
///
/// `Approx` is the hardware-friendly rule: a path pays |llr| whenever
/// its bit disagrees with the llr sign, and the check-node update is
/// min-sum. `Exact` uses the boxplus check-node update and the
/// ln(1 + e^-x) penalty; with it the final metric orders paths exactly
/// by likelihood, which the maximum-likelihood oracle tests rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricMode {
    #[default]
    Approx,
    Exact,
}

/// Decoder options beyond the list size.
#[derive(Debug, Clone, Default)]
pub struct DecodeOptions {
    pub mode: MetricMode,
    /// Transmitted message for genie instrumentation: the result then
    /// reports whether the transmitted path survived to the final list.
    pub genie_message: Option<BitVec>,
    /// Record all surviving path metrics after every decoding step.
    pub trace: bool,
}

/// One survivor of the final list.
#[derive(Debug, Clone)]
pub struct FinalPath {
    pub message: BitVec,
    /// Full u-domain input; the codeword is its polar transform.
    pub input: BitVec,
    pub metric: f64,
}

/// Decoding outcome.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Final list sorted by (metric, path index).
    pub list: Vec<FinalPath>,
    /// Index into `list` of the selected candidate.
    pub selected: usize,
    /// Genie mode only: transmitted path survived to the final list.
    pub transmitted_in_list: Option<bool>,
    /// Per-step metrics of all surviving paths, when tracing.
    pub trace: Option<Vec<Vec<f64>>>,
}

impl DecodeResult {
    pub fn message(&self) -> &BitVec {
        &self.list[self.selected].message
    }

    pub fn selected_metric(&self) -> f64 {
        self.list[self.selected].metric
    }
}

/// A code prepared for repeated encode/decode calls: pre-transform,
/// v-domain layout and generator rows are computed once.
#[derive(Debug, Clone)]
pub struct PreparedCode {
    spec: CodeSpec,
    stages: usize,
    pretransform: PreTransform,
    layout: VLayout,
    rows: Vec<BitVec>,
}

impl PreparedCode {
    pub fn new(spec: &CodeSpec) -> Result<Self> {
        spec.validate()?;
        Ok(PreparedCode {
            spec: spec.clone(),
            stages: spec.stages(),
            pretransform: assemble_pretransform(spec)?,
            layout: v_layout(spec)?,
            rows: generator_rows(spec)?,
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn block_len(&self) -> usize {
        self.spec.block_len
    }

    pub fn message_len(&self) -> usize {
        self.spec.k
    }

    /// Encode by combining cached generator rows.
    pub fn encode(&self, message: &BitVec) -> Result<BitVec> {
        if message.len() != self.spec.k {
            return Err(Error::LengthMismatch {
                expected: self.spec.k,
                got: message.len(),
            });
        }
        let mut x = BitVec::zeros(self.spec.block_len);
        for (k, row) in self.rows.iter().enumerate() {
            if message.get(k) {
                x.xor_assign(row);
            }
        }
        Ok(x)
    }

    /// The u-domain input of a message, for genie comparisons.
    pub fn message_input(&self, message: &BitVec) -> Result<BitVec> {
        let v = message_to_v(&self.spec, message)?;
        self.pretransform.apply(&v)
    }

    pub fn decode(&self, llr: &[f64], list_size: usize, opts: &DecodeOptions) -> Result<DecodeResult> {
        if llr.len() != self.spec.block_len {
            return Err(Error::LengthMismatch {
                expected: self.spec.block_len,
                got: llr.len(),
            });
        }
        if list_size < 1 {
            return Err(Error::InvalidParameter("list size must be at least 1".into()));
        }
        let true_input = match &opts.genie_message {
            Some(msg) => Some(self.message_input(msg)?),
            None => None,
        };
        let mut lists = SclState::new(self, llr, list_size, opts.mode);
        let n = self.spec.block_len;
        let mut trace: Option<Vec<Vec<f64>>> = if opts.trace { Some(Vec::with_capacity(n)) } else { None };
        for step in 0..n {
            lists.advance(step);
            if let Some(t) = trace.as_mut() {
                t.push(lists.paths.iter().map(|p| p.metric).collect());
            }
        }
        let mut order: Vec<usize> = (0..lists.paths.len()).collect();
        order.sort_by(|&a, &b| {
            lists.paths[a]
                .metric
                .partial_cmp(&lists.paths[b].metric)
                .expect("finite metrics")
                .then(a.cmp(&b))
        });
        let list: Vec<FinalPath> = order
            .iter()
            .map(|&i| {
                let p = &lists.paths[i];
                FinalPath {
                    message: v_to_message(&self.spec, &self.layout, &p.v_hist),
                    input: p.u_hist.clone(),
                    metric: p.metric,
                }
            })
            .collect();

        let selected = match &self.spec.crc_poly {
            None => 0,
            Some(_) => order
                .iter()
                .enumerate()
                .find(|&(_, &i)| v_crc_ok(&self.spec, &self.layout, &lists.paths[i].v_hist))
                .map_or(0, |(rank, _)| rank),
        };

        let transmitted_in_list = true_input
            .as_ref()
            .map(|u| list.iter().any(|p| &p.input == u));

        Ok(DecodeResult {
            list,
            selected,
            transmitted_in_list,
            trace,
        })
    }
}

/// Decode a length-N LLR vector under the given spec.
pub fn scl_decode(
    spec: &CodeSpec,
    llr: &[f64],
    list_size: usize,
    opts: &DecodeOptions,
) -> Result<DecodeResult> {
    PreparedCode::new(spec)?.decode(llr, list_size, opts)
}

struct Path {
    /// Levels 0..stages-1 flattened; level l occupies
    /// [(1<<l)-1, (1<<(l+1))-1) and holds the llrs of the active node.
    levels: Vec<f64>,
    u_hist: BitVec,
    v_hist: BitVec,
    metric: f64,
}

impl Clone for Path {
    fn clone(&self) -> Self {
        Path {
            levels: self.levels.clone(),
            u_hist: self.u_hist.clone(),
            v_hist: self.v_hist.clone(),
            metric: self.metric,
        }
    }
}

struct SclState<'a> {
    code: &'a PreparedCode,
    channel: &'a [f64],
    list_size: usize,
    mode: MetricMode,
    paths: Vec<Path>,
}

#[inline]
fn f_approx(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) ^ (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

#[inline]
fn softplus_neg(x: f64) -> f64 {
    // ln(1 + e^{-x}), stable for both signs
    if x > 37.0 {
        (-x).exp()
    } else if x < -37.0 {
        -x
    } else {
        (-x).exp().ln_1p()
    }
}

#[inline]
fn f_exact(a: f64, b: f64) -> f64 {
    // boxplus: sgn(a)sgn(b) min(|a|,|b|) + ln((1+e^{-|a+b|})/(1+e^{-|a-b|}))
    f_approx(a, b) + softplus_neg((a + b).abs()) - softplus_neg((a - b).abs())
}

#[inline]
fn g_func(a: f64, b: f64, bit: bool) -> f64 {
    if bit {
        b - a
    } else {
        b + a
    }
}

#[inline]
fn level_offset(level: usize) -> usize {
    (1 << level) - 1
}

/// Refreshes the llr levels of one path for the given step and returns
/// the decision llr. Level l holds the 2^l llrs of the node the
/// successive cancellation schedule is visiting at that depth; the step
/// index selects which levels need a g-update (at its trailing-zero
/// level, fed by the polar transform of the just-finished sibling
/// sub-block) and which need fresh f-updates below it.
fn decision_llr(channel: &[f64], stages: usize, mode: MetricMode, path: &mut Path, step: usize) -> f64 {
    if stages == 0 {
        return channel[0];
    }
    let f = match mode {
        MetricMode::Approx => f_approx,
        MetricMode::Exact => f_exact,
    };
    let top = if step == 0 {
        stages
    } else {
        step.trailing_zeros() as usize
    };
    if step != 0 {
        let width = 1usize << top;
        let mut ps = BitVec::zeros(width);
        for (j, s) in (step - width..step).enumerate() {
            if path.u_hist.get(s) {
                ps.set(j, true);
            }
        }
        crate::transform::polar_transform_in_place(&mut ps);
        let off = level_offset(top);
        if top + 1 == stages {
            for j in 0..width {
                path.levels[off + j] = g_func(channel[j], channel[j + width], ps.get(j));
            }
        } else {
            let parent_off = level_offset(top + 1);
            for j in 0..width {
                let a = path.levels[parent_off + j];
                let b = path.levels[parent_off + j + width];
                path.levels[off + j] = g_func(a, b, ps.get(j));
            }
        }
    }
    let start = if step == 0 { stages } else { top };
    for level in (0..start).rev() {
        let width = 1usize << level;
        let off = level_offset(level);
        if level + 1 == stages {
            for j in 0..width {
                path.levels[off + j] = f(channel[j], channel[j + width]);
            }
        } else {
            let parent_off = level_offset(level + 1);
            for j in 0..width {
                path.levels[off + j] =
                    f(path.levels[parent_off + j], path.levels[parent_off + j + width]);
            }
        }
    }
    path.levels.first().copied().unwrap_or(channel[0])
}

#[inline]
fn penalty(mode: MetricMode, llr: f64, bit: bool) -> f64 {
    match mode {
        MetricMode::Approx => {
            let disagrees = if bit { llr >= 0.0 } else { llr < 0.0 };
            if disagrees {
                llr.abs()
            } else {
                0.0
            }
        }
        MetricMode::Exact => {
            let z = if bit { -llr } else { llr };
            softplus_neg(z)
        }
    }
}

impl<'a> SclState<'a> {
    fn new(code: &'a PreparedCode, channel: &'a [f64], list_size: usize, mode: MetricMode) -> Self {
        let n = code.spec.block_len;
        let path = Path {
            levels: vec![0.0; n.saturating_sub(1)],
            u_hist: BitVec::zeros(n),
            v_hist: BitVec::zeros(n),
            metric: 0.0,
        };
        SclState {
            code,
            channel,
            list_size,
            mode,
            paths: vec![path],
        }
    }

    fn advance(&mut self, step: usize) {
        let frozen = self.code.layout.frozen[step];
        let channel = self.channel;
        let stages = self.code.stages;
        let mode = self.mode;
        let decisions: Vec<f64> = self
            .paths
            .iter_mut()
            .map(|path| decision_llr(channel, stages, mode, path, step))
            .collect();

        if frozen {
            for (idx, path) in self.paths.iter_mut().enumerate() {
                let forced = self
                    .code
                    .pretransform
                    .dynamic_frozen_value(&path.v_hist, step);
                path.metric += penalty(self.mode, decisions[idx], forced);
                path.u_hist.set(step, forced);
                // v_step = u_step xor forced-sum = 0 by construction
                path.v_hist.set(step, false);
            }
            return;
        }

        // free position: branch every path
        let mut candidates: Vec<(f64, u32, bool)> = Vec::with_capacity(self.paths.len() * 2);
        for (idx, path) in self.paths.iter().enumerate() {
            for bit in [false, true] {
                candidates.push((
                    path.metric + penalty(self.mode, decisions[idx], bit),
                    idx as u32,
                    bit,
                ));
            }
        }
        let keep = self.list_size.min(candidates.len());
        if candidates.len() > keep {
            candidates.select_nth_unstable_by(keep - 1, |a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite metrics")
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            candidates.truncate(keep);
        }
        candidates.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite metrics")
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });

        let mut survivors_per_parent = vec![0u8; self.paths.len()];
        for &(_, parent, _) in &candidates {
            survivors_per_parent[parent as usize] += 1;
        }
        let mut taken: Vec<bool> = vec![false; self.paths.len()];
        let mut new_paths: Vec<Path> = Vec::with_capacity(candidates.len());
        for &(metric, parent, bit) in &candidates {
            let pidx = parent as usize;
            let mut path = if survivors_per_parent[pidx] == 2 && !taken[pidx] {
                taken[pidx] = true;
                self.paths[pidx].clone()
            } else {
                std::mem::replace(
                    &mut self.paths[pidx],
                    Path {
                        levels: Vec::new(),
                        u_hist: BitVec::zeros(0),
                        v_hist: BitVec::zeros(0),
                        metric: 0.0,
                    },
                )
            };
            path.metric = metric;
            path.u_hist.set(step, bit);
            let v_bit = bit
                ^ self
                    .code
                    .pretransform
                    .dynamic_frozen_value(&path.v_hist, step);
            path.v_hist.set(step, v_bit);
            new_paths.push(path);
        }
        self.paths = new_paths;
    }
}
