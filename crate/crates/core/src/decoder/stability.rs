//! Belief stability test (early termination) and trend-following rescaling
//! (self-adaption).

use crate::fixed::FixedFormat;
use crate::metrics::OpCounts;

use super::config::{DecoderConfig, Monitor, StabilityMeasure};
use super::state::{BeliefState, Domain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityMode {
    /// Only flag stable vectors.
    Terminate { epsilon: f64 },
    /// Flag stable vectors and push moving layer-to-resource entries further
    /// along their trend.
    Adapt { epsilon: f64, alpha: f64, beta: f64 },
}

impl StabilityMode {
    pub fn epsilon(&self) -> f64 {
        match *self {
            StabilityMode::Terminate { epsilon } | StabilityMode::Adapt { epsilon, .. } => epsilon,
        }
    }

    /// Mode implied by a configuration; self-adaption takes precedence.
    pub fn from_config(cfg: &DecoderConfig) -> Option<Self> {
        match (&cfg.self_adaption, &cfg.early_termination) {
            (Some(sa), _) => Some(StabilityMode::Adapt {
                epsilon: sa.epsilon,
                alpha: sa.alpha,
                beta: sa.beta,
            }),
            (None, Some(et)) => Some(StabilityMode::Terminate {
                epsilon: et.epsilon,
            }),
            (None, None) => None,
        }
    }
}

/// Everything the stability test needs besides the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityTest {
    pub mode: StabilityMode,
    pub monitor: Monitor,
    pub measure: StabilityMeasure,
    /// Below this magnitude a previous value is too small to divide by.
    pub floor: f64,
    pub quant: Option<FixedFormat>,
}

impl StabilityTest {
    pub fn from_config(cfg: &DecoderConfig) -> Option<Self> {
        StabilityMode::from_config(cfg).map(|mode| Self {
            mode,
            monitor: cfg.monitor,
            measure: cfg.stability_measure,
            floor: cfg.relative_floor,
            quant: cfg.quantization.map(|q| q.intermediate),
        })
    }
}

/// Relative change `(V − V_prev) / V_prev`, or `None` when `|V_prev| < floor`.
#[inline]
pub fn relative_change(current: f64, previous: f64, floor: f64) -> Option<f64> {
    if previous.abs() < floor {
        None
    } else {
        Some((current - previous) / previous)
    }
}

/// Whether one entry is stable under `ε`, falling back to an absolute test
/// `|V − V_prev| ≤ ε·floor` for tiny previous values.
#[inline]
pub fn entry_stable(current: f64, previous: f64, epsilon: f64, floor: f64) -> bool {
    match relative_change(current, previous, floor) {
        Some(r) => r.abs() <= epsilon,
        None => (current - previous).abs() <= epsilon * floor,
    }
}

/// Whether a whole vector is stable: `‖V − V_prev‖₂ ≤ ε·max(‖V_prev‖₂, floor)`.
pub fn vector_stable(current: &[f64], previous: &[f64], epsilon: f64, floor: f64) -> bool {
    let mut diff = 0.0;
    let mut base = 0.0;
    for (&c, &p) in current.iter().zip(previous) {
        diff += (c - p) * (c - p);
        base += p * p;
    }
    diff <= epsilon * epsilon * base.max(floor * floor)
}

fn count_test(measure: StabilityMeasure, m: usize, ops: &mut OpCounts) {
    let m = m as u64;
    match measure {
        StabilityMeasure::Entrywise => {
            ops.add += m;
            ops.div += m;
            ops.cmp += m;
        }
        StabilityMeasure::VectorNorm => {
            ops.add += 3 * m;
            ops.mul += 2 * m + 1;
            ops.cmp += 1;
        }
    }
}

fn is_stable(
    measure: StabilityMeasure,
    cur: &[f64],
    prev: &[f64],
    epsilon: f64,
    floor: f64,
) -> bool {
    match measure {
        StabilityMeasure::Entrywise => cur
            .iter()
            .zip(prev)
            .all(|(&c, &p)| entry_stable(c, p, epsilon, floor)),
        StabilityMeasure::VectorNorm => vector_stable(cur, prev, epsilon, floor),
    }
}

/// Resets `S`, tests every monitored message vector against the snapshot
/// and, in adapt mode, rescales the moving entries of unstable
/// layer-to-resource vectors. Returns whether `S` is all ones. Unmonitored
/// vectors count as stable.
///
/// Without a snapshot nothing is compared and `S` stays all zeros.
pub fn check_stability_and_adapt(
    state: &mut BeliefState,
    test: &StabilityTest,
    ops: &mut OpCounts,
) -> bool {
    let edges = state.num_edges();
    let m = state.m;
    state.stability.iter_mut().for_each(|s| *s = false);
    let Some((prev_r2l, prev_l2r)) = state.previous.take() else {
        return false;
    };
    let epsilon = test.mode.epsilon();
    let floor = test.floor;

    for e in 0..edges {
        let range = e * m..(e + 1) * m;
        state.stability[e] = if test.monitor.resource_to_layer() {
            count_test(test.measure, m, ops);
            is_stable(
                test.measure,
                &state.r2l[range.clone()],
                &prev_r2l[range],
                epsilon,
                floor,
            )
        } else {
            true
        };
    }

    for e in 0..edges {
        let range = e * m..(e + 1) * m;
        if !test.monitor.layer_to_resource() {
            state.stability[edges + e] = true;
            continue;
        }
        count_test(test.measure, m, ops);
        let mut stable = is_stable(
            test.measure,
            &state.l2r[range.clone()],
            &prev_l2r[range.clone()],
            epsilon,
            floor,
        );
        if let (false, StabilityMode::Adapt { alpha, beta, .. }) = (stable, test.mode) {
            let mut rescaled = false;
            for i in range.clone() {
                let factor = match relative_change(state.l2r[i], prev_l2r[i], floor) {
                    Some(r) if r >= epsilon => Some(alpha),
                    Some(r) if r <= -epsilon => Some(beta),
                    _ => None,
                };
                if test.measure == StabilityMeasure::VectorNorm {
                    ops.add += 1;
                    ops.div += 1;
                }
                ops.cmp += 2;
                if let Some(f) = factor {
                    let v = state.l2r[i] * f;
                    state.l2r[i] = test.quant.map_or(v, |q| q.snap(v));
                    ops.mul += 1;
                    rescaled = true;
                }
            }
            if rescaled && state.domain == Domain::Probability {
                renormalize(&mut state.l2r[range], test.quant, ops);
            }
            stable = false;
        }
        state.stability[edges + e] = stable;
    }

    state.all_stable()
}

fn renormalize(v: &mut [f64], quant: Option<FixedFormat>, ops: &mut OpCounts) {
    let sum: f64 = v.iter().sum();
    ops.add += v.len() as u64;
    if sum > 0.0 && sum.is_finite() {
        for x in v.iter_mut() {
            *x = quant.map_or(*x / sum, |q| q.snap(*x / sum));
        }
        ops.div += v.len() as u64;
    }
}
