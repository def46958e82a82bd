//! Node updates and symbol judgement, generalised to any resource degree
//! `d_f[k]` and any layer degree `N`.

use crate::fixed::FixedFormat;
use crate::metrics::OpCounts;

use super::state::{BeliefState, Domain, GraphLayout};

/// Outgoing messages of resource node `k` toward each neighbouring layer.
///
/// Log domain: `max_{others} (P_k + Σ_{i≠a} I_{L_i→R_k}(m_i))`.
/// Probability domain: `Σ_{others} P_k · Π_{i≠a} I_{L_i→R_k}(m_i)`.
pub fn resource_node_update(
    state: &mut BeliefState,
    layout: &GraphLayout,
    k: usize,
    quant: Option<FixedFormat>,
    ops: &mut OpCounts,
) {
    let m = state.m;
    let edges = layout.resource_edges(k);
    let d = edges.len();
    if d == 0 {
        return;
    }
    let sentinel = match state.domain {
        Domain::Log => f64::NEG_INFINITY,
        Domain::Probability => 0.0,
    };
    let mut out = vec![sentinel; d * m];
    let p = &state.init[k];
    let l2r = &state.l2r;
    let combos = layout.combinations(d);

    match state.domain {
        Domain::Log => {
            for (c, digits) in combos.iter().enumerate() {
                for a in 0..d {
                    let mut cand = p[c];
                    for i in (0..d).filter(|&i| i != a) {
                        cand += l2r[edges[i] * m + digits[i]];
                    }
                    let slot = &mut out[a * m + digits[a]];
                    if cand > *slot {
                        *slot = cand;
                    }
                }
            }
            let candidates = (combos.len() * d) as u64;
            ops.add += candidates * (d as u64 - 1);
            ops.max += candidates;
        }
        Domain::Probability => {
            for (c, digits) in combos.iter().enumerate() {
                for a in 0..d {
                    let mut cand = p[c];
                    for i in (0..d).filter(|&i| i != a) {
                        cand *= l2r[edges[i] * m + digits[i]];
                    }
                    out[a * m + digits[a]] += cand;
                }
            }
            let candidates = (combos.len() * d) as u64;
            ops.mul += candidates * (d as u64 - 1);
            ops.add += candidates;
        }
    }

    for (a, &e) in edges.iter().enumerate() {
        for s in 0..m {
            let v = out[a * m + s];
            state.r2l[e * m + s] = quant.map_or(v, |f| f.snap(v));
        }
    }
}

/// Outgoing messages of layer node `j` toward each of its resources.
///
/// Log domain: sum of the other incoming vectors, optionally shifted so its
/// maximum is zero. Probability domain: normalized product of the other
/// incoming vectors; an all-zero product falls back to uniform.
pub fn layer_node_update(
    state: &mut BeliefState,
    layout: &GraphLayout,
    j: usize,
    max_shift: bool,
    quant: Option<FixedFormat>,
    ops: &mut OpCounts,
) {
    let m = state.m;
    let edges = layout.user_edges(j);
    let n = edges.len();
    let mut buf = vec![0.0; m];
    for a in 0..n {
        let others: Vec<usize> = (0..n).filter(|&b| b != a).map(|b| edges[b]).collect();
        match state.domain {
            Domain::Log => {
                buf.fill(0.0);
                for (idx, &e) in others.iter().enumerate() {
                    for s in 0..m {
                        buf[s] = if idx == 0 {
                            state.r2l[e * m + s]
                        } else {
                            buf[s] + state.r2l[e * m + s]
                        };
                    }
                }
                ops.add += (m * others.len().saturating_sub(1)) as u64;
                if max_shift && !others.is_empty() {
                    let mut top = f64::NEG_INFINITY;
                    for &v in &buf {
                        top = top.max(v);
                    }
                    ops.max += m as u64;
                    for v in buf.iter_mut() {
                        *v -= top;
                    }
                    ops.add += m as u64;
                }
            }
            Domain::Probability => {
                if others.is_empty() {
                    buf.fill(1.0 / m as f64);
                } else {
                    for (idx, &e) in others.iter().enumerate() {
                        for s in 0..m {
                            buf[s] = if idx == 0 {
                                state.r2l[e * m + s]
                            } else {
                                buf[s] * state.r2l[e * m + s]
                            };
                        }
                    }
                    ops.mul += (m * (others.len() - 1)) as u64;
                    let mut sum = 0.0;
                    for &v in &buf {
                        sum += v;
                    }
                    ops.add += m as u64;
                    if sum > 0.0 && sum.is_finite() {
                        for v in buf.iter_mut() {
                            *v /= sum;
                        }
                        ops.div += m as u64;
                    } else {
                        buf.fill(1.0 / m as f64);
                        state.underflow_fallbacks += 1;
                    }
                }
            }
        }
        let e = edges[a];
        for s in 0..m {
            state.l2r[e * m + s] = quant.map_or(buf[s], |f| f.snap(buf[s]));
        }
        ops.swop += m as u64;
    }
}

/// Combines the resource-to-layer messages of every user into `Q_{L_j}`.
pub fn layer_beliefs(
    state: &BeliefState,
    layout: &GraphLayout,
    num_users: usize,
    ops: &mut OpCounts,
) -> Vec<Vec<f64>> {
    let m = state.m;
    (0..num_users)
        .map(|j| {
            let edges = layout.user_edges(j);
            let mut q = match state.domain {
                Domain::Log => vec![0.0; m],
                Domain::Probability => vec![1.0; m],
            };
            for (idx, &e) in edges.iter().enumerate() {
                for s in 0..m {
                    let v = state.r2l[e * m + s];
                    q[s] = match (idx, state.domain) {
                        (0, _) => v,
                        (_, Domain::Log) => q[s] + v,
                        (_, Domain::Probability) => q[s] * v,
                    };
                }
            }
            let combines = (m * edges.len().saturating_sub(1)) as u64;
            match state.domain {
                Domain::Log => ops.add += combines,
                Domain::Probability => ops.mul += combines,
            }
            q
        })
        .collect()
}

/// Index of the largest belief; ties go to the smallest symbol index.
pub fn argmax(q: &[f64], ops: &mut OpCounts) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (s, &v) in q.iter().enumerate() {
        if v > best_value {
            best_value = v;
            best = s;
        }
    }
    ops.cmp += q.len() as u64;
    best
}

/// Per-user beliefs and decisions.
pub fn judge(
    state: &BeliefState,
    layout: &GraphLayout,
    num_users: usize,
    ops: &mut OpCounts,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let q = layer_beliefs(state, layout, num_users, ops);
    let decisions = q.iter().map(|qj| argmax(qj, ops)).collect();
    (q, decisions)
}
