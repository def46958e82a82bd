//! Lifetime analysis of the values a folded schedule must hold in registers.
//!
//! Node `U` in slot `u` with pipeline depth `P_U` produces its value at
//! `T_in = u + P_U`. The last consumer reads it `max D_F` cycles later, so the
//! value occupies a register during the cycles `[T_in, T_out)` with
//! `T_out = T_in + max D_F`. The schedule repeats every `N_f` cycles, so the
//! number of live values is counted per cycle modulo `N_f`.

use crate::error::{Error, Result};

use super::fold::{pipeline_of, slot_of, FoldedEdge, FoldingSpec};
use super::Dfg;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifetime {
    pub node: usize,
    pub label: String,
    pub tin: i64,
    pub tout: i64,
    /// Read times `T_in + D_F` of the consumers reached through registers.
    pub reads: Vec<i64>,
}

impl Lifetime {
    pub fn duration(&self) -> i64 {
        self.tout - self.tin
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LifetimeTable {
    pub period: usize,
    /// One entry per node with outgoing edges, in node order.
    pub values: Vec<Lifetime>,
}

impl LifetimeTable {
    pub fn new(period: usize, values: Vec<Lifetime>) -> Result<Self> {
        if period == 0 {
            return Err(Error::Graph("period must be at least 1".into()));
        }
        for v in &values {
            if v.tout < v.tin {
                return Err(Error::InfeasibleLifetime(v.label.clone()));
            }
        }
        Ok(Self { period, values })
    }

    /// Values live in each cycle of the period.
    pub fn live_counts(&self) -> Vec<usize> {
        let p = self.period as i64;
        let mut counts = vec![0; self.period];
        for v in &self.values {
            for t in v.tin..v.tout {
                counts[t.rem_euclid(p) as usize] += 1;
            }
        }
        counts
    }

    /// Peak of the live-count histogram.
    pub fn min_registers(&self) -> usize {
        self.live_counts().into_iter().max().unwrap_or(0)
    }

    pub fn total_duration(&self) -> i64 {
        self.values.iter().map(Lifetime::duration).sum()
    }
}

pub fn lifetime_analysis(
    dfg: &Dfg,
    spec: &FoldingSpec,
    folded: &[FoldedEdge],
) -> Result<LifetimeTable> {
    if let Some(bad) = folded.iter().find(|f| f.needs_retiming()) {
        return Err(Error::Graph(format!(
            "edge {} has folded delay {}; retime before lifetime analysis",
            dfg.edge_label(bad.edge),
            bad.folded
        )));
    }
    let mut values = Vec::new();
    for idx in 0..dfg.nodes().len() {
        let outs: Vec<&FoldedEdge> = folded
            .iter()
            .filter(|f| dfg.edges()[f.edge].from == idx)
            .collect();
        if outs.is_empty() {
            continue;
        }
        let tin = slot_of(dfg, spec, idx)? as i64 + pipeline_of(dfg, spec, idx)? as i64;
        let longest = outs.iter().map(|f| f.folded).max().unwrap_or(0);
        let mut reads: Vec<i64> = outs
            .iter()
            .filter(|f| f.folded > 0)
            .map(|f| tin + f.folded)
            .collect();
        reads.sort_unstable();
        reads.dedup();
        values.push(Lifetime {
            node: idx,
            label: dfg.node(idx).id.clone(),
            tin,
            tout: tin + longest,
            reads,
        });
    }
    LifetimeTable::new(spec.factor, values)
}
