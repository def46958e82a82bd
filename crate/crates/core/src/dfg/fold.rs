//! Folding transformation: `D_F(U→V) = N_f·w − P_U + v − u`.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::Dfg;

/// Operations time-multiplexed onto one hardware unit, one per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldingSet {
    pub name: String,
    /// Pipeline depth of the unit; falls back to each node's own depth.
    pub pipeline: Option<u32>,
    pub slots: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldingSpec {
    pub factor: usize,
    pub sets: Vec<FoldingSet>,
}

impl FoldingSpec {
    pub fn new(factor: usize, sets: Vec<FoldingSet>) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Graph("folding factor must be at least 1".into()));
        }
        let mut seen = HashMap::new();
        for set in &sets {
            if set.slots.len() != factor {
                return Err(Error::Graph(format!(
                    "folding set {} has {} slots, folding factor is {factor}",
                    set.name,
                    set.slots.len()
                )));
            }
            for id in set.slots.iter().flatten() {
                if let Some(prev) = seen.insert(id.clone(), set.name.clone()) {
                    return Err(Error::Graph(format!(
                        "node `{id}` appears in folding sets {prev} and {}",
                        set.name
                    )));
                }
            }
        }
        Ok(Self { factor, sets })
    }

    /// `(set index, slot)` of a node.
    pub fn placement(&self, id: &str) -> Option<(usize, usize)> {
        self.sets.iter().enumerate().find_map(|(s, set)| {
            set.slots
                .iter()
                .position(|slot| slot.as_deref() == Some(id))
                .map(|u| (s, u))
        })
    }
}

/// Folded delay of one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldedEdge {
    pub edge: usize,
    /// Source and destination slots.
    pub u: usize,
    pub v: usize,
    /// Source pipeline depth.
    pub pipeline: u32,
    pub delays: u32,
    pub folded: i64,
}

impl FoldedEdge {
    /// A negative folded delay needs retiming before the folding is
    /// realisable.
    pub fn needs_retiming(&self) -> bool {
        self.folded < 0
    }
}

/// Pipeline depth of node `idx` under `spec`.
pub fn pipeline_of(dfg: &Dfg, spec: &FoldingSpec, idx: usize) -> Result<u32> {
    let node = dfg.node(idx);
    let (s, _) = spec.placement(&node.id).ok_or_else(|| {
        Error::Graph(format!(
            "node `{}` is missing from the folding sets",
            node.id
        ))
    })?;
    Ok(spec.sets[s].pipeline.unwrap_or(node.pipeline))
}

/// Slot of node `idx` under `spec`.
pub fn slot_of(dfg: &Dfg, spec: &FoldingSpec, idx: usize) -> Result<usize> {
    let node = dfg.node(idx);
    spec.placement(&node.id).map(|(_, u)| u).ok_or_else(|| {
        Error::Graph(format!(
            "node `{}` is missing from the folding sets",
            node.id
        ))
    })
}

/// Folded delays of every edge, in edge order.
pub fn fold(dfg: &Dfg, spec: &FoldingSpec) -> Result<Vec<FoldedEdge>> {
    for set in &spec.sets {
        for id in set.slots.iter().flatten() {
            dfg.node_index(id).map_err(|_| {
                Error::Graph(format!(
                    "folding set {} names unknown node `{id}`",
                    set.name
                ))
            })?;
        }
    }
    let nf = spec.factor as i64;
    dfg.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let u = slot_of(dfg, spec, e.from)?;
            let v = slot_of(dfg, spec, e.to)?;
            let p = pipeline_of(dfg, spec, e.from)?;
            let folded = nf * e.delays as i64 - p as i64 + v as i64 - u as i64;
            Ok(FoldedEdge {
                edge: i,
                u,
                v,
                pipeline: p,
                delays: e.delays,
                folded,
            })
        })
        .collect()
}
