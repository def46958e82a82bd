//! Data-flow-graph scheduling analysis: folding, lifetime analysis,
//! forward-backward register allocation and the iteration bound.

pub mod alloc;
pub mod bound;
pub mod fold;
pub mod lifetime;
pub mod parse;
pub mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub use alloc::{allocate_registers, Allocation, ValuePath};
pub use bound::{iteration_bound, simple_cycles, IterationBound, LoopBound};
pub use fold::{fold, FoldedEdge, FoldingSet, FoldingSpec};
pub use lifetime::{lifetime_analysis, Lifetime, LifetimeTable};
pub use parse::{parse_dfg, parse_folding_spec};

pub type Rational = Ratio<i64>;

/// Kind of hardware operation a node performs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpClass {
    Input,
    Adder,
    Comparator,
    Multiplier,
    Swopper,
    Other(String),
}

impl OpClass {
    pub fn parse(name: &str) -> Self {
        match name.to_ascii_lowercase().as_str() {
            "input" | "in" => OpClass::Input,
            "adder" | "add" => OpClass::Adder,
            "comparator" | "cmp" => OpClass::Comparator,
            "multiplier" | "mul" => OpClass::Multiplier,
            "swopper" | "swap" | "swop" => OpClass::Swopper,
            _ => OpClass::Other(name.to_string()),
        }
    }

    /// Symbol of the class's computation time, e.g. `T_A` for adders.
    /// Inputs take no time and have no symbol.
    pub fn time_symbol(&self) -> Option<String> {
        match self {
            OpClass::Input => None,
            OpClass::Adder => Some("T_A".into()),
            OpClass::Comparator => Some("T_C".into()),
            OpClass::Multiplier => Some("T_M".into()),
            OpClass::Swopper => Some("T_S".into()),
            OpClass::Other(name) => Some(format!("T_{name}")),
        }
    }
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpClass::Input => f.write_str("input"),
            OpClass::Adder => f.write_str("adder"),
            OpClass::Comparator => f.write_str("comparator"),
            OpClass::Multiplier => f.write_str("multiplier"),
            OpClass::Swopper => f.write_str("swopper"),
            OpClass::Other(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub op: OpClass,
    /// Pipeline stages of the node's own unit.
    pub pipeline: u32,
    /// Explicit computation time; otherwise the class symbol is used.
    pub time: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub delays: u32,
}

/// A data-flow graph with optional numeric values for the time symbols.
#[derive(Debug, Clone, Default)]
pub struct Dfg {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    timings: BTreeMap<String, Rational>,
}

impl Dfg {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(
        &mut self,
        id: &str,
        op: OpClass,
        pipeline: u32,
        time: Option<Rational>,
    ) -> Result<usize> {
        if self.index.contains_key(id) {
            return Err(Error::Graph(format!("duplicate node id `{id}`")));
        }
        if let Some(t) = time {
            if t < Rational::from_integer(0) {
                return Err(Error::Graph(format!(
                    "node `{id}` has negative computation time {t}"
                )));
            }
        }
        let idx = self.nodes.len();
        self.nodes.push(Node {
            id: id.to_string(),
            op,
            pipeline,
            time,
        });
        self.index.insert(id.to_string(), idx);
        Ok(idx)
    }

    pub fn add_edge(&mut self, from: &str, to: &str, delays: u32) -> Result<usize> {
        let f = self.node_index(from)?;
        let t = self.node_index(to)?;
        self.edges.push(Edge {
            from: f,
            to: t,
            delays,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn set_timing(&mut self, symbol: &str, value: Rational) {
        self.timings.insert(symbol.to_string(), value);
    }

    pub fn node_index(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::Graph(format!("unknown node `{id}`")))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn timings(&self) -> &BTreeMap<String, Rational> {
        &self.timings
    }

    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == node)
    }

    /// Edge label `from→to`.
    pub fn edge_label(&self, e: usize) -> String {
        let edge = &self.edges[e];
        format!("{}→{}", self.nodes[edge.from].id, self.nodes[edge.to].id)
    }
}
