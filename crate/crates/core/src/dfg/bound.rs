//! Loop bounds and the iteration bound `T∞ = max over loops of t_l / w_l`.
//!
//! Loops are enumerated exactly with Johnson's algorithm, walking edges so
//! parallel edges give distinct loops. That is exponential in the worst case
//! and meant for hand-sized graphs; large graphs would want a cycle-ratio
//! search instead.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{Dfg, Rational};

/// One directed loop with its bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopBound {
    /// Nodes in loop order, starting from the smallest index.
    pub nodes: Vec<usize>,
    /// Edges in loop order; `edges[i]` leaves `nodes[i]`.
    pub edges: Vec<usize>,
    pub time: Rational,
    pub delays: u32,
    pub bound: Rational,
    /// Bound in terms of the time symbols, e.g. `(2·T_A+T_C)/4`.
    pub symbolic: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationBound {
    pub bound: Rational,
    /// Index into `loops` of the first loop attaining the bound.
    pub critical: Option<usize>,
    pub loops: Vec<LoopBound>,
    pub note: Option<String>,
}

impl IterationBound {
    pub fn critical_loop(&self) -> Option<&LoopBound> {
        self.critical.map(|i| &self.loops[i])
    }
}

/// Every simple directed loop, as edge sequences. Each loop starts at its
/// smallest node index; loops are listed by start node.
pub fn simple_cycles(dfg: &Dfg) -> Vec<Vec<usize>> {
    let n = dfg.nodes().len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in dfg.edges().iter().enumerate() {
        adj[e.from].push(i);
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut search = Johnson {
            dfg,
            adj: &adj,
            start: s,
            blocked: vec![false; n],
            blocked_by: vec![Vec::new(); n],
            stack: Vec::new(),
            out: &mut out,
        };
        search.circuit(s);
    }
    out
}

struct Johnson<'a> {
    dfg: &'a Dfg,
    adj: &'a [Vec<usize>],
    start: usize,
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    out: &'a mut Vec<Vec<usize>>,
}

impl Johnson<'_> {
    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.blocked[v] = true;
        for &e in &self.adj[v] {
            let w = self.dfg.edges()[e].to;
            if w < self.start {
                continue;
            }
            if w == self.start {
                self.stack.push(e);
                self.out.push(self.stack.clone());
                self.stack.pop();
                found = true;
            } else if !self.blocked[w] {
                self.stack.push(e);
                if self.circuit(w) {
                    found = true;
                }
                self.stack.pop();
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &e in &self.adj[v] {
                let w = self.dfg.edges()[e].to;
                if w >= self.start && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        found
    }

    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        for w in std::mem::take(&mut self.blocked_by[v]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

/// Computation time of a node, from its explicit time or its class symbol.
pub fn node_time(dfg: &Dfg, idx: usize) -> Result<Rational> {
    let node = dfg.node(idx);
    if let Some(t) = node.time {
        return Ok(t);
    }
    match node.op.time_symbol() {
        None => Ok(Rational::from_integer(0)),
        Some(sym) => dfg
            .timings()
            .get(&sym)
            .copied()
            .ok_or_else(|| Error::Graph(format!("no value for {sym} (node `{}`)", node.id))),
    }
}

fn symbolic(dfg: &Dfg, nodes: &[usize], delays: u32) -> String {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    let mut constant = Rational::from_integer(0);
    for &i in nodes {
        let node = dfg.node(i);
        match (node.time, node.op.time_symbol()) {
            (Some(t), _) => constant += t,
            (None, Some(sym)) => *counts.entry(sym).or_default() += 1,
            (None, None) => {}
        }
    }
    let mut terms: Vec<String> = counts
        .into_iter()
        .map(|(s, c)| if c == 1 { s } else { format!("{c}·{s}") })
        .collect();
    if constant != Rational::from_integer(0) || terms.is_empty() {
        terms.push(constant.to_string());
    }
    let sum = terms.join("+");
    match (delays, terms.len()) {
        (1, _) => sum,
        (_, 1) => format!("{sum}/{delays}"),
        _ => format!("({sum})/{delays}"),
    }
}

/// Exact iteration bound with every loop's bound.
pub fn iteration_bound(dfg: &Dfg) -> Result<IterationBound> {
    let cycles = simple_cycles(dfg);
    if cycles.is_empty() {
        return Ok(IterationBound {
            bound: Rational::from_integer(0),
            critical: None,
            loops: Vec::new(),
            note: Some("graph is acyclic; the iteration bound is 0".into()),
        });
    }
    let mut loops = Vec::with_capacity(cycles.len());
    for edges in cycles {
        let nodes: Vec<usize> = edges.iter().map(|&e| dfg.edges()[e].from).collect();
        let delays: u32 = edges.iter().map(|&e| dfg.edges()[e].delays).sum();
        if delays == 0 {
            return Err(Error::ZeroDelayCycle(
                nodes.iter().map(|&i| dfg.node(i).id.clone()).collect(),
            ));
        }
        let mut time = Rational::from_integer(0);
        for &i in &nodes {
            time += node_time(dfg, i)?;
        }
        let bound = time / Rational::from_integer(delays as i64);
        let symbolic = symbolic(dfg, &nodes, delays);
        loops.push(LoopBound {
            nodes,
            edges,
            time,
            delays,
            bound,
            symbolic,
        });
    }
    let mut critical = 0;
    for (i, l) in loops.iter().enumerate() {
        if l.bound > loops[critical].bound {
            critical = i;
        }
    }
    Ok(IterationBound {
        bound: loops[critical].bound,
        critical: Some(critical),
        loops,
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::OpClass;

    #[test]
    fn single_node_loop() {
        let mut g = Dfg::new();
        g.add_node("a", OpClass::Adder, 0, Some(Rational::from_integer(5)))
            .unwrap();
        g.add_edge("a", "a", 1).unwrap();
        let b = iteration_bound(&g).unwrap();
        assert_eq!(b.bound, Rational::from_integer(5));
        assert_eq!(b.loops[0].symbolic, "5");
    }

    #[test]
    fn acyclic_graph_has_zero_bound() {
        let mut g = Dfg::new();
        g.add_node("a", OpClass::Adder, 0, None).unwrap();
        g.add_node("b", OpClass::Adder, 0, None).unwrap();
        g.add_edge("a", "b", 0).unwrap();
        let b = iteration_bound(&g).unwrap();
        assert_eq!(b.bound, Rational::from_integer(0));
        assert!(b.note.is_some());
        assert!(b.critical_loop().is_none());
    }

    #[test]
    fn zero_delay_loop_is_rejected() {
        let mut g = Dfg::new();
        g.add_node("a", OpClass::Adder, 0, None).unwrap();
        g.add_node("b", OpClass::Comparator, 0, None).unwrap();
        g.add_edge("a", "b", 0).unwrap();
        g.add_edge("b", "a", 0).unwrap();
        match iteration_bound(&g) {
            Err(Error::ZeroDelayCycle(ids)) => {
                assert_eq!(ids, vec!["a".to_string(), "b".to_string()])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parallel_edges_are_distinct_loops() {
        let mut g = Dfg::new();
        g.add_node("a", OpClass::Adder, 0, None).unwrap();
        g.add_node("b", OpClass::Comparator, 0, None).unwrap();
        g.add_edge("a", "b", 1).unwrap();
        g.add_edge("a", "b", 2).unwrap();
        g.add_edge("b", "a", 0).unwrap();
        g.set_timing("T_A", Rational::from_integer(2));
        g.set_timing("T_C", Rational::from_integer(1));
        let b = iteration_bound(&g).unwrap();
        assert_eq!(b.loops.len(), 2);
        assert_eq!(b.bound, Rational::from_integer(3));
        assert_eq!(b.loops[1].symbolic, "(T_A+T_C)/2");
    }

    #[test]
    fn missing_timing_is_an_error() {
        let mut g = Dfg::new();
        g.add_node("a", OpClass::Swopper, 0, None).unwrap();
        g.add_edge("a", "a", 1).unwrap();
        assert!(iteration_bound(&g).is_err());
    }
}
