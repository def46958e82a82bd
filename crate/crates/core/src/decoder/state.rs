use crate::system::ScmaSystem;

use super::config::Algorithm;

/// Value domain of the message tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Probability,
    Log,
}

impl From<Algorithm> for Domain {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Dmpa => Domain::Probability,
            Algorithm::MaxLog => Domain::Log,
        }
    }
}

/// Edge numbering of the factor graph.
///
/// Edges are numbered resource-major: the edges of resource `k` are
/// contiguous and follow its users in ascending order. Symbol combinations at
/// a resource are numbered in mixed radix `M` with the lowest-numbered user as
/// the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphLayout {
    m: usize,
    resource_edges: Vec<Vec<usize>>,
    user_edges: Vec<Vec<usize>>,
    edge_user: Vec<usize>,
    edge_resource: Vec<usize>,
    /// Digits of every combination, indexed by degree.
    digits: Vec<Vec<Vec<usize>>>,
}

impl GraphLayout {
    pub fn new(system: &ScmaSystem) -> Self {
        let graph = system.graph();
        let mut resource_edges = Vec::with_capacity(system.k());
        let mut user_edges = vec![Vec::new(); system.j()];
        let mut edge_user = Vec::new();
        let mut edge_resource = Vec::new();
        for k in 0..system.k() {
            let mut edges = Vec::new();
            for &j in graph.users_of(k) {
                let e = edge_user.len();
                edge_user.push(j);
                edge_resource.push(k);
                edges.push(e);
                user_edges[j].push(e);
            }
            resource_edges.push(edges);
        }
        let max_degree = graph.degrees().iter().copied().max().unwrap_or(0);
        let m = system.m();
        let digits = (0..=max_degree)
            .map(|d| {
                (0..m.pow(d as u32))
                    .map(|mut c| {
                        let mut ds = vec![0; d];
                        for slot in ds.iter_mut().rev() {
                            *slot = c % m;
                            c /= m;
                        }
                        ds
                    })
                    .collect()
            })
            .collect();
        Self {
            m,
            resource_edges,
            user_edges,
            edge_user,
            edge_resource,
            digits,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edge_user.len()
    }

    pub fn resource_edges(&self, k: usize) -> &[usize] {
        &self.resource_edges[k]
    }

    pub fn user_edges(&self, j: usize) -> &[usize] {
        &self.user_edges[j]
    }

    pub fn edge_user(&self, e: usize) -> usize {
        self.edge_user[e]
    }

    pub fn edge_resource(&self, e: usize) -> usize {
        self.edge_resource[e]
    }

    /// Digits of every combination for a node of degree `d`.
    pub fn combinations(&self, d: usize) -> &[Vec<usize>] {
        &self.digits[d]
    }
}

/// All decoder state for one frame.
#[derive(Debug, Clone)]
pub struct BeliefState {
    pub domain: Domain,
    pub m: usize,
    /// Initial metric per resource and symbol combination.
    pub init: Vec<Vec<f64>>,
    /// `I_{R→L}`, `M` entries per edge.
    pub r2l: Vec<f64>,
    /// `I_{L→R}`, `M` entries per edge.
    pub l2r: Vec<f64>,
    /// Previous-iteration snapshot of `(r2l, l2r)`.
    pub previous: Option<(Vec<f64>, Vec<f64>)>,
    /// One flag per message vector: `r2l` edges first, then `l2r` edges.
    pub stability: Vec<bool>,
    /// Layer vectors that collapsed to zero and were reset to uniform.
    pub underflow_fallbacks: u64,
}

impl BeliefState {
    /// Fresh state with uniform layer-to-resource messages.
    pub fn new(domain: Domain, m: usize, num_edges: usize, init: Vec<Vec<f64>>) -> Self {
        let uniform = match domain {
            Domain::Probability => 1.0 / m as f64,
            Domain::Log => 0.0,
        };
        Self {
            domain,
            m,
            init,
            r2l: vec![0.0; num_edges * m],
            l2r: vec![uniform; num_edges * m],
            previous: None,
            stability: vec![false; 2 * num_edges],
            underflow_fallbacks: 0,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.r2l.len() / self.m
    }

    pub fn r2l_vec(&self, e: usize) -> &[f64] {
        &self.r2l[e * self.m..(e + 1) * self.m]
    }

    pub fn l2r_vec(&self, e: usize) -> &[f64] {
        &self.l2r[e * self.m..(e + 1) * self.m]
    }

    pub fn snapshot(&mut self) {
        self.previous = Some((self.r2l.clone(), self.l2r.clone()));
    }

    pub fn all_stable(&self) -> bool {
        self.stability.iter().all(|&s| s)
    }
}
