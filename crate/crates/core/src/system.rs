//! SCMA system model.
//!
//! A system has `K` orthogonal resources shared by `J` users (layers). Each
//! user spreads an `M`-ary symbol onto `N ≤ K` of the resources through a
//! binary mapping matrix, so its codewords are length-`K` complex vectors that
//! vanish outside the user's support. Stacking the support indicators gives
//! the `K × J` factor graph matrix used by the decoders.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `K × N` binary matrix formed by inserting `K − N` zero rows into `I_N`.
///
/// Stored as one entry per row: `Some(c)` when row `r` carries the `1` of
/// column `c`, `None` for an inserted zero row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MappingMatrix {
    n: usize,
    rows: Vec<Option<usize>>,
}

impl MappingMatrix {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Column carrying the `1` of row `r`, if any.
    pub fn column_of(&self, r: usize) -> Option<usize> {
        self.rows[r]
    }

    /// Dense `K × N` 0/1 representation.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0u8; self.n];
                if let Some(c) = row {
                    dense[*c] = 1;
                }
                dense
            })
            .collect()
    }

    /// Indicator `f = diag(V Vᵀ)`.
    pub fn indicator(&self) -> Vec<bool> {
        self.rows.iter().map(Option::is_some).collect()
    }

    /// Rows carrying a `1`, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.k()).filter(|&r| self.rows[r].is_some()).collect()
    }
}

/// Builds `I_N` with all-zero rows inserted at `zero_rows`.
///
/// `zero_rows` must be strictly increasing, inside `[0, K)` and have exactly
/// `K − N` entries.
pub fn build_mapping_matrix(k: usize, n: usize, zero_rows: &[usize]) -> Result<MappingMatrix> {
    if n == 0 || n > k {
        return Err(Error::Construction(format!(
            "need 0 < N ≤ K, got K = {k}, N = {n}"
        )));
    }
    if zero_rows.len() != k - n {
        return Err(Error::Construction(format!(
            "expected {} zero-row positions, got {}",
            k - n,
            zero_rows.len()
        )));
    }
    if let Some(&bad) = zero_rows.iter().find(|&&r| r >= k) {
        return Err(Error::Construction(format!(
            "zero-row position {bad} outside [0, {k})"
        )));
    }
    if zero_rows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Construction(format!(
            "zero-row positions {zero_rows:?} are not strictly increasing"
        )));
    }

    let mut rows = Vec::with_capacity(k);
    let mut next_col = 0;
    let mut zeros = zero_rows.iter().peekable();
    for r in 0..k {
        if zeros.peek() == Some(&&r) {
            zeros.next();
            rows.push(None);
        } else {
            rows.push(Some(next_col));
            next_col += 1;
        }
    }
    Ok(MappingMatrix { n, rows })
}

/// One user's mapping matrix and codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct UserLayer {
    mapping: MappingMatrix,
    zero_rows: Vec<usize>,
    codewords: Vec<Vec<Complex64>>,
}

impl UserLayer {
    /// Validates and builds a layer. `codewords` holds `M` full length-`K`
    /// vectors.
    pub fn new(
        k: usize,
        n: usize,
        zero_rows: Vec<usize>,
        codewords: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let mapping = build_mapping_matrix(k, n, &zero_rows)?;
        let layer = Self {
            mapping,
            zero_rows,
            codewords,
        };
        // The user index is only known once the layer joins a system.
        layer.check(0).map_err(|e| match e {
            Error::InvariantViolation { reason, .. } => Error::Construction(reason),
            other => other,
        })?;
        Ok(layer)
    }

    fn check(&self, user: usize) -> Result<()> {
        let violation = |reason: String| Error::InvariantViolation { user, reason };
        let f = self.mapping.indicator();
        for (m, cw) in self.codewords.iter().enumerate() {
            if cw.len() != f.len() {
                return Err(Error::DimensionMismatch(format!(
                    "user {user} codeword {m} has length {}, expected K = {}",
                    cw.len(),
                    f.len()
                )));
            }
            for (r, (&value, &active)) in cw.iter().zip(&f).enumerate() {
                if !active && value != Complex64::new(0.0, 0.0) {
                    return Err(violation(format!(
                        "codeword {m} is nonzero at row {r} outside the support"
                    )));
                }
                if active && value == Complex64::new(0.0, 0.0) {
                    return Err(violation(format!(
                        "codeword {m} is zero at support row {r}"
                    )));
                }
                if !value.re.is_finite() || !value.im.is_finite() {
                    return Err(violation(format!("codeword {m} has a non-finite entry")));
                }
            }
        }
        for a in 0..self.codewords.len() {
            for b in a + 1..self.codewords.len() {
                if self.codewords[a] == self.codewords[b] {
                    return Err(violation(format!("codewords {a} and {b} are identical")));
                }
            }
        }
        Ok(())
    }

    pub fn mapping(&self) -> &MappingMatrix {
        &self.mapping
    }

    pub fn zero_rows(&self) -> &[usize] {
        &self.zero_rows
    }

    pub fn indicator(&self) -> Vec<bool> {
        self.mapping.indicator()
    }

    pub fn codewords(&self) -> &[Vec<Complex64>] {
        &self.codewords
    }

    pub fn codeword(&self, m: usize) -> &[Complex64] {
        &self.codewords[m]
    }

    /// Mean codeword energy `E‖x‖²` under uniform symbols.
    pub fn mean_energy(&self) -> f64 {
        let total: f64 = self
            .codewords
            .iter()
            .map(|cw| cw.iter().map(Complex64::norm_sqr).sum::<f64>())
            .sum();
        total / self.codewords.len() as f64
    }
}

/// Bipartite graph between resources (rows) and users (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    matrix: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    resource_users: Vec<Vec<usize>>,
    user_resources: Vec<Vec<usize>>,
}

impl FactorGraph {
    /// `F[k][j]`.
    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.matrix
    }

    /// Resource degrees `d_f`, one entry per resource.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Users attached to resource `k`, ascending.
    pub fn users_of(&self, k: usize) -> &[usize] {
        &self.resource_users[k]
    }

    /// Resources occupied by user `j`, ascending.
    pub fn resources_of(&self, j: usize) -> &[usize] {
        &self.user_resources[j]
    }

    pub fn num_resources(&self) -> usize {
        self.matrix.len()
    }

    pub fn num_users(&self) -> usize {
        self.user_resources.len()
    }

    pub fn num_edges(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// Assembles `F = (f_1, …, f_J)` and the resource degrees.
pub fn derive_factor_graph(system: &ScmaSystem) -> FactorGraph {
    graph_from_layers(system.k, &system.users)
}

fn graph_from_layers(k: usize, users: &[UserLayer]) -> FactorGraph {
    let j = users.len();
    let mut matrix = vec![vec![0u8; j]; k];
    let mut resource_users = vec![Vec::new(); k];
    let mut user_resources = vec![Vec::new(); j];
    for (col, user) in users.iter().enumerate() {
        for (row, active) in user.indicator().into_iter().enumerate() {
            if active {
                matrix[row][col] = 1;
                resource_users[row].push(col);
                user_resources[col].push(row);
            }
        }
    }
    let degrees = resource_users.iter().map(Vec::len).collect();
    FactorGraph {
        matrix,
        degrees,
        resource_users,
        user_resources,
    }
}

/// Validated SCMA system. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ScmaSystem {
    k: usize,
    n: usize,
    m: usize,
    users: Vec<UserLayer>,
    graph: FactorGraph,
}

impl ScmaSystem {
    /// Validates the system-level invariants and derives the factor graph.
    pub fn new(k: usize, n: usize, m: usize, users: Vec<UserLayer>) -> Result<Self> {
        if n == 0 || n > k {
            return Err(Error::Construction(format!(
                "need 0 < N ≤ K, got K = {k}, N = {n}"
            )));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::Construction(format!(
                "M = {m} is not a power of two ≥ 2"
            )));
        }
        if users.is_empty() {
            return Err(Error::Construction("system has no users".into()));
        }
        if users.len() as u128 > binomial(k, n) {
            return Err(Error::Construction(format!(
                "J = {} exceeds C({k}, {n}) = {}",
                users.len(),
                binomial(k, n)
            )));
        }
        for (idx, user) in users.iter().enumerate() {
            if user.mapping.k() != k || user.mapping.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "user {idx} mapping is {}×{}, expected {k}×{n}",
                    user.mapping.k(),
                    user.mapping.n()
                )));
            }
            if user.codewords.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "user {idx} has {} codewords, expected M = {m}",
                    user.codewords.len()
                )));
            }
            user.check(idx)?;
            if let Some(prev) = users[..idx]
                .iter()
                .position(|u| u.zero_rows == user.zero_rows)
            {
                return Err(Error::InvariantViolation {
                    user: idx,
                    reason: format!("mapping matrix duplicates user {prev}"),
                });
            }
        }
        let graph = graph_from_layers(k, &users);
        Ok(Self {
            k,
            n,
            m,
            users,
            graph,
        })
    }

    /// Resource count `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Nonzero dimensions per codeword `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Alphabet size `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// User count `J`.
    pub fn j(&self) -> usize {
        self.users.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.m.trailing_zeros() as usize
    }

    /// Overloading factor `λ = J / K`.
    pub fn overloading(&self) -> f64 {
        self.j() as f64 / self.k as f64
    }

    pub fn users(&self) -> &[UserLayer] {
        &self.users
    }

    pub fn user(&self, j: usize) -> &UserLayer {
        &self.users[j]
    }

    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    /// Average transmitted energy per resource, summed over users.
    pub fn energy_per_resource(&self) -> f64 {
        self.users.iter().map(UserLayer::mean_energy).sum::<f64>() / self.k as f64
    }

    /// Energy per information bit, `E_res · K / (J · log2 M)`.
    pub fn energy_per_bit(&self) -> f64 {
        self.energy_per_resource() * self.k as f64 / (self.j() * self.bits_per_symbol()) as f64
    }

    /// Noise density `N0` giving the requested `Eb/N0` in dB.
    pub fn noise_density(&self, ebn0_db: f64) -> f64 {
        self.energy_per_bit() / 10f64.powf(ebn0_db / 10.0)
    }

    pub fn to_document(&self) -> CodebookDocument {
        CodebookDocument {
            k: self.k,
            n: self.n,
            m: self.m,
            j: self.j(),
            users: self
                .users
                .iter()
                .map(|u| UserDocument {
                    zero_rows: u.zero_rows.clone(),
                    codewords: u
                        .codewords
                        .iter()
                        .map(|cw| cw.iter().map(|c| [c.re, c.im]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// True iff `J = C(K, N)` and the columns of `F` list every `N`-subset of
/// the resources, ordered lexicographically by their supports.
pub fn is_regular(system: &ScmaSystem) -> bool {
    if system.j() as u128 != binomial(system.k, system.n) {
        return false;
    }
    let supports: Vec<Vec<usize>> = system.users.iter().map(|u| u.mapping.support()).collect();
    supports.windows(2).all(|w| w[0] < w[1])
}

/// All `N`-subsets of `0..K` in lexicographic order.
pub fn lexicographic_supports(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for r in start..k {
            cur.push(r);
            rec(r + 1, k, n, cur, out);
            cur.pop();
        }
    }
    rec(0, k, n, &mut current, &mut out);
    out
}

/// Complement of a support set within `0..K`.
pub fn zero_rows_for_support(k: usize, support: &[usize]) -> Vec<usize> {
    (0..k).filter(|r| !support.contains(r)).collect()
}

/// On-disk codebook schema.
///
/// ```json
/// { "K": 4, "N": 2, "M": 4, "J": 6,
///   "users": [ { "zero_rows": [2, 3],
///                "codewords": [ [[re, im], [re, im], [0, 0], [0, 0]], … ] } ] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookDocument {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub users: Vec<UserDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDocument {
    pub zero_rows: Vec<usize>,
    pub codewords: Vec<Vec<[f64; 2]>>,
}

impl CodebookDocument {
    pub fn into_system(self) -> Result<ScmaSystem> {
        if self.users.len() != self.j {
            return Err(Error::DimensionMismatch(format!(
                "J = {} but {} users listed",
                self.j,
                self.users.len()
            )));
        }
        let mut users = Vec::with_capacity(self.j);
        for (idx, user) in self.users.into_iter().enumerate() {
            let mapping = build_mapping_matrix(self.k, self.n, &user.zero_rows).map_err(|e| {
                Error::InvariantViolation {
                    user: idx,
                    reason: e.to_string(),
                }
            })?;
            let codewords = user
                .codewords
                .into_iter()
                .map(|cw| {
                    cw.into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect()
                })
                .collect();
            users.push(UserLayer {
                mapping,
                zero_rows: user.zero_rows,
                codewords,
            });
        }
        ScmaSystem::new(self.k, self.n, self.m, users)
    }
}

/// Parses and validates a codebook document.
pub fn load_codebook(source: &str) -> Result<ScmaSystem> {
    let doc: CodebookDocument =
        serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_system()
}

pub fn load_codebook_file(path: impl AsRef<Path>) -> Result<ScmaSystem> {
    load_codebook(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping_matrix_inserts_zero_rows() {
        let v = build_mapping_matrix(4, 2, &[2, 3]).unwrap();
        assert_eq!(
            v.to_dense(),
            vec![vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0]]
        );
        let id = build_mapping_matrix(2, 2, &[]).unwrap();
        assert_eq!(id.to_dense(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn mapping_matrix_choices_match_binomial() {
        let all: std::collections::HashSet<_> = lexicographic_supports(4, 2)
            .iter()
            .map(|s| build_mapping_matrix(4, 2, &zero_rows_for_support(4, s)).unwrap())
            .collect();
        assert_eq!(all.len(), 6);
        assert_eq!(binomial(4, 2), 6);
        for v in &all {
            let dense = v.to_dense();
            for c in 0..2 {
                assert_eq!(dense.iter().filter(|row| row[c] == 1).count(), 1);
            }
            assert!(dense
                .iter()
                .all(|row| row.iter().map(|&x| x as usize).sum::<usize>() <= 1));
        }
    }

    #[test]
    fn mapping_matrix_rejects_bad_positions() {
        assert!(build_mapping_matrix(4, 2, &[2, 2]).is_err());
        assert!(build_mapping_matrix(4, 2, &[3, 2]).is_err());
        assert!(build_mapping_matrix(4, 2, &[1, 4]).is_err());
        assert!(build_mapping_matrix(4, 2, &[1]).is_err());
        assert!(build_mapping_matrix(2, 3, &[]).is_err());
    }

    fn toy_user(k: usize, zero_rows: Vec<usize>, m: usize) -> UserLayer {
        let f: Vec<bool> = (0..k).map(|r| !zero_rows.contains(&r)).collect();
        let codewords = (0..m)
            .map(|s| {
                f.iter()
                    .map(|&a| {
                        if a {
                            Complex64::new(1.0 + s as f64, 0.5)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        UserLayer::new(k, k - zero_rows.len(), zero_rows, codewords).unwrap()
    }

    #[test]
    fn single_user_graph() {
        let sys = ScmaSystem::new(4, 2, 2, vec![toy_user(4, vec![0, 2], 2)]).unwrap();
        let g = derive_factor_graph(&sys);
        let col: Vec<u8> = g.matrix().iter().map(|row| row[0]).collect();
        assert_eq!(col, vec![0, 1, 0, 1]);
        assert_eq!(g.degrees(), &[0, 1, 0, 1]);
    }

    #[test]
    fn regularity_requirements() {
        let lex = lexicographic_supports(4, 2);
        let users: Vec<_> = lex
            .iter()
            .map(|s| toy_user(4, zero_rows_for_support(4, s), 2))
            .collect();
        let sys = ScmaSystem::new(4, 2, 2, users.clone()).unwrap();
        assert!(is_regular(&sys));

        let fewer = ScmaSystem::new(4, 2, 2, users[..5].to_vec()).unwrap();
        assert!(!is_regular(&fewer));

        let mut swapped = users;
        swapped.swap(1, 2);
        assert!(!is_regular(&ScmaSystem::new(4, 2, 2, swapped).unwrap()));
    }

    #[test]
    fn system_rejects_bad_dimensions() {
        assert!(ScmaSystem::new(4, 2, 3, vec![toy_user(4, vec![2, 3], 3)]).is_err());
        let dup = vec![toy_user(4, vec![2, 3], 2), toy_user(4, vec![2, 3], 2)];
        assert!(matches!(
            ScmaSystem::new(4, 2, 2, dup),
            Err(Error::InvariantViolation { user: 1, .. })
        ));
    }
}
