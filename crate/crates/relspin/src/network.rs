//! Weighted spin networks with clamped nodes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhasePoint;

/// Role a node plays in a circuit encoding. Plain optimization networks
/// leave everything `Internal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Input,
    Output,
    AuxiliaryFixed,
    Internal,
}

/// Symmetric weighted graph A with zero diagonal, a clamp set holding
/// selected nodes at fixed phase points, and per-node role tags.
#[derive(Debug, Clone)]
pub struct SpinNetwork {
    n: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
    roles: Vec<Role>,
    clamps: BTreeMap<usize, PhasePoint>,
}

impl SpinNetwork {
    pub fn new(n: usize) -> Self {
        SpinNetwork {
            n,
            adjacency: vec![Vec::new(); n],
            roles: vec![Role::Internal; n],
            clamps: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sets A_{m,n} = A_{n,m} = w, replacing any previous value.
    pub fn set_weight(&mut self, m: usize, n: usize, w: f64) -> Result<()> {
        if m >= self.n || n >= self.n {
            return Err(Error::InvalidInput(format!(
                "edge ({m}, {n}) out of range for {} nodes",
                self.n
            )));
        }
        if m == n {
            return Err(Error::InvalidInput(format!("self-loop on node {m}")));
        }
        if !w.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite weight on ({m}, {n})")));
        }
        Self::insert(&mut self.adjacency[m], n, w);
        Self::insert(&mut self.adjacency[n], m, w);
        Ok(())
    }

    fn insert(row: &mut Vec<(usize, f64)>, n: usize, w: f64) {
        match row.iter_mut().find(|(k, _)| *k == n) {
            Some(entry) => entry.1 = w,
            None => row.push((n, w)),
        }
    }

    pub fn weight(&self, m: usize, n: usize) -> f64 {
        self.adjacency
            .get(m)
            .and_then(|row| row.iter().find(|(k, _)| *k == n))
            .map_or(0.0, |(_, w)| *w)
    }

    pub fn neighbors(&self, m: usize) -> &[(usize, f64)] {
        &self.adjacency[m]
    }

    /// Undirected edges (m < n) in deterministic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for m in 0..self.n {
            for &(n, w) in &self.adjacency[m] {
                if m < n {
                    out.push((m, n, w));
                }
            }
        }
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Σ_{m,n} |A_{m,n}| over ordered pairs.
    pub fn total_abs_weight(&self) -> f64 {
        self.adjacency
            .iter()
            .flat_map(|row| row.iter().map(|(_, w)| w.abs()))
            .sum()
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.adjacency
            .iter()
            .flat_map(|row| row.iter().map(|(_, w)| w.abs()))
            .fold(0.0, f64::max)
    }

    pub fn set_role(&mut self, node: usize, role: Role) {
        self.roles[node] = role;
    }

    pub fn role(&self, node: usize) -> Role {
        self.roles[node]
    }

    pub fn clamp(&mut self, node: usize, point: PhasePoint) -> Result<()> {
        if node >= self.n {
            return Err(Error::InvalidInput(format!("clamp node {node} out of range")));
        }
        self.clamps.insert(node, point);
        Ok(())
    }

    pub fn unclamp(&mut self, node: usize) {
        self.clamps.remove(&node);
    }

    pub fn is_clamped(&self, node: usize) -> bool {
        self.clamps.contains_key(&node)
    }

    pub fn clamps(&self) -> &BTreeMap<usize, PhasePoint> {
        &self.clamps
    }

    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.n).filter(|m| !self.is_clamped(*m)).collect()
    }

    /// Checks the structural invariants: clamp indices in range and every
    /// auxiliary-fixed node clamped. Symmetry and zero diagonal hold by
    /// construction of `set_weight`.
    pub fn validate(&self) -> Result<()> {
        for (&node, _) in &self.clamps {
            if node >= self.n {
                return Err(Error::InvalidInput(format!("clamp node {node} out of range")));
            }
        }
        for (node, role) in self.roles.iter().enumerate() {
            if *role == Role::AuxiliaryFixed && !self.is_clamped(node) {
                return Err(Error::InvalidInput(format!(
                    "auxiliary_fixed node {node} is not clamped"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file: NetworkFile = self.into();
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text)
            .map_err(|e| Error::Data(format!("network schema: {e}")))?;
        file.try_into()
    }
}

/// On-disk form: node count, roles, clamp placements (theta values) and an
/// edge list with symmetry implied.
#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    n: usize,
    #[serde(default)]
    roles: Vec<Role>,
    #[serde(default)]
    clamps: Vec<ClampEntry>,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClampEntry {
    node: usize,
    theta: f64,
}

impl From<&SpinNetwork> for NetworkFile {
    fn from(net: &SpinNetwork) -> Self {
        NetworkFile {
            n: net.n,
            roles: net.roles.clone(),
            clamps: net
                .clamps
                .iter()
                .map(|(&node, p)| ClampEntry { node, theta: p.theta() })
                .collect(),
            edges: net.edges(),
        }
    }
}

impl TryFrom<NetworkFile> for SpinNetwork {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        let mut net = SpinNetwork::new(file.n);
        if !file.roles.is_empty() {
            if file.roles.len() != file.n {
                return Err(Error::Data(format!(
                    "roles length {} does not match n = {}",
                    file.roles.len(),
                    file.n
                )));
            }
            net.roles = file.roles;
        }
        for (m, n, w) in file.edges {
            if net.weight(m, n) != 0.0 {
                return Err(Error::Data(format!("duplicate edge ({m}, {n})")));
            }
            net.set_weight(m, n, w)
                .map_err(|e| Error::Data(e.to_string()))?;
        }
        for entry in file.clamps {
            net.clamp(entry.node, PhasePoint::new(entry.theta))
                .map_err(|e| Error::Data(e.to_string()))?;
        }
        net.validate()?;
        Ok(net)
    }
}

/// Complete graph on `n` nodes with unit weights.
pub fn complete_graph(n: usize) -> SpinNetwork {
    let mut net = SpinNetwork::new(n);
    for m in 0..n {
        for k in (m + 1)..n {
            net.set_weight(m, k, 1.0).expect("valid edge");
        }
    }
    net
}
