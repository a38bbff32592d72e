// SPDX-License-Identifier: MIT
//! Influence-network construction and validation.
//!
//! A network holds per-node individual adoption rates `p_j >= 0` and a
//! directed, weighted influence adjacency `q_{i,j} > 0` (zero-rate edges are
//! discarded at construction). Structure tags record how the network was
//! built so specialized solvers can dispatch safely; tag claims are
//! re-verified when a network document is deserialized.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors raised by network constructors and transforms.
#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    /// Too few nodes for the requested structure.
    #[error("{structure} networks need at least {min} nodes, got {got}")]
    TooFewNodes {
        structure: &'static str,
        min: usize,
        got: usize,
    },
    /// Parallel rate vectors must agree in length.
    #[error("rate vectors disagree in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// Individual rates must be finite and nonnegative.
    #[error("individual rate p[{index}] = {value} must be finite and nonnegative")]
    BadIndividualRate { index: usize, value: f64 },
    /// Influence rates must be finite and nonnegative.
    #[error("influence rate {value} on edge ({from}, {to}) must be finite and nonnegative")]
    BadInfluenceRate { from: usize, to: usize, value: f64 },
    /// Node-level influence weights must be finite and strictly positive.
    #[error("node influence weight q[{index}] = {value} must be finite and positive")]
    BadNodeInfluence { index: usize, value: f64 },
    /// Nodes do not influence themselves.
    #[error("self-influence loop on node {0}")]
    SelfLoop(usize),
    /// Each ordered pair may carry at most one edge.
    #[error("duplicate edge ({from}, {to})")]
    DuplicateEdge { from: usize, to: usize },
    /// An edge endpoint fell outside the node range.
    #[error("edge endpoint {index} out of range for {m} nodes")]
    IndexOutOfRange { index: usize, m: usize },
    /// An operation needed a different structure tag.
    #[error("operation needs a {expected} network, got {got}")]
    WrongStructure { expected: &'static str, got: String },
    /// Shifting individual rates must keep them nonnegative.
    #[error("shift {delta} would make p[{index}] = {result} negative")]
    NegativeShiftedRate {
        index: usize,
        delta: f64,
        result: f64,
    },
    /// Torus sides must have at least three nodes so neighbors are distinct.
    #[error("torus side must be at least 3, got {0}")]
    SideTooSmall(usize),
    /// Torus dimension must be at least one.
    #[error("torus dimension must be at least 1, got {0}")]
    DimensionTooSmall(usize),
    /// The requested node count overflows the address space.
    #[error("node count {side}^{dim} overflows")]
    NodeCountOverflow { side: usize, dim: usize },
    /// A serialized document's edge list or rates contradict its tag.
    #[error("network document violates its structure tag: {0}")]
    TagViolation(String),
    /// A serialized document's declared node count disagrees with its rates.
    #[error("document declares m = {declared} but lists {got} individual rates")]
    NodeCountMismatch { declared: usize, got: usize },
}

/// How a network was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    /// Mildly heterogeneous complete graph: `q_{i,j} = q_j / (m - 1)`.
    Complete,
    /// Directed circle: node `j` is influenced only by node `j - 1 (mod m)`.
    OneSidedCircle,
    /// Undirected circle: node `j` is influenced by both neighbors.
    TwoSidedCircle,
    /// Cartesian torus lattice with `side^dim` nodes and `2 * dim` neighbors
    /// each.
    CartesianTorus { dim: usize, side: usize },
    /// Arbitrary edge list.
    Custom,
}

impl fmt::Display for StructureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureTag::Complete => write!(f, "complete"),
            StructureTag::OneSidedCircle => write!(f, "one-sided circle"),
            StructureTag::TwoSidedCircle => write!(f, "two-sided circle"),
            StructureTag::CartesianTorus { dim, side } => {
                write!(f, "cartesian torus (dim {dim}, side {side})")
            }
            StructureTag::Custom => write!(f, "custom"),
        }
    }
}

/// Parameters of a mildly heterogeneous complete network: individual rates
/// `p_j` and node-level influence weights `q_j` that each node receives in
/// total, spread evenly over its `m - 1` potential influencers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MildHetSpecDoc", into = "MildHetSpecDoc")]
pub struct MildHetSpec {
    p: Vec<f64>,
    q_node: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MildHetSpecDoc {
    p: Vec<f64>,
    q_node: Vec<f64>,
}

impl MildHetSpec {
    /// Validates rate vectors: equal lengths of at least two, finite
    /// nonnegative `p`, finite positive `q_node`.
    pub fn new(p: Vec<f64>, q_node: Vec<f64>) -> Result<Self, NetworkError> {
        if p.len() != q_node.len() {
            return Err(NetworkError::LengthMismatch {
                left: p.len(),
                right: q_node.len(),
            });
        }
        if p.len() < 2 {
            return Err(NetworkError::TooFewNodes {
                structure: "complete",
                min: 2,
                got: p.len(),
            });
        }
        check_individual_rates(&p)?;
        for (index, &value) in q_node.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(NetworkError::BadNodeInfluence { index, value });
            }
        }
        Ok(Self { p, q_node })
    }

    /// Uniform parameters for all `m` nodes.
    pub fn uniform(m: usize, p: f64, q: f64) -> Result<Self, NetworkError> {
        Self::new(vec![p; m], vec![q; m])
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q_node(&self) -> &[f64] {
        &self.q_node
    }
}

impl TryFrom<MildHetSpecDoc> for MildHetSpec {
    type Error = NetworkError;

    fn try_from(doc: MildHetSpecDoc) -> Result<Self, NetworkError> {
        Self::new(doc.p, doc.q_node)
    }
}

impl From<MildHetSpec> for MildHetSpecDoc {
    fn from(spec: MildHetSpec) -> Self {
        Self {
            p: spec.p,
            q_node: spec.q_node,
        }
    }
}

/// A validated influence network.
///
/// Serialization uses a flat document `{m, p, edges, structure_tag}` whose
/// edges are `[from, to, rate]` triples sorted by `(from, to)`;
/// deserialization re-validates both the edge list and the structure tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDoc", into = "NetworkDoc")]
pub struct Network {
    p: Vec<f64>,
    in_edges: Vec<Vec<(usize, f64)>>,
    out_edges: Vec<Vec<(usize, f64)>>,
    structure: StructureTag,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    m: usize,
    p: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    structure_tag: StructureTag,
}

fn check_individual_rates(p: &[f64]) -> Result<(), NetworkError> {
    for (index, &value) in p.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(NetworkError::BadIndividualRate { index, value });
        }
    }
    Ok(())
}

/// Builds the mildly heterogeneous complete network for `spec`: every
/// ordered pair `(i, j)` with `i != j` carries rate `q_j / (m - 1)`.
pub fn build_complete(spec: &MildHetSpec) -> Network {
    let m = spec.m();
    let weights: Vec<f64> = spec.q_node().iter().map(|q| q / (m - 1) as f64).collect();
    let mut edges = Vec::with_capacity(m * (m - 1));
    for from in 0..m {
        for to in 0..m {
            if from != to {
                edges.push((from, to, weights[to]));
            }
        }
    }
    Network::from_parts(spec.p().to_vec(), edges, StructureTag::Complete)
        .expect("complete networks from a validated spec are structurally valid")
}

/// Builds a network from an explicit directed edge list. Zero-rate edges are
/// dropped; duplicate ordered pairs and self-loops are rejected.
pub fn build_custom(
    p: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
) -> Result<Network, NetworkError> {
    if p.is_empty() {
        return Err(NetworkError::TooFewNodes {
            structure: "custom",
            min: 1,
            got: 0,
        });
    }
    check_individual_rates(&p)?;
    Network::from_parts(p, edges, StructureTag::Custom)
}

/// Builds a one-sided circle: node `j` is influenced only by its left
/// neighbor `j - 1 (mod m)` with rate `q_in[j] > 0`.
pub fn build_one_sided_circle(p: Vec<f64>, q_in: Vec<f64>) -> Result<Network, NetworkError> {
    for (index, &value) in q_in.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(NetworkError::BadNodeInfluence { index, value });
        }
    }
    one_sided_circle_allowing_zero(p, q_in)
}

/// One-sided circle constructor that tolerates zero in-rates; used by the
/// two-sided conversion, whose counterexample instances switch single edges
/// off.
pub(crate) fn one_sided_circle_allowing_zero(
    p: Vec<f64>,
    q_in: Vec<f64>,
) -> Result<Network, NetworkError> {
    let m = p.len();
    if m < 2 {
        return Err(NetworkError::TooFewNodes {
            structure: "one-sided circle",
            min: 2,
            got: m,
        });
    }
    if q_in.len() != m {
        return Err(NetworkError::LengthMismatch {
            left: m,
            right: q_in.len(),
        });
    }
    check_individual_rates(&p)?;
    let edges: Vec<(usize, usize, f64)> = (0..m)
        .map(|j| ((j + m - 1) % m, j, q_in[j]))
        .collect();
    Network::from_parts(p, edges, StructureTag::OneSidedCircle)
}

/// Builds a two-sided circle: node `j` is influenced by its left neighbor
/// with rate `q_left[j]` and by its right neighbor with rate `q_right[j]`.
/// Individual in-rates may be zero.
pub fn build_two_sided_circle(
    p: Vec<f64>,
    q_left: Vec<f64>,
    q_right: Vec<f64>,
) -> Result<Network, NetworkError> {
    let m = p.len();
    if m < 3 {
        return Err(NetworkError::TooFewNodes {
            structure: "two-sided circle",
            min: 3,
            got: m,
        });
    }
    if q_left.len() != m {
        return Err(NetworkError::LengthMismatch {
            left: m,
            right: q_left.len(),
        });
    }
    if q_right.len() != m {
        return Err(NetworkError::LengthMismatch {
            left: m,
            right: q_right.len(),
        });
    }
    check_individual_rates(&p)?;
    let mut edges = Vec::with_capacity(2 * m);
    for j in 0..m {
        edges.push(((j + m - 1) % m, j, q_left[j]));
        edges.push(((j + 1) % m, j, q_right[j]));
    }
    Network::from_parts(p, edges, StructureTag::TwoSidedCircle)
}

/// Builds a `dim`-dimensional Cartesian torus with `side` nodes per axis.
/// Every node has `2 * dim` neighbors, each influencing it at rate
/// `q / (2 * dim)`, so each node's total incoming influence is `q`.
pub fn build_cartesian_torus(
    dim: usize,
    side: usize,
    p: f64,
    q: f64,
) -> Result<Network, NetworkError> {
    if dim < 1 {
        return Err(NetworkError::DimensionTooSmall(dim));
    }
    if side < 3 {
        return Err(NetworkError::SideTooSmall(side));
    }
    if !p.is_finite() || p < 0.0 {
        return Err(NetworkError::BadIndividualRate { index: 0, value: p });
    }
    if !q.is_finite() || q <= 0.0 {
        return Err(NetworkError::BadNodeInfluence { index: 0, value: q });
    }
    let mut m: usize = 1;
    for _ in 0..dim {
        m = m
            .checked_mul(side)
            .ok_or(NetworkError::NodeCountOverflow { side, dim })?;
    }
    let weight = q / (2 * dim) as f64;
    let mut edges = Vec::with_capacity(2 * dim * m);
    let mut stride = 1usize;
    for _ in 0..dim {
        for node in 0..m {
            let axis_pos = (node / stride) % side;
            let up = node - axis_pos * stride + ((axis_pos + 1) % side) * stride;
            let down = node - axis_pos * stride + ((axis_pos + side - 1) % side) * stride;
            edges.push((up, node, weight));
            edges.push((down, node, weight));
        }
        stride *= side;
    }
    Network::from_parts(
        vec![p; m],
        edges,
        StructureTag::CartesianTorus { dim, side },
    )
}

impl Network {
    fn from_parts(
        p: Vec<f64>,
        edges: Vec<(usize, usize, f64)>,
        structure: StructureTag,
    ) -> Result<Self, NetworkError> {
        let m = p.len();
        let mut in_edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut out_edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for (from, to, rate) in edges {
            if from >= m {
                return Err(NetworkError::IndexOutOfRange { index: from, m });
            }
            if to >= m {
                return Err(NetworkError::IndexOutOfRange { index: to, m });
            }
            if from == to {
                return Err(NetworkError::SelfLoop(from));
            }
            if !rate.is_finite() || rate < 0.0 {
                return Err(NetworkError::BadInfluenceRate {
                    from,
                    to,
                    value: rate,
                });
            }
            if rate == 0.0 {
                continue;
            }
            out_edges[from].push((to, rate));
        }
        for (from, outs) in out_edges.iter_mut().enumerate() {
            outs.sort_unstable_by_key(|&(to, _)| to);
            for window in outs.windows(2) {
                if window[0].0 == window[1].0 {
                    return Err(NetworkError::DuplicateEdge {
                        from,
                        to: window[0].0,
                    });
                }
            }
            for &(to, rate) in outs.iter() {
                in_edges[to].push((from, rate));
            }
        }
        for ins in &mut in_edges {
            ins.sort_unstable_by_key(|&(from, _)| from);
        }
        Ok(Self {
            p,
            in_edges,
            out_edges,
            structure,
        })
    }

    /// Number of nodes.
    pub fn m(&self) -> usize {
        self.p.len()
    }

    /// Individual adoption rates.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Sum of all individual rates.
    pub fn total_p(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Structure tag.
    pub fn structure(&self) -> StructureTag {
        self.structure
    }

    /// Influencers of node `j` as `(source, rate)` pairs sorted by source.
    pub fn in_edges(&self, j: usize) -> &[(usize, f64)] {
        &self.in_edges[j]
    }

    /// Targets of node `i` as `(target, rate)` pairs sorted by target.
    pub fn out_edges(&self, i: usize) -> &[(usize, f64)] {
        &self.out_edges[i]
    }

    /// Total incoming influence `q_j = sum_k q_{k,j}`.
    pub fn in_influence(&self, j: usize) -> f64 {
        self.in_edges[j].iter().map(|&(_, rate)| rate).sum()
    }

    /// Total outgoing influence `q^i = sum_j q_{i,j}`.
    pub fn out_influence(&self, i: usize) -> f64 {
        self.out_edges[i].iter().map(|&(_, rate)| rate).sum()
    }

    /// Influence rate of `i` on `j`, zero when no edge exists.
    pub fn rate_between(&self, i: usize, j: usize) -> f64 {
        match self.out_edges[i].binary_search_by_key(&j, |&(to, _)| to) {
            Ok(pos) => self.out_edges[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// All edges as `(from, to, rate)` triples sorted by `(from, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.out_edges
            .iter()
            .enumerate()
            .flat_map(|(from, outs)| outs.iter().map(move |&(to, rate)| (from, to, rate)))
    }

    /// Number of positive-rate edges.
    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    /// Whether every node receives positive influence.
    pub fn fully_influenceable(&self) -> bool {
        self.in_edges.iter().all(|ins| !ins.is_empty())
    }

    /// The fair homogeneous counterpart of a complete network: uniform
    /// individual rate `mean(p)` and uniform node influence `mean(q_j)`, so
    /// both rate budgets are preserved.
    pub fn homogeneous_counterpart(&self) -> Result<Network, NetworkError> {
        if self.structure != StructureTag::Complete {
            return Err(NetworkError::WrongStructure {
                expected: "complete",
                got: self.structure.to_string(),
            });
        }
        let m = self.m();
        let p_mean = self.total_p() / m as f64;
        let q_mean = (0..m).map(|j| self.in_influence(j)).sum::<f64>() / m as f64;
        let spec = MildHetSpec::uniform(m, p_mean, q_mean)?;
        Ok(build_complete(&spec))
    }

    /// Shifts every individual rate by `delta`, keeping influence rates and
    /// the structure tag. The shift must keep all rates nonnegative.
    pub fn shift_p(&self, delta: f64) -> Result<Network, NetworkError> {
        if !delta.is_finite() {
            return Err(NetworkError::BadIndividualRate {
                index: 0,
                value: delta,
            });
        }
        let mut shifted = self.p.clone();
        for (index, value) in shifted.iter_mut().enumerate() {
            *value += delta;
            if *value < 0.0 {
                return Err(NetworkError::NegativeShiftedRate {
                    index,
                    delta,
                    result: *value,
                });
            }
        }
        Ok(Self {
            p: shifted,
            in_edges: self.in_edges.clone(),
            out_edges: self.out_edges.clone(),
            structure: self.structure,
        })
    }

    /// Appends one node with individual rate `p_new`, influenced by every
    /// existing node at rate `q_in_new` and influencing every existing node
    /// at rate `q_out_new`. The result is tagged [`StructureTag::Custom`].
    pub fn add_node(
        &self,
        p_new: f64,
        q_in_new: f64,
        q_out_new: f64,
    ) -> Result<Network, NetworkError> {
        if !p_new.is_finite() || p_new < 0.0 {
            return Err(NetworkError::BadIndividualRate {
                index: self.m(),
                value: p_new,
            });
        }
        for value in [q_in_new, q_out_new] {
            if !value.is_finite() || value < 0.0 {
                return Err(NetworkError::BadInfluenceRate {
                    from: self.m(),
                    to: self.m(),
                    value,
                });
            }
        }
        let new = self.m();
        let mut p = self.p.clone();
        p.push(p_new);
        let mut edges: Vec<(usize, usize, f64)> = self.edges().collect();
        for old in 0..new {
            edges.push((old, new, q_in_new));
            edges.push((new, old, q_out_new));
        }
        Network::from_parts(p, edges, StructureTag::Custom)
    }

    fn check_tag(&self) -> Result<(), NetworkError> {
        let m = self.m();
        let violation = |msg: String| Err(NetworkError::TagViolation(msg));
        match self.structure {
            StructureTag::Custom => Ok(()),
            StructureTag::Complete => {
                if m < 2 {
                    return violation(format!("complete networks need m >= 2, got {m}"));
                }
                for j in 0..m {
                    let ins = &self.in_edges[j];
                    if ins.len() != m - 1 {
                        return violation(format!(
                            "node {j} has {} influencers, expected {}",
                            ins.len(),
                            m - 1
                        ));
                    }
                    let weight = ins[0].1;
                    if weight <= 0.0 {
                        return violation(format!("node {j} has nonpositive column weight"));
                    }
                    if ins.iter().any(|&(_, rate)| rate != weight) {
                        return violation(format!(
                            "node {j} has nonuniform incoming rates, not mildly heterogeneous"
                        ));
                    }
                }
                Ok(())
            }
            StructureTag::OneSidedCircle => {
                if m < 2 {
                    return violation(format!("one-sided circles need m >= 2, got {m}"));
                }
                for j in 0..m {
                    let left = (j + m - 1) % m;
                    if self.in_edges[j].iter().any(|&(from, _)| from != left) {
                        return violation(format!(
                            "node {j} is influenced by a node other than its left neighbor"
                        ));
                    }
                }
                Ok(())
            }
            StructureTag::TwoSidedCircle => {
                if m < 3 {
                    return violation(format!("two-sided circles need m >= 3, got {m}"));
                }
                for j in 0..m {
                    let left = (j + m - 1) % m;
                    let right = (j + 1) % m;
                    if self.in_edges[j]
                        .iter()
                        .any(|&(from, _)| from != left && from != right)
                    {
                        return violation(format!(
                            "node {j} is influenced by a node other than its circle neighbors"
                        ));
                    }
                }
                Ok(())
            }
            StructureTag::CartesianTorus { dim, side } => {
                let rebuilt = build_cartesian_torus(dim, side, 0.0, 1.0)
                    .map_err(|e| NetworkError::TagViolation(e.to_string()))?;
                if rebuilt.m() != m {
                    return violation(format!(
                        "torus dim {dim} side {side} has {} nodes, document lists {m}",
                        rebuilt.m()
                    ));
                }
                let mut weight = None;
                for j in 0..m {
                    let expected: Vec<usize> =
                        rebuilt.in_edges(j).iter().map(|&(from, _)| from).collect();
                    let actual: Vec<usize> =
                        self.in_edges[j].iter().map(|&(from, _)| from).collect();
                    if expected != actual {
                        return violation(format!("node {j} lacks the torus neighbor set"));
                    }
                    for &(_, rate) in &self.in_edges[j] {
                        match weight {
                            None => weight = Some(rate),
                            Some(w) if rate == w => {}
                            Some(w) => {
                                return violation(format!(
                                    "edge rates differ ({rate} vs {w}), torus edges are uniform"
                                ))
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

impl TryFrom<NetworkDoc> for Network {
    type Error = NetworkError;

    fn try_from(doc: NetworkDoc) -> Result<Self, NetworkError> {
        if doc.m != doc.p.len() {
            return Err(NetworkError::NodeCountMismatch {
                declared: doc.m,
                got: doc.p.len(),
            });
        }
        check_individual_rates(&doc.p)?;
        let net = Network::from_parts(doc.p, doc.edges, doc.structure_tag)?;
        net.check_tag()?;
        Ok(net)
    }
}

impl From<Network> for NetworkDoc {
    fn from(net: Network) -> Self {
        Self {
            m: net.m(),
            p: net.p.clone(),
            edges: net.edges().collect(),
            structure_tag: net.structure,
        }
    }
}
