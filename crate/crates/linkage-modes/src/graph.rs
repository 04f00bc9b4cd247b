//! Linkage graphs, Henneberg constructions, the Laman condition, and
//! closed-form bounds on the number of planar embeddings.
//!
//! Vertices carry 1-based labels to match the usual distance-matrix indexing;
//! edges are stored as sorted pairs in a `BTreeSet`, so edge-set equality and
//! serialization order are both syntactic.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::{edge, Edge};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex label {0} outside 1..={1}")]
    VertexOutOfRange(u8, u8),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u8),
    #[error("duplicate edge ({0},{1})")]
    DuplicateEdge(u8, u8),
    #[error("attach vertex {0} does not exist (n={1})")]
    MissingAttachVertex(u8, u8),
    #[error("H2 removed edge ({0},{1}) is absent")]
    RemovedEdgeAbsent(u8, u8),
    #[error("H2 removed edge ({0},{1}) must join two attach vertices")]
    RemovedEdgeNotAmongAttach(u8, u8),
    #[error("need at least {1} vertices, got {0}")]
    TooFewVertices(u8, u8),
    #[error("unknown topology id {0:?} (expected v17, v37 or v67)")]
    UnknownTopology(String),
}

/// A bar linkage graph: `n` vertices labeled `1..=n` and a set of bars.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkageGraph {
    n: u8,
    edges: BTreeSet<Edge>,
}

impl LinkageGraph {
    /// Builds a graph, rejecting self-loops, duplicates, and out-of-range labels.
    pub fn new(n: u8, edge_list: impl IntoIterator<Item = (u8, u8)>) -> Result<Self, GraphError> {
        let mut edges = BTreeSet::new();
        for (a, b) in edge_list {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexOutOfRange(v, n));
                }
            }
            let e = edge(a, b);
            if !edges.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(LinkageGraph { n, edges })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Edges in sorted (lexicographic) order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: u8, b: u8) -> bool {
        self.edges.contains(&edge(a, b))
    }

    /// Vertex pairs that are *not* bars, in sorted order; these become the
    /// unknown distances of the Cayley-Menger matrix.
    pub fn non_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                if !self.edges.contains(&(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The triangle K3, the smallest rigid linkage.
    pub fn triangle() -> Self {
        LinkageGraph::new(3, [(1, 2), (1, 3), (2, 3)]).expect("triangle is valid")
    }
}

/// A Henneberg construction step.
///
/// H1 adds a vertex attached to two existing ones; H2 attaches to three and
/// removes one existing edge among them. Both preserve the Laman property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HennebergStep {
    H1 { attach: [u8; 2] },
    H2 { attach: [u8; 3], remove: (u8, u8) },
}

/// Applies a Henneberg step, adding vertex `n+1`.
pub fn apply_henneberg(g: &LinkageGraph, step: &HennebergStep) -> Result<LinkageGraph, GraphError> {
    let new_vertex = g.n + 1;
    let mut edges: Vec<(u8, u8)> = g.edges().collect();
    let attach: &[u8] = match step {
        HennebergStep::H1 { attach } => attach,
        HennebergStep::H2 { attach, .. } => attach,
    };
    for &v in attach {
        if v == 0 || v > g.n {
            return Err(GraphError::MissingAttachVertex(v, g.n));
        }
    }
    if let HennebergStep::H2 { attach, remove } = step {
        let r = edge(remove.0, remove.1);
        if !g.edges.contains(&r) {
            return Err(GraphError::RemovedEdgeAbsent(r.0, r.1));
        }
        if !(attach.contains(&r.0) && attach.contains(&r.1)) {
            return Err(GraphError::RemovedEdgeNotAmongAttach(r.0, r.1));
        }
        edges.retain(|&e| e != r);
    }
    for &v in attach {
        edges.push((v, new_vertex));
    }
    LinkageGraph::new(new_vertex, edges)
}

/// Checks the Laman condition: `|E| = 2n−3` and every induced subgraph on
/// `3 ≤ k < n` vertices has at most `2k−3` edges.
///
/// The subgraph check is exhaustive over vertex subsets, which is exact and
/// fast for the desk-scale graphs (n ≤ 10) this crate works with.
pub fn is_laman(g: &LinkageGraph) -> bool {
    let n = g.n as usize;
    if n < 3 {
        return false;
    }
    assert!(n <= 16, "exhaustive Laman check is limited to n <= 16");
    if g.edge_count() != 2 * n - 3 {
        return false;
    }
    // Edge endpoints as bitmasks over 0-based vertices.
    let masks: Vec<u16> = g
        .edges()
        .map(|(a, b)| (1u16 << (a - 1)) | (1u16 << (b - 1)))
        .collect();
    for subset in 0u16..(1 << n) {
        let k = subset.count_ones() as usize;
        if k < 3 || k == n {
            continue;
        }
        let induced = masks.iter().filter(|&&m| m & subset == m).count();
        if induced > 2 * k - 3 {
            return false;
        }
    }
    true
}

/// The Desargues (planar parallel robot) graph: 6 vertices, 9 bars, exactly
/// 24 assembly modes.
pub fn desargues_graph() -> LinkageGraph {
    LinkageGraph::new(
        6,
        [
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 5),
            (3, 6),
            (4, 5),
            (4, 6),
            (5, 6),
        ],
    )
    .expect("Desargues graph is valid")
}

/// The three H2 extensions of the Desargues graph: remove edge (4,5), add a
/// seventh vertex joined to {4, 5, v}, with v ∈ {1, 3, 6}.
///
/// These are the only 7-vertex Laman graphs relevant to maximizing assembly
/// modes; the classification is taken as given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TopologyId {
    V17,
    V37,
    V67,
}

impl TopologyId {
    pub const ALL: [TopologyId; 3] = [TopologyId::V17, TopologyId::V37, TopologyId::V67];

    /// The third attachment vertex (besides 4 and 5) of the H2 step.
    pub fn extra_attach(self) -> u8 {
        match self {
            TopologyId::V17 => 1,
            TopologyId::V37 => 3,
            TopologyId::V67 => 6,
        }
    }
}

impl fmt::Display for TopologyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyId::V17 => write!(f, "v17"),
            TopologyId::V37 => write!(f, "v37"),
            TopologyId::V67 => write!(f, "v67"),
        }
    }
}

impl FromStr for TopologyId {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, GraphError> {
        match s.to_ascii_lowercase().as_str() {
            "v17" => Ok(TopologyId::V17),
            "v37" => Ok(TopologyId::V37),
            "v67" => Ok(TopologyId::V67),
            _ => Err(GraphError::UnknownTopology(s.to_string())),
        }
    }
}

/// Builds one of the three 7-vertex, 11-bar topologies.
pub fn builtin_topology(id: TopologyId) -> LinkageGraph {
    let step = HennebergStep::H2 {
        attach: [4, 5, id.extra_attach()],
        remove: (4, 5),
    };
    apply_henneberg(&desargues_graph(), &step).expect("H2 on Desargues is valid")
}

/// Closed-form bounds on the number of planar embeddings of a Laman graph
/// on `n` vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    /// Bézout bound of the coordinate system: `4^(n−2)`.
    pub bezout: BigUint,
    /// Asymptotic upper bound `4^(n−2) / √(π(n−2))`.
    pub general_upper: f64,
    /// Fan construction lower bound `2·28^⌊(n−3)/4⌋`.
    pub fan_lower: BigUint,
    /// Growth constant of the fan bound, `28^(1/4) ≈ 2.3003`.
    pub growth_constant: f64,
    /// Best published upper bound, tabulated for `n ≤ 10`.
    pub table_upper: Option<u64>,
    /// Best previously published lower bound, tabulated for `n ≤ 10`.
    pub table_lower: Option<u64>,
}

const TABLE_UPPER: [u64; 8] = [2, 4, 8, 24, 64, 128, 512, 2048];
const TABLE_LOWER: [u64; 8] = [2, 4, 8, 24, 48, 96, 288, 576];

/// Evaluates all closed-form bounds at a given vertex count (`n ≥ 3`).
pub fn closed_form_bounds(n: u32) -> Result<Bounds, GraphError> {
    if n < 3 {
        return Err(GraphError::TooFewVertices(n.min(255) as u8, 3));
    }
    let bezout = BigUint::from(4u32).pow(n - 2);
    let general_upper = 4f64.powi(n as i32 - 2) / (std::f64::consts::PI * (n - 2) as f64).sqrt();
    let fan_lower = BigUint::from(2u32) * BigUint::from(28u32).pow((n - 3) / 4);
    let idx = (n as usize).checked_sub(3).filter(|&i| i < 8);
    Ok(Bounds {
        bezout,
        general_upper,
        fan_lower,
        growth_constant: 28f64.powf(0.25),
        table_upper: idx.map(|i| TABLE_UPPER[i]),
        table_lower: idx.map(|i| TABLE_LOWER[i]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn henneberg_h1_on_triangle() {
        let g = apply_henneberg(&LinkageGraph::triangle(), &HennebergStep::H1 { attach: [1, 2] })
            .unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 5); // 2·4−3
        assert!(is_laman(&g));
    }

    #[test]
    fn henneberg_h2_desargues_gives_v17() {
        let g = apply_henneberg(
            &desargues_graph(),
            &HennebergStep::H2 {
                attach: [4, 5, 1],
                remove: (4, 5),
            },
        )
        .unwrap();
        let expect: Vec<Edge> = vec![
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 7),
            (2, 3),
            (2, 5),
            (3, 6),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
        ];
        assert_eq!(g.edges().collect::<Vec<_>>(), expect);
        assert_eq!(g, builtin_topology(TopologyId::V17));
    }

    #[test]
    fn henneberg_twice_keeps_laman() {
        let g = apply_henneberg(&LinkageGraph::triangle(), &HennebergStep::H1 { attach: [1, 2] })
            .unwrap();
        let g = apply_henneberg(&g, &HennebergStep::H1 { attach: [3, 4] }).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 7);
        assert!(is_laman(&g));
    }

    #[test]
    fn henneberg_rejects_bad_steps() {
        let t = LinkageGraph::triangle();
        assert_eq!(
            apply_henneberg(&t, &HennebergStep::H1 { attach: [1, 9] }),
            Err(GraphError::MissingAttachVertex(9, 3))
        );
        let d = desargues_graph();
        assert_eq!(
            apply_henneberg(
                &d,
                &HennebergStep::H2 {
                    attach: [4, 5, 1],
                    remove: (1, 6), // not an edge
                }
            ),
            Err(GraphError::RemovedEdgeAbsent(1, 6))
        );
        assert_eq!(
            apply_henneberg(
                &d,
                &HennebergStep::H2 {
                    attach: [4, 5, 1],
                    remove: (2, 3), // an edge, but not among the attach vertices
                }
            ),
            Err(GraphError::RemovedEdgeNotAmongAttach(2, 3))
        );
    }

    #[test]
    fn laman_basics() {
        assert!(is_laman(&LinkageGraph::triangle()));
        let k4 = LinkageGraph::new(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert!(!is_laman(&k4)); // 6 > 2·4−3
        assert!(is_laman(&desargues_graph()));
        for id in TopologyId::ALL {
            assert!(is_laman(&builtin_topology(id)), "{id} must be Laman");
        }
        // 2n−3 edges but with a K4 inside: edge count alone is not enough.
        let overbraced = LinkageGraph::new(
            6,
            [
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4), // K4 on {1,2,3,4}: 6 > 2·4−3
                (4, 5),
                (5, 6),
                (1, 6),
            ],
        )
        .unwrap();
        assert_eq!(overbraced.edge_count(), 9);
        assert!(!is_laman(&overbraced));
    }

    #[test]
    fn variant_edge_sets() {
        let v37 = builtin_topology(TopologyId::V37);
        assert!(v37.has_edge(3, 7) && !v37.has_edge(1, 7));
        let v67 = builtin_topology(TopologyId::V67);
        assert!(v67.has_edge(6, 7) && !v67.has_edge(1, 7));
        for id in TopologyId::ALL {
            let g = builtin_topology(id);
            assert_eq!(g.n(), 7);
            assert_eq!(g.edge_count(), 11);
            assert_eq!(g.non_edges().len(), 10); // C(7,2) − 11
        }
    }

    #[test]
    fn v17_automorphism() {
        // σ = (2 3)(5 6)(4 7) maps the V17 edge set to itself.
        let sigma = |v: u8| -> u8 {
            match v {
                2 => 3,
                3 => 2,
                5 => 6,
                6 => 5,
                4 => 7,
                7 => 4,
                other => other,
            }
        };
        let g = builtin_topology(TopologyId::V17);
        let image: BTreeSet<Edge> = g.edges().map(|(a, b)| edge(sigma(a), sigma(b))).collect();
        assert_eq!(image, g.edges().collect::<BTreeSet<_>>());
    }

    #[test]
    fn bounds_values() {
        let b = closed_form_bounds(7).unwrap();
        assert_eq!(b.fan_lower, BigUint::from(56u32));
        assert_eq!(b.bezout, BigUint::from(1024u32));
        assert_eq!(b.table_upper, Some(64));
        assert_eq!(b.table_lower, Some(48));
        assert!((b.growth_constant - 2.3003).abs() < 1e-4);

        let b10 = closed_form_bounds(10).unwrap();
        assert_eq!(b10.table_upper, Some(2048));
        assert_eq!(b10.table_lower, Some(576));

        let b11 = closed_form_bounds(11).unwrap();
        assert_eq!(b11.table_upper, None);
        assert_eq!(b11.fan_lower, BigUint::from(2u32 * 28 * 28));

        assert!(closed_form_bounds(2).is_err());
    }

    #[test]
    fn fan_bound_ratio_is_28() {
        for n in 7..=20u32 {
            let hi = closed_form_bounds(n).unwrap().fan_lower;
            let lo = closed_form_bounds(n - 4).unwrap().fan_lower;
            assert_eq!(hi, lo * BigUint::from(28u32));
        }
    }
}
