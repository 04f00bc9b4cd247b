//! Cayley-Menger matrices, diagonal minors, and minor-system selection.
//!
//! For `n` points in the plane the bordered distance matrix `B` has rank 4,
//! so every 5×5 minor vanishes. Choosing a set of unknown distances and a
//! matching number of vanishing diagonal minors yields a square polynomial
//! system whose solutions are the assembly modes of the linkage. This module
//! expands those minors exactly, assembles the canonical systems, and
//! enumerates well-constrained alternatives ranked by mixed volume.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{builtin_topology, LinkageGraph, TopologyId};
use crate::poly::Polynomial;
use crate::polytope::{mixed_volume, NewtonPolytope};
use crate::{edge, Edge};

#[derive(Debug, Error, PartialEq)]
pub enum CayleyError {
    #[error("length for edge ({0},{1}) must be positive and finite, got {2}")]
    BadLength(u8, u8, f64),
    #[error("missing length for edge ({0},{1})")]
    MissingLength(u8, u8),
    #[error("expected {expected} lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("no well-constrained minor system found (topology/k combination unusable)")]
    NoCandidateSystem,
    #[error("coordinate system needs the pinned edge (1,2); relabel the graph")]
    PinnedEdgeMissing,
}

/// Variable name for a vertex pair: `x15` for unknowns, `c12` for knowns.
pub fn pair_var(prefix: char, e: Edge) -> String {
    if e.1 <= 9 {
        format!("{prefix}{}{}", e.0, e.1)
    } else {
        format!("{prefix}{}_{}", e.0, e.1)
    }
}

/// Positive bar lengths assigned to a graph's edges.
///
/// Lengths are kept as `f64`; the squared values used in exact computations
/// are derived by converting the float to its exact rational value first, so
/// a length read from JSON has one well-defined square.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceAssignment {
    lengths: BTreeMap<Edge, f64>,
}

impl DistanceAssignment {
    pub fn new(lengths: impl IntoIterator<Item = ((u8, u8), f64)>) -> Result<Self, CayleyError> {
        let mut map = BTreeMap::new();
        for ((a, b), l) in lengths {
            if !(l.is_finite() && l > 0.0) {
                return Err(CayleyError::BadLength(a, b, l));
            }
            map.insert(edge(a, b), l);
        }
        Ok(DistanceAssignment { lengths: map })
    }

    /// Interprets a vector of lengths in the graph's sorted edge order
    /// (`l_0` on the lexicographically first edge, and so on).
    pub fn from_vector(g: &LinkageGraph, v: &[f64]) -> Result<Self, CayleyError> {
        if v.len() != g.edge_count() {
            return Err(CayleyError::LengthCount {
                expected: g.edge_count(),
                got: v.len(),
            });
        }
        DistanceAssignment::new(g.edges().zip(v.iter().copied()))
    }

    pub fn length(&self, a: u8, b: u8) -> Option<f64> {
        self.lengths.get(&edge(a, b)).copied()
    }

    /// Exact squared length: the `f64` is converted to its exact rational
    /// value, then squared, so no rounding happens beyond the input itself.
    pub fn csq(&self, a: u8, b: u8) -> Option<BigRational> {
        self.lengths.get(&edge(a, b)).map(|&l| {
            let r = BigRational::from_float(l).expect("validated finite");
            &r * &r
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.lengths.iter().map(|(&e, &l)| (e, l))
    }

    /// Checks that every edge of `g` has a length.
    pub fn covers(&self, g: &LinkageGraph) -> Result<(), CayleyError> {
        for e in g.edges() {
            if !self.lengths.contains_key(&e) {
                return Err(CayleyError::MissingLength(e.0, e.1));
            }
        }
        Ok(())
    }

    /// Lengths in the graph's sorted edge order.
    pub fn to_vector(&self, g: &LinkageGraph) -> Result<Vec<f64>, CayleyError> {
        g.edges()
            .map(|e| self.length(e.0, e.1).ok_or(CayleyError::MissingLength(e.0, e.1)))
            .collect()
    }

    /// All lengths multiplied by `lambda` (the objective `N` is invariant).
    pub fn scaled(&self, lambda: f64) -> Result<Self, CayleyError> {
        DistanceAssignment::new(self.lengths.iter().map(|(&e, &l)| (e, l * lambda)))
    }

    /// Relabels endpoints through a vertex permutation.
    pub fn relabeled(&self, sigma: impl Fn(u8) -> u8) -> Result<Self, CayleyError> {
        DistanceAssignment::new(
            self.lengths
                .iter()
                .map(|(&(a, b), &l)| ((sigma(a), sigma(b)), l)),
        )
    }
}

/// One entry of the symbolic Cayley-Menger matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmEntry {
    /// Diagonal entries and the (0,0) corner.
    Zero,
    /// Border row/column entries `B(0,i) = 1`.
    One,
    /// A squared bar length `c_ij`.
    Known(Edge),
    /// An unknown squared distance `x_ij`.
    Unknown(Edge),
}

/// The symbolic bordered distance matrix of a linkage: `(n+1)×(n+1)`,
/// indexed `0..=n`, with graph edges as knowns and the remaining vertex
/// pairs as unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyMengerMatrix {
    n: u8,
    known: BTreeSet<Edge>,
    unknown: BTreeSet<Edge>,
}

impl CayleyMengerMatrix {
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Matrix entry at `(i, j)` for `0 ≤ i, j ≤ n`.
    pub fn entry(&self, i: u8, j: u8) -> CmEntry {
        assert!(i <= self.n && j <= self.n, "index outside matrix");
        if i == j {
            CmEntry::Zero
        } else if i == 0 || j == 0 {
            CmEntry::One
        } else {
            let e = edge(i, j);
            if self.known.contains(&e) {
                CmEntry::Known(e)
            } else {
                CmEntry::Unknown(e)
            }
        }
    }

    pub fn knowns(&self) -> impl Iterator<Item = Edge> + '_ {
        self.known.iter().copied()
    }

    pub fn unknowns(&self) -> impl Iterator<Item = Edge> + '_ {
        self.unknown.iter().copied()
    }
}

/// Builds the symbolic Cayley-Menger matrix of a graph.
pub fn cm_matrix(g: &LinkageGraph) -> CayleyMengerMatrix {
    CayleyMengerMatrix {
        n: g.n(),
        known: g.edges().collect(),
        unknown: g.non_edges().into_iter().collect(),
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
///
/// Fine for the sizes here (≤ 6); cross-checked against exact rational
/// elimination in the tests.
fn det_poly(mat: &[Vec<Polynomial>]) -> Polynomial {
    let n = mat.len();
    if n == 1 {
        return mat[0][0].clone();
    }
    let vars = mat[0][0].vars().to_vec();
    let mut acc = Polynomial::zero(vars);
    for col in 0..n {
        let cofactor = &mat[0][col];
        if cofactor.is_zero() {
            continue;
        }
        let sub: Vec<Vec<Polynomial>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = cofactor * &det_poly(&sub);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Determinant of a rational matrix by Gaussian elimination with pivoting.
pub(crate) fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        let (top, rest) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &p;
            for (rc, pc) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *rc -= &f * pc;
            }
        }
    }
    det
}

/// Expands the diagonal minor `D(0, i1, …, ik)`: the determinant of the
/// Cayley-Menger submatrix on the border row/column plus the listed vertices.
///
/// Without `lengths` the result is a polynomial in both the known `c_ij` and
/// the unknown `x_ij` pairs among `verts`; with `lengths`, knowns are
/// substituted exactly and only the unknowns remain.
///
/// Panics if a needed length is missing from the assignment; callers validate
/// coverage up front.
pub fn minor_polynomial(
    m: &CayleyMengerMatrix,
    verts: &[u8],
    lengths: Option<&DistanceAssignment>,
) -> Polynomial {
    let mut vs: Vec<u8> = verts.to_vec();
    vs.sort_unstable();
    vs.dedup();
    assert_eq!(vs.len(), verts.len(), "duplicate vertices in minor");
    assert!(
        vs.iter().all(|&v| v >= 1 && v <= m.n()),
        "minor vertices outside 1..=n"
    );

    // Variables: pairs within `verts`, knowns (symbolic runs only) before
    // unknowns, each group in sorted order.
    let mut known_pairs = Vec::new();
    let mut unknown_pairs = Vec::new();
    for (pos, &vi) in vs.iter().enumerate() {
        for &vj in &vs[pos + 1..] {
            match m.entry(vi, vj) {
                CmEntry::Known(e) => known_pairs.push(e),
                CmEntry::Unknown(e) => unknown_pairs.push(e),
                _ => unreachable!("off-diagonal vertex pair"),
            }
        }
    }
    let mut vars: Vec<String> = Vec::new();
    if lengths.is_none() {
        vars.extend(known_pairs.iter().map(|&e| pair_var('c', e)));
    }
    vars.extend(unknown_pairs.iter().map(|&e| pair_var('x', e)));

    let entry_poly = |i: u8, j: u8| -> Polynomial {
        match m.entry(i, j) {
            CmEntry::Zero => Polynomial::zero(vars.clone()),
            CmEntry::One => Polynomial::constant(vars.clone(), BigRational::one()),
            CmEntry::Known(e) => match lengths {
                Some(l) => {
                    let c = l
                        .csq(e.0, e.1)
                        .unwrap_or_else(|| panic!("missing length for edge ({},{})", e.0, e.1));
                    Polynomial::constant(vars.clone(), c)
                }
                None => {
                    let idx = vars.iter().position(|v| *v == pair_var('c', e)).unwrap();
                    Polynomial::variable(vars.clone(), idx)
                }
            },
            CmEntry::Unknown(e) => {
                let idx = vars.iter().position(|v| *v == pair_var('x', e)).unwrap();
                Polynomial::variable(vars.clone(), idx)
            }
        }
    };

    let rows: Vec<u8> = std::iter::once(0).chain(vs.iter().copied()).collect();
    let mat: Vec<Vec<Polynomial>> = rows
        .iter()
        .map(|&i| rows.iter().map(|&j| entry_poly(i, j)).collect())
        .collect();
    det_poly(&mat)
}

/// One trilateration step: place `vertex` from three already-placed anchors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementStep {
    pub vertex: u8,
    pub anchors: [u8; 3],
}

/// A deterministic order for rebuilding planar coordinates from distances:
/// a base triangle, a sequence of three-anchor placements, and the leftover
/// determined pairs verified as consistency checks afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionPlan {
    pub base: [u8; 3],
    pub steps: Vec<PlacementStep>,
    pub checks: Vec<Edge>,
}

/// Greedy sequential-trilateration order over the determined pairs
/// (graph edges plus the system's unknown variables).
///
/// Picks the lexicographically first fully-determined base triangle, then
/// repeatedly places the lowest-labeled vertex with at least three determined
/// distances to already-placed vertices. Returns `None` when stuck — the
/// system cannot be reconstructed sequentially.
pub fn reconstruction_plan(g: &LinkageGraph, variables: &[Edge]) -> Option<ReconstructionPlan> {
    let n = g.n();
    let determined: BTreeSet<Edge> = g.edges().chain(variables.iter().copied()).collect();
    let has = |a: u8, b: u8| determined.contains(&edge(a, b));

    let mut base = None;
    'outer: for i in 1..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                if has(i, j) && has(i, k) && has(j, k) {
                    base = Some([i, j, k]);
                    break 'outer;
                }
            }
        }
    }
    let base = base?;

    let mut placed: Vec<u8> = base.to_vec();
    let mut used: BTreeSet<Edge> = [
        edge(base[0], base[1]),
        edge(base[0], base[2]),
        edge(base[1], base[2]),
    ]
    .into();
    let mut steps = Vec::new();
    while placed.len() < n as usize {
        let next = (1..=n)
            .filter(|v| !placed.contains(v))
            .find_map(|v| {
                let anchors: Vec<u8> = placed
                    .iter()
                    .copied()
                    .filter(|&p| has(p, v))
                    .collect();
                (anchors.len() >= 3).then(|| (v, [anchors[0], anchors[1], anchors[2]]))
            })?;
        for a in next.1 {
            used.insert(edge(a, next.0));
        }
        steps.push(PlacementStep {
            vertex: next.0,
            anchors: next.1,
        });
        placed.push(next.0);
    }
    let checks: Vec<Edge> = determined.difference(&used).copied().collect();
    Some(ReconstructionPlan { base, steps, checks })
}

/// A well-constrained polynomial system of vanishing diagonal minors.
///
/// The polynomials live over one shared variable list: the graph's squared
/// bar lengths `c_ij` (sorted edge order) followed by the chosen unknowns
/// `x_ij` (system order). Substituting lengths leaves a square system in the
/// unknowns whose solutions are the candidate assembly modes.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorSystem {
    pub topology: Option<TopologyId>,
    pub graph: LinkageGraph,
    /// Unknown squared-distance variables, in system order.
    pub variables: Vec<Edge>,
    /// Vertex 4-subsets naming the diagonal minors `D(0, i1..i4)`.
    pub minors: Vec<[u8; 4]>,
    /// Expanded minors over `c`-then-`x` variables.
    pub polynomials: Vec<Polynomial>,
    /// Normalized mixed volume of the substituted system's Newton polytopes.
    pub mixed_volume: u64,
    /// Sequential trilateration order for reconstructing coordinates.
    pub plan: ReconstructionPlan,
}

impl MinorSystem {
    /// Assembles a system from its combinatorial data. Returns `None` when no
    /// sequential reconstruction order exists or the mixed volume is zero
    /// (the system is degenerate for every choice of lengths).
    pub fn build(
        topology: Option<TopologyId>,
        graph: LinkageGraph,
        variables: Vec<Edge>,
        minors: Vec<[u8; 4]>,
    ) -> Option<MinorSystem> {
        assert_eq!(variables.len(), minors.len(), "system must be square");
        let plan = reconstruction_plan(&graph, &variables)?;
        let m = cm_matrix(&graph);
        let vars = global_vars(&graph, &variables);
        let polynomials: Vec<Polynomial> = minors
            .iter()
            .map(|vs| minor_polynomial(&m, vs, None).embed(vars.clone()))
            .collect();
        let sys = MinorSystem {
            topology,
            graph,
            variables,
            minors,
            polynomials,
            mixed_volume: 0,
            plan,
        };
        let mv = mixed_volume(&sys.newton_polytopes()).expect("square system of equal dimension");
        (mv > 0).then_some(MinorSystem {
            mixed_volume: mv,
            ..sys
        })
    }

    /// Indices of the unknown variables inside the shared variable list.
    pub fn var_indices(&self) -> Vec<usize> {
        let offset = self.graph.edge_count();
        (offset..offset + self.variables.len()).collect()
    }

    /// Names of the unknowns in system order.
    pub fn var_names(&self) -> Vec<String> {
        self.variables.iter().map(|&e| pair_var('x', e)).collect()
    }

    /// Total degrees of the polynomials in the unknowns.
    pub fn degrees(&self) -> Vec<u32> {
        let idx = self.var_indices();
        self.polynomials.iter().map(|p| p.degree_in(&idx)).collect()
    }

    /// Newton polytopes of the substituted system for generic lengths: the
    /// supports projected onto the unknowns.
    pub fn newton_polytopes(&self) -> Vec<NewtonPolytope> {
        let idx = self.var_indices();
        self.polynomials
            .iter()
            .map(|p| NewtonPolytope::from_support(idx.len(), p.support_in(&idx)))
            .collect()
    }

    /// Substitutes exact squared lengths, leaving polynomials in the unknowns.
    pub fn substitute(&self, lengths: &DistanceAssignment) -> Result<Vec<Polynomial>, CayleyError> {
        lengths.covers(&self.graph)?;
        let values: BTreeMap<usize, BigRational> = self
            .graph
            .edges()
            .enumerate()
            .map(|(i, e)| (i, lengths.csq(e.0, e.1).expect("covered")))
            .collect();
        Ok(self
            .polynomials
            .iter()
            .map(|p| p.eval_partial(&values))
            .collect())
    }

    /// Probabilistic finiteness certificate.
    ///
    /// Draws a random planar configuration on an integer grid, takes its
    /// squared distances as both the lengths and a point that provably lies
    /// on the variety (every diagonal minor vanishes at a real
    /// configuration), and tests the k×k Jacobian of the minors with respect
    /// to the unknowns for nonsingularity there — in exact arithmetic.
    /// A singular draw retries twice before rejecting.
    ///
    /// Evaluating at an arbitrary ambient point instead would accept systems
    /// that are positive-dimensional on the variety; anchoring the test to a
    /// configuration point is what makes it meaningful.
    pub fn certify(&self, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let partials: Vec<Vec<Polynomial>> = self
            .polynomials
            .iter()
            .map(|p| self.var_indices().iter().map(|&i| p.partial(i)).collect())
            .collect();
        (0..3).any(|_| {
            let point = random_configuration_point(&self.graph, &self.variables, &mut rng);
            let jac: Vec<Vec<BigRational>> = partials
                .iter()
                .map(|row| row.iter().map(|d| d.eval_q(&point)).collect())
                .collect();
            !rational_det(jac).is_zero()
        })
    }
}

/// Shared variable list for a system: `c` variables in sorted edge order,
/// then `x` variables in system order.
fn global_vars(g: &LinkageGraph, variables: &[Edge]) -> Vec<String> {
    g.edges()
        .map(|e| pair_var('c', e))
        .chain(variables.iter().map(|&e| pair_var('x', e)))
        .collect()
}

/// Squared-distance values of a random integer-grid configuration, ordered to
/// match [`global_vars`]: the graph's edges first, then the given unknowns.
fn random_configuration_point(
    g: &LinkageGraph,
    variables: &[Edge],
    rng: &mut impl Rng,
) -> Vec<BigRational> {
    let n = g.n() as usize;
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = (rng.gen_range(0..=500i64), rng.gen_range(0..=500i64));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let sq = |e: Edge| -> BigRational {
        let (ax, ay) = pts[(e.0 - 1) as usize];
        let (bx, by) = pts[(e.1 - 1) as usize];
        BigRational::from_integer(BigInt::from((ax - bx).pow(2) + (ay - by).pow(2)))
    };
    g.edges().map(sq).chain(variables.iter().map(|&e| sq(e))).collect()
}

/// The distinguished 5-variable minor system for the V17 topology:
/// unknowns {x15, x16, x35, x45, x67} with minors D(4,5,6,7), D(1,4,6,7),
/// D(1,4,5,7), D(1,2,3,5), D(1,3,5,6). Its mixed volume is 56.
pub fn canonical_system_v17() -> MinorSystem {
    canonical_system(TopologyId::V17).clone()
}

fn build_canonical_v17() -> MinorSystem {
    MinorSystem::build(
        Some(TopologyId::V17),
        builtin_topology(TopologyId::V17),
        vec![(1, 5), (1, 6), (3, 5), (4, 5), (6, 7)],
        vec![
            [4, 5, 6, 7],
            [1, 4, 6, 7],
            [1, 4, 5, 7],
            [1, 2, 3, 5],
            [1, 3, 5, 6],
        ],
    )
    .expect("canonical V17 system is well-constrained")
}

/// The minimum-mixed-volume system for each builtin topology.
///
/// V17 uses [`canonical_system_v17`]. The V37/V67 systems are the first
/// (smallest mixed volume, then lexicographic) results of
/// [`select_minor_system`], computed once and cached for the process.
pub fn canonical_system(id: TopologyId) -> &'static MinorSystem {
    static SYSTEMS: [OnceLock<MinorSystem>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = match id {
        TopologyId::V17 => &SYSTEMS[0],
        TopologyId::V37 => &SYSTEMS[1],
        TopologyId::V67 => &SYSTEMS[2],
    };
    slot.get_or_init(|| match id {
        TopologyId::V17 => build_canonical_v17(),
        _ => select_minor_system(&builtin_topology(id), 5)
            .expect("builtin topologies admit minor systems")
            .into_iter()
            .next()
            .expect("non-empty"),
    })
}

/// Enumerates well-constrained k-variable minor systems for a Laman graph.
///
/// Candidates pair a k-subset of the unknown distances with k of the
/// `C(n,4)` diagonal minors such that (a) the minors' unknowns cover exactly
/// the chosen subset, (b) the probabilistic finiteness certificate holds
/// (see [`MinorSystem::certify`]), and (c) a sequential trilateration order
/// exists. Results are sorted by mixed volume ascending (then by variables
/// and minors, so the order is fully deterministic).
///
/// The certificate RNG is seeded from the graph structure, making repeat
/// runs identical.
pub fn select_minor_system(g: &LinkageGraph, k: usize) -> Result<Vec<MinorSystem>, CayleyError> {
    let n = g.n();
    let unknowns = g.non_edges();
    assert!(
        k <= unknowns.len() && k <= 64,
        "k must not exceed the number of unknown pairs"
    );
    let m = cm_matrix(g);
    let topology = TopologyId::ALL.into_iter().find(|&id| builtin_topology(id) == *g);

    // All C(n,4) diagonal minors over the shared variable list, with a
    // bitmask of which unknowns each one touches.
    let vars = global_vars(g, &unknowns);
    let x_offset = g.edge_count();
    let mut minor_sets: Vec<[u8; 4]> = Vec::new();
    for a in 1..=n {
        for b in (a + 1)..=n {
            for c in (b + 1)..=n {
                for d in (c + 1)..=n {
                    minor_sets.push([a, b, c, d]);
                }
            }
        }
    }
    let minor_polys: Vec<Polynomial> = minor_sets
        .iter()
        .map(|vs| minor_polynomial(&m, vs, None).embed(vars.clone()))
        .collect();
    let minor_masks: Vec<u64> = minor_polys
        .iter()
        .map(|p| {
            let mut mask = 0u64;
            for (i, _) in unknowns.iter().enumerate() {
                if p.degree_in(&[x_offset + i]) > 0 {
                    mask |= 1 << i;
                }
            }
            mask
        })
        .collect();

    // Shared certificate data: three random configuration points and the
    // minors' partial derivatives evaluated there. Certifying a candidate is
    // then a k×k rational determinant over table lookups.
    let seed = 0x5EED_0000
        ^ ((n as u64) << 32)
        ^ ((g.edge_count() as u64) << 16)
        ^ (k as u64)
        ^ topology.map_or(0, |id| (id.extra_attach() as u64) << 8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts: Vec<Vec<Vec<BigRational>>> = (0..3)
        .map(|_| {
            let point = random_configuration_point(g, &unknowns, &mut rng);
            minor_polys
                .iter()
                .map(|p| {
                    (0..unknowns.len())
                        .map(|i| p.partial(x_offset + i).eval_q(&point))
                        .collect()
                })
                .collect()
        })
        .collect();

    // Enumerate variable subsets, then minor combinations covering exactly
    // that subset.
    let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let subsets = k_subsets(unknowns.len(), k);
    for var_subset in &subsets {
        let target: u64 = var_subset.iter().map(|&i| 1u64 << i).sum();
        let eligible: Vec<usize> = (0..minor_sets.len())
            .filter(|&i| minor_masks[i] != 0 && minor_masks[i] & !target == 0)
            .collect();
        if eligible.len() < k {
            continue;
        }
        for combo in k_subsets(eligible.len(), k) {
            let chosen: Vec<usize> = combo.iter().map(|&i| eligible[i]).collect();
            let union = chosen.iter().fold(0u64, |acc, &i| acc | minor_masks[i]);
            if union == target {
                candidates.push((var_subset.clone(), chosen));
            }
        }
    }

    let certified: Vec<(Vec<usize>, Vec<usize>)> = candidates
        .into_par_iter()
        .filter(|(var_subset, chosen)| {
            attempts.iter().any(|table| {
                let jac: Vec<Vec<BigRational>> = chosen
                    .iter()
                    .map(|&mi| var_subset.iter().map(|&vi| table[mi][vi].clone()).collect())
                    .collect();
                !rational_det(jac).is_zero()
            })
        })
        .collect();
    let systems: Vec<MinorSystem> = certified
        .into_par_iter()
        .filter_map(|(var_subset, chosen)| {
            let variables: Vec<Edge> = var_subset.iter().map(|&i| unknowns[i]).collect();
            let minors: Vec<[u8; 4]> = chosen.iter().map(|&i| minor_sets[i]).collect();
            MinorSystem::build(topology, g.clone(), variables, minors)
        })
        .collect();

    let mut systems = systems;
    systems.sort_by(|a, b| {
        (a.mixed_volume, &a.variables, &a.minors).cmp(&(b.mixed_volume, &b.variables, &b.minors))
    });
    if systems.is_empty() {
        return Err(CayleyError::NoCandidateSystem);
    }
    Ok(systems)
}

/// All k-element subsets of `0..n`, each ascending, in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The coordinate formulation: vertex 1 pinned at the origin, vertex 2 on the
/// positive x-axis at distance `l_12`, and one quadratic `(x_i−x_j)² +
/// (y_i−y_j)² − l_ij²` per remaining edge — `2n−4` equations in the `2n−4`
/// coordinates of vertices `3..=n`.
pub fn coordinate_system(
    g: &LinkageGraph,
    lengths: &DistanceAssignment,
) -> Result<Vec<Polynomial>, CayleyError> {
    if !g.has_edge(1, 2) {
        return Err(CayleyError::PinnedEdgeMissing);
    }
    lengths.covers(g)?;
    let mut vars = Vec::new();
    for v in 3..=g.n() {
        vars.push(format!("x{v}"));
        vars.push(format!("y{v}"));
    }
    let coord = |v: u8, axis: usize| -> Polynomial {
        // axis 0 = x, 1 = y; vertices 1 and 2 are pinned constants.
        Polynomial::variable(vars.clone(), 2 * (v as usize - 3) + axis)
    };
    let constant = |q: BigRational| Polynomial::constant(vars.clone(), q);
    let l12 = BigRational::from_float(lengths.length(1, 2).expect("covered")).unwrap();

    let mut system = Vec::new();
    for (a, b) in g.edges() {
        if (a, b) == (1, 2) {
            continue;
        }
        let c = constant(lengths.csq(a, b).expect("covered"));
        let eq = match a {
            1 => {
                // x_b² + y_b² − c
                let (x, y) = (coord(b, 0), coord(b, 1));
                &(&(&x * &x) + &(&y * &y)) - &c
            }
            2 => {
                // (x_b − l12)² + y_b² − c
                let (x, y) = (coord(b, 0), coord(b, 1));
                let dx = &x - &constant(l12.clone());
                &(&(&dx * &dx) + &(&y * &y)) - &c
            }
            _ => {
                let dx = &coord(a, 0) - &coord(b, 0);
                let dy = &coord(a, 1) - &coord(b, 1);
                &(&(&dx * &dx) + &(&dy * &dy)) - &c
            }
        };
        system.push(eq);
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builtin_topology;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn v17_matrix_shape() {
        let m = cm_matrix(&builtin_topology(TopologyId::V17));
        assert_eq!(m.n(), 7);
        assert_eq!(m.knowns().count(), 11);
        let unknowns: Vec<Edge> = m.unknowns().collect();
        assert_eq!(
            unknowns,
            vec![
                (1, 5),
                (1, 6),
                (2, 4),
                (2, 6),
                (2, 7),
                (3, 4),
                (3, 5),
                (3, 7),
                (4, 5),
                (6, 7)
            ]
        );
        assert_eq!(m.entry(0, 3), CmEntry::One);
        assert_eq!(m.entry(4, 4), CmEntry::Zero);
        assert_eq!(m.entry(5, 1), CmEntry::Unknown((1, 5)));
        assert_eq!(m.entry(2, 1), CmEntry::Known((1, 2)));
    }

    #[test]
    fn triangle_matrix_all_known() {
        let m = cm_matrix(&LinkageGraph::triangle());
        assert_eq!(m.unknowns().count(), 0);
        assert_eq!(m.knowns().count(), 3);
    }

    #[test]
    fn d123_for_345_triangle() {
        let g = LinkageGraph::triangle();
        let l = DistanceAssignment::new([((1, 2), 3.0), ((1, 3), 4.0), ((2, 3), 5.0)]).unwrap();
        let p = minor_polynomial(&cm_matrix(&g), &[1, 2, 3], Some(&l));
        assert_eq!(p.vars().len(), 0);
        assert_eq!(p.eval_q(&[]), q(-576));
    }

    #[test]
    fn d123_unit_right_triangle() {
        // Points (0,0), (1,0), (0,1): c = (1, 1, 2). D(1,2,3) = −16·area² = −4.
        let g = LinkageGraph::triangle();
        let p = minor_polynomial(&cm_matrix(&g), &[1, 2, 3], None);
        assert_eq!(p.vars(), &["c12", "c13", "c23"]);
        assert_eq!(p.eval_q(&[q(1), q(1), q(2)]), q(-4));
    }

    #[test]
    fn d123_product_formula() {
        // D(1,2,3) = −(a+b+c)(a+b−c)(a+c−b)(b+c−a) with a=l12, b=l13, c=l23.
        let g = LinkageGraph::triangle();
        let p = minor_polynomial(&cm_matrix(&g), &[1, 2, 3], None);
        let cases = [(3i64, 4i64, 5i64), (2, 2, 3), (7, 8, 9), (1, 1, 1)];
        for (a, b, c) in cases {
            let expect = -(a + b + c) * (a + b - c) * (a + c - b) * (b + c - a);
            // The polynomial is in squared lengths.
            let val = p.eval_q(&[q(a * a), q(b * b), q(c * c)]);
            assert_eq!(val, q(expect), "triangle ({a},{b},{c})");
        }
    }

    #[test]
    fn minor_invariant_under_vertex_order() {
        let m = cm_matrix(&builtin_topology(TopologyId::V17));
        let a = minor_polynomial(&m, &[1, 3, 5, 6], None);
        let b = minor_polynomial(&m, &[6, 1, 5, 3], None);
        assert_eq!(a, b);
    }

    #[test]
    fn canonical_v17_shape() {
        let sys = canonical_system_v17();
        assert_eq!(sys.variables, vec![(1, 5), (1, 6), (3, 5), (4, 5), (6, 7)]);
        assert_eq!(sys.degrees(), vec![3, 2, 2, 2, 3]);
        assert_eq!(sys.mixed_volume, 56);

        // D(1,3,5,6) involves exactly {x15, x16, x35}.
        let p = &sys.polynomials[4];
        let idx = sys.var_indices();
        let touched: Vec<Edge> = sys
            .variables
            .iter()
            .zip(&idx)
            .filter(|&(_, &i)| p.degree_in(&[i]) > 0)
            .map(|(&e, _)| e)
            .collect();
        assert_eq!(touched, vec![(1, 5), (1, 6), (3, 5)]);

        // D(4,5,6,7) is cubic in {x45, x67}; D(1,2,3,5) quadratic in {x15, x35}.
        let d4567 = &sys.polynomials[0];
        assert_eq!(d4567.degree_in(&idx), 3);
        let d1235 = &sys.polynomials[3];
        assert_eq!(d1235.degree_in(&idx), 2);
        let touched: Vec<Edge> = sys
            .variables
            .iter()
            .zip(&idx)
            .filter(|&(_, &i)| d1235.degree_in(&[i]) > 0)
            .map(|(&e, _)| e)
            .collect();
        assert_eq!(touched, vec![(1, 5), (3, 5)]);
    }

    #[test]
    fn canonical_v17_plan_is_fixed_order() {
        let sys = canonical_system_v17();
        assert_eq!(sys.plan.base, [1, 2, 3]);
        let order: Vec<(u8, [u8; 3])> = sys
            .plan
            .steps
            .iter()
            .map(|s| (s.vertex, s.anchors))
            .collect();
        assert_eq!(
            order,
            vec![
                (5, [1, 2, 3]),
                (6, [1, 3, 5]),
                (4, [1, 5, 6]),
                (7, [1, 5, 6]),
            ]
        );
        // Distances consumed: base {12,13,23}; vertex 5 {x15,25,x35}; vertex 6
        // {x16,36,56}; vertex 4 {14,x45,46}; vertex 7 {17,57,x67}.  The one
        // distance left over is the edge (4,7), which becomes the consistency
        // check.
        assert_eq!(sys.plan.checks, vec![(4, 7)]);
    }

    #[test]
    fn canonical_v17_certificate_holds() {
        assert!(canonical_system_v17().certify(42));
    }

    #[test]
    fn substitute_then_expand_matches_expand_then_substitute() {
        let g = builtin_topology(TopologyId::V17);
        let m = cm_matrix(&g);
        let lengths = DistanceAssignment::new(g.edges().map(|e| {
            ((e.0, e.1), 1.0 + e.0 as f64 + 0.5 * e.1 as f64)
        }))
        .unwrap();
        for verts in [[1u8, 2, 3, 5], [4, 5, 6, 7], [1, 3, 5, 6]] {
            let substituted = minor_polynomial(&m, &verts, Some(&lengths));
            let symbolic = minor_polynomial(&m, &verts, None);
            // Substitute the c-variables of the symbolic expansion.
            let values: BTreeMap<usize, BigRational> = symbolic
                .vars()
                .iter()
                .enumerate()
                .filter(|(_, v)| v.starts_with('c'))
                .map(|(i, v)| {
                    let a = v.as_bytes()[1] - b'0';
                    let b = v.as_bytes()[2] - b'0';
                    (i, lengths.csq(a, b).unwrap())
                })
                .collect();
            let collapsed = symbolic.eval_partial(&values);
            assert_eq!(collapsed, substituted, "minor {verts:?}");
        }
    }

    #[test]
    fn rational_det_agrees_with_cofactor() {
        // Evaluate a symbolic 4×4 minor at a rational point both ways.
        let g = LinkageGraph::triangle();
        let p = minor_polynomial(&cm_matrix(&g), &[1, 2, 3], None);
        let point = [q(9), q(16), q(25)];
        let via_poly = p.eval_q(&point);
        let mat: Vec<Vec<BigRational>> = vec![
            vec![q(0), q(1), q(1), q(1)],
            vec![q(1), q(0), q(9), q(16)],
            vec![q(1), q(9), q(0), q(25)],
            vec![q(1), q(16), q(25), q(0)],
        ];
        assert_eq!(rational_det(mat), via_poly);
    }

    #[test]
    fn coordinate_system_shape() {
        let g = builtin_topology(TopologyId::V17);
        let lengths =
            DistanceAssignment::new(g.edges().map(|e| ((e.0, e.1), 100.0))).unwrap();
        let sys = coordinate_system(&g, &lengths).unwrap();
        assert_eq!(sys.len(), 10); // 2·7−4
        assert!(sys.iter().all(|p| p.total_degree() == 2));
        let bezout: u64 = sys.iter().map(|p| p.total_degree() as u64).product();
        assert_eq!(bezout, 1024); // 4^(7−2)
    }

    #[test]
    fn coordinate_system_triangle() {
        let g = LinkageGraph::triangle();
        let l = DistanceAssignment::new([((1, 2), 1.0), ((1, 3), 1.0), ((2, 3), 1.0)]).unwrap();
        let sys = coordinate_system(&g, &l).unwrap();
        assert_eq!(sys.len(), 2);
        // (1/2, ±√3/2) solves both equations; check the positive one at
        // rational precision via residual smallness instead of exactness.
        let x = 0.5f64;
        let y = (3.0f64).sqrt() / 2.0;
        for p in &sys {
            let val = eval_f64(p, &[x, y]);
            assert!(val.abs() < 1e-12, "residual {val}");
        }
    }

    fn eval_f64(p: &Polynomial, point: &[f64]) -> f64 {
        p.terms()
            .map(|(exps, coeff)| {
                let mut t = rational_to_f64(coeff);
                for (i, &e) in exps.iter().enumerate() {
                    t *= point[i].powi(e as i32);
                }
                t
            })
            .sum()
    }

    fn rational_to_f64(r: &BigRational) -> f64 {
        use num_traits::ToPrimitive;
        r.to_f64().unwrap()
    }

    #[test]
    fn vector_form_roundtrip() {
        let g = builtin_topology(TopologyId::V17);
        let v: Vec<f64> = (1..=11).map(|i| i as f64 * 10.0).collect();
        let l = DistanceAssignment::from_vector(&g, &v).unwrap();
        assert_eq!(l.to_vector(&g).unwrap(), v);
        // Lexicographically last edge of V17 is (5,7).
        assert_eq!(l.length(5, 7), Some(110.0));
        assert!(DistanceAssignment::from_vector(&g, &v[..10]).is_err());
        assert!(DistanceAssignment::new([((1, 2), 0.0)]).is_err());
        assert!(DistanceAssignment::new([((1, 2), -3.0)]).is_err());
    }

    /// Full V17 enumeration. The histogram acts as a regression fence for
    /// the whole selection pipeline: cover enumeration, the finiteness
    /// certificate, and every mixed-volume computation behind it.
    #[test]
    fn v17_selection_enumerates_all_certified_systems() {
        let systems = select_minor_system(&builtin_topology(TopologyId::V17), 5).unwrap();
        assert_eq!(systems.len(), 156);

        let mut hist: BTreeMap<u64, usize> = BTreeMap::new();
        for s in &systems {
            *hist.entry(s.mixed_volume).or_default() += 1;
        }
        let expected: BTreeMap<u64, usize> =
            [(56, 82), (60, 20), (64, 10), (68, 36), (74, 4), (78, 4)].into();
        assert_eq!(hist, expected);

        // Sorted ascending; the minimum class is the canonical one, and the
        // canonical system itself is among its members.
        assert!(systems.windows(2).all(|w| w[0].mixed_volume <= w[1].mixed_volume));
        assert_eq!(systems[0].mixed_volume, 56);
        // The enumeration lists minors in generation order, the canonical
        // constructor in trilateration order; compare as sets.
        let canonical = canonical_system_v17();
        let canonical_minors: BTreeSet<[u8; 4]> = canonical.minors.iter().copied().collect();
        assert!(systems.iter().take_while(|s| s.mixed_volume == 56).any(|s| {
            s.variables == canonical.variables
                && s.minors.iter().copied().collect::<BTreeSet<_>>() == canonical_minors
        }));
    }
}
