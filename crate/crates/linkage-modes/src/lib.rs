//! Counting and maximizing assembly modes of planar rigid bar linkages.
//!
//! A rigid (Laman) linkage with fixed bar lengths admits finitely many planar
//! configurations up to congruence — its *assembly modes*. This crate derives
//! polynomial systems for those configurations from Cayley-Menger distance
//! matrices, bounds their root counts by mixed volumes of Newton polytopes,
//! counts real positive solutions with a homotopy continuation solver,
//! reconstructs planar coordinates by trilateration, and searches the space of
//! integer length vectors for designs maximizing the mode count with
//! simulated annealing and the cross-entropy method.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] — linkage graphs, Henneberg steps, the Laman condition, and
//!   closed-form bounds on embedding counts;
//! * [`poly`] — sparse multivariate polynomials with exact rational
//!   coefficients;
//! * [`cayley`] — Cayley-Menger matrices, diagonal minors, and the selection
//!   of well-constrained minor systems;
//! * [`polytope`] — exact convex hull volumes, Newton polytopes, mixed
//!   volumes, and Bézout bounds;
//! * [`homotopy`] — total-degree continuation tracking and the objective `N`
//!   (number of real positive solutions);
//! * [`realize`] — coordinate reconstruction, embeddability checks, and SVG
//!   rendering of assembly modes;
//! * [`optimize`] — direct sampling, simulated annealing, and cross-entropy
//!   search over integer length vectors;
//! * [`io`] — serialization formats (topology/lengths/system/solution JSON,
//!   run CSV) and run manifests.

pub mod cayley;
pub mod graph;
pub mod homotopy;
pub mod io;
pub mod optimize;
pub mod poly;
pub mod polytope;
pub mod realize;

pub use cayley::{
    canonical_system, canonical_system_v17, cm_matrix, coordinate_system, minor_polynomial,
    select_minor_system, CayleyMengerMatrix, DistanceAssignment, MinorSystem,
};
pub use graph::{
    apply_henneberg, builtin_topology, closed_form_bounds, desargues_graph, is_laman, Bounds,
    HennebergStep, LinkageGraph, TopologyId,
};
pub use homotopy::{
    classify_solutions, count_assembly_detailed, count_assembly_n, oracle_coordinate_count,
    solve_system, Classification, OracleCount, Solution, SolutionSet, SolveError, TrackerConfig,
};
pub use io::RunManifest;
pub use optimize::{
    cross_entropy, full_length_vector, gaussian_neighbour, optimize as run_optimizer,
    random_search, simulated_annealing, OptimizerConfig, OptimizerRun, SearchMethod,
};
pub use poly::Polynomial;
pub use polytope::{bezout_bound, mixed_volume, newton_polytope, polytope_volume, NewtonPolytope};
pub use realize::{
    export_svg, reconstruct_embedding, reconstruct_with_plan, verify_cayley_menger, CmReport,
    Embedding, RealizeError, SvgOptions,
};

/// An unordered vertex pair with 1-based labels, stored as `(min, max)`.
pub type Edge = (u8, u8);

/// Normalizes a vertex pair to the canonical `(min, max)` form.
///
/// Panics on self-loops: a bar joining a vertex to itself has no meaning.
pub fn edge(a: u8, b: u8) -> Edge {
    assert_ne!(a, b, "self-loop ({a},{b}) is not a valid edge");
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
