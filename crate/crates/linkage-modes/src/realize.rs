//! From minor-system solutions back to planar coordinates: sequential
//! trilateration along a reconstruction plan, Cayley-Menger verification of
//! the result, and deterministic SVG rendering of assembly modes.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::cayley::{DistanceAssignment, MinorSystem, ReconstructionPlan};
use crate::graph::LinkageGraph;
use crate::homotopy::SolutionSet;
use crate::Edge;

#[derive(Debug, Error, PartialEq)]
pub enum RealizeError {
    #[error("base triangle is degenerate (collinear within tolerance)")]
    DegenerateBase,
    #[error("solution is not embeddable: {0}")]
    Infeasible(String),
    #[error("trilateration tie at vertex {0}: instance is non-generic")]
    NonGeneric(u8),
    #[error("no distance available for pair ({0}, {1})")]
    MissingDistance(u8, u8),
}

/// A planar placement of the linkage's vertices. Index 0 holds vertex 1.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub coords: Vec<(f64, f64)>,
    /// Sign of the base-triangle determinant; +1 by construction, −1 after
    /// mirroring.
    pub orientation: i8,
    /// Largest relative error across the distances used to build it.
    pub max_residual: f64,
}

impl Embedding {
    pub fn point(&self, vertex: u8) -> (f64, f64) {
        self.coords[(vertex - 1) as usize]
    }

    /// Euclidean distance between two vertices.
    pub fn measure(&self, a: u8, b: u8) -> f64 {
        let (xa, ya) = self.point(a);
        let (xb, yb) = self.point(b);
        ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt()
    }

    /// Reflection across the x-axis: an exact coordinate negation, so every
    /// pairwise distance is preserved bit-for-bit.
    pub fn mirrored(&self) -> Embedding {
        Embedding {
            coords: self.coords.iter().map(|&(x, y)| (x, -y)).collect(),
            orientation: -self.orientation,
            max_residual: self.max_residual,
        }
    }

    /// Uniform rescaling, for mapping normalized solves back to input units.
    pub fn scaled(&self, factor: f64) -> Embedding {
        Embedding {
            coords: self.coords.iter().map(|&(x, y)| (x * factor, y * factor)).collect(),
            orientation: self.orientation,
            max_residual: self.max_residual,
        }
    }
}

/// Relative tolerance for the third-distance selection in trilateration.
const SELECT_TOL: f64 = 1e-6;

fn key(a: u8, b: u8) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Reconstructs an embedding by walking `plan`: the base triangle goes at
/// the origin with orientation +1, every later vertex is intersected from
/// two anchor circles and disambiguated by the third anchor, and leftover
/// determined pairs are verified. Distances come from `lengths` (graph
/// edges) plus `solution` (squared values of the system variables).
pub fn reconstruct_with_plan(
    g: &LinkageGraph,
    plan: &ReconstructionPlan,
    lengths: &DistanceAssignment,
    solution: &[(Edge, f64)],
) -> Result<Embedding, RealizeError> {
    // Squared distances for every determined pair.
    let mut sq: BTreeMap<Edge, f64> = BTreeMap::new();
    for e in g.edges() {
        let l = lengths
            .length(e.0, e.1)
            .ok_or(RealizeError::MissingDistance(e.0, e.1))?;
        sq.insert(e, l * l);
    }
    for &(e, v) in solution {
        if !(v.is_finite() && v > 0.0) {
            return Err(RealizeError::Infeasible(format!(
                "variable x{}{} = {v} is not a positive distance",
                e.0, e.1
            )));
        }
        sq.insert(e, v);
    }
    let get = |a: u8, b: u8| -> Result<f64, RealizeError> {
        sq.get(&key(a, b))
            .copied()
            .ok_or(RealizeError::MissingDistance(a.min(b), a.max(b)))
    };

    let n = g.n() as usize;
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; n];
    let place = |coords: &mut Vec<Option<(f64, f64)>>, v: u8, p: (f64, f64)| {
        coords[(v - 1) as usize] = Some(p);
    };

    // Base triangle (a, b, c): a at the origin, b on the positive x-axis,
    // c in the upper half-plane — orientation +1.
    let [a, b, c] = plan.base;
    let dab = get(a, b)?;
    let dac = get(a, c)?;
    let dbc = get(b, c)?;
    let ab = dab.sqrt();
    let cx = (dab + dac - dbc) / (2.0 * ab);
    let h2 = dac - cx * cx;
    let scale = dab.max(dac).max(dbc);
    if h2 <= 1e-12 * scale {
        return Err(RealizeError::DegenerateBase);
    }
    place(&mut coords, a, (0.0, 0.0));
    place(&mut coords, b, (ab, 0.0));
    place(&mut coords, c, (cx, h2.sqrt()));
    let mut max_residual = 0.0f64;

    for step in &plan.steps {
        let [p, q, r] = step.anchors;
        let pp = coords[(p - 1) as usize].expect("anchors placed before use");
        let qq = coords[(q - 1) as usize].expect("anchors placed before use");
        let rr = coords[(r - 1) as usize].expect("anchors placed before use");
        let dp = get(step.vertex, p)?;
        let dq = get(step.vertex, q)?;
        let dr = get(step.vertex, r)?;

        // Two-circle intersection around p and q.
        let ex = qq.0 - pp.0;
        let ey = qq.1 - pp.1;
        let d2 = ex * ex + ey * ey;
        if d2 <= 0.0 {
            return Err(RealizeError::Infeasible(format!(
                "anchors {p} and {q} coincide"
            )));
        }
        let alpha = (dp - dq + d2) / (2.0 * d2);
        let h2 = dp - alpha * alpha * d2;
        let scale = dp.max(dq).max(d2);
        if h2 < -1e-9 * scale {
            return Err(RealizeError::Infeasible(format!(
                "circles around {p} and {q} do not meet for vertex {}",
                step.vertex
            )));
        }
        let h = (h2.max(0.0) / d2).sqrt();
        let base = (pp.0 + alpha * ex, pp.1 + alpha * ey);
        let cand = [
            (base.0 - h * ey, base.1 + h * ex),
            (base.0 + h * ey, base.1 - h * ex),
        ];

        // Pick the intersection matching the third anchor distance.
        let err = |pt: (f64, f64)| {
            let m = (pt.0 - rr.0).powi(2) + (pt.1 - rr.1).powi(2);
            (m - dr).abs() / dr.max(1e-300)
        };
        let (e0, e1) = (err(cand[0]), err(cand[1]));
        let separated = h * d2.sqrt() > SELECT_TOL * scale.sqrt();
        match (e0 <= SELECT_TOL, e1 <= SELECT_TOL) {
            (false, false) => {
                return Err(RealizeError::Infeasible(format!(
                    "third distance to {r} matches neither intersection for vertex {} \
                     (residuals {e0:.3e}, {e1:.3e})",
                    step.vertex
                )))
            }
            (true, true) if separated => return Err(RealizeError::NonGeneric(step.vertex)),
            (true, false) => {
                place(&mut coords, step.vertex, cand[0]);
                max_residual = max_residual.max(e0);
            }
            _ => {
                place(&mut coords, step.vertex, cand[1]);
                max_residual = max_residual.max(e1);
            }
        }
    }

    let embedding = Embedding {
        coords: coords
            .into_iter()
            .map(|c| c.expect("plan places every vertex"))
            .collect(),
        orientation: 1,
        max_residual,
    };

    // Leftover determined pairs double as consistency checks.
    for &(u, w) in &plan.checks {
        let want = get(u, w)?;
        let got = embedding.measure(u, w).powi(2);
        let rel = (got - want).abs() / want.max(1e-300);
        if rel > SELECT_TOL {
            return Err(RealizeError::Infeasible(format!(
                "check pair ({u}, {w}) off by {rel:.3e} relative"
            )));
        }
    }
    let worst_check = plan
        .checks
        .iter()
        .map(|&(u, w)| {
            let want = sq[&key(u, w)];
            (embedding.measure(u, w).powi(2) - want).abs() / want.max(1e-300)
        })
        .fold(0.0, f64::max);

    Ok(Embedding {
        max_residual: embedding.max_residual.max(worst_check),
        ..embedding
    })
}

/// Reconstruction for a minor system's own variables and plan: `solution`
/// holds the real parts of a refined real solution, in system variable
/// order.
pub fn reconstruct_embedding(
    system: &MinorSystem,
    lengths: &DistanceAssignment,
    solution: &[f64],
) -> Result<Embedding, RealizeError> {
    assert_eq!(
        solution.len(),
        system.variables.len(),
        "solution arity must match the system"
    );
    let pairs: Vec<(Edge, f64)> = system
        .variables
        .iter()
        .copied()
        .zip(solution.iter().copied())
        .collect();
    reconstruct_with_plan(&system.graph, &system.plan, lengths, &pairs)
}

/// Reconstructs every real positive solution of a solved minor system and
/// keeps those that rebuild successfully. `lengths` must be the assignment
/// the solved system was substituted with (typically the unit-maximum
/// normalization), so the solution values and the known squared distances
/// share one scale. Results keep that scale; rescale with
/// [`Embedding::scaled`] to return to input units.
pub fn embeddable_solutions(
    system: &MinorSystem,
    lengths: &DistanceAssignment,
    set: &SolutionSet,
    real_tol: f64,
) -> Vec<Embedding> {
    set.solutions
        .iter()
        .filter_map(|s| s.real_positive_point(real_tol))
        .filter_map(|point| reconstruct_embedding(system, lengths, &point).ok())
        .collect()
}

// ---------------------------------------------------------------------------
// Cayley-Menger verification of a numeric point set.

/// Numeric embeddability report for a planar point set: rank of the
/// Cayley-Menger matrix, sign conditions for pairs and triples, and
/// vanishing of the larger diagonal minors. All residuals are scaled by the
/// Hadamard bound of the minor, so the tolerances are meaningful at any
/// coordinate magnitude.
#[derive(Clone, Debug)]
pub struct CmReport {
    pub points: usize,
    pub rank: usize,
    pub rank_ok: bool,
    /// Worst scaled violation of `(−1)^k D ≥ 0` over k = 2, 3.
    pub max_sign_violation: f64,
    pub sign_ok: bool,
    /// Worst scaled magnitude of the k = 4, 5 minors, which must vanish in
    /// the plane.
    pub max_vanishing: f64,
    pub vanish_ok: bool,
}

impl CmReport {
    pub fn pass(&self) -> bool {
        self.rank_ok && self.sign_ok && self.vanish_ok
    }
}

/// Tolerance for scaled minor residuals and the rank cutoff.
const CM_TOL: f64 = 1e-9;

/// Checks the embeddability conditions on an explicit planar configuration.
pub fn verify_cayley_menger(points: &[(f64, f64)]) -> CmReport {
    let n = points.len();
    assert!(n >= 3, "need at least three points");
    // Bordered matrix B: row/column 0 of ones (B[0][0] = 0), then squared
    // distances.
    let mut b = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 1..=n {
        b[0][i] = 1.0;
        b[i][0] = 1.0;
        for j in 1..=n {
            if i != j {
                let (xi, yi) = points[i - 1];
                let (xj, yj) = points[j - 1];
                b[i][j] = (xi - xj).powi(2) + (yi - yj).powi(2);
            }
        }
    }

    let m = DMatrix::from_fn(n + 1, n + 1, |i, j| b[i][j]);
    let svs = m.singular_values();
    let cutoff = svs[0] * (n as f64 + 1.0) * f64::EPSILON.sqrt();
    let rank = svs.iter().filter(|&&s| s > cutoff).count();

    let mut max_sign_violation = 0.0f64;
    let mut max_vanishing = 0.0f64;
    for k in 2..=n.min(5) {
        for subset in k_subsets(n, k) {
            let d = bordered_minor(&b, &subset);
            let scale = hadamard_bound(&b, &subset).max(1.0);
            let signed = if k % 2 == 0 { d } else { -d };
            match k {
                2 | 3 => max_sign_violation = max_sign_violation.max(-signed / scale),
                _ => max_vanishing = max_vanishing.max(d.abs() / scale),
            }
        }
    }

    CmReport {
        points: n,
        rank,
        rank_ok: rank == 4,
        max_sign_violation,
        sign_ok: max_sign_violation <= CM_TOL,
        max_vanishing,
        vanish_ok: max_vanishing <= CM_TOL,
    }
}

/// D(i₁,…,i_k): determinant of the bordered submatrix on rows/columns
/// {0} ∪ subset (1-based point indices).
fn bordered_minor(b: &[Vec<f64>], subset: &[usize]) -> f64 {
    let mut idx = vec![0usize];
    idx.extend(subset.iter().copied());
    let k = idx.len();
    let m = DMatrix::from_fn(k, k, |i, j| b[idx[i]][idx[j]]);
    m.determinant()
}

fn hadamard_bound(b: &[Vec<f64>], subset: &[usize]) -> f64 {
    let mut idx = vec![0usize];
    idx.extend(subset.iter().copied());
    idx.iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| b[i][j] * b[i][j])
                .sum::<f64>()
                .sqrt()
        })
        .product()
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        // Advance the lexicographically last position that can move.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if cur[i] < n - (k - 1 - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// SVG rendering.

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Also render each embedding reflected across the horizontal axis.
    pub mirror: bool,
    /// Grid columns; 0 picks a near-square layout.
    pub columns: usize,
    /// Cell edge in pixels.
    pub cell: f64,
    pub label_vertices: bool,
    /// Free-text provenance comment embedded at the top (no timestamps, so
    /// identical inputs yield identical bytes).
    pub manifest: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            mirror: false,
            columns: 0,
            cell: 160.0,
            label_vertices: true,
            manifest: None,
        }
    }
}

/// Renders embeddings as an SVG grid, one cell per embedding (two with the
/// mirror option: original then reflection). Layout, scaling, and number
/// formatting are all deterministic functions of the input.
pub fn export_svg(g: &LinkageGraph, embeddings: &[Embedding], options: &SvgOptions) -> String {
    assert!(!embeddings.is_empty(), "nothing to draw");
    let mut cells: Vec<Embedding> = Vec::new();
    for e in embeddings {
        cells.push(e.clone());
        if options.mirror {
            cells.push(e.mirrored());
        }
    }
    let cols = if options.columns > 0 {
        options.columns
    } else {
        (cells.len() as f64).sqrt().ceil() as usize
    };
    let rows = cells.len().div_ceil(cols);
    let cell = options.cell;
    let width = cols as f64 * cell;
    let height = rows as f64 * cell;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.0} {height:.0}\" \
         font-family=\"sans-serif\">\n"
    ));
    if let Some(m) = &options.manifest {
        svg.push_str(&format!("<!-- {} -->\n", m.replace("--", "—")));
    }
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let bodies: Vec<String> = cells
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let ox = (i % cols) as f64 * cell;
            let oy = (i / cols) as f64 * cell;
            render_cell(g, e, ox, oy, cell, options.label_vertices)
        })
        .collect();
    for b in bodies {
        svg.push_str(&b);
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_cell(g: &LinkageGraph, e: &Embedding, ox: f64, oy: f64, cell: f64, label: bool) -> String {
    // Normalize this embedding's bounding box into the cell with a margin;
    // SVG's y-axis points down, so flip.
    let xs: Vec<f64> = e.coords.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = e.coords.iter().map(|p| p.1).collect();
    let (x0, x1) = (xs.iter().cloned().fold(f64::MAX, f64::min), xs.iter().cloned().fold(f64::MIN, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::MAX, f64::min), ys.iter().cloned().fold(f64::MIN, f64::max));
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let margin = 0.12 * cell;
    let s = (cell - 2.0 * margin) / span;
    let tx = |x: f64| ox + margin + (x - x0) * s + (cell - 2.0 * margin - (x1 - x0) * s) / 2.0;
    let ty = |y: f64| oy + cell - margin - (y - y0) * s - (cell - 2.0 * margin - (y1 - y0) * s) / 2.0;

    let mut out = String::new();
    out.push_str(&format!(
        "<g class=\"cell\">\n<rect x=\"{ox:.2}\" y=\"{oy:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" \
         fill=\"none\" stroke=\"#ddd\"/>\n"
    ));
    for (a, b) in g.edges() {
        let pa = e.point(a);
        let pb = e.point(b);
        out.push_str(&format!(
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#334\" stroke-width=\"1.5\"/>\n",
            tx(pa.0), ty(pa.1), tx(pb.0), ty(pb.1)
        ));
    }
    for v in 1..=g.n() {
        let p = e.point(v);
        out.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#c33\"/>\n",
            tx(p.0), ty(p.1)
        ));
        if label {
            out.push_str(&format!(
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"9\" fill=\"#222\">{v}</text>\n",
                tx(p.0) + 4.0, ty(p.1) - 4.0
            ));
        }
    }
    out.push_str("</g>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::reconstruction_plan;
    use crate::graph::{builtin_topology, TopologyId};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle_plan() -> (LinkageGraph, ReconstructionPlan) {
        let g = LinkageGraph::triangle();
        let plan = reconstruction_plan(&g, &[]).unwrap();
        (g, plan)
    }

    #[test]
    fn equilateral_triangle() {
        let (g, plan) = triangle_plan();
        let lengths =
            DistanceAssignment::new([((1, 2), 1.0), ((1, 3), 1.0), ((2, 3), 1.0)]).unwrap();
        let e = reconstruct_with_plan(&g, &plan, &lengths, &[]).unwrap();
        assert_eq!(e.orientation, 1);
        let expect = [(0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0)];
        for (got, want) in e.coords.iter().zip(expect) {
            assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_base_is_degenerate() {
        let (g, plan) = triangle_plan();
        let lengths =
            DistanceAssignment::new([((1, 2), 2.0), ((1, 3), 1.0), ((2, 3), 1.0)]).unwrap();
        assert!(matches!(
            reconstruct_with_plan(&g, &plan, &lengths, &[]),
            Err(RealizeError::DegenerateBase)
        ));
    }

    /// Plants 7 points, measures the 11 edges and 10 variable pairs, and
    /// checks the plan machinery reproduces a congruent configuration.
    #[test]
    fn roundtrip_through_planted_configuration() {
        let g = builtin_topology(TopologyId::V17);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let pts: Vec<(f64, f64)> = (0..7)
                .map(|_| (rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0))
                .collect();
            let dist = |a: u8, b: u8| {
                let (xa, ya) = pts[(a - 1) as usize];
                let (xb, yb) = pts[(b - 1) as usize];
                ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt()
            };
            let lengths =
                DistanceAssignment::new(g.edges().map(|e| (e, dist(e.0, e.1)))).unwrap();
            let vars: Vec<Edge> = g.non_edges();
            let plan = reconstruction_plan(&g, &vars).unwrap();
            let solution: Vec<(Edge, f64)> = vars
                .iter()
                .map(|&e| (e, dist(e.0, e.1).powi(2)))
                .collect();
            let emb = reconstruct_with_plan(&g, &plan, &lengths, &solution).unwrap();
            assert!(emb.max_residual < 1e-8, "residual {}", emb.max_residual);
            for a in 1..=7u8 {
                for b in (a + 1)..=7 {
                    assert!(
                        (emb.measure(a, b) - dist(a, b)).abs() < 1e-7,
                        "pair ({a},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn corrupted_check_pair_is_infeasible() {
        let g = builtin_topology(TopologyId::V17);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<(f64, f64)> = (0..7)
            .map(|_| (rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0))
            .collect();
        let dist = |a: u8, b: u8| {
            let (xa, ya) = pts[(a - 1) as usize];
            let (xb, yb) = pts[(b - 1) as usize];
            ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt()
        };
        let lengths = DistanceAssignment::new(g.edges().map(|e| (e, dist(e.0, e.1)))).unwrap();
        let vars: Vec<Edge> = g.non_edges();
        let plan = reconstruction_plan(&g, &vars).unwrap();
        assert!(plan.checks.contains(&(6, 7)));
        let solution: Vec<(Edge, f64)> = vars
            .iter()
            .map(|&e| {
                let mut d = dist(e.0, e.1).powi(2);
                if e == (6, 7) {
                    d *= 1.5; // break the final consistency check
                }
                (e, d)
            })
            .collect();
        assert!(matches!(
            reconstruct_with_plan(&g, &plan, &lengths, &solution),
            Err(RealizeError::Infeasible(_))
        ));
    }

    #[test]
    fn cayley_menger_report() {
        let right = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let r = verify_cayley_menger(&right);
        assert_eq!(r.rank, 4);
        assert!(r.sign_ok && r.vanish_ok && r.pass());

        let collinear = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        let r = verify_cayley_menger(&collinear);
        assert!(r.rank < 4 && !r.rank_ok);
        assert!(r.sign_ok, "D(1,2,3) = 0 satisfies the sign condition");

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<(f64, f64)> = (0..7)
            .map(|_| (rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0))
            .collect();
        let r = verify_cayley_menger(&pts);
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn svg_is_deterministic_and_mirrors() {
        let (g, plan) = triangle_plan();
        let lengths =
            DistanceAssignment::new([((1, 2), 1.0), ((1, 3), 1.0), ((2, 3), 1.0)]).unwrap();
        let e = reconstruct_with_plan(&g, &plan, &lengths, &[]).unwrap();
        let m = e.mirrored();
        for a in 1..=3u8 {
            for b in (a + 1)..=3 {
                assert_eq!(e.measure(a, b).to_bits(), m.measure(a, b).to_bits());
            }
        }

        let opts = SvgOptions {
            manifest: Some("run: test".into()),
            ..SvgOptions::default()
        };
        let one = export_svg(&g, std::slice::from_ref(&e), &opts);
        let two = export_svg(&g, std::slice::from_ref(&e), &opts);
        assert_eq!(one, two);
        assert_eq!(one.matches("class=\"cell\"").count(), 1);
        assert!(one.contains("<!-- run: test -->"));

        let mirrored = export_svg(
            &g,
            &[e.clone(), e.clone()],
            &SvgOptions {
                mirror: true,
                ..SvgOptions::default()
            },
        );
        assert_eq!(mirrored.matches("class=\"cell\"").count(), 4);
    }
}
