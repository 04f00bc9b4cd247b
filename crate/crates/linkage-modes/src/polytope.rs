//! Newton polytopes, exact polytope volumes, mixed volumes, and Bézout
//! bounds.
//!
//! Volumes come from an incremental beneath–beyond convex hull with exact
//! integer arithmetic. The hull keeps only its boundary facets; each facet
//! caches its supporting hyperplane as the affine form
//! `A(x) = det(v₁ − x, …, v_d − x)` (computed once, by cofactors), so testing
//! a point against a facet is a dot product rather than a determinant.
//! Inserting a point adds the cone volumes `|A(q)|/d!` over the strictly
//! visible facets and replaces them with facets over the horizon ridges.
//! Coplanar points are never "seen" (strict visibility), which keeps every
//! facet non-degenerate with no lifting or joggling. Mixed volumes then
//! follow from inclusion-exclusion over Minkowski-sum volumes, sharing
//! pruned vertex sets between subsets.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("expected {expected} polytopes in dimension {expected}, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("polytope dimension {got} does not match ambient dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("mixed volumes are implemented for dimension ≤ {0}")]
    DimensionTooLarge(usize),
}

/// Highest ambient dimension the exact hull machinery accepts. The systems
/// here live in ≤ 5 variables; the cap keeps determinant sizes honest.
pub const MAX_DIM: usize = 6;

/// The convex hull of a polynomial's support (exponent vectors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolytope {
    dim: usize,
    points: Vec<Vec<i64>>,
    vertices: Vec<Vec<i64>>,
}

impl NewtonPolytope {
    /// Builds a polytope from lattice points (deduplicated and sorted).
    pub fn from_support(dim: usize, points: impl IntoIterator<Item = Vec<i64>>) -> Self {
        let points: Vec<Vec<i64>> = points
            .into_iter()
            .inspect(|p| assert_eq!(p.len(), dim, "point arity mismatch"))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert!(!points.is_empty(), "a polytope needs at least one point");
        let vertices = extreme_points(&points);
        NewtonPolytope {
            dim,
            points,
            vertices,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The full support, sorted.
    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// The extreme points, sorted.
    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Exact Euclidean volume (0 when lower-dimensional).
    pub fn volume(&self) -> BigRational {
        volume_of_points(&self.vertices, self.dim)
    }
}

/// Newton polytope of a polynomial over all of its variables.
pub fn newton_polytope(p: &Polynomial) -> Result<NewtonPolytope, PolytopeError> {
    if p.is_zero() {
        return Err(PolytopeError::ZeroPolynomial);
    }
    let dim = p.vars().len();
    let all: Vec<usize> = (0..dim).collect();
    Ok(NewtonPolytope::from_support(dim, p.support_in(&all)))
}

/// Exact Euclidean volume of a polytope given by lattice points.
pub fn polytope_volume(p: &NewtonPolytope, dim: usize) -> Result<BigRational, PolytopeError> {
    if p.dim() != dim {
        return Err(PolytopeError::DimensionMismatch {
            expected: dim,
            got: p.dim(),
        });
    }
    Ok(p.volume())
}

/// Normalized (lattice) mixed volume of `n` polytopes in dimension `n`,
/// by inclusion-exclusion over Minkowski-sum volumes:
/// `MV = Σ_{∅≠S⊆[n]} (−1)^{n−|S|} Vol(Σ_{i∈S} P_i)`.
///
/// The result is a non-negative integer for lattice polytopes; it bounds the
/// number of isolated solutions in the torus of any polynomial system with
/// these Newton polytopes, and equals `n!·Vol(P)` when all polytopes
/// coincide.
pub fn mixed_volume(polytopes: &[NewtonPolytope]) -> Result<u64, PolytopeError> {
    let n = polytopes.len();
    if n == 0 || n > MAX_DIM {
        return Err(PolytopeError::DimensionTooLarge(MAX_DIM));
    }
    for p in polytopes {
        if p.dim() != n {
            return Err(PolytopeError::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
    }
    let supports: Vec<&[Vec<i64>]> = polytopes.iter().map(|p| p.vertices()).collect();
    let mv = mixed_volume_of_supports(&supports, n);
    let (num, den) = (mv.numer(), mv.denom());
    assert!(den.is_one() && !num.is_negative(), "lattice MV must be a non-negative integer");
    Ok(num.to_u64().expect("desk-scale mixed volume"))
}

/// Inclusion-exclusion core, shared with the system-enumeration fast path.
///
/// Subset sums are built incrementally: the point set for `S` is the pruned
/// vertex set of `S` minus its lowest member, Minkowski-added to that
/// member's own vertex set, so intermediate sizes track vertex counts rather
/// than support products and each subset costs one hull build.
pub(crate) fn mixed_volume_of_supports(supports: &[&[Vec<i64>]], n: usize) -> BigRational {
    let full = (1usize << n) - 1;
    let mut pruned: Vec<Vec<Vec<i64>>> = vec![Vec::new(); full + 1];
    let mut acc = BigRational::zero();
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let points: Vec<Vec<i64>> = if rest == 0 {
            supports[low]
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        } else {
            let mut sum: BTreeSet<Vec<i64>> = BTreeSet::new();
            for a in &pruned[rest] {
                for b in &pruned[1 << low] {
                    sum.insert(a.iter().zip(b).map(|(x, y)| x + y).collect());
                }
            }
            sum.into_iter().collect()
        };
        let (vol, vertices) = hull_volume_and_vertices(points, n);
        if (n - mask.count_ones() as usize).is_multiple_of(2) {
            acc += vol;
        } else {
            acc -= vol;
        }
        if mask != full {
            pruned[mask] = vertices;
        }
    }
    acc
}

/// Bézout bound: the product of the polynomials' total degrees.
pub fn bezout_bound(system: &[Polynomial]) -> u64 {
    system
        .iter()
        .map(|p| p.total_degree() as u64)
        .product()
}

// ---------------------------------------------------------------------------
// Exact hull machinery.

/// Determinant of a small integer matrix; exact. Fraction-free Bareiss
/// elimination in `i128`, with a recursive `BigInt` fallback on overflow.
fn det_exact(m: &[Vec<i64>]) -> BigInt {
    fn det_bareiss(m: &mut [Vec<i128>]) -> Option<i128> {
        let n = m.len();
        if n == 0 {
            return Some(1);
        }
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                let Some(r) = ((k + 1)..n).find(|&r| m[r][k] != 0) else {
                    return Some(0);
                };
                m.swap(k, r);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    // Exact division: Bareiss guarantees prev | numerator.
                    let num = m[i][j]
                        .checked_mul(m[k][k])?
                        .checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                    m[i][j] = num / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        Some(sign * m[n - 1][n - 1])
    }
    fn det_big(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = BigInt::zero();
        for col in 0..n {
            if m[0][col].is_zero() {
                continue;
            }
            let sub: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][col] * det_big(&sub);
            if col % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }
    let mut wide: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    match det_bareiss(&mut wide) {
        Some(d) => BigInt::from(d),
        None => det_big(
            &m.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        ),
    }
}

/// `det(facet[i] − x)`: `d!` times the signed volume of the simplex
/// `(facet, x)`; its sign orients `x` against the facet's hyperplane.
fn signed_det(pts: &[Vec<i64>], facet: &[usize], x: &[i64]) -> BigInt {
    let m: Vec<Vec<i64>> = facet
        .iter()
        .map(|&f| pts[f].iter().zip(x).map(|(a, b)| a - b).collect())
        .collect();
    det_exact(&m)
}

/// A facet's supporting hyperplane as the affine function
/// `A(x) = det(v₁ − x, …, v_d − x) = a0 + coef·x`, with an `i128` fast path
/// and a `BigInt` fallback chosen once at construction. The `Small` variant
/// carries `f64` mirrors of its coefficients so sign queries can usually be
/// answered by one rounded dot product under a certified error bound.
enum AffineForm {
    Small {
        a0: i128,
        coef: [i128; MAX_DIM],
        fa0: f64,
        fcoef: [f64; MAX_DIM],
    },
    Big {
        a0: BigInt,
        coef: Vec<BigInt>,
    },
}

/// Relative error bound for the rounded dot product in [`AffineForm::sign_at`].
/// The true rounding error is below `(d + 3)·ε ≈ 10⁻¹⁵` of the term-magnitude
/// sum; this keeps three orders of magnitude in hand.
const SIGN_REL_ERR: f64 = 1e-12;

impl AffineForm {
    /// Builds the form by cofactor expansion: subtracting the first vertex
    /// from the rest eliminates `x` from all but one row, so
    /// `A(x) = Σ_j (v₁ − x)_j · C_j` with constant cofactors `C_j` of the
    /// difference matrix.
    fn of(pts: &[Vec<i64>], vertices: &[usize]) -> AffineForm {
        let d = vertices.len();
        let v0 = &pts[vertices[0]];
        let diff: Vec<Vec<i64>> = vertices[1..]
            .iter()
            .map(|&v| pts[v].iter().zip(v0).map(|(a, b)| a - b).collect())
            .collect();
        debug_assert_eq!(v0.len(), d);
        let mut a0 = BigInt::zero();
        let mut coef: Vec<BigInt> = Vec::with_capacity(d);
        for (j, &v0j) in v0.iter().enumerate() {
            let minor: Vec<Vec<i64>> = diff
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let c = det_exact(&minor);
            let c = if j % 2 == 0 { c } else { -c };
            a0 += &c * BigInt::from(v0j);
            coef.push(-c);
        }
        let small_a0 = a0.to_i128();
        let small_coef: Option<Vec<i128>> = coef.iter().map(|c| c.to_i128()).collect();
        match (small_a0, small_coef) {
            (Some(a0), Some(c)) => {
                let mut coef = [0i128; MAX_DIM];
                let mut fcoef = [0f64; MAX_DIM];
                for (j, &v) in c.iter().enumerate() {
                    coef[j] = v;
                    fcoef[j] = v as f64;
                }
                AffineForm::Small {
                    a0,
                    coef,
                    fa0: a0 as f64,
                    fcoef,
                }
            }
            _ => AffineForm::Big { a0, coef },
        }
    }

    /// Exact value of `A(x)`.
    fn value_at(&self, x: &[i64]) -> BigInt {
        match self {
            AffineForm::Small { a0, coef, .. } => {
                let mut acc = BigInt::from(*a0);
                for (c, &xi) in coef.iter().zip(x) {
                    acc += BigInt::from(c * i128::from(xi));
                }
                acc
            }
            AffineForm::Big { a0, coef } => {
                let mut acc = a0.clone();
                for (c, &xi) in coef.iter().zip(x) {
                    acc += c * BigInt::from(xi);
                }
                acc
            }
        }
    }

    /// Sign of `A(x)`. A rounded `f64` dot product decides whenever its
    /// magnitude clears the certified error bound; otherwise the `i128` dot
    /// product when it provably cannot overflow, the exact value last.
    fn sign_at(&self, x: &[i64]) -> i8 {
        if let AffineForm::Small { a0, coef, fa0, fcoef } = self {
            let mut s = *fa0;
            let mut abs = fa0.abs();
            for (i, &xi) in x.iter().enumerate() {
                let t = fcoef[i] * xi as f64;
                s += t;
                abs += t.abs();
            }
            if s.abs() > SIGN_REL_ERR * abs {
                return if s > 0.0 { 1 } else { -1 };
            }
            let mut acc = *a0;
            let mut ok = true;
            for (c, &xi) in coef.iter().zip(x) {
                match c.checked_mul(i128::from(xi)).and_then(|t| acc.checked_add(t)) {
                    Some(v) => acc = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return match acc.cmp(&0) {
                    std::cmp::Ordering::Greater => 1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Less => -1,
                };
            }
        }
        let v = self.value_at(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// A boundary facet: `d` vertex indices, its hyperplane form, and the sign
/// the form takes on the hull side.
struct Facet {
    vertices: Vec<usize>,
    form: AffineForm,
    inward: i8,
}

impl Facet {
    /// `inward_ref` must be a hull point strictly off the facet's hyperplane.
    fn new(pts: &[Vec<i64>], mut vertices: Vec<usize>, inward_ref: usize) -> Facet {
        vertices.sort_unstable();
        let form = AffineForm::of(pts, &vertices);
        let inward = form.sign_at(&pts[inward_ref]);
        debug_assert!(inward != 0, "facets must be non-degenerate");
        Facet {
            vertices,
            form,
            inward,
        }
    }

    /// Strict visibility: `x` is beyond the facet's hyperplane.
    fn sees(&self, x: &[i64]) -> bool {
        let s = self.form.sign_at(x);
        s != 0 && s != self.inward
    }
}

/// Boundary facets plus the accumulated volume of everything behind them.
struct Hull {
    facets: Vec<Facet>,
    /// Σ |det| over inserted cones: the volume times `dim!`.
    volume_num: BigInt,
}

/// Builds the hull, or returns `None` when the points do not span the full
/// dimension.
fn build_hull(pts: &[Vec<i64>], dim: usize) -> Option<Hull> {
    assert!((1..=MAX_DIM).contains(&dim));
    // Greedy affinely independent seed simplex.
    let mut seed: Vec<usize> = vec![0];
    for i in 1..pts.len() {
        if seed.len() == dim + 1 {
            break;
        }
        let mut trial: Vec<Vec<i64>> = seed.iter().map(|&s| pts[s].clone()).collect();
        trial.push(pts[i].clone());
        if affine_rank(&trial) == seed.len() {
            seed.push(i);
        }
    }
    if seed.len() < dim + 1 {
        return None;
    }

    let facets = (0..=dim)
        .map(|omit| {
            let vs: Vec<usize> = seed
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != omit)
                .map(|(_, &v)| v)
                .collect();
            Facet::new(pts, vs, seed[omit])
        })
        .collect();
    let mut hull = Hull {
        facets,
        volume_num: signed_det(pts, &seed[1..], &pts[seed[0]]).abs(),
    };

    // Farthest-first insertion: points interior to the final hull then arrive
    // after the hull already contains them, are rejected outright, and never
    // enter the facet complex. (Order affects only cost, not the result.)
    let centroid: Vec<f64> = (0..dim)
        .map(|j| seed.iter().map(|&s| pts[s][j] as f64).sum::<f64>() / seed.len() as f64)
        .collect();
    let mut order: Vec<usize> = (0..pts.len()).filter(|q| !seed.contains(q)).collect();
    let dist2 = |q: usize| -> f64 {
        pts[q]
            .iter()
            .zip(&centroid)
            .map(|(&a, c)| (a as f64 - c) * (a as f64 - c))
            .sum()
    };
    order.sort_unstable_by(|&a, &b| dist2(b).total_cmp(&dist2(a)));
    for q in order {
        insert_point(pts, &mut hull, q);
    }
    Some(hull)
}

fn insert_point(pts: &[Vec<i64>], hull: &mut Hull, q: usize) {
    let x = &pts[q];
    let visible: Vec<usize> = hull
        .facets
        .iter()
        .enumerate()
        .filter(|(_, f)| f.sees(x))
        .map(|(i, _)| i)
        .collect();
    if visible.is_empty() {
        return; // q is inside or on the hull.
    }

    // The cones from q over the visible facets tile conv(hull ∪ {q}) \ hull.
    for &i in &visible {
        hull.volume_num += hull.facets[i].form.value_at(x).abs();
    }

    // Horizon ridges: (d−1)-faces of exactly one visible facet. Each spawns
    // a facet (ridge ∪ {q}); the vertex its owner dropped is a hull point
    // strictly off the new hyperplane, fixing the inward sign.
    let mut ridges: HashMap<Vec<usize>, (u8, usize)> = HashMap::new();
    for &i in &visible {
        let vs = &hull.facets[i].vertices;
        for drop in 0..vs.len() {
            let ridge: Vec<usize> = vs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != drop)
                .map(|(_, &v)| v)
                .collect();
            ridges
                .entry(ridge)
                .and_modify(|e| e.0 += 1)
                .or_insert((1, vs[drop]));
        }
    }
    let new_facets: Vec<Facet> = ridges
        .into_iter()
        .filter(|&(_, (count, _))| {
            debug_assert!(count <= 2, "boundary complex must be a pseudo-manifold");
            count == 1
        })
        .map(|(mut ridge, (_, dropped))| {
            ridge.push(q);
            Facet::new(pts, ridge, dropped)
        })
        .collect();

    for &i in visible.iter().rev() {
        hull.facets.swap_remove(i);
    }
    hull.facets.extend(new_facets);
}

/// Exact Euclidean volume of `conv(points)` in `R^dim` (0 if lower-dim).
fn volume_of_points(points: &[Vec<i64>], dim: usize) -> BigRational {
    let dedup: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    match build_hull(&dedup, dim) {
        None => BigRational::zero(),
        Some(h) => {
            let fact: BigInt = (1..=dim as u64).product::<u64>().into();
            BigRational::new(h.volume_num, fact)
        }
    }
}

/// Volume and the exact vertex set of `conv(points)`, from one hull build.
/// The volume is 0 for lower-dimensional sets, whose vertices come from a
/// hull in their own affine hull. Keeping the stored sets minimal matters:
/// every non-vertex kept here multiplies the size of the next Minkowski sum.
fn hull_volume_and_vertices(points: Vec<Vec<i64>>, dim: usize) -> (BigRational, Vec<Vec<i64>>) {
    let pts: Vec<Vec<i64>> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(h) = build_hull(&pts, dim) {
        let fact: BigInt = (1..=dim as u64).product::<u64>().into();
        let vertices = filter_vertices(&h, dim)
            .into_iter()
            .map(|i| pts[i].clone())
            .collect();
        return (BigRational::new(h.volume_num, fact), vertices);
    }
    (BigRational::zero(), lower_dim_vertices(pts))
}

/// Vertices of a set that does not span its ambient space, via a hull in
/// affine coordinates. Falls back to the full set when the reduced
/// coordinates would overflow (pruning is an optimization, never required).
fn lower_dim_vertices(pts: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let rank = affine_rank(&pts);
    if rank == 0 {
        return pts; // a single (deduplicated) point
    }
    if let Some(reduced) = affine_coordinates(&pts, rank) {
        if let Some(h) = build_hull(&reduced, rank) {
            return filter_vertices(&h, rank)
                .into_iter()
                .map(|i| pts[i].clone())
                .collect();
        }
    }
    pts
}

/// Linear rank of rational row vectors, by Gaussian elimination.
fn linear_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot_row[col];
            for (rc, pc) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *rc -= &f * pc;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Affine rank of a point set: the linear rank of differences to the first
/// point (0 for a single point, `dim` for full-dimensional sets).
fn affine_rank(points: &[Vec<i64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let origin = &points[0];
    let rows: Vec<Vec<BigRational>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(origin)
                .map(|(a, b)| BigRational::from_integer(BigInt::from(a - b)))
                .collect()
        })
        .collect();
    linear_rank(rows)
}

/// Integer coordinates of the points inside their own affine hull, for
/// hull-building on lower-dimensional sets. Metric distortion is irrelevant
/// for identifying vertices. Returns `None` when the scaled coordinates
/// would not fit `i64` (callers then skip pruning).
fn affine_coordinates(points: &[Vec<i64>], rank: usize) -> Option<Vec<Vec<i64>>> {
    let dim = points[0].len();
    let origin = &points[0];
    // Basis: affinely independent difference vectors.
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    let mut chosen: Vec<Vec<i64>> = vec![origin.clone()];
    for p in &points[1..] {
        if basis.len() == rank {
            break;
        }
        chosen.push(p.clone());
        if affine_rank(&chosen) == basis.len() + 1 {
            basis.push(
                p.iter()
                    .zip(origin)
                    .map(|(a, b)| BigRational::from_integer(BigInt::from(a - b)))
                    .collect(),
            );
        } else {
            chosen.pop();
        }
    }
    // Solve basisᵀ·λ = (p − origin) for each point by elimination on the
    // (dim × rank | rhs) system; consistency is guaranteed by the rank.
    let mut coords: Vec<Vec<BigRational>> = Vec::with_capacity(points.len());
    for p in points {
        let mut aug: Vec<Vec<BigRational>> = (0..dim)
            .map(|row| {
                let mut r: Vec<BigRational> = basis.iter().map(|b| b[row].clone()).collect();
                r.push(BigRational::from_integer(BigInt::from(p[row] - origin[row])));
                r
            })
            .collect();
        // Forward elimination with partial pivoting by first nonzero.
        let mut pivot_rows = Vec::new();
        let mut row = 0;
        for col in 0..rank {
            let Some(pr) = (row..dim).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(row, pr);
            let (top, rest) = aug.split_at_mut(row + 1);
            let pivot_row = &top[row];
            for other in rest.iter_mut() {
                if other[col].is_zero() {
                    continue;
                }
                let f = &other[col] / &pivot_row[col];
                for (rc, pc) in other[col..=rank].iter_mut().zip(&pivot_row[col..=rank]) {
                    *rc -= &f * pc;
                }
            }
            pivot_rows.push((row, col));
            row += 1;
        }
        let mut lambda = vec![BigRational::zero(); rank];
        for &(r, c) in pivot_rows.iter().rev() {
            let mut rhs = aug[r][rank].clone();
            for c2 in (c + 1)..rank {
                rhs -= &aug[r][c2] * &lambda[c2];
            }
            lambda[c] = rhs / &aug[r][c];
        }
        coords.push(lambda);
    }
    // Clear denominators globally so the reduced points are lattice points.
    let mut lcm = BigInt::one();
    for c in coords.iter().flatten() {
        lcm = num_integer::lcm(lcm, c.denom().clone());
    }
    let scaled: Option<Vec<Vec<i64>>> = coords
        .iter()
        .map(|c| {
            c.iter()
                .map(|x| (x * BigRational::from_integer(lcm.clone())).numer().to_i64())
                .collect()
        })
        .collect();
    scaled
}

/// Exact extreme points of a (deduplicated, sorted) point set.
///
/// A boundary point is a vertex iff the normals of its active facets — those
/// whose hyperplane contains it — span the full space; boundary points in
/// the relative interior of a face fail the rank test. Facet-vertex indices
/// are ascending and the input is sorted, so the result is sorted too.
fn extreme_points(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    let dim = points[0].len();
    if let Some(h) = build_hull(points, dim) {
        return filter_vertices(&h, dim)
            .into_iter()
            .map(|i| points[i].clone())
            .collect();
    }
    // Lower-dimensional: recurse inside the affine hull.
    let rank = affine_rank(points);
    if rank == 0 {
        return vec![points[0].clone()];
    }
    if let Some(reduced) = affine_coordinates(points, rank) {
        if let Some(h) = build_hull(&reduced, rank) {
            return filter_vertices(&h, rank)
                .into_iter()
                .map(|i| points[i].clone())
                .collect();
        }
    }
    points.to_vec() // cannot reduce exactly: conservative superset
}

/// Indices of the true extreme points among a hull's facet vertices.
fn filter_vertices(hull: &Hull, dim: usize) -> Vec<usize> {
    // Facets listing each point. A listed point is extreme iff those facets'
    // normals span the full space: if they span, the point is the unique
    // 0-face cut out by its own supporting hyperplanes; conversely an extreme
    // point is a corner of every triangulation simplex of every genuine facet
    // through it (it cannot sit inside a simplex face spanned by other hull
    // points), so its listed facets realize its full-dimensional normal cone.
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (fi, f) in hull.facets.iter().enumerate() {
        for &v in &f.vertices {
            incident.entry(v).or_default().push(fi);
        }
    }
    let mut out: Vec<usize> = incident
        .into_iter()
        .filter(|(_, facets)| {
            normals_span(
                facets.iter().map(|&fi| match &hull.facets[fi].form {
                    AffineForm::Small { coef, .. } => {
                        coef[..dim].iter().map(|&c| BigInt::from(c)).collect()
                    }
                    AffineForm::Big { coef, .. } => coef.clone(),
                }),
                dim,
            )
        })
        .map(|(v, _)| v)
        .collect();
    out.sort_unstable();
    out
}

/// Whether integer rows reach full rank `dim`, by fraction-free echelon
/// reduction with gcd normalization and early exit. Each accepted row has
/// zeros at all earlier pivot columns, so reducing a candidate against the
/// echelon in insertion order cannot disturb already-cleared pivots.
fn normals_span(rows: impl Iterator<Item = Vec<BigInt>>, dim: usize) -> bool {
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for mut r in rows {
        for (p, e) in &echelon {
            if r[*p].is_zero() {
                continue;
            }
            let (a, b) = (e[*p].clone(), r[*p].clone());
            for (rj, ej) in r.iter_mut().zip(e) {
                *rj = &*rj * &a - ej * &b;
            }
        }
        let mut g = BigInt::zero();
        for x in &r {
            g = num_integer::gcd(g, x.clone());
        }
        if g.is_zero() {
            continue; // dependent row
        }
        if !g.is_one() {
            for x in &mut r {
                *x = &*x / &g;
            }
        }
        let p = r.iter().position(|x| !x.is_zero()).expect("nonzero row");
        echelon.push((p, r));
        if echelon.len() == dim {
            return true;
        }
    }
    false
}
