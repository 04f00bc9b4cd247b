//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Every polynomial owns an ordered list of variable names; terms map
//! exponent vectors (one entry per variable) to nonzero `BigRational`
//! coefficients. Exactness matters: minor expansions feed the mixed-volume
//! computation, which needs bit-exact supports, so floating conversion is
//! deferred to the solver.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A sparse polynomial over named variables with `BigRational` coefficients.
///
/// Invariants: no zero coefficient is ever stored, and every exponent vector
/// has exactly one entry per variable.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u16>, BigRational>,
}

impl Polynomial {
    /// The zero polynomial over the given variables.
    pub fn zero(vars: Vec<String>) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(vars: Vec<String>, value: BigRational) -> Self {
        let mut p = Polynomial::zero(vars);
        if !value.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], value);
        }
        p
    }

    /// The monomial `1 * vars[index]`.
    pub fn variable(vars: Vec<String>, index: usize) -> Self {
        assert!(index < vars.len(), "variable index out of range");
        let mut exps = vec![0u16; vars.len()];
        exps[index] = 1;
        let mut p = Polynomial::zero(vars);
        p.terms.insert(exps, BigRational::one());
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(
        vars: Vec<String>,
        terms: impl IntoIterator<Item = (Vec<u16>, BigRational)>,
    ) -> Self {
        let mut p = Polynomial::zero(vars);
        for (exps, coeff) in terms {
            p.add_term(exps, coeff);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of a variable by name, if present.
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn add_term(&mut self, exps: Vec<u16>, coeff: BigRational) {
        assert_eq!(exps.len(), self.vars.len(), "exponent arity mismatch");
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Total degree: the maximum exponent sum over all terms (0 for the zero
    /// polynomial and for constants).
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Total degree restricted to a subset of variables (by index).
    pub fn degree_in(&self, indices: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|e| indices.iter().map(|&i| e[i] as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Partial derivative with respect to `vars[index]`.
    pub fn partial(&self, index: usize) -> Polynomial {
        assert!(index < self.vars.len(), "variable index out of range");
        let mut out = Polynomial::zero(self.vars.clone());
        for (exps, coeff) in &self.terms {
            let e = exps[index];
            if e == 0 {
                continue;
            }
            let mut d = exps.clone();
            d[index] = e - 1;
            out.add_term(d, coeff * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Substitutes exact values for a subset of variables, returning a
    /// polynomial over the remaining ones (in their original order).
    pub fn eval_partial(&self, values: &BTreeMap<usize, BigRational>) -> Polynomial {
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|i| !values.contains_key(i))
            .collect();
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut out = Polynomial::zero(vars);
        for (exps, coeff) in &self.terms {
            let mut c = coeff.clone();
            for (&i, v) in values {
                for _ in 0..exps[i] {
                    c *= v;
                }
            }
            let reduced: Vec<u16> = keep.iter().map(|&i| exps[i]).collect();
            out.add_term(reduced, c);
        }
        out
    }

    /// Evaluates at an exact rational point (one value per variable).
    pub fn eval_q(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars.len(), "point arity mismatch");
        let mut acc = BigRational::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// The distinct exponent vectors projected onto a variable subset.
    ///
    /// This is the support of the polynomial viewed generically in the chosen
    /// variables: the remaining variables are treated as parameters, and a
    /// projected monomial survives for generic parameter values because the
    /// parameter coefficients cannot vanish identically.
    pub fn support_in(&self, indices: &[usize]) -> BTreeSet<Vec<i64>> {
        self.terms
            .keys()
            .map(|e| indices.iter().map(|&i| e[i] as i64).collect())
            .collect()
    }

    /// Re-expresses the polynomial over a larger (or reordered) variable list.
    ///
    /// Every current variable must appear in `vars`; new variables get
    /// exponent 0. This lets polynomials built over minimal variable sets be
    /// combined into one system with a shared ordering.
    pub fn embed(&self, vars: Vec<String>) -> Polynomial {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .unwrap_or_else(|| panic!("variable {v} missing from embedding target"))
            })
            .collect();
        let mut out = Polynomial::zero(vars);
        for (exps, coeff) in &self.terms {
            let mut e = vec![0u16; out.vars.len()];
            for (i, &x) in exps.iter().enumerate() {
                e[map[i]] = x;
            }
            out.add_term(e, coeff.clone());
        }
        out
    }

    /// Largest coefficient magnitude, used for residual scaling.
    pub fn max_coeff_abs(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    fn assert_same_vars(&self, other: &Polynomial) {
        assert_eq!(
            self.vars, other.vars,
            "polynomial arithmetic requires identical variable lists"
        );
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (exps, coeff) in &rhs.terms {
            out.add_term(exps.clone(), coeff.clone());
        }
        out
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (exps, coeff) in &rhs.terms {
            out.add_term(exps.clone(), -coeff.clone());
        }
        out
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    // Exponent vectors add under monomial multiplication.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_vars(rhs);
        let mut out = Polynomial::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = -coeff.clone();
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest-degree terms first reads closer to hand-written algebra.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.cmp(a.0));
        for (k, (exps, coeff)) in terms.iter().enumerate() {
            let neg = coeff.is_negative();
            let mag = coeff.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = exps.iter().all(|&e| e == 0);
            if !mag.is_one() || is_const {
                write!(f, "{mag}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.vars[i])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

// Debug forwards to Display; the raw term map is unreadable.
impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn arithmetic_and_degree() {
        let x = Polynomial::variable(xy(), 0);
        let y = Polynomial::variable(xy(), 1);
        let one = Polynomial::constant(xy(), q(1));
        // (x + y)^2 = x^2 + 2xy + y^2
        let s = &x + &y;
        let sq = &s * &s;
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.total_degree(), 2);
        assert_eq!(sq.degree_in(&[0]), 2);
        let back = &(&sq - &(&x * &x)) - &(&y * &y);
        assert_eq!(back, {
            
            &(&x * &y) + &(&x * &y)
        });
        assert_eq!((&s - &s).num_terms(), 0);
        assert!((&one - &one).is_zero());
    }

    #[test]
    fn partial_derivative() {
        let x = Polynomial::variable(xy(), 0);
        let y = Polynomial::variable(xy(), 1);
        // d/dx (x^2 y + 3x) = 2xy + 3
        let p = &(&(&x * &x) * &y) + &(&x + &(&x + &x));
        let d = p.partial(0);
        let expect = &(&(&x * &y) + &(&x * &y)) + &Polynomial::constant(xy(), q(3));
        assert_eq!(d, expect);
    }

    #[test]
    fn substitution_commutes_with_evaluation() {
        let x = Polynomial::variable(xy(), 0);
        let y = Polynomial::variable(xy(), 1);
        let p = &(&(&x * &x) * &y) - &(&y + &Polynomial::constant(xy(), q(7)));
        let point = [q(3), q(5)];
        let direct = p.eval_q(&point);
        let substituted = p.eval_partial(&BTreeMap::from([(0usize, q(3))]));
        assert_eq!(substituted.vars(), &["y".to_string()]);
        assert_eq!(substituted.eval_q(&[q(5)]), direct);
    }

    #[test]
    fn support_projection() {
        let x = Polynomial::variable(xy(), 0);
        let y = Polynomial::variable(xy(), 1);
        // x^2 y + x y + y: projecting onto x keeps {0,1,2}.
        let p = &(&(&(&x * &x) * &y) + &(&x * &y)) + &y;
        let sup = p.support_in(&[0]);
        let got: Vec<i64> = sup.iter().map(|v| v[0]).collect();
        assert_eq!(got, vec![0, 1, 2]);
    }

    #[test]
    fn display_reads_naturally() {
        let x = Polynomial::variable(xy(), 0);
        let y = Polynomial::variable(xy(), 1);
        let p = &(&(&x * &x) - &(&y * &y)) + &Polynomial::constant(xy(), q(-1));
        assert_eq!(p.to_string(), "x^2 - y^2 - 1");
        assert_eq!(Polynomial::zero(xy()).to_string(), "0");
    }
}
