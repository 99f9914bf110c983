//! Polynomials in barycentric coordinates.
//!
//! A [`BarycentricPoly`] on an `n`-simplex is a sparse map from multi-indices
//! `(a_0, ..., a_n)` to coefficients of `lambda_0^a_0 ... lambda_n^a_n`.
//! Integrals of monomials have the closed form
//! `|K| n! a_0! ... a_n! / (|a| + n)!`, which is used for every inner product
//! in the crate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::combinat::{compositions, factorial_f64};
use crate::error::{FemError, Result};
use crate::geometry::Simplex;

/// Expanded products with more terms than this are refused.
pub const TERM_LIMIT: usize = 4_000_000;

/// Exponent vector over the barycentric variables, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut a = vec![0; len];
        a[i] = 1;
        Self(a)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `prod a_i!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial_f64(a)).product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Homogeneous multi-indices of length `nvars` and degree `degree`, in
/// graded-lex order.
pub fn homogeneous_indices(nvars: usize, degree: usize) -> Vec<MultiIndex> {
    compositions(nvars, degree).into_iter().map(MultiIndex).collect()
}

/// Mean value over an `dim`-simplex of the barycentric monomial `alpha`:
/// `dim! alpha! / (|alpha| + dim)!`.
pub fn monomial_mean(alpha: &MultiIndex) -> f64 {
    let dim = alpha.len() as u32 - 1;
    let d = alpha.degree();
    // dim! / (d + dim)! computed as a running quotient to stay in range
    let mut ratio = 1.0;
    for i in (dim + 1)..=(d + dim) {
        ratio /= i as f64;
    }
    ratio * alpha.factorial()
}

/// Exact integral of a barycentric monomial over `s`.
pub fn integrate_monomial(s: &Simplex, alpha: &MultiIndex) -> f64 {
    s.measure() * monomial_mean(alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricPoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl BarycentricPoly {
    /// Zero polynomial on an `n`-simplex (`n + 1` barycentric variables).
    pub fn zero(n: usize) -> Self {
        Self { nvars: n + 1, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::monomial(MultiIndex::zero(n + 1), c)
    }

    /// `lambda_i` on an `n`-simplex.
    pub fn lambda(n: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(n + 1, i), 1.0)
    }

    pub fn monomial(alpha: MultiIndex, c: f64) -> Self {
        let nvars = alpha.len();
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(alpha, c);
        }
        Self { nvars, terms }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Self {
        let mut p = Self::zero(n);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    /// Cartesian coordinate `x_r` as a linear polynomial on `s`.
    pub fn coordinate(s: &Simplex, r: usize) -> Self {
        let n = s.dim();
        Self::from_terms(n, (0..=n).map(|i| (MultiIndex::unit(n + 1, i), s.vertex(i)[r])))
    }

    /// Ambient simplex dimension.
    pub fn dim(&self) -> usize {
        self.nvars - 1
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: f64) {
        debug_assert_eq!(alpha.len(), self.nvars);
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Self) {
        if c == 0.0 {
            return;
        }
        for (a, v) in &other.terms {
            self.add_term(a.clone(), c * v);
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self { nvars: self.nvars, terms: BTreeMap::new() };
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn eval_barycentric(&self, lambda: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c * a.0.iter().zip(lambda).map(|(&e, l)| l.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn eval(&self, s: &Simplex, x: &[f64]) -> f64 {
        self.eval_barycentric(&s.barycentric(x))
    }

    /// Derivative with respect to `lambda_i`, treating the variables as independent.
    pub fn partial_lambda(&self, i: usize) -> Self {
        let mut out = Self { nvars: self.nvars, terms: BTreeMap::new() };
        for (a, &c) in &self.terms {
            if a.0[i] > 0 {
                let mut b = a.clone();
                b.0[i] -= 1;
                out.add_term(b, c * a.0[i] as f64);
            }
        }
        out
    }

    /// Cartesian gradient on `s` by the chain rule through `grad lambda_i`.
    pub fn gradient(&self, s: &Simplex) -> Vec<Self> {
        let n = s.dim();
        let partials: Vec<Self> = (0..=n).map(|i| self.partial_lambda(i)).collect();
        (0..n)
            .map(|r| {
                let mut g = Self::zero(n);
                for (i, p) in partials.iter().enumerate() {
                    g.axpy(s.grad_lambda()[i][r], p);
                }
                g
            })
            .collect()
    }

    /// Sets `lambda_i = 0` for every `i` not in `sub` and re-indexes the
    /// remaining variables to the subsimplex's own barycentric coordinates,
    /// in the order given by `sub`.
    pub fn restrict(&self, sub: &[usize]) -> Self {
        let mut out = Self { nvars: sub.len(), terms: BTreeMap::new() };
        'terms: for (a, &c) in &self.terms {
            let total: u32 = sub.iter().map(|&i| a.0[i]).sum();
            if total != a.degree() {
                continue 'terms;
            }
            out.add_term(MultiIndex(sub.iter().map(|&i| a.0[i]).collect()), c);
        }
        out
    }

    /// Rewrites every term of degree `e < degree` as `term * (sum lambda)^(degree - e)`.
    pub fn homogenize(&self, degree: u32) -> Self {
        let n = self.dim();
        let mut out = Self::zero(n);
        let mut sum_pows = vec![Self::constant(n, 1.0)];
        let sum = Self::from_terms(n, (0..=n).map(|i| (MultiIndex::unit(n + 1, i), 1.0)));
        for (a, &c) in &self.terms {
            let e = a.degree();
            assert!(e <= degree, "cannot homogenize degree {e} term to degree {degree}");
            let gap = (degree - e) as usize;
            while sum_pows.len() <= gap {
                let next = sum_pows.last().unwrap() * &sum;
                sum_pows.push(next);
            }
            out.axpy(c, &(&Self::monomial(a.clone(), 1.0) * &sum_pows[gap]));
        }
        out
    }

    /// Mean value over the simplex the polynomial lives on.
    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|(a, c)| c * monomial_mean(a)).sum()
    }

    pub fn integrate(&self, s: &Simplex) -> f64 {
        s.measure() * self.mean()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.dim(), 1.0);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// Exact integral of `p * q` without forming the product.
pub fn integrate_pair(s: &Simplex, p: &BarycentricPoly, q: &BarycentricPoly) -> f64 {
    let mut acc = 0.0;
    for (a, ca) in p.terms() {
        for (b, cb) in q.terms() {
            acc += ca * cb * monomial_mean(&a.add(b));
        }
    }
    s.measure() * acc
}

/// Exact integral of a product of polynomials over `s`.
pub fn integrate_product(s: &Simplex, ps: &[BarycentricPoly]) -> Result<f64> {
    let n = s.dim();
    let mut acc = BarycentricPoly::constant(n, 1.0);
    for p in ps {
        let terms = acc.num_terms().saturating_mul(p.num_terms());
        if terms > TERM_LIMIT {
            return Err(FemError::TermBlowup { terms, limit: TERM_LIMIT });
        }
        acc = &acc * p;
    }
    Ok(acc.integrate(s))
}

impl Add for &BarycentricPoly {
    type Output = BarycentricPoly;
    fn add(self, rhs: &BarycentricPoly) -> BarycentricPoly {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &BarycentricPoly {
    type Output = BarycentricPoly;
    fn sub(self, rhs: &BarycentricPoly) -> BarycentricPoly {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &BarycentricPoly {
    type Output = BarycentricPoly;
    fn neg(self) -> BarycentricPoly {
        self.scale(-1.0)
    }
}

impl Mul for &BarycentricPoly {
    type Output = BarycentricPoly;
    fn mul(self, rhs: &BarycentricPoly) -> BarycentricPoly {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = BarycentricPoly { nvars: self.nvars, terms: BTreeMap::new() };
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }
}

/// Largest degree accepted by [`gm_quadrature`].
pub const GM_MAX_DEGREE: usize = 25;

/// Grundmann–Möller rule on the `n`-simplex exact for polynomials of total
/// degree `degree`. Points are barycentric; weights sum to one.
pub fn gm_quadrature(n: usize, degree: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if degree > GM_MAX_DEGREE {
        return Err(FemError::Degree { degree, max: GM_MAX_DEGREE });
    }
    let s = degree.saturating_sub(1).div_ceil(2);
    let d = 2 * s + 1;
    let nf = factorial_f64(n as u32);
    let mut rule = Vec::new();
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        // n! (-1)^i 2^{-2s} (d + n - 2i)^d / (i! (d + n - i)!)
        let mut w = nf * (denom.powi(d as i32) / 4f64.powi(s as i32));
        w /= factorial_f64(i as u32);
        for j in 1..=(d + n - i) {
            w /= j as f64;
        }
        if i % 2 == 1 {
            w = -w;
        }
        for beta in compositions(n + 1, s - i) {
            let point = beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect();
            rule.push((point, w));
        }
    }
    Ok(rule)
}
