//! Vector- and symmetric-tensor-valued polynomial fields, and polynomials in
//! Cartesian coordinates used for manufactured data.

use std::collections::BTreeMap;

use crate::geometry::Simplex;
use crate::polynomial::{integrate_pair, BarycentricPoly, MultiIndex};
use crate::symtensor::{packed_len, packed_pairs, packed_weight, SymTensor};

/// Vector field with one barycentric polynomial per Cartesian component.
pub type VectorPoly = Vec<BarycentricPoly>;

/// Symmetric tensor field stored as packed components.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPoly {
    n: usize,
    comps: Vec<BarycentricPoly>,
}

impl TensorPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, comps: vec![BarycentricPoly::zero(n); packed_len(n)] }
    }

    pub fn from_components(n: usize, comps: Vec<BarycentricPoly>) -> Self {
        assert_eq!(comps.len(), packed_len(n));
        Self { n, comps }
    }

    /// `p * tensor`
    pub fn scalar_times(p: &BarycentricPoly, tensor: &SymTensor) -> Self {
        let n = tensor.dim();
        Self { n, comps: tensor.packed().iter().map(|&c| p.scale(c)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[BarycentricPoly] {
        &self.comps
    }

    pub fn component(&self, i: usize, j: usize) -> &BarycentricPoly {
        &self.comps[crate::symtensor::packed_index(self.n, i, j)]
    }

    pub fn degree(&self) -> u32 {
        self.comps.iter().map(BarycentricPoly::degree).max().unwrap_or(0)
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(c, b);
        }
    }

    pub fn eval_barycentric(&self, lambda: &[f64]) -> SymTensor {
        SymTensor::from_packed(self.n, self.comps.iter().map(|p| p.eval_barycentric(lambda)).collect())
    }

    pub fn eval(&self, s: &Simplex, x: &[f64]) -> SymTensor {
        self.eval_barycentric(&s.barycentric(x))
    }

    /// Scalar field `a^T tau b`.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> BarycentricPoly {
        let mut out = BarycentricPoly::zero(self.n);
        for ((p, q), comp) in packed_pairs(self.n).into_iter().zip(&self.comps) {
            let w = if p == q { a[p] * b[p] } else { a[p] * b[q] + a[q] * b[p] };
            out.axpy(w, comp);
        }
        out
    }

    /// Row-wise divergence `(div tau)_i = sum_j d_j tau_ij`.
    pub fn divergence(&self, s: &Simplex) -> VectorPoly {
        let n = self.n;
        let mut out = vec![BarycentricPoly::zero(n); n];
        for ((p, q), comp) in packed_pairs(n).into_iter().zip(&self.comps) {
            if comp.is_zero() {
                continue;
            }
            let g = comp.gradient(s);
            out[p].axpy(1.0, &g[q]);
            if p != q {
                out[q].axpy(1.0, &g[p]);
            }
        }
        out
    }

    /// `int_K tau : rho`
    pub fn inner(&self, other: &Self, s: &Simplex) -> f64 {
        (0..self.comps.len())
            .map(|slot| packed_weight(self.n, slot) * integrate_pair(s, &self.comps[slot], &other.comps[slot]))
            .sum()
    }
}

pub fn eval_vector(v: &VectorPoly, lambda: &[f64]) -> Vec<f64> {
    v.iter().map(|p| p.eval_barycentric(lambda)).collect()
}

/// `int_K v . w`
pub fn vector_inner(v: &VectorPoly, w: &VectorPoly, s: &Simplex) -> f64 {
    v.iter().zip(w).map(|(a, b)| integrate_pair(s, a, b)).sum()
}

/// Symmetric gradient `(grad v + grad v^T) / 2`.
pub fn sym_gradient(v: &VectorPoly, s: &Simplex) -> TensorPoly {
    let n = s.dim();
    let grads: Vec<Vec<BarycentricPoly>> = v.iter().map(|c| c.gradient(s)).collect();
    let comps = packed_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let mut e = grads[i][j].scale(0.5);
            e.axpy(0.5, &grads[j][i]);
            e
        })
        .collect();
    TensorPoly::from_components(n, comps)
}

/// Polynomial in the Cartesian coordinates `x_1..x_n`.
///
/// Serialized as `{"n": .., "terms": [[exponents, coefficient], ..]}`.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(into = "CartesianPolyJson", try_from = "CartesianPolyJson")]
pub struct CartesianPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct CartesianPolyJson {
    n: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl From<CartesianPoly> for CartesianPolyJson {
    fn from(p: CartesianPoly) -> Self {
        Self { n: p.n, terms: p.terms.into_iter().collect() }
    }
}

impl TryFrom<CartesianPolyJson> for CartesianPoly {
    type Error = String;

    fn try_from(j: CartesianPolyJson) -> Result<Self, String> {
        if let Some((e, _)) = j.terms.iter().find(|(e, _)| e.len() != j.n) {
            return Err(format!("exponent vector {e:?} does not have length n = {}", j.n));
        }
        Ok(Self::from_terms(j.n, j.terms))
    }
}

impl CartesianPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    /// `x_r`
    pub fn coordinate(n: usize, r: usize) -> Self {
        let mut e = vec![0; n];
        e[r] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, 1.0);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        assert_eq!(exps.len(), self.n);
        if c == 0.0 {
            return;
        }
        let v = self.terms.entry(exps.clone()).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (e, v) in &other.terms {
            self.add_term(e.clone(), c * v);
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.n);
        out.axpy(c, self);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb);
            }
        }
        out
    }

    pub fn derivative(&self, r: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, &c) in &self.terms {
            if e[r] > 0 {
                let mut d = e.clone();
                d[r] -= 1;
                out.add_term(d, c * e[r] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&p, v)| v.powi(p as i32)).product::<f64>())
            .sum()
    }

    /// The same polynomial written in the barycentric coordinates of `s`.
    pub fn to_barycentric(&self, s: &Simplex) -> BarycentricPoly {
        let n = self.n;
        let coords: Vec<BarycentricPoly> = (0..n).map(|r| BarycentricPoly::coordinate(s, r)).collect();
        // cache powers per coordinate
        let max_deg = self.degree() as usize;
        let powers: Vec<Vec<BarycentricPoly>> = coords
            .iter()
            .map(|c| {
                let mut p = vec![BarycentricPoly::constant(n, 1.0)];
                for _ in 0..max_deg {
                    let next = p.last().unwrap() * c;
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = BarycentricPoly::zero(n);
        for (e, &c) in &self.terms {
            let mut term = BarycentricPoly::monomial(MultiIndex::zero(n + 1), c);
            for (r, &p) in e.iter().enumerate() {
                if p > 0 {
                    term = &term * &powers[r][p as usize];
                }
            }
            out.axpy(1.0, &term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cartesian_to_barycentric_agrees() {
        let s = Simplex::from_vertices(vec![vec![0.2, 0.1], vec![1.0, 0.3], vec![0.4, 1.2]]).unwrap();
        let p = CartesianPoly::from_terms(2, [(vec![2, 1], 1.5), (vec![0, 3], -0.5), (vec![0, 0], 2.0)]);
        let b = p.to_barycentric(&s);
        for x in [[0.3, 0.4], [0.5, 0.5], [0.9, 0.35]] {
            assert_relative_eq!(b.eval(&s, &x), p.eval(&x), epsilon = 1e-13);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = CartesianPoly::from_terms(2, [(vec![2, 1], 1.5), (vec![0, 0], -2.0)]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<CartesianPoly>(&text).unwrap(), p);
        assert!(serde_json::from_str::<CartesianPoly>(r#"{"n":2,"terms":[[[1],1.0]]}"#).is_err());
    }

    #[test]
    fn linear_divergence() {
        // tau = x_1 * I on the reference triangle; div tau = (1, 0)
        let s = Simplex::reference(2);
        let x1 = BarycentricPoly::coordinate(&s, 0);
        let tau = TensorPoly::scalar_times(&x1, &SymTensor::identity(2));
        let d = tau.divergence(&s);
        assert_relative_eq!(d[0].eval(&s, &[0.3, 0.3]), 1.0, epsilon = 1e-15);
        assert!(d[1].is_zero());
        let c = TensorPoly::scalar_times(&BarycentricPoly::constant(2, 2.0), &SymTensor::identity(2));
        assert!(c.divergence(&s).iter().all(BarycentricPoly::is_zero));
    }

    #[test]
    fn rotation_has_zero_sym_gradient() {
        let s = Simplex::reference(3);
        let x = |r| BarycentricPoly::coordinate(&s, r);
        let v = vec![x(1), x(0).scale(-1.0), BarycentricPoly::zero(3)];
        let e = sym_gradient(&v, &s);
        assert!(e.components().iter().all(|c| c.terms().all(|(_, v)| v.abs() < 1e-14)));
    }
}
