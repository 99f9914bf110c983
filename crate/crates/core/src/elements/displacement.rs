use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::bubble::{bubble_coefficients, numerical_rank};
use super::stress::StressElement;
use crate::combinat::dim_report;
use crate::geometry::Simplex;
use crate::polynomial::{homogeneous_indices, integrate_monomial, BarycentricPoly, MultiIndex};
use crate::symtensor::packed_pairs;

/// Discontinuous vector `P_{k-1}` on one simplex with basis `lambda^alpha e_r`,
/// `|alpha| = k - 1`, indexed component-major: `r * monos.len() + mono`.
#[derive(Debug, Clone)]
pub struct DisplacementElement {
    k: usize,
    simplex: Simplex,
    monos: Vec<MultiIndex>,
    index: BTreeMap<MultiIndex, usize>,
}

impl DisplacementElement {
    /// `k` is the stress degree; the displacement degree is `k - 1`.
    pub fn new(simplex: Simplex, k: usize) -> Self {
        let monos = homogeneous_indices(simplex.dim() + 1, k - 1);
        let index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Self { k, simplex, monos, index }
    }

    pub fn len(&self) -> usize {
        self.simplex.dim() * self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monos
    }

    pub fn simplex(&self) -> &Simplex {
        &self.simplex
    }

    pub fn mono_index(&self, alpha: &MultiIndex) -> usize {
        self.index[alpha]
    }

    /// `int v . w` over the basis.
    pub fn mass(&self) -> DMatrix<f64> {
        let n = self.simplex.dim();
        let nm = self.monos.len();
        let mut block = DMatrix::zeros(nm, nm);
        for (i, a) in self.monos.iter().enumerate() {
            for (j, b) in self.monos.iter().enumerate().skip(i) {
                let v = integrate_monomial(&self.simplex, &a.add(b));
                block[(i, j)] = v;
                block[(j, i)] = v;
            }
        }
        let mut m = DMatrix::zeros(n * nm, n * nm);
        for r in 0..n {
            m.view_mut((r * nm, r * nm), (nm, nm)).copy_from(&block);
        }
        m
    }

    /// Exact divergence of the stress spanning set, as a
    /// `len() x spanning` matrix of displacement coefficients.
    pub fn divergence_matrix(&self, el: &StressElement) -> DMatrix<f64> {
        let n = self.simplex.dim();
        let nm = self.monos.len();
        let smonos = el.monomials();
        let slots = packed_pairs(n);
        let grads = self.simplex.grad_lambda();
        let mut d = DMatrix::zeros(n * nm, slots.len() * smonos.len());
        for (mi, alpha) in smonos.iter().enumerate() {
            // d_j lambda^alpha = sum_i alpha_i (grad lambda_i)_j lambda^(alpha - e_i)
            let mut partials: Vec<(usize, f64, usize)> = Vec::new();
            for (i, &ai) in alpha.0.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                let mut lower = alpha.clone();
                lower.0[i] -= 1;
                let li = self.mono_index(&lower);
                for j in 0..n {
                    partials.push((j, ai as f64 * grads[i][j], li));
                }
            }
            for (s, &(p, q)) in slots.iter().enumerate() {
                let col = s * smonos.len() + mi;
                for &(j, c, li) in &partials {
                    if j == q {
                        d[(p * nm + li, col)] += c;
                    }
                    if p != q && j == p {
                        d[(q * nm + li, col)] += c;
                    }
                }
            }
        }
        d
    }

    /// Coefficients of a vector field of degree at most `k - 1`.
    pub fn from_poly(&self, v: &[BarycentricPoly]) -> Vec<f64> {
        let nm = self.monos.len();
        let mut out = vec![0.0; self.len()];
        for (r, comp) in v.iter().enumerate() {
            let h = comp.homogenize(self.k as u32 - 1);
            for (term, c) in h.terms() {
                out[r * nm + self.mono_index(term)] = c;
            }
        }
        out
    }

    pub fn to_poly(&self, coeffs: &[f64]) -> Vec<BarycentricPoly> {
        let n = self.simplex.dim();
        let nm = self.monos.len();
        (0..n)
            .map(|r| {
                BarycentricPoly::from_terms(n, self.monos.iter().enumerate().map(|(m, a)| (a.clone(), coeffs[r * nm + m])))
            })
            .collect()
    }

    pub fn eval(&self, coeffs: &[f64], lambda: &[f64]) -> Vec<f64> {
        let nm = self.monos.len();
        let vals: Vec<f64> = self
            .monos
            .iter()
            .map(|a| a.0.iter().zip(lambda).map(|(&e, l)| l.powi(e as i32)).product())
            .collect();
        (0..self.simplex.dim())
            .map(|r| (0..nm).map(|m| coeffs[r * nm + m] * vals[m]).sum())
            .collect()
    }

    /// Infinitesimal rigid motions `e_r` and `x_i e_j - x_j e_i` as columns.
    pub fn rigid_motions(&self) -> DMatrix<f64> {
        let n = self.simplex.dim();
        let mut fields: Vec<Vec<BarycentricPoly>> = Vec::new();
        for r in 0..n {
            let mut v = vec![BarycentricPoly::zero(n); n];
            v[r] = BarycentricPoly::constant(n, 1.0);
            fields.push(v);
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut v = vec![BarycentricPoly::zero(n); n];
                v[j] = BarycentricPoly::coordinate(&self.simplex, i);
                v[i] = BarycentricPoly::coordinate(&self.simplex, j).scale(-1.0);
                fields.push(v);
            }
        }
        let mut out = DMatrix::zeros(self.len(), fields.len());
        for (c, f) in fields.iter().enumerate() {
            for (r, v) in self.from_poly(f).into_iter().enumerate() {
                out[(r, c)] = v;
            }
        }
        out
    }

    /// `M`-orthogonal projector onto the complement of the rigid motions.
    pub fn rperp_projector(&self) -> DMatrix<f64> {
        let m = self.mass();
        let r = self.rigid_motions();
        let g = r.transpose() * &m * &r;
        let ginv = g.cholesky().expect("rigid motions are independent").inverse();
        DMatrix::identity(self.len(), self.len()) - &r * ginv * r.transpose() * m
    }
}

/// Rank of the divergence restricted to bubbles and orthogonality of its
/// image to the rigid motions.
#[derive(Debug, Clone, Serialize)]
pub struct DivRangeCheck {
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    pub expected_rank: usize,
    /// Largest `|(r, div b)_M| / (|r|_M |div b|_M)`.
    pub max_rigid_cosine: f64,
}

impl DivRangeCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.rank == self.expected_rank && self.max_rigid_cosine < tol
    }
}

pub fn check_div_bubble_range(el: &StressElement) -> DivRangeCheck {
    let n = el.dim();
    let k = el.degree();
    let v = DisplacementElement::new(el.simplex().clone(), k);
    let div_b = v.divergence_matrix(el) * bubble_coefficients(el);
    let m = v.mass();
    let r = v.rigid_motions();
    let mr = &m * &r;
    let mut worst: f64 = 0.0;
    for dc in div_b.column_iter() {
        let dn = (dc.transpose() * &m * dc)[(0, 0)].sqrt();
        if dn == 0.0 {
            continue;
        }
        for (rc, mrc) in r.column_iter().zip(mr.column_iter()) {
            let rn = (rc.transpose() * mrc)[(0, 0)].sqrt();
            worst = worst.max((mrc.transpose() * dc)[(0, 0)].abs() / (rn * dn));
        }
    }
    let report = dim_report(n, k).expect("valid degree");
    DivRangeCheck {
        n,
        k,
        rank: numerical_rank(&div_b, 1e-10),
        expected_rank: (report.dim_v_local - report.dim_rigid) as usize,
        max_rigid_cosine: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::CellFrames;
    use crate::fields::TensorPoly;

    fn element(s: &Simplex, k: usize) -> StressElement {
        StressElement::new(s.clone(), CellFrames::for_simplex(s).unwrap(), k).unwrap()
    }

    #[test]
    fn divergence_matrix_matches_symbolic() {
        let s = Simplex::from_vertices(vec![vec![0.1, 0.0], vec![1.0, 0.2], vec![0.3, 0.7]]).unwrap();
        let el = element(&s, 3);
        let v = DisplacementElement::new(s.clone(), 3);
        let d = v.divergence_matrix(&el);
        let m = el.spanning_labels().len();
        for c in [0, 4, 11, 17, 29] {
            let mut coeffs = vec![0.0; m];
            coeffs[c] = 1.0;
            let tau: TensorPoly = el.to_poly(&coeffs);
            let expect = v.from_poly(&tau.divergence(&s));
            for (r, e) in expect.iter().enumerate() {
                assert!((d[(r, c)] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rigid_motions_have_zero_strain() {
        let s = Simplex::reference(3);
        let v = DisplacementElement::new(s.clone(), 3);
        let r = v.rigid_motions();
        for c in r.column_iter() {
            let coeffs: Vec<f64> = c.iter().copied().collect();
            let field = v.to_poly(&coeffs);
            let e = crate::fields::sym_gradient(&field, &s);
            assert!(e.components().iter().all(|p| p.terms().all(|(_, x)| x.abs() < 1e-12)));
        }
        let p = v.rperp_projector();
        assert!((&p * &r).amax() < 1e-12);
    }

    #[test]
    fn bubble_divergence_range() {
        let s = Simplex::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.1], vec![0.2, 0.9]]).unwrap();
        let c = check_div_bubble_range(&element(&s, 2));
        assert_eq!(c.expected_rank, 3);
        assert!(c.passed(1e-9), "{c:?}");
    }
}
