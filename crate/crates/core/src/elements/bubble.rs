use nalgebra::DMatrix;
use serde::Serialize;

use super::dofs::{bubble_exponent, bubble_indices};
use super::stress::StressElement;
use crate::combinat::dim_report;
use crate::polynomial::{homogeneous_indices, monomial_mean};
use crate::symtensor::packed_pairs;

/// Bubble functions `lambda_i lambda_j lambda^beta T_{i,j}` as columns of
/// spanning-set coefficients of `el`.
pub fn bubble_coefficients(el: &StressElement) -> DMatrix<f64> {
    let n = el.dim();
    let nm = el.monomials().len();
    let labels = bubble_indices(n, el.degree());
    let mut out = DMatrix::zeros(nm * packed_pairs(n).len(), labels.len());
    for (c, (edge, beta)) in labels.iter().enumerate() {
        let alpha = bubble_exponent(*edge, beta);
        let m = el.monomials().iter().position(|a| *a == alpha).expect("bubble monomial of degree k");
        let t = &el.tensor_basis().t[el.tensor_basis().index_of(edge.0, edge.1)];
        for (s, &v) in t.packed().iter().enumerate() {
            out[(s * nm + m, c)] = v;
        }
    }
    out
}

/// Matrix of the boundary normal trace `tau -> tau nu|_F` over all facets,
/// tested against every degree-`k` monomial of the facet so that its kernel
/// is exactly the set of fields with vanishing normal trace.
pub fn normal_trace_matrix(el: &StressElement) -> DMatrix<f64> {
    let n = el.dim();
    let k = el.degree();
    let nm = el.monomials().len();
    let slots = packed_pairs(n);
    let tests = homogeneous_indices(n, k);
    let rows = (n + 1) * n * tests.len();
    let mut t = DMatrix::zeros(rows, nm * slots.len());
    for f in 0..=n {
        let nu = el.simplex().facet_normal(f);
        let facet: Vec<usize> = (0..=n).filter(|&v| v != f).collect();
        for (mi, alpha) in el.monomials().iter().enumerate() {
            if alpha.0[f] != 0 {
                continue;
            }
            for (ti, test) in tests.iter().enumerate() {
                let restricted = crate::polynomial::MultiIndex(
                    facet.iter().zip(&test.0).map(|(&v, e)| alpha.0[v] + e).collect(),
                );
                let mean = monomial_mean(&restricted);
                for (s, &(p, q)) in slots.iter().enumerate() {
                    let col = s * nm + mi;
                    let base = (f * n) * tests.len() + ti;
                    // (E_pq nu)_r
                    t[(base + p * tests.len(), col)] += nu[q] * mean;
                    if p != q {
                        t[(base + q * tests.len(), col)] += nu[p] * mean;
                    }
                }
            }
        }
    }
    t
}

/// Outcome of comparing the explicit bubble space with the kernel of the
/// normal trace.
#[derive(Debug, Clone, Serialize)]
pub struct BubbleCheck {
    pub n: usize,
    pub k: usize,
    pub kernel_dim: usize,
    pub expected_dim: usize,
    pub bubble_rank: usize,
    /// `max_b |T b| / (|T| |b|)` over bubble columns.
    pub max_trace_residual: f64,
    /// Largest `|theta nu|` sampled at random boundary points.
    pub max_boundary_value: f64,
}

impl BubbleCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.kernel_dim == self.expected_dim
            && self.bubble_rank == self.expected_dim
            && self.max_trace_residual < tol
            && self.max_boundary_value < tol
    }
}

/// Numerical rank with singular values below `rel * max` treated as zero.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.max();
    sv.iter().filter(|&&s| s > rel * max).count()
}

pub fn check_bubble_equivalence(el: &StressElement, samples: &[Vec<f64>]) -> BubbleCheck {
    let n = el.dim();
    let t = normal_trace_matrix(el);
    let rank = numerical_rank(&t, 1e-10);
    let b = bubble_coefficients(el);
    let tnorm = t.norm();
    let max_trace_residual = b
        .column_iter()
        .map(|c| (&t * c).norm() / (tnorm * c.norm()))
        .fold(0.0, f64::max);

    let mut max_boundary_value: f64 = 0.0;
    for col in b.column_iter() {
        let coeffs: Vec<f64> = col.iter().copied().collect();
        for (f, lam) in samples.iter().enumerate() {
            let facet = f % (n + 1);
            let mut l = lam.clone();
            l[facet] = 0.0;
            let sum: f64 = l.iter().sum();
            l.iter_mut().for_each(|x| *x /= sum);
            let v = el.eval_coefficients(&coeffs, &l).apply(&el.simplex().facet_normal(facet));
            max_boundary_value = v.iter().fold(max_boundary_value, |m, x| m.max(x.abs()));
        }
    }

    BubbleCheck {
        n,
        k: el.degree(),
        kernel_dim: t.ncols() - rank,
        expected_dim: dim_report(n, el.degree()).map(|r| r.dim_bubble as usize).unwrap_or(0),
        bubble_rank: numerical_rank(&b, 1e-10),
        max_trace_residual,
        max_boundary_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::CellFrames;
    use crate::geometry::Simplex;

    #[test]
    fn triangle_bubbles_match_kernel() {
        let s = Simplex::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.1], vec![0.2, 0.9]]).unwrap();
        let el = StressElement::new(s.clone(), CellFrames::for_simplex(&s).unwrap(), 2).unwrap();
        let samples = vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.1, 0.3], vec![0.3, 0.3, 0.4]];
        let c = check_bubble_equivalence(&el, &samples);
        assert_eq!(c.expected_dim, 3);
        assert!(c.passed(1e-10), "{c:?}");
    }
}
