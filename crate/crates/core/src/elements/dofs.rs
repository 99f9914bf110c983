//! Stress degrees of freedom.
//!
//! On every `l`-subsimplex (`0 <= l < n`) the DOFs are mean moments of
//! `t^T tau nu` and `nu^T tau nu'` against the homogeneous barycentric
//! monomials of degree `k - l - 1` of that subsimplex; at a vertex this is the
//! value of each Cartesian component. Interior DOFs are `int_K tau : theta`
//! for `theta` in the bubble basis `lambda_i lambda_j lambda^beta T_{i,j}`.

use serde::Serialize;

use crate::geometry::{edge_pairs, FramePair, SubsimplexFrame};
use crate::polynomial::{homogeneous_indices, monomial_mean, BarycentricPoly, MultiIndex};
use crate::fields::TensorPoly;
use crate::symtensor::{packed_pairs, packed_weight, TensorBasis};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DofKind {
    FaceMoment {
        /// Subsimplex dimension.
        l: usize,
        /// Index into the cell's ascending local subsets of size `l + 1`.
        local_sub: usize,
        /// Global subsimplex id.
        sub_id: usize,
        pair: FramePair,
        /// Exponents over the subsimplex's own barycentric coordinates.
        moment: Vec<u32>,
    },
    InteriorBubble {
        edge: (usize, usize),
        weight: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofDescriptor {
    pub kind: DofKind,
    /// Position among the DOFs of the same subsimplex (or among the bubbles);
    /// identical from every cell sharing the subsimplex.
    pub slot: usize,
}

impl DofDescriptor {
    pub fn is_interior(&self) -> bool {
        matches!(self.kind, DofKind::InteriorBubble { .. })
    }
}

/// Frames of every local subsimplex of one cell, indexed `[l][local_sub]`,
/// together with the vertex subsets they belong to.
#[derive(Debug, Clone)]
pub struct CellFrames {
    pub subsets: Vec<Vec<Vec<usize>>>,
    pub frames: Vec<Vec<SubsimplexFrame>>,
    pub ids: Vec<Vec<usize>>,
}

/// Ordered DOF list of one cell: subsimplices by dimension, then by local
/// subset, each with its frame pairs times moment monomials; bubbles last.
pub fn stress_dofs(n: usize, k: usize, frames: &CellFrames) -> Vec<DofDescriptor> {
    let mut out = Vec::new();
    for l in 0..n {
        let moments = homogeneous_indices(l + 1, k - l - 1);
        for (local_sub, frame) in frames.frames[l].iter().enumerate() {
            let mut slot = 0;
            for pair in frame.component_pairs() {
                for m in &moments {
                    out.push(DofDescriptor {
                        kind: DofKind::FaceMoment {
                            l,
                            local_sub,
                            sub_id: frames.ids[l][local_sub],
                            pair,
                            moment: m.0.clone(),
                        },
                        slot,
                    });
                    slot += 1;
                }
            }
        }
    }
    for (slot, (edge, weight)) in bubble_indices(n, k).into_iter().enumerate() {
        out.push(DofDescriptor { kind: DofKind::InteriorBubble { edge, weight: weight.0 }, slot });
    }
    out
}

/// `(edge, beta)` labels of the bubble functions `lambda_i lambda_j lambda^beta T_{i,j}`.
pub fn bubble_indices(n: usize, k: usize) -> Vec<((usize, usize), MultiIndex)> {
    let weights = homogeneous_indices(n + 1, k - 2);
    edge_pairs(n)
        .into_iter()
        .flat_map(|e| weights.iter().map(move |w| (e, w.clone())))
        .collect()
}

/// Full barycentric exponent of the bubble `(edge, beta)`.
pub fn bubble_exponent(edge: (usize, usize), beta: &MultiIndex) -> MultiIndex {
    let mut a = beta.clone();
    a.0[edge.0] += 1;
    a.0[edge.1] += 1;
    a
}

/// Evaluates one DOF functional on a tensor polynomial over a cell with
/// `measure` and tangent basis `basis`.
pub fn apply_dof(
    d: &DofDescriptor,
    tau: &TensorPoly,
    frames: &CellFrames,
    basis: &TensorBasis,
    measure: f64,
) -> f64 {
    match &d.kind {
        DofKind::FaceMoment { l, local_sub, pair, moment, .. } => {
            let frame = &frames.frames[*l][*local_sub];
            let (a, b) = frame.pair_vectors(*pair);
            let trace = tau.bilinear(a, b).restrict(&frames.subsets[*l][*local_sub]);
            let weight = BarycentricPoly::monomial(MultiIndex(moment.clone()), 1.0);
            (&trace * &weight).mean()
        }
        DofKind::InteriorBubble { edge, weight } => {
            let alpha = bubble_exponent(*edge, &MultiIndex(weight.clone()));
            let theta = TensorPoly::scalar_times(
                &BarycentricPoly::monomial(alpha, 1.0),
                &basis.t[basis.index_of(edge.0, edge.1)],
            );
            let n = tau.dim();
            (0..tau.components().len())
                .map(|slot| {
                    let prod = &tau.components()[slot] * &theta.components()[slot];
                    packed_weight(n, slot) * prod.mean() * measure
                })
                .sum()
        }
    }
}

/// DOF values of the spanning functions `lambda^alpha E_{pq}`, `|alpha| = k`,
/// as a square matrix `D[dof][spanning]`. Columns are ordered slot-major:
/// `c = slot * monos.len() + mono`.
pub fn dof_matrix(
    dofs: &[DofDescriptor],
    monos: &[MultiIndex],
    frames: &CellFrames,
    basis: &TensorBasis,
    measure: f64,
) -> nalgebra::DMatrix<f64> {
    let n = basis.n;
    let slots = packed_pairs(n);
    let nm = monos.len();
    let mut d = nalgebra::DMatrix::zeros(dofs.len(), slots.len() * nm);
    for (r, dof) in dofs.iter().enumerate() {
        match &dof.kind {
            DofKind::FaceMoment { l, local_sub, pair, moment, .. } => {
                let frame = &frames.frames[*l][*local_sub];
                let sub = &frames.subsets[*l][*local_sub];
                let (a, b) = frame.pair_vectors(*pair);
                for (mi, alpha) in monos.iter().enumerate() {
                    // monomials touching a vertex outside the subsimplex vanish on it
                    let inside: u32 = sub.iter().map(|&i| alpha.0[i]).sum();
                    if inside != alpha.degree() {
                        continue;
                    }
                    let restricted = MultiIndex(sub.iter().zip(moment).map(|(&i, m)| alpha.0[i] + m).collect());
                    let mean = monomial_mean(&restricted);
                    for (s, &(p, q)) in slots.iter().enumerate() {
                        let w = if p == q { a[p] * b[p] } else { a[p] * b[q] + a[q] * b[p] };
                        d[(r, s * nm + mi)] = w * mean;
                    }
                }
            }
            DofKind::InteriorBubble { edge, weight } => {
                let beta = bubble_exponent(*edge, &MultiIndex(weight.clone()));
                let t = &basis.t[basis.index_of(edge.0, edge.1)];
                for (mi, alpha) in monos.iter().enumerate() {
                    let integral = measure * monomial_mean(&alpha.add(&beta));
                    for s in 0..slots.len() {
                        d[(r, s * nm + mi)] = packed_weight(n, s) * t.packed()[s] * integral;
                    }
                }
            }
        }
    }
    d
}
