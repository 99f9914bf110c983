use nalgebra::{DMatrix, DVector};

use super::dofs::{dof_matrix, stress_dofs, CellFrames, DofDescriptor};
use crate::combinat::dim_report;
use crate::error::{FemError, Result};
use crate::fields::TensorPoly;
use crate::geometry::{Mesh, Simplex, SubsimplexFrame};
use crate::polynomial::{homogeneous_indices, BarycentricPoly, MultiIndex};
use crate::symtensor::{dual_basis, packed_len, packed_pairs, rank_one_tangent_tensors, SymTensor, TensorBasis};

/// A DOF matrix whose singular values spread wider than this is treated as singular.
pub const UNISOLVENCE_THRESHOLD: f64 = 1e-12;

impl CellFrames {
    /// Frames of `cell` taken from the global lattice of `mesh`.
    pub fn from_mesh(mesh: &Mesh, cell: usize) -> Self {
        let n = mesh.dim();
        let subsets: Vec<Vec<Vec<usize>>> = (0..n).map(|l| mesh.local_subsets(l).to_vec()).collect();
        let ids: Vec<Vec<usize>> = (0..n)
            .map(|l| (0..subsets[l].len()).map(|s| mesh.cell_subsimplex(cell, l, s)).collect())
            .collect();
        let frames = (0..n)
            .map(|l| ids[l].iter().map(|&id| mesh.subsimplex_frame(l, id).clone()).collect())
            .collect();
        Self { subsets, frames, ids }
    }

    /// Frames of a standalone simplex, whose vertex order is taken as the
    /// global order; subsimplex ids are the local subset indices.
    pub fn for_simplex(s: &Simplex) -> Result<Self> {
        let n = s.dim();
        let subsets: Vec<Vec<Vec<usize>>> = (0..n).map(|l| crate::combinat::subsets(n + 1, l + 1)).collect();
        let frames = subsets
            .iter()
            .map(|subs| {
                subs.iter()
                    .map(|sub| {
                        let pts: Vec<&[f64]> = sub.iter().map(|&i| s.vertex(i)).collect();
                        SubsimplexFrame::from_points(&pts)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let ids = subsets.iter().map(|subs| (0..subs.len()).collect()).collect();
        Ok(Self { subsets, frames, ids })
    }
}

/// Symmetric `P_k` stress element on one simplex with the shape basis dual to
/// its DOFs.
///
/// Shape functions are stored as coefficients over the spanning set
/// `lambda^alpha E_{pq}` (`|alpha| = k`, `E_{pq}` the packed unit tensors),
/// ordered slot-major.
#[derive(Debug, Clone)]
pub struct StressElement {
    k: usize,
    simplex: Simplex,
    basis: TensorBasis,
    frames: CellFrames,
    dofs: Vec<DofDescriptor>,
    monos: Vec<MultiIndex>,
    dof_matrix: DMatrix<f64>,
    shape_coeffs: DMatrix<f64>,
    row_scales: Vec<f64>,
    vandermonde_condition: f64,
}

impl StressElement {
    pub fn new(simplex: Simplex, frames: CellFrames, k: usize) -> Result<Self> {
        let n = simplex.dim();
        let report = dim_report(n, k)?;
        let basis = dual_basis(rank_one_tangent_tensors(&simplex)?)?;
        let dofs = stress_dofs(n, k, &frames);
        debug_assert_eq!(dofs.len() as u128, report.dim_pk_sym);
        let monos = homogeneous_indices(n + 1, k);
        let d = dof_matrix(&dofs, &monos, &frames, &basis, simplex.measure());

        // equilibrate rows before judging conditioning
        let scales: Vec<f64> = d.row_iter().map(|r| 1.0 / r.amax()).collect();
        let mut scaled = d.clone();
        for (i, s) in scales.iter().enumerate() {
            scaled.row_mut(i).scale_mut(*s);
        }
        let sv = scaled.singular_values();
        let (max, min) = (sv.max(), sv.min());
        if !(min > UNISOLVENCE_THRESHOLD * max) {
            return Err(FemError::Unisolvence { ratio: min / max });
        }
        let mut inv = scaled.lu().try_inverse().ok_or(FemError::Unisolvence { ratio: 0.0 })?;
        for (j, s) in scales.iter().enumerate() {
            inv.column_mut(j).scale_mut(*s);
        }
        Ok(Self {
            k,
            simplex,
            basis,
            frames,
            dofs,
            monos,
            dof_matrix: d,
            shape_coeffs: inv,
            row_scales: scales,
            vandermonde_condition: max / min,
        })
    }

    pub fn dim(&self) -> usize {
        self.simplex.dim()
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn simplex(&self) -> &Simplex {
        &self.simplex
    }

    pub fn tensor_basis(&self) -> &TensorBasis {
        &self.basis
    }

    pub fn frames(&self) -> &CellFrames {
        &self.frames
    }

    pub fn dofs(&self) -> &[DofDescriptor] {
        &self.dofs
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// Degree-`k` homogeneous monomials of the spanning set.
    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monos
    }

    /// `D[dof][spanning]`
    pub fn dof_matrix(&self) -> &DMatrix<f64> {
        &self.dof_matrix
    }

    /// Column `i` holds shape function `i` over the spanning set.
    pub fn shape_coefficients(&self) -> &DMatrix<f64> {
        &self.shape_coeffs
    }

    /// Condition number of the row-equilibrated DOF matrix.
    pub fn vandermonde_condition(&self) -> f64 {
        self.vandermonde_condition
    }

    /// `max |r_i dof_i(shape_j) / r_j - delta_ij|` with `r` the row
    /// equilibration of the DOF matrix, i.e. the duality residual measured
    /// on the equilibrated system.
    pub fn unisolvence_residual(&self) -> f64 {
        let prod = &self.dof_matrix * &self.shape_coeffs;
        let mut worst: f64 = 0.0;
        for i in 0..prod.nrows() {
            for j in 0..prod.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.row_scales[i] * prod[(i, j)] / self.row_scales[j] - target).abs());
            }
        }
        worst
    }

    /// Spanning-set coefficients to a tensor polynomial.
    pub fn to_poly(&self, coeffs: &[f64]) -> TensorPoly {
        let n = self.dim();
        let nm = self.monos.len();
        let comps = (0..packed_len(n))
            .map(|s| {
                BarycentricPoly::from_terms(n, self.monos.iter().enumerate().map(|(m, a)| (a.clone(), coeffs[s * nm + m])))
            })
            .collect();
        TensorPoly::from_components(n, comps)
    }

    /// Spanning-set coefficients of a tensor polynomial of degree at most `k`.
    pub fn from_poly(&self, tau: &TensorPoly) -> Vec<f64> {
        let nm = self.monos.len();
        let mut out = vec![0.0; nm * tau.components().len()];
        for (s, comp) in tau.components().iter().enumerate() {
            let h = comp.homogenize(self.k as u32);
            for (m, a) in self.monos.iter().enumerate() {
                out[s * nm + m] = h.coefficient(a);
            }
        }
        out
    }

    pub fn shape_poly(&self, i: usize) -> TensorPoly {
        let col: Vec<f64> = self.shape_coeffs.column(i).iter().copied().collect();
        self.to_poly(&col)
    }

    /// Spanning-set coefficients of `sum_i local[i] * shape_i`.
    pub fn combine(&self, local: &[f64]) -> DVector<f64> {
        &self.shape_coeffs * DVector::from_column_slice(local)
    }

    /// Evaluates a spanning-set coefficient vector at barycentric point `lambda`.
    pub fn eval_coefficients(&self, coeffs: &[f64], lambda: &[f64]) -> SymTensor {
        let n = self.dim();
        let nm = self.monos.len();
        let vals: Vec<f64> = self
            .monos
            .iter()
            .map(|a| a.0.iter().zip(lambda).map(|(&e, l)| l.powi(e as i32)).product())
            .collect();
        let packed = (0..packed_len(n))
            .map(|s| (0..nm).map(|m| coeffs[s * nm + m] * vals[m]).sum())
            .collect();
        SymTensor::from_packed(n, packed)
    }

    /// DOF values of a spanning-set coefficient vector.
    pub fn dof_values(&self, coeffs: &[f64]) -> DVector<f64> {
        &self.dof_matrix * DVector::from_column_slice(coeffs)
    }

    /// Spanning-set coefficient slots `(slot, mono)` in column order.
    pub fn spanning_labels(&self) -> Vec<((usize, usize), MultiIndex)> {
        let n = self.dim();
        packed_pairs(n)
            .into_iter()
            .flat_map(|pq| self.monos.iter().map(move |m| (pq, m.clone())))
            .collect()
    }
}

/// Builds the stress element of `cell` with frames from the mesh lattice.
pub fn local_stress_basis(mesh: &Mesh, cell: usize, k: usize) -> Result<StressElement> {
    StressElement::new(mesh.simplex(cell).clone(), CellFrames::from_mesh(mesh, cell), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::dofs::apply_dof;
    use rand::{Rng, SeedableRng};

    fn element(s: Simplex, k: usize) -> StressElement {
        let frames = CellFrames::for_simplex(&s).unwrap();
        StressElement::new(s, frames, k).unwrap()
    }

    #[test]
    fn dof_counts() {
        let e = element(Simplex::reference(2), 3);
        assert_eq!(e.len(), 30);
        let per_l = |l: usize| {
            e.dofs()
                .iter()
                .filter(|d| matches!(d.kind, crate::elements::DofKind::FaceMoment { l: ll, .. } if ll == l))
                .count()
        };
        assert_eq!((per_l(0), per_l(1)), (9, 12));
        assert_eq!(e.dofs().iter().filter(|d| d.is_interior()).count(), 9);

        let e = element(Simplex::reference(1), 2);
        assert_eq!(e.len(), 3);
        let e = element(Simplex::reference(3), 4);
        let interior = e.dofs().iter().filter(|d| d.is_interior()).count();
        assert_eq!((e.len(), interior), (210, 60));
    }

    #[test]
    fn low_degree_rejected() {
        let s = Simplex::reference(2);
        let frames = CellFrames::for_simplex(&s).unwrap();
        assert!(StressElement::new(s, frames, 1).is_err());
    }

    #[test]
    fn dual_shape_basis() {
        let e = element(Simplex::reference(2), 3);
        assert!(e.unisolvence_residual() < 1e-9);
        let e = element(Simplex::reference(3), 4);
        assert!(e.unisolvence_residual() < 1e-9, "{}", e.unisolvence_residual());
    }

    #[test]
    fn fast_dof_matrix_matches_generic_functionals() {
        let s = Simplex::from_vertices(vec![vec![0.1, 0.0], vec![1.0, 0.2], vec![0.3, 0.7]]).unwrap();
        let e = element(s, 3);
        let m = e.spanning_labels().len();
        for c in 0..m {
            let mut coeffs = vec![0.0; m];
            coeffs[c] = 1.0;
            let tau = e.to_poly(&coeffs);
            for (r, d) in e.dofs().iter().enumerate() {
                let v = apply_dof(d, &tau, e.frames(), e.tensor_basis(), e.simplex().measure());
                assert!((v - e.dof_matrix()[(r, c)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dof_examples() {
        let s = Simplex::reference(2);
        let e = element(s.clone(), 3);
        let delta = TensorPoly::scalar_times(&BarycentricPoly::constant(2, 1.0), &SymTensor::identity(2));
        let apply = |d: &DofDescriptor, t: &TensorPoly| apply_dof(d, t, e.frames(), e.tensor_basis(), s.measure());
        // vertex DOF of component (e_1, e_1)
        assert!((apply(&e.dofs()[0], &delta) - 1.0).abs() < 1e-15);
        // edge x_1 x_2 is local subset 2 at l = 1; (nu, nu) with moment index of degree 1
        let edge_nn = e
            .dofs()
            .iter()
            .find(|d| {
                matches!(&d.kind, crate::elements::DofKind::FaceMoment { l: 1, local_sub: 2, pair: crate::geometry::FramePair::NormalNormal(0, 0), moment, .. } if moment == &vec![1, 0])
            })
            .unwrap();
        // mean of nu^T I nu * lambda_1 over the edge is 1/2
        assert!((apply(edge_nn, &delta) - 0.5).abs() < 1e-15);
        // interior DOF with theta = lambda_1 lambda_2 T_{1,2} applied to itself:
        // int lambda_1^2 lambda_2^2 (T:T), T:T = 4, int = (1/2) 2! 2! 2! / 6! = 1/180
        let t12 = &e.tensor_basis().t[2];
        assert!((t12.frobenius(t12) - 4.0).abs() < 1e-15);
        let theta = TensorPoly::scalar_times(
            &(&BarycentricPoly::lambda(2, 1) * &BarycentricPoly::lambda(2, 2)),
            t12,
        );
        let d = e
            .dofs()
            .iter()
            .find(|d| matches!(&d.kind, crate::elements::DofKind::InteriorBubble { edge: (1, 2), weight } if weight == &vec![0, 1, 0]))
            .unwrap();
        let expect = 4.0 * crate::polynomial::integrate_monomial(&s, &MultiIndex(vec![0, 2, 2]));
        assert!((expect - 4.0 / 180.0).abs() < 1e-16);
        // the DOF's own weight lambda_1 raises the bubble to lambda_1^2 lambda_2
        let expect_w = 4.0 * crate::polynomial::integrate_monomial(&s, &MultiIndex(vec![0, 3, 2]));
        assert!((apply(d, &theta) - expect_w).abs() < 1e-15);
    }

    #[test]
    fn interpolation_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = Simplex::from_vertices(vec![
            vec![0.0, 0.1, 0.0],
            vec![0.9, 0.0, 0.2],
            vec![0.1, 1.1, 0.0],
            vec![0.2, 0.3, 0.8],
        ])
        .unwrap();
        let e = element(s, 4);
        let m = e.len();
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dofs = e.dof_values(&a);
        let back = e.combine(dofs.as_slice());
        let err = back.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }
}
