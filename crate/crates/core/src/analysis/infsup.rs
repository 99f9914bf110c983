use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::assembly::SaddleSystem;
use crate::error::{FemError, Result};

/// Dense problems larger than this are refused.
pub const DENSE_LIMIT: usize = 6000;

fn check_size(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        return Err(FemError::Config(format!("dense eigen solve of size {n} exceeds the limit {DENSE_LIMIT}")));
    }
    Ok(())
}

/// Smallest eigenvalue of the pencil `(G, M)` with `M` symmetric positive definite.
pub fn min_generalized_eigenvalue(g: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<f64> {
    let l = m
        .clone()
        .cholesky()
        .ok_or_else(|| FemError::Eigen("mass matrix is not positive definite".into()))?
        .l();
    let li = l.clone().try_inverse().ok_or_else(|| FemError::Eigen("singular Cholesky factor".into()))?;
    let mut c = &li * g * li.transpose();
    c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, 1e-14, 10_000).ok_or_else(|| FemError::Eigen("no convergence".into()))?;
    Ok(eig.eigenvalues.min())
}

/// Discrete inf-sup constant
/// `beta_h = min_v sup_tau (div tau, v) / (|tau|_{H(div)} |v|)`, the square
/// root of the smallest eigenvalue of `B S^{-1} B^T w = theta Mu w`.
pub fn inf_sup_constant(sys: &SaddleSystem) -> Result<f64> {
    check_size(sys.num_stress())?;
    let s = sys.s.to_dense();
    let b = sys.b.to_dense();
    let chol = s.cholesky().ok_or_else(|| FemError::Eigen("stress norm matrix is not positive definite".into()))?;
    let g = &b * chol.solve(&b.transpose());
    let theta = min_generalized_eigenvalue(&g, &sys.mu.to_dense())?;
    Ok(theta.max(0.0).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCoercivity {
    pub kernel_dim: usize,
    /// `min_{z in ker B} (A z, z) / |z|^2_{H(div)}`
    pub alpha: f64,
}

/// Coercivity of the compliance form on the discrete divergence-free stresses.
pub fn kernel_coercivity(sys: &SaddleSystem) -> Result<KernelCoercivity> {
    let ns = sys.num_stress();
    check_size(ns)?;
    let b = sys.b.to_dense();
    let bbt = &b * b.transpose();
    let p = DMatrix::identity(ns, ns)
        - b.transpose() * bbt.cholesky().ok_or_else(|| FemError::Eigen("B is rank deficient".into()))?.solve(&b);
    let eig = SymmetricEigen::new((&p + p.transpose()) * 0.5);
    let cols: Vec<usize> = (0..ns).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let z = DMatrix::from_fn(ns, cols.len(), |r, c| eig.eigenvectors[(r, cols[c])]);
    if z.ncols() == 0 {
        return Ok(KernelCoercivity { kernel_dim: 0, alpha: f64::INFINITY });
    }
    let za = z.transpose() * sys.a.to_dense() * &z;
    let zs = z.transpose() * sys.s.to_dense() * &z;
    Ok(KernelCoercivity { kernel_dim: z.ncols(), alpha: min_generalized_eigenvalue(&za, &zs)? })
}
