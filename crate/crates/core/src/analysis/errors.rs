use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::mms::ManufacturedSolution;
use crate::assembly::StressSpace;
use crate::error::Result;
use crate::polynomial::gm_quadrature;
use crate::symtensor::{packed_len, packed_weight};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub e_sigma_l2: f64,
    pub e_sigma_div: f64,
    pub e_sigma_hdiv: f64,
    pub e_u_l2: f64,
}

/// Divergence of the discrete stress on `cell` as displacement coefficients.
pub fn cell_divergence(space: &StressSpace, cell: usize, sigma: &[f64]) -> DVector<f64> {
    let c = space.cell_coefficients(cell, sigma);
    space.displacement[cell].divergence_matrix(&space.stress[cell]) * c
}

/// Errors of `(sigma_h, u_h)` against the exact solution, with quadrature
/// exact for the squared error integrands.
pub fn error_norms(space: &StressSpace, sigma: &[f64], u: &[f64], exact: &ManufacturedSolution) -> Result<ErrorNorms> {
    let n = space.mesh.dim();
    let deg = 2 * (exact.degree() as usize).max(space.degree());
    let quad = gm_quadrature(n, deg)?;
    let per_cell: Vec<[f64; 3]> = (0..space.mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let s = space.mesh.simplex(c);
            let coeffs = space.cell_coefficients(c, sigma);
            let div = cell_divergence(space, c, sigma);
            let ur = space.dofmap.cell_displacement(c);
            let v = &space.displacement[c];
            let mut acc = [0.0; 3];
            for (lam, w) in &quad {
                let x = s.point(lam);
                let sh = space.stress[c].eval_coefficients(coeffs.as_slice(), lam);
                let se = exact.sigma_at(&x);
                acc[0] += w * (0..packed_len(n))
                    .map(|slot| packed_weight(n, slot) * (sh.packed()[slot] - se[slot]).powi(2))
                    .sum::<f64>();
                let dh = v.eval(div.as_slice(), lam);
                acc[1] += w * exact.f_at(&x).iter().zip(&dh).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                let uh = v.eval(&u[ur.clone()], lam);
                acc[2] += w * exact.u_at(&x).iter().zip(&uh).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            }
            acc.map(|a| a * s.measure())
        })
        .collect();
    let sum = per_cell.iter().fold([0.0; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
    Ok(ErrorNorms {
        e_sigma_l2: sum[0].sqrt(),
        e_sigma_div: sum[1].sqrt(),
        e_sigma_hdiv: (sum[0] + sum[1]).sqrt(),
        e_u_l2: sum[2].sqrt(),
    })
}

/// `max_K |div sigma_h - Pi_V f| / max_K |Pi_V f|` in coefficient norm, with
/// `Pi_V f` obtained from the local load vector and mass matrix.
pub fn equilibrium_defect(space: &StressSpace, sigma: &[f64], load: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..space.mesh.num_cells() {
        let div = cell_divergence(space, c, sigma);
        let r = space.dofmap.cell_displacement(c);
        let f = DVector::from_column_slice(&load[r]);
        let proj = space.displacement[c].mass().cholesky().expect("mass matrix is SPD").solve(&f);
        worst = worst.max((&div - &proj).amax());
        scale = scale.max(proj.amax());
    }
    if scale > 0.0 { worst / scale } else { worst }
}
