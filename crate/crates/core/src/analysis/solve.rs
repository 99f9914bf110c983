use faer::prelude::*;
use serde::Serialize;

use crate::assembly::SaddleSystem;
use crate::error::{FemError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SaddleSolution {
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
    /// `|K x - b| / |b|` (absolute when `b = 0`).
    pub residual: f64,
    /// `|B sigma - F| / |F|`.
    pub equilibrium_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative(r: &[f64], b: &[f64]) -> f64 {
    let nb = norm(b);
    if nb > 0.0 {
        norm(r) / nb
    } else {
        norm(r)
    }
}

/// Solves the block system with a sparse LU factorization and one step of
/// iterative refinement.
pub fn solve_saddle(sys: &SaddleSystem) -> Result<SaddleSolution> {
    let k = sys.block_matrix();
    let rhs = sys.block_rhs();
    let lu = k
        .to_faer()?
        .sp_lu()
        .map_err(|e| FemError::Singular { what: "saddle-point matrix".into(), detail: format!("{e:?}") })?;
    let solve = |b: &[f64]| -> Vec<f64> {
        let col = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        let x = lu.solve(&col);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    };
    let mut x = solve(&rhs);
    let resid = |x: &[f64]| -> Vec<f64> { k.matvec(x).iter().zip(&rhs).map(|(a, b)| b - a).collect() };
    let r = resid(&x);
    let dx = solve(&r);
    x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
    let residual = relative(&resid(&x), &rhs);
    if !residual.is_finite() {
        return Err(FemError::Singular { what: "saddle-point matrix".into(), detail: "non-finite solution".into() });
    }
    let ns = sys.num_stress();
    let u = x.split_off(ns);
    let bs = sys.b.matvec(&x);
    let eq: Vec<f64> = bs.iter().zip(&sys.rhs_f).map(|(a, b)| a - b).collect();
    Ok(SaddleSolution { equilibrium_residual: relative(&eq, &sys.rhs_f), sigma: x, u, residual })
}
