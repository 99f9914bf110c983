use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinat::compositions;
use crate::error::{FemError, Result};
use crate::fields::CartesianPoly;
use crate::symtensor::{packed_pairs, Compliance};

/// A polynomial displacement with the stress and body force it induces:
/// `sigma = 2 mu eps(u) + lambda tr(eps(u)) I`, `f = div sigma`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManufacturedSolution {
    pub n: usize,
    pub compliance: Compliance,
    pub u: Vec<CartesianPoly>,
    /// Packed components.
    pub sigma: Vec<CartesianPoly>,
    pub f: Vec<CartesianPoly>,
}

impl ManufacturedSolution {
    pub fn from_displacement(u: Vec<CartesianPoly>, compliance: Compliance) -> Result<Self> {
        let n = u.len();
        if n == 0 || u.iter().any(|p| p.dim() != n) {
            return Err(FemError::Config("displacement needs n components in n variables".into()));
        }
        let eps = |i: usize, j: usize| {
            let mut e = u[i].derivative(j).scale(0.5);
            e.axpy(0.5, &u[j].derivative(i));
            e
        };
        let mut trace = CartesianPoly::zero(n);
        for i in 0..n {
            trace.axpy(1.0, &eps(i, i));
        }
        let sigma: Vec<CartesianPoly> = packed_pairs(n)
            .into_iter()
            .map(|(i, j)| {
                let mut s = eps(i, j).scale(2.0 * compliance.mu);
                if i == j {
                    s.axpy(compliance.lambda, &trace);
                }
                s
            })
            .collect();
        let f = (0..n)
            .map(|i| {
                let mut fi = CartesianPoly::zero(n);
                for j in 0..n {
                    fi.axpy(1.0, &sigma[crate::symtensor::packed_index(n, i, j)].derivative(j));
                }
                fi
            })
            .collect();
        Ok(Self { n, compliance, u, sigma, f })
    }

    pub fn sigma_at(&self, x: &[f64]) -> Vec<f64> {
        self.sigma.iter().map(|p| p.eval(x)).collect()
    }

    pub fn u_at(&self, x: &[f64]) -> Vec<f64> {
        self.u.iter().map(|p| p.eval(x)).collect()
    }

    pub fn f_at(&self, x: &[f64]) -> Vec<f64> {
        self.f.iter().map(|p| p.eval(x)).collect()
    }

    pub fn degree(&self) -> u32 {
        self.u.iter().map(CartesianPoly::degree).max().unwrap_or(0)
    }
}

/// `prod_j x_j (1 - x_j)`, vanishing on the boundary of the unit cube.
pub fn cube_bubble(n: usize) -> CartesianPoly {
    let mut b = CartesianPoly::constant(n, 1.0);
    for j in 0..n {
        let mut e = vec![0; n];
        e[j] = 1;
        let mut f = CartesianPoly::from_terms(n, [(e.clone(), 1.0)]);
        e[j] = 2;
        f.add_term(e, -1.0);
        b = b.mul(&f);
    }
    b
}

/// Random polynomial of total degree `degree` with coefficients in `[-1, 1]`.
pub fn random_poly(n: usize, degree: usize, rng: &mut impl Rng) -> CartesianPoly {
    let terms = (0..=degree).flat_map(|d| compositions(n, d)).map(|e| (e, rng.random_range(-1.0..1.0)));
    CartesianPoly::from_terms(n, terms.collect::<Vec<_>>())
}

/// Manufactured solution `u_i = cube_bubble * p_i` with random `p_i` of degree
/// `max(k + 2 - 2n, 0)`, so that `u` has degree `k + 2` and the stress lies
/// outside the discrete space.
pub fn manufactured_solution(n: usize, k: usize, compliance: Compliance, seed: u64) -> Result<ManufacturedSolution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bubble = cube_bubble(n);
    let degree = (k + 2).saturating_sub(2 * n);
    let u = (0..n).map(|_| bubble.mul(&random_poly(n, degree, &mut rng))).collect();
    ManufacturedSolution::from_displacement(u, compliance)
}
