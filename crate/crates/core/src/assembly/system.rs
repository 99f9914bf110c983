use std::io;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::sparse::{CsrMatrix, TripletBuilder};
use super::space::StressSpace;
use crate::elements::StressElement;
use crate::fields::CartesianPoly;
use crate::polynomial::integrate_monomial;
use crate::symtensor::{packed_len, packed_weight, Compliance};

/// Global matrices of the mixed problem
/// `[A B^T; B 0] [sigma; u] = [0; F]`, together with the stress norm
/// matrix `S` (L^2 plus divergence Gram) and the displacement mass `Mu`.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub s: CsrMatrix,
    pub mu: CsrMatrix,
    pub rhs_f: Vec<f64>,
}

impl SaddleSystem {
    pub fn num_stress(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_displacement(&self) -> usize {
        self.b.nrows()
    }

    /// The full symmetric block matrix.
    pub fn block_matrix(&self) -> CsrMatrix {
        let ns = self.num_stress();
        let n = ns + self.num_displacement();
        let mut t = TripletBuilder::new(n, n);
        for (r, c, v) in self.a.triplets() {
            t.push(r, c, v);
        }
        for (r, c, v) in self.b.triplets() {
            t.push(ns + r, c, v);
            t.push(c, ns + r, v);
        }
        t.build()
    }

    pub fn block_rhs(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.num_stress()];
        r.extend_from_slice(&self.rhs_f);
        r
    }

    /// Writes `A.mtx`, `B.mtx`, `S.mtx` and `Mu.mtx` into `dir`.
    pub fn write_matrix_market(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, m) in [("A", &self.a), ("B", &self.b), ("S", &self.s), ("Mu", &self.mu)] {
            let f = std::fs::File::create(dir.join(format!("{name}.mtx")))?;
            m.write_matrix_market(io::BufWriter::new(f))?;
        }
        Ok(())
    }
}

/// Gram matrix of the spanning set of `el` under the packed tensor form `c`,
/// i.e. `int (C E_s lambda^a) : (E_t lambda^b)`.
pub fn spanning_gram(el: &StressElement, c: &DMatrix<f64>) -> DMatrix<f64> {
    let monos = el.monomials();
    let nm = monos.len();
    let scalar = monomial_gram(el, monos);
    let slots = c.nrows();
    let mut g = DMatrix::zeros(slots * nm, slots * nm);
    for s in 0..slots {
        for t in 0..slots {
            if c[(s, t)] != 0.0 {
                g.view_mut((s * nm, t * nm), (nm, nm)).copy_from(&(&scalar * c[(s, t)]));
            }
        }
    }
    g
}

fn monomial_gram(el: &StressElement, monos: &[crate::polynomial::MultiIndex]) -> DMatrix<f64> {
    let nm = monos.len();
    let mut g = DMatrix::zeros(nm, nm);
    for i in 0..nm {
        for j in i..nm {
            let v = integrate_monomial(el.simplex(), &monos[i].add(&monos[j]));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Packed form of the Frobenius product.
pub fn frobenius_packed(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(packed_len(n), packed_len(n), |a, b| if a == b { packed_weight(n, a) } else { 0.0 })
}

/// Local contributions of one cell.
#[derive(Debug, Clone)]
pub struct LocalMatrices {
    pub a: DMatrix<f64>,
    /// `dim V_K x dim Sigma_K`
    pub b: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub mu: DMatrix<f64>,
    pub f: DVector<f64>,
}

pub fn local_matrices(space: &StressSpace, cell: usize, compliance: &Compliance, force: &[CartesianPoly]) -> LocalMatrices {
    let el = &space.stress[cell];
    let v = &space.displacement[cell];
    let n = el.dim();
    let x = el.shape_coefficients();
    let a = x.transpose() * spanning_gram(el, &compliance.packed_matrix(n)) * x;
    let l2 = x.transpose() * spanning_gram(el, &frobenius_packed(n)) * x;
    let mu = v.mass();
    let dx = v.divergence_matrix(el) * x;
    let b = &mu * &dx;
    let s = l2 + dx.transpose() * &b;

    let nm = v.monomials().len();
    let mut f = DVector::zeros(v.len());
    for (r, fr) in force.iter().enumerate() {
        let p = fr.to_barycentric(el.simplex());
        for (m, alpha) in v.monomials().iter().enumerate() {
            f[r * nm + m] = p.terms().map(|(beta, c)| c * integrate_monomial(el.simplex(), &alpha.add(beta))).sum();
        }
    }
    LocalMatrices { a, b, s, mu, f }
}

/// Assembles the global system for body force `force` (one Cartesian
/// polynomial per component).
pub fn assemble_system(space: &StressSpace, compliance: &Compliance, force: &[CartesianPoly]) -> SaddleSystem {
    let cells = space.mesh.num_cells();
    // local work in parallel, scatter in cell order
    let locals: Vec<LocalMatrices> =
        (0..cells).into_par_iter().map(|c| local_matrices(space, c, compliance, force)).collect();
    let (ns, nu) = (space.num_stress(), space.num_displacement());
    let mut a = TripletBuilder::new(ns, ns);
    let mut b = TripletBuilder::new(nu, ns);
    let mut s = TripletBuilder::new(ns, ns);
    let mut mu = TripletBuilder::new(nu, nu);
    let mut rhs_f = vec![0.0; nu];
    for (c, loc) in locals.iter().enumerate() {
        let sd = space.dofmap.cell_stress(c);
        let vd: Vec<usize> = space.dofmap.cell_displacement(c).collect();
        a.add_block(sd, sd, &loc.a);
        s.add_block(sd, sd, &loc.s);
        b.add_block(&vd, sd, &loc.b);
        mu.add_block(&vd, &vd, &loc.mu);
        for (i, &g) in vd.iter().enumerate() {
            rhs_f[g] += loc.f[i];
        }
    }
    SaddleSystem { a: a.build(), b: b.build(), s: s.build(), mu: mu.build(), rhs_f }
}
