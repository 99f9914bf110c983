//! Symmetric `n x n` matrices in packed storage, the rank-one tangent basis
//! `T_{i,j} = t_{i,j} t_{i,j}^T` of a simplex and its Frobenius dual basis,
//! and the isotropic compliance operator.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{FemError, Result};
use crate::geometry::{edge_pairs, Simplex};

/// Number of independent entries of a symmetric `n x n` matrix.
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of entry `(i, j)` in row-major upper-triangular storage.
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows above i hold n, n-1, ..., n-i+1 entries
    i * n - i * (i.saturating_sub(1)) / 2 + (j - i)
}

/// `(i, j)` with `i <= j` for every packed slot, in storage order.
pub fn packed_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

/// Frobenius weight of a packed slot: 1 on the diagonal, 2 off it.
pub fn packed_weight(n: usize, slot: usize) -> f64 {
    let (i, j) = packed_pairs(n)[slot];
    if i == j {
        1.0
    } else {
        2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymTensor {
    n: usize,
    packed: Vec<f64>,
}

impl SymTensor {
    pub fn zeros(n: usize) -> Self {
        Self { n, packed: vec![0.0; packed_len(n)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            t.set(i, i, 1.0);
        }
        t
    }

    pub fn from_packed(n: usize, packed: Vec<f64>) -> Self {
        assert_eq!(packed.len(), packed_len(n));
        Self { n, packed }
    }

    /// Takes the upper triangle of a full matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut t = Self::zeros(n);
        for (i, j) in packed_pairs(n) {
            t.set(i, j, rows[i][j]);
        }
        t
    }

    /// Canonical unit tensor with ones at `(p, q)` and `(q, p)`.
    pub fn unit(n: usize, p: usize, q: usize) -> Self {
        let mut t = Self::zeros(n);
        t.set(p, q, 1.0);
        t
    }

    /// `v v^T`
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let packed = packed_pairs(n).into_iter().map(|(i, j)| v[i] * v[j]).collect();
        Self { n, packed }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.n, i, j);
        self.packed[k] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `self : other = sum_ij a_ij b_ij`
    pub fn frobenius(&self, other: &Self) -> f64 {
        packed_pairs(self.n)
            .iter()
            .zip(self.packed.iter().zip(&other.packed))
            .map(|(&(i, j), (a, b))| if i == j { a * b } else { 2.0 * a * b })
            .sum()
    }

    /// `a^T self b`
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += a[i] * self.get(i, j) * b[j];
            }
        }
        acc
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, packed: self.packed.iter().map(|v| v * c).collect() }
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        self.packed.iter_mut().zip(&other.packed).for_each(|(a, b)| *a += c * b);
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Rank-one tangent tensors of a simplex and, once computed, their dual basis.
#[derive(Debug, Clone, Serialize)]
pub struct TensorBasis {
    pub n: usize,
    /// Edge pairs `(i, j)`, `i < j`, indexing `t` and `m`.
    pub pairs: Vec<(usize, usize)>,
    pub t: Vec<SymTensor>,
    pub m: Vec<SymTensor>,
    /// Condition number of the packed coordinate matrix of `t`.
    pub gram_condition: f64,
}

impl TensorBasis {
    pub fn index_of(&self, i: usize, j: usize) -> usize {
        self.pairs.iter().position(|&p| p == (i, j)).expect("valid edge pair")
    }

    /// Max deviation of `T_{i,j} : M_{k,l}` from the Kronecker symbol.
    pub fn duality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, t) in self.t.iter().enumerate() {
            for (b, m) in self.m.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((t.frobenius(m) - target).abs());
            }
        }
        worst
    }
}

/// Packed coordinates of the tensors as columns.
fn coordinate_matrix(n: usize, ts: &[SymTensor]) -> DMatrix<f64> {
    DMatrix::from_fn(packed_len(n), ts.len(), |r, c| ts[c].packed()[r])
}

/// Singular values of the tensors written in an orthonormal coordinate
/// system of `S` (off-diagonal slots scaled by `sqrt 2`).
fn orthonormal_singular_values(n: usize, ts: &[SymTensor]) -> Vec<f64> {
    let mut c = coordinate_matrix(n, ts);
    for (r, (i, j)) in packed_pairs(n).into_iter().enumerate() {
        if i != j {
            c.row_mut(r).scale_mut(std::f64::consts::SQRT_2);
        }
    }
    let mut sv: Vec<f64> = c.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// `T_{i,j} = t_{i,j} t_{i,j}^T` for all edges of `s`, checked for linear
/// independence.
pub fn rank_one_tangent_tensors(s: &Simplex) -> Result<TensorBasis> {
    let n = s.dim();
    let pairs = edge_pairs(n);
    let t: Vec<SymTensor> = pairs.iter().map(|&(i, j)| SymTensor::outer(&s.tangent(i, j))).collect();
    let sv = orthonormal_singular_values(n, &t);
    let (max, min) = (sv[0], *sv.last().unwrap());
    if !(min > 1e-12 * max) {
        return Err(FemError::Degenerate {
            what: format!("tangent tensors of simplex {:?}", s.vertices()),
            det: min / max,
        });
    }
    Ok(TensorBasis { n, pairs, t, m: Vec::new(), gram_condition: max / min })
}

/// Smallest over largest singular value of the `T_{i,j}` built from unit
/// tangents.
pub fn tangent_independence(s: &Simplex) -> f64 {
    let n = s.dim();
    let t: Vec<SymTensor> = edge_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let v = s.tangent(i, j);
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            SymTensor::outer(&v.iter().map(|x| x / len).collect::<Vec<_>>())
        })
        .collect();
    let sv = orthonormal_singular_values(n, &t);
    sv.last().unwrap() / sv[0]
}

/// Solves `T_{i,j} : M_{k,l} = delta` for the dual tensors.
pub fn dual_basis(mut basis: TensorBasis) -> Result<TensorBasis> {
    let n = basis.n;
    let len = packed_len(n);
    // (W C)^T M = I with W the Frobenius weights
    let mut wc = coordinate_matrix(n, &basis.t);
    for r in 0..len {
        wc.row_mut(r).scale_mut(packed_weight(n, r));
    }
    let m = wc
        .transpose()
        .lu()
        .solve(&DMatrix::identity(len, len))
        .ok_or_else(|| FemError::Singular {
            what: "tangent tensor duality system".into(),
            detail: format!("n = {n}"),
        })?;
    basis.m = (0..len).map(|c| SymTensor::from_packed(n, m.column(c).iter().copied().collect())).collect();
    Ok(basis)
}

/// Homogeneous isotropic compliance
/// `A tau = (tau - lambda / (2 mu + n lambda) tr(tau) I) / (2 mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Compliance {
    pub mu: f64,
    pub lambda: f64,
}

impl Compliance {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(FemError::Config(format!("shear modulus mu must be positive, got {mu}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(FemError::Config(format!("Lame lambda must be nonnegative, got {lambda}")));
        }
        Ok(Self { mu, lambda })
    }

    pub fn apply(&self, tau: &SymTensor) -> SymTensor {
        let n = tau.dim() as f64;
        let c = self.lambda / (2.0 * self.mu + n * self.lambda);
        let mut out = tau.clone();
        out.axpy(-c * tau.trace(), &SymTensor::identity(tau.dim()));
        out.scaled(0.5 / self.mu)
    }

    /// Inverse map `eps -> 2 mu eps + lambda tr(eps) I`.
    pub fn apply_inverse(&self, eps: &SymTensor) -> SymTensor {
        let mut out = eps.scaled(2.0 * self.mu);
        out.axpy(self.lambda * eps.trace(), &SymTensor::identity(eps.dim()));
        out
    }

    /// Matrix of `(A E_a) : E_b` over the packed unit tensors.
    pub fn packed_matrix(&self, n: usize) -> DMatrix<f64> {
        let units: Vec<SymTensor> = packed_pairs(n).into_iter().map(|(p, q)| SymTensor::unit(n, p, q)).collect();
        DMatrix::from_fn(units.len(), units.len(), |a, b| self.apply(&units[a]).frobenius(&units[b]))
    }
}

pub fn compliance_apply(tau: &SymTensor, mu: f64, lambda: f64) -> Result<SymTensor> {
    Ok(Compliance::new(mu, lambda)?.apply(tau))
}
