use nalgebra::DMatrix;

use crate::combinat::factorial_f64;
use crate::error::{FemError, Result};

/// An `n`-simplex in `R^n` with its barycentric coordinate gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    n: usize,
    vertices: Vec<Vec<f64>>,
    measure: f64,
    det: f64,
    /// `grad_lambda[i]` is the constant gradient of `lambda_i`.
    grad_lambda: Vec<Vec<f64>>,
}

impl Simplex {
    /// Builds the simplex from `n + 1` affinely independent points.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.len().saturating_sub(1);
        if n == 0 || vertices.iter().any(|v| v.len() != n) {
            return Err(FemError::Config(format!(
                "a simplex in R^n needs n+1 points of length n, got {} points",
                vertices.len()
            )));
        }
        // columns are x_i - x_0
        let jac = DMatrix::from_fn(n, n, |r, c| vertices[c + 1][r] - vertices[0][r]);
        let det = jac.determinant();
        let scale = (1..=n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| dist(&vertices[i], &vertices[j]))
            .fold(0.0f64, f64::max);
        if !(det.abs() > 1e-13 * scale.powi(n as i32)) {
            return Err(FemError::Degenerate { what: format!("{vertices:?}"), det });
        }
        let inv = jac.try_inverse().ok_or_else(|| FemError::Degenerate {
            what: format!("{vertices:?}"),
            det,
        })?;
        // rows of the inverse Jacobian are the gradients of lambda_1..lambda_n
        let mut grad_lambda = vec![vec![0.0; n]; n + 1];
        for i in 0..n {
            for c in 0..n {
                grad_lambda[i + 1][c] = inv[(i, c)];
                grad_lambda[0][c] -= inv[(i, c)];
            }
        }
        let measure = det.abs() / factorial_f64(n as u32);
        Ok(Self { n, vertices, measure, det, grad_lambda })
    }

    /// The unit reference simplex `conv(0, e_1, ..., e_n)`.
    pub fn reference(n: usize) -> Self {
        let mut verts = vec![vec![0.0; n]];
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            verts.push(v);
        }
        Self::from_vertices(verts).expect("reference simplex is nondegenerate")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Sign of the orientation of the vertex ordering.
    pub fn orientation(&self) -> f64 {
        self.det.signum()
    }

    pub fn grad_lambda(&self) -> &[Vec<f64>] {
        &self.grad_lambda
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..=self.n {
            for j in 0..i {
                d = d.max(dist(&self.vertices[i], &self.vertices[j]));
            }
        }
        d
    }

    pub fn barycentric(&self, x: &[f64]) -> Vec<f64> {
        let x0 = &self.vertices[0];
        let mut lam = vec![0.0; self.n + 1];
        let mut rest = 0.0;
        for i in 1..=self.n {
            lam[i] = dot_diff(&self.grad_lambda[i], x, x0);
            rest += lam[i];
        }
        lam[0] = 1.0 - rest;
        lam
    }

    pub fn point(&self, lambda: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (l, v) in lambda.iter().zip(&self.vertices) {
            for (xc, vc) in x.iter_mut().zip(v) {
                *xc += l * vc;
            }
        }
        x
    }

    pub fn barycenter(&self) -> Vec<f64> {
        self.point(&vec![1.0 / (self.n + 1) as f64; self.n + 1])
    }

    /// Unnormalized edge tangent `t_{i,j} = x_j - x_i`.
    pub fn tangent(&self, i: usize, j: usize) -> Vec<f64> {
        self.vertices[j].iter().zip(&self.vertices[i]).map(|(a, b)| a - b).collect()
    }

    /// All tangents `t_{i,j}`, `i < j`, in lexicographic order of `(i, j)`.
    pub fn edge_tangents(&self) -> Vec<((usize, usize), Vec<f64>)> {
        edge_pairs(self.n)
            .into_iter()
            .map(|(i, j)| ((i, j), self.tangent(i, j)))
            .collect()
    }

    /// Shape quality `n! |K| / diam^n`; tends to 0 as the simplex degenerates.
    pub fn quality(&self) -> f64 {
        let factorial: f64 = (1..=self.n).map(|i| i as f64).product();
        factorial * self.measure / self.diameter().powi(self.n as i32)
    }

    /// Outward unit normal of the facet opposite vertex `i`.
    pub fn facet_normal(&self, i: usize) -> Vec<f64> {
        let g = &self.grad_lambda[i];
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.iter().map(|v| -v / norm).collect()
    }
}

/// Simplex with vertices drawn uniformly from `[0, 1]^n`, redrawn until its
/// quality exceeds `min_quality`.
pub fn random_simplex(n: usize, min_quality: f64, rng: &mut impl rand::Rng) -> Simplex {
    loop {
        let verts = (0..=n).map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        if let Ok(s) = Simplex::from_vertices(verts) {
            if s.quality() > min_quality {
                return s;
            }
        }
    }
}

/// Pairs `(i, j)` with `0 <= i < j <= n` in lexicographic order.
pub fn edge_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn dot_diff(g: &[f64], x: &[f64], x0: &[f64]) -> f64 {
    g.iter().zip(x.iter().zip(x0)).map(|(g, (a, b))| g * (a - b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_triangle() {
        let s = Simplex::reference(2);
        assert_eq!(s.grad_lambda()[1], vec![1.0, 0.0]);
        assert_eq!(s.grad_lambda()[2], vec![0.0, 1.0]);
        assert_eq!(s.grad_lambda()[0], vec![-1.0, -1.0]);
        assert_relative_eq!(s.measure(), 0.5);
        let t = s.edge_tangents();
        assert_eq!(t[0], ((0, 1), vec![1.0, 0.0]));
        assert_eq!(t[1], ((0, 2), vec![0.0, 1.0]));
        assert_eq!(t[2], ((1, 2), vec![-1.0, 1.0]));
    }

    #[test]
    fn reference_tetrahedron() {
        let s = Simplex::reference(3);
        assert_relative_eq!(s.measure(), 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(s.tangent(1, 2), vec![-1.0, 1.0, 0.0]);
        assert_eq!(s.tangent(2, 1), vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn scaling_rule() {
        let s = Simplex::reference(2);
        let big = Simplex::from_vertices(
            s.vertices().iter().map(|v| v.iter().map(|c| 2.0 * c).collect()).collect(),
        )
        .unwrap();
        assert_relative_eq!(big.measure(), 4.0 * s.measure());
        for (g, h) in big.grad_lambda().iter().zip(s.grad_lambda()) {
            for (a, b) in g.iter().zip(h) {
                assert_relative_eq!(*a, 0.5 * b);
            }
        }
    }

    #[test]
    fn barycentric_of_vertices_is_kronecker() {
        let s = Simplex::from_vertices(vec![
            vec![0.1, 0.2, -0.3],
            vec![1.3, 0.1, 0.0],
            vec![0.2, 0.9, 0.4],
            vec![0.0, 0.3, 1.1],
        ])
        .unwrap();
        for j in 0..4 {
            let lam = s.barycentric(s.vertex(j));
            for (i, l) in lam.iter().enumerate() {
                assert!((l - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let g_sum: Vec<f64> = (0..3).map(|c| s.grad_lambda().iter().map(|g| g[c]).sum()).collect();
        assert!(g_sum.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn degenerate_is_rejected() {
        let r = Simplex::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(r, Err(FemError::Degenerate { .. })));
    }

    #[test]
    fn outward_normals() {
        let s = Simplex::reference(2);
        let nu = s.facet_normal(1);
        assert_relative_eq!(nu[0], -1.0);
        assert_relative_eq!(nu[1], 0.0);
        let nu0 = s.facet_normal(0);
        assert_relative_eq!(nu0[0], std::f64::consts::FRAC_1_SQRT_2);
    }
}
