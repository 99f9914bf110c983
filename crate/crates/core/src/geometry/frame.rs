use crate::error::{FemError, Result};

/// Tangent and normal vectors attached to one `l`-dimensional subsimplex.
///
/// Tangents are the unnormalized differences `x_{v_r} - x_{v_0}` over the
/// sorted global vertex tuple. Normals are an orthonormal basis of the
/// orthogonal complement of the tangent span, obtained by Gram–Schmidt on the
/// Cartesian axes in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsimplexFrame {
    pub tangents: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
}

/// Candidates whose residual after projection falls below this are skipped.
const DEPENDENT_CANDIDATE: f64 = 1e-2;

impl SubsimplexFrame {
    /// Frame of the subsimplex spanned by `points` (already in sorted global
    /// vertex order).
    pub fn from_points(points: &[&[f64]]) -> Result<Self> {
        let n = points[0].len();
        let l = points.len() - 1;
        let tangents: Vec<Vec<f64>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect())
            .collect();

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
        for t in &tangents {
            let scale = norm(t);
            let mut v = t.clone();
            orthogonalize(&mut v, &basis);
            let r = norm(&v);
            if !(r > 1e-12 * scale) || scale == 0.0 {
                return Err(FemError::Degenerate {
                    what: format!("subsimplex {points:?}"),
                    det: r,
                });
            }
            v.iter_mut().for_each(|c| *c /= r);
            basis.push(v);
        }
        let mut normals = Vec::with_capacity(n - l);
        for axis in 0..n {
            if normals.len() == n - l {
                break;
            }
            let mut v = vec![0.0; n];
            v[axis] = 1.0;
            orthogonalize(&mut v, &basis);
            let r = norm(&v);
            if r < DEPENDENT_CANDIDATE {
                continue;
            }
            // second pass for numerical orthogonality
            v.iter_mut().for_each(|c| *c /= r);
            orthogonalize(&mut v, &basis);
            let r = norm(&v);
            v.iter_mut().for_each(|c| *c /= r);
            basis.push(v.clone());
            normals.push(v);
        }
        debug_assert_eq!(normals.len(), n - l);
        Ok(Self { tangents, normals })
    }

    pub fn dim(&self) -> usize {
        self.tangents.len()
    }

    /// Component pairs `(a, b)` whose mean moments `a^T tau b` form the DOFs of
    /// this subsimplex: all `(t_l, nu_i)` followed by `(nu_i, nu_j)`, `i <= j`.
    pub fn component_pairs(&self) -> Vec<FramePair> {
        let mut out = Vec::new();
        for l in 0..self.tangents.len() {
            for i in 0..self.normals.len() {
                out.push(FramePair::TangentNormal(l, i));
            }
        }
        for i in 0..self.normals.len() {
            for j in i..self.normals.len() {
                out.push(FramePair::NormalNormal(i, j));
            }
        }
        out
    }

    pub fn pair_vectors(&self, pair: FramePair) -> (&[f64], &[f64]) {
        match pair {
            FramePair::TangentNormal(l, i) => (&self.tangents[l], &self.normals[i]),
            FramePair::NormalNormal(i, j) => (&self.normals[i], &self.normals[j]),
        }
    }
}

/// Which two frame vectors a face-moment DOF pairs with the stress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum FramePair {
    TangentNormal(usize, usize),
    NormalNormal(usize, usize),
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn edge_in_plane() {
        let f = SubsimplexFrame::from_points(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(f.tangents, vec![vec![1.0, 0.0]]);
        assert_eq!(f.normals, vec![vec![0.0, 1.0]]);
        assert_eq!(f.component_pairs().len(), 2);
    }

    #[test]
    fn vertex_frame_is_the_axes() {
        let f = SubsimplexFrame::from_points(&[&[0.3, 0.1, 0.7]]).unwrap();
        assert!(f.tangents.is_empty());
        assert_eq!(f.normals, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(f.component_pairs().len(), 6);
    }

    #[test]
    fn diagonal_edge_in_space() {
        let f = SubsimplexFrame::from_points(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]).unwrap();
        assert_eq!(f.tangents[0], vec![1.0, 1.0, 0.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.normals[0][0] - s).abs() < 1e-15 && (f.normals[0][1] + s).abs() < 1e-15);
        assert!((f.normals[1][2] - 1.0).abs() < 1e-15);
        for nu in &f.normals {
            assert!(dot(nu, &f.tangents[0]).abs() < 1e-14);
        }
        assert!(dot(&f.normals[0], &f.normals[1]).abs() < 1e-15);
        // 1 * 2 tangent-normal pairs + 3 normal-normal pairs
        assert_eq!(f.component_pairs().len(), 5);
    }

    #[test]
    fn degenerate_face() {
        let r = SubsimplexFrame::from_points(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]]);
        assert!(r.is_err());
    }
}
