//! Exact integer combinatorics for dimension counting.
//!
//! Everything here is `u128` arithmetic. The counts gate the unisolvence and
//! lattice checks elsewhere in the crate, so no floating point is involved.

use serde::Serialize;

use crate::error::{FemError, Result};

/// Binomial coefficient `C(n, m)`, zero outside `0 <= m <= n`.
pub fn binomial(n: u64, m: i64) -> u128 {
    if m < 0 || m as u64 > n {
        return 0;
    }
    let m = (m as u64).min(n - m as u64);
    let mut acc: u128 = 1;
    for i in 0..m {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dimensions of every space involved in the degree-`k` element on an
/// `n`-simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimReport {
    pub n: usize,
    pub k: usize,
    pub dim_pk_scalar: u128,
    pub dim_sym: u128,
    pub dim_pk_sym: u128,
    pub dim_bubble: u128,
    /// Indexed by subsimplex dimension `0..n`.
    pub dof_per_subsimplex: Vec<u128>,
    pub dim_v_local: u128,
    pub dim_rigid: u128,
}

impl DimReport {
    /// Total local DOF count obtained by summing over all subsimplices of one
    /// cell plus the interior bubbles.
    pub fn dof_partition_sum(&self) -> u128 {
        let n = self.n as u64;
        let faces: u128 = self
            .dof_per_subsimplex
            .iter()
            .enumerate()
            .map(|(l, &d)| binomial(n + 1, l as i64 + 1) * d)
            .sum();
        faces + self.dim_bubble
    }
}

/// Number of stress DOFs attached to one `l`-dimensional subsimplex.
pub fn dofs_on_subsimplex(n: usize, k: usize, l: usize) -> u128 {
    let (n, k, l) = (n as u128, k as u64, l as u128);
    (n - l) * (n + l + 1) / 2 * binomial(k - 1, l as i64)
}

pub fn dim_report(n: usize, k: usize) -> Result<DimReport> {
    if n < 1 {
        return Err(FemError::Config(format!("dimension must be >= 1, got {n}")));
    }
    if k < 2 {
        return Err(FemError::Config(format!(
            "degree must be >= 2 for the bubble space, got {k}"
        )));
    }
    let (nu, ku) = (n as u64, k as u64);
    let dim_sym = (n * (n + 1) / 2) as u128;
    let dim_pk_scalar = binomial(nu + ku, n as i64);
    Ok(DimReport {
        n,
        k,
        dim_pk_scalar,
        dim_sym,
        dim_pk_sym: dim_sym * dim_pk_scalar,
        dim_bubble: dim_sym * binomial(nu + ku - 2, n as i64),
        dof_per_subsimplex: (0..n).map(|l| dofs_on_subsimplex(n, k, l)).collect(),
        dim_v_local: nu as u128 * binomial(nu + ku - 1, n as i64),
        dim_rigid: dim_sym,
    })
}

/// Both sides of one combinatorial identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub lhs: u128,
    pub rhs: u128,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates the Chu–Vandermonde identity
/// `sum_l C(n+1,l+1) C(k-1,l) = C(n+k,n)` and its weighted variant
/// `sum_l C(n+1,l+1) C(k-1,l) C(l+1,2) = n(n+1)/2 C(n+k-2,n)` by direct summation.
pub fn verify_chu_vandermonde(n: usize, k: usize) -> (IdentityCheck, IdentityCheck) {
    let (nu, ku) = (n as u64, k as u64);
    let term = |l: u64| binomial(nu + 1, l as i64 + 1) * binomial(ku - 1, l as i64);
    let first = IdentityCheck {
        lhs: (0..=nu).map(term).sum(),
        rhs: binomial(nu + ku, n as i64),
    };
    // C(n+k-2, n) with k = 1 is C(n-1, n) = 0
    let second = IdentityCheck {
        lhs: (0..=nu).map(|l| term(l) * binomial(l + 1, 2)).sum(),
        rhs: (n * (n + 1) / 2) as u128 * binomial(nu + ku - 2, n as i64),
    };
    (first, second)
}

/// All multi-indices of length `len` with entries summing to `degree`, in
/// lexicographically decreasing order of the leading entries.
pub fn compositions(len: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left as u32;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v as u32;
            rec(pos + 1, left - v, cur, out);
        }
    }
    if len == 0 {
        return if degree == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut cur = vec![0; len];
    rec(0, degree, &mut cur, &mut out);
    out
}

/// All `size`-element subsets of `0..set`, each ascending, in lexicographic
/// order.
pub fn subsets(set: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, set: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..set {
            if set - v < size - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, set, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, set, size, &mut Vec::with_capacity(size), &mut out);
    out
}

/// `n!` as a float; exact for `n <= 22`.
pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial_u128(n: u64) -> u128 {
        (1..=n as u128).product()
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(3, -1), 0);
        // factorial oracle
        assert_eq!(binomial(7, 3), factorial_u128(7) / (factorial_u128(3) * factorial_u128(4)));
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn pascal_rule() {
        for n in 1..40u64 {
            for m in -2..(n as i64 + 3) {
                assert_eq!(binomial(n, m), binomial(n - 1, m - 1) + binomial(n - 1, m));
            }
        }
    }

    #[test]
    fn dim_report_examples() {
        let r = dim_report(2, 3).unwrap();
        assert_eq!(r.dim_pk_sym, 30);
        assert_eq!(r.dof_per_subsimplex, vec![3, 4]);
        assert_eq!(r.dim_bubble, 9);
        assert_eq!(r.dim_v_local, 12);

        let r = dim_report(3, 4).unwrap();
        assert_eq!(r.dim_pk_sym, 210);
        assert_eq!(r.dof_per_subsimplex, vec![6, 15, 9]);
        assert_eq!(r.dim_bubble, 60);

        let r = dim_report(1, 2).unwrap();
        assert_eq!(r.dim_pk_sym, 3);
        assert_eq!(r.dof_per_subsimplex, vec![1]);
        assert_eq!(r.dim_bubble, 1);
        assert_eq!(r.dim_rigid, 1);
    }

    #[test]
    fn dim_report_rejects_low_degree() {
        assert!(matches!(dim_report(2, 1), Err(FemError::Config(_))));
        assert!(dim_report(0, 3).is_err());
    }

    #[test]
    fn chu_vandermonde_examples() {
        let (a, b) = verify_chu_vandermonde(2, 3);
        assert_eq!((a.lhs, a.rhs), (10, 10));
        assert_eq!((b.lhs, b.rhs), (9, 9));
        let (a, b) = verify_chu_vandermonde(1, 1);
        assert!(a.holds() && b.holds());
    }

    #[test]
    fn partition_sum_matches_dimension() {
        for n in 1..=8 {
            for k in 2..=12 {
                let r = dim_report(n, k).unwrap();
                assert_eq!(r.dof_partition_sum(), r.dim_pk_sym, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn compositions_and_subsets_count() {
        for len in 1..5 {
            for d in 0..6 {
                let c = compositions(len, d);
                assert_eq!(c.len() as u128, binomial((len - 1 + d) as u64, (len - 1) as i64));
                assert!(c.iter().all(|a| a.iter().sum::<u32>() as usize == d));
            }
        }
        assert_eq!(subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
    }
}
