use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use hdivsym::combinat::{dim_report, verify_chu_vandermonde};
use hdivsym::elements::{apply_dof, check_bubble_equivalence, check_div_bubble_range, CellFrames, StressElement};
use hdivsym::geometry::{random_simplex, Simplex};
use hdivsym::symtensor::{dual_basis, rank_one_tangent_tensors, tangent_independence};

use crate::config::RunConfig;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct Claim {
    pub name: &'static str,
    pub passed: bool,
    pub measured: Value,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub claims: Vec<Claim>,
    pub passed: bool,
}

const MIN_QUALITY: f64 = 1e-3;

fn element(s: &Simplex, k: usize) -> hdivsym::Result<StressElement> {
    StressElement::new(s.clone(), CellFrames::for_simplex(s)?, k)
}

pub fn run(config: &RunConfig) -> CliResult<VerifyReport> {
    let (n, k) = config.dim_degree()?;
    let report = dim_report(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let simplices: Vec<Simplex> = (0..config.simplices.max(1)).map(|_| random_simplex(n, MIN_QUALITY, &mut rng)).collect();
    let mut claims = Vec::new();

    let (first, second) = verify_chu_vandermonde(n, k);
    claims.push(Claim {
        name: "dimension_identities",
        passed: first.holds() && second.holds() && report.dof_partition_sum() == report.dim_pk_sym,
        measured: json!({ "sum_identity": first, "weighted_identity": second, "report": report }),
    });

    let mut min_ratio = f64::INFINITY;
    let mut duality: f64 = 0.0;
    for s in &simplices {
        min_ratio = min_ratio.min(tangent_independence(s));
        duality = duality.max(dual_basis(rank_one_tangent_tensors(s)?)?.duality_residual());
    }
    claims.push(Claim {
        name: "tangent_tensor_basis",
        passed: min_ratio > 1e-8 && duality < 1e-10,
        measured: json!({ "min_singular_ratio": min_ratio, "max_duality_residual": duality }),
    });

    let mut worst_uni: f64 = 0.0;
    let mut worst_interp: f64 = 0.0;
    let mut worst_cond: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    let mut elements = Vec::with_capacity(simplices.len());
    for (i, s) in simplices.iter().enumerate() {
        let el = element(s, k)?;
        worst_uni = worst_uni.max(el.unisolvence_residual());
        worst_cond = worst_cond.max(el.vandermonde_condition());
        let m = el.spanning_labels().len();
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back = el.combine(el.dof_values(&a).as_slice());
        worst_interp = back.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(worst_interp, f64::max);
        if config.exact_cross_checks && i == 0 {
            worst_cross = cross_check(&el);
        }
        elements.push(el);
    }
    claims.push(Claim {
        name: "unisolvence",
        passed: worst_uni < 1e-8 && worst_interp < 1e-7 && worst_cross < 1e-10,
        measured: json!({
            "max_dual_residual": worst_uni,
            "max_interpolation_residual": worst_interp,
            "max_condition": worst_cond,
            "cross_check_gap": if config.exact_cross_checks { json!(worst_cross) } else { Value::Null },
        }),
    });

    let mut bubble = Vec::new();
    let mut bubble_ok = true;
    for el in &elements {
        let samples: Vec<Vec<f64>> =
            (0..2 * (n + 1)).map(|_| (0..=n).map(|_| rng.random_range(0.05..1.0)).collect()).collect();
        let c = check_bubble_equivalence(el, &samples);
        bubble_ok &= c.passed(1e-10);
        bubble.push(c);
    }
    let worst_bubble = bubble
        .iter()
        .max_by(|a, b| a.max_trace_residual.total_cmp(&b.max_trace_residual))
        .map(|c| serde_json::to_value(c).unwrap());
    claims.push(Claim { name: "bubble_trace_kernel", passed: bubble_ok, measured: json!({ "worst": worst_bubble }) });

    let mut range_ok = true;
    let mut worst_range = None;
    let mut worst_cos = -1.0;
    for el in &elements {
        let c = check_div_bubble_range(el);
        range_ok &= c.passed(1e-9);
        if c.max_rigid_cosine > worst_cos {
            worst_cos = c.max_rigid_cosine;
            worst_range = Some(c);
        }
    }
    claims.push(Claim { name: "div_bubble_range", passed: range_ok, measured: json!({ "worst": worst_range }) });

    let passed = claims.iter().all(|c| c.passed);
    Ok(VerifyReport { config: config.clone(), claims, passed })
}

/// Largest gap between the closed-form DOF matrix and the functionals
/// evaluated symbolically on each spanning function.
fn cross_check(el: &StressElement) -> f64 {
    let m = el.spanning_labels().len();
    let d = el.dof_matrix();
    let mut worst: f64 = 0.0;
    for c in 0..m {
        let mut coeffs = vec![0.0; m];
        coeffs[c] = 1.0;
        let tau = el.to_poly(&coeffs);
        for (r, dof) in el.dofs().iter().enumerate() {
            let v = apply_dof(dof, &tau, el.frames(), el.tensor_basis(), el.simplex().measure());
            worst = worst.max((v - d[(r, c)]).abs());
        }
    }
    worst
}
