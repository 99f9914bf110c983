use serde::Serialize;

use super::space::StressSpace;
use crate::error::Result;
use crate::polynomial::gm_quadrature;

#[derive(Debug, Clone, Serialize)]
pub struct JumpReport {
    pub facets: usize,
    pub points: usize,
    /// `max |sigma_a nu - sigma_b nu|` over interior facet points.
    pub max_jump: f64,
    /// Largest `|sigma_h|` entry seen at the same points.
    pub max_value: f64,
}

/// Samples the normal-trace jump of the global stress field `sigma` across
/// every interior facet at Grundmann–Möller points of the given degree.
pub fn interelement_jump_check(space: &StressSpace, sigma: &[f64], quad_degree: usize) -> Result<JumpReport> {
    let mesh = &space.mesh;
    let n = mesh.dim();
    let points = gm_quadrature(n - 1, quad_degree)?;
    let facets = mesh.interior_facets();
    let layer = mesh.layer(n - 1);
    let mut report = JumpReport { facets: facets.len(), points: 0, max_jump: 0.0, max_value: 0.0 };
    for f in &facets {
        let verts = layer.vertices(f.id);
        let [ca, cb] = f.cells;
        let nu = mesh.simplex(ca).facet_normal(f.opposite[0]);
        let coeff_a = space.cell_coefficients(ca, sigma);
        let coeff_b = space.cell_coefficients(cb, sigma);
        let to_cell = |cell: usize, mu: &[f64]| -> Vec<f64> {
            mesh.cell(cell)
                .iter()
                .map(|v| verts.iter().position(|w| w == v).map_or(0.0, |i| mu[i]))
                .collect()
        };
        for (mu, _) in &points {
            let ta = space.stress[ca].eval_coefficients(coeff_a.as_slice(), &to_cell(ca, mu));
            let tb = space.stress[cb].eval_coefficients(coeff_b.as_slice(), &to_cell(cb, mu));
            let (ja, jb) = (ta.apply(&nu), tb.apply(&nu));
            let jump = ja.iter().zip(&jb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            report.max_jump = report.max_jump.max(jump);
            report.max_value = ta.packed().iter().chain(tb.packed()).fold(report.max_value, |m, v| m.max(v.abs()));
            report.points += 1;
        }
    }
    Ok(report)
}
