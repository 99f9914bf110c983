use hdivsym::analysis::{
    error_norms, inf_sup_constant, kernel_coercivity, solve_saddle, ManufacturedSolution,
};
use hdivsym::assembly::{assemble_system, interelement_jump_check, StressSpace};
use hdivsym::fields::CartesianPoly;
use hdivsym::geometry::Mesh;
use hdivsym::symtensor::{Compliance, SymTensor};

fn interpolate_constant(space: &StressSpace, tau: &SymTensor) -> Vec<f64> {
    let mut global = vec![f64::NAN; space.num_stress()];
    for c in 0..space.mesh.num_cells() {
        let el = &space.stress[c];
        let nm = el.monomials().len();
        // constant tensor written as (sum lambda)^k in the spanning set
        let poly = hdivsym::polynomial::BarycentricPoly::constant(el.dim(), 1.0).homogenize(el.degree() as u32);
        let mut coeffs = vec![0.0; el.spanning_labels().len()];
        for (s, &v) in tau.packed().iter().enumerate() {
            for (m, a) in el.monomials().iter().enumerate() {
                coeffs[s * nm + m] = v * poly.coefficient(a);
            }
        }
        let vals = el.dof_values(&coeffs);
        for (i, &g) in space.dofmap.cell_stress(c).iter().enumerate() {
            if global[g].is_nan() {
                global[g] = vals[i];
            } else {
                assert!((global[g] - vals[i]).abs() < 1e-12, "shared DOF {g} disagrees");
            }
        }
    }
    global
}

#[test]
fn constant_stress_is_reproduced_and_divergence_free() {
    let space = StressSpace::new(Mesh::kuhn(2, 2).unwrap(), 3).unwrap();
    let tau = SymTensor::from_rows(&[vec![1.0, -0.5], vec![-0.5, 2.0]]);
    let g = interpolate_constant(&space, &tau);
    for c in [0, 3, 7] {
        let v = space.eval_stress(c, &g, &[0.2, 0.5, 0.3]);
        for (a, b) in v.packed().iter().zip(tau.packed()) {
            assert!((a - b).abs() < 1e-11);
        }
    }
    let forces = vec![CartesianPoly::zero(2), CartesianPoly::zero(2)];
    let sys = assemble_system(&space, &Compliance::new(1.0, 1.0).unwrap(), &forces);
    assert!(sys.b.matvec(&g).iter().all(|x| x.abs() < 1e-11));
    let jumps = interelement_jump_check(&space, &g, 4).unwrap();
    assert!(jumps.max_jump < 1e-11);
}

#[test]
fn system_blocks_are_symmetric() {
    let space = StressSpace::new(Mesh::kuhn(2, 1).unwrap(), 3).unwrap();
    let forces = vec![CartesianPoly::constant(2, 1.0), CartesianPoly::zero(2)];
    let sys = assemble_system(&space, &Compliance::new(1.0, 2.0).unwrap(), &forces);
    assert_eq!((sys.num_stress(), sys.num_displacement()), (50, 24));
    for m in [&sys.a, &sys.s, &sys.mu] {
        assert!(m.symmetry_error() < 1e-12 * m.max_abs());
    }
    // testing the load of a constant force with the field (1, 0) gives the area
    let one = vec![hdivsym::polynomial::BarycentricPoly::constant(2, 1.0), hdivsym::polynomial::BarycentricPoly::zero(2)];
    let mut total = 0.0;
    for c in 0..space.mesh.num_cells() {
        let v = space.displacement[c].from_poly(&one);
        total += space.dofmap.cell_displacement(c).zip(v).map(|(g, x)| sys.rhs_f[g] * x).sum::<f64>();
    }
    assert!((total - 1.0).abs() < 1e-12, "{total}");
}

#[test]
fn polynomial_solution_in_the_space_is_exact() {
    // u of degree 4 gives a stress of degree 3, representable for k = 3
    let b = hdivsym::analysis::cube_bubble(2);
    let u = vec![b.scale(1.0), b.scale(-0.5)];
    let exact = ManufacturedSolution::from_displacement(u, Compliance::new(1.0, 1.0).unwrap()).unwrap();
    let space = StressSpace::new(Mesh::kuhn(2, 2).unwrap(), 3).unwrap();
    let sys = assemble_system(&space, &exact.compliance, &exact.f);
    let sol = solve_saddle(&sys).unwrap();
    assert!(sol.residual < 1e-12);
    let e = error_norms(&space, &sol.sigma, &sol.u, &exact).unwrap();
    assert!(e.e_sigma_hdiv < 1e-9, "{e:?}");
}

#[test]
fn cell_order_does_not_change_the_solution() {
    let b = hdivsym::analysis::cube_bubble(2);
    let u = vec![b.mul(&CartesianPoly::coordinate(2, 0)), b.scale(2.0)];
    let exact = ManufacturedSolution::from_displacement(u, Compliance::new(1.0, 1.0).unwrap()).unwrap();
    let mesh = Mesh::kuhn(2, 2).unwrap();
    let order: Vec<usize> = (0..mesh.num_cells()).rev().collect();
    let errs: Vec<f64> = [mesh.clone(), mesh.with_cell_order(&order).unwrap()]
        .into_iter()
        .map(|m| {
            let space = StressSpace::new(m, 3).unwrap();
            let sys = assemble_system(&space, &exact.compliance, &exact.f);
            let sol = solve_saddle(&sys).unwrap();
            error_norms(&space, &sol.sigma, &sol.u, &exact).unwrap().e_sigma_l2
        })
        .collect();
    assert!((errs[0] - errs[1]).abs() < 1e-12 * errs[0], "{errs:?}");
}

#[test]
fn stability_constants_are_positive() {
    let space = StressSpace::new(Mesh::kuhn(2, 1).unwrap(), 3).unwrap();
    let forces = vec![CartesianPoly::zero(2), CartesianPoly::zero(2)];
    let sys = assemble_system(&space, &Compliance::new(1.0, 1.0).unwrap(), &forces);
    let beta = inf_sup_constant(&sys).unwrap();
    assert!(beta > 1e-2, "{beta}");
    let kc = kernel_coercivity(&sys).unwrap();
    assert_eq!(kc.kernel_dim, 50 - 24);
    assert!(kc.alpha > 1e-3, "{kc:?}");
}
