use std::f64::consts::PI;

use robin_exterior::disk::disk_spectrum_full;
use robin_exterior::fem::{
    assemble, convergence_study, doubling_ladder, eig_exterior, solve_discretization, MeshSpec,
    SolverOptions,
};
use robin_exterior::specfun::k0;
use robin_exterior::DomainShape;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn mesh(n_theta: usize, n_t: usize, depth: f64, grading: f64) -> MeshSpec {
    MeshSpec::new(n_theta, n_t, depth, grading).unwrap()
}

#[test]
fn constants_have_no_gradient_energy_and_boundary_measures_perimeter() {
    let shape = DomainShape::cos_mode(3, 0.15).unwrap();
    let m = mesh(64, 32, 6.0, 1.05);
    let disc = assemble(&shape, -2.0, &m).unwrap();
    let grid = &disc.grid;
    let ones = vec![1.0; grid.n_dofs()];
    let k1 = disc.stiffness.mul(&ones);
    for i in 0..grid.n_theta() {
        // rows away from the eliminated outer ring
        for j in 0..grid.n_rings() - 1 {
            assert!(k1[grid.dof(i, j)].abs() < 1e-12, "row ({i},{j}): {}", k1[grid.dof(i, j)]);
        }
    }
    assert!(rel(disc.boundary.sum_all(), shape.perimeter()) < 1e-10);
    let robin = disc.robin_matrix();
    let interior: Vec<f64> = (0..grid.n_dofs())
        .map(|d| if d % grid.n_rings() < grid.n_rings() - 1 { 1.0 } else { 0.0 })
        .collect();
    // only the boundary ring contributes to the Robin form of the plateau's inner part
    let plateau = robin.bilinear(&interior, &interior) - disc.stiffness.bilinear(&interior, &interior);
    assert!(rel(plateau, -2.0 * shape.perimeter()) < 1e-10);
}

#[test]
fn mass_total_matches_truncated_area() {
    for shape in [
        DomainShape::disk(1.3).unwrap(),
        DomainShape::cos_mode(2, 0.2).unwrap(),
        DomainShape::new(1.0, vec![0.05, 0.1, 0.0], vec![0.0, 0.0, -0.04]).unwrap(),
    ] {
        let m = mesh(64, 40, 7.5, 1.07);
        let disc = assemble(&shape, -1.0, &m).unwrap();
        let t = m.radial_nodes();
        let (depth, inner) = (m.depth, t[t.len() - 2]);
        let h = depth - inner;
        let a0 = shape.a0();
        // free hats sum to 1 except in the outer ring, where they fall linearly to 0
        let expected = 2.0 * PI
            * (a0 * inner + inner * inner / 2.0 + (a0 + depth) * h / 3.0 - h * h / 4.0);
        assert!(rel(disc.mass.sum_all(), expected) < 1e-8, "{} vs {expected}", disc.mass.sum_all());
    }
}

#[test]
fn matrices_are_symmetric_and_banded() {
    let shape = DomainShape::new(1.0, vec![0.0, 0.1, 0.03], vec![0.02, 0.0, 0.0]).unwrap();
    let m = mesh(64, 32, 5.0, 1.1);
    let disc = assemble(&shape, -1.5, &m).unwrap();
    for mat in [&disc.stiffness, &disc.boundary, &disc.mass] {
        let scale = (0..mat.dim()).map(|i| mat.get(i, i).abs()).fold(0.0, f64::max);
        assert!(mat.max_asymmetry() <= 1e-14 * scale);
        assert!(mat.bandwidth() <= 2 * disc.grid.n_rings() + 1);
    }
}

#[test]
fn interpolated_ground_state_quotient_is_second_order() {
    let (r, alpha) = (1.0, -2.0);
    let exact = disk_spectrum_full(r, alpha).unwrap();
    let shape = DomainShape::disk(r).unwrap();
    let mut errs = Vec::new();
    for (nt, g) in [(32, 1.1f64), (64, 1.1f64.sqrt()), (128, 1.1f64.powf(0.25))] {
        let m = mesh(64, nt, 14.0, g);
        let disc = assemble(&shape, alpha, &m).unwrap();
        let u = disc.grid.interpolate(&shape, |rr, _| k0(exact.xi * rr).unwrap());
        let q = disc.robin_matrix().bilinear(&u, &u) / disc.mass.bilinear(&u, &u);
        assert!(q >= exact.lambda1());
        errs.push(q - exact.lambda1());
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.7..2.3).contains(&order), "order {order}, errors {errs:?}");
    }
}

#[test]
fn disk_eigenvalues_are_upper_bounds_with_double_second_level() {
    let (r, alpha) = (1.0, -2.0);
    let exact = disk_spectrum_full(r, alpha).unwrap();
    let res = eig_exterior(&DomainShape::disk(r).unwrap(), alpha, &mesh(128, 64, 15.0, 1.1), 3).unwrap();
    assert_eq!(res.eigenvalues.len(), 3);
    let l2 = exact.lambda2().unwrap();
    assert!(res.eigenvalues[0] >= exact.lambda1());
    assert!(res.eigenvalues[1] >= l2 && res.eigenvalues[2] >= l2);
    assert!(rel(res.eigenvalues[0], exact.lambda1()) < 1e-2);
    assert!(rel(res.eigenvalues[1], l2) < 1e-2);
    assert!(rel(res.eigenvalues[1], res.eigenvalues[2]) < 1e-6);
    assert_eq!(res.clusters, vec![vec![0], vec![1, 2]]);
    assert!(res.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    assert!(res.residual_norms.iter().all(|&r| r < 1e-4), "{:?}", res.residual_norms);
    assert!(!res.truncation_warning());
}

#[test]
fn only_negative_eigenvalues_are_reported() {
    let shape = DomainShape::disk(1.0).unwrap();
    // below α⋆ = -1 there is a single negative eigenvalue
    let res = eig_exterior(&shape, -0.8, &mesh(64, 48, 40.0, 1.1), 3).unwrap();
    assert_eq!(res.eigenvalues.len(), 1);
    assert!(res.eigenvalues[0] < 0.0);
}

#[test]
fn ground_state_weakens_as_coupling_vanishes() {
    let shape = DomainShape::disk(1.0).unwrap();
    let m = mesh(64, 48, 60.0, 1.15);
    let mut prev = f64::NEG_INFINITY;
    for alpha in [-1.6, -1.2, -0.9, -0.7, -0.5] {
        let res = eig_exterior(&shape, alpha, &m, 3).unwrap();
        let count = res.eigenvalues.len();
        assert_eq!(count, if alpha < -1.0 { 3 } else { 1 }, "α = {alpha}");
        assert!(res.eigenvalues[0] > prev && res.eigenvalues[0] < 0.0);
        prev = res.eigenvalues[0];
    }
}

#[test]
fn deeper_truncation_lowers_eigenvalues_geometrically() {
    let (r, alpha) = (1.0, -2.0);
    let exact = disk_spectrum_full(r, alpha).unwrap();
    let shape = DomainShape::disk(r).unwrap();
    // uniform radial step 1/16 so that deeper meshes contain the shallower ones
    let depths = [2.0, 3.0, 4.0, 5.0];
    let l1: Vec<f64> = depths
        .iter()
        .map(|&d| eig_exterior(&shape, alpha, &mesh(64, (16.0 * d) as usize, d, 1.0), 1).unwrap().eigenvalues[0])
        .collect();
    assert!(l1.windows(2).all(|w| w[1] < w[0]), "{l1:?}");
    let gaps: Vec<f64> = l1.windows(2).map(|w| w[0] - w[1]).collect();
    for w in gaps.windows(2) {
        let rate = -(w[1] / w[0]).ln();
        // e^{-2ξT} decay up to polynomial factors
        assert!((rate - 2.0 * exact.xi).abs() < 0.5, "rate {rate}, 2ξ = {}", 2.0 * exact.xi);
    }
}

#[test]
fn ground_state_is_even_for_centrally_symmetric_shapes() {
    let shape = DomainShape::cos_mode(2, 0.2).unwrap();
    let m = mesh(128, 48, 12.0, 1.1);
    let disc = assemble(&shape, -2.0, &m).unwrap();
    let res = solve_discretization(&disc, m, 1, &SolverOptions::default()).unwrap();
    let grid = &disc.grid;
    let u = &res.vectors[0];
    let n = grid.n_theta();
    let mut odd = vec![0.0; u.len()];
    for i in 0..n {
        for j in 0..grid.n_rings() {
            let (a, b) = (grid.dof(i, j), grid.dof((i + n / 2) % n, j));
            odd[a] = 0.5 * (u[a] - u[b]);
        }
    }
    let ratio = (disc.mass.bilinear(&odd, &odd) / disc.mass.bilinear(u, u)).sqrt();
    assert!(ratio <= 1e-6, "antisymmetric part {ratio}");
}

#[test]
fn grid_aligned_rotation_leaves_spectrum_unchanged() {
    let shape = DomainShape::new(1.0, vec![0.08, 0.12, 0.0], vec![0.0, 0.0, 0.05]).unwrap();
    let m = mesh(64, 40, 10.0, 1.1);
    let base = eig_exterior(&shape, -2.5, &m, 3).unwrap();
    let turned = eig_exterior(&shape.rotated(2.0 * PI * 5.0 / 64.0), -2.5, &m, 3).unwrap();
    assert_eq!(base.eigenvalues.len(), turned.eigenvalues.len());
    for (a, b) in base.eigenvalues.iter().zip(&turned.eigenvalues) {
        assert!(rel(*b, *a) < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn quartic_perturbation_lowers_second_eigenvalue() {
    let shape = DomainShape::cos_mode(4, 0.2).unwrap();
    let alpha = -2.0;
    let inscribed = disk_spectrum_full(0.8, alpha).unwrap().lambda2().unwrap();
    let res = eig_exterior(&shape, alpha, &mesh(128, 64, 15.0, 1.1), 3).unwrap();
    assert!(res.eigenvalues[1] < inscribed, "{} vs {inscribed}", res.eigenvalues[1]);
}

#[test]
fn disk_refinement_study_is_second_order() {
    let (r, alpha) = (1.0, -2.0);
    let exact = disk_spectrum_full(r, alpha).unwrap();
    let ladder = doubling_ladder(mesh(64, 32, 15.0, 1.1), 3);
    let study = convergence_study(&DomainShape::disk(r).unwrap(), alpha, &ladder, 3).unwrap();
    for p in &study.orders {
        assert!((1.7..=2.3).contains(p), "orders {:?}", study.orders);
    }
    assert!(rel(study.extrapolated[0], exact.lambda1()) < 1e-5);
    assert!(rel(study.extrapolated[1], exact.lambda2().unwrap()) < 1e-5);
}
