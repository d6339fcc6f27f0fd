use std::f64::consts::PI;

use proptest::prelude::*;
use robin_exterior::geometry::{Constraint, DomainShape};

/// Smooth random shapes with decaying coefficients; positivity of ρ is
/// guaranteed because Σ|a_k|+|b_k| < a0.
fn shape_strategy() -> impl Strategy<Value = DomainShape> {
    (1usize..=6, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6), 0.5f64..2.0).prop_map(
        |(k, raw, a0)| {
            let cos: Vec<f64> = (0..k).map(|i| 0.25 * a0 * raw[i].0 / ((i + 1) as f64).powi(2)).collect();
            let sin: Vec<f64> = (0..k).map(|i| 0.25 * a0 * raw[i].1 / ((i + 1) as f64).powi(2)).collect();
            DomainShape::new(a0, cos, sin).unwrap()
        },
    )
}

#[test]
fn disk_summary() {
    for r in [0.5, 1.0, 3.0] {
        let g = DomainShape::disk(r).unwrap().summarize();
        assert!((g.perimeter - 2.0 * PI * r).abs() < 1e-12);
        assert!((g.area - PI * r * r).abs() < 1e-12);
        assert!((g.elastic_energy - PI / r).abs() < 1e-12);
        assert!(g.convex && g.centrally_symmetric);
        // Gage and BH are equalities for the disk
        assert!((g.elastic_energy - PI * g.perimeter / (2.0 * g.area)).abs() < 1e-10);
        assert!((g.elastic_energy.powi(2) * g.area - PI.powi(3)).abs() < 1e-10);
    }
}

#[test]
fn ellipse_like_regression() {
    let g = DomainShape::cos_mode(2, 0.2).unwrap().summarize();
    assert!(g.convex);
    assert!(g.gage_holds() && g.bh_holds());
    assert!(g.elastic_energy >= PI * g.perimeter / (2.0 * g.area));
    assert!(g.elastic_energy.powi(2) * g.area > PI.powi(3));
    // area is exact: π(1 + ε²/2)
    assert!((g.area - PI * 1.02).abs() < 1e-13);
    // frozen from adaptive quadrature at 25 digits; 1024 and 4096 points agree
    let fine = DomainShape::cos_mode(2, 0.2).unwrap().with_n_samples(4096).unwrap().summarize();
    assert!((g.perimeter - fine.perimeter).abs() < 1e-13);
    assert!((g.elastic_energy - fine.elastic_energy).abs() < 1e-12);
    assert!((g.perimeter - 6.529_722_300_639_336).abs() < 1e-12, "{}", g.perimeter);
    assert!((g.elastic_energy - 3.623_206_625_691_253).abs() < 1e-11, "{}", g.elastic_energy);
}

#[test]
fn curvature_formula_matches_cartesian_finite_differences() {
    let s = DomainShape::cos_mode(2, 0.05).unwrap();
    let k0 = s.curvature(0.0);
    // (ρ²+2ρ'²−ρρ'')/(ρ²+ρ'²)^{3/2} at θ=0: ρ=1.05, ρ'=0, ρ''=−0.2
    let direct = (1.05f64.powi(2) + 1.05 * 0.2) / 1.05f64.powi(3);
    assert!((k0 - direct).abs() < 1e-14);

    let shape = DomainShape::new(1.0, vec![0.03, 0.1, -0.02], vec![0.05, 0.0, 0.04]).unwrap();
    let h = 1e-3;
    for i in 0..37 {
        let t = 0.17 * i as f64;
        let p = |t: f64| shape.point(t);
        let (pm, p0, pp) = (p(t - h), p(t), p(t + h));
        let d1 = [(pp[0] - pm[0]) / (2.0 * h), (pp[1] - pm[1]) / (2.0 * h)];
        let d2 = [
            (pp[0] - 2.0 * p0[0] + pm[0]) / (h * h),
            (pp[1] - 2.0 * p0[1] + pm[1]) / (h * h),
        ];
        let fd = (d1[0] * d2[1] - d1[1] * d2[0]) / (d1[0].hypot(d1[1])).powi(3);
        assert!((fd - shape.curvature(t)).abs() < 1e-5, "t={t}");
    }
}

#[test]
fn rho_derivatives_match_finite_differences() {
    let shape = DomainShape::new(1.0, vec![0.03, 0.1, -0.02], vec![0.05, 0.0, 0.04]).unwrap();
    for &t in &[0.1, 1.3, 2.9, 5.0] {
        let (_, d1, d2) = shape.rho_derivatives(t);
        let mut errs = vec![];
        for h in [1e-2, 5e-3] {
            let fd1 = (shape.rho(t + h) - shape.rho(t - h)) / (2.0 * h);
            let fd2 = (shape.rho(t + h) - 2.0 * shape.rho(t) + shape.rho(t - h)) / (h * h);
            errs.push(((fd1 - d1).abs(), (fd2 - d2).abs()));
        }
        assert!(errs[1].0 < 1e-5 && errs[1].1 < 1e-4);
        let ratio = errs[0].0 / errs[1].0;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn matched_radii_and_normalization() {
    let d = DomainShape::disk(2.0).unwrap();
    for c in [Constraint::Area, Constraint::Perimeter, Constraint::Elastic] {
        assert!((d.matched_disk_radius(c) - 2.0).abs() < 1e-12);
    }
    let n = DomainShape::disk(3.0).unwrap().normalize(Constraint::Elastic, 1.0).unwrap();
    assert!((n.a0() - 1.0).abs() < 1e-12);

    let s = DomainShape::new(1.0, vec![0.02, 0.15], vec![0.0, 0.05]).unwrap();
    for c in [Constraint::Area, Constraint::Perimeter, Constraint::Elastic] {
        for target in [0.5, 1.0, 2.5] {
            let t = s.normalize(c, target).unwrap();
            assert!((t.matched_disk_radius(c) - target).abs() < 1e-12 * target);
        }
        let scaled = s.scaled(1.7).unwrap();
        assert!((scaled.matched_disk_radius(c) - 1.7 * s.matched_disk_radius(c)).abs() < 1e-12);
    }
    let e = s.normalize(Constraint::Elastic, 0.8).unwrap().elastic_energy();
    assert!((e - PI / 0.8).abs() < 1e-11);
}

#[test]
fn arclength_tables_disk() {
    let t = DomainShape::disk(1.0).unwrap().arclength_tables(128).unwrap();
    for j in 0..128 {
        assert!((t.s[j] - 2.0 * PI * j as f64 / 128.0).abs() < 1e-12);
        assert!((t.kappa[j] - 1.0).abs() < 1e-14);
    }
    assert!(DomainShape::disk(1.0).unwrap().arclength_tables(10).is_err());
}

#[test]
fn arclength_tables_frenet_and_closure() {
    let shape = DomainShape::new(1.0, vec![0.03, 0.12, 0.0, 0.02], vec![0.0, 0.04, 0.01, 0.0]).unwrap();
    let m = 512;
    let t = shape.arclength_tables(m).unwrap();
    let ds = t.perimeter / m as f64;
    assert!((t.perimeter - shape.perimeter()).abs() < 1e-12);
    let mut sum = [0.0, 0.0];
    for j in 0..m {
        let tau = t.tangent[j];
        assert!((tau[0].hypot(tau[1]) - 1.0).abs() < 1e-10);
        sum[0] += tau[0] * ds;
        sum[1] += tau[1] * ds;
        // consecutive nodes are a uniform arclength apart (chord ≈ ds)
        let next = (j + 1) % m;
        let (p, q) = (shape.point(t.theta[j]), shape.point(t.theta[next]));
        let chord = (p[0] - q[0]).hypot(p[1] - q[1]);
        assert!((chord - ds).abs() < ds * ds * ds * 10.0);
        // dτ/ds = -κν with ν = (-τ₂, τ₁), central differences
        let prev = (j + m - 1) % m;
        let dtau = [
            (t.tangent[next][0] - t.tangent[prev][0]) / (2.0 * ds),
            (t.tangent[next][1] - t.tangent[prev][1]) / (2.0 * ds),
        ];
        let nu = [-tau[1], tau[0]];
        assert!((dtau[0] + t.kappa[j] * nu[0]).abs() < 1e-3);
        assert!((dtau[1] + t.kappa[j] * nu[1]).abs() < 1e-3);
        // outer normal agrees with the θ-parametrized normal
        let n_theta = shape.outer_normal(t.theta[j]);
        assert!((n_theta[0] - nu[0]).abs() < 1e-12 && (n_theta[1] - nu[1]).abs() < 1e-12);
    }
    assert!(sum[0].abs() < 1e-10 && sum[1].abs() < 1e-10);
}

#[test]
fn remark_perimeter_under_fixed_elastic_energy() {
    for (k, eps) in [(2, 0.1), (3, 0.05), (4, 0.03)] {
        let s = DomainShape::cos_mode(k, eps).unwrap().normalize(Constraint::Elastic, 1.0).unwrap();
        let g = s.summarize();
        assert!(g.perimeter * g.elastic_energy > 2.0 * PI * PI);
        assert!(g.perimeter > 2.0 * PI);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_curvature_and_isoperimetric_inequalities(s in shape_strategy()) {
        let g = s.summarize();
        prop_assert!((g.total_curvature - 2.0 * PI).abs() < 1e-10, "{}", g.total_curvature);
        prop_assert!(g.bh_holds());
        prop_assert!(g.gage_holds());
        if !s.is_disk() {
            prop_assert!(g.perimeter * g.elastic_energy > 2.0 * PI * PI);
        }
    }

    #[test]
    fn dilation_covariance(s in shape_strategy(), c in 0.2f64..5.0) {
        let g = s.summarize();
        let h = s.scaled(c).unwrap().summarize();
        prop_assert!((h.perimeter - c * g.perimeter).abs() < 1e-12 * h.perimeter);
        prop_assert!((h.area - c * c * g.area).abs() < 1e-12 * h.area);
        prop_assert!((h.elastic_energy - g.elastic_energy / c).abs() < 1e-12 * h.elastic_energy);
        prop_assert!((h.total_curvature - g.total_curvature).abs() < 1e-12);
    }

    #[test]
    fn inclusion_just_below_min_rho(s in shape_strategy()) {
        prop_assert!(s.contains_disk(s.min_rho() - 1e-12));
        prop_assert!(!s.contains_disk(s.min_rho() * (1.0 + 1e-9)));
    }
}
