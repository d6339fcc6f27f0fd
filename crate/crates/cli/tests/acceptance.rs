//! Acceptance criteria 1–10, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use robin_exterior::disk::{disk_spectrum_full, lambda1_disk, lambda2_disk};
use robin_exterior::fem::{eig_exterior, MeshSpec};
use robin_exterior::specfun::{k0, k1, kn};
use robin_exterior::trial::{isoelastic_rayleigh, monotonicity_bound};
use robin_exterior::{Constraint, DomainShape};
use robin_exterior_cli::sweep::{run_sweep, RowMode, Verdict};
use robin_exterior_cli::verify::{conjecture_specs, curvature_bounded_shapes, minimal_inradius_constant, random_shape};

type Verdictish = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdictish, Duration);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fail_if(failures: Vec<String>, summary: String) -> Verdictish {
    if failures.is_empty() {
        Ok(summary)
    } else {
        let shown: Vec<_> = failures.iter().take(4).cloned().collect();
        Err(format!("{summary}; {} failure(s): {}", failures.len(), shown.join("; ")))
    }
}

/// `−∫₀^∞ e^{−x cosh t} cosh²t dt`, the derivative of `K₁(x) = ∫ e^{−x cosh t} cosh t dt`.
fn k1_prime_oracle(x: f64) -> f64 {
    let h = 0.005;
    let f = |t: f64| {
        let c = f64::cosh(t);
        (-x * (c - 1.0)).exp() * c * c
    };
    let mut sum = 0.5 * f(0.0);
    for j in 1.. {
        let term = f(j as f64 * h);
        sum += term;
        if term < 1e-22 * sum {
            break;
        }
    }
    -h * sum * (-x).exp()
}

fn criterion_1() -> Verdictish {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let x = 1e-4 * (600.0f64 / 1e-4).powf(i as f64 / 999.0);
        let (a, b) = (k0(x).unwrap(), k1(x).unwrap());
        let r = rel(-a - b / x, k1_prime_oracle(x));
        worst = worst.max(r);
        if r > 1e-12 {
            failures.push(format!("x={x:.3e}: residual {r:.2e}"));
        }
        let lower = 2.0 * x / (1.0 + (1.0 + 4.0 * x * x).sqrt());
        if !(a / b < 1.0 && a / b >= lower) {
            failures.push(format!("x={x:.3e}: ratio {} outside [{lower}, 1)", a / b));
        }
    }
    fail_if(failures, format!("worst relative residual {worst:.2e}"))
}

/// Relative residual of `x K_{n−1}(x)/K_n(x) + n + αR` at `x = kR`.
fn fiber_residual(n: usize, radius: f64, alpha: f64, k: f64) -> f64 {
    let x = k * radius;
    let below = if n == 0 { k1(x).unwrap() } else { kn(n - 1, x).unwrap() };
    (x * below / kn(n, x).unwrap() + n as f64 + alpha * radius).abs() / (alpha * radius).abs()
}

fn criterion_2() -> Verdictish {
    let cases: Vec<(f64, f64)> = [0.5, 1.0, 2.0]
        .into_iter()
        .flat_map(|r| [-1.2, -2.0, -5.0].map(|s| (r, s / r)))
        .collect();
    let results: Vec<Vec<String>> = cases
        .par_iter()
        .map(|&(r, alpha)| {
            let tag = format!("R={r} α={alpha:.3}");
            let mut bad = Vec::new();
            let s = disk_spectrum_full(r, alpha).unwrap();
            let Some(omega) = s.omega else {
                return vec![format!("{tag}: no λ2")];
            };
            let res = fiber_residual(0, r, alpha, s.xi).max(fiber_residual(1, r, alpha, omega));
            if res > 1e-12 {
                bad.push(format!("{tag}: residual {res:.1e}"));
            }
            let mesh = MeshSpec::new(256, 128, 40.0 / omega, 1.05).unwrap();
            let fem = eig_exterior(&DomainShape::disk(r).unwrap(), alpha, &mesh, 3).unwrap();
            let ev = &fem.eigenvalues;
            if ev.len() < 3 {
                return vec![format!("{tag}: {} FEM eigenvalues", ev.len())];
            }
            let (l1, l2) = (-s.xi * s.xi, -omega * omega);
            for (name, got, want) in [("λ1", ev[0], l1), ("λ2", ev[1], l2), ("λ2'", ev[2], l2)] {
                if rel(got, want) > 1e-3 {
                    bad.push(format!("{tag}: {name} error {:.3e}", rel(got, want)));
                }
                if got < want {
                    bad.push(format!("{tag}: {name} below exact"));
                }
            }
            if rel(ev[2], ev[1]) > 1e-6 {
                bad.push(format!("{tag}: pair split {:.1e}", rel(ev[2], ev[1])));
            }
            bad
        })
        .collect();
    fail_if(results.concat(), format!("{} (R, α) cases", cases.len()))
}

fn criterion_3() -> Verdictish {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let has = |a: f64| lambda2_disk(r, a).unwrap().is_some();
        let (mut lo, mut hi) = (-3.0 / r, -0.25 / r);
        assert!(has(lo) && !has(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if has(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let err = (0.5 * (lo + hi) + 1.0 / r).abs();
        worst = worst.max(err);
        if err > 1e-8 {
            failures.push(format!("R={r}: off by {err:.1e}"));
        }
    }
    fail_if(failures, format!("worst flip offset {worst:.1e}"))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn criterion_4() -> Verdictish {
    let l1: Vec<f64> = (5..=30)
        .map(|i| lambda1_disk(i as f64 / 10.0, -1.0).unwrap().eigenvalue)
        .collect();
    let l2: Vec<f64> = (0..)
        .map(|i| 0.55 + 0.1 * i as f64)
        .take_while(|&r| r <= 3.0 + 1e-9)
        .map(|r| lambda2_disk(r, -2.0).unwrap().expect("supercritical").eigenvalue)
        .collect();
    let mut failures = Vec::new();
    if !strictly_decreasing(&l1) {
        failures.push("λ1 not strictly decreasing".into());
    }
    if !strictly_decreasing(&l2) {
        failures.push("λ2 not strictly decreasing".into());
    }
    fail_if(failures, format!("{} + {} radii", l1.len(), l2.len()))
}

fn criterion_5() -> Verdictish {
    let mut cases = Vec::new();
    for k in [2, 4] {
        for eps in [0.05, 0.1, 0.2] {
            for s in [-1.5, -2.0, -4.0] {
                cases.push((k, eps, s / (1.0 - eps)));
            }
        }
    }
    let results: Vec<Vec<String>> = cases
        .par_iter()
        .map(|&(k, eps, alpha)| {
            let tag = format!("cos{k}θ ε={eps} α={alpha:.3}");
            let shape = DomainShape::cos_mode(k, eps).unwrap();
            let disk = lambda2_disk(1.0 - eps, alpha).unwrap().expect("supercritical").eigenvalue;
            let rep = monotonicity_bound(&shape, 1.0 - eps, alpha).unwrap();
            let fem = eig_exterior(&shape, alpha, &MeshSpec::default_for(&shape, alpha).unwrap(), 3).unwrap();
            let mut bad = Vec::new();
            if rep.boundary_term >= 0.0 {
                bad.push(format!("{tag}: boundary term {:e}", rep.boundary_term));
            }
            if rep.upper_bound >= disk {
                bad.push(format!("{tag}: trial {} ≥ disk {disk}", rep.upper_bound));
            }
            match fem.lambda2() {
                Some(l2) if l2 < disk => {}
                other => bad.push(format!("{tag}: FEM {other:?} vs disk {disk}")),
            }
            bad
        })
        .collect();
    fail_if(results.concat(), format!("{} cases", cases.len()))
}

fn criterion_6() -> Verdictish {
    let cases: Vec<(f64, f64)> = [0.05, 0.1]
        .into_iter()
        .flat_map(|eps| [-1.5, -2.0, -4.0].map(|a| (eps, a)))
        .collect();
    let results: Vec<Vec<String>> = cases
        .par_iter()
        .map(|&(eps, alpha)| {
            let tag = format!("ε={eps} α={alpha}");
            let shape = DomainShape::cos_mode(2, eps)
                .unwrap()
                .normalize(Constraint::Elastic, 1.0)
                .unwrap();
            let mut bad = Vec::new();
            if !shape.summarize().convex || rel(shape.elastic_energy(), PI) > 1e-10 {
                bad.push(format!("{tag}: normalization"));
            }
            let (l1, l2) = (
                lambda1_disk(1.0, alpha).unwrap().eigenvalue,
                lambda2_disk(1.0, alpha).unwrap().expect("supercritical").eigenvalue,
            );
            let rep = isoelastic_rayleigh(&shape, alpha).unwrap();
            if rep.rayleigh_u >= l1 {
                bad.push(format!("{tag}: R[u] {} ≥ {l1}", rep.rayleigh_u));
            }
            if rep.rayleigh_v >= l2 {
                bad.push(format!("{tag}: R[v] {} ≥ {l2}", rep.rayleigh_v));
            }
            if rep.jensen_margin <= 0.0 {
                bad.push(format!("{tag}: Jensen margin {}", rep.jensen_margin));
            }
            if rep.orthogonality.max() > 1e-10 {
                bad.push(format!("{tag}: orthogonality {:.1e}", rep.orthogonality.max()));
            }
            let fem = eig_exterior(&shape, alpha, &MeshSpec::default_for(&shape, alpha).unwrap(), 3).unwrap();
            match fem.lambda2() {
                Some(v) if v < l2 => {}
                other => bad.push(format!("{tag}: FEM {other:?} vs disk {l2}")),
            }
            bad
        })
        .collect();
    fail_if(results.concat(), format!("{} cases", cases.len()))
}

fn criterion_7() -> Verdictish {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let mut convex = 0;
    for i in 0..50 {
        let s = random_shape(&mut rng, i % 3 != 0).summarize();
        if (s.total_curvature - 2.0 * PI).abs() > 1e-10 {
            failures.push(format!("sample {i}: total curvature {}", s.total_curvature));
        }
        if s.convex {
            convex += 1;
            if s.elastic_energy < PI * s.perimeter / (2.0 * s.area) {
                failures.push(format!("sample {i}: Gage"));
            }
        }
        if s.elastic_energy.powi(2) * s.area < PI.powi(3) {
            failures.push(format!("sample {i}: E²A < π³"));
        }
    }
    for r in [0.4, 1.0, 3.0] {
        let s = DomainShape::disk(r).unwrap().summarize();
        if rel(s.perimeter, 2.0 * PI * r) > 1e-12 || rel(s.area, PI * r * r) > 1e-12 {
            failures.push(format!("disk {r}: L or A"));
        }
        if rel(s.elastic_energy * 2.0 * s.area, PI * s.perimeter) > 1e-10 {
            failures.push(format!("disk {r}: Gage equality"));
        }
        if rel(s.elastic_energy.powi(2) * s.area, PI.powi(3)) > 1e-10 {
            failures.push(format!("disk {r}: BH equality"));
        }
    }
    if convex == 0 {
        failures.push("no convex samples".into());
    }
    fail_if(failures, format!("50 samples, {convex} convex"))
}

fn criterion_8() -> Verdictish {
    let mut failures = Vec::new();
    let shapes = curvature_bounded_shapes();
    for (i, shape) in shapes.iter().enumerate() {
        let s = shape.summarize();
        let r = 1.0 / s.max_curvature;
        if s.elastic_energy >= PI / r {
            failures.push(format!("shape {i}: E ≥ π/R"));
        }
        let r_star = PI / s.elastic_energy;
        for alpha in [-1.5 / r, -3.0 / r] {
            let disk = lambda2_disk(r, alpha).unwrap().expect("supercritical").eigenvalue;
            let star = lambda2_disk(r_star, alpha).unwrap().expect("supercritical").eigenvalue;
            if star >= disk {
                failures.push(format!("shape {i} α={alpha:.3}: λ2(B⋆) {star} ≥ λ2(B) {disk}"));
            }
            let rep = isoelastic_rayleigh(shape, alpha).unwrap();
            let bound = rep.rayleigh_u.max(rep.rayleigh_v);
            if bound > star {
                failures.push(format!("shape {i} α={alpha:.3}: bound {bound} > λ2(B⋆) {star}"));
            }
        }
    }
    fail_if(failures, format!("{} shapes", shapes.len()))
}

fn criterion_9() -> Verdictish {
    let v = minimal_inradius_constant();
    // ∫₀^{π/2} √cos t dt = √π Γ(3/4) / (2 Γ(5/4))
    let integral = PI.sqrt() * gamma(0.75) / (2.0 * gamma(1.25));
    let closed = 2.0 / PI * integral * integral;
    let mut failures = Vec::new();
    if rel(v, closed) > 1e-12 {
        failures.push(format!("quadrature {v} vs closed form {closed}"));
    }
    if (v - 0.914).abs() > 1e-3 {
        failures.push(format!("{v} not within 1e-3 of 0.914"));
    }
    fail_if(failures, format!("constant {v:.10}"))
}

fn criterion_10() -> Verdictish {
    let mut failures = Vec::new();
    let (mut disk_rows, mut signs) = (0, Vec::new());
    for spec in conjecture_specs() {
        let outcome = run_sweep(&spec, rayon::current_num_threads()).unwrap();
        for row in &outcome.rows {
            if let Some(e) = &row.error {
                failures.push(format!("{} {}: {e}", spec.name, row.shape_id));
            }
            if row.mode == RowMode::Equality {
                disk_rows += 1;
                if row.verdict() != Verdict::Pass {
                    failures.push(format!("{} disk row diff {:?}", spec.name, row.diff));
                }
            } else {
                signs.push(row.sign());
            }
        }
    }
    if disk_rows == 0 {
        failures.push("no disk rows".into());
    }
    let neg = signs.iter().filter(|s| **s == "-").count();
    fail_if(
        failures,
        format!("{disk_rows} disk rows consistent; {neg}/{} perturbed rows negative (recorded)", signs.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Bessel identity suite", criterion_1, Duration::from_secs(1)),
        ("disk exactness", criterion_2, Duration::from_secs(300)),
        ("critical coupling", criterion_3, Duration::from_secs(1)),
        ("radius monotonicity", criterion_4, Duration::from_secs(1)),
        ("inclusion trial bound", criterion_5, Duration::from_secs(600)),
        ("isoelastic trial bound", criterion_6, Duration::from_secs(600)),
        ("geometry inequalities", criterion_7, Duration::MAX),
        ("curvature-bounded chain", criterion_8, Duration::from_secs(60)),
        ("in-radius constant", criterion_9, Duration::from_secs(1)),
        ("conjecture probe", criterion_10, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let clock = Instant::now();
        let mut verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = clock.elapsed();
        if elapsed > budget {
            let note = format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs());
            verdict = Err(match verdict {
                Ok(s) | Err(s) => format!("{s}; {note}"),
            });
        }
        let (status, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status} {name} ({:.2}s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
