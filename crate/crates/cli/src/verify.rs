//! End-to-end acceptance scoreboard run by `robin-ext verify`.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use robin_exterior::disk::{disk_spectrum_full, lambda1_disk, lambda1_residual, lambda2_disk, lambda2_residual};
use robin_exterior::fem::{eig_exterior, MeshSpec};
use robin_exterior::quadrature::GaussLegendre;
use robin_exterior::trial::{isoelastic_rayleigh, monotonicity_bound};
use robin_exterior::{BesselProvider, Constraint, DomainShape};

use crate::spec::{Family, MeshConfig, Solver, SweepConstraint, SweepSpec};
use crate::sweep::{run_sweep, RowMode, Verdict};

/// Criteria run by `--quick`.
pub const QUICK: [usize; 6] = [1, 3, 4, 7, 8, 9];

pub const TITLES: [&str; 10] = [
    "Bessel identities",
    "disk exactness",
    "critical coupling",
    "radius monotonicity",
    "inclusion bound suite",
    "isoelastic bound suite",
    "geometry inequalities",
    "curvature-bounded chain",
    "minimal in-radius constant",
    "conjecture probe",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub status: Status,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn title(&self) -> &'static str {
        TITLES[self.id - 1]
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:>2}] {:<28} {}  {:>7.2}s  {}",
            self.id,
            self.title(),
            self.status,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// `K₀` multiplied by `1 + relative`; a negative control for criterion 1.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedBessel {
    pub relative: f64,
}

impl BesselProvider for PerturbedBessel {
    fn k01_scaled(&self, x: f64) -> (f64, f64) {
        let (k0, k1) = robin_exterior::StandardBessel.k01_scaled(x);
        (k0 * (1.0 + self.relative), k1)
    }
}

struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, cond: bool, note: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            if self.notes.len() < 4 {
                self.notes.push(note());
            }
        }
    }

    fn finish(self, summary: String) -> (bool, String) {
        if self.notes.is_empty() {
            (self.ok, summary)
        } else {
            (self.ok, format!("{summary}; {}", self.notes.join("; ")))
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `eˣK₁'(x) = −∫₀^∞ e^{−x(cosh t − 1)} cosh²t dt` by the trapezoidal rule.
fn k1_prime_scaled_integral(x: f64) -> f64 {
    let h = 0.01;
    let mut sum = 0.5;
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let c = t.cosh();
        let term = (-x * (c - 1.0)).exp() * c * c;
        sum += term;
        if term < 1e-20 * sum {
            break;
        }
        j += 1;
    }
    -h * sum
}

pub fn criterion_1(bessel: &dyn BesselProvider) -> (bool, String) {
    let n = 1000;
    let (lo, hi) = (1e-4f64, 600f64);
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        let (k0, k1) = bessel.k01_scaled(x);
        let reference = k1_prime_scaled_integral(x);
        let r = rel(-k0 - k1 / x, reference);
        worst = worst.max(r);
        c.require(r <= 1e-12, || format!("identity residual {r:.2e} at x = {x:.4e}"));
        let ratio = k0 / k1;
        let lower = 2.0 * x / (1.0 + (1.0 + 4.0 * x * x).sqrt());
        c.require(ratio < 1.0, || format!("K0/K1 = {ratio} at x = {x:.4e}"));
        c.require(ratio >= lower, || format!("K0/K1 = {ratio} below {lower} at x = {x:.4e}"));
    }
    c.finish(format!("{n} points, worst identity residual {worst:.2e}"))
}

pub fn criterion_2() -> (bool, String) {
    let cases: Vec<(f64, f64)> = [0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&r| [-1.2, -2.0, -5.0].map(|s| (r, s / r)))
        .collect();
    type CaseErrors = (f64, f64, f64, f64, String);
    let results: Vec<Result<CaseErrors, String>> = cases
        .par_iter()
        .map(|&(r, alpha)| {
            let spectrum = disk_spectrum_full(r, alpha).map_err(|e| e.to_string())?;
            let omega = spectrum.omega.ok_or("no second eigenvalue")?;
            let res = lambda1_residual(r, alpha, spectrum.xi).max(lambda2_residual(r, alpha, omega));
            let mesh = MeshSpec::new(256, 128, 40.0 / omega, 1.05).map_err(|e| e.to_string())?;
            let fem = eig_exterior(&DomainShape::disk(r).map_err(|e| e.to_string())?, alpha, &mesh, 3)
                .map_err(|e| e.to_string())?;
            if fem.eigenvalues.len() < 3 {
                return Err(format!("only {} negative FEM eigenvalues", fem.eigenvalues.len()));
            }
            let (l1, l2) = (spectrum.lambda1(), -omega * omega);
            let ev = &fem.eigenvalues;
            let mut notes = String::new();
            if ev[0] < l1 || ev[1] < l2 || ev[2] < l2 {
                notes.push_str(" below exact");
            }
            Ok((res, rel(ev[0], l1), rel(ev[1], l2).max(rel(ev[2], l2)), rel(ev[2], ev[1]), notes))
        })
        .collect();
    let mut c = Check::new();
    let (mut w_res, mut w1, mut w2, mut w_pair) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (&(r, alpha), out) in cases.iter().zip(results) {
        match out {
            Err(e) => c.require(false, || format!("R={r}, α={alpha:.3}: {e}")),
            Ok((res, e1, e2, pair, notes)) => {
                w_res = w_res.max(res);
                w1 = w1.max(e1);
                w2 = w2.max(e2);
                w_pair = w_pair.max(pair);
                c.require(res <= 1e-12, || format!("R={r}, α={alpha:.3}: residual {res:.1e}"));
                c.require(e1 <= 1e-3, || format!("R={r}, α={alpha:.3}: λ1 error {e1:.3e}"));
                c.require(e2 <= 1e-3, || format!("R={r}, α={alpha:.3}: λ2 error {e2:.3e}"));
                c.require(pair <= 1e-6, || format!("R={r}, α={alpha:.3}: pair split {pair:.1e}"));
                c.require(notes.is_empty(), || format!("R={r}, α={alpha:.3}:{notes}"));
            }
        }
    }
    c.finish(format!(
        "worst residual {w_res:.1e}, λ1 err {w1:.2e}, λ2 err {w2:.2e}, pair split {w_pair:.1e}"
    ))
}

pub fn criterion_3() -> (bool, String) {
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        let present = |a: f64| lambda2_disk(r, a).map(|e| e.is_some());
        let (mut lo, mut hi) = (-2.0 / r, -0.5 / r);
        match (present(lo), present(hi)) {
            (Ok(true), Ok(false)) => {}
            other => {
                c.require(false, || format!("R={r}: bad bracket {other:?}"));
                continue;
            }
        }
        while hi - lo > 1e-11 {
            let mid = 0.5 * (lo + hi);
            match present(mid) {
                Ok(true) => lo = mid,
                Ok(false) => hi = mid,
                Err(e) => {
                    c.require(false, || format!("R={r}, α={mid}: {e}"));
                    break;
                }
            }
        }
        let flip = 0.5 * (lo + hi);
        let err = (flip + 1.0 / r).abs();
        worst = worst.max(err);
        c.require(err <= 1e-8, || format!("R={r}: flip at {flip}"));
    }
    c.finish(format!("worst |α_flip + 1/R| = {worst:.1e}"))
}

pub fn criterion_4() -> (bool, String) {
    let mut c = Check::new();
    let l1: Vec<f64> = (0..=25)
        .map(|i| lambda1_disk(0.5 + 0.1 * i as f64, -1.0).map_or(f64::NAN, |e| e.eigenvalue))
        .collect();
    let alpha: f64 = -2.0;
    let radii: Vec<f64> = (0..)
        .map(|i| 1.1 / alpha.abs() + 0.1 * i as f64)
        .take_while(|&r| r <= 3.0 + 1e-12)
        .collect();
    let l2: Vec<f64> = radii
        .iter()
        .map(|&r| match lambda2_disk(r, alpha) {
            Ok(Some(e)) => e.eigenvalue,
            _ => f64::NAN,
        })
        .collect();
    c.require(l1.windows(2).all(|w| w[1] < w[0]), || format!("λ1 not strictly decreasing: {l1:?}"));
    c.require(l2.windows(2).all(|w| w[1] < w[0]), || format!("λ2 not strictly decreasing: {l2:?}"));
    c.finish(format!("{} λ1 and {} λ2 samples", l1.len(), l2.len()))
}

pub fn criterion_5() -> (bool, String) {
    let cases: Vec<(usize, f64, f64)> = [2usize, 4]
        .iter()
        .flat_map(|&k| {
            [0.05, 0.1, 0.2]
                .into_iter()
                .flat_map(move |eps| [-1.5, -2.0, -4.0].map(|s| (k, eps, s / (1.0 - eps))))
        })
        .collect();
    let results: Vec<Result<(f64, f64, f64, f64), String>> = cases
        .par_iter()
        .map(|&(k, eps, alpha)| {
            let shape = DomainShape::cos_mode(k, eps).map_err(|e| e.to_string())?;
            let rep = monotonicity_bound(&shape, 1.0 - eps, alpha).map_err(|e| e.to_string())?;
            let mesh = MeshSpec::default_for(&shape, alpha).map_err(|e| e.to_string())?;
            let fem = eig_exterior(&shape, alpha, &mesh, 3).map_err(|e| e.to_string())?;
            let l2 = fem.lambda2().ok_or("FEM found fewer than two negative eigenvalues")?;
            Ok((rep.boundary_term, rep.upper_bound, l2, rep.lambda2_disk))
        })
        .collect();
    let mut c = Check::new();
    let mut margin = f64::INFINITY;
    for (&(k, eps, alpha), out) in cases.iter().zip(results) {
        let tag = format!("cos{k}θ ε={eps} α={alpha:.3}");
        match out {
            Err(e) => c.require(false, || format!("{tag}: {e}")),
            Ok((bt, trial, fem, disk)) => {
                c.require(bt < 0.0, || format!("{tag}: boundary term {bt:e}"));
                c.require(trial < disk, || format!("{tag}: trial {trial} vs disk {disk}"));
                c.require(fem < disk, || format!("{tag}: FEM {fem} vs disk {disk}"));
                margin = margin.min((disk - trial.max(fem)) / disk.abs());
            }
        }
    }
    c.finish(format!("{} cases, smallest relative margin {margin:.2e}", cases.len()))
}

pub fn criterion_6() -> (bool, String) {
    let cases: Vec<(f64, f64)> = [0.05, 0.1]
        .iter()
        .flat_map(|&eps| [-1.5, -2.0, -4.0].map(|a| (eps, a)))
        .collect();
    let results: Vec<Result<(robin_exterior::IsoelasticReport, f64), String>> = cases
        .par_iter()
        .map(|&(eps, alpha)| {
            let shape = DomainShape::cos_mode(2, eps)
                .and_then(|s| s.normalize(Constraint::Elastic, 1.0))
                .map_err(|e| e.to_string())?;
            let rep = isoelastic_rayleigh(&shape, alpha).map_err(|e| e.to_string())?;
            let mesh = MeshSpec::default_for(&shape, alpha).map_err(|e| e.to_string())?;
            let fem = eig_exterior(&shape, alpha, &mesh, 3).map_err(|e| e.to_string())?;
            let l2 = fem.lambda2().ok_or("FEM found fewer than two negative eigenvalues")?;
            Ok((rep, l2))
        })
        .collect();
    let mut c = Check::new();
    let mut worst_orth: f64 = 0.0;
    let mut min_jensen = f64::INFINITY;
    for (&(eps, alpha), out) in cases.iter().zip(results) {
        let tag = format!("ε={eps} α={alpha}");
        match out {
            Err(e) => c.require(false, || format!("{tag}: {e}")),
            Ok((rep, fem)) => {
                c.require(rep.rayleigh_u < rep.lambda1_disk, || format!("{tag}: R[u] {}", rep.rayleigh_u));
                c.require(rep.rayleigh_v < rep.lambda2_disk, || format!("{tag}: R[v] {}", rep.rayleigh_v));
                c.require(rep.jensen_margin > 0.0, || format!("{tag}: Jensen margin {}", rep.jensen_margin));
                let orth = rep.orthogonality.max();
                c.require(orth <= 1e-10, || format!("{tag}: orthogonality {orth:.1e}"));
                c.require(fem < rep.lambda2_disk, || format!("{tag}: FEM {fem} vs disk {}", rep.lambda2_disk));
                worst_orth = worst_orth.max(orth);
                min_jensen = min_jensen.min(rep.jensen_margin);
            }
        }
    }
    c.finish(format!(
        "{} cases, worst orthogonality {worst_orth:.1e}, smallest Jensen margin {min_jensen:.2e}",
        cases.len()
    ))
}

/// Random smooth star-shaped boundary; `gentle` keeps it near a disk.
pub fn random_shape(rng: &mut ChaCha8Rng, gentle: bool) -> DomainShape {
    let modes = rng.gen_range(1..=6);
    let a0 = rng.gen_range(0.5..2.0);
    let mut cos = Vec::with_capacity(modes);
    let mut sin = Vec::with_capacity(modes);
    for k in 1..=modes {
        // Σ 2·0.15/k < 1 keeps ρ positive; k²·0.15/k allows dents for k ≥ 4.
        let scale = if gentle { a0 * 0.02 / (k * k) as f64 } else { a0 * 0.15 / k as f64 };
        cos.push(rng.gen_range(-scale..scale));
        sin.push(rng.gen_range(-scale..scale));
    }
    DomainShape::new(a0, cos, sin).expect("amplitudes keep ρ positive")
}

pub fn criterion_7() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut c = Check::new();
    let mut convex = 0;
    let mut worst_tc: f64 = 0.0;
    for i in 0..50 {
        let shape = random_shape(&mut rng, i % 2 == 0);
        let s = shape.summarize();
        let tc = (s.total_curvature - 2.0 * PI).abs();
        worst_tc = worst_tc.max(tc);
        c.require(tc <= 1e-10, || format!("sample {i}: total curvature off by {tc:.1e}"));
        if s.convex {
            convex += 1;
            c.require(s.gage_holds(), || format!("sample {i}: Gage fails"));
        }
        c.require(s.bh_holds(), || format!("sample {i}: E²A < π³"));
    }
    c.require(convex > 0, || "no convex samples".into());
    for r in [0.3, 1.0, 2.5] {
        let s = DomainShape::disk(r).expect("positive radius").summarize();
        let gage = rel(s.elastic_energy, PI * s.perimeter / (2.0 * s.area));
        let bh = rel(s.elastic_energy.powi(2) * s.area, PI.powi(3));
        c.require(gage <= 1e-10 && bh <= 1e-10, || format!("disk {r}: equality gaps {gage:.1e}, {bh:.1e}"));
    }
    c.finish(format!("50 samples ({convex} convex), worst total-curvature error {worst_tc:.1e}"))
}

/// Convex shapes used for the curvature-bounded chain.
pub fn curvature_bounded_shapes() -> Vec<DomainShape> {
    vec![
        DomainShape::cos_mode(2, 0.05).expect("valid"),
        DomainShape::cos_mode(2, 0.1).expect("valid"),
        DomainShape::cos_mode(3, 0.03).expect("valid"),
        DomainShape::new(1.3, vec![0.0, 0.04, 0.0, 0.01], vec![0.02, 0.0, 0.0, 0.0]).expect("valid"),
    ]
}

pub fn criterion_8() -> (bool, String) {
    let mut c = Check::new();
    let mut gap = f64::INFINITY;
    for (i, shape) in curvature_bounded_shapes().iter().enumerate() {
        let s = shape.summarize();
        c.require(s.convex, || format!("shape {i} is not convex"));
        let r = 1.0 / s.max_curvature;
        c.require(s.elastic_energy < PI / r, || format!("shape {i}: E = {} ≥ π/R", s.elastic_energy));
        let r_star = PI / s.elastic_energy;
        for alpha in [-1.5 / r, -3.0 / r] {
            let disk = lambda2_disk(r, alpha).ok().flatten();
            let star = lambda2_disk(r_star, alpha).ok().flatten();
            let (Some(disk), Some(star)) = (disk, star) else {
                c.require(false, || format!("shape {i}, α={alpha:.3}: disk λ2 missing"));
                continue;
            };
            c.require(star.eigenvalue < disk.eigenvalue, || format!("shape {i}, α={alpha:.3}: disk monotonicity"));
            match isoelastic_rayleigh(shape, alpha) {
                Ok(rep) => {
                    let bound = rep.rayleigh_u.max(rep.rayleigh_v);
                    c.require(bound <= star.eigenvalue, || {
                        format!("shape {i}, α={alpha:.3}: bound {bound} vs λ2(B⋆) {}", star.eigenvalue)
                    });
                    gap = gap.min(star.eigenvalue - bound);
                }
                Err(e) => c.require(false, || format!("shape {i}, α={alpha:.3}: {e}")),
            }
        }
    }
    c.finish(format!("4 shapes × 2 couplings, smallest gap to λ2(B⋆) {gap:.2e}"))
}

/// `(2/π)(∫₀^{π/2} √cos t dt)²` with `t = π/2 − s²` removing the endpoint singularity.
pub fn minimal_inradius_constant() -> f64 {
    let gl = GaussLegendre::new(40);
    let upper = (PI / 2.0).sqrt();
    let panels = 8;
    let integral: f64 = (0..panels)
        .map(|p| {
            let (a, b) = (upper * p as f64 / panels as f64, upper * (p + 1) as f64 / panels as f64);
            gl.integrate(a, b, |s| 2.0 * s * (s * s).sin().sqrt())
        })
        .sum();
    2.0 / PI * integral * integral
}

pub fn criterion_9() -> (bool, String) {
    let v = minimal_inradius_constant();
    ((v - 0.914).abs() <= 1e-3, format!("constant = {v:.12}"))
}

/// Area and perimeter sweeps with finite elements over the `cos 2θ` and
/// `cos 4θ` families.
pub fn conjecture_specs() -> Vec<SweepSpec> {
    let mut out = Vec::new();
    for constraint in [Constraint::Area, Constraint::Perimeter] {
        for k in [1, 2] {
            out.push(SweepSpec {
                name: format!("{}-cos{}", constraint.name(), 2 * k),
                seed: 0,
                family: Family::Cos2k {
                    k,
                    eps: vec![0.0, 0.1, 0.2],
                    n_samples: 1024,
                },
                constraint: SweepConstraint::Matched(constraint),
                target_radius: 1.0,
                alphas: vec![-2.0],
                solvers: [Solver::ExactDisk, Solver::Fem].into_iter().collect(),
                mesh: MeshConfig::default(),
                output_dir: "unused".into(),
                plot: false,
            });
        }
    }
    out
}

pub fn criterion_10(jobs: usize) -> (bool, String) {
    let mut c = Check::new();
    let (mut disk_rows, mut negative, mut positive, mut worst) = (0, 0, 0, 0.0f64);
    for spec in conjecture_specs() {
        let outcome = match run_sweep(&spec, jobs) {
            Ok(o) => o,
            Err(e) => {
                c.require(false, || format!("{}: {e}", spec.name));
                continue;
            }
        };
        for row in &outcome.rows {
            c.require(row.error.is_none(), || format!("{} {}: {:?}", spec.name, row.shape_id, row.error));
            match row.mode {
                RowMode::Equality => {
                    disk_rows += 1;
                    if let (Some(d), Some(l2)) = (row.diff, row.lambda2_disk) {
                        worst = worst.max(d.abs() / l2.abs());
                    }
                    let v = row.verdict();
                    c.require(v == Verdict::Pass, || format!("{} disk row: {v:?}", spec.name));
                }
                _ => match row.diff {
                    Some(d) if d < 0.0 => negative += 1,
                    Some(_) => positive += 1,
                    None => {}
                },
            }
        }
    }
    c.finish(format!(
        "{disk_rows} disk rows (worst relative |diff| {worst:.2e}); recorded signs: {negative} negative, {positive} nonnegative"
    ))
}

pub fn run_criterion(id: usize, bessel: &dyn BesselProvider, jobs: usize) -> (bool, String) {
    match id {
        1 => criterion_1(bessel),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(jobs),
        _ => (false, format!("unknown criterion {id}")),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub quick: bool,
    pub jobs: usize,
}

/// Run the scoreboard, calling `report` as each criterion finishes.
pub fn run(bessel: &dyn BesselProvider, opts: VerifyOptions, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .expect("thread pool");
    (1..=10)
        .map(|id| {
            let outcome = if opts.quick && !QUICK.contains(&id) {
                Outcome {
                    id,
                    status: Status::Skipped,
                    detail: "not part of --quick".into(),
                    elapsed: Duration::ZERO,
                }
            } else {
                let clock = Instant::now();
                let (ok, detail) = pool.install(|| run_criterion(id, bessel, opts.jobs));
                Outcome {
                    id,
                    status: if ok { Status::Pass } else { Status::Fail },
                    detail,
                    elapsed: clock.elapsed(),
                }
            };
            report(&outcome);
            outcome
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use robin_exterior::StandardBessel;

    #[test]
    fn bessel_identity_passes_and_perturbation_fails() {
        assert!(criterion_1(&StandardBessel).0);
        let (ok, detail) = criterion_1(&PerturbedBessel { relative: 1e-9 });
        assert!(!ok, "{detail}");
    }

    #[test]
    fn integral_reference_matches_known_value() {
        // K₁'(1) = −K₀(1) − K₁(1)
        let want = -1.022931668437943;
        assert!((k1_prime_scaled_integral(1.0) * (-1.0f64).exp() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [3, 4, 7, 8, 9] {
            let (ok, detail) = run_criterion(id, &StandardBessel, 1);
            assert!(ok, "criterion {id}: {detail}");
        }
    }

    #[test]
    fn curvature_bounded_shapes_have_room() {
        for s in curvature_bounded_shapes() {
            let summary = s.summarize();
            assert!(summary.convex && summary.min_curvature > 0.0);
        }
    }
}
