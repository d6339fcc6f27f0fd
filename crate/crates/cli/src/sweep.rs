//! Sweep execution: one row per (shape, α), computed on a worker pool and
//! collected by a single writer.

use std::f64::consts::PI;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;

use robin_exterior::disk::lambda2_disk;
use robin_exterior::fem::{eig_exterior_with, SolverOptions};
use robin_exterior::trial::{critical_coupling_bounds, isoelastic_rayleigh, monotonicity_bound};
use robin_exterior::{Constraint, CriticalCouplingBounds, DomainShape, HypothesisFlags};

use crate::spec::{ShapeCase, Solver, SweepConstraint, SweepSpec};

/// Relative tolerance for a finite-element disk row against the exact value.
pub const FEM_DISK_TOL: f64 = 1e-3;
/// Relative tolerance for a trial-bound disk row against the exact value.
pub const TRIAL_DISK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMode {
    /// Centrally symmetric shape containing the comparison disk.
    TheoremInclusion,
    /// Convex shape with the elastic energy of the comparison disk.
    TheoremElastic,
    /// Area or perimeter matching; nothing is asserted.
    Conjecture,
    /// Hypotheses of the selected constraint fail; nothing is asserted.
    Exploratory,
    /// The shape is the comparison disk itself.
    Equality,
}

impl RowMode {
    pub fn name(self) -> &'static str {
        match self {
            RowMode::TheoremInclusion => "theorem-inclusion",
            RowMode::TheoremElastic => "theorem-elastic",
            RowMode::Conjecture => "conjecture",
            RowMode::Exploratory => "exploratory",
            RowMode::Equality => "equality",
        }
    }

    pub fn is_theorem(self) -> bool {
        matches!(self, RowMode::TheoremInclusion | RowMode::TheoremElastic)
    }

    fn classify(constraint: SweepConstraint, shape: &DomainShape, flags: &HypothesisFlags) -> Self {
        if shape.is_disk() {
            return RowMode::Equality;
        }
        match constraint {
            SweepConstraint::Inclusion if flags.monotonicity_failures().is_empty() => RowMode::TheoremInclusion,
            SweepConstraint::Matched(Constraint::Elastic) if flags.isoelastic_failures().is_empty() => {
                RowMode::TheoremElastic
            }
            SweepConstraint::Inclusion | SweepConstraint::Matched(Constraint::Elastic) => RowMode::Exploratory,
            SweepConstraint::Matched(_) => RowMode::Conjecture,
        }
    }
}

impl fmt::Display for RowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub shape_id: String,
    pub eps: f64,
    pub perimeter: f64,
    pub area: f64,
    pub elastic_energy: f64,
    pub constraint: SweepConstraint,
    pub r_matched: f64,
    pub alpha: f64,
    pub lambda2_trial: Option<f64>,
    pub lambda2_fem: Option<f64>,
    pub lambda2_disk: Option<f64>,
    /// `λ₂(Ω) − λ₂(B)` from the designated solver (FEM when selected).
    pub diff: Option<f64>,
    pub designated: Option<Solver>,
    pub mode: RowMode,
    pub hypotheses: HypothesisFlags,
    pub critical: CriticalCouplingBounds,
    pub truncation_warning: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    /// Computed and recorded, no assertion applies.
    Recorded,
    Violation(String),
}

impl SweepRow {
    pub fn sign(&self) -> &'static str {
        match self.diff {
            Some(d) if d < 0.0 => "-",
            Some(d) if d > 0.0 => "+",
            Some(_) => "0",
            None => "na",
        }
    }

    pub fn verdict(&self) -> Verdict {
        if let Some(e) = &self.error {
            return Verdict::Violation(format!("row failed: {e}"));
        }
        match self.mode {
            m if m.is_theorem() => match self.diff {
                Some(d) if d < 0.0 => Verdict::Pass,
                Some(d) => Verdict::Violation(format!("{m} row has difference {d:e} >= 0")),
                None => Verdict::Violation(format!("{m} row has no second eigenvalue")),
            },
            RowMode::Equality => match (self.diff, self.lambda2_disk, self.designated) {
                (Some(d), Some(l2), Some(solver)) => {
                    let tol = match solver {
                        Solver::Fem => FEM_DISK_TOL,
                        _ => TRIAL_DISK_TOL,
                    } * l2.abs();
                    if d.abs() <= tol {
                        Verdict::Pass
                    } else {
                        Verdict::Violation(format!("disk row differs by {d:e} (tolerance {tol:e})"))
                    }
                }
                _ => Verdict::Recorded,
            },
            _ => Verdict::Recorded,
        }
    }

    /// Mode, hypothesis flags, sign and critical-coupling bounds as one
    /// `;`-separated field.
    pub fn flags(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("na".to_string(), |x| format!("{x:.16e}"));
        let mut s = format!(
            "mode={};{};sign={};astar_insc={};astar_elastic={};astar_inradius={};trunc={}",
            self.mode,
            self.hypotheses.encode(),
            self.sign(),
            opt(self.critical.from_inscribed),
            opt(self.critical.from_elastic),
            opt(self.critical.from_inradius),
            u8::from(self.truncation_warning),
        );
        if let Some(e) = &self.error {
            let clean: String = e
                .chars()
                .map(|c| if matches!(c, ',' | ';' | '\n' | '\r' | '"') { ' ' } else { c })
                .collect();
            s.push_str(";error=");
            s.push_str(&clean);
        }
        s
    }
}

/// Smallest available rigorous trial upper bound on `λ₂(Ωᶜ)`: the
/// monotonicity bound against the inscribed disk for centrally symmetric
/// shapes, the isoelastic pair for convex shapes.
pub fn best_trial_bound(shape: &DomainShape, alpha: f64) -> robin_exterior::Result<Option<f64>> {
    let summary = shape.summarize();
    let mut best: Option<f64> = None;
    if summary.centrally_symmetric && alpha < -1.0 / summary.min_rho {
        let rep = monotonicity_bound(shape, summary.min_rho, alpha)?;
        best = Some(rep.upper_bound);
    }
    if summary.convex && alpha < -summary.elastic_energy / PI {
        let rep = isoelastic_rayleigh(shape, alpha)?;
        let bound = rep.rayleigh_u.max(rep.rayleigh_v);
        best = Some(best.map_or(bound, |b| b.min(bound)));
    }
    Ok(best)
}

fn fill_row(spec: &SweepSpec, shape: &DomainShape, alpha: f64, row: &mut SweepRow) -> robin_exterior::Result<()> {
    row.lambda2_disk = lambda2_disk(row.r_matched, alpha)?.map(|e| e.eigenvalue);
    if spec.solvers.contains(&Solver::TrialBound) {
        row.lambda2_trial = best_trial_bound(shape, alpha)?;
    }
    if spec.solvers.contains(&Solver::Fem) {
        let mesh = spec.mesh.mesh_for(shape, alpha)?;
        let opts = SolverOptions {
            seed: spec.seed,
            ..SolverOptions::default()
        };
        let res = eig_exterior_with(shape, alpha, &mesh, 3, &opts)?;
        row.lambda2_fem = res.lambda2();
        row.truncation_warning = res.truncation_warning();
    }
    let (value, designated) = if spec.solvers.contains(&Solver::Fem) {
        (row.lambda2_fem, Some(Solver::Fem))
    } else if spec.solvers.contains(&Solver::TrialBound) {
        (row.lambda2_trial, Some(Solver::TrialBound))
    } else {
        (None, None)
    };
    row.designated = designated;
    row.diff = match (value, row.lambda2_disk) {
        (Some(v), Some(d)) => Some(v - d),
        _ => None,
    };
    Ok(())
}

/// Compute one row. Failures, including panics, are recorded in the row.
pub fn compute_row(spec: &SweepSpec, case: &ShapeCase, alpha: f64) -> SweepRow {
    let r = spec.target_radius;
    let shape = spec
        .constraint
        .normalize(&case.shape, r)
        .expect("normalization checked when the sweep file was parsed");
    let summary = shape.summarize();
    let hypotheses = HypothesisFlags::evaluate(&shape, r, alpha);
    let row = SweepRow {
        shape_id: case.id.clone(),
        eps: case.eps,
        perimeter: summary.perimeter,
        area: summary.area,
        elastic_energy: summary.elastic_energy,
        constraint: spec.constraint,
        r_matched: r,
        alpha,
        lambda2_trial: None,
        lambda2_fem: None,
        lambda2_disk: None,
        diff: None,
        designated: None,
        mode: RowMode::classify(spec.constraint, &shape, &hypotheses),
        hypotheses,
        critical: critical_coupling_bounds(&shape),
        truncation_warning: false,
        error: None,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let mut filled = row.clone();
        fill_row(spec, &shape, alpha, &mut filled).map(|_| filled)
    }));
    match outcome {
        Ok(Ok(filled)) => filled,
        Ok(Err(e)) => SweepRow {
            error: Some(e.to_string()),
            ..row
        },
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "worker panicked".into());
            SweepRow {
                error: Some(format!("panic: {msg}")),
                ..row
            }
        }
    }
}

fn row_order(a: &SweepRow, b: &SweepRow) -> std::cmp::Ordering {
    a.shape_id.cmp(&b.shape_id).then(a.alpha.total_cmp(&b.alpha))
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Sorted by `(shape_id, α)`.
    pub rows: Vec<SweepRow>,
}

impl SweepOutcome {
    pub fn violations(&self) -> Vec<(&SweepRow, String)> {
        self.rows
            .iter()
            .filter_map(|r| match r.verdict() {
                Verdict::Violation(msg) => Some((r, msg)),
                _ => None,
            })
            .collect()
    }
}

/// Run every (shape, α) job on a pool of `jobs` workers.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> anyhow::Result<SweepOutcome> {
    let cases = spec.cases();
    let work: Vec<(&ShapeCase, f64)> = cases
        .iter()
        .flat_map(|c| spec.alphas.iter().map(move |&a| (c, a)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let (tx, rx) = mpsc::channel();
    pool.scope(|s| {
        for &(case, alpha) in &work {
            let tx = tx.clone();
            s.spawn(move |_| {
                // the receiver outlives the scope
                let _ = tx.send(compute_row(spec, case, alpha));
            });
        }
    });
    drop(tx);
    let mut rows: Vec<SweepRow> = rx.into_iter().collect();
    rows.sort_by(row_order);
    Ok(SweepOutcome { rows })
}
