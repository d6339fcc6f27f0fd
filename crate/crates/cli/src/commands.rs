//! Subcommand implementations writing human-readable reports.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use robin_exterior::disk::{disk_spectrum_full, lambda1_disk};
use robin_exterior::fem::{
    assemble, convergence_study, doubling_ladder, solve_discretization, MeshSpec, SolverOptions,
};
use robin_exterior::trial::{
    critical_coupling_bounds, isoelastic_rayleigh, monotonicity_bound, monotonicity_bound_with_ground_state,
    FemGroundState,
};
use robin_exterior::{Constraint, DomainShape, Error as CoreError, HypothesisFlags};

use crate::manifest::{execute, Manifest, SpecSource};
use crate::output::num;
use crate::sweep::Verdict;
use crate::verify::{self, PerturbedBessel, Status, VerifyOptions};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn disk(out: &mut dyn Write, radius: f64, alpha: f64, csv: bool) -> anyhow::Result<()> {
    let s = disk_spectrum_full(radius, alpha)?;
    if csv {
        writeln!(out, "radius,alpha,xi,omega,lambda1,lambda2,alpha_star,n_star,N_alpha")?;
        let o = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), num);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(radius),
            num(alpha),
            num(s.xi),
            o(s.omega),
            num(s.lambda1()),
            o(s.lambda2()),
            num(s.critical_coupling()),
            s.n_star,
            s.negative_count()
        )?;
        return Ok(());
    }
    writeln!(out, "radius      {radius}")?;
    writeln!(out, "alpha       {alpha}")?;
    writeln!(out, "xi          {}", s.xi)?;
    writeln!(out, "omega       {}", opt(s.omega))?;
    writeln!(out, "lambda1     {}", s.lambda1())?;
    writeln!(out, "lambda2     {}", opt(s.lambda2()))?;
    writeln!(out, "alpha_star  {}", s.critical_coupling())?;
    writeln!(out, "n_star      {}", s.n_star)?;
    writeln!(out, "N_alpha     {}", s.negative_count())?;
    Ok(())
}

fn read_shape(path: &Path) -> anyhow::Result<DomainShape> {
    DomainShape::read_file(path).with_context(|| format!("reading shape {}", path.display()))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn shape_info(out: &mut dyn Write, path: &Path) -> anyhow::Result<()> {
    let shape = read_shape(path)?;
    let s = shape.summarize();
    writeln!(out, "modes              {}", shape.n_modes())?;
    writeln!(out, "samples            {}", shape.n_samples())?;
    writeln!(out, "perimeter L        {}", s.perimeter)?;
    writeln!(out, "area A             {}", s.area)?;
    writeln!(out, "elastic energy E   {}", s.elastic_energy)?;
    writeln!(out, "total curvature    {}", s.total_curvature)?;
    writeln!(out, "curvature range    [{}, {}]", s.min_curvature, s.max_curvature)?;
    writeln!(out, "rho range          [{}, {}]", s.min_rho, s.max_rho)?;
    writeln!(out, "convex             {}", s.convex)?;
    writeln!(out, "centrally sym.     {}", s.centrally_symmetric)?;
    for c in [Constraint::Area, Constraint::Perimeter, Constraint::Elastic] {
        writeln!(out, "R_{:<16}{}", c.name(), s.matched_radius(c))?;
    }
    let b = critical_coupling_bounds(&shape);
    writeln!(out, "alpha_star >=      (lower bounds on the critical coupling)")?;
    writeln!(out, "  from min rho     {}", opt(b.from_inscribed))?;
    writeln!(out, "  from E           {}", opt(b.from_elastic))?;
    writeln!(out, "  from in-radius   {}", opt(b.from_inradius))?;
    let gage = if s.convex { pass(s.gage_holds()) } else { "n/a (not convex)" };
    writeln!(out, "Gage E >= piL/(2A) {gage}")?;
    writeln!(out, "E^2 A >= pi^3      {}", pass(s.bh_holds()))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    Monotonicity,
    Isoelastic,
}

#[derive(Debug, Clone)]
pub struct BoundArgs {
    pub shape: PathBuf,
    pub alpha: f64,
    pub mode: BoundMode,
    /// Comparison radius for the monotonicity bound; defaults to `min ρ`.
    pub radius: Option<f64>,
    /// Measure orthogonality against a finite-element ground state.
    pub fem_ground_state: bool,
    /// Append a CSV row to this file.
    pub csv: Option<PathBuf>,
}

const BOUND_COLUMNS: &str = "mode,shape,alpha,radius,lambda1_disk,lambda2_disk,rayleigh_u,upper_bound,diff,\
boundary_term,jensen_margin,orthogonality,flags";

struct BoundRow {
    mode: &'static str,
    radius: f64,
    lambda1_disk: f64,
    lambda2_disk: f64,
    rayleigh_u: Option<f64>,
    upper_bound: f64,
    boundary_term: Option<f64>,
    jensen_margin: Option<f64>,
    orthogonality: f64,
    flags: String,
}

fn append_bound_csv(path: &Path, shape: &Path, alpha: f64, row: &BoundRow) -> anyhow::Result<()> {
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(f, "# schema=1\n{BOUND_COLUMNS}")?;
    }
    let o = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), num);
    let name = shape.display().to_string().replace(',', "_");
    writeln!(
        f,
        "{},{name},{},{},{},{},{},{},{},{},{},{},{}",
        row.mode,
        num(alpha),
        num(row.radius),
        num(row.lambda1_disk),
        num(row.lambda2_disk),
        o(row.rayleigh_u),
        num(row.upper_bound),
        num(row.upper_bound - row.lambda2_disk),
        o(row.boundary_term),
        o(row.jensen_margin),
        num(row.orthogonality),
        row.flags
    )?;
    Ok(())
}

fn hypothesis_table(out: &mut dyn Write, flags: &HypothesisFlags) -> std::io::Result<()> {
    writeln!(out, "hypotheses         {}", flags.encode())
}

fn fem_ground_state(shape: &DomainShape, alpha: f64) -> anyhow::Result<FemGroundState> {
    let mesh = MeshSpec::default_for(shape, alpha)?;
    let disc = assemble(shape, alpha, &mesh)?;
    let res = solve_discretization(&disc, mesh, 1, &SolverOptions::default())?;
    let vector = res.vectors.into_iter().next().context("no negative eigenvalue found")?;
    Ok(FemGroundState { disc, vector })
}

pub fn bound(out: &mut dyn Write, args: &BoundArgs) -> anyhow::Result<()> {
    let shape = read_shape(&args.shape)?;
    let alpha = args.alpha;
    let row = match args.mode {
        BoundMode::Monotonicity => {
            let radius = args.radius.unwrap_or_else(|| shape.min_rho());
            let flags = HypothesisFlags::evaluate(&shape, radius, alpha);
            hypothesis_table(out, &flags)?;
            let failed = flags.monotonicity_failures();
            if !failed.is_empty() {
                bail!("monotonicity bound not applicable; failed hypotheses: {}", failed.join(", "));
            }
            let rep = if args.fem_ground_state {
                monotonicity_bound_with_ground_state(&shape, radius, alpha, fem_ground_state(&shape, alpha)?)?
            } else {
                monotonicity_bound(&shape, radius, alpha)?
            };
            let l1 = lambda1_disk(radius, alpha)?.eigenvalue;
            writeln!(out, "mode               monotonicity")?;
            writeln!(out, "alpha              {}", rep.alpha)?;
            writeln!(out, "disk radius R      {}", rep.disk_radius)?;
            writeln!(out, "omega              {}", rep.omega)?;
            writeln!(out, "lambda2(disk)      {}", rep.lambda2_disk)?;
            writeln!(out, "branch             {}", rep.branch)?;
            writeln!(out, "gamma_omega        {}", rep.gamma_omega)?;
            writeln!(out, "boundary term      {}", rep.boundary_term)?;
            writeln!(out, "  radial estimate  {}", rep.estimate_radial)?;
            writeln!(out, "  disk estimate    {}", rep.estimate_disk)?;
            writeln!(out, "trial norm^2       {}", rep.trial_norm_sq)?;
            writeln!(out, "upper bound        {}", rep.upper_bound)?;
            writeln!(out, "bound - disk       {}", rep.upper_bound - rep.lambda2_disk)?;
            writeln!(
                out,
                "orthogonality      l2 {:.3e}  grad {:.3e}  trace {:.3e}  ({})",
                rep.orthogonality.l2,
                rep.orthogonality.gradient,
                rep.orthogonality.trace,
                rep.orthogonality.source.name()
            )?;
            BoundRow {
                mode: "monotonicity",
                radius,
                lambda1_disk: l1,
                lambda2_disk: rep.lambda2_disk,
                rayleigh_u: None,
                upper_bound: rep.upper_bound,
                boundary_term: Some(rep.boundary_term),
                jensen_margin: None,
                orthogonality: rep.orthogonality.max(),
                flags: flags.encode(),
            }
        }
        BoundMode::Isoelastic => {
            let radius = std::f64::consts::PI / shape.elastic_energy();
            let flags = HypothesisFlags::evaluate(&shape, radius, alpha);
            hypothesis_table(out, &flags)?;
            let failed = flags.isoelastic_failures();
            if !failed.is_empty() {
                bail!("isoelastic bound not applicable; failed hypotheses: {}", failed.join(", "));
            }
            let rep = isoelastic_rayleigh(&shape, alpha)?;
            writeln!(out, "mode               isoelastic")?;
            writeln!(out, "alpha              {}", rep.alpha)?;
            writeln!(out, "disk radius R      {}", rep.radius)?;
            writeln!(out, "perimeter L        {}", rep.perimeter)?;
            writeln!(out, "R[u]               {}", rep.rayleigh_u)?;
            writeln!(out, "lambda1(disk)      {}", rep.lambda1_disk)?;
            writeln!(out, "R[v]               {}", rep.rayleigh_v)?;
            writeln!(out, "  surrogate        {}", rep.rayleigh_v_surrogate)?;
            writeln!(out, "lambda2(disk)      {}", rep.lambda2_disk)?;
            writeln!(out, "R[v] - disk        {}", rep.rayleigh_v - rep.lambda2_disk)?;
            writeln!(out, "curvature term     {}", rep.kappa_term)?;
            writeln!(out, "  surrogate        {}", rep.kappa_surrogate)?;
            writeln!(out, "Jensen margin      {}", rep.jensen_margin)?;
            writeln!(
                out,
                "orthogonality      l2 {:.3e}  grad {:.3e}  trace {:.3e}  ({})",
                rep.orthogonality.l2,
                rep.orthogonality.gradient,
                rep.orthogonality.trace,
                rep.orthogonality.source.name()
            )?;
            BoundRow {
                mode: "isoelastic",
                radius,
                lambda1_disk: rep.lambda1_disk,
                lambda2_disk: rep.lambda2_disk,
                rayleigh_u: Some(rep.rayleigh_u),
                upper_bound: rep.rayleigh_v,
                boundary_term: None,
                jensen_margin: Some(rep.jensen_margin),
                orthogonality: rep.orthogonality.max(),
                flags: flags.encode(),
            }
        }
    };
    if let Some(path) = &args.csv {
        append_bound_csv(path, &args.shape, alpha, &row)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct EigArgs {
    pub shape: PathBuf,
    pub alpha: f64,
    pub k: usize,
    pub n_theta: usize,
    pub n_t: usize,
    pub grading: f64,
    /// `None` selects the default depth for the shape and coupling.
    pub depth: Option<f64>,
    pub study: Option<usize>,
    pub max_iter: usize,
    pub seed: u64,
    pub dump_matrices: Option<PathBuf>,
}

fn retry_hint(e: &CoreError) -> Option<&'static str> {
    match e {
        CoreError::NoConvergence { .. } => Some("try --max-iter with a larger value or a coarser mesh"),
        CoreError::Factorization { .. } => Some("the shift search gave up; check that alpha is moderate for this shape"),
        CoreError::InvalidMesh(_) => Some("n_theta must be even and >= 64, n_t >= 32, grading in [1, 1.3]"),
        _ => None,
    }
}

fn with_hint(e: CoreError) -> anyhow::Error {
    match retry_hint(&e) {
        Some(h) => anyhow::anyhow!("{e} (hint: {h})"),
        None => e.into(),
    }
}

pub fn eig(out: &mut dyn Write, args: &EigArgs) -> anyhow::Result<()> {
    let shape = read_shape(&args.shape)?;
    let alpha = args.alpha;
    if !(alpha < 0.0) {
        bail!("alpha must be negative, got {alpha}");
    }
    let depth = match args.depth {
        Some(d) => d,
        None => MeshSpec::default_for(&shape, alpha).map_err(with_hint)?.depth,
    };
    let mesh = MeshSpec::new(args.n_theta, args.n_t, depth, args.grading).map_err(with_hint)?;
    let exact = if shape.is_disk() {
        Some(disk_spectrum_full(shape.a0(), alpha)?.eigenvalues())
    } else {
        None
    };

    if let Some(levels) = args.study {
        if levels < 3 {
            bail!("--study needs at least 3 levels");
        }
        let ladder = doubling_ladder(mesh, levels);
        let study = convergence_study(&shape, alpha, &ladder, args.k).map_err(with_hint)?;
        for level in &study.levels {
            let vals: Vec<String> = level.eigenvalues.iter().map(|v| format!("{v:.12}")).collect();
            writeln!(out, "{:<40} {}", level.mesh.to_string(), vals.join("  "))?;
        }
        for (i, (p, x)) in study.orders.iter().zip(&study.extrapolated).enumerate() {
            write!(out, "lambda{}: order {p:.3}, extrapolated {x:.12}", i + 1)?;
            match exact.as_ref().and_then(|e| e.get(i)) {
                Some(e) => writeln!(out, ", exact {e:.12}, rel err {:.3e}", ((x - e) / e).abs())?,
                None => writeln!(out)?,
            }
        }
        return Ok(());
    }

    let disc = assemble(&shape, alpha, &mesh).map_err(with_hint)?;
    if let Some(dir) = &args.dump_matrices {
        std::fs::create_dir_all(dir)?;
        let a = disc.robin_matrix();
        a.write_triplets(std::io::BufWriter::new(std::fs::File::create(dir.join("stiffness.txt"))?))?;
        disc.mass
            .write_triplets(std::io::BufWriter::new(std::fs::File::create(dir.join("mass.txt"))?))?;
        writeln!(out, "matrices           {} (row col value, 0-based)", dir.display())?;
    }
    let opts = SolverOptions {
        max_iter: args.max_iter,
        seed: args.seed,
        ..SolverOptions::default()
    };
    let res = solve_discretization(&disc, mesh, args.k, &opts).map_err(with_hint)?;
    writeln!(out, "mesh               {}", res.mesh)?;
    writeln!(out, "dofs               {}", res.grid.n_dofs())?;
    writeln!(out, "iterations         {}", res.iterations)?;
    writeln!(out, "final shift        {}", res.shift)?;
    writeln!(out, "negative found     {} of {} requested", res.n_converged, args.k)?;
    for (i, (v, r)) in res.eigenvalues.iter().zip(&res.residual_norms).enumerate() {
        write!(out, "lambda{:<3} {v:>22.15}  residual {r:.2e}", i + 1)?;
        match exact.as_ref().and_then(|e| e.get(i)) {
            Some(e) => writeln!(out, "  exact {e:.15}  rel err {:.3e}", ((v - e) / e).abs())?,
            None => writeln!(out)?,
        }
    }
    let clusters: Vec<String> = res
        .clusters
        .iter()
        .map(|c| format!("{{{}}}", c.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    writeln!(out, "clusters           {}", clusters.join(" "))?;
    writeln!(out, "truncation         {:.3e}", res.truncation_indicator)?;
    if res.truncation_warning() {
        writeln!(out, "warning: eigenvector mass near the outer boundary; increase --depth")?;
    }
    Ok(())
}

pub enum SweepInput<'a> {
    Spec(&'a Path),
    Manifest(&'a Path),
}

/// Run a sweep and print a summary. Returns whether the run is clean.
pub fn sweep(out: &mut dyn Write, input: SweepInput<'_>, out_dir: Option<&Path>, jobs: usize) -> anyhow::Result<bool> {
    let (spec, source, default_dir) = match input {
        SweepInput::Spec(path) => {
            let (spec, source) = SpecSource::read(path)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let dir = base.join(&spec.output_dir);
            (spec, source, dir)
        }
        SweepInput::Manifest(path) => {
            let m = Manifest::read(path)?;
            let spec = m.source.parse()?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default().join("rerun");
            (spec, m.source, dir)
        }
    };
    let dir = out_dir.map(Path::to_path_buf).unwrap_or(default_dir);
    let run = execute(&spec, source, &dir, jobs)?;
    let rows = &run.outcome.rows;
    let count = |f: &dyn Fn(&Verdict) -> bool| rows.iter().filter(|r| f(&r.verdict())).count();
    writeln!(out, "sweep              {}", spec.name)?;
    writeln!(out, "rows               {}", rows.len())?;
    writeln!(out, "asserted, passed   {}", count(&|v| *v == Verdict::Pass))?;
    writeln!(out, "recorded only      {}", count(&|v| *v == Verdict::Recorded))?;
    writeln!(out, "output             {}", run.dir.display())?;
    let violations = run.outcome.violations();
    for (row, msg) in &violations {
        writeln!(out, "VIOLATION {} alpha={}: {msg}", row.shape_id, row.alpha)?;
    }
    Ok(violations.is_empty())
}

/// Run the scoreboard. Returns whether every selected criterion passed.
pub fn verify(out: &mut dyn Write, quick: bool, jobs: usize, perturb_bessel: Option<f64>) -> anyhow::Result<bool> {
    let opts = VerifyOptions { quick, jobs };
    let standard = robin_exterior::StandardBessel;
    let perturbed = perturb_bessel.map(|relative| PerturbedBessel { relative });
    let provider: &dyn robin_exterior::BesselProvider = match &perturbed {
        Some(p) => p,
        None => &standard,
    };
    let mut io_error = None;
    let outcomes = verify::run(provider, opts, |o| {
        if let Err(e) = writeln!(out, "{o}").and_then(|_| out.flush()) {
            io_error.get_or_insert(e);
        }
    });
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let failed = outcomes.iter().filter(|o| o.status == Status::Fail).count();
    let passed = outcomes.iter().filter(|o| o.status == Status::Pass).count();
    writeln!(out, "{passed} passed, {failed} failed, {} skipped", outcomes.len() - passed - failed)?;
    Ok(failed == 0)
}
