//! Sweep definition files.
//!
//! ```text
//! name = elastic-cos2            # optional, default "sweep"
//! seed = 0                       # optional, start vectors of the eigensolver
//!
//! [family]
//! kind = cos2k-perturbation      # ρ = 1 + ε cos(2kθ)
//! k = 1
//! eps = 0, 0.05, 0.1             # or eps_start / eps_stop / eps_step
//! n_samples = 1024               # optional
//!
//! [constraint]
//! kind = elastic                 # area | perimeter | elastic | inclusion
//! target_radius = 1              # optional, default 1
//!
//! [alpha]
//! values = -1.5, -2, -3
//!
//! [solvers]
//! use = exact-disk, trial-bound, fem
//!
//! [mesh]                         # optional
//! n_theta = 256
//! n_t = 128
//! grading = 1.05
//! depth = auto                   # or a length
//!
//! [output]                       # optional
//! dir = out
//! plot = true
//! ```
//!
//! The `coefficient-list` family takes one key per shape,
//! `shape.<id> = a0 a1 b1 a2 b2 …`. The `file` family takes
//! `paths = a.txt, b.txt` (shape files, relative to the sweep file); the shape
//! id is the file stem.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use robin_exterior::fem::MeshSpec;
use robin_exterior::{Constraint, DomainShape};

use crate::config::{Config, ConfigError, Result};

pub const DEFAULT_SAMPLES: usize = 1024;

fn error(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepConstraint {
    Matched(Constraint),
    /// Compared with the largest centred disk inside the shape.
    Inclusion,
}

impl SweepConstraint {
    pub fn name(self) -> &'static str {
        match self {
            SweepConstraint::Matched(c) => c.name(),
            SweepConstraint::Inclusion => "inclusion",
        }
    }

    /// Dilate `shape` so that its comparison radius equals `target`.
    pub fn normalize(self, shape: &DomainShape, target: f64) -> robin_exterior::Result<DomainShape> {
        match self {
            SweepConstraint::Matched(c) => shape.normalize(c, target),
            SweepConstraint::Inclusion => shape.normalize_inradius(target),
        }
    }
}

impl fmt::Display for SweepConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepConstraint {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inclusion" => Ok(SweepConstraint::Inclusion),
            other => other.parse().map(SweepConstraint::Matched),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Solver {
    ExactDisk,
    TrialBound,
    Fem,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::ExactDisk => "exact-disk",
            Solver::TrialBound => "trial-bound",
            Solver::Fem => "fem",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact-disk" => Ok(Solver::ExactDisk),
            "trial-bound" => Ok(Solver::TrialBound),
            "fem" => Ok(Solver::Fem),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Depth {
    /// [`MeshSpec::default_for`] per shape and coupling.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    pub n_theta: usize,
    pub n_t: usize,
    pub grading: f64,
    pub depth: Depth,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            n_theta: 256,
            n_t: 128,
            grading: 1.05,
            depth: Depth::Auto,
        }
    }
}

impl MeshConfig {
    pub fn mesh_for(&self, shape: &DomainShape, alpha: f64) -> robin_exterior::Result<MeshSpec> {
        let depth = match self.depth {
            Depth::Fixed(d) => d,
            Depth::Auto => MeshSpec::default_for(shape, alpha)?.depth,
        };
        MeshSpec::new(self.n_theta, self.n_t, depth, self.grading)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `ρ = 1 + ε cos(2kθ)`.
    Cos2k { k: usize, eps: Vec<f64>, n_samples: usize },
    Coefficients { shapes: Vec<(String, DomainShape)> },
    Files { shapes: Vec<(String, String, DomainShape)> },
}

impl Family {
    pub fn kind(&self) -> &'static str {
        match self {
            Family::Cos2k { .. } => "cos2k-perturbation",
            Family::Coefficients { .. } => "coefficient-list",
            Family::Files { .. } => "file",
        }
    }

    /// Files referenced by the family, as written in the sweep file.
    pub fn paths(&self) -> Vec<&str> {
        match self {
            Family::Files { shapes } => shapes.iter().map(|(_, p, _)| p.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

/// A member of the family before normalization.
#[derive(Debug, Clone)]
pub struct ShapeCase {
    pub id: String,
    pub eps: f64,
    pub shape: DomainShape,
}

/// Relative sup-distance `max |ρ/a0 − 1|` on the sample grid.
pub fn deviation(shape: &DomainShape) -> f64 {
    let n = shape.n_samples();
    (0..n)
        .map(|i| (shape.rho(2.0 * PI * i as f64 / n as f64) / shape.a0() - 1.0).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub seed: u64,
    pub family: Family,
    pub constraint: SweepConstraint,
    pub target_radius: f64,
    pub alphas: Vec<f64>,
    pub solvers: BTreeSet<Solver>,
    pub mesh: MeshConfig,
    pub output_dir: PathBuf,
    pub plot: bool,
}

impl SweepSpec {
    /// Parse spec text. `load` returns the contents of a shape file named in
    /// a `file` family.
    pub fn parse(text: &str, load: &mut dyn FnMut(&str) -> std::result::Result<String, String>) -> Result<Self> {
        let cfg = Config::parse(text)?;
        cfg.only_sections(&["family", "constraint", "alpha", "solvers", "mesh", "output"])?;
        let root = cfg.root();
        root.only_keys(&["name", "seed"], &[])?;
        let name = root.get("name").unwrap_or("sweep").to_string();
        let seed = root.parse_or("seed", 0u64)?;

        let family = parse_family(&cfg, load)?;

        let c = cfg.require("constraint")?;
        c.only_keys(&["kind", "target_radius"], &[])?;
        let constraint: SweepConstraint = c.parse_required("kind")?;
        let target_radius: f64 = c.parse_or("target_radius", 1.0)?;
        if !(target_radius > 0.0 && target_radius.is_finite()) {
            return Err(error(c.require("target_radius")?.line, "target_radius must be positive"));
        }

        let a = cfg.require("alpha")?;
        a.only_keys(&["values"], &[])?;
        let line = a.require("values")?.line;
        let alphas: Vec<f64> = a.parse_list("values")?.unwrap_or_default();
        if alphas.is_empty() {
            return Err(error(line, "alpha grid is empty"));
        }
        if let Some(bad) = alphas.iter().find(|v| !(**v < 0.0 && v.is_finite())) {
            return Err(error(line, format!("couplings must be negative, got {bad}")));
        }

        let solvers = match cfg.section("solvers") {
            None => [Solver::ExactDisk, Solver::TrialBound, Solver::Fem].into_iter().collect(),
            Some(s) => {
                s.only_keys(&["use"], &[])?;
                let list: Vec<Solver> = s.parse_list("use")?.unwrap_or_default();
                if list.is_empty() {
                    return Err(error(s.line, "no solvers selected"));
                }
                list.into_iter().collect()
            }
        };

        let mut mesh = MeshConfig::default();
        if let Some(m) = cfg.section("mesh") {
            m.only_keys(&["n_theta", "n_t", "grading", "depth"], &[])?;
            mesh.n_theta = m.parse_or("n_theta", mesh.n_theta)?;
            mesh.n_t = m.parse_or("n_t", mesh.n_t)?;
            mesh.grading = m.parse_or("grading", mesh.grading)?;
            if let Some(e) = m.entry("depth") {
                mesh.depth = match e.value.as_str() {
                    "auto" => Depth::Auto,
                    v => Depth::Fixed(
                        v.parse()
                            .map_err(|_| error(e.line, format!("depth must be `auto` or a length, got `{v}`")))?,
                    ),
                };
            }
            let probe = match mesh.depth {
                Depth::Fixed(d) => d,
                Depth::Auto => 1.0,
            };
            MeshSpec::new(mesh.n_theta, mesh.n_t, probe, mesh.grading).map_err(|e| error(m.line, e.to_string()))?;
        }

        let (mut output_dir, mut plot) = (PathBuf::from("out"), true);
        if let Some(o) = cfg.section("output") {
            o.only_keys(&["dir", "plot"], &[])?;
            if let Some(d) = o.get("dir") {
                output_dir = PathBuf::from(d);
            }
            plot = o.parse_or("plot", true)?;
        }

        let spec = Self {
            name,
            seed,
            family,
            constraint,
            target_radius,
            alphas,
            solvers,
            mesh,
            output_dir,
            plot,
        };
        // every member must stay a valid shape after normalization
        let family_line = cfg.require("family")?.line;
        for case in spec.cases() {
            spec.constraint
                .normalize(&case.shape, spec.target_radius)
                .map_err(|e| error(family_line, format!("shape {}: {e}", case.id)))?;
        }
        Ok(spec)
    }

    /// Members of the family in spec order.
    pub fn cases(&self) -> Vec<ShapeCase> {
        match &self.family {
            Family::Cos2k { k, eps, n_samples } => eps
                .iter()
                .map(|&e| {
                    let mut cos = vec![0.0; 2 * k];
                    cos[2 * k - 1] = e;
                    ShapeCase {
                        id: format!("cos{}_eps{:.4}", 2 * k, e),
                        eps: e,
                        shape: DomainShape::with_samples(1.0, cos, vec![0.0; 2 * k], *n_samples)
                            .expect("validated when parsed"),
                    }
                })
                .collect(),
            Family::Coefficients { shapes } => shapes
                .iter()
                .map(|(id, s)| ShapeCase {
                    id: id.clone(),
                    eps: deviation(s),
                    shape: s.clone(),
                })
                .collect(),
            Family::Files { shapes } => shapes
                .iter()
                .map(|(id, _, s)| ShapeCase {
                    id: id.clone(),
                    eps: deviation(s),
                    shape: s.clone(),
                })
                .collect(),
        }
    }
}

fn parse_family(cfg: &Config, load: &mut dyn FnMut(&str) -> std::result::Result<String, String>) -> Result<Family> {
    let f = cfg.require("family")?;
    let kind = f.require("kind")?;
    match kind.value.as_str() {
        "cos2k-perturbation" => {
            f.only_keys(&["kind", "k", "eps", "eps_start", "eps_stop", "eps_step", "n_samples"], &[])?;
            let k: usize = f.parse_required("k")?;
            if k == 0 {
                return Err(error(f.require("k")?.line, "k must be at least 1"));
            }
            let n_samples = f.parse_or("n_samples", DEFAULT_SAMPLES)?;
            let eps = match f.parse_list::<f64>("eps")? {
                Some(list) => {
                    if f.entry("eps_start").is_some() {
                        return Err(error(f.require("eps_start")?.line, "give either `eps` or an eps range"));
                    }
                    list
                }
                None => {
                    let start: f64 = f.parse_required("eps_start")?;
                    let stop: f64 = f.parse_required("eps_stop")?;
                    let step: f64 = f.parse_required("eps_step")?;
                    let line = f.require("eps_step")?.line;
                    if !(step > 0.0) || stop < start {
                        return Err(error(line, "eps range needs step > 0 and stop >= start"));
                    }
                    let count = ((stop - start) / step + 1e-9).floor() as usize;
                    (0..=count).map(|i| start + i as f64 * step).collect()
                }
            };
            if eps.is_empty() {
                return Err(error(f.line, "empty eps list"));
            }
            let line = f.entry("eps").or(f.entry("eps_start")).map_or(f.line, |e| e.line);
            for &e in &eps {
                let mut cos = vec![0.0; 2 * k];
                cos[2 * k - 1] = e;
                DomainShape::with_samples(1.0, cos, vec![0.0; 2 * k], n_samples)
                    .map_err(|err| error(line, format!("eps = {e}: {err}")))?;
            }
            Ok(Family::Cos2k { k, eps, n_samples })
        }
        "coefficient-list" => {
            f.only_keys(&["kind", "n_samples"], &["shape."])?;
            let n_samples = f.parse_or("n_samples", DEFAULT_SAMPLES)?;
            let mut shapes = Vec::new();
            for (id, e) in f.prefixed("shape.") {
                let vals = e
                    .value
                    .split_whitespace()
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| error(e.line, format!("shape.{id}: expected numbers")))?;
                if vals.is_empty() || vals.len() % 2 == 0 {
                    return Err(error(e.line, format!("shape.{id}: expected `a0 a1 b1 …` (odd count)")));
                }
                let cos = vals[1..].iter().step_by(2).copied().collect();
                let sin = vals[2..].iter().step_by(2).copied().collect();
                let shape = DomainShape::with_samples(vals[0], cos, sin, n_samples)
                    .map_err(|err| error(e.line, format!("shape.{id}: {err}")))?;
                shapes.push((id.to_string(), shape));
            }
            if shapes.is_empty() {
                return Err(error(f.line, "coefficient-list family has no `shape.<id>` entries"));
            }
            Ok(Family::Coefficients { shapes })
        }
        "file" => {
            f.only_keys(&["kind", "paths"], &[])?;
            let e = f.require("paths")?;
            let mut shapes: Vec<(String, String, DomainShape)> = Vec::new();
            for p in e.value.split(',').map(str::trim) {
                if p.is_empty() {
                    return Err(error(e.line, "empty path in `paths`"));
                }
                let text = load(p).map_err(|m| error(e.line, m))?;
                let shape = DomainShape::parse(&text).map_err(|err| error(e.line, format!("{p}: {err}")))?;
                let id = Path::new(p)
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or(p)
                    .to_string();
                if shapes.iter().any(|(other, _, _)| *other == id) {
                    return Err(error(e.line, format!("duplicate shape id `{id}`")));
                }
                shapes.push((id, p.to_string(), shape));
            }
            Ok(Family::Files { shapes })
        }
        other => Err(error(
            kind.line,
            format!("unknown family `{other}` (cos2k-perturbation, coefficient-list, file)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_files(p: &str) -> std::result::Result<String, String> {
        Err(format!("{p}: not available"))
    }

    const BASIC: &str = "\
[family]
kind = cos2k-perturbation
k = 2
eps_start = 0
eps_stop = 0.2
eps_step = 0.05
[constraint]
kind = inclusion
[alpha]
values = -1.5, -2
";

    #[test]
    fn parses_defaults_and_ranges() {
        let s = SweepSpec::parse(BASIC, &mut no_files).unwrap();
        assert_eq!(s.name, "sweep");
        assert_eq!(s.constraint, SweepConstraint::Inclusion);
        assert_eq!(s.alphas, vec![-1.5, -2.0]);
        assert_eq!(s.solvers.len(), 3);
        assert_eq!(s.mesh, MeshConfig::default());
        let cases = s.cases();
        assert_eq!(cases.len(), 5);
        assert_eq!(cases[0].id, "cos4_eps0.0000");
        assert!((cases[4].eps - 0.2).abs() < 1e-12);
        assert!((deviation(&cases[3].shape) - cases[3].eps).abs() < 1e-12);
    }

    #[test]
    fn coefficient_list_and_files() {
        let text = "[family]\nkind = coefficient-list\nshape.a = 1 0 0.1\nshape.b = 2 0.1 0 0.2 0\n\
                    [constraint]\nkind = area\n[alpha]\nvalues = -3\n[solvers]\nuse = fem\n";
        let s = SweepSpec::parse(text, &mut no_files).unwrap();
        let cases = s.cases();
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[1].shape.cos_coeffs(), &[0.1, 0.2]);
        assert_eq!(s.solvers.iter().copied().collect::<Vec<_>>(), vec![Solver::Fem]);

        let text = "[family]\nkind = file\npaths = dir/q.txt\n[constraint]\nkind = elastic\n[alpha]\nvalues = -2\n";
        let disk = DomainShape::cos_mode(2, 0.1).unwrap().to_file_string();
        let s = SweepSpec::parse(text, &mut |p| {
            assert_eq!(p, "dir/q.txt");
            Ok(disk.clone())
        })
        .unwrap();
        assert_eq!(s.cases()[0].id, "q");
        assert_eq!(s.family.paths(), vec!["dir/q.txt"]);
    }

    #[test]
    fn rejects_invalid_specs_with_lines() {
        let bad_alpha = BASIC.replace("-1.5, -2", "-1.5, 0.5");
        assert_eq!(SweepSpec::parse(&bad_alpha, &mut no_files).unwrap_err().line, 10);
        let empty = BASIC.replace("values = -1.5, -2", "values =");
        assert!(SweepSpec::parse(&empty, &mut no_files).is_err());
        let unknown = format!("{BASIC}[mesh]\nn_theta = 256\ncells = 3\n");
        assert_eq!(SweepSpec::parse(&unknown, &mut no_files).unwrap_err().line, 13);
        let negative = BASIC.replace("eps_stop = 0.2", "eps_stop = 1.2");
        assert!(SweepSpec::parse(&negative, &mut no_files).is_err());
        let missing = "[family]\nkind = file\npaths = gone.txt\n[constraint]\nkind = area\n[alpha]\nvalues = -2\n";
        assert_eq!(SweepSpec::parse(missing, &mut no_files).unwrap_err().line, 3);
        let family = BASIC.replace("cos2k-perturbation", "spline");
        assert_eq!(SweepSpec::parse(&family, &mut no_files).unwrap_err().line, 2);
    }
}
