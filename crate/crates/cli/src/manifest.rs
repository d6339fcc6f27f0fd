//! Sweep manifests: provenance header plus the verbatim inputs, so that a
//! sweep can be re-run from the manifest file alone.
//!
//! ```text
//! # robin-ext sweep manifest
//! manifest = 1
//! input_sha256 = …
//! …
//! --- spec ---
//! <spec text>
//! --- shape shapes/a.txt ---
//! <shape file text>
//! --- end ---
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::output;
use crate::spec::SweepSpec;
use crate::sweep::{run_sweep, SweepOutcome};

pub const MANIFEST_VERSION: u32 = 1;
pub const CSV_NAME: &str = "results.csv";
pub const SVG_NAME: &str = "diff.svg";
pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn code_version() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// Spec text together with the shape files it references.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecSource {
    pub text: String,
    /// `(path as written in the sweep file, contents)`.
    pub shapes: Vec<(String, String)>,
}

impl SpecSource {
    /// Read a spec file; shape files resolve relative to its directory.
    pub fn read(path: &Path) -> anyhow::Result<(SweepSpec, SpecSource)> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut shapes = Vec::new();
        let spec = SweepSpec::parse(&text, &mut |p| {
            let contents = std::fs::read_to_string(base.join(p)).map_err(|e| format!("{p}: {e}"))?;
            shapes.push((p.to_string(), contents.clone()));
            Ok(contents)
        })
        .map_err(|e| anyhow!("{}: {e}", path.display()))?;
        Ok((spec, SpecSource { text, shapes }))
    }

    /// Parse using the embedded shape files only.
    pub fn parse(&self) -> anyhow::Result<SweepSpec> {
        SweepSpec::parse(&self.text, &mut |p| {
            self.shapes
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| format!("{p}: not embedded in the manifest"))
        })
        .map_err(|e| anyhow!("embedded spec: {e}"))
    }

    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.text.as_bytes());
        for (p, t) in &self.shapes {
            h.update([0u8]);
            h.update(p.as_bytes());
            h.update([0u8]);
            h.update(t.as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub name: String,
    pub input_sha256: String,
    pub code_version: String,
    pub started: String,
    pub finished: String,
    pub elapsed_seconds: f64,
    pub jobs: usize,
    pub rows: usize,
    pub violations: usize,
    pub source: SpecSource,
}

fn check_block(label: &str, text: &str) -> anyhow::Result<()> {
    if text.lines().any(|l| l.starts_with("--- ")) {
        bail!("{label} contains a line starting with `--- `, which the manifest format reserves");
    }
    Ok(())
}

impl Manifest {
    pub fn render(&self) -> anyhow::Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "# robin-ext sweep manifest");
        let _ = writeln!(s, "manifest = {MANIFEST_VERSION}");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "input_sha256 = {}", self.input_sha256);
        let _ = writeln!(s, "code_version = {}", self.code_version);
        let _ = writeln!(s, "started = {}", self.started);
        let _ = writeln!(s, "finished = {}", self.finished);
        let _ = writeln!(s, "elapsed_seconds = {:.3}", self.elapsed_seconds);
        let _ = writeln!(s, "jobs = {}", self.jobs);
        let _ = writeln!(s, "rows = {}", self.rows);
        let _ = writeln!(s, "violations = {}", self.violations);
        let _ = writeln!(s, "csv = {CSV_NAME}");
        check_block("spec", &self.source.text)?;
        let _ = writeln!(s, "--- spec ---");
        s.push_str(&self.source.text);
        if !self.source.text.ends_with('\n') {
            s.push('\n');
        }
        for (p, t) in &self.source.shapes {
            check_block(p, t)?;
            let _ = writeln!(s, "--- shape {p} ---");
            s.push_str(t);
            if !t.ends_with('\n') {
                s.push('\n');
            }
        }
        let _ = writeln!(s, "--- end ---");
        Ok(s)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let (header, body) = text
            .split_once("\n--- spec ---\n")
            .ok_or_else(|| anyhow!("manifest has no `--- spec ---` block"))?;
        let cfg = Config::parse(header).map_err(|e| anyhow!("manifest header: {e}"))?;
        let h = cfg.root();
        let version: u32 = h.parse_required("manifest").map_err(|e| anyhow!("manifest header: {e}"))?;
        if version != MANIFEST_VERSION {
            bail!("unsupported manifest version {version}");
        }
        let field = |k: &str| -> anyhow::Result<String> {
            h.get(k)
                .map(str::to_string)
                .ok_or_else(|| anyhow!("manifest header lacks `{k}`"))
        };
        let number = |k: &str| -> anyhow::Result<f64> {
            field(k)?.parse().map_err(|_| anyhow!("manifest field `{k}` is not a number"))
        };

        let mut blocks: Vec<(String, String)> = vec![("spec".into(), String::new())];
        let mut ended = false;
        for line in body.lines() {
            if let Some(rest) = line.strip_prefix("--- ") {
                let label = rest
                    .strip_suffix(" ---")
                    .ok_or_else(|| anyhow!("malformed block marker `{line}`"))?;
                if label == "end" {
                    ended = true;
                    break;
                }
                blocks.push((label.to_string(), String::new()));
                continue;
            }
            let text = &mut blocks.last_mut().expect("spec block").1;
            text.push_str(line);
            text.push('\n');
        }
        if !ended {
            bail!("manifest is truncated (no `--- end ---`)");
        }
        let mut it = blocks.into_iter();
        let (_, spec_text) = it.next().expect("spec block");
        let shapes = it
            .map(|(label, t)| {
                label
                    .strip_prefix("shape ")
                    .map(|p| (p.to_string(), t))
                    .ok_or_else(|| anyhow!("unknown manifest block `{label}`"))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let source = SpecSource {
            text: spec_text,
            shapes,
        };
        let manifest = Self {
            name: field("name")?,
            input_sha256: field("input_sha256")?,
            code_version: field("code_version")?,
            started: field("started")?,
            finished: field("finished")?,
            elapsed_seconds: number("elapsed_seconds")?,
            jobs: number("jobs")? as usize,
            rows: number("rows")? as usize,
            violations: number("violations")? as usize,
            source,
        };
        let actual = manifest.source.sha256();
        if actual != manifest.input_sha256 {
            bail!(
                "embedded inputs hash to {actual}, manifest records {}",
                manifest.input_sha256
            );
        }
        Ok(manifest)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }
}

#[derive(Debug)]
pub struct SweepRun {
    pub outcome: SweepOutcome,
    pub manifest: Manifest,
    pub dir: PathBuf,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Run the sweep and write CSV, plot and manifest into `dir`. Outputs are
/// written even when rows fail.
pub fn execute(spec: &SweepSpec, source: SpecSource, dir: &Path, jobs: usize) -> anyhow::Result<SweepRun> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let started = now();
    let clock = Instant::now();
    let outcome = run_sweep(spec, jobs)?;
    let elapsed_seconds = clock.elapsed().as_secs_f64();

    std::fs::write(dir.join(CSV_NAME), output::csv(&outcome.rows))?;
    if spec.plot {
        std::fs::write(dir.join(SVG_NAME), output::diff_chart(&spec.name, &outcome.rows))?;
    }
    let manifest = Manifest {
        name: spec.name.clone(),
        input_sha256: source.sha256(),
        code_version: code_version(),
        started,
        finished: now(),
        elapsed_seconds,
        jobs,
        rows: outcome.rows.len(),
        violations: outcome.violations().len(),
        source,
    };
    std::fs::write(dir.join(MANIFEST_NAME), manifest.render()?)?;
    Ok(SweepRun {
        outcome,
        manifest,
        dir: dir.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Manifest {
        let source = SpecSource {
            text: "[family]\nkind = file\npaths = a.txt\n".into(),
            shapes: vec![("a.txt".into(), "0 1024\n1\n".into())],
        };
        Manifest {
            name: "demo".into(),
            input_sha256: source.sha256(),
            code_version: code_version(),
            started: "2026-01-01T00:00:00Z".into(),
            finished: "2026-01-01T00:00:01Z".into(),
            elapsed_seconds: 1.25,
            jobs: 2,
            rows: 3,
            violations: 0,
            source,
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let m = sample();
        let text = m.render().unwrap();
        assert_eq!(Manifest::parse(&text).unwrap(), m);
    }

    #[test]
    fn tampering_is_detected() {
        let text = sample().render().unwrap().replace("paths = a.txt", "paths = a.txt ");
        assert!(Manifest::parse(&text).unwrap_err().to_string().contains("hash"));
        let truncated = sample().render().unwrap().replace("--- end ---\n", "");
        assert!(Manifest::parse(&truncated).is_err());
    }

    #[test]
    fn reserved_marker_is_rejected() {
        let mut m = sample();
        m.source.text.push_str("--- sneaky\n");
        assert!(m.render().is_err());
    }

    #[test]
    fn hash_depends_on_shape_files() {
        let a = sample().source;
        let mut b = a.clone();
        b.shapes[0].1.push('\n');
        assert_ne!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
    }
}
