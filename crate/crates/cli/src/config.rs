//! Flat `key = value` configuration text with `[section]` headers.
//!
//! ```text
//! # comment
//! top = 1
//! [family]
//! kind = cos2k-perturbation
//! eps = 0, 0.05, 0.1
//! ```
//!
//! Keys before the first header belong to the unnamed root section. A `#`
//! starts a comment anywhere on a line. Keys are unique within a section and
//! sections are unique within a file.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub type Result<T> = std::result::Result<T, ConfigError>;

fn error(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub sections: Vec<Section>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = vec![Section {
            name: String::new(),
            line: 0,
            entries: Vec::new(),
        }];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| error(line, format!("unterminated section header `{content}`")))?
                    .trim();
                if !valid_name(name) {
                    return Err(error(line, format!("invalid section name `{name}`")));
                }
                if let Some(prev) = sections.iter().find(|s| s.name == name) {
                    return Err(error(
                        line,
                        format!("section [{name}] already defined on line {}", prev.line),
                    ));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| error(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_name(key) {
                return Err(error(line, format!("invalid key `{key}`")));
            }
            let section = sections.last_mut().expect("root section");
            if let Some(prev) = section.entries.iter().find(|e| e.key == key) {
                return Err(error(line, format!("duplicate key `{key}` (first on line {})", prev.line)));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        Ok(Self { sections })
    }

    pub fn root(&self) -> &Section {
        &self.sections[0]
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Section> {
        let last = self.sections.iter().flat_map(|s| &s.entries).map(|e| e.line).max().unwrap_or(0);
        self.section(name)
            .ok_or_else(|| error(last + 1, format!("missing section [{name}]")))
    }

    /// Reject sections other than `allowed` (the root section is always allowed).
    pub fn only_sections(&self, allowed: &[&str]) -> Result<()> {
        for s in &self.sections[1..] {
            if !allowed.contains(&s.name.as_str()) {
                return Err(error(s.line, format!("unknown section [{}]", s.name)));
            }
        }
        Ok(())
    }
}

impl Section {
    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    fn missing(&self, key: &str) -> ConfigError {
        let label = if self.name.is_empty() { "top level".to_string() } else { format!("[{}]", self.name) };
        error(self.line, format!("missing key `{key}` in {label}"))
    }

    pub fn require(&self, key: &str) -> Result<&Entry> {
        self.entry(key).ok_or_else(|| self.missing(key))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| error(e.line, format!("invalid value `{}` for `{key}`", e.value))),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse_value(key)?.unwrap_or(default))
    }

    pub fn parse_required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse_value(key)?.ok_or_else(|| self.missing(key))
    }

    /// Comma-separated list; empty items are rejected.
    pub fn parse_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.entry(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse()
                    .map_err(|_| error(e.line, format!("invalid list item `{item}` for `{key}`")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Entries whose key starts with `prefix`, with the prefix stripped.
    pub fn prefixed<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a Entry)> + 'a {
        self.entries
            .iter()
            .filter_map(move |e| e.key.strip_prefix(prefix).map(|rest| (rest, e)))
    }

    /// Reject keys that are neither in `allowed` nor start with one of `prefixes`.
    pub fn only_keys(&self, allowed: &[&str], prefixes: &[&str]) -> Result<()> {
        for e in &self.entries {
            let known = allowed.contains(&e.key.as_str())
                || prefixes.iter().any(|p| e.key.starts_with(p) && e.key.len() > p.len());
            if !known {
                return Err(error(e.line, format!("unknown key `{}`", e.key)));
            }
        }
        Ok(())
    }
}
