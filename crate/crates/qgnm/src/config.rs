//! Experiment configuration: a flat TOML file overridden by command-line
//! flags.
//!
//! ```toml
//! group = ["cyclic:6;gens=2;h=3", "cyclic:6;gens=2;h=4"]
//! cert_mode = "honest"
//! epsilon = [0.0, 0.05]
//! seed = 7
//! k = 1
//! format = "csv"
//! out = "rows.csv"
//! ```
//!
//! `group` and `fixture` take a string or a list; `epsilon` a number or a
//! list; `seed` an integer, or a decimal string above `i64::MAX`. Relative
//! paths in the file are resolved against its directory.

use std::path::{Path, PathBuf};

use crate::error::{read_file, Error, Result};
use crate::formats::group::line_of;
use crate::report::Format;

/// How certificates are chosen for each run.
#[derive(Clone, Debug, PartialEq)]
pub enum CertMode {
    /// The uniform superposition over the generated subgroup.
    Honest,
    /// A basis certificate; defaults to the identity label.
    PointMass(Option<u32>),
    /// `count` seeded random unit vectors, seeds `seed..seed + count`.
    Random {
        count: u32,
    },
    File(PathBuf),
    /// The top eigenvector of the acceptance operator.
    Optimal,
}

impl std::str::FromStr for CertMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || {
            format!("unknown cert mode `{s}` (honest, point-mass[:hex], random[:count], file:path, optimal)")
        };
        match s.split_once(':') {
            None => match s {
                "honest" => Ok(CertMode::Honest),
                "point-mass" => Ok(CertMode::PointMass(None)),
                "random" => Ok(CertMode::Random { count: 1 }),
                "optimal" => Ok(CertMode::Optimal),
                _ => Err(bad()),
            },
            Some(("point-mass", hex)) => u32::from_str_radix(hex, 16)
                .map(|b| CertMode::PointMass(Some(b)))
                .map_err(|_| bad()),
            Some(("random", n)) => match n.parse() {
                Ok(count) if count > 0 => Ok(CertMode::Random { count }),
                _ => Err(bad()),
            },
            Some(("file", path)) if !path.is_empty() => Ok(CertMode::File(PathBuf::from(path))),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Groups(Vec<String>),
    Fixtures(Vec<PathBuf>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: Source,
    pub cert_mode: CertMode,
    /// `0` selects the exact-uniform sampler; other values a perturbed one.
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub k: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Directory against which relative `file:` paths in specs resolve.
    pub base_dir: Option<PathBuf>,
}

/// Values that may come from a config file or from flags. Flags win.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub groups: Vec<String>,
    pub fixtures: Vec<PathBuf>,
    pub cert_mode: Option<CertMode>,
    pub epsilons: Vec<f64>,
    pub seed: Option<u64>,
    pub k: Option<u32>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn from_toml(text: &str, origin: &str, base: Option<&Path>) -> Result<Settings> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e.span().map_or(0, |s| line_of(text, s.start));
            Error::parse(origin, line, e.message().to_string())
        })?;
        let line_for = |key: &str| {
            text.lines()
                .position(|l| l.trim_start().starts_with(key))
                .map_or(0, |i| i + 1)
        };
        let bad = |key: &str, what: &str| {
            Error::parse(origin, line_for(key), format!("`{key}` must be {what}"))
        };
        let rel = |p: &str| base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
        let strings = |key: &str, v: &toml::Value| -> Result<Vec<String>> {
            match v {
                toml::Value::String(s) => Ok(vec![s.clone()]),
                toml::Value::Array(items) => items
                    .iter()
                    .map(|i| {
                        i.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| bad(key, "a string or list of strings"))
                    })
                    .collect(),
                _ => Err(bad(key, "a string or list of strings")),
            }
        };
        let float = |v: &toml::Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64));

        let mut s = Settings::default();
        for (key, v) in &table {
            match key.as_str() {
                "group" => s.groups = strings(key, v)?,
                "fixture" => s.fixtures = strings(key, v)?.iter().map(|p| rel(p)).collect(),
                "cert_mode" => {
                    let raw = v.as_str().ok_or_else(|| bad(key, "a string"))?;
                    let mode: CertMode = raw
                        .parse()
                        .map_err(|e: String| Error::parse(origin, line_for(key), e))?;
                    s.cert_mode = Some(match mode {
                        CertMode::File(p) => CertMode::File(rel(&p.to_string_lossy())),
                        m => m,
                    });
                }
                "epsilon" => {
                    s.epsilons =
                        match v {
                            toml::Value::Array(items) => items
                                .iter()
                                .map(|i| {
                                    float(i).ok_or_else(|| bad(key, "a number or list of numbers"))
                                })
                                .collect::<Result<_>>()?,
                            other => vec![float(other)
                                .ok_or_else(|| bad(key, "a number or list of numbers"))?],
                        }
                }
                "seed" => {
                    let seed = match v {
                        toml::Value::Integer(i) => u64::try_from(*i).ok(),
                        toml::Value::String(s) => s.parse().ok(),
                        _ => None,
                    };
                    s.seed = Some(seed.ok_or_else(|| bad(key, "a nonnegative 64-bit integer"))?);
                }
                "k" => {
                    let i = v
                        .as_integer()
                        .filter(|i| *i >= 1)
                        .ok_or_else(|| bad(key, "an integer >= 1"))?;
                    s.k = Some(u32::try_from(i).map_err(|_| bad(key, "an integer >= 1"))?);
                }
                "format" => {
                    let raw = v.as_str().ok_or_else(|| bad(key, "a string"))?;
                    s.format = Some(
                        raw.parse()
                            .map_err(|e: String| Error::parse(origin, line_for(key), e))?,
                    );
                }
                "out" => s.out = Some(rel(v.as_str().ok_or_else(|| bad(key, "a string"))?)),
                other => {
                    return Err(Error::parse(
                        origin,
                        line_for(other),
                        format!("unknown key `{other}`"),
                    ))
                }
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let base = path.parent().filter(|p| !p.as_os_str().is_empty());
        Settings::from_toml(&read_file(path)?, &path.display().to_string(), base)
    }

    /// `self` overridden by every field `flags` sets.
    pub fn merge(mut self, flags: Settings) -> Settings {
        if !flags.groups.is_empty() || !flags.fixtures.is_empty() {
            self.groups = flags.groups;
            self.fixtures = flags.fixtures;
        }
        if !flags.epsilons.is_empty() {
            self.epsilons = flags.epsilons;
        }
        self.cert_mode = flags.cert_mode.or(self.cert_mode);
        self.seed = flags.seed.or(self.seed);
        self.k = flags.k.or(self.k);
        self.format = flags.format.or(self.format);
        self.out = flags.out.or(self.out);
        self
    }

    pub fn finish(self, default_k: u32, base_dir: Option<PathBuf>) -> Result<ExperimentConfig> {
        let source = match (self.groups.is_empty(), self.fixtures.is_empty()) {
            (false, true) => Source::Groups(self.groups),
            (true, false) => Source::Fixtures(self.fixtures),
            (true, true) => {
                return Err(Error::Config(
                    "no instance source: give --group or --fixture".into(),
                ))
            }
            (false, false) => {
                return Err(Error::Config(
                    "give either --group or --fixture, not both".into(),
                ));
            }
        };
        let k = self.k.unwrap_or(default_k);
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let epsilons = if self.epsilons.is_empty() {
            vec![0.0]
        } else {
            self.epsilons
        };
        if let Some(e) = epsilons.iter().find(|e| !e.is_finite() || **e < 0.0) {
            return Err(Error::Config(format!(
                "epsilon {e} must be a finite nonnegative number"
            )));
        }
        Ok(ExperimentConfig {
            source,
            cert_mode: self.cert_mode.unwrap_or(CertMode::Honest),
            epsilons,
            seed: self.seed.unwrap_or(0),
            k,
            format: self.format.unwrap_or_default(),
            out: self.out,
            base_dir,
        })
    }
}
