//! Instance sources: builtin group spec strings, group description files
//! and fixture files.
//!
//! A spec string is `kind:parameter` followed by `;key=value` options:
//!
//! * `cyclic:6;gens=2;h=3` with elements written as residues,
//! * `zpzp:5;gens=(1,0);h=(0,1)` with elements written as pairs,
//! * `sym:4;gens=(0 1),(0 1 2 3);h=(0 2)(1 3)` with elements in cycle
//!   notation on points `0..m` and `()` for the identity,
//! * `file:path/to/group.toml;gens=...;h=...` using the element notation of
//!   the file's group kind,
//! * `fixture:6;family=F1;seed=7` (optionally `a=<int>` for F0) to sample a
//!   fixture labeling.
//!
//! Builtin kinds also accept `n=<width>` and `labeling=identity|seed:<u64>`.

use std::path::Path;

use qgnm_core::blackbox::{
    min_width, ConcreteGroup, GroupKind, GroupOracle, Label, Labeling, Permutation,
};
use qgnm_core::fixtures::{instance_from_fixture, sample_labeling, FamilyRequest, FixtureLabeling};
use qgnm_core::verifier::GnmInstance;

use crate::error::{read_file, Error, Result};
use crate::formats::{fixture_from_text, group_from_toml};

/// A verification instance with the identifier used in report rows.
#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub id: String,
    pub instance: GnmInstance,
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_cycles(degree: u8, raw: &str) -> Result<Permutation> {
    let raw = raw.trim();
    let bad = || cfg(format!("bad permutation `{raw}`"));
    if !raw.starts_with('(') || !raw.ends_with(')') {
        return Err(bad());
    }
    let mut cycles: Vec<Vec<u8>> = Vec::new();
    for part in raw[1..raw.len() - 1].split(")(") {
        let points = part
            .split_whitespace()
            .map(|p| p.parse::<u8>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
    }
    let refs: Vec<&[u8]> = cycles.iter().map(Vec::as_slice).collect();
    Permutation::from_cycles(degree, &refs)
        .map_err(|e| cfg(format!("bad permutation `{raw}`: {e}")))
}

/// Parses one element in the notation of `group`'s kind.
pub fn parse_element(group: &ConcreteGroup, raw: &str) -> Result<Label> {
    let raw = raw.trim();
    let bad = || cfg(format!("bad element `{raw}`"));
    let element = match group.kind() {
        GroupKind::Cyclic { order } => {
            let v: u32 = raw.parse().map_err(|_| bad())?;
            if v >= *order {
                return Err(cfg(format!("residue {v} is not below the order {order}")));
            }
            v
        }
        GroupKind::DirectProduct { p } => {
            let inner = raw
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(bad)?;
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            if a >= *p || b >= *p {
                return Err(cfg(format!("coordinates of `{raw}` must be below {p}")));
            }
            a * p + b
        }
        GroupKind::Permutation { degree, .. } => {
            let perm = parse_cycles(*degree, raw)?;
            group
                .element_of_permutation(&perm)
                .ok_or_else(|| cfg(format!("`{raw}` is not in the group")))?
        }
    };
    Ok(group.label_of(element))
}

fn factorial(m: u8) -> usize {
    (1..=m as usize).product()
}

/// Parses a spec string into a named instance. `base` resolves relative
/// `file:` paths.
pub fn parse_group_spec(spec: &str, base: Option<&Path>) -> Result<NamedInstance> {
    let mut parts = split_top(spec, ';').into_iter();
    let head = parts.next().unwrap_or_default().trim();
    let (kind, param) = head
        .split_once(':')
        .ok_or_else(|| cfg(format!("group spec `{spec}` lacks `kind:parameter`")))?;
    let mut opts: Vec<(&str, &str)> = Vec::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| cfg(format!("option `{p}` in `{spec}` is not key=value")))?;
        opts.push((k.trim(), v.trim()));
    }
    let take = |key: &str| opts.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    for (k, _) in &opts {
        if !["gens", "h", "n", "labeling", "family", "seed", "a"].contains(k) {
            return Err(cfg(format!("unknown option `{k}` in `{spec}`")));
        }
    }

    if kind == "fixture" {
        let n: u8 = param
            .parse()
            .map_err(|_| cfg(format!("bad fixture width `{param}`")))?;
        let seed: u64 = take("seed")
            .unwrap_or("0")
            .parse()
            .map_err(|_| cfg("bad fixture seed"))?;
        let a = take("a")
            .map(|a| a.parse::<u32>().map_err(|_| cfg(format!("bad `a={a}`"))))
            .transpose()?;
        let family = match take("family").unwrap_or("F1") {
            "F1" if a.is_none() => FamilyRequest::F1,
            "F1" => return Err(cfg("`a` only applies to F0")),
            "F0" => FamilyRequest::F0(a),
            other => return Err(cfg(format!("unknown family `{other}`"))),
        };
        let labeling = sample_labeling(n, family, seed)?;
        return Ok(NamedInstance {
            id: spec.to_string(),
            instance: instance_from_fixture(&labeling)?,
        });
    }

    let labeling = match take("labeling") {
        None | Some("identity") => Labeling::Identity,
        Some(l) => match l.strip_prefix("seed:").map(str::parse::<u64>) {
            Some(Ok(s)) => Labeling::Seeded(s),
            _ => return Err(cfg(format!("bad labeling `{l}`"))),
        },
    };
    let width = take("n")
        .map(|n| n.parse::<u8>().map_err(|_| cfg(format!("bad width `{n}`"))))
        .transpose()?;
    let num = |what: &str| -> Result<u32> {
        param
            .parse()
            .map_err(|_| cfg(format!("bad {what} `{param}`")))
    };
    let group = match kind {
        "cyclic" => {
            let order = num("order")?;
            let w = width.unwrap_or_else(|| min_width(order as usize));
            ConcreteGroup::new(GroupKind::Cyclic { order }, w, labeling)?
        }
        "zpzp" => {
            let p = num("prime")?;
            let w = width.unwrap_or_else(|| min_width((p * p) as usize));
            ConcreteGroup::new(GroupKind::DirectProduct { p }, w, labeling)?
        }
        "sym" => {
            let m = num("degree")?;
            let m = u8::try_from(m).map_err(|_| cfg("degree too large"))?;
            let full = ConcreteGroup::symmetric(m)?;
            let w = width.unwrap_or_else(|| min_width(factorial(m)));
            ConcreteGroup::new(full.kind().clone(), w, labeling)?
        }
        "file" => {
            if width.is_some() || take("labeling").is_some() {
                return Err(cfg("`n` and `labeling` come from the group file"));
            }
            let path = base.map_or_else(|| Path::new(param).to_path_buf(), |b| b.join(param));
            group_from_toml(&read_file(&path)?, &path.display().to_string())?
        }
        other => return Err(cfg(format!("unknown group kind `{other}`"))),
    };
    let gens_raw = take("gens").ok_or_else(|| cfg(format!("`{spec}` needs gens=...")))?;
    let gens = if gens_raw.is_empty() {
        Vec::new()
    } else {
        split_top(gens_raw, ',')
            .into_iter()
            .map(|g| parse_element(&group, g))
            .collect::<Result<Vec<_>>>()?
    };
    let h = parse_element(
        &group,
        take("h").ok_or_else(|| cfg(format!("`{spec}` needs h=...")))?,
    )?;
    Ok(NamedInstance {
        id: spec.to_string(),
        instance: GnmInstance::new(GroupOracle::new(group), gens, h)?,
    })
}

pub fn load_fixture(path: &Path) -> Result<FixtureLabeling> {
    fixture_from_text(&read_file(path)?, &path.display().to_string())
}

pub fn fixture_instance(path: &Path) -> Result<NamedInstance> {
    let labeling = load_fixture(path)?;
    Ok(NamedInstance {
        id: path.display().to_string(),
        instance: instance_from_fixture(&labeling)?,
    })
}
