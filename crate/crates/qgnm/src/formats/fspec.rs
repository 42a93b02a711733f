//! Sampler specification files.
//!
//! ```text
//! # qgnm fspec
//! width 3
//! epsilon 0.0
//! seed -
//! 0 0.3333333333333333 0.5773502691896258 0.0
//! 2 0.3333333333333333 0.5773502691896258 0.0
//! 4 0.3333333333333333 0.5773502691896258 0.0
//! ```
//!
//! One line per subgroup element: `label-hex weight re im`, with the weight
//! `|alpha_g|^2` followed by the amplitude itself so that reloading is exact.
//! A line may omit `re im`, in which case the amplitude is `sqrt(weight)`.
//! Floats use Rust's shortest round-trip formatting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use qgnm_core::sampler::{AmplitudeProfile, FSpec};

use crate::error::{Error, Result};
use crate::formats::{data_lines, parse_field, parse_label_hex};

pub fn fspec_to_text(fspec: &FSpec) -> String {
    let mut out = String::from("# qgnm fspec\n");
    let _ = writeln!(out, "width {}", fspec.width());
    let _ = writeln!(out, "epsilon {:?}", fspec.profile().deviation());
    match fspec.seed() {
        Some(s) => {
            let _ = writeln!(out, "seed {s}");
        }
        None => out.push_str("seed -\n"),
    }
    for (g, a) in fspec.profile().iter() {
        let _ = writeln!(out, "{:x} {:?} {:?} {:?}", g, a.norm_sqr(), a.re, a.im);
    }
    out
}

pub fn fspec_from_text(text: &str, origin: &str) -> Result<FSpec> {
    let mut lines = data_lines(text);
    let mut header = |key: &str| -> Result<(usize, String)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 0, format!("missing header field `{key}`")))?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
            _ => Err(Error::parse(
                origin,
                no,
                format!("expected header field `{key}`"),
            )),
        }
    };
    let (no, width) = header("width")?;
    let width: u8 = parse_field(&width, origin, no, "width")?;
    let (no, eps) = header("epsilon")?;
    let epsilon: f64 = parse_field(&eps, origin, no, "epsilon")?;
    let (no, seed) = header("seed")?;
    let seed = match seed.as_str() {
        "-" => None,
        s => Some(parse_field::<u64>(s, origin, no, "seed")?),
    };

    let mut entries = BTreeMap::new();
    let mut last_no = 0;
    for (no, line) in lines {
        last_no = no;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (label, weight, amp) = match fields[..] {
            [l, w] => (l, w, None),
            [l, w, re, im] => (l, w, Some((re, im))),
            _ => {
                return Err(Error::parse(
                    origin,
                    no,
                    "expected `label-hex weight [re im]`",
                ))
            }
        };
        let g = parse_label_hex(label, width, origin, no)?;
        let weight: f64 = parse_field(weight, origin, no, "weight")?;
        let alpha = match amp {
            None => Complex64::new(weight.sqrt(), 0.0),
            Some((re, im)) => {
                let a = Complex64::new(
                    parse_field(re, origin, no, "re")?,
                    parse_field(im, origin, no, "im")?,
                );
                if (a.norm_sqr() - weight).abs() > 1e-12 {
                    return Err(Error::parse(origin, no, "weight disagrees with amplitude"));
                }
                a
            }
        };
        if entries.insert(g, alpha).is_some() {
            return Err(Error::parse(
                origin,
                no,
                format!("label {label} listed twice"),
            ));
        }
    }
    let subgroup: BTreeSet<_> = entries.keys().copied().collect();
    let profile = AmplitudeProfile::new(entries, epsilon)
        .map_err(|e| Error::parse(origin, last_no, e.to_string()))?;
    FSpec::new(subgroup, profile, seed).map_err(|e| Error::parse(origin, last_no, e.to_string()))
}
