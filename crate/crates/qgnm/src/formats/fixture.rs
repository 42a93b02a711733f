//! Fixture files.
//!
//! ```text
//! # qgnm fixture
//! n 6
//! p 5
//! family F0
//! a 3
//! seed 7
//! 1 1 0
//! 2 3 0
//! ...
//! ```
//!
//! After the header (`a` is `-` for F1) come all `p^2` table lines
//! `label-hex alpha beta`, in label order.

use std::fmt::Write as _;

use qgnm_core::fixtures::{Family, FixtureLabeling};

use crate::error::{Error, Result};
use crate::formats::{data_lines, parse_field};

pub fn fixture_to_text(fixture: &FixtureLabeling) -> String {
    let mut out = String::from("# qgnm fixture\n");
    let (family, a) = match fixture.family() {
        Family::F1 => ("F1", "-".to_string()),
        Family::F0 { a } => ("F0", a.to_string()),
    };
    let _ = writeln!(out, "n {}", fixture.n());
    let _ = writeln!(out, "p {}", fixture.p());
    let _ = writeln!(out, "family {family}");
    let _ = writeln!(out, "a {a}");
    let _ = writeln!(out, "seed {}", fixture.seed());
    for (i, (alpha, beta)) in fixture.table().iter().enumerate() {
        let _ = writeln!(out, "{:x} {alpha} {beta}", i + 1);
    }
    out
}

pub fn fixture_from_text(text: &str, origin: &str) -> Result<FixtureLabeling> {
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
    let (no, n) = header("n")?;
    let n: u8 = parse_field(&n, origin, no, "n")?;
    let (no, p) = header("p")?;
    let p: u32 = parse_field(&p, origin, no, "p")?;
    let (fam_no, family) = header("family")?;
    let (a_no, a) = header("a")?;
    let (no, seed) = header("seed")?;
    let seed: u64 = parse_field(&seed, origin, no, "seed")?;
    let family = match (family.as_str(), a.as_str()) {
        ("F1", "-") => Family::F1,
        ("F0", a) => Family::F0 {
            a: parse_field(a, origin, a_no, "a")?,
        },
        ("F1", _) => return Err(Error::parse(origin, a_no, "F1 fixtures carry `a -`")),
        _ => {
            return Err(Error::parse(
                origin,
                fam_no,
                format!("unknown family `{family}`"),
            ))
        }
    };

    let mut table = Vec::new();
    let mut last_no = 0;
    for (no, line) in lines {
        last_no = no;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [label, alpha, beta] = fields[..] else {
            return Err(Error::parse(origin, no, "expected `label-hex alpha beta`"));
        };
        let label = u32::from_str_radix(label, 16)
            .map_err(|e| Error::parse(origin, no, format!("bad label `{label}`: {e}")))?;
        if label as usize != table.len() + 1 {
            return Err(Error::parse(
                origin,
                no,
                format!("expected label {:x}, found {label:x}", table.len() + 1),
            ));
        }
        table.push((
            parse_field(alpha, origin, no, "alpha")?,
            parse_field(beta, origin, no, "beta")?,
        ));
    }
    FixtureLabeling::from_parts(n, p, family, seed, table)
        .map_err(|e| Error::parse(origin, last_no, format!("invalid fixture: {e}")))
}
