//! Plain-text and TOML file formats.

mod certificate;
mod fixture;
mod fspec;
pub(crate) mod group;

pub use certificate::{
    certificate_from_text, certificate_to_text, composite_from_text, composite_to_text, Composite,
};
pub use fixture::{fixture_from_text, fixture_to_text};
pub use fspec::{fspec_from_text, fspec_to_text};
pub use group::{group_from_toml, group_to_toml};

use std::str::FromStr;

use crate::error::{Error, Result};

/// Non-blank lines that are not `#` comments, numbered from 1.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_field<T: FromStr>(raw: &str, origin: &str, line: usize, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e| Error::parse(origin, line, format!("bad {what} `{raw}`: {e}")))
}

pub(crate) fn parse_label_hex(
    raw: &str,
    width: u8,
    origin: &str,
    line: usize,
) -> Result<qgnm_core::blackbox::Label> {
    let bits = u32::from_str_radix(raw, 16)
        .map_err(|e| Error::parse(origin, line, format!("bad label `{raw}`: {e}")))?;
    qgnm_core::blackbox::Label::new(bits, width)
        .map_err(|e| Error::parse(origin, line, e.to_string()))
}
