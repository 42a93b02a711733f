//! Group description files (TOML).
//!
//! ```toml
//! kind = "permutation"
//! n = 3
//!
//! [parameters]
//! degree = 3
//! generators = [[1, 0, 2], [1, 2, 0]]
//!
//! [labeling]
//! mode = "table"
//! table = [[0, 5], [1, 2], [2, 7], [3, 0], [4, 1], [5, 3]]
//! ```
//!
//! `kind` is one of `cyclic` (`order`), `zpzp` (`p`) or `permutation`
//! (`degree`, generator image lists, points numbered from 0). `labeling` is
//! `identity`, `seed` (with `seed`) or `table` with `(element-index,
//! label-bits)` pairs.

use qgnm_core::blackbox::{ConcreteGroup, GroupKind, Labeling, Permutation};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    kind: String,
    n: u8,
    parameters: Parameters,
    labeling: LabelingFile,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Vec<u8>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
enum LabelingFile {
    Identity,
    Seed { seed: SeedValue },
    Table { table: Vec<(u32, u16)> },
}

/// TOML integers are signed 64-bit, so seeds above `i64::MAX` are written as
/// decimal strings.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum SeedValue {
    Int(i64),
    Str(String),
}

impl SeedValue {
    pub(crate) fn new(seed: u64) -> Self {
        i64::try_from(seed).map_or_else(|_| SeedValue::Str(seed.to_string()), SeedValue::Int)
    }

    pub(crate) fn get(&self) -> Option<u64> {
        match self {
            SeedValue::Int(i) => u64::try_from(*i).ok(),
            SeedValue::Str(s) => s.parse().ok(),
        }
    }
}

pub fn group_to_toml(group: &ConcreteGroup) -> String {
    let (kind, parameters) = match group.kind() {
        GroupKind::Cyclic { order } => (
            "cyclic",
            Parameters {
                order: Some(*order),
                ..Default::default()
            },
        ),
        GroupKind::DirectProduct { p } => (
            "zpzp",
            Parameters {
                p: Some(*p),
                ..Default::default()
            },
        ),
        GroupKind::Permutation { degree, generators } => (
            "permutation",
            Parameters {
                degree: Some(*degree),
                generators: Some(generators.iter().map(|g| g.images().to_vec()).collect()),
                ..Default::default()
            },
        ),
    };
    let labeling = match group.labeling() {
        Labeling::Identity => LabelingFile::Identity,
        Labeling::Seeded(seed) => LabelingFile::Seed {
            seed: SeedValue::new(*seed),
        },
        Labeling::Table(t) => LabelingFile::Table {
            table: t.iter().enumerate().map(|(i, &b)| (i as u32, b)).collect(),
        },
    };
    let file = GroupFile {
        kind: kind.to_string(),
        n: group.width(),
        parameters,
        labeling,
    };
    toml::to_string(&file).expect("group description always serializes")
}

pub fn group_from_toml(text: &str, origin: &str) -> Result<ConcreteGroup> {
    let file: GroupFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(text, s.start));
        Error::parse(origin, line, e.message().to_string())
    })?;
    let bad = |msg: &str| Error::parse(origin, 0, msg.to_string());
    let params = &file.parameters;
    let kind = match file.kind.as_str() {
        "cyclic" => GroupKind::Cyclic {
            order: params
                .order
                .ok_or_else(|| bad("cyclic group needs parameters.order"))?,
        },
        "zpzp" => GroupKind::DirectProduct {
            p: params
                .p
                .ok_or_else(|| bad("zpzp group needs parameters.p"))?,
        },
        "permutation" => {
            let degree = params
                .degree
                .ok_or_else(|| bad("permutation group needs parameters.degree"))?;
            let generators = params
                .generators
                .as_ref()
                .ok_or_else(|| bad("permutation group needs parameters.generators"))?
                .iter()
                .map(|images| {
                    if images.len() != degree as usize {
                        return Err(bad("generator length differs from degree"));
                    }
                    Permutation::from_images(images.clone()).map_err(Error::from)
                })
                .collect::<Result<Vec<_>>>()?;
            GroupKind::Permutation { degree, generators }
        }
        other => return Err(bad(&format!("unknown group kind `{other}`"))),
    };
    let labeling = match file.labeling {
        LabelingFile::Identity => Labeling::Identity,
        LabelingFile::Seed { seed } => Labeling::Seeded(
            seed.get()
                .ok_or_else(|| bad("seed must be a nonnegative 64-bit integer"))?,
        ),
        LabelingFile::Table { table } => {
            let mut bits = vec![None; table.len()];
            for (idx, b) in table {
                let slot = bits
                    .get_mut(idx as usize)
                    .ok_or_else(|| bad("labeling table element index out of range"))?;
                if slot.replace(b).is_some() {
                    return Err(bad("labeling table lists an element twice"));
                }
            }
            Labeling::Table(
                bits.into_iter()
                    .map(|b| b.expect("every slot filled"))
                    .collect(),
            )
        }
    };
    Ok(ConcreteGroup::new(kind, file.n, labeling)?)
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}
