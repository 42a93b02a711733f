//! Adversarial oracle families over `Z_p x Z_p`.
//!
//! For label length `n`, `p` is a prime with `2^(n-2) < p^2 < 2^n`. The
//! integers `1..=p^2`, written as `n`-bit strings, label the group through a
//! bijection `f` with `f(1) = (1, 0)`. Family F1 pins `f(2) = (0, 1)`, so
//! label 2 is outside `<label 1>`; family F0(a) pins `f(2) = (a, 0)` with
//! `a` in `2..p`, so label 2 is inside it.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::{ConcreteGroup, GroupKind, GroupOracle, Label, Labeling, MAX_WIDTH};
use crate::error::{Error, Result};
use crate::verifier::GnmInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeWindow {
    pub n: u8,
    pub p: u32,
}

impl PrimeWindow {
    pub fn contains(n: u8, p: u32) -> bool {
        let sq = u64::from(p) * u64::from(p);
        n >= 2 && (1u64 << (n - 2)) < sq && sq < (1u64 << n)
    }
}

fn is_prime(m: u32) -> bool {
    m >= 2
        && (2..)
            .take_while(|d| d * d <= m)
            .all(|d| !m.is_multiple_of(d))
}

/// Smallest prime in the window for `n` (`4 <= n <= 12`).
pub fn find_prime(n: u8) -> Result<PrimeWindow> {
    if n < 4 {
        return Err(Error::TooSmall { what: "n", min: 4 });
    }
    if n > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(n));
    }
    (2u32..(1 << (n / 2 + 1)))
        .find(|&p| is_prime(p) && PrimeWindow::contains(n, p))
        .map(|p| PrimeWindow { n, p })
        .ok_or(Error::NoPrimeWindow(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    F1,
    F0 { a: u32 },
}

/// Family selection for sampling; `F0(None)` draws `a` from the seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyRequest {
    F1,
    F0(Option<u32>),
}

/// A bijection from labels `1..=p^2` onto `Z_p x Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureLabeling {
    window: PrimeWindow,
    family: Family,
    seed: u64,
    /// Entry `i - 1` is `f(i)`.
    table: Vec<(u32, u32)>,
}

impl FixtureLabeling {
    /// Validates window, bijectivity, and the family's pinned values.
    pub fn from_parts(
        n: u8,
        p: u32,
        family: Family,
        seed: u64,
        table: Vec<(u32, u32)>,
    ) -> Result<Self> {
        if n > MAX_WIDTH || !is_prime(p) || !PrimeWindow::contains(n, p) {
            return Err(Error::InvalidGroup("prime outside the window for n"));
        }
        let size = (p * p) as usize;
        if table.len() != size {
            return Err(Error::InvalidGroup("fixture table must have p^2 entries"));
        }
        let mut seen = alloc::vec![false; size];
        for &(alpha, beta) in &table {
            if alpha >= p || beta >= p {
                return Err(Error::InvalidGroup("fixture value out of range"));
            }
            let slot = &mut seen[(alpha * p + beta) as usize];
            if *slot {
                return Err(Error::InvalidGroup("fixture table is not a bijection"));
            }
            *slot = true;
        }
        let expected_two = match family {
            Family::F1 => (0, 1),
            Family::F0 { a } => {
                if !(2..p).contains(&a) {
                    return Err(Error::InvalidGroup("F0 parameter must lie in 2..p"));
                }
                (a, 0)
            }
        };
        if table[0] != (1, 0) || table[1] != expected_two {
            return Err(Error::InvalidGroup(
                "fixture does not pin f(1), f(2) for its family",
            ));
        }
        Ok(FixtureLabeling {
            window: PrimeWindow { n, p },
            family,
            seed,
            table,
        })
    }

    pub fn n(&self) -> u8 {
        self.window.n
    }

    pub fn p(&self) -> u32 {
        self.window.p
    }

    pub fn window(&self) -> PrimeWindow {
        self.window
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `f(i)` for `i` in `1..=p^2`.
    pub fn value(&self, i: u32) -> Option<(u32, u32)> {
        i.checked_sub(1)
            .and_then(|j| self.table.get(j as usize))
            .copied()
    }

    pub fn table(&self) -> &[(u32, u32)] {
        &self.table
    }

    /// The label holding integer `i` in binary.
    pub fn label(&self, i: u32) -> Result<Label> {
        Label::new(i, self.window.n)
    }

    /// `f^{-1}(alpha, beta)` as a label.
    pub fn label_of(&self, alpha: u32, beta: u32) -> Option<Label> {
        self.table
            .iter()
            .position(|&v| v == (alpha, beta))
            .map(|j| Label::from_raw((j + 1) as u16, self.window.n))
    }
}

/// Uniformly random member of the requested family, deterministic in `seed`
/// (ChaCha8). For `F0(None)` the parameter `a` is drawn first.
pub fn sample_labeling(n: u8, family: FamilyRequest, seed: u64) -> Result<FixtureLabeling> {
    let window = find_prime(n)?;
    let p = window.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = match family {
        FamilyRequest::F1 => Family::F1,
        FamilyRequest::F0(Some(a)) => Family::F0 { a },
        FamilyRequest::F0(None) => Family::F0 {
            a: rng.random_range(2..p),
        },
    };
    let second = match family {
        Family::F1 => (0, 1),
        Family::F0 { a } => (a, 0),
    };
    let mut rest: Vec<(u32, u32)> = (0..p)
        .flat_map(|alpha| (0..p).map(move |beta| (alpha, beta)))
        .filter(|&v| v != (1, 0) && v != second)
        .collect();
    rest.shuffle(&mut rng);
    let mut table = Vec::with_capacity((p * p) as usize);
    table.push((1, 0));
    table.push(second);
    table.extend(rest);
    FixtureLabeling::from_parts(n, p, family, seed, table)
}

/// Oracle for `Z_p x Z_p` under the fixture labeling; every other `n`-bit
/// string (0 and anything above `p^2`) is invalid.
pub fn build_fixture_oracle(labeling: &FixtureLabeling) -> Result<GroupOracle> {
    let p = labeling.p();
    let mut to_label = alloc::vec![0u16; (p * p) as usize];
    for (j, &(alpha, beta)) in labeling.table.iter().enumerate() {
        to_label[(alpha * p + beta) as usize] = (j + 1) as u16;
    }
    let group = ConcreteGroup::new(
        GroupKind::DirectProduct { p },
        labeling.n(),
        Labeling::Table(to_label),
    )?;
    Ok(GroupOracle::new(group))
}

/// Generators `{label 1}`, candidate `label 2`.
pub fn instance_from_fixture(labeling: &FixtureLabeling) -> Result<GnmInstance> {
    let oracle = build_fixture_oracle(labeling)?;
    GnmInstance::new(oracle, alloc::vec![labeling.label(1)?], labeling.label(2)?)
}

/// Same gate behavior with a full query transcript.
pub fn wrap_with_query_log(oracle: GroupOracle) -> GroupOracle {
    oracle.with_query_log()
}
