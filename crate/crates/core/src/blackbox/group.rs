//! Concrete finite groups standing behind a group oracle.
//!
//! Elements are addressed by a dense index `0..order`. Cyclic groups use the
//! residue itself, `Z_p x Z_p` uses `alpha * p + beta`, and permutation groups
//! use the position of the permutation in the sorted list of all elements of
//! the generated group. The labeling maps those indices injectively onto
//! `width`-bit strings.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::label::{check_width, Label};
use crate::error::{Error, Result};

const INVALID: u32 = u32::MAX;

/// A permutation of `{0, .., degree - 1}` stored as its image table.
///
/// Products compose left to right: `a.then(b)` maps `i` to `b(a(i))`, so the
/// group acts on points from the right.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(degree: u8) -> Self {
        Permutation((0..degree).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let mut seen = alloc::vec![false; images.len()];
        for &i in &images {
            let slot = seen
                .get_mut(i as usize)
                .ok_or(Error::InvalidGroup("permutation image out of range"))?;
            if *slot {
                return Err(Error::InvalidGroup("permutation images repeat"));
            }
            *slot = true;
        }
        Ok(Permutation(images))
    }

    /// Builds a permutation from disjoint cycles written with 0-based points.
    pub fn from_cycles(degree: u8, cycles: &[&[u8]]) -> Result<Self> {
        let mut images: Vec<u8> = (0..degree).collect();
        let mut touched = alloc::vec![false; degree as usize];
        for cycle in cycles {
            for (pos, &point) in cycle.iter().enumerate() {
                let next = cycle[(pos + 1) % cycle.len()];
                if point >= degree || next >= degree {
                    return Err(Error::InvalidGroup("cycle point out of range"));
                }
                if touched[point as usize] {
                    return Err(Error::InvalidGroup("cycles are not disjoint"));
                }
                touched[point as usize] = true;
                images[point as usize] = next;
            }
        }
        Ok(Permutation(images))
    }

    pub fn degree(&self) -> u8 {
        self.0.len() as u8
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn apply(&self, point: u8) -> u8 {
        self.0[point as usize]
    }

    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Permutation(inv)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// The abstract shape of a concrete group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic {
        order: u32,
    },
    /// `Z_p x Z_p` with componentwise addition.
    DirectProduct {
        p: u32,
    },
    /// The subgroup of `S_degree` generated by `generators`.
    Permutation {
        degree: u8,
        generators: Vec<Permutation>,
    },
}

/// How element indices become labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labeling {
    /// Element index written in binary.
    Identity,
    /// Uniformly random injection into `width`-bit strings, drawn from a
    /// ChaCha8 stream seeded with the given value.
    Seeded(u64),
    /// Explicit table: entry `i` is the label bits of element `i`.
    Table(Vec<u16>),
}

#[derive(Clone, Debug)]
enum Arith {
    Cyclic(u32),
    DirectProduct(u32),
    Perm {
        elements: Vec<Permutation>,
        index: BTreeMap<Permutation, u32>,
    },
}

/// A finite group together with an injective labeling into `width`-bit
/// strings. Labels outside the image are invalid.
#[derive(Clone, Debug)]
pub struct ConcreteGroup {
    kind: GroupKind,
    width: u8,
    labeling: Labeling,
    arith: Arith,
    to_label: Vec<u16>,
    from_label: Vec<u32>,
}

impl ConcreteGroup {
    pub fn new(kind: GroupKind, width: u8, labeling: Labeling) -> Result<Self> {
        check_width(width)?;
        let capacity = 1usize << width;
        let arith = match &kind {
            GroupKind::Cyclic { order } => {
                if *order == 0 {
                    return Err(Error::InvalidGroup("cyclic order must be positive"));
                }
                Arith::Cyclic(*order)
            }
            GroupKind::DirectProduct { p } => {
                if *p < 2 {
                    return Err(Error::InvalidGroup("modulus must be at least 2"));
                }
                Arith::DirectProduct(*p)
            }
            GroupKind::Permutation { degree, generators } => {
                if generators.iter().any(|g| g.degree() != *degree) {
                    return Err(Error::InvalidGroup("generator degree mismatch"));
                }
                let elements = permutation_closure(*degree, generators, capacity)?;
                let index = elements
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.clone(), i as u32))
                    .collect();
                Arith::Perm { elements, index }
            }
        };
        let order = match &arith {
            Arith::Cyclic(n) => *n as usize,
            Arith::DirectProduct(p) => (*p as usize) * (*p as usize),
            Arith::Perm { elements, .. } => elements.len(),
        };
        if order > capacity {
            return Err(Error::InvalidGroup("group does not fit in the label width"));
        }
        let to_label: Vec<u16> = match &labeling {
            Labeling::Identity => (0..order as u16).collect(),
            Labeling::Seeded(seed) => {
                let mut pool: Vec<u16> = (0..capacity as u32).map(|b| b as u16).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                pool.shuffle(&mut rng);
                pool.truncate(order);
                pool
            }
            Labeling::Table(table) => {
                if table.len() != order {
                    return Err(Error::InvalidGroup("labeling table has the wrong length"));
                }
                table.clone()
            }
        };
        let mut from_label = alloc::vec![INVALID; capacity];
        for (element, &bits) in to_label.iter().enumerate() {
            let slot = from_label
                .get_mut(bits as usize)
                .ok_or(Error::InvalidGroup("label does not fit in the width"))?;
            if *slot != INVALID {
                return Err(Error::InvalidGroup("labeling is not injective"));
            }
            *slot = element as u32;
        }
        Ok(ConcreteGroup {
            kind,
            width,
            labeling,
            arith,
            to_label,
            from_label,
        })
    }

    /// `Z_order` with binary labels in the smallest width that fits.
    pub fn cyclic(order: u32) -> Result<Self> {
        let width = min_width(order as usize);
        Self::new(GroupKind::Cyclic { order }, width, Labeling::Identity)
    }

    /// The full symmetric group on `degree` points, identity labeling.
    pub fn symmetric(degree: u8) -> Result<Self> {
        let mut generators = Vec::new();
        if degree >= 2 {
            let cycle: Vec<u8> = (0..degree).collect();
            generators.push(Permutation::from_cycles(degree, &[&cycle])?);
            generators.push(Permutation::from_cycles(degree, &[&[0, 1]])?);
        }
        let order: usize = (1..=degree as usize).product();
        Self::new(
            GroupKind::Permutation { degree, generators },
            min_width(order),
            Labeling::Identity,
        )
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn order(&self) -> usize {
        self.to_label.len()
    }

    /// Label bits of every element, by element index.
    pub fn label_table(&self) -> &[u16] {
        &self.to_label
    }

    pub fn label_of(&self, element: u32) -> Label {
        Label::from_raw(self.to_label[element as usize], self.width)
    }

    pub fn element_of(&self, label: Label) -> Option<u32> {
        if label.width() != self.width {
            return None;
        }
        match self.from_label[label.bits() as usize] {
            INVALID => None,
            e => Some(e),
        }
    }

    pub fn is_valid(&self, label: Label) -> bool {
        self.element_of(label).is_some()
    }

    /// For permutation groups, the permutation behind an element index.
    pub fn permutation(&self, element: u32) -> Option<&Permutation> {
        match &self.arith {
            Arith::Perm { elements, .. } => elements.get(element as usize),
            _ => None,
        }
    }

    pub fn element_of_permutation(&self, perm: &Permutation) -> Option<u32> {
        match &self.arith {
            Arith::Perm { index, .. } => index.get(perm).copied(),
            _ => None,
        }
    }

    pub fn identity_element(&self) -> u32 {
        match &self.arith {
            Arith::Cyclic(_) | Arith::DirectProduct(_) => 0,
            Arith::Perm { elements, index } => index[&Permutation::identity(elements[0].degree())],
        }
    }

    /// The product `a * b` of element indices.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.arith {
            Arith::Cyclic(n) => ((u64::from(a) + u64::from(b)) % u64::from(*n)) as u32,
            Arith::DirectProduct(p) => {
                let (a1, a2) = (a / p, a % p);
                let (b1, b2) = (b / p, b % p);
                ((a1 + b1) % p) * p + (a2 + b2) % p
            }
            Arith::Perm { elements, index } => {
                let prod = elements[a as usize].then(&elements[b as usize]);
                index[&prod]
            }
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        match &self.arith {
            Arith::Cyclic(n) => (n - a) % n,
            Arith::DirectProduct(p) => {
                let (a1, a2) = (a / p, a % p);
                ((p - a1) % p) * p + (p - a2) % p
            }
            Arith::Perm { elements, index } => index[&elements[a as usize].inverse()],
        }
    }
}

/// Smallest width (at least 1) whose label space holds `count` elements.
pub fn min_width(count: usize) -> u8 {
    let mut width = 1u8;
    while (1usize << width) < count {
        width += 1;
    }
    width
}

fn permutation_closure(
    degree: u8,
    generators: &[Permutation],
    cap: usize,
) -> Result<Vec<Permutation>> {
    let identity = Permutation::identity(degree);
    let mut seen = alloc::collections::BTreeSet::new();
    seen.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(current) = queue.pop_front() {
        for g in generators {
            let next = current.then(g);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}
