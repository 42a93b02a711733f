//! Straight-line programs over a generator list: the classical membership
//! certificate format.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use super::label::Label;
use super::oracle::GroupOracle;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instruction {
    /// Push generator `gens[i]`.
    Load(usize),
    /// Product `steps[a] * steps[b]`.
    Multiply(usize, usize),
    Inverse(usize),
}

/// A program whose every instruction refers only to earlier steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slp {
    steps: Vec<Instruction>,
    result: usize,
}

impl Slp {
    pub fn new(steps: Vec<Instruction>, result: usize) -> Result<Self> {
        if result >= steps.len() {
            return Err(Error::MalformedProgram("result refers past the last step"));
        }
        for (i, step) in steps.iter().enumerate() {
            let ok = match *step {
                Instruction::Load(_) => true,
                Instruction::Multiply(a, b) => a < i && b < i,
                Instruction::Inverse(a) => a < i,
            };
            if !ok {
                return Err(Error::MalformedProgram("step refers forward"));
            }
        }
        Ok(Slp { steps, result })
    }

    /// Program whose result is its last step.
    pub fn from_steps(steps: Vec<Instruction>) -> Result<Self> {
        let result = steps
            .len()
            .checked_sub(1)
            .ok_or(Error::MalformedProgram("empty program"))?;
        Self::new(steps, result)
    }

    pub fn steps(&self) -> &[Instruction] {
        &self.steps
    }

    pub fn result(&self) -> usize {
        self.result
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl GroupOracle {
    /// Runs `program` over `gens` using only gate calls: one per
    /// multiplication, two per inversion, none per load.
    pub fn evaluate_slp(&self, gens: &[Label], program: &Slp) -> Result<Label> {
        for &g in gens {
            if !self.is_valid(g) {
                return Err(Error::InvalidLabel(g));
            }
        }
        let mut values: Vec<Label> = Vec::with_capacity(program.len());
        for step in program.steps() {
            let v = match *step {
                Instruction::Load(i) => *gens
                    .get(i)
                    .ok_or(Error::MalformedProgram("generator index out of range"))?,
                Instruction::Multiply(a, b) => self.multiply(values[b], values[a])?,
                Instruction::Inverse(a) => self.inverse(values[a])?,
            };
            values.push(v);
        }
        Ok(values[program.result()])
    }

    /// Finds a program deriving `target` from `gens` by breadth-first search,
    /// or `None` when `target` lies outside `<gens>`. This is the brute-force
    /// prover used to build honest certificates.
    pub fn derive_slp(&self, gens: &[Label], target: Label) -> Result<Option<Slp>> {
        let first = *gens.first().ok_or(Error::EmptyGenerators)?;
        let e = self.identity_of(first)?;
        let mut steps: Vec<Instruction> = (0..gens.len()).map(Instruction::Load).collect();
        if target == e {
            steps.push(Instruction::Inverse(0));
            steps.push(Instruction::Multiply(0, gens.len()));
            return Slp::from_steps(steps).map(Some);
        }
        // parent[x] = (y, i) with x = y * gens[i]
        let mut parent: BTreeMap<Label, Option<(Label, usize)>> = BTreeMap::new();
        parent.insert(e, None);
        let mut queue = VecDeque::from([e]);
        let mut found = false;
        'search: while let Some(current) = queue.pop_front() {
            for (i, &g) in gens.iter().enumerate() {
                let next = self.multiply(g, current)?;
                if let alloc::collections::btree_map::Entry::Vacant(slot) = parent.entry(next) {
                    slot.insert(Some((current, i)));
                    if next == target {
                        found = true;
                        break 'search;
                    }
                    queue.push_back(next);
                }
            }
        }
        if !found {
            return Ok(None);
        }
        let mut path = Vec::new();
        let mut cursor = target;
        while let Some(Some((prev, i))) = parent.get(&cursor) {
            path.push(*i);
            cursor = *prev;
        }
        path.reverse();
        let mut acc = path[0];
        for &i in &path[1..] {
            steps.push(Instruction::Multiply(acc, i));
            acc = steps.len() - 1;
        }
        Slp::new(steps, acc).map(Some)
    }
}
