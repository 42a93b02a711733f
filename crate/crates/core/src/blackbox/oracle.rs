use alloc::collections::{BTreeSet, VecDeque};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use super::group::ConcreteGroup;
use super::label::Label;
use crate::error::{Error, Result};

/// Default bound on the size of any enumerated closure.
pub const DEFAULT_CLOSURE_CAP: usize = 4096;

/// One input/output word of the reversible group gate: control bit `c`,
/// error bit `b`, and the two element registers `x` (left) and `y` (right).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateIO {
    pub control: bool,
    pub error: bool,
    pub left: Label,
    pub right: Label,
}

impl GateIO {
    pub fn new(control: bool, error: bool, left: Label, right: Label) -> Self {
        GateIO {
            control,
            error,
            left,
            right,
        }
    }
}

/// A single oracle invocation as seen by a query log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryRecord {
    /// A classical call on one basis word.
    Classical { input: GateIO, output: GateIO },
    /// One application of the gate across a whole superposition. `left` is
    /// the fixed left operand when there is one (e.g. controlled multiply by
    /// `h`), `None` when the left operand is itself a register.
    Superposed { control: bool, left: Option<Label> },
}

/// Snapshot of an oracle's query accounting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryLog {
    pub count: u64,
    pub transcript: Option<Vec<QueryRecord>>,
}

/// The black-box group oracle `B_n` over a concrete group.
///
/// Every gate invocation increments the query counter. The counter and the
/// optional transcript use unsynchronized interior mutability, so an oracle
/// is `Send` but not `Sync`: concurrent experiments each clone their own copy
/// (clones share the immutable group and copy the accounting state).
#[derive(Clone, Debug)]
pub struct GroupOracle {
    group: Arc<ConcreteGroup>,
    queries: Cell<u64>,
    transcript: Option<RefCell<Vec<QueryRecord>>>,
}

impl GroupOracle {
    pub fn new(group: ConcreteGroup) -> Self {
        GroupOracle {
            group: Arc::new(group),
            queries: Cell::new(0),
            transcript: None,
        }
    }

    /// Same gate behavior, with every call recorded in a transcript.
    pub fn with_query_log(mut self) -> Self {
        self.transcript = Some(RefCell::new(Vec::new()));
        self
    }

    pub fn width(&self) -> u8 {
        self.group.width()
    }

    pub fn group(&self) -> &ConcreteGroup {
        &self.group
    }

    /// Membership in `G(B_n)`. This is simulator-side knowledge; procedures
    /// that must respect the black-box discipline query the gate instead.
    pub fn is_valid(&self, label: Label) -> bool {
        self.group.is_valid(label)
    }

    pub fn valid_labels(&self) -> impl Iterator<Item = Label> + '_ {
        Label::all(self.width()).filter(move |l| self.is_valid(*l))
    }

    pub fn query_count(&self) -> u64 {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
        if let Some(t) = &self.transcript {
            t.borrow_mut().clear();
        }
    }

    pub fn query_log(&self) -> QueryLog {
        QueryLog {
            count: self.queries.get(),
            transcript: self.transcript.as_ref().map(|t| t.borrow().clone()),
        }
    }

    /// The gate's action on one basis word, without touching the query
    /// accounting. Superposed applications use this as the permutation they
    /// apply to every basis configuration, and account for themselves via
    /// [`GroupOracle::record_superposed`].
    pub fn gate_permutation(&self, io: GateIO) -> GateIO {
        match (
            self.group.element_of(io.left),
            self.group.element_of(io.right),
        ) {
            (Some(x), Some(y)) => {
                let factor = if io.control { self.group.inv(x) } else { x };
                let z = self.group.mul(y, factor);
                GateIO {
                    right: self.group.label_of(z),
                    ..io
                }
            }
            _ => GateIO {
                error: !io.error,
                ..io
            },
        }
    }

    /// One classical gate call.
    pub fn apply_gate(&self, io: GateIO) -> GateIO {
        let out = self.gate_permutation(io);
        self.queries.set(self.queries.get() + 1);
        if let Some(t) = &self.transcript {
            t.borrow_mut().push(QueryRecord::Classical {
                input: io,
                output: out,
            });
        }
        out
    }

    pub(crate) fn record_superposed(&self, control: bool, left: Option<Label>) {
        self.queries.set(self.queries.get() + 1);
        if let Some(t) = &self.transcript {
            t.borrow_mut()
                .push(QueryRecord::Superposed { control, left });
        }
    }

    fn require_valid(&self, label: Label) -> Result<()> {
        if label.width() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: label.width(),
            });
        }
        if !self.is_valid(label) {
            return Err(Error::InvalidLabel(label));
        }
        Ok(())
    }

    /// Returns `yx`. One gate call.
    pub fn multiply(&self, x: Label, y: Label) -> Result<Label> {
        self.require_valid(x)?;
        self.require_valid(y)?;
        Ok(self.apply_gate(GateIO::new(false, false, x, y)).right)
    }

    /// The identity label, obtained as `x x^{-1}`. One gate call.
    pub fn identity_of(&self, x: Label) -> Result<Label> {
        self.require_valid(x)?;
        Ok(self.apply_gate(GateIO::new(true, false, x, x)).right)
    }

    /// `x^{-1}` as `e x^{-1}`. Two gate calls.
    pub fn inverse(&self, x: Label) -> Result<Label> {
        let e = self.identity_of(x)?;
        Ok(self.apply_gate(GateIO::new(true, false, x, e)).right)
    }

    pub fn enumerate_subgroup(&self, gens: &[Label]) -> Result<BTreeSet<Label>> {
        self.enumerate_subgroup_capped(gens, DEFAULT_CLOSURE_CAP)
    }

    /// Breadth-first closure of `gens` under right multiplication.
    ///
    /// In a finite group right multiplication by the generators already
    /// reaches every inverse. Costs `1 + k * |H|` gate calls for `k`
    /// generators: one to find the identity, then one per (element,
    /// generator) pair.
    pub fn enumerate_subgroup_capped(&self, gens: &[Label], cap: usize) -> Result<BTreeSet<Label>> {
        let first = *gens.first().ok_or(Error::EmptyGenerators)?;
        for &g in gens {
            self.require_valid(g)?;
        }
        let e = self.identity_of(first)?;
        let mut seen = BTreeSet::from([e]);
        let mut queue = VecDeque::from([e]);
        while let Some(current) = queue.pop_front() {
            for &g in gens {
                let next = self.apply_gate(GateIO::new(false, false, g, current)).right;
                if seen.insert(next) {
                    if seen.len() > cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(seen)
    }

    /// `h` in `<gens>`, by brute-force enumeration.
    pub fn is_member(&self, gens: &[Label], h: Label) -> Result<bool> {
        self.require_valid(h)?;
        Ok(self.enumerate_subgroup(gens)?.contains(&h))
    }

    /// `{ g h : g in subgroup }`. One gate call per element.
    pub fn right_coset(&self, subgroup: &BTreeSet<Label>, h: Label) -> Result<BTreeSet<Label>> {
        self.require_valid(h)?;
        subgroup.iter().map(|&g| self.multiply(h, g)).collect()
    }

    /// Smallest `t >= 1` with `x^t = e`. Costs `t` gate calls (one for the
    /// identity, `t - 1` multiplications).
    pub fn element_order(&self, x: Label) -> Result<u64> {
        self.element_order_capped(x, DEFAULT_CLOSURE_CAP)
    }

    pub fn element_order_capped(&self, x: Label, cap: usize) -> Result<u64> {
        let e = self.identity_of(x)?;
        let mut power = x;
        let mut t = 1u64;
        while power != e {
            if t as usize >= cap {
                return Err(Error::CapExceeded { cap });
            }
            power = self.apply_gate(GateIO::new(false, false, x, power)).right;
            t += 1;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::group::{ConcreteGroup, GroupKind, Labeling, Permutation};

    fn z6() -> GroupOracle {
        GroupOracle::new(ConcreteGroup::cyclic(6).unwrap())
    }

    fn l(bits: u32, width: u8) -> Label {
        Label::new(bits, width).unwrap()
    }

    #[test]
    fn gate_examples_on_z6() {
        let o = z6();
        let out = o.apply_gate(GateIO::new(false, false, l(2, 3), l(3, 3)));
        assert_eq!(out, GateIO::new(false, false, l(2, 3), l(5, 3)));
        let out = o.apply_gate(GateIO::new(true, false, l(2, 3), l(1, 3)));
        assert_eq!(out, GateIO::new(true, false, l(2, 3), l(5, 3)));
        let out = o.apply_gate(GateIO::new(false, false, l(7, 3), l(3, 3)));
        assert_eq!(out, GateIO::new(false, true, l(7, 3), l(3, 3)));
        assert_eq!(o.query_count(), 3);
    }

    #[test]
    fn wrappers_on_z6() {
        let o = z6();
        assert_eq!(o.multiply(l(2, 3), l(3, 3)).unwrap(), l(5, 3));
        assert_eq!(o.identity_of(l(4, 3)).unwrap(), l(0, 3));
        assert_eq!(o.inverse(l(2, 3)).unwrap(), l(4, 3));
        assert_eq!(o.inverse(l(0, 3)).unwrap(), l(0, 3));
        assert_eq!(o.element_order(l(2, 3)).unwrap(), 3);
        assert_eq!(o.element_order(l(0, 3)).unwrap(), 1);
        assert_eq!(o.multiply(l(0, 3), l(3, 3)).unwrap(), l(3, 3));
        assert_eq!(
            o.multiply(l(6, 3), l(3, 3)),
            Err(Error::InvalidLabel(l(6, 3)))
        );
        assert!(matches!(
            o.multiply(l(1, 4), l(3, 3)),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn query_costs_match_documented_formulas() {
        let o = z6();
        o.multiply(l(1, 3), l(1, 3)).unwrap();
        assert_eq!(o.query_count(), 1);
        o.reset_queries();
        o.inverse(l(1, 3)).unwrap();
        assert_eq!(o.query_count(), 2);
        o.reset_queries();
        let h = o.enumerate_subgroup(&[l(2, 3)]).unwrap();
        assert_eq!(o.query_count(), 1 + h.len() as u64);
        o.reset_queries();
        o.enumerate_subgroup(&[l(2, 3), l(3, 3)]).unwrap();
        assert_eq!(o.query_count(), 1 + 2 * 6);
        o.reset_queries();
        o.element_order(l(1, 3)).unwrap();
        assert_eq!(o.query_count(), 6);
    }

    #[test]
    fn subgroup_and_membership_on_z6() {
        let o = z6();
        let h: Vec<_> = o
            .enumerate_subgroup(&[l(2, 3)])
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(h, [l(0, 3), l(2, 3), l(4, 3)]);
        assert_eq!(o.enumerate_subgroup(&[l(2, 3), l(3, 3)]).unwrap().len(), 6);
        assert!(!o.is_member(&[l(2, 3)], l(3, 3)).unwrap());
        assert!(o.is_member(&[l(2, 3)], l(4, 3)).unwrap());
        assert_eq!(o.enumerate_subgroup(&[]), Err(Error::EmptyGenerators));
        assert_eq!(
            o.enumerate_subgroup_capped(&[l(1, 3)], 4),
            Err(Error::CapExceeded { cap: 4 })
        );
    }

    #[test]
    fn cosets_on_z6() {
        let o = z6();
        let h = o.enumerate_subgroup(&[l(2, 3)]).unwrap();
        let coset: Vec<_> = o.right_coset(&h, l(3, 3)).unwrap().into_iter().collect();
        assert_eq!(coset, [l(1, 3), l(3, 3), l(5, 3)]);
        assert_eq!(o.right_coset(&h, l(0, 3)).unwrap(), h);
        assert_eq!(o.right_coset(&h, l(2, 3)).unwrap(), h);
    }

    #[test]
    fn symmetric_group_products_follow_composition() {
        let g = ConcreteGroup::symmetric(3).unwrap();
        let t = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let c = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let lt = g.label_of(g.element_of_permutation(&t).unwrap());
        let lc = g.label_of(g.element_of_permutation(&c).unwrap());
        let o = GroupOracle::new(g.clone());
        // multiply(x, y) = yx
        let prod = o.multiply(lt, lc).unwrap();
        let expected = g.label_of(g.element_of_permutation(&c.then(&t)).unwrap());
        assert_eq!(prod, expected);
        let inv = o.inverse(lc).unwrap();
        let expected = g.label_of(g.element_of_permutation(&c.inverse()).unwrap());
        assert_eq!(inv, expected);
        let e = g.label_of(g.element_of_permutation(&Permutation::identity(3)).unwrap());
        assert_eq!(o.identity_of(lc).unwrap(), e);
        assert_eq!(o.enumerate_subgroup(&[lt, lc]).unwrap().len(), 6);
    }

    #[test]
    fn direct_product_identity_and_orders() {
        let g =
            ConcreteGroup::new(GroupKind::DirectProduct { p: 7 }, 6, Labeling::Seeded(11)).unwrap();
        let e = g.label_of(0);
        let o = GroupOracle::new(g);
        for x in o.valid_labels().collect::<Vec<_>>() {
            assert_eq!(o.identity_of(x).unwrap(), e);
            if x != e {
                assert_eq!(o.element_order(x).unwrap(), 7);
            }
        }
    }

    #[test]
    fn transcript_tracks_calls() {
        let o = z6().with_query_log();
        o.multiply(l(1, 3), l(2, 3)).unwrap();
        let log = o.query_log();
        assert_eq!(log.count, 1);
        assert_eq!(log.transcript.unwrap().len(), 1);
        let clone = o.clone();
        clone.multiply(l(1, 3), l(2, 3)).unwrap();
        assert_eq!(o.query_count(), 1);
        assert_eq!(clone.query_count(), 2);
    }
}
