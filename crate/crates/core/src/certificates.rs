//! Composite proofs that pair classical straight-line programs with quantum
//! non-membership certificates: Proper Subgroup and Divisor of Order.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::blackbox::{GroupOracle, Label, Slp};
use crate::error::{Error, Result};
use crate::sampler::{exact_uniform_over, FSpec};
use crate::statevec::Certificate;
use crate::verifier::{amplified_verify, GnmInstance};

/// The honest non-membership certificate `|<gens>>`.
pub fn build_subgroup_superposition(oracle: &GroupOracle, gens: &[Label]) -> Result<Certificate> {
    Certificate::uniform(oracle.width(), &oracle.enumerate_subgroup(gens)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeVerdict {
    pub classical_ok: bool,
    /// Acceptance probability of the quantum part alone.
    pub accept_probability: f64,
}

impl CompositeVerdict {
    /// Probability the whole proof is accepted.
    pub fn overall(&self) -> f64 {
        if self.classical_ok {
            self.accept_probability
        } else {
            0.0
        }
    }
}

/// Claims `<h_1..h_l>` is a proper subgroup of `<g_1..g_k>`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperSubgroupCertificate {
    /// One program per `h_i`, over `g_1..g_k`.
    pub membership_programs: Vec<Slp>,
    pub separating_element: Label,
    pub separator_program: Slp,
    /// Copied into each of the `k` amplification rounds.
    pub quantum_part: Certificate,
}

fn programs_match(
    oracle: &GroupOracle,
    gens: &[Label],
    programs: &[Slp],
    targets: &[Label],
) -> Result<bool> {
    if programs.len() != targets.len() {
        return Ok(false);
    }
    for (prog, &target) in programs.iter().zip(targets) {
        if oracle.evaluate_slp(gens, prog)? != target {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn verify_proper_subgroup(
    oracle: &GroupOracle,
    g_list: &[Label],
    h_list: &[Label],
    cert: &ProperSubgroupCertificate,
    fspec_for_h: &FSpec,
    k: usize,
) -> Result<CompositeVerdict> {
    let a = cert.separating_element;
    let classical_ok = programs_match(oracle, g_list, &cert.membership_programs, h_list)?
        && oracle.is_valid(a)
        && oracle.evaluate_slp(g_list, &cert.separator_program)? == a;
    if !oracle.is_valid(a) {
        return Ok(CompositeVerdict {
            classical_ok,
            accept_probability: 0.0,
        });
    }
    let instance = GnmInstance::new(oracle.clone(), h_list.to_vec(), a)?;
    let copies = alloc::vec![cert.quantum_part.clone(); k];
    let accept_probability = amplified_verify(&instance, &copies, fspec_for_h, k)?;
    Ok(CompositeVerdict {
        classical_ok,
        accept_probability,
    })
}

/// Brute-force prover: picks the smallest `a` in `<g> \ <h>` and derives all
/// programs. `None` when `<h>` is not a proper subgroup of `<g>`.
pub fn honest_proper_subgroup_certificate(
    oracle: &GroupOracle,
    g_list: &[Label],
    h_list: &[Label],
) -> Result<Option<ProperSubgroupCertificate>> {
    let big = oracle.enumerate_subgroup(g_list)?;
    let small = oracle.enumerate_subgroup(h_list)?;
    if !small.is_subset(&big) {
        return Ok(None);
    }
    let Some(&a) = big.difference(&small).next() else {
        return Ok(None);
    };
    let mut membership_programs = Vec::with_capacity(h_list.len());
    for &h in h_list {
        membership_programs.push(oracle.derive_slp(g_list, h)?.ok_or(Error::NotMember(h))?);
    }
    let separator_program = oracle.derive_slp(g_list, a)?.ok_or(Error::NotMember(a))?;
    Ok(Some(ProperSubgroupCertificate {
        membership_programs,
        separating_element: a,
        separator_program,
        quantum_part: Certificate::uniform(oracle.width(), &small)?,
    }))
}

/// One link `h_i` of a `p`-subgroup tower.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerStep {
    pub element: Label,
    /// Derives `element` from `g_1..g_k`.
    pub program: Slp,
    /// Certifies `element` lies outside the group generated by the earlier
    /// steps.
    pub quantum_part: Certificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimeTower {
    pub prime: u64,
    pub steps: Vec<TowerStep>,
}

/// Claims `N` divides `|<g_1..g_k>|`: one tower of length `l` for each exact
/// prime power `p^l` of `N`, in increasing order of `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorOfOrderCertificate {
    pub towers: Vec<PrimeTower>,
}

/// `(p, l)` pairs of `n` by trial division, increasing in `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut l = 0;
        while n.is_multiple_of(p) {
            n /= p;
            l += 1;
        }
        if l > 0 {
            out.push((p, l));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn is_power_of(mut m: usize, p: u64) -> bool {
    let p = p as usize;
    while m > 1 && m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Group generated by `prefix`; the trivial group (anchored on `anchor`)
/// when `prefix` is empty.
fn generated(oracle: &GroupOracle, prefix: &[Label], anchor: Label) -> Result<BTreeSet<Label>> {
    if prefix.is_empty() {
        Ok(BTreeSet::from([oracle.identity_of(anchor)?]))
    } else {
        oracle.enumerate_subgroup(prefix)
    }
}

pub fn verify_divisor_of_order(
    oracle: &GroupOracle,
    g_list: &[Label],
    n: u64,
    cert: &DivisorOfOrderCertificate,
    fspecs: &[Vec<FSpec>],
    k: usize,
) -> Result<CompositeVerdict> {
    if n < 2 {
        return Err(Error::TooSmall { what: "N", min: 2 });
    }
    if fspecs.len() != cert.towers.len() {
        return Err(Error::ArityMismatch {
            expected: cert.towers.len(),
            found: fspecs.len(),
        });
    }
    for (tower, specs) in cert.towers.iter().zip(fspecs) {
        if specs.len() != tower.steps.len() {
            return Err(Error::ArityMismatch {
                expected: tower.steps.len(),
                found: specs.len(),
            });
        }
    }

    let factors = factorize(n);
    let mut classical_ok = factors.len() == cert.towers.len()
        && factors
            .iter()
            .zip(&cert.towers)
            .all(|(&(p, l), t)| t.prime == p && t.steps.len() == l as usize);

    let mut accept_probability = 1.0;
    for (tower, specs) in cert.towers.iter().zip(fspecs) {
        let mut prefix: Vec<Label> = Vec::new();
        for (step, fspec) in tower.steps.iter().zip(specs) {
            let h = step.element;
            if !oracle.is_valid(h) {
                classical_ok = false;
                accept_probability = 0.0;
                break;
            }
            if oracle.evaluate_slp(g_list, &step.program)? != h {
                classical_ok = false;
            }
            let instance = GnmInstance::new(oracle.clone(), prefix.clone(), h)?;
            let copies = alloc::vec![step.quantum_part.clone(); k];
            accept_probability *= amplified_verify(&instance, &copies, fspec, k)?;
            prefix.push(h);
            if !is_power_of(oracle.enumerate_subgroup(&prefix)?.len(), tower.prime) {
                classical_ok = false;
            }
        }
    }
    Ok(CompositeVerdict {
        classical_ok,
        accept_probability,
    })
}

/// Brute-force prover for Divisor of Order. Searches depth-first for each
/// tower; `None` when some prime power admits no tower.
pub fn honest_divisor_certificate(
    oracle: &GroupOracle,
    g_list: &[Label],
    n: u64,
) -> Result<Option<DivisorOfOrderCertificate>> {
    if n < 2 {
        return Err(Error::TooSmall { what: "N", min: 2 });
    }
    let group = oracle.enumerate_subgroup(g_list)?;
    let mut towers = Vec::new();
    for (p, l) in factorize(n) {
        let mut chain = Vec::new();
        if !extend_tower(oracle, &group, p, l as usize, &mut chain)? {
            return Ok(None);
        }
        let mut steps = Vec::with_capacity(chain.len());
        for (i, &h) in chain.iter().enumerate() {
            let below = generated(oracle, &chain[..i], h)?;
            steps.push(TowerStep {
                element: h,
                program: oracle.derive_slp(g_list, h)?.ok_or(Error::NotMember(h))?,
                quantum_part: Certificate::uniform(oracle.width(), &below)?,
            });
        }
        towers.push(PrimeTower { prime: p, steps });
    }
    Ok(Some(DivisorOfOrderCertificate { towers }))
}

fn extend_tower(
    oracle: &GroupOracle,
    group: &BTreeSet<Label>,
    p: u64,
    remaining: usize,
    chain: &mut Vec<Label>,
) -> Result<bool> {
    if remaining == 0 {
        return Ok(true);
    }
    let anchor = *group.iter().next().ok_or(Error::EmptyGenerators)?;
    let current = generated(oracle, chain, anchor)?;
    for &h in group {
        if current.contains(&h) {
            continue;
        }
        chain.push(h);
        if is_power_of(oracle.enumerate_subgroup(chain)?.len(), p)
            && extend_tower(oracle, group, p, remaining - 1, chain)?
        {
            return Ok(true);
        }
        chain.pop();
    }
    Ok(false)
}

/// Exact-uniform samplers for every tower step of `cert`.
pub fn exact_tower_fspecs(
    oracle: &GroupOracle,
    cert: &DivisorOfOrderCertificate,
) -> Result<Vec<Vec<FSpec>>> {
    cert.towers
        .iter()
        .map(|tower| {
            tower
                .steps
                .iter()
                .enumerate()
                .map(|(i, step)| {
                    let prefix: Vec<Label> = tower.steps[..i].iter().map(|s| s.element).collect();
                    exact_uniform_over(generated(oracle, &prefix, step.element)?)
                })
                .collect()
        })
        .collect()
}
