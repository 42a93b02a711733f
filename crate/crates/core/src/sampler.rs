//! The isometry `F : |0> -> sum_g alpha_g |g>|garbage(g)>` and a classical
//! random-subproduct sampler for subgroup elements.
//!
//! `F` is represented by its image vector `F|0>`. Applying `F^dagger` and
//! keeping the `S = 0` outcome is exactly the projection onto that vector
//! followed by relabeling `S` as `|0>`, which is all the verifier ever needs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::{GateIO, GroupOracle, Label};
use crate::error::{Error, Result};
use crate::statevec::{Config, QuantumState};
use crate::tolerance::NORM_TOLERANCE;

/// Amplitudes `alpha_g` over a subgroup, with the declared window `epsilon`
/// on `|alpha_g|^2 - 1/|H|`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeProfile {
    entries: BTreeMap<Label, Complex64>,
    deviation: f64,
}

impl AmplitudeProfile {
    /// Checks normalization and, when `deviation > 0`, that every
    /// `|alpha_g|^2` lies strictly inside the window.
    pub fn new(entries: BTreeMap<Label, Complex64>, deviation: f64) -> Result<Self> {
        let order = entries.len();
        if order == 0 {
            return Err(Error::EmptyGenerators);
        }
        let total: f64 = entries.values().map(|a| a.norm_sqr()).sum();
        if libm::fabs(total - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        let uniform = 1.0 / order as f64;
        if deviation > 0.0
            && entries
                .values()
                .any(|a| libm::fabs(a.norm_sqr() - uniform) >= deviation)
        {
            return Err(Error::EpsilonOutOfRange {
                epsilon: deviation,
                order,
            });
        }
        Ok(AmplitudeProfile { entries, deviation })
    }

    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    pub fn amplitude(&self, g: Label) -> Complex64 {
        self.entries.get(&g).copied().unwrap_or_default()
    }

    /// `|alpha_g|^2`.
    pub fn weight(&self, g: Label) -> f64 {
        self.amplitude(g).norm_sqr()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, Complex64)> + '_ {
        self.entries.iter().map(|(l, a)| (*l, *a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A model of the sampler isometry over a subgroup `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct FSpec {
    subgroup: BTreeSet<Label>,
    profile: AmplitudeProfile,
    garbage: BTreeMap<Label, Label>,
    seed: Option<u64>,
}

impl FSpec {
    /// Assembles a spec from a closed subgroup and a profile supported on
    /// exactly that subgroup. Garbage tags are copies of `g`.
    pub fn new(
        subgroup: BTreeSet<Label>,
        profile: AmplitudeProfile,
        seed: Option<u64>,
    ) -> Result<Self> {
        if profile.len() != subgroup.len() || profile.iter().any(|(g, _)| !subgroup.contains(&g)) {
            return Err(Error::FSpecMismatch);
        }
        let garbage = subgroup.iter().map(|&g| (g, g)).collect();
        Ok(FSpec {
            subgroup,
            profile,
            garbage,
            seed,
        })
    }

    /// Rebuilds a spec from stored weights `|alpha_g|^2` with real
    /// nonnegative amplitudes.
    pub fn from_weights(
        weights: &BTreeMap<Label, f64>,
        deviation: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        let entries = weights
            .iter()
            .map(|(g, w)| (*g, Complex64::new(libm::sqrt(*w), 0.0)))
            .collect();
        let profile = AmplitudeProfile::new(entries, deviation)?;
        Self::new(weights.keys().copied().collect(), profile, seed)
    }

    pub fn subgroup(&self) -> &BTreeSet<Label> {
        &self.subgroup
    }

    pub fn profile(&self) -> &AmplitudeProfile {
        &self.profile
    }

    pub fn garbage(&self, g: Label) -> Option<Label> {
        self.garbage.get(&g).copied()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn width(&self) -> u8 {
        self.subgroup.iter().next().map(|l| l.width()).unwrap_or(0)
    }

    fn image(&self) -> impl Iterator<Item = (Label, Label, Complex64)> + '_ {
        self.profile
            .iter()
            .map(move |(g, a)| (g, self.garbage[&g], a))
    }
}

/// `alpha_g = |H|^{-1/2}` on `<gens>`, no deviation.
pub fn build_exact_uniform_f(oracle: &GroupOracle, gens: &[Label]) -> Result<FSpec> {
    let subgroup = oracle.enumerate_subgroup(gens)?;
    exact_uniform_over(subgroup)
}

pub(crate) fn exact_uniform_over(subgroup: BTreeSet<Label>) -> Result<FSpec> {
    let amp = Complex64::new(1.0 / libm::sqrt(subgroup.len() as f64), 0.0);
    let entries = subgroup.iter().map(|&g| (g, amp)).collect();
    let profile = AmplitudeProfile::new(entries, 0.0)?;
    FSpec::new(subgroup, profile, None)
}

/// Seeded real nonnegative amplitudes with every `|alpha_g|^2` strictly
/// within `epsilon` of `1/|H|` and total weight one.
///
/// Offsets are drawn uniformly from `[-epsilon/2, epsilon/2)` with ChaCha8,
/// centered so they sum to zero, then the weights are renormalized and the
/// window rechecked; a draw that lands on the boundary is redrawn from the
/// same stream.
pub fn build_perturbed_f(
    oracle: &GroupOracle,
    gens: &[Label],
    epsilon: f64,
    seed: u64,
) -> Result<FSpec> {
    let subgroup = oracle.enumerate_subgroup(gens)?;
    perturbed_over(subgroup, epsilon, seed)
}

pub(crate) fn perturbed_over(subgroup: BTreeSet<Label>, epsilon: f64, seed: u64) -> Result<FSpec> {
    let order = subgroup.len();
    let uniform = 1.0 / order as f64;
    if !(0.0..uniform).contains(&epsilon) {
        return Err(Error::EpsilonOutOfRange { epsilon, order });
    }
    if epsilon == 0.0 {
        let mut spec = exact_uniform_over(subgroup)?;
        spec.seed = Some(seed);
        return Ok(spec);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let offsets: Vec<f64> = (0..order)
            .map(|_| rng.random_range(-epsilon / 2.0..epsilon / 2.0))
            .collect();
        let mean = offsets.iter().sum::<f64>() / order as f64;
        let raw: Vec<f64> = offsets.iter().map(|d| uniform + d - mean).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        if weights.iter().all(|w| libm::fabs(w - uniform) < epsilon) {
            let entries = subgroup
                .iter()
                .zip(&weights)
                .map(|(g, w)| (*g, Complex64::new(libm::sqrt(*w), 0.0)))
                .collect();
            let profile = AmplitudeProfile::new(entries, epsilon)?;
            return FSpec::new(subgroup, profile, Some(seed));
        }
    }
}

/// Tensors every configuration with `F|0>` on `S`.
pub fn apply_f(state: &QuantumState, fspec: &FSpec) -> Result<QuantumState> {
    if fspec.width() != state.layout().width {
        return Err(Error::WidthMismatch {
            expected: state.layout().width,
            found: fspec.width(),
        });
    }
    if state.iter().any(|(c, _)| !c.s_is_zero()) {
        return Err(Error::SNotInitialized);
    }
    let entries = state.iter().flat_map(|(c, a)| {
        fspec.image().map(move |(g, garb, alpha)| {
            (
                Config {
                    s_elem: g,
                    s_garb: garb,
                    ..*c
                },
                a * alpha,
            )
        })
    });
    Ok(QuantumState::from_configs(state.layout(), entries))
}

/// Applies `F^dagger` to `S` and keeps the `S = 0` outcome.
///
/// Each remaining configuration `(B, R, err)` receives amplitude
/// `sum_g conj(alpha_g) psi(B, R, err, g, garbage(g))`. Returns the branch's
/// squared norm together with the (unnormalized) branch.
pub fn apply_f_adjoint_project(state: &QuantumState, fspec: &FSpec) -> (f64, QuantumState) {
    let width = state.layout().width;
    let zero = Label::zero(width);
    let mut collapsed: BTreeMap<Config, Complex64> = BTreeMap::new();
    for (c, a) in state.iter() {
        if fspec.garbage(c.s_elem) != Some(c.s_garb) {
            continue;
        }
        let alpha = fspec.profile.amplitude(c.s_elem);
        let key = Config {
            s_elem: zero,
            s_garb: zero,
            ..*c
        };
        *collapsed.entry(key).or_default() += alpha.conj() * a;
    }
    let post = QuantumState::from_configs(state.layout(), collapsed);
    (post.norm_sqr(), post)
}

/// Heuristic near-uniform sampler: the product, in shuffled order, of a
/// random subset of a length-`length` generator multiset, each chosen factor
/// inverted with probability one half. Always lands in `<gens>`.
pub fn random_subproduct_sample(
    oracle: &GroupOracle,
    gens: &[Label],
    length: usize,
    seed: u64,
) -> Result<Label> {
    let first = *gens.first().ok_or(Error::EmptyGenerators)?;
    if length == 0 {
        return Err(Error::TooSmall {
            what: "subproduct length",
            min: 1,
        });
    }
    let inverses: Vec<Label> = gens
        .iter()
        .map(|&g| oracle.inverse(g))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = (0..length).map(|i| i % gens.len()).collect();
    picks.shuffle(&mut rng);
    let mut acc = oracle.identity_of(first)?;
    for i in picks {
        if rng.random::<bool>() {
            let factor = if rng.random::<bool>() {
                inverses[i]
            } else {
                gens[i]
            };
            acc = oracle
                .apply_gate(GateIO::new(false, false, factor, acc))
                .right;
        }
    }
    Ok(acc)
}
