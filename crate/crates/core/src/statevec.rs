//! Sparse complex state vectors over the verifier's registers.
//!
//! A basis configuration holds the control qubit `B`, the certificate
//! register `R`, the sampler registers `S_elem` / `S_garb`, and one ancilla
//! recording error-bit flips of the group gate. Oracle gates act as
//! permutations of configurations; states are immutable values and every
//! operation returns a new state.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::{GateIO, GroupOracle, Label};
use crate::error::{Error, Result};
use crate::tolerance::{NORM_TOLERANCE, PRUNE_THRESHOLD};

/// Register widths. Every element slot holds a label of `width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub width: u8,
}

impl RegisterLayout {
    pub fn new(width: u8) -> Self {
        RegisterLayout { width }
    }
}

/// One basis configuration of all registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub b: bool,
    pub r: Label,
    pub s_elem: Label,
    pub s_garb: Label,
    /// Accumulated error-bit flips from gate calls on invalid operands.
    pub err: bool,
}

impl Config {
    pub fn s_is_zero(&self) -> bool {
        self.s_elem.bits() == 0 && self.s_garb.bits() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    B,
    R,
    SElem,
    SGarb,
    /// `S_elem` and `S_garb` together; the measured value is
    /// `(elem << 16) | garb`.
    S,
    ErrorBit,
}

impl Register {
    fn value(self, c: &Config) -> u32 {
        match self {
            Register::B => c.b as u32,
            Register::R => c.r.bits().into(),
            Register::SElem => c.s_elem.bits().into(),
            Register::SGarb => c.s_garb.bits().into(),
            Register::S => (u32::from(c.s_elem.bits()) << 16) | u32::from(c.s_garb.bits()),
            Register::ErrorBit => c.err as u32,
        }
    }
}

/// An amplitude vector on the certificate register alone.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    width: u8,
    amplitudes: BTreeMap<Label, Complex64>,
}

impl Certificate {
    /// Entries with a zero amplitude are dropped; labels must have `width`.
    pub fn from_amplitudes(
        width: u8,
        entries: impl IntoIterator<Item = (Label, Complex64)>,
    ) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        for (label, amp) in entries {
            if label.width() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    found: label.width(),
                });
            }
            if amp != Complex64::new(0.0, 0.0) {
                *amplitudes.entry(label).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        Ok(Certificate { width, amplitudes })
    }

    pub fn point_mass(label: Label) -> Self {
        Certificate {
            width: label.width(),
            amplitudes: BTreeMap::from([(label, Complex64::new(1.0, 0.0))]),
        }
    }

    /// Uniform superposition `|A> = |A|^{-1/2} sum_a |a>`.
    pub fn uniform<'a>(width: u8, set: impl IntoIterator<Item = &'a Label>) -> Result<Self> {
        let labels: Vec<Label> = set.into_iter().copied().collect();
        if labels.is_empty() {
            return Err(Error::NotNormalized(0.0));
        }
        let amp = Complex64::new(1.0 / libm::sqrt(labels.len() as f64), 0.0);
        Self::from_amplitudes(width, labels.into_iter().map(|l| (l, amp)))
    }

    /// A seeded random unit vector over every `width`-bit label, including
    /// invalid ones. Components are independent complex Gaussians.
    pub fn random(width: u8, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<(Label, Complex64)> = Label::all(width)
            .map(|l| (l, Complex64::new(gaussian(&mut rng), gaussian(&mut rng))))
            .collect();
        let norm = libm::sqrt(entries.iter().map(|(_, a)| a.norm_sqr()).sum());
        let amplitudes = entries.into_iter().map(|(l, a)| (l, a / norm)).collect();
        Certificate { width, amplitudes }
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn amplitude(&self, label: Label) -> Complex64 {
        self.amplitudes.get(&label).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, Complex64)> + '_ {
        self.amplitudes.iter().map(|(l, a)| (*l, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Dense coordinates indexed by label bits.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = alloc::vec![Complex64::new(0.0, 0.0); 1usize << self.width];
        for (l, a) in &self.amplitudes {
            v[l.bits() as usize] = *a;
        }
        v
    }

    pub fn from_dense(width: u8, coords: &[Complex64]) -> Result<Self> {
        Self::from_amplitudes(
            width,
            coords
                .iter()
                .enumerate()
                .map(|(i, a)| (Label::from_raw(i as u16, width), *a)),
        )
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 in (0, 1] keeps the logarithm finite.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Sparse superposition of register configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    amplitudes: BTreeMap<Config, Complex64>,
}

/// Outcome statistics of a two-outcome projective measurement.
#[derive(Clone, Debug)]
pub struct MeasurementResult {
    /// Probabilities of the predicate being false / true.
    pub probabilities: [f64; 2],
    /// Unnormalized post-measurement branches for false / true.
    pub branches: [QuantumState; 2],
}

impl MeasurementResult {
    pub fn probability(&self, outcome: bool) -> f64 {
        self.probabilities[outcome as usize]
    }

    pub fn branch(&self, outcome: bool) -> &QuantumState {
        &self.branches[outcome as usize]
    }

    pub fn into_branch(self, outcome: bool) -> QuantumState {
        let [f, t] = self.branches;
        if outcome {
            t
        } else {
            f
        }
    }
}

impl QuantumState {
    /// Certificate in `R`, every other register in `|0>`.
    pub fn init(layout: RegisterLayout, certificate: &Certificate) -> Result<Self> {
        if certificate.width() != layout.width {
            return Err(Error::WidthMismatch {
                expected: layout.width,
                found: certificate.width(),
            });
        }
        let n2 = certificate.norm_sqr();
        if libm::fabs(n2 - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self::init_unchecked(layout, certificate))
    }

    /// Like [`QuantumState::init`] but accepts any vector; used when
    /// propagating basis vectors or sub-normalized branches linearly.
    pub fn init_unchecked(layout: RegisterLayout, certificate: &Certificate) -> Self {
        let zero = Label::zero(layout.width);
        let amplitudes = certificate
            .iter()
            .map(|(r, a)| {
                (
                    Config {
                        b: false,
                        r,
                        s_elem: zero,
                        s_garb: zero,
                        err: false,
                    },
                    a,
                )
            })
            .collect();
        QuantumState { layout, amplitudes }
    }

    pub fn from_configs(
        layout: RegisterLayout,
        entries: impl IntoIterator<Item = (Config, Complex64)>,
    ) -> Self {
        let mut amplitudes = BTreeMap::new();
        for (c, a) in entries {
            *amplitudes.entry(c).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        QuantumState { layout, amplitudes }.pruned()
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitude(&self, config: &Config) -> Complex64 {
        self.amplitudes.get(config).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Config, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        QuantumState {
            layout: self.layout,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(c, a)| (*c, a * factor))
                .collect(),
        }
        .pruned()
    }

    pub(crate) fn pruned(mut self) -> Self {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        self
    }

    /// Applies a bijection on configurations.
    fn permuted(&self, f: impl Fn(&Config) -> Config) -> Self {
        let amplitudes: BTreeMap<Config, Complex64> =
            self.amplitudes.iter().map(|(c, a)| (f(c), *a)).collect();
        debug_assert_eq!(
            amplitudes.len(),
            self.amplitudes.len(),
            "map is not injective"
        );
        QuantumState {
            layout: self.layout,
            amplitudes,
        }
    }

    pub fn apply_hadamard_b(&self) -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut out: BTreeMap<Config, Complex64> = BTreeMap::new();
        for (c, a) in &self.amplitudes {
            let zero = Config { b: false, ..*c };
            let one = Config { b: true, ..*c };
            let sign = if c.b { -1.0 } else { 1.0 };
            *out.entry(zero).or_default() += a * s;
            *out.entry(one).or_default() += a * (s * sign);
        }
        QuantumState {
            layout: self.layout,
            amplitudes: out,
        }
        .pruned()
    }

    /// Gate call with fixed left operand `x` on `R`, restricted to
    /// configurations where `when` holds. Invalid operands flip the error
    /// ancilla and leave `R` unchanged.
    fn gate_on_r(
        &self,
        oracle: &GroupOracle,
        x: Label,
        inverse: bool,
        when: impl Fn(&Config) -> bool,
    ) -> Self {
        oracle.record_superposed(inverse, Some(x));
        self.permuted(|c| {
            if !when(c) {
                return *c;
            }
            let out = oracle.gate_permutation(GateIO::new(inverse, c.err, x, c.r));
            Config {
                r: out.right,
                err: out.error,
                ..*c
            }
        })
    }

    /// `R -> R h` on configurations with `B = 1`.
    pub fn apply_controlled_right_multiply(&self, oracle: &GroupOracle, h: Label) -> Self {
        self.gate_on_r(oracle, h, false, |c| c.b)
    }

    /// `R -> R x` (or `R x^{-1}` when `inverse`) on every configuration.
    pub fn apply_right_multiply(&self, oracle: &GroupOracle, x: Label, inverse: bool) -> Self {
        self.gate_on_r(oracle, x, inverse, |_| true)
    }

    /// `R -> R s` where `s` is the content of `S_elem`.
    pub fn apply_s_multiply(&self, oracle: &GroupOracle) -> Self {
        oracle.record_superposed(false, None);
        self.permuted(|c| {
            let out = oracle.gate_permutation(GateIO::new(false, c.err, c.s_elem, c.r));
            Config {
                r: out.right,
                err: out.error,
                ..*c
            }
        })
    }

    /// Projective measurement of whether `predicate` holds on `register`.
    /// Branches are left unnormalized.
    pub fn measure(
        &self,
        register: Register,
        predicate: impl Fn(u32) -> bool,
    ) -> MeasurementResult {
        let mut parts: [BTreeMap<Config, Complex64>; 2] = [BTreeMap::new(), BTreeMap::new()];
        for (c, a) in &self.amplitudes {
            parts[predicate(register.value(c)) as usize].insert(*c, *a);
        }
        let [f, t] = parts;
        let branches = [
            QuantumState {
                layout: self.layout,
                amplitudes: f,
            },
            QuantumState {
                layout: self.layout,
                amplitudes: t,
            },
        ];
        MeasurementResult {
            probabilities: [branches[0].norm_sqr(), branches[1].norm_sqr()],
            branches,
        }
    }

    /// Projects `R` onto valid labels (`true` branch) versus invalid ones.
    pub fn measure_validity(&self, oracle: &GroupOracle) -> MeasurementResult {
        let width = self.layout.width;
        self.measure(Register::R, |bits| {
            oracle.is_valid(Label::from_raw(bits as u16, width))
        })
    }

    pub fn inner_product(&self, other: &QuantumState) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(c, a)| other.amplitudes.get(c).map(|b| a.conj() * b))
            .sum())
    }

    /// Plain-text dump, one configuration per line in sorted order:
    /// `b r s_elem s_garb err re im`, with shortest round-trip floats.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (c, a) in &self.amplitudes {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {:?} {:?}",
                c.b as u8, c.r, c.s_elem, c.s_garb, c.err as u8, a.re, a.im
            );
        }
        out
    }
}
