//! The two-step quantum verification procedure for group non-membership,
//! its amplification, and exact analysis over all certificates.
//!
//! Every probability is the squared norm of an unnormalized branch: nothing
//! is renormalized after the intermediate measurements, so reported numbers
//! are unconditional.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::blackbox::{GroupOracle, Label};
use crate::error::{Error, Result};
use crate::sampler::{apply_f, apply_f_adjoint_project, FSpec};
use crate::statevec::{Certificate, QuantumState, Register, RegisterLayout};
use crate::tolerance::NORM_TOLERANCE;

/// Completeness threshold of the bounded-error quantum proof class.
pub const QMA_COMPLETENESS: f64 = 2.0 / 3.0;
/// Soundness threshold of the bounded-error quantum proof class.
pub const QMA_SOUNDNESS: f64 = 1.0 / 3.0;

/// Default bound on the certificate-space dimension for operator analysis.
pub const DEFAULT_OPERATOR_CAP: usize = 256;

/// Where an acceptance probability falls relative to the class thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QmaBand {
    Accepting,
    Rejecting,
    Gap,
}

pub fn classify(accept_probability: f64) -> QmaBand {
    if accept_probability > QMA_COMPLETENESS {
        QmaBand::Accepting
    } else if accept_probability < QMA_SOUNDNESS {
        QmaBand::Rejecting
    } else {
        QmaBand::Gap
    }
}

/// Is `candidate` outside `<generators>`?
#[derive(Clone, Debug)]
pub struct GnmInstance {
    pub oracle: GroupOracle,
    pub generators: Vec<Label>,
    pub candidate: Label,
}

impl GnmInstance {
    pub fn new(oracle: GroupOracle, generators: Vec<Label>, candidate: Label) -> Result<Self> {
        for &g in generators.iter().chain(core::iter::once(&candidate)) {
            if g.width() != oracle.width() {
                return Err(Error::WidthMismatch {
                    expected: oracle.width(),
                    found: g.width(),
                });
            }
            if !oracle.is_valid(g) {
                return Err(Error::InvalidLabel(g));
            }
        }
        Ok(GnmInstance {
            oracle,
            generators,
            candidate,
        })
    }

    pub fn width(&self) -> u8 {
        self.oracle.width()
    }

    /// `H = <generators>`; the trivial subgroup when there are none.
    pub fn subgroup(&self) -> Result<BTreeSet<Label>> {
        if self.generators.is_empty() {
            return Ok(BTreeSet::from([self.oracle.identity_of(self.candidate)?]));
        }
        self.oracle.enumerate_subgroup(&self.generators)
    }

    pub fn is_member(&self) -> Result<bool> {
        Ok(self.subgroup()?.contains(&self.candidate))
    }

    /// The honest certificate `|H>`.
    pub fn honest_certificate(&self) -> Result<Certificate> {
        Certificate::uniform(self.width(), &self.subgroup()?)
    }

    /// The exact-uniform sampler over `H`.
    pub fn exact_f(&self) -> Result<FSpec> {
        crate::sampler::exact_uniform_over(self.subgroup()?)
    }

    pub fn perturbed_f(&self, epsilon: f64, seed: u64) -> Result<FSpec> {
        crate::sampler::perturbed_over(self.subgroup()?, epsilon, seed)
    }
}

/// How the verifier checks that `R` holds valid group elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ValidityCheck {
    /// Project `R` onto the span of valid labels.
    #[default]
    Projection,
    /// Multiply `R` by a known valid element, measure the gate's error bit,
    /// then undo the multiplication. Two oracle calls.
    GateQuery,
}

/// Unconditional probability mass lost at each rejection point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RejectTally {
    pub invalid_r: f64,
    pub s_nonzero: f64,
    pub b_zero: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdictReport {
    pub step1_pass_probability: f64,
    pub accept_probability: f64,
    pub reject_reasons: RejectTally,
}

struct Run {
    report: VerdictReport,
    accepting: QuantumState,
}

fn run_procedure(
    instance: &GnmInstance,
    initial: QuantumState,
    fspec: &FSpec,
    check: ValidityCheck,
) -> Result<Run> {
    let oracle = &instance.oracle;
    let input_norm = initial.norm_sqr();

    let valid = match check {
        ValidityCheck::Projection => initial.measure_validity(oracle).into_branch(true),
        ValidityCheck::GateQuery => {
            let anchor = instance
                .generators
                .first()
                .copied()
                .unwrap_or(instance.candidate);
            initial
                .apply_right_multiply(oracle, anchor, false)
                .measure(Register::ErrorBit, |e| e == 0)
                .into_branch(true)
                .apply_right_multiply(oracle, anchor, true)
        }
    };
    let valid_norm = valid.norm_sqr();

    // Step 1: F, multiply R by S, F^dagger, keep S = 0.
    let sampled = apply_f(&valid, fspec)?.apply_s_multiply(oracle);
    let (step1_pass, invariant) = apply_f_adjoint_project(&sampled, fspec);

    // Step 2: Hadamard, controlled multiply by h, Hadamard, accept on B = 1.
    let outcome = invariant
        .apply_hadamard_b()
        .apply_controlled_right_multiply(oracle, instance.candidate)
        .apply_hadamard_b()
        .measure(Register::B, |b| b == 1);
    let accept = outcome.probability(true);

    Ok(Run {
        report: VerdictReport {
            step1_pass_probability: step1_pass,
            accept_probability: accept,
            reject_reasons: RejectTally {
                invalid_r: input_norm - valid_norm,
                s_nonzero: valid_norm - step1_pass,
                b_zero: outcome.probability(false),
            },
        },
        accepting: outcome.into_branch(true),
    })
}

fn check_fspec(instance: &GnmInstance, fspec: &FSpec) -> Result<()> {
    if fspec.subgroup() != &instance.subgroup()? {
        return Err(Error::FSpecMismatch);
    }
    Ok(())
}

/// Runs the verification procedure on `certificate` with projection-based
/// validity checking.
pub fn verify_gnm(
    instance: &GnmInstance,
    certificate: &Certificate,
    fspec: &FSpec,
) -> Result<VerdictReport> {
    verify_gnm_with(instance, certificate, fspec, ValidityCheck::Projection)
}

pub fn verify_gnm_with(
    instance: &GnmInstance,
    certificate: &Certificate,
    fspec: &FSpec,
    check: ValidityCheck,
) -> Result<VerdictReport> {
    check_fspec(instance, fspec)?;
    let layout = RegisterLayout::new(instance.width());
    let initial = QuantumState::init(layout, certificate)?;
    Ok(run_procedure(instance, initial, fspec, check)?.report)
}

/// `1/4 (sum_g | |alpha_g|^2 - |alpha_{g h^{-1}}|^2 |)^2`, an upper bound on
/// the acceptance probability of any certificate when `h` is in `H`.
pub fn member_case_bound(oracle: &GroupOracle, fspec: &FSpec, h: Label) -> Result<f64> {
    if !fspec.subgroup().contains(&h) {
        return Err(Error::NotMember(h));
    }
    let h_inv = oracle.inverse(h)?;
    let profile = fspec.profile();
    let mut total = 0.0;
    for &g in fspec.subgroup() {
        let shifted = oracle.multiply(h_inv, g)?;
        total += libm::fabs(profile.weight(g) - profile.weight(shifted));
    }
    Ok(0.25 * total * total)
}

/// Acceptance probability of `k` independent copies on a product
/// certificate, accepting iff at least one copy accepts.
pub fn amplified_verify(
    instance: &GnmInstance,
    certificates: &[Certificate],
    fspec: &FSpec,
    k: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::TooSmall {
            what: "amplification factor",
            min: 1,
        });
    }
    if certificates.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            found: certificates.len(),
        });
    }
    let mut all_reject = 1.0;
    for cert in certificates {
        all_reject *= 1.0 - verify_gnm(instance, cert, fspec)?.accept_probability;
    }
    Ok(1.0 - all_reject)
}

/// `1 - (1 - p)^k`: amplified acceptance of `k` copies that each accept with
/// probability `p`.
pub fn amplify(p: f64, k: u32) -> f64 {
    1.0 - libm::pow(1.0 - p, f64::from(k))
}

/// The Hermitian operator `M` with `Pr[accept psi] = <psi|M|psi>`, indexed by
/// certificate basis labels in lexicographic order.
#[derive(Clone, Debug)]
pub struct AcceptOperator {
    width: u8,
    matrix: DMatrix<Complex64>,
}

pub fn build_accept_operator(instance: &GnmInstance, fspec: &FSpec) -> Result<AcceptOperator> {
    build_accept_operator_capped(instance, fspec, DEFAULT_OPERATOR_CAP)
}

/// Builds `M = A^dagger A`, where column `x` of `A` is the accepting branch
/// produced from the basis certificate `|x>`.
pub fn build_accept_operator_capped(
    instance: &GnmInstance,
    fspec: &FSpec,
    cap: usize,
) -> Result<AcceptOperator> {
    let width = instance.width();
    let dim = 1usize << width;
    if dim > cap {
        return Err(Error::CapExceeded { cap });
    }
    check_fspec(instance, fspec)?;
    let layout = RegisterLayout::new(width);
    let columns: Vec<QuantumState> = Label::all(width)
        .map(|x| {
            let initial = QuantumState::init_unchecked(layout, &Certificate::point_mass(x));
            run_procedure(instance, initial, fspec, ValidityCheck::Projection).map(|r| r.accepting)
        })
        .collect::<Result<_>>()?;
    let mut matrix = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        for j in i..dim {
            let v = columns[i].inner_product(&columns[j])?;
            matrix[(i, j)] = v;
            matrix[(j, i)] = v.conj();
        }
    }
    Ok(AcceptOperator { width, matrix })
}

impl AcceptOperator {
    pub fn from_matrix(width: u8, matrix: DMatrix<Complex64>) -> Self {
        AcceptOperator { width, matrix }
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() <= tol)
        })
    }

    /// `<psi|M|psi>`.
    pub fn expectation(&self, certificate: &Certificate) -> f64 {
        let v = DVector::from_vec(certificate.to_dense());
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Acceptance operator of two copies run side by side on a (possibly
    /// entangled) joint certificate, accepting iff either copy accepts:
    /// `I - (I - M) (x) (I - M)`.
    pub fn either_of_two(&self) -> AcceptOperator {
        let n = self.dim();
        let reject = DMatrix::<Complex64>::identity(n, n) - &self.matrix;
        let joint = reject.kronecker(&reject);
        AcceptOperator {
            width: self.width,
            matrix: DMatrix::<Complex64>::identity(n * n, n * n) - joint,
        }
    }

    /// Largest eigenvalue and a canonical unit vector in its eigenspace.
    ///
    /// The vector is the normalized projection of the lowest-index basis
    /// vector with nonzero overlap onto the top eigenspace, so it does not
    /// depend on how the solver orders a degenerate basis; its first nonzero
    /// coordinate is positive real.
    pub fn top_eigenpair(&self) -> (f64, DVector<Complex64>) {
        let eig = self.matrix.clone().symmetric_eigen();
        let top = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let n = self.dim();
        let mut projector = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if top - lambda <= NORM_TOLERANCE {
                let v = eig.eigenvectors.column(k);
                projector += v * v.adjoint();
            }
        }
        let mut best = projector.column(0).into_owned();
        for j in 0..n {
            let col = projector.column(j);
            if col.norm() > 1e-6 {
                best = col.into_owned();
                break;
            }
        }
        let norm = best.norm();
        (top, best.map(|c| c / norm))
    }
}

/// The best certificate for `operator` and its acceptance probability.
pub fn optimal_certificate(operator: &AcceptOperator) -> Result<(f64, Certificate)> {
    let (value, vector) = operator.top_eigenpair();
    let cert = Certificate::from_dense(operator.width(), vector.as_slice())?;
    Ok((value, cert))
}
