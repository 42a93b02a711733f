//! Builds report rows for each subcommand. Rows are computed on the rayon
//! pool and returned in job order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qgnm_core::blackbox::Label;
use qgnm_core::fixtures::{sample_labeling, FamilyRequest, FixtureLabeling};
use qgnm_core::sampler::FSpec;
use qgnm_core::statevec::Certificate;
use qgnm_core::verifier::{
    amplified_verify, amplify, build_accept_operator_capped, member_case_bound,
    optimal_certificate, verify_gnm, DEFAULT_OPERATOR_CAP,
};

use crate::config::{CertMode, ExperimentConfig, Source};
use crate::error::{read_file, write_file, Error, Result};
use crate::formats::{certificate_from_text, certificate_to_text, fixture_to_text};
use crate::instance::{fixture_instance, load_fixture, parse_group_spec, NamedInstance};
use crate::report::ReportRow;

pub fn load_instances(config: &ExperimentConfig) -> Result<Vec<NamedInstance>> {
    match &config.source {
        Source::Groups(specs) => specs
            .iter()
            .map(|s| parse_group_spec(s, config.base_dir.as_deref()))
            .collect(),
        Source::Fixtures(paths) => paths.iter().map(|p| fixture_instance(p)).collect(),
    }
}

fn sampler(named: &NamedInstance, epsilon: f64, seed: u64) -> Result<FSpec> {
    Ok(if epsilon == 0.0 {
        named.instance.exact_f()?
    } else {
        named.instance.perturbed_f(epsilon, seed)?
    })
}

struct Job {
    id: String,
    named: NamedInstance,
    epsilon: f64,
    certificate: CertChoice,
}

#[derive(Clone)]
enum CertChoice {
    Honest,
    PointMass(Option<u32>),
    Random(u64),
    Loaded(Certificate),
    Optimal,
}

/// Common fields of one verification.
struct Measured {
    step1_pass: f64,
    accept: f64,
    optimal: Option<f64>,
    optimal_certificate: Option<Certificate>,
}

fn run_job(job: Job, k: u32, seed: u64, cap: usize) -> Result<(ReportRow, Option<Certificate>)> {
    let inst = &job.named.instance;
    let fspec = sampler(&job.named, job.epsilon, seed)?;
    let width = inst.width();
    let (cert, optimal) = match job.certificate {
        CertChoice::Honest => (inst.honest_certificate()?, None),
        CertChoice::PointMass(bits) => {
            let label = match bits {
                Some(b) => Label::new(b, width)?,
                None => inst.oracle.identity_of(inst.candidate)?,
            };
            (Certificate::point_mass(label), None)
        }
        CertChoice::Random(s) => (Certificate::random(width, s), None),
        CertChoice::Loaded(c) => (c, None),
        CertChoice::Optimal => {
            let dim = 1usize << width;
            if dim > cap {
                return Err(Error::Config(format!(
                    "{}: certificate dimension {dim} exceeds the operator cap of {cap} (raise --cap)",
                    job.id
                )));
            }
            let op = build_accept_operator_capped(inst, &fspec, cap)?;
            let (value, cert) = optimal_certificate(&op)?;
            (cert, Some(value))
        }
    };
    let single = verify_gnm(inst, &cert, &fspec)?;
    let copies = vec![cert.clone(); k as usize];
    let measured = Measured {
        step1_pass: single.step1_pass_probability,
        accept: amplified_verify(inst, &copies, &fspec, k as usize)?,
        optimal,
        optimal_certificate: optimal.map(|_| cert),
    };
    let is_member = inst.is_member()?;
    let bound = if is_member {
        Some(amplify(
            member_case_bound(&inst.oracle, &fspec, inst.candidate)?,
            k,
        ))
    } else {
        None
    };
    let row = ReportRow {
        instance_id: job.id,
        group_order: inst.oracle.group().order(),
        subgroup_order: fspec.subgroup().len(),
        is_member,
        epsilon: job.epsilon,
        k,
        step1_pass: measured.step1_pass,
        accept: measured.accept,
        bound,
        optimal: measured.optimal,
    };
    Ok((row, measured.optimal_certificate))
}

fn jobs_for(
    config: &ExperimentConfig,
    instances: &[NamedInstance],
    epsilons: &[f64],
) -> Result<Vec<Job>> {
    let choices: Vec<CertChoice> = match &config.cert_mode {
        CertMode::Honest => vec![CertChoice::Honest],
        CertMode::PointMass(b) => vec![CertChoice::PointMass(*b)],
        CertMode::Random { count } => (0..u64::from(*count))
            .map(|i| CertChoice::Random(config.seed.wrapping_add(i)))
            .collect(),
        CertMode::File(path) => {
            let c = certificate_from_text(&read_file(path)?, &path.display().to_string())?;
            vec![CertChoice::Loaded(c)]
        }
        CertMode::Optimal => vec![CertChoice::Optimal],
    };
    let mut jobs = Vec::new();
    for named in instances {
        for &epsilon in epsilons {
            for (j, choice) in choices.iter().enumerate() {
                let id = if choices.len() > 1 {
                    format!("{}#{j}", named.id)
                } else {
                    named.id.clone()
                };
                jobs.push(Job {
                    id,
                    named: named.clone(),
                    epsilon,
                    certificate: choice.clone(),
                });
            }
        }
    }
    Ok(jobs)
}

fn run_all(
    config: &ExperimentConfig,
    jobs: Vec<Job>,
    cap: usize,
) -> Result<Vec<(ReportRow, Option<Certificate>)>> {
    let (k, seed) = (config.k, config.seed);
    jobs.into_par_iter()
        .map(|j| run_job(j, k, seed, cap))
        .collect()
}

/// One row per (instance, epsilon, certificate) combination.
pub fn cmd_verify(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let instances = load_instances(config)?;
    let jobs = jobs_for(config, &instances, &config.epsilons)?;
    Ok(run_all(config, jobs, DEFAULT_OPERATOR_CAP)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Like [`cmd_verify`] with rows for each instance ordered by epsilon.
pub fn cmd_sweep(config: &ExperimentConfig, grid: &[f64]) -> Result<Vec<ReportRow>> {
    if grid.is_empty() {
        return Err(Error::Config("empty epsilon grid".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let instances = load_instances(config)?;
    let jobs = jobs_for(config, &instances, &grid)?;
    Ok(run_all(config, jobs, DEFAULT_OPERATOR_CAP)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Rows carrying the top eigenvalue of each instance's acceptance operator;
/// with `dump_dir`, the optimal certificates are written there as
/// `optimal-<row>.txt`.
pub fn cmd_optimal(
    config: &ExperimentConfig,
    cap: usize,
    dump_dir: Option<&Path>,
) -> Result<Vec<ReportRow>> {
    let config = ExperimentConfig {
        cert_mode: CertMode::Optimal,
        ..config.clone()
    };
    let instances = load_instances(&config)?;
    let jobs = jobs_for(&config, &instances, &config.epsilons)?;
    let results = run_all(&config, jobs, cap)?;
    if let Some(dir) = dump_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, (_, cert)) in results.iter().enumerate() {
            if let Some(cert) = cert {
                write_file(
                    &dir.join(format!("optimal-{i}.txt")),
                    &certificate_to_text(cert),
                )?;
            }
        }
    }
    Ok(results.into_iter().map(|(r, _)| r).collect())
}

/// Parameters of the `fixture` subcommand.
#[derive(Clone, Debug)]
pub struct FixtureParams {
    pub n: u8,
    pub family: FamilyRequest,
    pub seed: u64,
    pub count: u32,
    pub out_dir: PathBuf,
}

/// A written fixture and its brute-force classification after reloading.
#[derive(Clone, Debug)]
pub struct FixtureSummary {
    pub path: PathBuf,
    pub labeling: FixtureLabeling,
    /// `true` when `f(2)` lies outside `<f(1)>`.
    pub positive: bool,
}

impl std::fmt::Display for FixtureSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let family = match self.labeling.family() {
            qgnm_core::fixtures::Family::F1 => "F1".to_string(),
            qgnm_core::fixtures::Family::F0 { a } => format!("F0(a={a})"),
        };
        write!(
            f,
            "{} n={} p={} family={} seed={} {}",
            self.path.display(),
            self.labeling.n(),
            self.labeling.p(),
            family,
            self.labeling.seed(),
            if self.positive {
                "positive"
            } else {
                "negative"
            }
        )
    }
}

pub fn cmd_fixture(params: &FixtureParams) -> Result<Vec<FixtureSummary>> {
    std::fs::create_dir_all(&params.out_dir).map_err(|e| Error::io(&params.out_dir, e))?;
    let mut out = Vec::new();
    for i in 0..u64::from(params.count) {
        let seed = params.seed.wrapping_add(i);
        let labeling = sample_labeling(params.n, params.family, seed)?;
        let tag = match params.family {
            FamilyRequest::F1 => "F1",
            FamilyRequest::F0(_) => "F0",
        };
        let path = params
            .out_dir
            .join(format!("fixture-n{}-{tag}-seed{seed}.txt", params.n));
        write_file(&path, &fixture_to_text(&labeling))?;
        let reloaded = load_fixture(&path)?;
        let positive = !qgnm_core::fixtures::instance_from_fixture(&reloaded)?.is_member()?;
        out.push(FixtureSummary {
            path,
            labeling: reloaded,
            positive,
        });
    }
    Ok(out)
}
