//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances are pinned below.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use qgnm::formats::{fixture_from_text, fixture_to_text};
use qgnm::instance::parse_group_spec;
use qgnm_core::blackbox::{
    ConcreteGroup, GroupKind, GroupOracle, Instruction, Label, Labeling, Slp,
};
use qgnm_core::certificates::{
    exact_tower_fspecs, honest_proper_subgroup_certificate, verify_divisor_of_order,
    verify_proper_subgroup, DivisorOfOrderCertificate, PrimeTower, TowerStep,
};
use qgnm_core::fixtures::{
    build_fixture_oracle, find_prime, instance_from_fixture, sample_labeling, FamilyRequest,
    PrimeWindow,
};
use qgnm_core::statevec::Certificate;
use qgnm_core::verifier::{
    amplified_verify, build_accept_operator, member_case_bound, verify_gnm, GnmInstance,
};

const TOL: f64 = 1e-9;
const COMPLETENESS_BUDGET: Duration = Duration::from_secs(10);
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(60);
const SOUNDNESS_RANDOM_CERTS: u64 = 1000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn spec(s: &str) -> GnmInstance {
    parse_group_spec(s, None)
        .unwrap_or_else(|e| panic!("{s}: {e}"))
        .instance
}

fn non_member_suite() -> Vec<(String, GnmInstance)> {
    let mut specs: Vec<String> = [
        "cyclic:2;gens=0;h=1",
        "cyclic:6;gens=2;h=3",
        "cyclic:6;gens=3;h=1",
        "cyclic:12;gens=4;h=2",
        "cyclic:12;gens=3;h=2;labeling=seed:5",
        "cyclic:30;gens=6;h=5",
        "cyclic:36;gens=9;h=6;n=7;labeling=seed:2",
        "cyclic:48;gens=8;h=3",
        "cyclic:60;gens=10;h=15;labeling=seed:8",
        "cyclic:64;gens=2;h=1",
        "cyclic:64;gens=16;h=8;labeling=seed:1",
        "sym:3;gens=(0 1);h=(1 2)",
        "sym:3;gens=(0 1 2);h=(0 1)",
        "sym:3;gens=;h=(0 2)",
        "sym:4;gens=(0 1)(2 3),(0 2)(1 3);h=(0 1 2)",
        "sym:4;gens=(0 1 2 3);h=(0 1)",
        "sym:4;gens=(0 1 2),(0 1)(2 3);h=(0 1)",
        "sym:4;gens=(0 1 2);h=(0 3)",
        "zpzp:3;gens=(1,0);h=(0,1)",
        "zpzp:5;gens=(1,2);h=(1,0);labeling=seed:4",
        "zpzp:7;gens=(0,1);h=(3,3);labeling=seed:9",
        "zpzp:7;gens=(2,5);h=(0,1)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    specs.push("fixture:4;family=F1;seed=1".into());
    specs.push("fixture:6;family=F1;seed=2".into());
    specs.into_iter().map(|s| (s.clone(), spec(&s))).collect()
}

fn member_suite() -> Vec<(String, GnmInstance)> {
    [
        "cyclic:2;gens=1;h=1",
        "cyclic:6;gens=2;h=4",
        "cyclic:6;gens=2;h=0",
        "cyclic:12;gens=3;h=9",
        "cyclic:12;gens=4;h=8;labeling=seed:3",
        "cyclic:20;gens=5;h=15;labeling=seed:7",
        "cyclic:30;gens=6;h=18",
        "cyclic:48;gens=12;h=36;n=7;labeling=seed:1",
        "cyclic:64;gens=8;h=56",
        "sym:3;gens=(0 1 2);h=(0 2 1)",
        "sym:3;gens=(0 1),(1 2);h=(0 2)",
        "sym:3;gens=(1 2);h=()",
        "sym:4;gens=(0 1)(2 3),(0 2)(1 3);h=(0 3)(1 2)",
        "sym:4;gens=(0 1 2 3);h=(0 2)(1 3)",
        "sym:4;gens=(0 1 2),(0 1)(2 3);h=(0 2 3)",
        "zpzp:3;gens=(1,1);h=(2,2)",
        "zpzp:5;gens=(1,2);h=(3,1);labeling=seed:4",
        "zpzp:7;gens=(1,0),(0,1);h=(4,6)",
        "fixture:4;family=F0;seed=1",
        "fixture:6;family=F0;seed=2",
        "fixture:6;family=F0;a=3;seed=5",
    ]
    .iter()
    .map(|s| (s.to_string(), spec(s)))
    .collect()
}

fn completeness() -> (Outcome, Outcome) {
    let start = Instant::now();
    let suite = non_member_suite();
    let mut worst_accept: f64 = 0.0;
    let mut worst_step1: f64 = 0.0;
    let mut bad = Vec::new();
    for (id, inst) in &suite {
        assert!(!inst.is_member().unwrap(), "{id} is a member");
        let f = inst.exact_f().unwrap();
        let r = verify_gnm(inst, &inst.honest_certificate().unwrap(), &f).unwrap();
        let da = (r.accept_probability - 0.5).abs();
        let ds = (r.step1_pass_probability - 1.0).abs();
        worst_accept = worst_accept.max(da);
        worst_step1 = worst_step1.max(ds);
        if da > TOL || ds > TOL {
            bad.push(id.clone());
        }
    }
    let elapsed = start.elapsed();
    let n = suite.len();
    (
        outcome(
            n >= 20 && worst_accept <= TOL && elapsed < COMPLETENESS_BUDGET,
            format!(
                "{n} non-member instances, max |accept-1/2| = {worst_accept:.2e}, {:.2}s, failing {bad:?}",
                elapsed.as_secs_f64()
            ),
        ),
        outcome(
            n >= 20 && worst_step1 <= TOL,
            format!("{n} instances, max |step1-1| = {worst_step1:.2e}"),
        ),
    )
}

fn exact_soundness() -> Outcome {
    let start = Instant::now();
    let suite = member_suite();
    let count = suite.len();
    let results: Vec<(f64, usize)> = suite
        .into_par_iter()
        .map(|(id, inst)| {
            assert!(inst.is_member().unwrap(), "{id} is not a member");
            let inst = &inst;
            let f = inst.exact_f().unwrap();
            let width = inst.width();
            let mut certs: Vec<Certificate> =
                Label::all(width).map(Certificate::point_mass).collect();
            certs.extend((0..SOUNDNESS_RANDOM_CERTS).map(|s| Certificate::random(width, s)));
            let worst = certs
                .iter()
                .map(|c| verify_gnm(inst, c, &f).unwrap().accept_probability)
                .fold(0.0, f64::max);
            (worst, certs.len())
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let total: usize = results.iter().map(|r| r.1).sum();
    let elapsed = start.elapsed();
    outcome(
        count >= 20 && worst <= TOL && elapsed < SOUNDNESS_BUDGET,
        format!(
            "{count} member instances, {total} certificates, max accept = {:.2e}, {:.2}s",
            worst + 0.0,
            elapsed.as_secs_f64()
        ),
    )
}

fn perturbed_bound() -> Outcome {
    let grid: [f64; 6] = [0.0, 0.001, 0.005, 0.01, 0.02, 0.05];
    let mut checked = 0usize;
    let mut worst_slack = f64::NEG_INFINITY;
    for (id, inst) in member_suite() {
        let order = inst.subgroup().unwrap().len() as f64;
        for (j, &frac) in grid.iter().enumerate() {
            let eps = frac.min(0.9 / order);
            let f = inst.perturbed_f(eps, 100 + j as u64).unwrap();
            let bound = member_case_bound(&inst.oracle, &f, inst.candidate).unwrap();
            let mut certs = vec![inst.honest_certificate().unwrap()];
            certs.extend((0..20).map(|s| Certificate::random(inst.width(), s)));
            for c in &certs {
                let p = verify_gnm(&inst, c, &f).unwrap().accept_probability;
                worst_slack = worst_slack.max(p - bound);
                checked += 1;
                if p > bound + TOL {
                    return outcome(false, format!("{id} eps={eps}: accept {p} > bound {bound}"));
                }
            }
        }
    }

    // Window case: width n >= 8, |H| <= 16, every |alpha_g|^2 within 2^-2n.
    let mut window_worst: f64 = 0.0;
    let mut window_cases = 0;
    for (order, gen, h, seed) in [
        (200u32, 25u32, 50u32, 1u64),
        (192, 12, 60, 2),
        (160, 10, 150, 3),
        (250, 125, 125, 4),
        (240, 20, 100, 5),
    ] {
        let group =
            ConcreteGroup::new(GroupKind::Cyclic { order }, 8, Labeling::Seeded(seed)).unwrap();
        let g = group.label_of(gen);
        let h = group.label_of(h);
        let inst = GnmInstance::new(GroupOracle::new(group), vec![g], h).unwrap();
        let size = inst.subgroup().unwrap().len();
        assert!(size <= 16 && inst.is_member().unwrap());
        let n = inst.width() as i32;
        let window = 2f64.powi(-2 * n);
        let f = inst.perturbed_f(window, seed).unwrap();
        for c in (0..20)
            .map(|s| Certificate::random(inst.width(), s))
            .chain([inst.honest_certificate().unwrap()])
        {
            let p = verify_gnm(&inst, &c, &f).unwrap().accept_probability;
            window_worst = window_worst.max(p / window);
            window_cases += 1;
        }
    }
    outcome(
        worst_slack <= TOL && window_worst <= 1.0,
        format!(
            "{checked} (instance, eps, certificate) runs, max accept-bound = {:.2e}; \
             {window_cases} window runs at n=8, max accept/2^-2n = {window_worst:.2e}",
            worst_slack + 0.0
        ),
    )
}

fn amplification() -> Outcome {
    let inst = spec("cyclic:6;gens=2;h=3");
    let f = inst.exact_f().unwrap();
    let honest = inst.honest_certificate().unwrap();
    let k2 = amplified_verify(&inst, &vec![honest.clone(); 2], &f, 2).unwrap();
    let k10 = amplified_verify(&inst, &vec![honest; 10], &f, 10).unwrap();
    let target10 = 1.0 - 2f64.powi(-10);

    let member = spec("cyclic:12;gens=3;h=9");
    let mut member_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for (i, eps) in [0.01, 0.05, 0.2].into_iter().enumerate() {
        let f = member.perturbed_f(eps, i as u64).unwrap();
        let bound = member_case_bound(&member.oracle, &f, member.candidate).unwrap();
        for k in [2usize, 5, 10] {
            for s in 0..10 {
                let c = Certificate::random(member.width(), s);
                let p = amplified_verify(&member, &vec![c; k], &f, k).unwrap();
                member_ok &= p <= k as f64 * bound + TOL;
                if bound > 0.0 {
                    worst_ratio = worst_ratio.max(p / (k as f64 * bound));
                }
            }
        }
    }
    let ok = (k2 - 0.75).abs() <= TOL && k2 > 2.0 / 3.0 && k10 >= target10 - TOL && member_ok;
    outcome(
        ok,
        format!("k=2: {k2}, k=10: {k10} (target {target10}), member max accept/(k*bound) = {worst_ratio:.3}"),
    )
}

fn operator_equivalence() -> Outcome {
    let specs = [
        "cyclic:6;gens=2;h=3",
        "cyclic:6;gens=2;h=4",
        "cyclic:12;gens=4;h=2;labeling=seed:5",
        "cyclic:20;gens=5;h=3",
        "sym:3;gens=(0 1);h=(1 2)",
        "sym:3;gens=(0 1 2);h=(0 2 1)",
        "sym:4;gens=(0 1)(2 3);h=(0 2)",
        "zpzp:3;gens=(1,0);h=(0,1)",
        "zpzp:5;gens=(1,1);h=(2,2);labeling=seed:1",
        "fixture:6;family=F1;seed=3",
    ];
    let worst = specs
        .par_iter()
        .map(|s| {
            let inst = spec(s);
            let f = if s.starts_with("cyclic:20") {
                inst.perturbed_f(0.05, 1).unwrap()
            } else {
                inst.exact_f().unwrap()
            };
            let op = build_accept_operator(&inst, &f).unwrap();
            (0..100u64)
                .map(|seed| {
                    let c = Certificate::random(inst.width(), seed);
                    (op.expectation(&c) - verify_gnm(&inst, &c, &f).unwrap().accept_probability)
                        .abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= TOL,
        format!("10 instances x 100 certificates, max deviation {worst:.2e}"),
    )
}

/// Independent amplitude oracle: with exact-uniform weights the accepting
/// amplitude on `|r>` is `(phi(r) - phi(r h^-1)) / 2`, where `phi` is the
/// certificate pushed forward by right multiplication with a uniform
/// element of `H`. Uses only residue arithmetic mod 6.
fn brute_force_point_mass_z6() -> f64 {
    let h_set = [0usize, 2, 4];
    let mut phi = [Complex64::new(0.0, 0.0); 6];
    let beta = |x: usize| {
        if x == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    for x in 0..6 {
        for &g in &h_set {
            phi[(x + g) % 6] += beta(x) / 3.0;
        }
    }
    (0..6)
        .map(|r| ((phi[r] - phi[(r + 3) % 6]) / 2.0).norm_sqr())
        .sum()
}

fn point_mass() -> Outcome {
    let oracle_value = brute_force_point_mass_z6();
    let inst = spec("cyclic:6;gens=2;h=3");
    let e = inst.oracle.identity_of(inst.candidate).unwrap();
    let got = verify_gnm(&inst, &Certificate::point_mass(e), &inst.exact_f().unwrap())
        .unwrap()
        .accept_probability;
    let ok = (oracle_value - 1.0 / 6.0).abs() <= TOL && (got - 1.0 / 6.0).abs() <= TOL;
    outcome(
        ok,
        format!("verifier {got}, brute-force oracle {oracle_value}, target 1/6"),
    )
}

/// `f(2)` in `<f(1)>`, by scanning multiples mod p straight from the table.
fn table_membership(p: u32, f1: (u32, u32), f2: (u32, u32)) -> bool {
    (0..p).any(|m| ((m * f1.0) % p, (m * f1.1) % p) == f2)
}

fn fixtures() -> Outcome {
    let mut count = 0;
    for n in [4u8, 6, 8] {
        let w = find_prime(n).unwrap();
        let pp = w.p * w.p;
        if !(1u32 << (n - 2) < pp && pp < 1u32 << n) || !PrimeWindow::contains(n, w.p) {
            return outcome(false, format!("window violated for n={n}, p={}", w.p));
        }
        for (req, expect_member) in [(FamilyRequest::F1, false), (FamilyRequest::F0(None), true)] {
            for seed in 0..50u64 {
                let fx = sample_labeling(n, req, seed).unwrap();
                let table = fx.table();
                let brute = table_membership(w.p, table[0], table[1]);
                let inst = instance_from_fixture(&fx).unwrap();
                let oracle_member = inst.is_member().unwrap();
                let values: BTreeSet<_> = table.iter().collect();
                let oracle = build_fixture_oracle(&fx).unwrap();
                let valid = oracle.valid_labels().count();
                let text = fixture_to_text(&fx);
                let back = fixture_from_text(&text, "mem").unwrap();
                if brute != expect_member
                    || oracle_member != expect_member
                    || values.len() != pp as usize
                    || valid != pp as usize
                    || back != fx
                    || fixture_to_text(&back) != text
                {
                    return outcome(false, format!("n={n} {req:?} seed={seed} failed"));
                }
                count += 1;
            }
        }
    }
    outcome(
        count == 300,
        format!("{count} fixtures over n in {{4,6,8}}, both families"),
    )
}

fn composites() -> Outcome {
    let z12 = GroupOracle::new(ConcreteGroup::cyclic(12).unwrap());
    let l4 = |b| Label::new(b, 4).unwrap();
    let one = [l4(1)];
    // 6 = 1*6 and 3 = 1*3, written as repeated products of the generator.
    let power = |e: usize| {
        let mut steps = vec![Instruction::Load(0)];
        for i in 1..e {
            steps.push(Instruction::Multiply(i - 1, 0));
        }
        Slp::from_steps(steps).unwrap()
    };
    let step = |elem: u32, prefix: &[u32]| {
        let set: BTreeSet<Label> = if prefix.is_empty() {
            BTreeSet::from([l4(0)])
        } else {
            z12.enumerate_subgroup(&prefix.iter().map(|&b| l4(b)).collect::<Vec<_>>())
                .unwrap()
        };
        TowerStep {
            element: l4(elem),
            program: power(elem as usize),
            quantum_part: Certificate::uniform(4, &set).unwrap(),
        }
    };
    let cert = DivisorOfOrderCertificate {
        towers: vec![PrimeTower {
            prime: 2,
            steps: vec![step(6, &[]), step(3, &[6])],
        }],
    };
    let fspecs = exact_tower_fspecs(&z12, &cert).unwrap();
    let div = verify_divisor_of_order(&z12, &one, 4, &cert, &fspecs, 2).unwrap();
    let div_ok = div.classical_ok && (div.accept_probability - 0.5625).abs() <= TOL;

    let mut forged = cert.clone();
    forged.towers[0].steps[1].program = power(4);
    let forged_div = verify_divisor_of_order(&z12, &one, 4, &forged, &fspecs, 2).unwrap();

    let z6 = GroupOracle::new(ConcreteGroup::cyclic(6).unwrap());
    let l3 = |b| Label::new(b, 3).unwrap();
    let ps = honest_proper_subgroup_certificate(&z6, &[l3(1)], &[l3(2)])
        .unwrap()
        .unwrap();
    let f_h = qgnm_core::sampler::build_exact_uniform_f(&z6, &[l3(2)]).unwrap();
    let honest = verify_proper_subgroup(&z6, &[l3(1)], &[l3(2)], &ps, &f_h, 2).unwrap();
    let ps_ok = ps.separating_element == l3(1)
        && honest.classical_ok
        && (honest.accept_probability - 0.75).abs() <= TOL;

    let mut wrong_slp = ps.clone();
    wrong_slp.separator_program = power(2);
    let wrong = verify_proper_subgroup(&z6, &[l3(1)], &[l3(2)], &wrong_slp, &f_h, 2).unwrap();

    // Member separator: a = 4 lies in <2>, so the quantum part cannot beat the
    // member-case bound (zero under exact-uniform F) for any certificate.
    let mut member_sep = ps.clone();
    member_sep.separating_element = l3(4);
    member_sep.separator_program = power(4);
    let mut member_worst: f64 = 0.0;
    for s in 0..50 {
        member_sep.quantum_part = Certificate::random(3, s);
        let v = verify_proper_subgroup(&z6, &[l3(1)], &[l3(2)], &member_sep, &f_h, 2).unwrap();
        member_worst = member_worst.max(v.overall());
    }

    let ok =
        div_ok && !forged_div.classical_ok && ps_ok && !wrong.classical_ok && member_worst <= TOL;
    outcome(
        ok,
        format!(
            "divisor N=4: ok={} accept={}; forged SLP ok={}; proper subgroup: ok={} accept={}; \
             wrong SLP ok={}; member separator max overall = {member_worst:.2e}",
            div.classical_ok,
            div.accept_probability,
            forged_div.classical_ok,
            honest.classical_ok,
            honest.accept_probability,
            wrong.classical_ok
        ),
    )
}

fn gate_invariants() -> Outcome {
    let mut oracles: Vec<GroupOracle> = (2..=64)
        .map(|o| GroupOracle::new(ConcreteGroup::cyclic(o).unwrap()))
        .collect();
    oracles.push(GroupOracle::new(ConcreteGroup::symmetric(3).unwrap()));
    oracles.push(GroupOracle::new(ConcreteGroup::symmetric(4).unwrap()));
    for (p, w) in [(3, 4), (5, 5), (7, 6)] {
        oracles.push(GroupOracle::new(
            ConcreteGroup::new(
                GroupKind::DirectProduct { p },
                w,
                Labeling::Seeded(u64::from(p)),
            )
            .unwrap(),
        ));
    }
    for n in [4, 6] {
        for seed in 0..3 {
            oracles.push(
                build_fixture_oracle(&sample_labeling(n, FamilyRequest::F1, seed).unwrap())
                    .unwrap(),
            );
        }
    }
    let total = oracles.len();
    let counts: Vec<Option<usize>> = oracles.into_par_iter().map(|o| check_gate(&o)).collect();
    let failing = counts.iter().filter(|c| c.is_none()).count();
    let words: usize = counts.iter().flatten().sum();
    outcome(
        failing == 0,
        format!("{total} oracles, {words} basis words checked, {failing} violating"),
    )
}

fn check_gate(o: &GroupOracle) -> Option<usize> {
    use qgnm_core::blackbox::GateIO;
    let labels: Vec<Label> = Label::all(o.width()).collect();
    let mut images = BTreeSet::new();
    let mut count = 0;
    for c in [false, true] {
        for b in [false, true] {
            for &x in &labels {
                for &y in &labels {
                    let w = GateIO::new(c, b, x, y);
                    let out = o.gate_permutation(w);
                    let valid = o.is_valid(x) && o.is_valid(y);
                    let discipline = out.control == c
                        && out.left == x
                        && if valid {
                            out.error == b && o.is_valid(out.right)
                        } else {
                            out.error != b && out.right == y
                        };
                    if !discipline || !images.insert(out) {
                        return None;
                    }
                    count += 1;
                }
            }
        }
    }
    Some(count)
}

fn main() {
    let (complete, step1) = completeness();
    let results = [
        ("completeness: honest accept = 1/2", complete),
        ("step-1 perfect pass", step1),
        ("exact-uniform soundness = 0", exact_soundness()),
        ("perturbed soundness bound", perturbed_bound()),
        ("amplification", amplification()),
        ("operator/procedure equivalence", operator_equivalence()),
        ("point-mass value 1/6", point_mass()),
        ("fixture correctness", fixtures()),
        ("composite certificates", composites()),
        ("gate-level invariants", gate_invariants()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
