//! Independent check of the verifier: a dense simulation that indexes
//! registers as plain arrays and evaluates group products straight from the
//! concrete group's arithmetic, plus the closed-form post-selection formula
//! `1/4 || phi - phi h ||^2` with `phi = sum_x sum_g |alpha_g|^2 beta_x |xg>`.

use num_complex::Complex64;
use qgnm_core::blackbox::{ConcreteGroup, GroupKind, GroupOracle, Label, Labeling};
use qgnm_core::sampler::FSpec;
use qgnm_core::statevec::Certificate;
use qgnm_core::verifier::{verify_gnm, GnmInstance};

type C = Complex64;

/// Dense `[b][r][s]` amplitudes; garbage is a copy of `s` so it is folded
/// into the `s` index.
fn dense_accept(group: &ConcreteGroup, weights: &[(u32, f64)], h: u32, cert: &[C]) -> f64 {
    let n = cert.len();
    let idx = |b: usize, r: usize, s: usize| (b * n + r) * n + s;
    let mut psi = vec![C::new(0.0, 0.0); 2 * n * n];
    // validity projection, then F on S (S=|0> is implicit before F)
    for (r, a) in cert.iter().enumerate() {
        let lab = Label::new(r as u32, group.width()).unwrap();
        if group.element_of(lab).is_none() {
            continue;
        }
        for &(g, w) in weights {
            let s = group.label_of(g).bits() as usize;
            psi[idx(0, r, s)] += a * w.sqrt();
        }
    }
    // R <- R * S
    let mut next = vec![C::new(0.0, 0.0); psi.len()];
    for r in 0..n {
        for s in 0..n {
            let a = psi[idx(0, r, s)];
            if a == C::new(0.0, 0.0) {
                continue;
            }
            let x = group
                .element_of(Label::new(r as u32, group.width()).unwrap())
                .unwrap();
            let g = group
                .element_of(Label::new(s as u32, group.width()).unwrap())
                .unwrap();
            let z = group.label_of(group.mul(x, g)).bits() as usize;
            next[idx(0, z, s)] += a;
        }
    }
    // <F0| on S
    let mut phi = vec![C::new(0.0, 0.0); n];
    for r in 0..n {
        for &(g, w) in weights {
            let s = group.label_of(g).bits() as usize;
            phi[r] += next[idx(0, r, s)] * w.sqrt();
        }
    }
    // Hadamard on B; controlled R <- R h; Hadamard on B
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut b0 = vec![C::new(0.0, 0.0); n];
    let mut b1 = vec![C::new(0.0, 0.0); n];
    for r in 0..n {
        b0[r] += phi[r] * s2;
        let lab = Label::new(r as u32, group.width()).unwrap();
        match group.element_of(lab) {
            Some(x) => {
                let z = group.label_of(group.mul(x, h)).bits() as usize;
                b1[z] += phi[r] * s2;
            }
            None => b1[r] += phi[r] * s2,
        }
    }
    let mut accept = 0.0;
    for r in 0..n {
        accept += ((b0[r] - b1[r]) * s2).norm_sqr();
    }
    accept
}

fn closed_form_accept(group: &ConcreteGroup, weights: &[(u32, f64)], h: u32, cert: &[C]) -> f64 {
    let n = cert.len();
    let mut phi = vec![C::new(0.0, 0.0); n];
    for (r, beta) in cert.iter().enumerate() {
        let Some(x) = group.element_of(Label::new(r as u32, group.width()).unwrap()) else {
            continue;
        };
        for &(g, w) in weights {
            phi[group.label_of(group.mul(x, g)).bits() as usize] += beta * w;
        }
    }
    let mut shifted = vec![C::new(0.0, 0.0); n];
    for (r, a) in phi.iter().enumerate() {
        if let Some(x) = group.element_of(Label::new(r as u32, group.width()).unwrap()) {
            shifted[group.label_of(group.mul(x, h)).bits() as usize] += a;
        }
    }
    0.25 * phi
        .iter()
        .zip(&shifted)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
}

fn weights_of(group: &ConcreteGroup, f: &FSpec) -> Vec<(u32, f64)> {
    f.profile()
        .iter()
        .map(|(l, a)| (group.element_of(l).unwrap(), a.norm_sqr()))
        .collect()
}

fn check_instance(group: ConcreteGroup, gens: &[u32], h: u32, perturb: Option<f64>) {
    let oracle = GroupOracle::new(group.clone());
    let gen_labels: Vec<Label> = gens.iter().map(|&g| group.label_of(g)).collect();
    let inst = GnmInstance::new(oracle, gen_labels, group.label_of(h)).unwrap();
    let f = match perturb {
        None => inst.exact_f().unwrap(),
        Some(eps) => inst.perturbed_f(eps, 99).unwrap(),
    };
    let weights = weights_of(&group, &f);
    let width = group.width();
    let mut certs: Vec<Certificate> = Label::all(width).map(Certificate::point_mass).collect();
    certs.extend((0..40).map(|s| Certificate::random(width, s)));
    certs.push(inst.honest_certificate().unwrap());
    for cert in &certs {
        let dense = cert.to_dense();
        let a = dense_accept(&group, &weights, h, &dense);
        let b = closed_form_accept(&group, &weights, h, &dense);
        let got = verify_gnm(&inst, cert, &f).unwrap().accept_probability;
        assert!((a - b).abs() < 1e-12, "dense {a} vs closed form {b}");
        assert!((got - a).abs() < 1e-12, "verifier {got} vs dense {a}");
    }
}

#[test]
fn point_mass_identity_on_z6_is_one_sixth() {
    // Frozen from the dense oracle before the verifier existed.
    let group = ConcreteGroup::cyclic(6).unwrap();
    let weights: Vec<(u32, f64)> = [0, 2, 4].iter().map(|&g| (g, 1.0 / 3.0)).collect();
    let mut cert = vec![C::new(0.0, 0.0); 8];
    cert[0] = C::new(1.0, 0.0);
    let dense = dense_accept(&group, &weights, 3, &cert);
    let closed = closed_form_accept(&group, &weights, 3, &cert);
    assert!((dense - 1.0 / 6.0).abs() < 1e-12);
    assert!((closed - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn verifier_agrees_with_dense_simulation() {
    check_instance(ConcreteGroup::cyclic(6).unwrap(), &[2], 3, None);
    check_instance(ConcreteGroup::cyclic(6).unwrap(), &[2], 4, None);
    check_instance(ConcreteGroup::cyclic(12).unwrap(), &[4], 2, Some(0.05));
    check_instance(ConcreteGroup::cyclic(12).unwrap(), &[4], 8, Some(0.05));
    check_instance(ConcreteGroup::symmetric(3).unwrap(), &[1], 3, None);
    check_instance(ConcreteGroup::symmetric(3).unwrap(), &[1], 0, Some(0.1));
    let zp = ConcreteGroup::new(GroupKind::DirectProduct { p: 3 }, 4, Labeling::Seeded(5)).unwrap();
    check_instance(zp.clone(), &[3], 1, None);
    check_instance(zp, &[3], 6, Some(0.1));
}
