//! Certificate files.
//!
//! A quantum certificate lists its nonzero amplitudes:
//!
//! ```text
//! # qgnm certificate
//! width 3
//! 0 0.5773502691896258 0.0
//! 2 0.5773502691896258 0.0
//! ```
//!
//! Composite certificates add the classical parts. Straight-line programs
//! are written as step lists (`L<i>` load generator `i`, `M<a>,<b>` product
//! of steps `a` and `b`, `I<a>` inverse of step `a`), optionally ending
//! with `=<r>` when the result is not the last step. Quantum parts are
//! `amp label-hex re im` lines; `fspec <id>` names the sampler
//! specification a quantum part is checked against.
//!
//! ```text
//! # qgnm composite
//! kind proper-subgroup
//! width 3
//! program L0 M0,0
//! separator 1
//! separator-program L0 M0,0 M1,0
//! fspec exact
//! amp 0 0.5773502691896258 0.0
//! ```
//!
//! ```text
//! # qgnm composite
//! kind divisor-of-order
//! width 4
//! n 4
//! tower 2
//! step 6
//! program L0 M0,0 M1,0 I2 M3,3 I4
//! fspec exact
//! amp 0 1.0 0.0
//! step 3
//! ...
//! ```

use std::fmt::Write as _;

use num_complex::Complex64;
use qgnm_core::blackbox::{Instruction, Label, Slp};
use qgnm_core::certificates::{
    DivisorOfOrderCertificate, PrimeTower, ProperSubgroupCertificate, TowerStep,
};
use qgnm_core::statevec::Certificate;

use crate::error::{Error, Result};
use crate::formats::{data_lines, parse_field, parse_label_hex};

pub fn certificate_to_text(cert: &Certificate) -> String {
    let mut out = String::from("# qgnm certificate\n");
    let _ = writeln!(out, "width {}", cert.width());
    for (l, a) in cert.iter() {
        let _ = writeln!(out, "{l:x} {:?} {:?}", a.re, a.im);
    }
    out
}

pub fn certificate_from_text(text: &str, origin: &str) -> Result<Certificate> {
    let mut lines = data_lines(text);
    let (no, first) = lines
        .next()
        .ok_or_else(|| Error::parse(origin, 0, "missing `width` line"))?;
    let width: u8 = match first.split_once(' ') {
        Some(("width", w)) => parse_field(w.trim(), origin, no, "width")?,
        _ => return Err(Error::parse(origin, no, "expected `width <n>`")),
    };
    let mut entries = Vec::new();
    for (no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [l, re, im] = fields[..] else {
            return Err(Error::parse(origin, no, "expected `label-hex re im`"));
        };
        entries.push(parse_amp(l, re, im, width, origin, no)?);
    }
    Certificate::from_amplitudes(width, entries).map_err(Error::from)
}

fn parse_amp(
    l: &str,
    re: &str,
    im: &str,
    width: u8,
    origin: &str,
    no: usize,
) -> Result<(Label, Complex64)> {
    Ok((
        parse_label_hex(l, width, origin, no)?,
        Complex64::new(
            parse_field(re, origin, no, "re")?,
            parse_field(im, origin, no, "im")?,
        ),
    ))
}

/// A composite certificate together with the sampler references of its
/// quantum parts.
#[derive(Clone, Debug, PartialEq)]
pub enum Composite {
    ProperSubgroup {
        certificate: ProperSubgroupCertificate,
        fspec: String,
    },
    DivisorOfOrder {
        n: u64,
        certificate: DivisorOfOrderCertificate,
        /// One reference per tower step, aligned with `certificate.towers`.
        fspecs: Vec<Vec<String>>,
    },
}

fn slp_to_text(slp: &Slp) -> String {
    let mut parts: Vec<String> = slp
        .steps()
        .iter()
        .map(|s| match *s {
            Instruction::Load(i) => format!("L{i}"),
            Instruction::Multiply(a, b) => format!("M{a},{b}"),
            Instruction::Inverse(a) => format!("I{a}"),
        })
        .collect();
    if slp.result() + 1 != slp.len() {
        parts.push(format!("={}", slp.result()));
    }
    parts.join(" ")
}

fn slp_from_text(raw: &str, origin: &str, no: usize) -> Result<Slp> {
    let bad = |tok: &str| Error::parse(origin, no, format!("bad program step `{tok}`"));
    let mut steps = Vec::new();
    let mut result = None;
    for tok in raw.split_whitespace() {
        if result.is_some() {
            return Err(Error::parse(origin, no, "`=<r>` must be the last token"));
        }
        let (head, rest) = tok.split_at(1);
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad(tok));
        match head {
            "L" => steps.push(Instruction::Load(num(rest)?)),
            "I" => steps.push(Instruction::Inverse(num(rest)?)),
            "M" => {
                let (a, b) = rest.split_once(',').ok_or_else(|| bad(tok))?;
                steps.push(Instruction::Multiply(num(a)?, num(b)?));
            }
            "=" => result = Some(num(rest)?),
            _ => return Err(bad(tok)),
        }
    }
    let result = result.unwrap_or(steps.len().saturating_sub(1));
    Slp::new(steps, result).map_err(|e| Error::parse(origin, no, e.to_string()))
}

fn write_amps(out: &mut String, cert: &Certificate) {
    for (l, a) in cert.iter() {
        let _ = writeln!(out, "amp {l:x} {:?} {:?}", a.re, a.im);
    }
}

pub fn composite_to_text(composite: &Composite) -> String {
    let mut out = String::from("# qgnm composite\n");
    match composite {
        Composite::ProperSubgroup { certificate, fspec } => {
            out.push_str("kind proper-subgroup\n");
            let _ = writeln!(out, "width {}", certificate.quantum_part.width());
            for p in &certificate.membership_programs {
                let _ = writeln!(out, "program {}", slp_to_text(p));
            }
            let _ = writeln!(out, "separator {:x}", certificate.separating_element);
            let _ = writeln!(
                out,
                "separator-program {}",
                slp_to_text(&certificate.separator_program)
            );
            let _ = writeln!(out, "fspec {fspec}");
            write_amps(&mut out, &certificate.quantum_part);
        }
        Composite::DivisorOfOrder {
            n,
            certificate,
            fspecs,
        } => {
            out.push_str("kind divisor-of-order\n");
            let width = certificate
                .towers
                .iter()
                .flat_map(|t| t.steps.first())
                .map(|s| s.element.width())
                .next()
                .unwrap_or(0);
            let _ = writeln!(out, "width {width}");
            let _ = writeln!(out, "n {n}");
            for (tower, refs) in certificate.towers.iter().zip(fspecs) {
                let _ = writeln!(out, "tower {}", tower.prime);
                for (step, r) in tower.steps.iter().zip(refs) {
                    let _ = writeln!(out, "step {:x}", step.element);
                    let _ = writeln!(out, "program {}", slp_to_text(&step.program));
                    let _ = writeln!(out, "fspec {r}");
                    write_amps(&mut out, &step.quantum_part);
                }
            }
        }
    }
    out
}

struct PendingStep {
    element: Label,
    program: Option<Slp>,
    fspec: Option<String>,
    amps: Vec<(Label, Complex64)>,
    line: usize,
}

pub fn composite_from_text(text: &str, origin: &str) -> Result<Composite> {
    let mut lines = data_lines(text).peekable();
    let mut field = |key: &str| -> Result<(usize, String)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, 0, format!("missing `{key}` line")))?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
            _ => Err(Error::parse(origin, no, format!("expected `{key}` line"))),
        }
    };
    let (kind_no, kind) = field("kind")?;
    let (no, width) = field("width")?;
    let width: u8 = parse_field(&width, origin, no, "width")?;
    let rest: Vec<(usize, &str, &str)> = lines
        .map(|(no, l)| {
            let (k, v) = l.split_once(' ').unwrap_or((l, ""));
            (no, k, v.trim())
        })
        .collect();
    let cert_of = |amps: Vec<(Label, Complex64)>, no: usize| {
        Certificate::from_amplitudes(width, amps)
            .map_err(|e| Error::parse(origin, no, e.to_string()))
    };

    match kind.as_str() {
        "proper-subgroup" => {
            let mut programs = Vec::new();
            let mut separator = None;
            let mut separator_program = None;
            let mut fspec = None;
            let mut amps = Vec::new();
            let mut last = kind_no;
            for (no, k, v) in rest {
                last = no;
                match k {
                    "program" => programs.push(slp_from_text(v, origin, no)?),
                    "separator" => separator = Some(parse_label_hex(v, width, origin, no)?),
                    "separator-program" => separator_program = Some(slp_from_text(v, origin, no)?),
                    "fspec" => fspec = Some(v.to_string()),
                    "amp" => amps.push(amp_line(v, width, origin, no)?),
                    _ => return Err(Error::parse(origin, no, format!("unexpected `{k}`"))),
                }
            }
            let missing = |what: &str| Error::parse(origin, last, format!("missing `{what}`"));
            Ok(Composite::ProperSubgroup {
                certificate: ProperSubgroupCertificate {
                    membership_programs: programs,
                    separating_element: separator.ok_or_else(|| missing("separator"))?,
                    separator_program: separator_program
                        .ok_or_else(|| missing("separator-program"))?,
                    quantum_part: cert_of(amps, last)?,
                },
                fspec: fspec.ok_or_else(|| missing("fspec"))?,
            })
        }
        "divisor-of-order" => {
            let mut n = None;
            let mut towers: Vec<(u64, Vec<PendingStep>)> = Vec::new();
            for (no, k, v) in rest {
                match k {
                    "n" => n = Some(parse_field::<u64>(v, origin, no, "n")?),
                    "tower" => towers.push((parse_field(v, origin, no, "prime")?, Vec::new())),
                    "step" => {
                        let element = parse_label_hex(v, width, origin, no)?;
                        let tower = towers
                            .last_mut()
                            .ok_or_else(|| Error::parse(origin, no, "`step` before any `tower`"))?;
                        tower.1.push(PendingStep {
                            element,
                            program: None,
                            fspec: None,
                            amps: Vec::new(),
                            line: no,
                        });
                    }
                    "program" => {
                        current_step(&mut towers, origin, no, k)?.program =
                            Some(slp_from_text(v, origin, no)?)
                    }
                    "fspec" => {
                        current_step(&mut towers, origin, no, k)?.fspec = Some(v.to_string())
                    }
                    "amp" => {
                        let amp = amp_line(v, width, origin, no)?;
                        current_step(&mut towers, origin, no, k)?.amps.push(amp);
                    }
                    _ => return Err(Error::parse(origin, no, format!("unexpected `{k}`"))),
                }
            }
            let n = n.ok_or_else(|| Error::parse(origin, kind_no, "missing `n`"))?;
            let mut out_towers = Vec::new();
            let mut refs = Vec::new();
            for (prime, steps) in towers {
                let mut tower_steps = Vec::new();
                let mut tower_refs = Vec::new();
                for s in steps {
                    let missing =
                        |what: &str| Error::parse(origin, s.line, format!("step lacks `{what}`"));
                    tower_steps.push(TowerStep {
                        element: s.element,
                        program: s.program.ok_or_else(|| missing("program"))?,
                        quantum_part: cert_of(s.amps, s.line)?,
                    });
                    tower_refs.push(s.fspec.ok_or_else(|| missing("fspec"))?);
                }
                out_towers.push(PrimeTower {
                    prime,
                    steps: tower_steps,
                });
                refs.push(tower_refs);
            }
            Ok(Composite::DivisorOfOrder {
                n,
                certificate: DivisorOfOrderCertificate { towers: out_towers },
                fspecs: refs,
            })
        }
        other => Err(Error::parse(
            origin,
            kind_no,
            format!("unknown composite kind `{other}`"),
        )),
    }
}

fn current_step<'a>(
    towers: &'a mut [(u64, Vec<PendingStep>)],
    origin: &str,
    no: usize,
    key: &str,
) -> Result<&'a mut PendingStep> {
    towers
        .last_mut()
        .and_then(|t| t.1.last_mut())
        .ok_or_else(|| Error::parse(origin, no, format!("`{key}` outside a step")))
}

fn amp_line(v: &str, width: u8, origin: &str, no: usize) -> Result<(Label, Complex64)> {
    let fields: Vec<&str> = v.split_whitespace().collect();
    let [l, re, im] = fields[..] else {
        return Err(Error::parse(origin, no, "expected `amp label-hex re im`"));
    };
    parse_amp(l, re, im, width, origin, no)
}
