use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deltasign::circuit2poly::{CircuitPair, StraightLineCircuit};
use deltasign::f2poly::BoolPoly;
use deltasign::gate_synth::{synthesize_uf_detailed, GeneratorWord, SynthesisBudget};
use deltasign::pipeline::{
    reduce_circuit_pair, reduce_deg4_to_deg3, sign_of_delta, verify_certificate, CircuitReduction, Precision,
    ReductionCertificate, Strategy, Verdict,
};
use deltasign::qswe::{eval_amplitude_formula, eval_real_part, eval_real_part_by_simulation, extract, FORMULA_CUTOFF};
use deltasign::quad_sign::delta_quadratic;
use deltasign::quantum_core::pad_for_special_unitary;
use deltasign::{selftest, Error, Result};

/// Sign of Δf = #zeros − #ones for Boolean polynomials, with the
/// circuit → degree 4 → degree 3 reductions.
///
/// Exit codes: 0 for POSITIVE or NEGATIVE, 1 for BALANCED or INDETERMINATE,
/// 2 for errors.
#[derive(Parser)]
#[command(name = "deltasign", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Δf by enumeration (or the quadratic solver for degree ≤ 2).
    Delta { poly: PathBuf },
    /// Sign of Δf.
    Sign {
        poly: PathBuf,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long, default_value = DEFAULT_BUDGET)]
        budget: SynthesisBudget,
    },
    /// Degree-4 → degree-3 reduction with a certificate.
    Reduce3 {
        poly: PathBuf,
        /// Synthesis precision δ.
        #[arg(long, conflicts_with = "auto")]
        delta: Option<f64>,
        /// δ = 2^{−n−1} for the padded variable count (the default).
        #[arg(long)]
        auto: bool,
        #[arg(long, default_value = DEFAULT_BUDGET)]
        budget: SynthesisBudget,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// F_x for a pair of straight-line circuits, optionally on to degree 3.
    ReduceCircuit {
        slp1: PathBuf,
        slp2: PathBuf,
        /// Input bits, first variable first, e.g. `101`.
        #[arg(long)]
        x: String,
        #[arg(long)]
        deg3: bool,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value = DEFAULT_BUDGET)]
        budget: SynthesisBudget,
        /// Where to write F_x (or the certificate with --deg3); stdout if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Inverse-free generator word for U(f).
    Synth {
        poly: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value = DEFAULT_BUDGET)]
        budget: SynthesisBudget,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// QSWE instance and real-part integer of a word.
    Qswe { word: PathBuf },
    /// Re-check a certificate from scratch.
    Verify { cert: PathBuf },
    /// Seeded randomized identity checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const DEFAULT_BUDGET: &str = "eps=0.1,depth=26,levels=0,seed=0";

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn read_poly(path: &Path) -> Result<BoolPoly> {
    read(path)?.parse()
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Input(format!("`{s}` is not a bit string"))),
        })
        .collect()
}

fn report(cert: &ReductionCertificate) {
    eprintln!(
        "N={} δ={:.3e} distance={:.3e} Re<0|U|0>={:.6} output degree {}",
        cert.word_length, cert.delta_target, cert.measured_distance, cert.real_part, cert.output_degree
    );
}

/// Exit code for a finished command: a verdict or plain success.
fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Delta { poly } => {
            let f = read_poly(&poly)?;
            let d = if f.degree() <= 2 {
                delta_quadratic(&f)?
            } else {
                f.delta_bruteforce()?
            };
            println!("{d}");
            Ok(Verdict::from_signum(d.signum()).exit_code())
        }
        Cmd::Sign {
            poly,
            strategy,
            budget,
        } => {
            let v = sign_of_delta(&read_poly(&poly)?, strategy, &budget)?;
            println!("{v}");
            Ok(v.exit_code())
        }
        Cmd::Reduce3 {
            poly,
            delta,
            auto: _,
            budget,
            output,
        } => {
            let precision = delta.map_or(Precision::Auto, Precision::Delta);
            let cert = reduce_deg4_to_deg3(&read_poly(&poly)?, precision, &budget)?;
            cert.write_atomic(&output)?;
            report(&cert);
            println!("{}", cert.verdict);
            Ok(cert.verdict.exit_code())
        }
        Cmd::ReduceCircuit {
            slp1,
            slp2,
            x,
            deg3,
            delta,
            budget,
            output,
        } => {
            let q1: StraightLineCircuit = read(&slp1)?.parse()?;
            let q2: StraightLineCircuit = read(&slp2)?.parse()?;
            let pair = CircuitPair::new(q1, q2)?;
            let precision = delta.map_or(Precision::Auto, Precision::Delta);
            let then = deg3.then_some((precision, &budget));
            match reduce_circuit_pair(&pair, &parse_bits(&x)?, then)? {
                CircuitReduction::Deg4(f) => {
                    emit(&f.to_string(), output.as_deref())?;
                    Ok(0)
                }
                CircuitReduction::Deg3 { certificate, .. } => {
                    match &output {
                        Some(p) => certificate.write_atomic(p)?,
                        None => println!("{}", certificate.to_json()?),
                    }
                    report(&certificate);
                    eprintln!("{}", certificate.verdict);
                    Ok(certificate.verdict.exit_code())
                }
            }
        }
        Cmd::Synth {
            poly,
            delta,
            budget,
            output,
        } => {
            let mut f = read_poly(&poly)?;
            if f.used_vars().len() == f.n_vars() {
                eprintln!("every variable is used; padding with one extra variable");
                f = pad_for_special_unitary(&f);
            }
            let s = synthesize_uf_detailed(&f, delta, &budget)?;
            eprintln!(
                "N={} rotations={} bound={:.3e} measured={}",
                s.word.len(),
                s.rotations,
                s.bound,
                s.measured.map_or("not simulated".to_string(), |m| format!("{m:.3e}"))
            );
            emit(&s.word.to_string(), output.as_deref())?;
            Ok(0)
        }
        Cmd::Qswe { word } => {
            let w: GeneratorWord = read(&word)?.parse()?;
            let inst = extract(&w);
            print!("{inst}");
            let sim = eval_real_part_by_simulation(&w)?;
            match eval_real_part(&inst) {
                Ok(v) => {
                    println!("real_part_integer={}", v.integer);
                    if v.integer != sim.integer {
                        return Err(Error::Verification("enumerator and simulation disagree".into()));
                    }
                }
                Err(_) => println!("real_part_integer={} (by simulation)", sim.integer),
            }
            println!("real_part={:.12}", sim.to_f64());
            if w.len() <= FORMULA_CUTOFF {
                let a = eval_amplitude_formula(&inst)?;
                println!("amplitude={:.12}{:+.12}i", a.re, a.im);
            }
            Ok(0)
        }
        Cmd::Verify { cert } => {
            let c = ReductionCertificate::read(&cert)?;
            verify_certificate(&c)?;
            println!("certificate OK: {}", c.verdict);
            Ok(c.verdict.exit_code())
        }
        Cmd::Selftest { seed } => {
            let checks = selftest::run(seed)?;
            let mut ok = true;
            for c in &checks {
                println!(
                    "{} {} ({} cases, {} failures)",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.cases,
                    c.failures
                );
                ok &= c.passed();
            }
            if ok {
                Ok(0)
            } else {
                Err(Error::Verification("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
