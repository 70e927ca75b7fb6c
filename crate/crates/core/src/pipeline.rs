//! The degree-4 → degree-3 reduction end to end, sign dispatch, and
//! certificates that can be re-checked from scratch.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circuit2poly::{reduce_to_deg4, CircuitPair};
use crate::error::{input, Error, Result};
use crate::f2poly::{BoolPoly, DEFAULT_BRUTE_FORCE_CUTOFF};
use crate::gate_synth::{synthesize_uf_detailed, GeneratorWord, SynthesisBudget, VERIFY_QUBITS};
use crate::qswe::{
    build_deg3_poly, eval_real_part, eval_real_part_by_simulation, extract, QsweInstance, NULLSPACE_CUTOFF,
};
use crate::quantum_core::pad_for_special_unitary;

/// Outcome of a sign decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Negative,
    Balanced,
    Positive,
    Indeterminate,
}

impl Verdict {
    pub fn from_signum(s: i32) -> Verdict {
        match s.signum() {
            1 => Verdict::Positive,
            -1 => Verdict::Negative,
            _ => Verdict::Balanced,
        }
    }

    /// Process exit code: 0 for a sign, 1 for no sign.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Positive | Verdict::Negative => 0,
            Verdict::Balanced | Verdict::Indeterminate => 1,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Negative => "NEGATIVE",
            Verdict::Balanced => "BALANCED",
            Verdict::Positive => "POSITIVE",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Requested synthesis precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Precision {
    /// `2^{−n−1}` for the padded variable count `n`.
    Auto,
    Delta(f64),
}

impl Precision {
    pub fn resolve(self, padded_vars: usize) -> f64 {
        match self {
            Precision::Auto => (-(padded_vars as f64) - 1.0).exp2(),
            Precision::Delta(d) => d,
        }
    }
}

/// How the real-part integer was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegerRoute {
    /// Signed weight enumerator over the nullspace of `[A; g]`.
    Enumerator,
    /// Exact Gaussian-integer simulation of the word.
    GaussianSimulation,
}

/// How `measured_distance` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// Dense simulation of the word against `U(f)`.
    Simulated,
    /// Sum of the per-rotation distances (register too large to simulate).
    Bound,
}

/// Everything needed to re-check one reduction. Big integers are decimal
/// strings; polynomials, the word and the instance use their text formats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    pub input_poly: String,
    pub delta_input: Option<String>,
    pub padded_poly: String,
    pub word: String,
    pub word_length: usize,
    pub delta_target: f64,
    pub measured_distance: f64,
    pub distance_kind: DistanceKind,
    pub instance: String,
    pub output_poly: String,
    pub output_degree: usize,
    /// `20^{N/2} Re⟨0|Ũ|0⟩`.
    pub real_part_integer: String,
    pub integer_route: IntegerRoute,
    /// `Δg = 2^{m+1} · real_part_integer`.
    pub output_delta_formula: String,
    /// `N` in the positive factor `20^{N/2}` divided out of `Δg`.
    pub scale_exponent: usize,
    /// `Re⟨0|Ũ|0⟩` as a float, for reporting only.
    pub real_part: f64,
    pub verdict: Verdict,
}

impl ReductionCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn input(&self) -> Result<BoolPoly> {
        self.input_poly.parse()
    }

    pub fn output(&self) -> Result<BoolPoly> {
        self.output_poly.parse()
    }

    pub fn generator_word(&self) -> Result<GeneratorWord> {
        self.word.parse()
    }

    pub fn qswe_instance(&self) -> Result<QsweInstance> {
        self.instance.parse()
    }

    pub fn output_delta(&self) -> Result<BigInt> {
        parse_int(&self.output_delta_formula)
    }

    /// Writes the JSON document through a temporary file and a rename.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let json = self.to_json()?;
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path
            .file_name()
            .ok_or_else(|| Error::Input(format!("`{}` is not a file path", path.display())))?;
        let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
        std::fs::write(&tmp, json)?;
        std::fs::rename(&tmp, path).inspect_err(|_| {
            let _ = std::fs::remove_file(&tmp);
        })?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s).map_err(|e| Error::Input(format!("bad integer `{s}`: {e}")))
}

fn nullspace_dim(inst: &QsweInstance) -> usize {
    inst.n_letters - inst.stacked().rank()
}

/// The real-part integer by the enumerator when the nullspace is small
/// enough, else by exact simulation; both give the same number.
fn real_part_integer(word: &GeneratorWord, inst: &QsweInstance) -> Result<(BigInt, IntegerRoute)> {
    if nullspace_dim(inst) <= NULLSPACE_CUTOFF {
        Ok((eval_real_part(inst)?.integer, IntegerRoute::Enumerator))
    } else {
        Ok((eval_real_part_by_simulation(word)?.integer, IntegerRoute::GaussianSimulation))
    }
}

/// `f ↦ g` with `deg g ≤ 3` and `sign Δg = sign Δf` whenever `|2^{−n}Δf|`
/// exceeds the achieved distance.
pub fn reduce_deg4_to_deg3(f: &BoolPoly, precision: Precision, budget: &SynthesisBudget) -> Result<ReductionCertificate> {
    if f.degree() > 4 {
        return Err(Error::Degree {
            degree: f.degree(),
            max: 4,
        });
    }
    if f.n_vars() == 0 {
        return input("the reduction needs at least one variable");
    }
    let delta_input = (f.n_vars() <= DEFAULT_BRUTE_FORCE_CUTOFF)
        .then(|| f.delta_bruteforce())
        .transpose()?
        .map(|d| d.0);
    let padded = pad_for_special_unitary(f);
    let delta = precision.resolve(padded.n_vars());
    if !(delta > 0.0) {
        return input("δ must be positive");
    }
    let synth = synthesize_uf_detailed(&padded, delta, budget)?;
    let (measured, kind) = match synth.measured {
        Some(m) => (m, DistanceKind::Simulated),
        None => (synth.bound, DistanceKind::Bound),
    };
    let inst = extract(&synth.word);
    let (s, route) = real_part_integer(&synth.word, &inst)?;
    let g = build_deg3_poly(&inst);
    let formula = &s << (inst.m() + 1);
    let real_part = crate::qswe::ExactEnumeratorValue {
        integer: s.clone(),
        scale_exponent: inst.n_letters,
    }
    .to_f64();
    let verdict = decide(delta_input.as_ref(), &s, real_part, measured);
    Ok(ReductionCertificate {
        input_poly: f.to_string(),
        delta_input: delta_input.map(|d| d.to_string()),
        padded_poly: padded.to_string(),
        word: synth.word.to_string(),
        word_length: synth.word.len(),
        delta_target: delta,
        measured_distance: measured,
        distance_kind: kind,
        instance: inst.to_string(),
        output_degree: g.degree(),
        output_poly: g.to_string(),
        real_part_integer: s.to_string(),
        integer_route: route,
        output_delta_formula: formula.to_string(),
        scale_exponent: inst.n_letters,
        real_part,
        verdict,
    })
}

/// The sign is read from the exact integer; the float only decides whether
/// the amplitude clears the synthesis error.
fn decide(delta_input: Option<&BigInt>, s: &BigInt, real_part: f64, measured: f64) -> Verdict {
    if delta_input.is_some_and(|d| d.is_zero()) || s.is_zero() || real_part.abs() <= measured {
        return Verdict::Indeterminate;
    }
    if s.is_positive() {
        Verdict::Positive
    } else {
        Verdict::Negative
    }
}

/// Re-derives every field of a certificate from its input and word.
pub fn verify_certificate(cert: &ReductionCertificate) -> Result<()> {
    let fail = |what: &str| Err(Error::Verification(what.to_string()));
    let f = cert.input()?;
    let padded = pad_for_special_unitary(&f);
    if padded.to_string() != cert.padded_poly {
        return fail("padded polynomial");
    }
    if let Some(d) = &cert.delta_input {
        if f.delta_bruteforce()?.0 != parse_int(d)? {
            return fail("input Δ");
        }
    }
    let word = cert.generator_word()?;
    if word.n() != padded.n_vars() || word.len() != cert.word_length {
        return fail("word shape");
    }
    if !(cert.measured_distance < cert.delta_target) {
        return fail("measured distance is not below δ");
    }
    if cert.distance_kind == DistanceKind::Simulated {
        if word.n() > VERIFY_QUBITS {
            return fail("simulated distance on a register too large to simulate");
        }
        let m = crate::gate_synth::measure_uf_distance(&padded, &word)?;
        if (m - cert.measured_distance).abs() > 1e-9 {
            return fail("measured distance");
        }
    }
    let inst = extract(&word);
    if inst.to_string() != cert.instance {
        return fail("QSWE instance");
    }
    let (s, route) = real_part_integer(&word, &inst)?;
    if route != cert.integer_route || s != parse_int(&cert.real_part_integer)? {
        return fail("real-part integer");
    }
    // the other route must agree as well
    if nullspace_dim(&inst) <= NULLSPACE_CUTOFF && eval_real_part_by_simulation(&word)?.integer != s {
        return fail("enumerator and simulation disagree");
    }
    let g = build_deg3_poly(&inst);
    if g.to_string() != cert.output_poly || g.degree() != cert.output_degree || g.degree() > 3 {
        return fail("output polynomial");
    }
    if (&s << (inst.m() + 1)) != cert.output_delta()? || cert.scale_exponent != inst.n_letters {
        return fail("output Δ formula");
    }
    let delta_input = cert.delta_input.as_deref().map(parse_int).transpose()?;
    if decide(delta_input.as_ref(), &s, cert.real_part, cert.measured_distance) != cert.verdict {
        return fail("verdict");
    }
    if let (Some(d), Verdict::Positive | Verdict::Negative) = (&delta_input, cert.verdict) {
        if Verdict::from_signum(if d.is_positive() { 1 } else { -1 }) != cert.verdict {
            return fail("verdict contradicts the input Δ");
        }
    }
    Ok(())
}

/// Strategy for [`sign_of_delta`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    Brute,
    Quad,
    Reduce,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Strategy::Auto),
            "brute" => Ok(Strategy::Brute),
            "quad" => Ok(Strategy::Quad),
            "reduce" => Ok(Strategy::Reduce),
            _ => input(format!("unknown strategy `{s}`")),
        }
    }
}

fn verdict_of(d: &BigInt) -> Verdict {
    Verdict::from_signum(if d.is_positive() {
        1
    } else if d.is_negative() {
        -1
    } else {
        0
    })
}

/// Sign of `Δf` by the requested route. The reduction route uses AUTO
/// precision and the given budget.
pub fn sign_of_delta(f: &BoolPoly, strategy: Strategy, budget: &SynthesisBudget) -> Result<Verdict> {
    match strategy {
        Strategy::Brute => Ok(verdict_of(&f.delta_bruteforce()?.0)),
        Strategy::Quad => Ok(verdict_of(&crate::quad_sign::delta_quadratic(f)?.0)),
        Strategy::Reduce => Ok(reduce_deg4_to_deg3(f, Precision::Auto, budget)?.verdict),
        Strategy::Auto => match f.degree() {
            0 if f.is_zero() => Ok(Verdict::Positive),
            0 => Ok(Verdict::Negative),
            1 => Ok(Verdict::Balanced),
            2 => sign_of_delta(f, Strategy::Quad, budget),
            _ if f.n_vars() <= DEFAULT_BRUTE_FORCE_CUTOFF => sign_of_delta(f, Strategy::Brute, budget),
            3 | 4 => sign_of_delta(f, Strategy::Reduce, budget),
            d => Err(Error::Unsupported(format!(
                "degree {d} on {} variables is beyond brute force and the reduction",
                f.n_vars()
            ))),
        },
    }
}

/// Result of [`reduce_circuit_pair`].
#[derive(Clone, Debug)]
pub enum CircuitReduction {
    Deg4(BoolPoly),
    Deg3 {
        deg4: BoolPoly,
        certificate: Box<ReductionCertificate>,
    },
}

/// `F_x` for a circuit pair, optionally carried on to degree 3.
pub fn reduce_circuit_pair(
    pair: &CircuitPair,
    x: &[bool],
    then_deg3: Option<(Precision, &SynthesisBudget)>,
) -> Result<CircuitReduction> {
    let f = reduce_to_deg4(pair, x)?;
    match then_deg3 {
        None => Ok(CircuitReduction::Deg4(f)),
        Some((p, b)) => {
            let cert = reduce_deg4_to_deg3(&f, p, b)?;
            Ok(CircuitReduction::Deg3 {
                deg4: f,
                certificate: Box::new(cert),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    fn budget() -> SynthesisBudget {
        SynthesisBudget {
            net_depth: 20,
            ..SynthesisBudget::default()
        }
    }

    #[test]
    fn dispatch_examples() {
        let b = budget();
        assert_eq!(sign_of_delta(&poly("nvars=2\nx1 + x2 + 1"), Strategy::Auto, &b).unwrap(), Verdict::Balanced);
        assert_eq!(sign_of_delta(&poly("nvars=2\nx1*x2"), Strategy::Auto, &b).unwrap(), Verdict::Positive);
        assert_eq!(sign_of_delta(&poly("nvars=3\n1"), Strategy::Auto, &b).unwrap(), Verdict::Negative);
        assert_eq!(sign_of_delta(&BoolPoly::zero(3), Strategy::Auto, &b).unwrap(), Verdict::Positive);
        let f = poly("nvars=4\nx1*x2*x3 + x4");
        assert_eq!(sign_of_delta(&f, Strategy::Auto, &b).unwrap(), Verdict::Balanced);
    }

    #[test]
    fn zero_polynomial_reduces_trivially() {
        let c = reduce_deg4_to_deg3(&BoolPoly::zero(2), Precision::Auto, &budget()).unwrap();
        assert_eq!(c.word_length, 0);
        assert_eq!(c.verdict, Verdict::Positive);
        // Δg = 2^{m+1} with m = 3 qubits and the empty word
        assert_eq!(c.output_delta().unwrap(), BigInt::from(16));
        assert_eq!(c.output().unwrap().delta_bruteforce().unwrap().0, BigInt::from(16));
        verify_certificate(&c).unwrap();
    }

    #[test]
    fn balanced_is_indeterminate() {
        let c = reduce_deg4_to_deg3(&poly("nvars=2\nx1"), Precision::Delta(0.2), &budget()).unwrap();
        assert_eq!(c.verdict, Verdict::Indeterminate);
        verify_certificate(&c).unwrap();
    }

    #[test]
    fn small_reduction_and_tamper() {
        // Δ = 2 on two variables, amplitude 1/2
        let f = poly("nvars=2\nx1*x2");
        let c = reduce_deg4_to_deg3(&f, Precision::Delta(0.25), &budget()).unwrap();
        assert_eq!(c.verdict, Verdict::Positive);
        assert!(c.output_degree <= 3);
        verify_certificate(&c).unwrap();
        let back = ReductionCertificate::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        let mut bad = c.clone();
        bad.output_delta_formula = format!("-{}", bad.output_delta_formula);
        assert!(verify_certificate(&bad).is_err());
        let mut bad = c;
        bad.verdict = Verdict::Negative;
        assert!(verify_certificate(&bad).is_err());
    }

    #[test]
    fn atomic_write_roundtrip() {
        let c = reduce_deg4_to_deg3(&BoolPoly::zero(1), Precision::Auto, &budget()).unwrap();
        let dir = std::env::temp_dir().join(format!("deltasign-cert-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.json");
        c.write_atomic(&p).unwrap();
        assert_eq!(ReductionCertificate::read(&p).unwrap(), c);
        assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
