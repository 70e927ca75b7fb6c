//! Words in the generators `exp(iφσ(s))`, `‖s‖ ≤ 2`, and synthesis of `U(f)`.
//!
//! `U(f)` is rewritten exactly as a product of Pauli rotations. With an unused
//! variable `p`, `Λ^J(−1) = exp(iπ Z_p x_J)` because the exponent is an integer
//! multiple of `iπ`, and `x_J = 2^{−|J|} Σ_{K⊆J} (−1)^{|K|} Z_K`. Conjugating by
//! the Hadamards turns every `Z` into `X`, so
//!
//! ```text
//! U(f) = Π_K exp(iπ c_K X_p X_K),   c_K = (−1)^{|K|} Σ_{J ∈ M(f), J ⊇ K} 2^{−|J|}
//! ```
//!
//! with no global phase left over. Strings of weight ≥ 3 are lowered by
//! `exp(iθ·iRQ) = exp(iπ/4 R) exp(iθQ) exp(−iπ/4 R)` for anticommuting `R`, `Q`,
//! and each remaining rotation is approximated inside an SU(2) subgroup of
//! three generators (see [`su2`]).

mod kdtree;
pub mod su2;
pub mod su4;
mod word;

use std::collections::BTreeMap;

pub use su4::{basic_approx, group_commutator, sk_refine};
pub use word::{random_word, GeneratorWord, SynthesisBudget};

use crate::error::{input, Error, Result};
use crate::f2poly::BoolPoly;
use crate::quantum_core::{
    op_norm, uf_operator, GateKind, GatePlacement, Pauli, PauliString, C64,
};
use nalgebra::DMatrix;

/// `exp(iπ·units/16·P)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlannedRotation {
    pub pauli: PauliString,
    pub units: i32,
}

impl PlannedRotation {
    pub fn angle(&self) -> f64 {
        std::f64::consts::PI * f64::from(self.units) / 16.0
    }
}

/// Reduce to `(−16, 16]`, i.e. angles in `(−π, π]`.
fn normalize_units(u: i32) -> i32 {
    let r = u.rem_euclid(32);
    if r > 16 {
        r - 32
    } else {
        r
    }
}

fn push_merged(out: &mut Vec<PlannedRotation>, r: PlannedRotation) {
    if let Some(last) = out.last_mut() {
        if last.pauli == r.pauli {
            last.units = normalize_units(last.units + r.units);
            if last.units == 0 {
                out.pop();
            }
            return;
        }
    }
    if r.units != 0 {
        out.push(r);
    }
}

/// Appends `exp(iθP)` as weight ≤ 2 rotations in application order.
fn lower(p: PauliString, units: i32, out: &mut Vec<PlannedRotation>) {
    if p.weight() <= 2 {
        push_merged(out, PlannedRotation { pauli: p, units });
        return;
    }
    let sup = p.support();
    let (a, b) = (sup[0], sup[1]);
    let c = match p.get(b) {
        Pauli::X => Pauli::Z,
        Pauli::Y => Pauli::X,
        _ => Pauli::X,
    };
    let r = PauliString::from_ops(p.n(), [(a, p.get(a)), (b, c)]);
    let (k, q) = r.product(&p);
    // iRQ = P needs Q = i^{k−1}·(RP up to i^k)
    let sign = if k == 1 { 1 } else { -1 };
    push_merged(out, PlannedRotation { pauli: r, units: -4 });
    lower(q, sign * units, out);
    push_merged(out, PlannedRotation { pauli: r, units: 4 });
}

/// Weight ≤ 2 Pauli rotations whose product (first applied first) is exactly
/// `U(f)`. Needs a variable that `f` does not use.
pub fn rotation_plan(poly: &BoolPoly) -> Result<Vec<PlannedRotation>> {
    let n = poly.n_vars();
    if poly.degree() > 4 {
        return Err(Error::Degree {
            degree: poly.degree(),
            max: 4,
        });
    }
    if n > 64 {
        return Err(Error::TooLarge {
            what: "rotation plan",
            n,
            cutoff: 64,
        });
    }
    let used = poly.used_vars();
    let p = (0..n)
        .rev()
        .find(|v| !used.contains(v))
        .ok_or_else(|| Error::Input("U(f) synthesis needs an unused (padding) variable".into()))?;
    let mut coeff: BTreeMap<Vec<usize>, i32> = BTreeMap::new();
    for m in poly.monomials() {
        let j: Vec<usize> = m.vars().collect();
        let share = 16 >> j.len();
        for mask in 0..1usize << j.len() {
            let k: Vec<usize> = (0..j.len()).filter(|&i| mask >> i & 1 == 1).map(|i| j[i]).collect();
            let sign = if k.len().is_multiple_of(2) { 1 } else { -1 };
            *coeff.entry(k).or_insert(0) += sign * share;
        }
    }
    let mut terms: Vec<(Vec<usize>, i32)> = coeff
        .into_iter()
        .map(|(k, c)| (k, normalize_units(c)))
        .filter(|(_, c)| *c != 0)
        .collect();
    terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    let mut out = Vec::new();
    for (k, c) in terms {
        let pauli = PauliString::from_ops(n, std::iter::once((p, Pauli::X)).chain(k.iter().map(|&q| (q, Pauli::X))));
        lower(pauli, c, &mut out);
    }
    Ok(out)
}

/// Exactly equivalent one- and two-qubit gates for `H`, a phase or `Λ^J(−1)`.
pub fn decompose_factor(placement: &GatePlacement) -> Result<Vec<GatePlacement>> {
    match placement.kind {
        GateKind::Hadamard | GateKind::GlobalPhase(_) => Ok(vec![placement.clone()]),
        GateKind::ControlledPhase if placement.targets.len() <= 2 => Ok(vec![placement.clone()]),
        GateKind::ControlledPhase if placement.targets.len() <= 4 => {
            // Λ^J(−1) = exp(iπ x_J) = Π_K exp(iπ (−1)^{|K|} 2^{−|J|} Z_K)
            let j = &placement.targets;
            let n = j.iter().max().map_or(0, |m| m + 1);
            let unit = std::f64::consts::PI / f64::from(1u32 << j.len());
            let mut out = Vec::new();
            for mask in 0..1usize << j.len() {
                let k: Vec<usize> = (0..j.len()).filter(|&i| mask >> i & 1 == 1).map(|i| j[i]).collect();
                let theta = if k.len().is_multiple_of(2) { unit } else { -unit };
                match k.len() {
                    0 => out.push(GatePlacement::global_phase(j[0], theta)),
                    1 | 2 => out.push(GatePlacement::rotation(
                        &PauliString::from_ops(n, k.iter().map(|&q| (q, Pauli::Z))),
                        theta,
                    )?),
                    _ => {
                        // CNOTs into the last qubit fold Z_K onto it
                        let t = *k.last().expect("non-empty");
                        let ladder: Vec<GatePlacement> =
                            k[..k.len() - 1].iter().map(|&c| GatePlacement::cnot(c, t)).collect();
                        out.extend(ladder.iter().cloned());
                        out.push(GatePlacement::rotation(&PauliString::single(n, t, Pauli::Z), theta)?);
                        out.extend(ladder.into_iter().rev());
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("cannot decompose `{placement}`"))),
    }
}

/// A `+φ` word approximating `exp(−iφσ(s))`.
pub fn emulate_inverse(s: &PauliString, budget: &SynthesisBudget) -> Result<GeneratorWord> {
    budget.validate()?;
    if !(1..=2).contains(&s.weight()) {
        return input(format!("`{s}` is not a generator string"));
    }
    let eps = budget.per_factor_epsilon;
    let phi = crate::quantum_core::phi();
    // exp(iφσ)^k is at distance 2|sin((k+1)φ/2)| from exp(−iφσ)
    let (k_best, d_pow) = (1..=budget.net_depth)
        .map(|k| (k, (2.0 * (((k + 1) as f64) * phi / 2.0).sin()).abs()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let half = budget.net_depth.div_ceil(2).min(su2::MAX_HALF_DEPTH);
    let (letters, d_net) = su2::approximate_rotation(s, -phi, eps, half);
    let (letters, best) = if d_pow <= d_net {
        (vec![*s; k_best], d_pow)
    } else {
        (letters, d_net)
    };
    if best > eps {
        return Err(Error::BudgetExceeded {
            factor: None,
            best,
            wanted: eps,
        });
    }
    GeneratorWord::new(s.n(), letters)
}

/// A synthesized word with its error bound and, when simulated, its
/// measured distance from `U(f)`.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub word: GeneratorWord,
    pub rotations: usize,
    pub bound: f64,
    pub measured: Option<f64>,
}

/// Largest register on which the synthesized word is checked densely.
pub const VERIFY_QUBITS: usize = 10;

/// `‖U(f) − Ũ‖` for the word, by dense simulation.
pub fn measure_uf_distance(poly: &BoolPoly, word: &GeneratorWord) -> Result<f64> {
    let target: DMatrix<C64> = uf_operator(poly)?;
    Ok(op_norm(&(target - word.product()?)))
}

/// One inverse-free word with `‖U(f) − Ũ‖ < δ`.
pub fn synthesize_uf(poly: &BoolPoly, delta: f64, budget: &SynthesisBudget) -> Result<GeneratorWord> {
    Ok(synthesize_uf_detailed(poly, delta, budget)?.word)
}

pub fn synthesize_uf_detailed(poly: &BoolPoly, delta: f64, budget: &SynthesisBudget) -> Result<Synthesis> {
    budget.validate()?;
    if !(delta > 0.0) {
        return input("δ must be positive");
    }
    let n = poly.n_vars();
    let plan = rotation_plan(poly)?;
    let mut word = GeneratorWord::empty(n);
    if plan.is_empty() {
        return Ok(Synthesis {
            word,
            rotations: 0,
            bound: 0.0,
            measured: (n <= VERIFY_QUBITS).then_some(0.0),
        });
    }
    // strictly below δ/#rotations so the sum stays strictly below δ
    let eps = (delta / plan.len() as f64) * (1.0 - 1e-9);
    let half = budget.net_depth.div_ceil(2).min(su2::MAX_HALF_DEPTH);
    let mut bound = 0.0;
    for (i, r) in plan.iter().enumerate() {
        let (letters, d) = su2::approximate_rotation(&r.pauli, r.angle(), eps, half);
        if d > eps {
            return Err(Error::BudgetExceeded {
                factor: Some(i),
                best: d,
                wanted: eps,
            });
        }
        bound += d;
        for s in letters {
            word.push(s)?;
        }
    }
    let measured = if n <= VERIFY_QUBITS {
        let m = measure_uf_distance(poly, &word)?;
        if m >= delta {
            return Err(Error::BudgetExceeded {
                factor: None,
                best: m,
                wanted: delta,
            });
        }
        Some(m)
    } else {
        None
    };
    Ok(Synthesis {
        word,
        rotations: plan.len(),
        bound,
        measured,
    })
}
