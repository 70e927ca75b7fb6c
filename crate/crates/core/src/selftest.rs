//! Seeded randomized checks of the Δ identities and the reduction links,
//! each against brute force. Shared by the CLI `selftest` command and the
//! test suites.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::f2poly::{random_functional, random_poly, BoolPoly, LinearFunctional};
use crate::gate_synth::random_word;
use crate::gf2::BitMatrix;
use crate::qswe::{build_deg3_from, eval_real_part, eval_real_part_by_simulation, eval_s, extract};
use crate::quad_sign::delta_quadratic;
use crate::quantum_core::{amplitude_00, build_uf_gates};

/// Outcome of one identity over all its random instances.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            failures: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        self.cases += 1;
        self.failures += usize::from(!ok);
    }

    fn done(self) -> Check {
        Check {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
        }
    }
}

fn delta(f: &BoolPoly) -> Result<BigInt> {
    Ok(f.delta_bruteforce()?.0)
}

/// `Σ_{x ∈ L} (−1)^{f(x)}` with `L` cut out by `ℓ_j(x) = 0`.
fn subspace_sum(f: &BoolPoly, constraints: &[LinearFunctional]) -> i64 {
    let n = f.n_vars();
    (0u64..1 << n)
        .filter_map(|mask| {
            let x: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            constraints
                .iter()
                .all(|l| !l.eval(&x))
                .then(|| if f.eval_mask(mask) { -1 } else { 1 })
        })
        .sum()
}

/// Negation, sum over a functional, disjoint product and subspace
/// embedding on `count` random polynomials with `n ≤ 10`, degree ≤ 4.
pub fn lemma_suite(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut neg = Tally::new("negation");
    let mut sum = Tally::new("sum over a functional");
    let mut prod = Tally::new("disjoint product");
    let mut sub = Tally::new("subspace embedding");
    for _ in 0..count {
        let n = rng.gen_range(1..=10);
        let terms = rng.gen_range(0..=8);
        let f = random_poly(&mut rng, n, 4, terms);
        let df = delta(&f)?;
        neg.record(delta(&f.negate())? == -df.clone());

        let phi = random_functional(&mut rng, n);
        let halves = delta(&f.restrict(&phi, false)?)? + delta(&f.restrict(&phi, true)?)?;
        sum.record(halves == df);

        let m = rng.gen_range(1..=10 - n.min(9));
        let h_terms = rng.gen_range(0..=6);
        let h = random_poly(&mut rng, m, 4, h_terms);
        prod.record(delta(&BoolPoly::disjoint_sum(&f, &h))? == df.clone() * delta(&h)?);

        if n <= 8 {
            let d = rng.gen_range(1..=3);
            let cs: Vec<LinearFunctional> = (0..d).map(|_| random_functional(&mut rng, n)).collect();
            let g = f.subspace_embed(&cs)?;
            sub.record(delta(&g)? == BigInt::from(subspace_sum(&f, &cs)) << d);
        }
    }
    Ok(vec![neg.done(), sum.done(), prod.done(), sub.done()])
}

/// Everything: the lemma suite plus the quadratic solver, the `U(f)`
/// amplitude, the two real-part routes and the degree-3 construction.
pub fn run(seed: u64) -> Result<Vec<Check>> {
    let mut out = lemma_suite(seed, 200)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);

    let mut quad = Tally::new("quadratic solver");
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let terms = rng.gen_range(0..=2 * n);
        let f = random_poly(&mut rng, n, 2, terms);
        quad.record(delta_quadratic(&f)?.0 == delta(&f)?);
    }
    out.push(quad.done());

    let mut amp = Tally::new("U(f) amplitude");
    for _ in 0..40 {
        let n = rng.gen_range(1..=6);
        let terms = rng.gen_range(0..=6);
        let f = random_poly(&mut rng, n, 4, terms);
        let a = amplitude_00(&build_uf_gates(&f)?, n)?;
        let want = delta(&f)?.to_f64().unwrap_or(f64::NAN) / f64::from(1u32 << n);
        amp.record((a.re - want).abs() <= 1e-9 && a.im.abs() <= 1e-9);
    }
    out.push(amp.done());

    let mut routes = Tally::new("real-part routes");
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let len = rng.gen_range(0..=12);
        let w = random_word(&mut rng, n, len);
        let inst = extract(&w);
        routes.record(eval_real_part(&inst)?.integer == eval_real_part_by_simulation(&w)?.integer);
    }
    out.push(routes.done());

    let mut deg3 = Tally::new("degree-3 construction");
    for _ in 0..30 {
        let n = rng.gen_range(1..=3);
        let rows = rng.gen_range(0..=2);
        let a = BitMatrix::from_rows(&(0..rows).map(|_| (0..n).map(|_| rng.gen()).collect()).collect::<Vec<_>>());
        let terms = rng.gen_range(0..=4);
        let b = random_poly(&mut rng, n, 2, terms);
        let g = build_deg3_from(&a, &b)?;
        deg3.record(delta(&g)? == eval_s(&a, &b)? << rows);
    }
    out.push(deg3.done());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for c in run(1).unwrap() {
            assert!(c.passed() && c.cases > 0, "{c:?}");
        }
    }
}
