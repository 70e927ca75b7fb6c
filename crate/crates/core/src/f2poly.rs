//! Boolean polynomials in algebraic normal form and the exact Δ oracle.
//!
//! A [`BoolPoly`] is a set of monomials over F₂; each monomial is a strictly
//! increasing list of variable indices and the empty monomial is the constant
//! `1`. `Δf = #₀f − #₁f = Σₓ (−1)^{f(x)}` is computed exactly by
//! [`BoolPoly::delta_bruteforce`]; the remaining operations are the algebraic
//! transforms whose effect on Δ is known in closed form (negation, restriction
//! to a hyperplane, embedding of a subspace, disjoint sums).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Default number of variables up to which exhaustive enumeration is allowed.
pub const DEFAULT_BRUTE_FORCE_CUTOFF: usize = 24;

/// A product of distinct variables. The empty monomial is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from arbitrary indices; repeats collapse since x² = x.
    pub fn new<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        let mut v: Vec<u32> = vars.into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.binary_search(&(var as u32)).is_ok()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&i| i as usize)
    }

    fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | (1u64 << i))
    }

    /// Product of two monomials (set union).
    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn map_vars(&self, f: impl Fn(usize) -> usize) -> Monomial {
        Monomial::new(self.vars().map(f))
    }
}

// Graded order: higher degree first, then lexicographic on the index lists.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .len()
            .cmp(&self.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", v + 1)?;
        }
        Ok(())
    }
}

/// `coeffs · x + constant` over F₂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFunctional {
    pub coeffs: Vec<bool>,
    pub constant: bool,
}

impl LinearFunctional {
    pub fn new(coeffs: Vec<bool>, constant: bool) -> Self {
        LinearFunctional { coeffs, constant }
    }

    /// The coordinate functional `x_var` on `n_vars` variables.
    pub fn coordinate(n_vars: usize, var: usize) -> Self {
        let mut coeffs = vec![false; n_vars];
        coeffs[var] = true;
        LinearFunctional {
            coeffs,
            constant: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        !self.coeffs.iter().any(|&c| c)
    }

    /// Highest-index variable with a set coefficient.
    pub fn pivot(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c)
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.coeffs
            .iter()
            .zip(x)
            .fold(self.constant, |acc, (&c, &b)| acc ^ (c & b))
    }

    /// The functional as a polynomial on `coeffs.len()` variables.
    pub fn to_poly(&self) -> BoolPoly {
        let mut p = BoolPoly::zero(self.coeffs.len());
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c {
                p.toggle(Monomial::new([i]));
            }
        }
        if self.constant {
            p.toggle(Monomial::one());
        }
        p
    }
}

/// Exact value of Δ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeltaValue(pub BigInt);

impl DeltaValue {
    pub fn value(&self) -> &BigInt {
        &self.0
    }

    /// −1, 0 or +1.
    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }
}

impl From<i64> for DeltaValue {
    fn from(v: i64) -> Self {
        DeltaValue(BigInt::from(v))
    }
}

impl fmt::Display for DeltaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A Boolean polynomial over F₂ in algebraic normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoolPoly {
    n_vars: usize,
    monomials: BTreeSet<Monomial>,
}

impl BoolPoly {
    pub fn zero(n_vars: usize) -> Self {
        BoolPoly {
            n_vars,
            monomials: BTreeSet::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        let mut p = Self::zero(n_vars);
        p.toggle(Monomial::one());
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "variable {i} out of range");
        let mut p = Self::zero(n_vars);
        p.toggle(Monomial::new([i]));
        p
    }

    /// Sum of the given monomials (0-based indices); repeated monomials cancel.
    pub fn from_monomials<I, M>(n_vars: usize, monomials: I) -> Result<Self>
    where
        I: IntoIterator<Item = M>,
        M: IntoIterator<Item = usize>,
    {
        let mut p = Self::zero(n_vars);
        for m in monomials {
            let m = Monomial::new(m);
            if let Some(v) = m.max_var() {
                if v >= n_vars {
                    return input(format!("variable x{} exceeds nvars={n_vars}", v + 1));
                }
            }
            p.toggle(m);
        }
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.monomials.iter()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn has_constant(&self) -> bool {
        self.monomials.contains(&Monomial::one())
    }

    /// Largest monomial size; the zero polynomial reports 0 (see [`Self::is_zero`]).
    pub fn degree(&self) -> usize {
        // graded order keeps the highest degree first
        self.monomials.iter().next().map_or(0, Monomial::degree)
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.monomials.contains(m)
    }

    /// Adds (XORs) one monomial.
    pub fn toggle(&mut self, m: Monomial) {
        debug_assert!(m.max_var().is_none_or(|v| v < self.n_vars));
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    /// Variables that occur in at least one monomial.
    pub fn used_vars(&self) -> BTreeSet<usize> {
        self.monomials.iter().flat_map(|m| m.vars()).collect()
    }

    /// Same monomials viewed over `n_vars` variables.
    pub fn with_n_vars(&self, n_vars: usize) -> Result<Self> {
        if let Some(&v) = self.used_vars().iter().next_back() {
            if v >= n_vars {
                return input(format!("x{} is used, cannot shrink to {n_vars} vars", v + 1));
            }
        }
        Ok(BoolPoly {
            n_vars,
            monomials: self.monomials.clone(),
        })
    }

    /// Renames every variable `i` to `offset + i` inside `n_vars` variables.
    pub fn shifted(&self, offset: usize, n_vars: usize) -> Self {
        assert!(offset + self.n_vars <= n_vars);
        BoolPoly {
            n_vars,
            monomials: self
                .monomials
                .iter()
                .map(|m| m.map_vars(|i| i + offset))
                .collect(),
        }
    }

    /// Applies `map` to every variable index (the map need not be injective).
    pub fn rename(&self, n_vars: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero(n_vars);
        for m in &self.monomials {
            out.toggle(m.map_vars(&map));
        }
        out
    }

    pub fn add_assign(&mut self, other: &BoolPoly) {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
        for m in &other.monomials {
            self.toggle(m.clone());
        }
    }

    pub fn add(&self, other: &BoolPoly) -> BoolPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// Product in F₂[x]/(x² − x).
    pub fn mul(&self, other: &BoolPoly) -> BoolPoly {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
        let mut out = BoolPoly::zero(self.n_vars);
        for a in &self.monomials {
            for b in &other.monomials {
                out.toggle(a.times(b));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> BoolPoly {
        let mut out = BoolPoly::zero(self.n_vars);
        for a in &self.monomials {
            out.toggle(a.times(m));
        }
        out
    }

    pub fn eval(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.n_vars {
            return input(format!(
                "assignment has {} bits, polynomial has {} variables",
                assignment.len(),
                self.n_vars
            ));
        }
        Ok(self
            .monomials
            .iter()
            .filter(|m| m.vars().all(|v| assignment[v]))
            .count()
            % 2
            == 1)
    }

    /// Bit `i` of `x` is the value of variable `i`; requires `n_vars ≤ 64`.
    pub fn eval_mask(&self, x: u64) -> bool {
        self.monomials
            .iter()
            .filter(|m| {
                let mm = m.mask();
                mm & x == mm
            })
            .count()
            % 2
            == 1
    }

    /// Exact Δ by enumeration of all 2ⁿ assignments (cutoff 24 variables).
    pub fn delta_bruteforce(&self) -> Result<DeltaValue> {
        self.delta_bruteforce_with_cutoff(DEFAULT_BRUTE_FORCE_CUTOFF)
    }

    pub fn delta_bruteforce_with_cutoff(&self, cutoff: usize) -> Result<DeltaValue> {
        let n = self.n_vars;
        if n > cutoff || n > 40 {
            return Err(Error::TooLarge {
                what: "brute-force Δ",
                n,
                cutoff,
            });
        }
        let masks: Vec<u64> = self.monomials.iter().map(Monomial::mask).collect();
        let total: u64 = 1u64 << n;
        let chunk_bits = n.min(12);
        let chunk = 1u64 << chunk_bits;
        let ones: u64 = (0..total / chunk)
            .into_par_iter()
            .map(|c| {
                let base = c * chunk;
                let mut ones = 0u64;
                for x in base..base + chunk {
                    let mut parity = false;
                    for &m in &masks {
                        parity ^= m & x == m;
                    }
                    ones += parity as u64;
                }
                ones
            })
            .sum();
        Ok(DeltaValue(BigInt::from(total) - BigInt::from(2 * ones)))
    }

    /// `1 + f`; Δ changes sign.
    pub fn negate(&self) -> BoolPoly {
        let mut out = self.clone();
        out.toggle(Monomial::one());
        out
    }

    /// Substitutes `x_var := expr` where `expr` does not involve `x_var`.
    fn substitute_var(&self, var: usize, expr: &BoolPoly) -> BoolPoly {
        debug_assert!(!expr.used_vars().contains(&var));
        let mut out = BoolPoly::zero(self.n_vars);
        for m in &self.monomials {
            if m.contains(var) {
                let rest = Monomial::new(m.vars().filter(|&v| v != var));
                for t in &expr.monomials {
                    out.toggle(rest.times(t));
                }
            } else {
                out.toggle(m.clone());
            }
        }
        out
    }

    /// Restriction of f to the hyperplane `φ(x) = b`, as a polynomial in the
    /// remaining `n − 1` variables. The highest-index variable of φ is the one
    /// eliminated; variables above it shift down by one.
    pub fn restrict(&self, phi: &LinearFunctional, b: bool) -> Result<BoolPoly> {
        if phi.coeffs.len() != self.n_vars {
            return input("functional length differs from variable count");
        }
        let p = match phi.pivot() {
            Some(p) => p,
            None => return input("restriction by the zero functional"),
        };
        // x_p = b + constant + Σ_{i≠p} c_i x_i
        let mut expr = BoolPoly::zero(self.n_vars);
        for (i, &c) in phi.coeffs.iter().enumerate() {
            if c && i != p {
                expr.toggle(Monomial::new([i]));
            }
        }
        if b ^ phi.constant {
            expr.toggle(Monomial::one());
        }
        let sub = self.substitute_var(p, &expr);
        Ok(sub.rename(self.n_vars - 1, |i| if i > p { i - 1 } else { i }))
    }

    /// `g(x, v) = f(x) + Σ_j v_j ℓ_j(x)`; Δg = 2^d · Σ_{x : ℓ(x)=0} (−1)^{f(x)}.
    pub fn subspace_embed(&self, constraints: &[LinearFunctional]) -> Result<BoolPoly> {
        if constraints.is_empty() {
            return input("subspace embedding needs at least one constraint");
        }
        let n = self.n_vars;
        let d = constraints.len();
        let mut g = self.with_n_vars(n + d)?;
        for (j, l) in constraints.iter().enumerate() {
            if l.coeffs.len() != n {
                return input(format!("constraint {j} has the wrong length"));
            }
            if l.is_zero() {
                return input(format!("constraint {j} is the zero functional"));
            }
            let v = Monomial::new([n + j]);
            let lp = l.to_poly().with_n_vars(n + d)?;
            g.add_assign(&lp.mul_monomial(&v));
        }
        Ok(g)
    }

    /// `f(x, y) = g(x) + h(y)` on disjoint variable blocks; Δf = Δg · Δh.
    pub fn disjoint_sum(g: &BoolPoly, h: &BoolPoly) -> BoolPoly {
        let n = g.n_vars + h.n_vars;
        let mut f = g.shifted(0, n);
        f.add_assign(&h.shifted(g.n_vars, n));
        f
    }

    /// Composition `f(M x + t)` with an affine map whose rows give each
    /// variable of `self` as a functional of the new variables.
    pub fn substitute_affine(&self, map: &AffineMap) -> Result<BoolPoly> {
        if map.rows.len() != self.n_vars {
            return input("affine map output size differs from variable count");
        }
        let images: Vec<BoolPoly> = map.rows.iter().map(LinearFunctional::to_poly).collect();
        let mut out = BoolPoly::zero(map.n_in);
        for m in &self.monomials {
            let mut term = BoolPoly::one(map.n_in);
            for v in m.vars() {
                term = term.mul(&images[v]);
            }
            out.add_assign(&term);
        }
        Ok(out)
    }

    /// ANF body without the header, e.g. `x1*x2 + x3 + 1`.
    pub fn anf_body(&self) -> String {
        if self.monomials.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self.monomials.iter().map(|m| m.to_string()).collect();
        parts.join(" + ")
    }
}

/// `x_old = rows[k](x_new)` for each old variable `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub n_in: usize,
    pub rows: Vec<LinearFunctional>,
}

impl AffineMap {
    /// Rank of the linear part over F₂.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<bool>> = self.rows.iter().map(|r| r.coeffs.clone()).collect();
        crate::gf2::BitMatrix::from_rows(&rows).rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows.len() == self.n_in && self.rank() == self.n_in
    }

    pub fn apply(&self, x: &[bool]) -> Vec<bool> {
        self.rows.iter().map(|r| r.eval(x)).collect()
    }
}

impl fmt::Display for BoolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nvars={}", self.n_vars)?;
        writeln!(f, "{}", self.anf_body())
    }
}

impl FromStr for BoolPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n_vars: Option<usize> = None;
        let mut monomials: Vec<(usize, Monomial)> = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            if n_vars.is_none() {
                let rest = line
                    .strip_prefix("nvars")
                    .and_then(|r| r.trim_start().strip_prefix('='))
                    .ok_or_else(|| perr("expected header `nvars=<n>`".into()))?;
                n_vars = Some(
                    rest.trim()
                        .parse()
                        .map_err(|e| perr(format!("bad variable count: {e}")))?,
                );
                continue;
            }
            for term in line.split('+') {
                let term = term.trim();
                if term.is_empty() {
                    continue;
                }
                if term == "0" {
                    continue;
                }
                if term == "1" {
                    monomials.push((lineno + 1, Monomial::one()));
                    continue;
                }
                let mut vars = Vec::new();
                for factor in term.split('*') {
                    let factor = factor.trim();
                    let k: usize = factor
                        .strip_prefix('x')
                        .and_then(|d| d.parse().ok())
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| perr(format!("bad factor `{factor}`")))?;
                    vars.push(k - 1);
                }
                monomials.push((lineno + 1, Monomial::new(vars)));
            }
        }
        let n_vars = n_vars.ok_or(Error::Parse {
            line: 0,
            msg: "missing `nvars=<n>` header".into(),
        })?;
        let mut p = BoolPoly::zero(n_vars);
        for (line, m) in monomials {
            if let Some(v) = m.max_var() {
                if v >= n_vars {
                    return Err(Error::Parse {
                        line,
                        msg: format!("x{} exceeds nvars={n_vars}", v + 1),
                    });
                }
            }
            p.toggle(m);
        }
        Ok(p)
    }
}

/// Random polynomial with `terms` monomials drawn with sizes in `0..=max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, n_vars: usize, max_degree: usize, terms: usize) -> BoolPoly {
    let max_degree = max_degree.min(n_vars);
    let mut p = BoolPoly::zero(n_vars);
    for _ in 0..terms {
        let d = rng.gen_range(0..=max_degree);
        let vars = rand::seq::index::sample(rng, n_vars, d).into_vec();
        p.toggle(Monomial::new(vars));
    }
    p
}

/// Random non-zero affine functional on `n_vars ≥ 1` variables.
pub fn random_functional<R: Rng>(rng: &mut R, n_vars: usize) -> LinearFunctional {
    loop {
        let coeffs: Vec<bool> = (0..n_vars).map(|_| rng.gen()).collect();
        if coeffs.iter().any(|&c| c) {
            return LinearFunctional::new(coeffs, rng.gen());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    fn naive_delta(p: &BoolPoly) -> i64 {
        (0..1u64 << p.n_vars())
            .map(|x| {
                let bits: Vec<bool> = (0..p.n_vars()).map(|i| x >> i & 1 == 1).collect();
                if p.eval(&bits).unwrap() {
                    -1
                } else {
                    1
                }
            })
            .sum()
    }

    #[test]
    fn eval_examples() {
        let f = poly("nvars=2\nx1*x2");
        assert!(f.eval(&[true, true]).unwrap());
        assert!(!f.eval(&[true, false]).unwrap());
        let g = poly("nvars=1\n1 + x1");
        assert!(g.eval(&[false]).unwrap());
        assert!(f.eval(&[true]).is_err());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(BoolPoly::zero(3).delta_bruteforce().unwrap(), 8.into());
        assert_eq!(BoolPoly::var(1, 0).delta_bruteforce().unwrap(), 0.into());
        let f = poly("nvars=3\nx1*x2*x3");
        assert_eq!(f.delta_bruteforce().unwrap(), 6.into());
    }

    #[test]
    fn delta_refuses_above_cutoff() {
        let f = BoolPoly::zero(25);
        assert!(matches!(f.delta_bruteforce(), Err(Error::TooLarge { .. })));
        assert!(f.delta_bruteforce_with_cutoff(25).is_ok());
    }

    #[test]
    fn negate_examples() {
        let z = BoolPoly::zero(3);
        assert_eq!(z.negate(), BoolPoly::one(3));
        assert_eq!(z.negate().delta_bruteforce().unwrap(), (-8).into());
        let f = poly("nvars=2\nx1*x2");
        assert_eq!(f.delta_bruteforce().unwrap(), 2.into());
        assert_eq!(f.negate().delta_bruteforce().unwrap(), (-2).into());
    }

    #[test]
    fn restrict_examples() {
        let f = poly("nvars=2\nx1 + x2");
        let phi = LinearFunctional::coordinate(2, 1);
        assert_eq!(f.restrict(&phi, false).unwrap(), poly("nvars=1\nx1"));
        let g = poly("nvars=2\nx1*x2");
        assert_eq!(g.restrict(&phi, true).unwrap(), poly("nvars=1\nx1"));
        let zero = LinearFunctional::new(vec![false, false], true);
        assert!(g.restrict(&zero, true).is_err());
    }

    #[test]
    fn restrict_matches_filtered_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=8);
            let f = random_poly(&mut rng, n, 4, 6);
            let phi = random_functional(&mut rng, n);
            for b in [false, true] {
                let r = f.restrict(&phi, b).unwrap();
                // direct sum over the hyperplane
                let direct: i64 = (0..1u64 << n)
                    .map(|x| (0..n).map(|i| x >> i & 1 == 1).collect::<Vec<_>>())
                    .filter(|x| phi.eval(x) == b)
                    .map(|x| if f.eval(&x).unwrap() { -1 } else { 1 })
                    .sum();
                assert_eq!(naive_delta(&r), direct);
            }
        }
    }

    #[test]
    fn subspace_embed_examples() {
        let c = [LinearFunctional::coordinate(1, 0)];
        let g = BoolPoly::zero(1).subspace_embed(&c).unwrap();
        assert_eq!(g, poly("nvars=2\nx1*x2"));
        assert_eq!(g.delta_bruteforce().unwrap(), 2.into());
        let g = BoolPoly::var(1, 0).subspace_embed(&c).unwrap();
        assert_eq!(g.delta_bruteforce().unwrap(), 2.into());
        let zero = LinearFunctional::new(vec![false], false);
        assert!(BoolPoly::zero(1).subspace_embed(&[zero]).is_err());
    }

    #[test]
    fn disjoint_sum_examples() {
        let g = BoolPoly::var(1, 0);
        let h = BoolPoly::zero(1);
        assert_eq!(BoolPoly::disjoint_sum(&g, &h).delta_bruteforce().unwrap(), 0.into());
        let g = poly("nvars=2\nx1*x2");
        let f = BoolPoly::disjoint_sum(&g, &g);
        assert_eq!(f, poly("nvars=4\nx1*x2 + x3*x4"));
        assert_eq!(f.delta_bruteforce().unwrap(), 4.into());
        let h = poly("nvars=3\nx1*x3 + x2");
        let f = BoolPoly::disjoint_sum(&BoolPoly::one(1), &h);
        let dh = h.delta_bruteforce().unwrap().0;
        assert_eq!(f.delta_bruteforce().unwrap().0, -2 * dh);
    }

    #[test]
    fn degree_and_zero_flag() {
        assert_eq!(BoolPoly::zero(3).degree(), 0);
        assert!(BoolPoly::zero(3).is_zero());
        assert!(!BoolPoly::one(3).is_zero());
        assert_eq!(poly("nvars=4\nx1*x2*x4 + x3").degree(), 3);
    }

    #[test]
    fn parse_format() {
        let f = poly("# a comment\nnvars=4\n\nx2 + 1 + x3*x1*x2 # trailing\n+ x4");
        assert_eq!(f.anf_body(), "x1*x2*x3 + x2 + x4 + 1");
        assert_eq!(f.to_string(), "nvars=4\nx1*x2*x3 + x2 + x4 + 1\n");
        assert_eq!(poly("nvars=2\nx1 + x1").anf_body(), "0");
        assert_eq!(poly("nvars=2\nx1*x1").anf_body(), "x1");
        assert!("x1 + x2".parse::<BoolPoly>().is_err());
        assert!("nvars=1\nx2".parse::<BoolPoly>().is_err());
        assert!("nvars=1\ny1".parse::<BoolPoly>().is_err());
    }

    #[test]
    fn parallel_delta_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 5, 13, 14] {
            let f = random_poly(&mut rng, n, 4, 12);
            assert_eq!(f.delta_bruteforce().unwrap().0, naive_delta(&f).into());
        }
    }

    #[test]
    fn affine_substitution_matches_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..=6);
            let f = random_poly(&mut rng, n, 3, 5);
            let map = AffineMap {
                n_in: n,
                rows: (0..n).map(|_| random_functional(&mut rng, n)).collect(),
            };
            let g = f.substitute_affine(&map).unwrap();
            for x in 0..1u64 << n {
                let bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
                assert_eq!(g.eval(&bits).unwrap(), f.eval(&map.apply(&bits)).unwrap());
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly() -> impl Strategy<Value = BoolPoly> {
            (1usize..8).prop_flat_map(|n| {
                proptest::collection::vec(proptest::collection::vec(0..n, 0..4), 0..10)
                    .prop_map(move |ms| BoolPoly::from_monomials(n, ms).unwrap())
            })
        }

        proptest! {
            #[test]
            fn text_round_trip(p in arb_poly()) {
                let text = p.to_string();
                let q: BoolPoly = text.parse().unwrap();
                prop_assert_eq!(&q, &p);
                prop_assert_eq!(q.to_string(), text);
            }

            #[test]
            fn delta_is_even(p in arb_poly()) {
                let d = p.delta_bruteforce().unwrap();
                prop_assert!((d.0 % 2u32).is_zero());
            }
        }
    }
}
