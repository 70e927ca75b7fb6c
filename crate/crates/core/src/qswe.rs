//! Closed form of `⟨0|Ũ|0⟩` for a generator word and quadratically signed
//! weight enumerators.
//!
//! Expanding `Ũ = Π (cos φ + i sin φ σ_j)` over the choice `x ∈ F₂^N` gives
//!
//! ```text
//! ⟨0|Ũ|0⟩ = Σ_{Ax=0} cos^{N−|x|} sin^{|x|} i^{Σ(γ_j+1)x_j} (−1)^{B̃(x)}
//! ```
//!
//! and the real part keeps exactly the `x` with `gx = 0`, where the power of
//! `i` collapses to `(−1)^{Σ_{Γ₁}x_j + s₂(x_{Γ₀}) + s₂(x_{Γ₂})}`. Multiplying by
//! `20^{N/2}` turns the real part into the integer `S([A; g], B)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::f2poly::{BoolPoly, Monomial};
use crate::gate_synth::GeneratorWord;
use crate::gf2::{BitMatrix, BitVec};
use crate::quantum_core::{cos_phi, sin_phi, C64};

/// Largest `N` for [`eval_amplitude_formula`].
pub const FORMULA_CUTOFF: usize = 22;
/// Largest nullspace dimension the exact enumerators walk.
pub const NULLSPACE_CUTOFF: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QsweInstance {
    pub n_letters: usize,
    /// `m × N`, row `k` marks the letters that flip qubit `k`.
    pub a: BitMatrix,
    /// `g_j = 1` iff letter `j` has an even number of σ_y factors.
    pub g: BitVec,
    pub gamma: Vec<u8>,
    pub b: BoolPoly,
}

/// `integer / 20^{N/2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactEnumeratorValue {
    pub integer: BigInt,
    pub scale_exponent: usize,
}

impl ExactEnumeratorValue {
    pub fn signum(&self) -> i32 {
        if self.integer.is_positive() {
            1
        } else if self.integer.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Value as a float; safe for integers far beyond the f64 range.
    pub fn to_f64(&self) -> f64 {
        let n = self.scale_exponent as f64;
        bigint_scaled(&self.integer, -n * 20f64.ln() / 2.0)
    }
}

/// `x · e^{ln_factor}` without overflowing on huge `x`.
pub(crate) fn bigint_scaled(x: &BigInt, ln_factor: f64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let mantissa: f64 = (x.abs() >> shift).to_string().parse().unwrap_or(f64::MAX);
    let ln = mantissa.ln() + shift as f64 * std::f64::consts::LN_2 + ln_factor;
    let v = ln.exp();
    if x.is_negative() {
        -v
    } else {
        v
    }
}

impl QsweInstance {
    pub fn m(&self) -> usize {
        self.a.n_rows()
    }

    /// `[A; g]`, the constraint system of the real part.
    pub fn stacked(&self) -> BitMatrix {
        let mut s = self.a.clone();
        s.push_row(self.g.clone());
        s
    }

    fn class_sum(&self, t: u8) -> BoolPoly {
        let members: Vec<usize> = (0..self.n_letters).filter(|&j| self.gamma[j] == t).collect();
        let mut p = BoolPoly::zero(self.n_letters);
        if t == 1 {
            for &j in &members {
                p.toggle(Monomial::new([j]));
            }
        } else {
            for (i, &j) in members.iter().enumerate() {
                for &k in &members[i + 1..] {
                    p.toggle(Monomial::new([j, k]));
                }
            }
        }
        p
    }

    /// `B̃ = B + Σ_{Γ₁} x_j + s₂(x_{Γ₀}) + s₂(x_{Γ₂})`.
    pub fn b_tilde(&self) -> BoolPoly {
        let mut p = self.b.clone();
        for t in 0..3 {
            p.add_assign(&self.class_sum(t));
        }
        p
    }
}

/// Reads `A`, `g`, `γ` and `B` off an inverse-free word.
pub fn extract(word: &GeneratorWord) -> QsweInstance {
    let n = word.len();
    let m = word.n();
    let letters = word.letters();
    let mut a = BitMatrix::zeros(m, n);
    let mut g = BitVec::zeros(n);
    let mut gamma = Vec::with_capacity(n);
    for (j, s) in letters.iter().enumerate() {
        for k in 0..m {
            if s.alpha(k) {
                a.set(k, j, true);
            }
        }
        let gj = s.gamma() as u8;
        gamma.push(gj);
        g.set(j, gj.is_multiple_of(2));
    }

    // upper[j] holds t < j with x_j x_t in B
    let alpha: Vec<u64> = letters.iter().map(alpha_mask).collect();
    let beta: Vec<u64> = letters.iter().map(beta_mask).collect();
    let upper: Vec<BitVec> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut row = BitVec::zeros(n);
            for t in 0..j {
                let bt = (beta[j] & alpha[t]).count_ones() % 2 == 1;
                let s2 = gamma[j] == gamma[t] && gamma[j] != 1;
                if bt ^ s2 {
                    row.set(t, true);
                }
            }
            row
        })
        .collect();
    let mut monos: Vec<Vec<usize>> = Vec::new();
    for (j, row) in upper.iter().enumerate() {
        monos.extend(row.ones().map(|t| vec![t, j]));
    }
    monos.extend((0..n).filter(|&j| gamma[j] == 1).map(|j| vec![j]));
    let b = BoolPoly::from_monomials(n, monos).expect("indices are in range");
    QsweInstance {
        n_letters: n,
        a,
        g,
        gamma,
        b,
    }
}

fn alpha_mask(s: &crate::quantum_core::PauliString) -> u64 {
    (0..s.n()).filter(|&q| s.alpha(q)).fold(0, |m, q| m | 1 << q)
}

fn beta_mask(s: &crate::quantum_core::PauliString) -> u64 {
    (0..s.n()).filter(|&q| s.beta(q)).fold(0, |m, q| m | 1 << q)
}

/// A polynomial of degree ≤ 2 as a constant, a linear row and a symmetric
/// adjacency matrix.
struct QuadForm {
    constant: bool,
    lin: BitVec,
    sym: Vec<BitVec>,
    lower: Vec<BitVec>,
}

impl QuadForm {
    fn new(p: &BoolPoly) -> Result<Self> {
        if p.degree() > 2 {
            return Err(Error::Degree {
                degree: p.degree(),
                max: 2,
            });
        }
        let n = p.n_vars();
        let mut q = QuadForm {
            constant: false,
            lin: BitVec::zeros(n),
            sym: vec![BitVec::zeros(n); n],
            lower: vec![BitVec::zeros(n); n],
        };
        for m in p.monomials() {
            let v: Vec<usize> = m.vars().collect();
            match v[..] {
                [] => q.constant = true,
                [i] => q.lin.set(i, true),
                [i, j] => {
                    q.sym[i].set(j, true);
                    q.sym[j].set(i, true);
                    q.lower[j].set(i, true);
                }
                _ => unreachable!(),
            }
        }
        Ok(q)
    }

    fn eval(&self, x: &BitVec) -> bool {
        let mut acc = self.constant ^ self.lin.dot(x);
        for j in x.ones() {
            acc ^= self.lower[j].dot(x);
        }
        acc
    }

    /// `Q v`, so that `B(x + v) = B(x) + B(v) + B(0) + x·Qv`.
    fn polar_row(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(v.len());
        for (i, row) in self.sym.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }
}

/// Walks `{x : Mx = 0}` in Gray-code order and histograms `bucket(x, B(x))`.
fn nullspace_histogram<F>(
    m: &BitMatrix,
    n: usize,
    q: &QuadForm,
    buckets: usize,
    bucket: F,
) -> Result<Vec<i64>>
where
    F: Fn(&BitVec, bool) -> usize + Sync,
{
    let basis = if m.n_rows() == 0 {
        (0..n)
            .map(|i| {
                let mut v = BitVec::zeros(n);
                v.set(i, true);
                v
            })
            .collect()
    } else {
        m.nullspace()
    };
    let d = basis.len();
    if d > NULLSPACE_CUTOFF {
        return Err(Error::TooLarge {
            what: "nullspace enumeration",
            n: d,
            cutoff: NULLSPACE_CUTOFF,
        });
    }
    let zero = BitVec::zeros(n);
    let b0 = q.eval(&zero);
    let bv: Vec<bool> = basis.iter().map(|v| q.eval(v) ^ b0).collect();
    let qv: Vec<BitVec> = basis.iter().map(|v| q.polar_row(v)).collect();
    let top = d.min(6);
    let low = d - top;
    let hist = (0..1usize << top)
        .into_par_iter()
        .map(|shard| {
            let mut hist = vec![0i64; buckets];
            let mut x = BitVec::zeros(n);
            for i in 0..top {
                if shard >> i & 1 == 1 {
                    x.xor_assign(&basis[low + i]);
                }
            }
            let mut b = q.eval(&x);
            hist[bucket(&x, b)] += 1;
            for step in 1..1usize << low {
                let i = step.trailing_zeros() as usize;
                b ^= bv[i] ^ x.dot(&qv[i]);
                x.xor_assign(&basis[i]);
                hist[bucket(&x, b)] += 1;
            }
            hist
        })
        .reduce(
            || vec![0i64; buckets],
            |mut a, b| {
                for (s, t) in a.iter_mut().zip(b) {
                    *s += t;
                }
                a
            },
        );
    Ok(hist)
}

/// `S(A, B) = Σ_{Ax=0} (−1)^{B(x)} 2^{|x|} 4^{n−|x|}`, exact.
pub fn eval_s(a: &BitMatrix, b: &BoolPoly) -> Result<BigInt> {
    let n = b.n_vars();
    if a.n_rows() > 0 && a.n_cols() != n {
        return input(format!("A has {} columns but B has {n} variables", a.n_cols()));
    }
    let q = QuadForm::new(b)?;
    let hist = nullspace_histogram(a, n, &q, 2 * (n + 1), |x, bx| 2 * x.count_ones() + bx as usize)?;
    let mut total = BigInt::zero();
    for w in 0..=n {
        let c = hist[2 * w] - hist[2 * w + 1];
        if c != 0 {
            total += BigInt::from(c) << (2 * n - w);
        }
    }
    Ok(total)
}

/// `20^{N/2} Re⟨0|Ũ|0⟩ = S([A; g], B)`.
pub fn eval_real_part(inst: &QsweInstance) -> Result<ExactEnumeratorValue> {
    Ok(ExactEnumeratorValue {
        integer: eval_s(&inst.stacked(), &inst.b)?,
        scale_exponent: inst.n_letters,
    })
}

/// The same integer from an exact Gaussian-integer simulation of the word:
/// `20^{N/2} Re⟨0|Ũ|0⟩ = 2^N Re⟨0|Π(2 + iσ_j)|0⟩`. Works for any `N`.
pub fn eval_real_part_by_simulation(word: &GeneratorWord) -> Result<ExactEnumeratorValue> {
    let z = word.scaled_amplitude_exact()?;
    Ok(ExactEnumeratorValue {
        integer: z.re << word.len(),
        scale_exponent: word.len(),
    })
}

/// `Σ_{Ax=0, gx=0} 2^{|x|} 4^{N−|x|} i^{Σ(γ_j+1)x_j} (−1)^{B̃(x)}` in exact
/// Gaussian integers, straight from the phase formula. The imaginary part
/// vanishes and the real part is the [`eval_real_part`] integer.
pub fn constrained_sum_exact(inst: &QsweInstance) -> Result<Complex<BigInt>> {
    let n = inst.n_letters;
    let bt = inst.b_tilde();
    let q = QuadForm::new(&bt)?;
    let class: Vec<BitVec> = (0..3u8)
        .map(|t| BitVec::from_bools(&inst.gamma.iter().map(|&g| g == t).collect::<Vec<_>>()))
        .collect();
    let hist = nullspace_histogram(&inst.stacked(), n, &q, 4 * (n + 1), |x, bx| {
        let mut e = 2 * bx as usize;
        for (t, c) in class.iter().enumerate() {
            let mut y = x.clone();
            y.and_assign(c);
            e += (t + 1) * y.count_ones();
        }
        4 * x.count_ones() + e % 4
    })?;
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    for w in 0..=n {
        let h = &hist[4 * w..4 * w + 4];
        let r = h[0] - h[2];
        let i = h[1] - h[3];
        if r != 0 {
            re += BigInt::from(r) << (2 * n - w);
        }
        if i != 0 {
            im += BigInt::from(i) << (2 * n - w);
        }
    }
    Ok(Complex::new(re, im))
}

/// The unconstrained complex sum for `N ≤ 22`, by brute force over `F₂^N`.
pub fn eval_amplitude_formula(inst: &QsweInstance) -> Result<C64> {
    let n = inst.n_letters;
    if n > FORMULA_CUTOFF {
        return Err(Error::TooLarge {
            what: "amplitude formula",
            n,
            cutoff: FORMULA_CUTOFF,
        });
    }
    let rows: Vec<u64> = inst.a.rows().iter().map(bits_u64).collect();
    let class: Vec<u64> = (0..3u8)
        .map(|t| (0..n).filter(|&j| inst.gamma[j] == t).fold(0, |m, j| m | 1 << j))
        .collect();
    let bt = inst.b_tilde();
    let mut lin = 0u64;
    let mut upper = vec![0u64; n];
    let mut constant = false;
    for m in bt.monomials() {
        let v: Vec<usize> = m.vars().collect();
        match v[..] {
            [] => constant = true,
            [i] => lin |= 1 << i,
            [i, j] => upper[j] |= 1 << i,
            _ => unreachable!("B̃ is quadratic"),
        }
    }
    let cp: Vec<f64> = (0..=n).map(|k| cos_phi().powi(k as i32)).collect();
    let sp: Vec<f64> = (0..=n).map(|k| sin_phi().powi(k as i32)).collect();
    let ipow = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
    let total = (0..1u64 << n)
        .into_par_iter()
        .filter(|x| rows.iter().all(|r| (r & x).count_ones() % 2 == 0))
        .map(|x| {
            let w = x.count_ones() as usize;
            let mut b = constant ^ ((lin & x).count_ones() % 2 == 1);
            let mut rest = x;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                b ^= (upper[j] & x).count_ones() % 2 == 1;
            }
            let e = (class[0] & x).count_ones() + 2 * (class[1] & x).count_ones() + 3 * (class[2] & x).count_ones();
            let sign = if b { -1.0 } else { 1.0 };
            ipow[(e % 4) as usize] * (cp[n - w] * sp[w] * sign)
        })
        .reduce(|| C64::new(0.0, 0.0), |a, b| a + b);
    Ok(total)
}

fn bits_u64(v: &BitVec) -> u64 {
    v.ones().fold(0, |m, i| m | 1 << i)
}

/// `Σ_j x_j y_j z_j + B(x) + Σ_k u_k (row_k · x)` over `x, y, z ∈ F₂^N`, `u ∈ F₂^{rows}`;
/// its Δ is `2^{rows} · S(A, B)`.
pub fn build_deg3_from(a: &BitMatrix, b: &BoolPoly) -> Result<BoolPoly> {
    let n = b.n_vars();
    if a.n_rows() > 0 && a.n_cols() != n {
        return input(format!("A has {} columns but B has {n} variables", a.n_cols()));
    }
    if b.degree() > 2 {
        return Err(Error::Degree {
            degree: b.degree(),
            max: 2,
        });
    }
    let total = 3 * n + a.n_rows();
    let mut f = b.with_n_vars(total)?;
    for j in 0..n {
        f.toggle(Monomial::new([j, n + j, 2 * n + j]));
    }
    for (k, row) in a.rows().iter().enumerate() {
        for j in row.ones() {
            f.toggle(Monomial::new([3 * n + k, j]));
        }
    }
    Ok(f)
}

/// Degree-3 polynomial with `Δ = 2^{m+1} · 20^{N/2} · Re⟨0|Ũ|0⟩`.
pub fn build_deg3_poly(inst: &QsweInstance) -> BoolPoly {
    build_deg3_from(&inst.stacked(), &inst.b).expect("instance shapes are consistent")
}

impl fmt::Display for QsweInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={}", self.n_letters)?;
        writeln!(f, "m={}", self.m())?;
        for row in self.a.rows() {
            writeln!(f, "A={row}")?;
        }
        writeln!(f, "g={}", self.g)?;
        let gamma: String = self.gamma.iter().map(|g| char::from(b'0' + g)).collect();
        writeln!(f, "gamma={gamma}")?;
        writeln!(f, "B={}", self.b.anf_body())
    }
}

impl FromStr for QsweInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut m = None;
        let mut rows = Vec::new();
        let mut g = None;
        let mut gamma = None;
        let mut b = None;
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, val) = line.split_once('=').ok_or_else(|| perr("expected key=value".into()))?;
            let bits = |v: &str| -> Result<Vec<bool>> {
                v.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(perr(format!("bad bit `{c}`"))),
                    })
                    .collect()
            };
            match key {
                "N" => n = Some(val.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                "m" => m = Some(val.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                "A" => rows.push(bits(val)?),
                "g" => g = Some(bits(val)?),
                "gamma" => {
                    gamma = Some(
                        val.chars()
                            .map(|c| match c {
                                '0'..='2' => Ok(c as u8 - b'0'),
                                _ => Err(perr(format!("bad gamma `{c}`"))),
                            })
                            .collect::<Result<Vec<u8>>>()?,
                    )
                }
                "B" => b = Some(val.to_string()),
                _ => return Err(perr(format!("unknown key `{key}`"))),
            }
        }
        let missing = |k: &str| Error::Input(format!("instance dump lacks `{k}=`"));
        let n = n.ok_or_else(|| missing("N"))?;
        let m = m.ok_or_else(|| missing("m"))?;
        let g = g.ok_or_else(|| missing("g"))?;
        let gamma = gamma.ok_or_else(|| missing("gamma"))?;
        let b: BoolPoly = format!("nvars={n}\n{}", b.ok_or_else(|| missing("B"))?).parse()?;
        if rows.len() != m || rows.iter().any(|r| r.len() != n) || g.len() != n || gamma.len() != n {
            return input("instance dump has inconsistent shapes");
        }
        if b.degree() > 2 {
            return input("instance B must have degree at most 2");
        }
        Ok(QsweInstance {
            n_letters: n,
            a: BitMatrix::from_bitvecs(n, rows.iter().map(|r| BitVec::from_bools(r)).collect()),
            g: BitVec::from_bools(&g),
            gamma,
            b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate_synth::random_word;
    use crate::quantum_core::PauliString;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn word(n: usize, letters: &[&str]) -> GeneratorWord {
        GeneratorWord::new(
            n,
            letters.iter().map(|s| PauliString::parse_sparse(n, s).unwrap()).collect(),
        )
        .unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn extract_examples() {
        let i = extract(&word(1, &["1:X"]));
        assert_eq!(i.a, BitMatrix::from_rows(&[bits("1")]));
        assert_eq!(i.g.to_bools(), bits("1"));
        assert!(i.b.is_zero());

        let i = extract(&word(1, &["1:Z"]));
        assert_eq!(i.a, BitMatrix::from_rows(&[bits("0")]));
        assert!(i.b.is_zero());

        let i = extract(&word(1, &["1:X", "1:Z"]));
        assert_eq!(i.a, BitMatrix::from_rows(&[bits("10")]));
        assert_eq!(i.b_tilde().to_string(), "nvars=2\nx1*x2\n");
        assert!(i.b.is_zero());
    }

    #[test]
    fn formula_examples() {
        let r5 = 5f64.sqrt();
        let a = eval_amplitude_formula(&extract(&word(1, &["1:X"]))).unwrap();
        assert!((a - C64::new(2.0 / r5, 0.0)).norm() < 1e-12);
        let a = eval_amplitude_formula(&extract(&word(1, &["1:Z"]))).unwrap();
        assert!((a - C64::new(2.0 / r5, 1.0 / r5)).norm() < 1e-12);
        let a = eval_amplitude_formula(&extract(&GeneratorWord::empty(2))).unwrap();
        assert!((a - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn real_part_examples() {
        let v = eval_real_part(&extract(&word(1, &["1:X"]))).unwrap();
        assert_eq!(v.integer, BigInt::from(4));
        assert!((v.to_f64() - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        let v = eval_real_part(&extract(&GeneratorWord::empty(1))).unwrap();
        assert_eq!((v.integer, v.scale_exponent), (BigInt::from(1), 0));
    }

    #[test]
    fn s_examples() {
        let zero = BitMatrix::from_rows(&[bits("0")]);
        let one = BitMatrix::from_rows(&[bits("1")]);
        assert_eq!(eval_s(&zero, &BoolPoly::zero(1)).unwrap(), BigInt::from(6));
        assert_eq!(eval_s(&one, &BoolPoly::zero(1)).unwrap(), BigInt::from(4));
        assert_eq!(eval_s(&zero, &BoolPoly::var(1, 0)).unwrap(), BigInt::from(2));
    }

    #[test]
    fn s_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let n = rng.gen_range(1..=9);
            let rows = rng.gen_range(0..=3);
            let a = BitMatrix::from_rows(
                &(0..rows).map(|_| (0..n).map(|_| rng.gen()).collect()).collect::<Vec<_>>(),
            );
            let b = crate::f2poly::random_poly(&mut rng, n, 2, 2 * n);
            let mut direct = BigInt::zero();
            for x in 0..1u64 << n {
                let xv = BitVec::from_bools(&(0..n).map(|i| x >> i & 1 == 1).collect::<Vec<_>>());
                if rows > 0 && !a.mul_vec(&xv).is_zero() {
                    continue;
                }
                let w = x.count_ones() as usize;
                let t = BigInt::from(1) << (2 * n - w);
                if b.eval_mask(x) {
                    direct -= t;
                } else {
                    direct += t;
                }
            }
            assert_eq!(eval_s(&a, &b).unwrap(), direct);
        }
    }

    #[test]
    fn chain_identity_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let len = rng.gen_range(0..=12);
            let w = random_word(&mut rng, n, len);
            let inst = extract(&w);
            assert!(inst.b.degree() <= 2);
            let sim = w.amplitude_00().unwrap();
            let formula = eval_amplitude_formula(&inst).unwrap();
            assert!((sim - formula).norm() < 1e-9);
            let real = eval_real_part(&inst).unwrap();
            assert!((real.to_f64() - sim.re).abs() < 1e-9);
            assert_eq!(eval_real_part_by_simulation(&w).unwrap(), real);
            let c = constrained_sum_exact(&inst).unwrap();
            assert!(c.im.is_zero());
            assert_eq!(c.re, real.integer);
        }
    }

    #[test]
    fn s2_over_unordered_pairs_is_wrong() {
        // Σ_{j≠k} x_j x_k vanishes over F₂; dropping s₂ breaks the real part
        let w = word(1, &["1:Z", "1:Z"]);
        let inst = extract(&w);
        let mut wrong = inst.clone();
        wrong.b = inst.b_tilde().add(&inst.class_sum(1));
        let good = eval_real_part(&inst).unwrap();
        let bad = eval_real_part(&wrong).unwrap();
        assert!((good.to_f64() - w.amplitude_00().unwrap().re).abs() < 1e-12);
        assert_ne!(good, bad);
    }

    #[test]
    fn deg3_examples() {
        let zero = BitMatrix::from_rows(&[bits("0"), bits("0")]);
        let f = build_deg3_from(&zero, &BoolPoly::zero(1)).unwrap();
        assert_eq!(f.n_vars(), 5);
        assert_eq!(f.degree(), 3);
        assert_eq!(f.delta_bruteforce().unwrap(), 24.into());

        let one = BitMatrix::from_rows(&[bits("1")]);
        let f = build_deg3_from(&one, &BoolPoly::zero(1)).unwrap();
        assert_eq!(f.delta_bruteforce().unwrap(), 8.into());
    }

    #[test]
    fn deg3_lemma_on_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let n = rng.gen_range(1..=2);
            let len = rng.gen_range(1..=4);
            let w = random_word(&mut rng, n, len);
            let inst = extract(&w);
            let f = build_deg3_poly(&inst);
            assert_eq!(f.degree(), 3);
            let expect = eval_real_part(&inst).unwrap().integer << (inst.m() + 1);
            assert_eq!(f.delta_bruteforce().unwrap().0, expect);
        }
    }

    #[test]
    fn dump_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let w = random_word(&mut rng, 3, 7);
            let inst = extract(&w);
            assert_eq!(inst.to_string().parse::<QsweInstance>().unwrap(), inst);
        }
        let empty = extract(&GeneratorWord::empty(2));
        assert_eq!(empty.to_string().parse::<QsweInstance>().unwrap(), empty);
    }

    #[test]
    fn huge_values_convert() {
        let v = ExactEnumeratorValue {
            integer: BigInt::from(4).pow(900),
            scale_exponent: 900,
        };
        let expect = (900.0 * 4f64.ln() - 450.0 * 20f64.ln()).exp();
        assert!((v.to_f64() / expect - 1.0).abs() < 1e-9);
    }
}
