//! Words in the generators `exp(iφσ(s))`, `‖s‖ ≤ 2`, and synthesis of `U(f)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::quantum_core::{cos_phi, sin_phi, Pauli, PauliString, StateVector, C64, MAX_SIM_QUBITS};

/// `Ũ = E_N ⋯ E_1` with `E_j = exp(iφσ(s_j))`: letter 1 acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorWord {
    n: usize,
    letters: Vec<PauliString>,
}

impl GeneratorWord {
    pub fn empty(n: usize) -> Self {
        GeneratorWord {
            n,
            letters: Vec::new(),
        }
    }

    pub fn new(n: usize, letters: Vec<PauliString>) -> Result<Self> {
        let mut w = Self::empty(n);
        for s in letters {
            w.push(s)?;
        }
        Ok(w)
    }

    pub fn push(&mut self, s: PauliString) -> Result<()> {
        if s.n() != self.n {
            return input(format!("letter on {} qubits in a {}-qubit word", s.n(), self.n));
        }
        if !(1..=2).contains(&s.weight()) {
            return input(format!("letter `{s}` has weight {}", s.weight()));
        }
        self.letters.push(s);
        Ok(())
    }

    pub fn extend_from(&mut self, other: &GeneratorWord) {
        assert_eq!(self.n, other.n);
        self.letters.extend_from_slice(&other.letters);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[PauliString] {
        &self.letters
    }

    /// The same letters on an `n`-qubit register, local qubit `q` moved to `map[q]`.
    pub fn embedded(&self, n: usize, map: &[usize]) -> GeneratorWord {
        GeneratorWord {
            n,
            letters: self.letters.iter().map(|s| s.remapped(n, map)).collect(),
        }
    }

    /// Maximal runs of equal letters as `(letter, run length)`.
    pub fn runs(&self) -> Vec<(PauliString, usize)> {
        let mut out: Vec<(PauliString, usize)> = Vec::new();
        for s in &self.letters {
            match out.last_mut() {
                Some((t, k)) if t == s => *k += 1,
                _ => out.push((*s, 1)),
            }
        }
        out
    }

    /// Applies the word to a state; runs of `k` equal letters use `exp(ikφσ)`.
    pub fn apply(&self, psi: &mut StateVector) {
        let phi = crate::quantum_core::phi();
        for (s, k) in self.runs() {
            let (c, sn) = if k == 1 {
                (cos_phi(), sin_phi())
            } else {
                let t = k as f64 * phi;
                (t.cos(), t.sin())
            };
            psi.apply_pauli_exp(&s, c, sn);
        }
    }

    /// `⟨0|Ũ|0⟩` by statevector simulation.
    pub fn amplitude_00(&self) -> Result<C64> {
        let mut psi = StateVector::zero(self.n)?;
        self.apply(&mut psi);
        Ok(psi.amplitudes()[0])
    }

    /// Dense product on at most 10 qubits.
    pub fn product(&self) -> Result<DMatrix<C64>> {
        if self.n > 10 {
            return Err(Error::TooLarge {
                what: "dense word product",
                n: self.n,
                cutoff: 10,
            });
        }
        let dim = 1 << self.n;
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        for col in 0..dim {
            let mut psi = StateVector::basis(self.n, col)?;
            self.apply(&mut psi);
            out.set_column(col, &nalgebra::DVector::from_column_slice(psi.amplitudes()));
        }
        Ok(out)
    }

    /// `⟨0| Π (2I + iσ_j) |0⟩ = 5^{N/2} ⟨0|Ũ|0⟩` as an exact Gaussian integer.
    pub fn scaled_amplitude_exact(&self) -> Result<Complex<BigInt>> {
        if self.n > MAX_SIM_QUBITS.min(16) {
            return Err(Error::TooLarge {
                what: "exact word simulation",
                n: self.n,
                cutoff: 16,
            });
        }
        let dim = 1usize << self.n;
        let mut v: Vec<Complex<BigInt>> = vec![Complex::zero(); dim];
        v[0] = Complex::new(BigInt::from(1), BigInt::zero());
        for (s, k) in self.runs() {
            // (2 + iP)^k = a + i b P, from (2 + i)^k = a + i b
            let (a, b) = gauss_power(k);
            let (flip, phase) = s.basis_masks();
            let ipow = (s.gamma() + 1) % 4;
            let old = v.clone();
            for (y, slot) in v.iter_mut().enumerate() {
                let src = y ^ flip;
                // σ|src⟩ = i^γ (−1)^{β·src} |y⟩
                let mut t = times_i_pow(&old[src], ipow) * &b;
                if (phase & src).count_ones() % 2 == 1 {
                    t = -t;
                }
                *slot = &old[y] * &a + t;
            }
        }
        Ok(v.swap_remove(0))
    }
}

/// `(2 + i)^k = a + ib`.
fn gauss_power(k: usize) -> (BigInt, BigInt) {
    let mut z = Complex::new(BigInt::from(1), BigInt::zero());
    let mut base = Complex::new(BigInt::from(2), BigInt::from(1));
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            z = &z * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    (z.re, z.im)
}

pub(crate) fn times_i_pow(z: &Complex<BigInt>, k: usize) -> Complex<BigInt> {
    match k % 4 {
        0 => z.clone(),
        1 => Complex::new(-z.im.clone(), z.re.clone()),
        2 => Complex::new(-z.re.clone(), -z.im.clone()),
        _ => Complex::new(z.im.clone(), -z.re.clone()),
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits={} length={} phi=atan(1/2)", self.n, self.len())?;
        for (j, s) in self.letters.iter().enumerate() {
            writeln!(f, "{}: {s}", j + 1)?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty word file".into(),
        })?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut n = None;
        let mut len = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("qubits", v)) => n = v.parse::<usize>().ok(),
                Some(("length", v)) => len = v.parse::<usize>().ok(),
                Some(("phi", "atan(1/2)")) => {}
                _ => return Err(perr(hl, format!("unexpected header field `{field}`"))),
            }
        }
        let n = n.filter(|&n| (1..=64).contains(&n)).ok_or_else(|| perr(hl, "missing or bad qubits=".into()))?;
        let len = len.ok_or_else(|| perr(hl, "missing length=".into()))?;
        let mut w = GeneratorWord::empty(n);
        for (ln, line) in lines {
            let (idx, spec) = line
                .split_once(':')
                .ok_or_else(|| perr(ln, "expected `j: <pauli-spec>`".into()))?;
            if idx.trim().parse::<usize>().ok() != Some(w.len() + 1) {
                return Err(perr(ln, format!("expected letter index {}", w.len() + 1)));
            }
            let p = PauliString::parse_sparse(n, spec).map_err(|e| perr(ln, e.to_string()))?;
            w.push(p).map_err(|e| perr(ln, e.to_string()))?;
        }
        if w.len() != len {
            return Err(perr(hl, format!("header says {len} letters, found {}", w.len())));
        }
        Ok(w)
    }
}

/// Knobs for approximating factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisBudget {
    pub per_factor_epsilon: f64,
    pub net_depth: usize,
    pub sk_levels: usize,
    pub seed: u64,
}

impl Default for SynthesisBudget {
    fn default() -> Self {
        SynthesisBudget {
            per_factor_epsilon: 0.1,
            net_depth: 8,
            sk_levels: 1,
            seed: 0,
        }
    }
}

impl SynthesisBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.per_factor_epsilon > 0.0) {
            return input("per_factor_epsilon must be positive");
        }
        if self.net_depth == 0 {
            return input("net_depth must be at least 1");
        }
        Ok(())
    }
}

/// `key=value` pairs separated by commas, over `eps`, `depth`, `levels` and
/// `seed`; missing keys keep their defaults.
impl FromStr for SynthesisBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut b = SynthesisBudget::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("budget entry `{part}` is not key=value")))?;
            let bad = |e: &dyn fmt::Display| Error::Input(format!("budget entry `{part}`: {e}"));
            match k.trim() {
                "eps" => b.per_factor_epsilon = v.trim().parse().map_err(|e| bad(&e))?,
                "depth" => b.net_depth = v.trim().parse().map_err(|e| bad(&e))?,
                "levels" => b.sk_levels = v.trim().parse().map_err(|e| bad(&e))?,
                "seed" => b.seed = v.trim().parse().map_err(|e| bad(&e))?,
                other => return input(format!("unknown budget key `{other}`")),
            }
        }
        b.validate()?;
        Ok(b)
    }
}

/// Uniformly drawn letters of weight 1 or 2 (a repeated qubit collapses to
/// weight 1).
pub fn random_word<R: rand::Rng>(rng: &mut R, n: usize, len: usize) -> GeneratorWord {
    let ops = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut w = GeneratorWord::empty(n);
    while w.len() < len {
        let mut s = PauliString::identity(n);
        s.set(rng.gen_range(0..n), ops[rng.gen_range(0..3)]);
        if n > 1 && rng.gen_bool(0.5) {
            s.set(rng.gen_range(0..n), ops[rng.gen_range(0..3)]);
        }
        w.push(s).expect("weight 1 or 2");
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{generator_unitary, op_norm, Pauli};

    fn ps(n: usize, s: &str) -> PauliString {
        PauliString::parse_sparse(n, s).unwrap()
    }

    #[test]
    fn word_file_round_trip() {
        let w = GeneratorWord::new(3, vec![ps(3, "1:X"), ps(3, "2:Z 3:Y"), ps(3, "1:X")]).unwrap();
        let text = w.to_string();
        assert!(text.starts_with("qubits=3 length=3 phi=atan(1/2)\n1: 1:X\n2: 2:Z 3:Y\n"));
        assert_eq!(text.parse::<GeneratorWord>().unwrap(), w);
        assert!("qubits=2 length=2 phi=atan(1/2)\n1: 1:X\n".parse::<GeneratorWord>().is_err());
        assert!("qubits=2 length=1 phi=atan(1/2)\n1: 1:X 2:X 3:X\n".parse::<GeneratorWord>().is_err());
        assert!(GeneratorWord::new(3, vec![ps(3, "1:X 2:X 3:X")]).is_err());
    }

    #[test]
    fn product_matches_dense_generators() {
        let letters = vec![ps(2, "1:X"), ps(2, "1:Z 2:Y"), ps(2, "1:Z 2:Y"), ps(2, "2:X")];
        let w = GeneratorWord::new(2, letters.clone()).unwrap();
        let mut expect = DMatrix::<C64>::identity(4, 4);
        for s in &letters {
            expect = generator_unitary(s, 1).unwrap().matrix() * expect;
        }
        assert!(op_norm(&(w.product().unwrap() - expect)) < 1e-12);
    }

    #[test]
    fn exact_amplitude_matches_float() {
        let w = GeneratorWord::new(
            2,
            vec![ps(2, "1:Y"), ps(2, "1:X 2:Z"), ps(2, "2:Y"), ps(2, "2:Y"), ps(2, "1:Z")],
        )
        .unwrap();
        let g = w.scaled_amplitude_exact().unwrap();
        let scale = 5f64.powf(w.len() as f64 / 2.0);
        let a = w.amplitude_00().unwrap();
        let re: f64 = g.re.to_string().parse().unwrap();
        let im: f64 = g.im.to_string().parse().unwrap();
        assert!((C64::new(re, im) / scale - a).norm() < 1e-12);
        let x = GeneratorWord::new(1, vec![PauliString::single(1, 0, Pauli::X)]).unwrap();
        assert_eq!(x.scaled_amplitude_exact().unwrap(), Complex::new(BigInt::from(2), BigInt::zero()));
    }
}
