//! Pauli strings, small dense unitaries and an n-qubit statevector simulator.
//!
//! Qubits are numbered from 0 internally and from 1 in every text format.
//! Qubit `q` of an `n`-qubit register is bit `n − 1 − q` of the basis index,
//! so qubit 0 is the most significant bit.
//!
//! `U(f) = H^{⊗n} · Π_{J ∈ M(f)} Λ^J(−1) · H^{⊗n}` has `⟨0|U(f)|0⟩ = 2^{−n} Δf`;
//! [`build_uf_gates`] produces that gate list and [`amplitude_00`] evaluates it.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::f2poly::BoolPoly;

pub type C64 = Complex64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest register the statevector simulator accepts.
pub const MAX_SIM_QUBITS: usize = 20;
/// Largest dense gate (in qubits).
pub const MAX_DENSE_QUBITS: usize = 4;

/// `cos φ = 2/√5` for the generator angle `φ = arctan(1/2)`.
pub fn cos_phi() -> f64 {
    2.0 / 5f64.sqrt()
}

/// `sin φ = 1/√5`.
pub fn sin_phi() -> f64 {
    1.0 / 5f64.sqrt()
}

/// `φ = arctan(1/2) = arccos(2/√5)`.
pub fn phi() -> f64 {
    0.5f64.atan()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// The `(α, β)` label: σ₀₀ = I, σ₀₁ = Z, σ₁₀ = X, σ₁₁ = Y.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::Z => (false, true),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
        }
    }

    pub fn from_bits(alpha: bool, beta: bool) -> Self {
        match (alpha, beta) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::Z,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
        }
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `σ(s) = σ_{α₁β₁} ⊗ … ⊗ σ_{αₙβₙ}` on at most 64 qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    alpha: u64,
    beta: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64);
        PauliString {
            n,
            alpha: 0,
            beta: 0,
        }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        Self::from_ops(n, [(q, p)])
    }

    /// Pauli string from `(qubit, operator)` pairs; repeated qubits override.
    pub fn from_ops<I: IntoIterator<Item = (usize, Pauli)>>(n: usize, ops: I) -> Self {
        let mut s = Self::identity(n);
        for (q, p) in ops {
            s.set(q, p);
        }
        s
    }

    pub fn from_pairs(pairs: &[(bool, bool)]) -> Self {
        Self::from_ops(
            pairs.len(),
            pairs.iter().enumerate().map(|(q, &(a, b))| (q, Pauli::from_bits(a, b))),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range");
        let (a, b) = p.bits();
        let bit = 1u64 << q;
        self.alpha = if a { self.alpha | bit } else { self.alpha & !bit };
        self.beta = if b { self.beta | bit } else { self.beta & !bit };
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.alpha >> q & 1 == 1, self.beta >> q & 1 == 1)
    }

    pub fn alpha(&self, q: usize) -> bool {
        self.alpha >> q & 1 == 1
    }

    pub fn beta(&self, q: usize) -> bool {
        self.beta >> q & 1 == 1
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.alpha | self.beta).count_ones() as usize
    }

    /// Number of σ_y factors.
    pub fn gamma(&self) -> usize {
        (self.alpha & self.beta).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.alpha | self.beta == 0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.support().into_iter().map(|q| (q, self.get(q)))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.alpha & other.beta) ^ (self.beta & other.alpha)).count_ones().is_multiple_of(2)
    }

    /// `self · other = i^k · σ(result)`, returning `(k mod 4, result)`.
    pub fn product(&self, other: &PauliString) -> (u8, PauliString) {
        assert_eq!(self.n, other.n);
        let mut k = 0u8;
        for q in 0..self.n {
            // single-qubit products: XY = iZ, YZ = iX, ZX = iY and reverses with −i
            k = (k
                + match (self.get(q), other.get(q)) {
                    (Pauli::X, Pauli::Y) | (Pauli::Y, Pauli::Z) | (Pauli::Z, Pauli::X) => 1,
                    (Pauli::Y, Pauli::X) | (Pauli::Z, Pauli::Y) | (Pauli::X, Pauli::Z) => 3,
                    _ => 0,
                })
                % 4;
        }
        (
            k,
            PauliString {
                n: self.n,
                alpha: self.alpha ^ other.alpha,
                beta: self.beta ^ other.beta,
            },
        )
    }

    /// Same operators on a register of `n` qubits, qubit `q` moved to `map[q]`.
    pub fn remapped(&self, n: usize, map: &[usize]) -> PauliString {
        PauliString::from_ops(n, self.ops().map(|(q, p)| (map[q], p)))
    }

    /// `(flip, phase)` masks in basis-index coordinates.
    pub fn basis_masks(&self) -> (usize, usize) {
        let mut flip = 0usize;
        let mut phase = 0usize;
        for q in 0..self.n {
            let bit = 1usize << (self.n - 1 - q);
            if self.alpha(q) {
                flip |= bit;
            }
            if self.beta(q) {
                phase |= bit;
            }
        }
        (flip, phase)
    }
}

impl fmt::Display for PauliString {
    /// `1:X 3:Z`, or `I` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .ops()
            .map(|(q, p)| format!("{}:{}", q + 1, p.letter()))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl PauliString {
    /// Parses whitespace-separated `<q>:<X|Y|Z>` tokens on an `n`-qubit register.
    pub fn parse_sparse(n: usize, s: &str) -> Result<Self> {
        let mut out = PauliString::identity(n);
        for tok in s.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let (q, p) = tok
                .split_once(':')
                .ok_or_else(|| Error::Input(format!("bad Pauli token `{tok}`")))?;
            let q: usize = q
                .parse()
                .ok()
                .filter(|&q| q >= 1 && q <= n)
                .ok_or_else(|| Error::Input(format!("bad qubit in `{tok}`")))?;
            let p = match p {
                "X" => Pauli::X,
                "Y" => Pauli::Y,
                "Z" => Pauli::Z,
                _ => return input(format!("bad Pauli letter in `{tok}`")),
            };
            if out.get(q - 1) != Pauli::I {
                return input(format!("qubit {q} listed twice"));
            }
            out.set(q - 1, p);
        }
        Ok(out)
    }
}

/// `‖U − V‖` as the largest singular value.
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// `min_θ ‖e^{iθ} U − V‖`.
pub fn phase_adjusted_distance(u: &DMatrix<C64>, v: &DMatrix<C64>) -> f64 {
    // the eigenphases of U†V fit in an arc of width w; the best phase sits
    // at its midpoint and leaves the chord 2 sin(w/4)
    let (_, t) = nalgebra::Schur::new(u.adjoint() * v).unpack();
    let mut a: Vec<f64> = t.diagonal().iter().map(|z| z.arg()).collect();
    if a.is_empty() {
        return 0.0;
    }
    a.sort_by(f64::total_cmp);
    let tau = 2.0 * std::f64::consts::PI;
    let mut gap = a[0] + tau - a[a.len() - 1];
    for w in a.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    2.0 * ((tau - gap) / 4.0).sin()
}

/// A dense unitary on at most four qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    mat: DMatrix<C64>,
    det: C64,
}

impl DenseUnitary {
    /// Checks `‖U†U − I‖_max ≤ 1e-10`.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let dim = mat.nrows();
        if dim != mat.ncols() || !dim.is_power_of_two() || dim > 1 << MAX_DENSE_QUBITS {
            return input(format!("{}x{} is not a supported gate size", mat.nrows(), mat.ncols()));
        }
        let err = (mat.adjoint() * &mat - DMatrix::<C64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if err > 1e-10 {
            return input(format!("matrix is not unitary (error {err:.2e})"));
        }
        let det = mat.clone().determinant();
        Ok(DenseUnitary { mat, det })
    }

    pub fn identity(dim: usize) -> Self {
        DenseUnitary {
            mat: DMatrix::identity(dim, dim),
            det: ONE,
        }
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(DMatrix::from_row_slice(
            2,
            2,
            &[C64::from(h), C64::from(h), C64::from(h), C64::from(-h)],
        ))
        .expect("hadamard is unitary")
    }

    /// `Λ(−1)` on `k` qubits: negates `|1…1⟩`.
    pub fn controlled_phase(k: usize) -> Self {
        let dim = 1 << k;
        let mut m = DMatrix::<C64>::identity(dim, dim);
        m[(dim - 1, dim - 1)] = -ONE;
        Self::new(m).expect("diagonal ±1")
    }

    /// `e^{iθ} I` on `k` qubits.
    pub fn global_phase(k: usize, theta: f64) -> Self {
        let dim = 1 << k;
        Self::new(DMatrix::<C64>::identity(dim, dim) * C64::from_polar(1.0, theta))
            .expect("phase is unitary")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn determinant(&self) -> C64 {
        self.det
    }

    pub fn mul(&self, other: &DenseUnitary) -> DenseUnitary {
        let mat = &self.mat * &other.mat;
        DenseUnitary {
            mat,
            det: self.det * other.det,
        }
    }

    pub fn adjoint(&self) -> DenseUnitary {
        DenseUnitary {
            mat: self.mat.adjoint(),
            det: self.det.conj(),
        }
    }
}

/// Largest singular value of `u − v`.
pub fn operator_norm_distance(u: &DenseUnitary, v: &DenseUnitary) -> Result<f64> {
    if u.dim() != v.dim() {
        return input(format!("dimension mismatch: {} vs {}", u.dim(), v.dim()));
    }
    Ok(op_norm(&(&u.mat - &v.mat)))
}

/// Dense matrix of σ(s) on its whole register (at most four qubits).
pub fn pauli_matrix(s: &PauliString) -> Result<DenseUnitary> {
    if s.n() > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge {
            what: "dense Pauli matrix",
            n: s.n(),
            cutoff: MAX_DENSE_QUBITS,
        });
    }
    Ok(DenseUnitary::new(pauli_dmatrix(s)).expect("Pauli strings are unitary"))
}

fn pauli_dmatrix(s: &PauliString) -> DMatrix<C64> {
    let dim = 1usize << s.n();
    let (flip, phase) = s.basis_masks();
    let g = I.powu(s.gamma() as u32);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for y in 0..dim {
        let sign = if (phase & y).count_ones() % 2 == 1 { -ONE } else { ONE };
        m[(y ^ flip, y)] = g * sign;
    }
    m
}

/// `exp(±iφσ(s)) = cos φ · I ± i sin φ · σ(s)` with `cos φ = 2/√5`.
pub fn generator_unitary(s: &PauliString, direction: i8) -> Result<DenseUnitary> {
    if s.is_identity() {
        return input("the identity string is not a generator");
    }
    if !(1..=2).contains(&s.weight()) {
        return input(format!("generator weight must be 1 or 2, got {}", s.weight()));
    }
    if direction != 1 && direction != -1 {
        return input("direction must be +1 or -1");
    }
    let dim = 1usize << s.n();
    let p = pauli_matrix(s)?;
    let m = DMatrix::<C64>::identity(dim, dim) * C64::from(cos_phi())
        + p.mat * (I * sin_phi() * f64::from(direction));
    DenseUnitary::new(m)
}

/// `exp(iθσ(s))` as a dense matrix on the string's register.
pub fn pauli_rotation(s: &PauliString, theta: f64) -> Result<DenseUnitary> {
    let dim = 1usize << s.n();
    let p = pauli_matrix(s)?;
    DenseUnitary::new(
        DMatrix::<C64>::identity(dim, dim) * C64::from(theta.cos()) + p.mat * (I * theta.sin()),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Hadamard,
    /// `Λ^J(−1)` on the targets.
    ControlledPhase,
    /// Controlled NOT, control first.
    Cnot,
    /// `e^{iθ} I`; `θ = π` is the `S_∅` gate.
    GlobalPhase(f64),
    /// `exp(iθσ)` with σ given on the local target register.
    Rotation { pauli: PauliString, angle: f64 },
    /// `exp(±iφσ)` with σ on the local target register.
    Generator { pauli: PauliString, direction: i8 },
}

/// A small gate acting on an ordered list of distinct qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GatePlacement {
    pub kind: GateKind,
    pub gate: DenseUnitary,
    pub targets: Vec<usize>,
}

impl GatePlacement {
    pub fn new(kind: GateKind, gate: DenseUnitary, targets: Vec<usize>) -> Result<Self> {
        if gate.n_qubits() != targets.len() {
            return input("gate size differs from target count");
        }
        let mut sorted = targets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != targets.len() {
            return input("repeated target qubit");
        }
        Ok(GatePlacement {
            kind,
            gate,
            targets,
        })
    }

    pub fn hadamard(q: usize) -> Self {
        GatePlacement {
            kind: GateKind::Hadamard,
            gate: DenseUnitary::hadamard(),
            targets: vec![q],
        }
    }

    pub fn controlled_phase(targets: Vec<usize>) -> Self {
        GatePlacement {
            kind: GateKind::ControlledPhase,
            gate: DenseUnitary::controlled_phase(targets.len()),
            targets,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        let mut m = DMatrix::<C64>::identity(4, 4);
        m.swap_rows(2, 3);
        GatePlacement {
            kind: GateKind::Cnot,
            gate: DenseUnitary::new(m).expect("permutation matrix"),
            targets: vec![control, target],
        }
    }

    pub fn global_phase(q: usize, theta: f64) -> Self {
        GatePlacement {
            kind: GateKind::GlobalPhase(theta),
            gate: DenseUnitary::global_phase(1, theta),
            targets: vec![q],
        }
    }

    /// `exp(iθσ)` for a string given on the full register.
    pub fn rotation(full: &PauliString, theta: f64) -> Result<Self> {
        let targets = full.support();
        let local = PauliString::from_ops(
            targets.len(),
            targets.iter().enumerate().map(|(i, &q)| (i, full.get(q))),
        );
        let gate = pauli_rotation(&local, theta)?;
        Ok(GatePlacement {
            kind: GateKind::Rotation {
                pauli: local,
                angle: theta,
            },
            gate,
            targets,
        })
    }

    /// `exp(±iφσ)` for a string given on the full register.
    pub fn generator(full: &PauliString, direction: i8) -> Result<Self> {
        let targets = full.support();
        let local = PauliString::from_ops(
            targets.len(),
            targets.iter().enumerate().map(|(i, &q)| (i, full.get(q))),
        );
        let gate = generator_unitary(&local, direction)?;
        Ok(GatePlacement {
            kind: GateKind::Generator {
                pauli: local,
                direction,
            },
            gate,
            targets,
        })
    }

    fn max_target(&self) -> usize {
        self.targets.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for GatePlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.targets.iter().map(|q| (q + 1).to_string()).collect();
        let qs = qs.join(" ");
        let local_to_global = |p: &PauliString| {
            let parts: Vec<String> = p
                .ops()
                .map(|(i, op)| format!("{}:{}", self.targets[i] + 1, op.letter()))
                .collect();
            parts.join(" ")
        };
        match &self.kind {
            GateKind::Hadamard => write!(f, "H {qs}"),
            GateKind::ControlledPhase => write!(f, "CZ {qs}"),
            GateKind::Cnot => write!(f, "CX {qs}"),
            GateKind::GlobalPhase(t) if (*t - std::f64::consts::PI).abs() < 1e-15 => {
                write!(f, "PHASE -1 {qs}")
            }
            GateKind::GlobalPhase(t) => write!(f, "PHASE {t} {qs}"),
            GateKind::Rotation { pauli, angle } => {
                write!(f, "ROT {angle} {}", local_to_global(pauli))
            }
            GateKind::Generator { pauli, direction } => {
                let sign = if *direction > 0 { '+' } else { '-' };
                write!(f, "GEN {sign} {}", local_to_global(pauli))
            }
        }
    }
}

/// One gate per line in the debug dump format.
pub fn format_gate_list(gates: &[GatePlacement]) -> String {
    gates.iter().map(|g| format!("{g}\n")).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_SIM_QUBITS {
            return Err(Error::TooLarge {
                what: "statevector",
                n,
                cutoff: MAX_SIM_QUBITS,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return input("amplitude count is not 2^n");
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, g: &GatePlacement) -> Result<()> {
        if g.max_target() >= self.n {
            return input(format!(
                "gate targets qubit {} on a {}-qubit register",
                g.max_target() + 1,
                self.n
            ));
        }
        let k = g.targets.len();
        let bits: Vec<usize> = g.targets.iter().map(|&q| 1usize << (self.n - 1 - q)).collect();
        let target_mask: usize = bits.iter().sum();
        // offsets[j]: basis offset of local index j (local bit 0 is the last target)
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|j| {
                (0..k)
                    .filter(|&t| j >> (k - 1 - t) & 1 == 1)
                    .map(|t| bits[t])
                    .sum()
            })
            .collect();
        let m = g.gate.matrix();
        let mut local = vec![ZERO; 1 << k];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            for (j, off) in offsets.iter().enumerate() {
                local[j] = self.amps[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (c, v) in local.iter().enumerate() {
                    acc += m[(r, c)] * v;
                }
                self.amps[base + off] = acc;
            }
        }
        Ok(())
    }

    /// `ψ ← (c·I + i·s·σ) ψ`, i.e. `exp(iθσ)` for `c = cos θ`, `s = sin θ`.
    pub fn apply_pauli_exp(&mut self, p: &PauliString, c: f64, s: f64) {
        assert_eq!(p.n(), self.n);
        let (flip, phase) = p.basis_masks();
        let g = I.powu(p.gamma() as u32) * I * s;
        let old = self.amps.clone();
        for (y, a) in self.amps.iter_mut().enumerate() {
            let src = y ^ flip;
            let sign = if (phase & src).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            *a = old[y] * c + g * old[src] * sign;
        }
    }
}

/// Hadamards, one `Λ^J(−1)` per monomial (`S_∅ = −I` on qubit 0), Hadamards.
pub fn build_uf_gates(poly: &BoolPoly) -> Result<Vec<GatePlacement>> {
    let n = poly.n_vars();
    if n == 0 {
        return input("U(f) needs at least one variable");
    }
    if poly.degree() > MAX_DENSE_QUBITS {
        return Err(Error::Degree {
            degree: poly.degree(),
            max: MAX_DENSE_QUBITS,
        });
    }
    let mut gates: Vec<GatePlacement> = (0..n).map(GatePlacement::hadamard).collect();
    for m in poly.monomials() {
        if m.is_one() {
            gates.push(GatePlacement::global_phase(0, std::f64::consts::PI));
        } else {
            gates.push(GatePlacement::controlled_phase(m.vars().collect()));
        }
    }
    gates.extend((0..n).map(GatePlacement::hadamard));
    Ok(gates)
}

/// `⟨0…0| G_k ⋯ G_1 |0…0⟩` for the gate list applied in order.
pub fn amplitude_00(gates: &[GatePlacement], n: usize) -> Result<C64> {
    let mut psi = StateVector::zero(n)?;
    for g in gates {
        psi.apply(g)?;
    }
    Ok(psi.amps[0])
}

/// Full matrix of a gate list on `n ≤ 10` qubits.
pub fn gates_operator(gates: &[GatePlacement], n: usize) -> Result<DMatrix<C64>> {
    if n > 10 {
        return Err(Error::TooLarge {
            what: "dense operator",
            n,
            cutoff: 10,
        });
    }
    let dim = 1 << n;
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let mut psi = StateVector::basis(n, col)?;
        for g in gates {
            psi.apply(g)?;
        }
        out.set_column(col, &nalgebra::DVector::from_vec(psi.amps));
    }
    Ok(out)
}

/// Dense `U(f)`.
pub fn uf_operator(poly: &BoolPoly) -> Result<DMatrix<C64>> {
    gates_operator(&build_uf_gates(poly)?, poly.n_vars())
}

/// The same polynomial on one extra, unused variable. Δ doubles and
/// `det U(f') = 1`: every factor then flips the sign of an even number of
/// basis states or has even-power determinant.
pub fn pad_for_special_unitary(poly: &BoolPoly) -> BoolPoly {
    poly.with_n_vars(poly.n_vars() + 1)
        .expect("growing the variable count always succeeds")
}

impl FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => input(format!("unknown Pauli `{s}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2poly::random_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    fn dm(rows: usize, v: &[C64]) -> DMatrix<C64> {
        DMatrix::from_row_slice(rows, rows, v)
    }

    fn poly(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    #[test]
    fn pauli_table() {
        let z = pauli_matrix(&PauliString::from_pairs(&[(false, true)])).unwrap();
        assert_eq!(z.matrix(), &dm(2, &[ONE, ZERO, ZERO, -ONE]));
        let y = pauli_matrix(&PauliString::from_pairs(&[(true, true)])).unwrap();
        assert_eq!(y.matrix(), &dm(2, &[ZERO, -I, I, ZERO]));
        let ix = pauli_matrix(&PauliString::from_pairs(&[(false, false), (true, false)])).unwrap();
        let x = dm(2, &[ZERO, ONE, ONE, ZERO]);
        assert_eq!(ix.matrix(), &DMatrix::<C64>::identity(2, 2).kronecker(&x));
    }

    #[test]
    fn pauli_algebra() {
        let all = [Pauli::X, Pauli::Y, Pauli::Z];
        for &a in &all {
            let pa = pauli_matrix(&PauliString::single(1, 0, a)).unwrap();
            let sq = pa.mul(&pa);
            assert!(operator_norm_distance(&sq, &DenseUnitary::identity(2)).unwrap() < 1e-14);
            for &b in &all {
                if a == b {
                    continue;
                }
                let pb = pauli_matrix(&PauliString::single(1, 0, b)).unwrap();
                let anti = pa.matrix() * pb.matrix() + pb.matrix() * pa.matrix();
                assert!(op_norm(&anti) < 1e-14);
                // product() agrees with matrix multiplication
                let (k, r) = PauliString::single(1, 0, a).product(&PauliString::single(1, 0, b));
                let pr = pauli_matrix(&r).unwrap().matrix() * I.powu(k as u32);
                assert!(op_norm(&(pr - pa.matrix() * pb.matrix())) < 1e-14);
            }
        }
    }

    #[test]
    fn sparse_text() {
        let p = PauliString::parse_sparse(3, "1:X 3:Y").unwrap();
        assert_eq!(p.to_string(), "1:X 3:Y");
        assert_eq!(p.weight(), 2);
        assert_eq!(p.gamma(), 1);
        assert!(PauliString::parse_sparse(2, "3:X").is_err());
        assert!(PauliString::parse_sparse(2, "1:X 1:Z").is_err());
        assert!(PauliString::parse_sparse(2, "1:W").is_err());
    }

    #[test]
    fn generator_examples() {
        let x = PauliString::single(1, 0, Pauli::X);
        let g = generator_unitary(&x, 1).unwrap();
        let mut psi = StateVector::zero(1).unwrap();
        psi.apply(&GatePlacement::generator(&x, 1).unwrap()).unwrap();
        assert!(close(psi.amplitudes()[0], C64::from(2.0 / 5f64.sqrt())));
        assert!(close(g.determinant(), ONE));

        let z = PauliString::single(1, 0, Pauli::Z);
        let gz = generator_unitary(&z, 1).unwrap();
        let p = phi();
        assert!(close(gz.matrix()[(0, 0)], C64::from_polar(1.0, p)));
        assert!(close(gz.matrix()[(1, 1)], C64::from_polar(1.0, -p)));
        assert!(close(gz.matrix()[(0, 1)], ZERO));

        let xz = PauliString::from_ops(2, [(0, Pauli::X), (1, Pauli::Z)]);
        let fwd = generator_unitary(&xz, 1).unwrap();
        let back = generator_unitary(&xz, -1).unwrap();
        assert!(operator_norm_distance(&fwd.mul(&back), &DenseUnitary::identity(4)).unwrap() < 1e-12);
        assert!(generator_unitary(&PauliString::identity(1), 1).is_err());
    }

    #[test]
    fn uf_examples() {
        let f = poly("nvars=1\nx1");
        let u = uf_operator(&f).unwrap();
        assert!(op_norm(&(u - dm(2, &[ZERO, ONE, ONE, ZERO]))) < 1e-12);
        let u0 = uf_operator(&BoolPoly::zero(3)).unwrap();
        assert!(op_norm(&(u0 - DMatrix::<C64>::identity(8, 8))) < 1e-12);
        let g = build_uf_gates(&poly("nvars=2\nx1*x2")).unwrap();
        assert_eq!(format_gate_list(&g), "H 1\nH 2\nCZ 1 2\nH 1\nH 2\n");
        assert!(close(amplitude_00(&g, 2).unwrap(), C64::from(0.5)));
        assert!(build_uf_gates(&poly("nvars=5\nx1*x2*x3*x4*x5")).is_err());
    }

    #[test]
    fn amplitude_examples() {
        let a = amplitude_00(&build_uf_gates(&poly("nvars=1\nx1")).unwrap(), 1).unwrap();
        assert!(close(a, ZERO));
        let a = amplitude_00(&build_uf_gates(&BoolPoly::one(1)).unwrap(), 1).unwrap();
        assert!(close(a, -ONE));
        let a = amplitude_00(&build_uf_gates(&poly("nvars=3\nx1*x2*x3")).unwrap(), 3).unwrap();
        assert!(close(a, C64::from(0.75)));
        let bad = vec![GatePlacement::hadamard(3)];
        assert!(amplitude_00(&bad, 2).is_err());
    }

    #[test]
    fn amplitude_matches_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
            let f = random_poly(&mut rng, n, 4, 6);
            let a = amplitude_00(&build_uf_gates(&f).unwrap(), n).unwrap();
            let d = f.delta_bruteforce().unwrap().0;
            let expect: f64 = d.to_string().parse::<f64>().unwrap() / f64::from(1u32 << n);
            assert!((a - C64::from(expect)).norm() < 1e-9);
        }
    }

    #[test]
    fn distance_examples() {
        let id = DenseUnitary::identity(2);
        assert!(operator_norm_distance(&id, &id).unwrap() < 1e-15);
        let neg = DenseUnitary::global_phase(1, std::f64::consts::PI);
        assert!((operator_norm_distance(&id, &neg).unwrap() - 2.0).abs() < 1e-12);
        let t = std::f64::consts::FRAC_PI_2;
        let d = DenseUnitary::new(dm(2, &[ONE, ZERO, ZERO, C64::from_polar(1.0, t)])).unwrap();
        assert!((operator_norm_distance(&id, &d).unwrap() - 2f64.sqrt()).abs() < 1e-10);
        assert!(operator_norm_distance(&id, &DenseUnitary::identity(4)).is_err());
    }

    #[test]
    fn padding_lands_in_special_unitary() {
        let f = poly("nvars=1\nx1");
        let p = pad_for_special_unitary(&f);
        assert_eq!(p.n_vars(), 2);
        assert_eq!(p.delta_bruteforce().unwrap(), 0.into());
        let g = poly("nvars=3\nx1*x2*x3");
        assert_eq!(pad_for_special_unitary(&g).delta_bruteforce().unwrap(), 12.into());

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let f = pad_for_special_unitary(&random_poly(&mut rng, n, 4, 5));
            let det = uf_operator(&f).unwrap().determinant();
            assert!((det - ONE).norm() < 1e-9, "det = {det}");
        }
    }

    #[test]
    fn pauli_exp_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let n = 3;
            let p = PauliString::from_ops(
                n,
                (0..n).map(|q| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)])),
            );
            if p.is_identity() {
                continue;
            }
            let theta: f64 = rng.gen_range(-3.0..3.0);
            let amps: Vec<C64> = (0..8).map(|_| C64::new(rng.gen(), rng.gen())).collect();
            let mut a = StateVector::from_amplitudes(n, amps.clone()).unwrap();
            a.apply_pauli_exp(&p, theta.cos(), theta.sin());
            let dense = pauli_rotation(&p, theta).unwrap();
            let v = dense.matrix() * nalgebra::DVector::from_vec(amps);
            for (x, y) in a.amplitudes().iter().zip(v.iter()) {
                assert!(close(*x, *y));
            }
        }
    }

    #[test]
    fn linearity() {
        let gates = build_uf_gates(&poly("nvars=3\nx1*x2 + x3 + 1")).unwrap();
        let mut sum = [ZERO; 8];
        for (b, w) in [(1usize, C64::new(0.6, 0.0)), (6, C64::new(0.0, 0.8))] {
            let mut psi = StateVector::basis(3, b).unwrap();
            for g in &gates {
                psi.apply(g).unwrap();
            }
            for (s, a) in sum.iter_mut().zip(psi.amplitudes()) {
                *s += w * a;
            }
        }
        let mut amps = vec![ZERO; 8];
        amps[1] = C64::new(0.6, 0.0);
        amps[6] = C64::new(0.0, 0.8);
        let mut psi = StateVector::from_amplitudes(3, amps).unwrap();
        for g in &gates {
            psi.apply(g).unwrap();
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-9);
        for (s, a) in sum.iter().zip(psi.amplitudes()) {
            assert!(close(*s, *a));
        }
    }
}
