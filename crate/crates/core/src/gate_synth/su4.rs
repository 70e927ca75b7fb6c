//! Two-qubit approximation: a breadth-first net over the 15 generators, a
//! beam-guided meet-in-the-middle search on top of it, and Solovay–Kitaev
//! refinement with group commutators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kdtree::KdTree;
use super::{emulate_inverse, GeneratorWord, SynthesisBudget};
use crate::error::{input, Error, Result};
use crate::quantum_core::{
    generator_unitary, op_norm, phase_adjusted_distance, DenseUnitary, Pauli, PauliString, C64,
};

type Mat4 = Matrix4<C64>;

/// Depth of the stored half of the meet-in-the-middle search.
pub const STORED_DEPTH: usize = 5;
/// Words kept per level of the beam.
pub const BEAM_WIDTH: usize = 24;
/// Leaf points examined per nearest-neighbour query.
const MAX_CHECKS: usize = 4096;
/// Beam candidates handed to the local polish.
const POLISHED: usize = 4;
/// Perturbation rounds after the polish.
const KICKS: usize = 24;

/// The 15 two-qubit generator strings, single-qubit ones first.
pub fn two_qubit_letters() -> Vec<PauliString> {
    let ops = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut out: Vec<PauliString> = Vec::new();
    for a in ops {
        for b in ops {
            let s = PauliString::from_ops(2, [(0, a), (1, b)]);
            if !s.is_identity() {
                out.push(s);
            }
        }
    }
    out.sort_by_key(|s| s.weight());
    out
}

fn letter_mats() -> &'static [Mat4] {
    static M: OnceLock<Vec<Mat4>> = OnceLock::new();
    M.get_or_init(|| {
        two_qubit_letters()
            .iter()
            .map(|s| to_mat4(generator_unitary(s, 1).expect("generator").matrix()))
            .collect()
    })
}

fn to_mat4(m: &DMatrix<C64>) -> Mat4 {
    Mat4::from_fn(|r, c| m[(r, c)])
}

fn to_dmatrix(m: &Mat4) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |r, c| m[(r, c)])
}

fn flatten(m: &Mat4) -> [f64; 32] {
    let mut out = [0.0; 32];
    for (i, z) in m.iter().enumerate() {
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
    out
}

fn word_mat(letters: &[u8]) -> Mat4 {
    let g = letter_mats();
    letters.iter().fold(Mat4::identity(), |acc, &l| g[l as usize] * acc)
}

struct Net {
    tree: KdTree<32>,
    parent: Vec<(u32, u8)>,
}

impl Net {
    fn build(depth: usize) -> Net {
        let g = letter_mats();
        let mut mats = vec![Mat4::identity()];
        let mut parent = vec![(u32::MAX, 0u8)];
        let mut seen: HashMap<[i64; 32], ()> = HashMap::new();
        seen.insert(fingerprint(&mats[0]), ());
        let mut frontier = 0..1;
        for _ in 0..depth {
            let start = mats.len();
            for i in frontier.clone() {
                for (l, gl) in g.iter().enumerate() {
                    let m = gl * mats[i];
                    if seen.insert(fingerprint(&m), ()).is_none() {
                        mats.push(m);
                        parent.push((i as u32, l as u8));
                    }
                }
            }
            frontier = start..mats.len();
        }
        Net {
            tree: KdTree::new(mats.iter().map(flatten).collect()),
            parent,
        }
    }

    fn word(&self, mut i: usize) -> Vec<u8> {
        let mut out = Vec::new();
        while self.parent[i].0 != u32::MAX {
            out.push(self.parent[i].1);
            i = self.parent[i].0 as usize;
        }
        out.reverse();
        out
    }
}

fn fingerprint(m: &Mat4) -> [i64; 32] {
    flatten(m).map(|x| (x * 1e8).round() as i64)
}

fn net(depth: usize) -> Arc<Net> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Net>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("net cache");
    guard.entry(depth).or_insert_with(|| Arc::new(Net::build(depth))).clone()
}

/// Number of distinct products in the breadth-first net of the given depth.
pub fn net_size(depth: usize) -> usize {
    net(depth).tree.len()
}

fn check_target(target: &DenseUnitary) -> Result<Mat4> {
    if target.dim() != 4 {
        return input(format!("two-qubit target expected, got dimension {}", target.dim()));
    }
    // scale into SU(4); the remaining freedom is the centre {1, i, −1, −i}
    let d = target.determinant();
    let root = C64::from_polar(1.0, -d.arg() / 4.0);
    Ok(to_mat4(target.matrix()) * root)
}

const CENTRE: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

/// Best `(v, d²)` over the centre for the query `T·M(u)†`.
fn best_completion(net: &Net, t: &Mat4, mu: &Mat4) -> (usize, f64) {
    nearest_up_to_centre(net, &(t * mu.adjoint()))
}

fn nearest_up_to_centre(net: &Net, w: &Mat4) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for c in CENTRE {
        let q = flatten(&(w * c));
        if let Some((v, d2)) = net.tree.nearest_limited(&q, MAX_CHECKS) {
            if d2 < best.1 {
                best = (v, d2);
            }
        }
    }
    best
}

/// Best word of length ≤ `budget.net_depth` found for a two-qubit target,
/// with its phase-adjusted distance. Deterministic given `budget.seed`.
pub fn basic_approx_best(target: &DenseUnitary, budget: &SynthesisBudget) -> Result<(GeneratorWord, f64)> {
    search(target, budget.net_depth, BEAM_WIDTH, POLISHED, KICKS, budget.seed)
}

fn search(
    target: &DenseUnitary,
    depth: usize,
    width: usize,
    polished: usize,
    kicks: usize,
    seed: u64,
) -> Result<(GeneratorWord, f64)> {
    let t = check_target(target)?;
    let stored = depth.min(STORED_DEPTH);
    let net = net(stored);
    let g = letter_mats();

    // candidates: (frobenius², u letters, v index)
    let mut cands: Vec<(f64, Vec<u8>, usize)> = Vec::new();
    let mut beam: Vec<(Vec<u8>, Mat4)> = vec![(Vec::new(), Mat4::identity())];
    let (v0, d0) = best_completion(&net, &t, &Mat4::identity());
    cands.push((d0, Vec::new(), v0));
    for _ in 0..depth - stored {
        let mut children: Vec<(f64, Vec<u8>, Mat4, usize)> = Vec::with_capacity(beam.len() * g.len());
        for (u, mu) in &beam {
            for (l, gl) in g.iter().enumerate() {
                let m = gl * mu;
                let (v, d2) = best_completion(&net, &t, &m);
                let mut w = u.clone();
                w.push(l as u8);
                children.push((d2, w, m, v));
            }
        }
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        children.truncate(width);
        for (d2, w, _, v) in &children {
            cands.push((*d2, w.clone(), *v));
        }
        beam = children.into_iter().map(|(_, w, m, _)| (w, m)).collect();
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut best: Option<(Vec<u8>, f64)> = None;
    for (_, u, v) in cands.iter().take(polished) {
        let mut letters = u.clone();
        letters.extend(net.word(*v));
        let letters = polish(&t, letters, depth);
        let d = phase_dist(&word_mat(&letters), &t);
        if best.as_ref().is_none_or(|b| d < b.1 || (d == b.1 && letters < b.0)) {
            best = Some((letters, d));
        }
    }
    let (mut letters, mut d) = best.expect("at least one candidate");
    // iterated local search: scramble a short window, polish, keep if better
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..kicks {
        if letters.is_empty() {
            break;
        }
        let len = rng.gen_range(1..=3.min(letters.len()));
        let at = rng.gen_range(0..=letters.len() - len);
        let mut cand = letters.clone();
        for l in &mut cand[at..at + len] {
            *l = rng.gen_range(0..15);
        }
        let cand = polish(&t, cand, depth);
        let dc = phase_dist(&word_mat(&cand), &t);
        if dc < d {
            letters = cand;
            d = dc;
        }
    }
    Ok((to_word(&letters), d))
}

fn phase_dist(m: &Mat4, t: &Mat4) -> f64 {
    phase_adjusted_distance(&to_dmatrix(m), &to_dmatrix(t))
}

/// Window re-optimization: repeatedly replaces a stretch of at most
/// `STORED_DEPTH` letters by the net's best stand-in, while it helps.
fn polish(t: &Mat4, mut letters: Vec<u8>, depth: usize) -> Vec<u8> {
    let mut cur = phase_dist(&word_mat(&letters), t);
    loop {
        let mut improved = false;
        for start in 0..=letters.len() {
            for r in 0..=STORED_DEPTH.min(letters.len() - start) {
                let room = (depth + r).saturating_sub(letters.len()).min(STORED_DEPTH);
                if room == 0 {
                    continue;
                }
                // word = S·W·P with P applied first, so W ≈ S†·T·P†
                let p = word_mat(&letters[..start]);
                let s = word_mat(&letters[start + r..]);
                let net = net(room);
                let (v, _) = nearest_up_to_centre(&net, &(s.adjoint() * t * p.adjoint()));
                let mut cand = letters[..start].to_vec();
                cand.extend(net.word(v));
                cand.extend_from_slice(&letters[start + r..]);
                let d = phase_dist(&word_mat(&cand), t);
                if d < cur - 1e-12 {
                    letters = cand;
                    cur = d;
                    improved = true;
                    break;
                }
            }
            if improved {
                break;
            }
        }
        if !improved {
            return letters;
        }
    }
}

fn to_word(letters: &[u8]) -> GeneratorWord {
    let alphabet = two_qubit_letters();
    GeneratorWord::new(2, letters.iter().map(|&l| alphabet[l as usize]).collect())
        .expect("two-qubit generators")
}

/// A word of length ≤ `budget.net_depth` within phase-adjusted distance `eps0`.
pub fn basic_approx(target: &DenseUnitary, eps0: f64, budget: &SynthesisBudget) -> Result<GeneratorWord> {
    budget.validate()?;
    let (w, d) = basic_approx_best(target, budget)?;
    if d > eps0 {
        return Err(Error::BudgetExceeded {
            factor: None,
            best: d,
            wanted: eps0,
        });
    }
    Ok(w)
}

fn exp_i_hermitian(a: &DMatrix<C64>) -> DMatrix<C64> {
    let e = a.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| C64::from_polar(1.0, l)));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// Hermitian `H` with `exp(iH) = u` and eigenvalues in `(−π, π]`.
fn log_unitary(u: &DMatrix<C64>) -> DMatrix<C64> {
    let (q, t) = nalgebra::Schur::new(u.clone()).unpack();
    let d = DMatrix::from_diagonal(&t.diagonal().map(|z| C64::from(z.arg())));
    let h = &q * d * q.adjoint();
    (&h + h.adjoint()) * C64::from(0.5)
}

fn dft(n: usize) -> DMatrix<C64> {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        C64::from_polar(s, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64)
    })
}

/// Hermitian `A`, `B` with `[A, B] = −iH`, balanced in norm.
fn commutator_generators(h: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = h.nrows();
    let e = h.clone().symmetric_eigen();
    // in the basis Q·F the traceless H has a zero diagonal
    let mean = e.eigenvalues.sum() / n as f64;
    let basis = e.eigenvectors.clone() * dft(n);
    let lam = DMatrix::from_diagonal(&e.eigenvalues.map(|l| C64::from(l - mean)));
    let hf = dft(n).adjoint() * lam * dft(n);
    let b: Vec<f64> = (0..n).map(|k| k as f64 - (n as f64 - 1.0) / 2.0).collect();
    let mut a = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if j != k {
                // [A, B]_{jk} = A_{jk}(b_k − b_j)
                a[(j, k)] = hf[(j, k)] * C64::new(0.0, -1.0) / (b[k] - b[j]);
            }
        }
    }
    let bm = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, b.iter().map(|&x| C64::from(x))));
    let (na, nb) = (op_norm(&a), op_norm(&bm));
    let scale = if na > 1e-300 { (nb / na).sqrt() } else { 1.0 };
    let a = a * C64::from(scale);
    let bm = bm * C64::from(1.0 / scale);
    let to = |m: DMatrix<C64>| &basis * m * basis.adjoint();
    (to(a), to(bm))
}

/// `V`, `W` with `V W V† W† ≈ Δ` for `Δ` near the identity, refined by a few
/// fixed-point corrections of the target logarithm.
pub fn group_commutator(delta: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let h0 = log_unitary(delta);
    let mut h = h0.clone();
    let mut best: Option<(f64, DMatrix<C64>, DMatrix<C64>)> = None;
    for _ in 0..12 {
        let (a, b) = commutator_generators(&h);
        let v = exp_i_hermitian(&a);
        let w = exp_i_hermitian(&b);
        let c = &v * &w * v.adjoint() * w.adjoint();
        let err = op_norm(&(&c - delta));
        if best.as_ref().is_none_or(|bst| err < bst.0) {
            best = Some((err, v, w));
        }
        if err < 1e-13 {
            break;
        }
        h += log_unitary(&(delta * c.adjoint()));
    }
    let (_, v, w) = best.expect("one iteration ran");
    (v, w)
}

fn inverse_letters(word: &GeneratorWord, budget: &SynthesisBudget) -> Result<GeneratorWord> {
    let mut out = GeneratorWord::empty(word.n());
    for s in word.letters().iter().rev() {
        out.extend_from(&emulate_inverse(s, budget)?);
    }
    Ok(out)
}

/// Budget for the `+φ` stand-ins of inverse letters inside refinement.
fn inverse_budget() -> SynthesisBudget {
    SynthesisBudget {
        per_factor_epsilon: 2e-3,
        net_depth: 20,
        sk_levels: 0,
        seed: 0,
    }
}

fn dist_to(word: &GeneratorWord, target: &DMatrix<C64>) -> Result<f64> {
    Ok(phase_adjusted_distance(&word.product()?, target))
}

fn sk_rec(target: &DenseUnitary, level: usize, budget: &SynthesisBudget) -> Result<(GeneratorWord, f64)> {
    if level == 0 {
        return basic_approx_best(target, budget);
    }
    let (u, du) = sk_rec(target, level - 1, budget)?;
    sk_step(target, u, du, level - 1, budget)
}

/// One commutator correction of `u`; keeps `u` unless the result is closer.
fn sk_step(
    target: &DenseUnitary,
    u: GeneratorWord,
    du: f64,
    inner: usize,
    budget: &SynthesisBudget,
) -> Result<(GeneratorWord, f64)> {
    let t = target.matrix();
    let mu = u.product()?;
    // align the phase of u with the target before taking the residual
    let tr = (mu.adjoint() * t).trace();
    let phase = if tr.norm() > 1e-12 { tr / tr.norm() } else { C64::new(1.0, 0.0) };
    let delta = t * (mu * phase).adjoint();
    let (v, w) = group_commutator(&delta);
    let (vw, _) = sk_rec(&DenseUnitary::new(v)?, inner, budget)?;
    let (ww, _) = sk_rec(&DenseUnitary::new(w)?, inner, budget)?;
    let ib = inverse_budget();
    let mut cand = u.clone();
    cand.extend_from(&inverse_letters(&ww, &ib)?);
    cand.extend_from(&inverse_letters(&vw, &ib)?);
    cand.extend_from(&ww);
    cand.extend_from(&vw);
    let dc = dist_to(&cand, t)?;
    Ok(if dc < du { (cand, dc) } else { (u, du) })
}

/// Solovay–Kitaev refinement of `word` towards `target`. The measured
/// phase-adjusted distance never increases.
pub fn sk_refine(
    target: &DenseUnitary,
    word: &GeneratorWord,
    levels: usize,
    budget: &SynthesisBudget,
) -> Result<GeneratorWord> {
    budget.validate()?;
    if word.n() != 2 || target.dim() != 4 {
        return input("refinement works on two-qubit words and targets");
    }
    let mut cur = word.clone();
    let mut d = dist_to(&cur, target.matrix())?;
    for level in 0..levels {
        let (w, dw) = sk_step(target, cur.clone(), d, level, budget)?;
        cur = w;
        d = dw;
    }
    Ok(cur)
}

/// Haar-random two-qubit special unitary from a seeded generator.
pub fn haar_su4<R: rand::Rng>(rng: &mut R) -> DenseUnitary {
    use rand_distr::{Distribution, StandardNormal};
    let z = DMatrix::<C64>::from_fn(4, 4, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let d = DMatrix::from_diagonal(&r.diagonal().map(|x| if x.norm() > 0.0 { x / x.norm() } else { C64::from(1.0) }));
    let u = q * d;
    let det = u.clone().determinant();
    let u = u * C64::from_polar(1.0, -det.arg() / 4.0);
    DenseUnitary::new(u).expect("QR yields a unitary")
}
