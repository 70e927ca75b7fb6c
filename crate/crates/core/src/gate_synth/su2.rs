//! Approximation inside one SU(2) subgroup spanned by three letters.
//!
//! If `P`, `Q`, `R` are Pauli strings with `PQ = iR`, the operators
//! `a + i(bP + cQ + dR)` with `a² + b² + c² + d² = 1` form a copy of SU(2),
//! and the operator-norm distance between two of them is the Euclidean
//! distance of their coefficient vectors. The letters `exp(iφP)`,
//! `exp(iφQ)`, `exp(iφR)` live in that copy, so a search over unit
//! quaternions with a kd-tree gives exact nearest neighbours.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::kdtree::KdTree;
use crate::error::{Error, Result};
use crate::quantum_core::{cos_phi, sin_phi, Pauli, PauliString};

/// Deepest stored level; words up to twice this long are searched.
pub const MAX_HALF_DEPTH: usize = 13;

/// `a + i(b·σ₁ + c·σ₂ + d·σ₃)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat(pub [f64; 4]);

impl Quat {
    pub const ONE: Quat = Quat([1.0, 0.0, 0.0, 0.0]);

    /// `exp(iθσ_axis)`.
    pub fn rotation(axis: usize, theta: f64) -> Quat {
        let mut q = [theta.cos(), 0.0, 0.0, 0.0];
        q[axis + 1] = theta.sin();
        Quat(q)
    }

    pub fn letter(axis: usize) -> Quat {
        let mut q = [cos_phi(), 0.0, 0.0, 0.0];
        q[axis + 1] = sin_phi();
        Quat(q)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, o: &Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        // (a₁ + i v₁·σ)(a₂ + i v₂·σ) = a₁a₂ − v₁·v₂ + i(a₁v₂ + a₂v₁ − v₁×v₂)·σ
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + a2 * b1 - (c1 * d2 - d1 * c2),
            a1 * c2 + a2 * c1 - (d1 * b2 - b1 * d2),
            a1 * d2 + a2 * d1 - (b1 * c2 - c1 * b2),
        ])
    }

    pub fn adjoint(&self) -> Quat {
        let [a, b, c, d] = self.0;
        Quat([a, -b, -c, -d])
    }

    /// Operator-norm distance of the represented unitaries.
    pub fn dist(&self, o: &Quat) -> f64 {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub fn of_word(letters: &[u8]) -> Quat {
        letters
            .iter()
            .fold(Quat::ONE, |acc, &l| Quat::letter(l as usize).mul(&acc))
    }
}

/// An ordered triple `(P, Q, R)` of weight ≤ 2 strings with `PQ = iR`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Frame(pub [PauliString; 3]);

impl Frame {
    /// A frame whose first axis is `p` (weight 1 or 2).
    pub fn for_axis(p: &PauliString) -> Frame {
        let q0 = p.support()[0];
        let other = match p.get(q0) {
            Pauli::X => Pauli::Z,
            Pauli::Y => Pauli::X,
            _ => Pauli::X,
        };
        let q = PauliString::single(p.n(), q0, other);
        let (k, r) = p.product(&q);
        debug_assert!(k % 2 == 1);
        if k == 1 {
            Frame([*p, q, r])
        } else {
            // PQ = −iR gives PR = iQ
            Frame([*p, r, q])
        }
    }

    pub fn letter(&self, axis: u8) -> PauliString {
        self.0[axis as usize]
    }
}

struct Level {
    tree: KdTree<4>,
}

fn level_start(k: usize) -> usize {
    (3usize.pow(k as u32) - 1) / 2
}

/// Letters of the word stored at BFS index `i`.
fn decode(i: usize) -> Vec<u8> {
    let mut k = 0;
    while level_start(k + 1) <= i {
        k += 1;
    }
    let mut local = i - level_start(k);
    let mut out = vec![0u8; k];
    for slot in out.iter_mut().rev() {
        *slot = (local % 3) as u8;
        local /= 3;
    }
    out
}

fn all_points(h: usize) -> Vec<[f64; 4]> {
    let mut pts = vec![Quat::ONE.0];
    let mut prev = 0..1;
    let letters = [Quat::letter(0), Quat::letter(1), Quat::letter(2)];
    for _ in 0..h {
        let start = pts.len();
        for i in prev.clone() {
            let base = Quat(pts[i]);
            for g in &letters {
                pts.push(g.mul(&base).0);
            }
        }
        prev = start..pts.len();
    }
    pts
}

fn level(h: usize) -> Arc<Level> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Level>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("cache lock");
    guard
        .entry(h)
        .or_insert_with(|| {
            Arc::new(Level {
                tree: KdTree::new(all_points(h)),
            })
        })
        .clone()
}

/// Best word of length ≤ 2h for `target`, by exhaustive meet-in-the-middle.
fn search_at(target: &Quat, h: usize) -> (Vec<u8>, f64) {
    let lv = level(h);
    let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
    for u in 0..lv.tree.len() {
        // product = M(v)·M(u) ≈ T  ⇔  M(v) ≈ T·M(u)†
        let w = target.mul(&Quat(*lv.tree.point(u)).adjoint());
        let (v, d2) = lv.tree.nearest(&w.0).expect("non-empty net");
        if d2 < best.2 {
            best = (u, v, d2);
        }
    }
    let mut word = decode(best.0);
    word.extend(decode(best.1));
    let d = Quat::of_word(&word).dist(target);
    (word, d)
}

/// Shortest-depth word within `eps` of `target`, searching half depths up to
/// `max_half`. Returns the best word found and its distance either way.
pub fn approximate(target: &Quat, eps: f64, max_half: usize) -> (Vec<u8>, f64) {
    static MEMO: OnceLock<Mutex<HashMap<([u64; 4], u64, usize), (Vec<u8>, f64)>>> = OnceLock::new();
    let key = (target.0.map(f64::to_bits), eps.to_bits(), max_half);
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = memo.lock().expect("memo lock").get(&key) {
        return hit.clone();
    }
    let mut best = (Vec::new(), Quat::ONE.dist(target));
    if best.1 > eps {
        for h in 1..=max_half.min(MAX_HALF_DEPTH) {
            let cand = search_at(target, h);
            if cand.1 < best.1 {
                best = cand;
            }
            if best.1 <= eps {
                break;
            }
        }
    }
    memo.lock().expect("memo lock").insert(key, best.clone());
    best
}

/// `exp(iθP)` as letters of the frame around `P`.
pub fn approximate_rotation(p: &PauliString, theta: f64, eps: f64, max_half: usize) -> (Vec<PauliString>, f64) {
    let frame = Frame::for_axis(p);
    let (word, d) = approximate(&Quat::rotation(0, theta), eps, max_half);
    (word.iter().map(|&l| frame.letter(l)).collect(), d)
}

/// Same as [`approximate_rotation`] but an error when `eps` is missed.
pub fn rotation_word(p: &PauliString, theta: f64, eps: f64, max_half: usize) -> Result<Vec<PauliString>> {
    let (w, d) = approximate_rotation(p, theta, eps, max_half);
    if d > eps {
        return Err(Error::BudgetExceeded {
            factor: None,
            best: d,
            wanted: eps,
        });
    }
    Ok(w)
}
