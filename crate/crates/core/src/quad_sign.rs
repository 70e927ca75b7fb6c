//! Polynomial-time Δ for polynomials of degree at most 2.
//!
//! Repeatedly picks a quadratic term `x_a x_b` and completes the product
//!
//! ```text
//! f = x_a x_b + x_a L_a + x_b L_b + R = (x_a + L_b)(x_b + L_a) + L_a L_b + R
//! ```
//!
//! where `L_a`, `L_b` and `R` do not involve `x_a` or `x_b`. Each step peels off
//! one hyperbolic pair `y y'`; what remains once no quadratic term is left is
//! an affine function. The quadratic part lives in a symmetric bit matrix with
//! zero diagonal, so one step costs O(n²/64) word operations.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2poly::{AffineMap, BoolPoly, DeltaValue, LinearFunctional, Monomial};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    None,
    Linear,
    Constant,
}

/// `Σ_{i<h} y_{2i} y_{2i+1}`, plus `y_{2h}` for a linear tail or `1` for a
/// constant tail, on `n_vars` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticCanonicalForm {
    pub h: usize,
    pub tail: Tail,
    pub n_vars: usize,
}

impl QuadraticCanonicalForm {
    pub fn delta(&self) -> DeltaValue {
        match self.tail {
            Tail::Linear => DeltaValue(BigInt::from(0)),
            Tail::None => DeltaValue(BigInt::from(1) << (self.n_vars - self.h)),
            Tail::Constant => DeltaValue(-(BigInt::from(1) << (self.n_vars - self.h))),
        }
    }

    pub fn to_poly(&self) -> BoolPoly {
        let mut g = BoolPoly::zero(self.n_vars);
        for i in 0..self.h {
            g.toggle(Monomial::new([2 * i, 2 * i + 1]));
        }
        match self.tail {
            Tail::None => {}
            Tail::Linear => g.toggle(Monomial::new([2 * self.h])),
            Tail::Constant => g.toggle(Monomial::one()),
        }
        g
    }
}

struct Quadratic {
    n: usize,
    adj: Vec<BitVec>,
    lin: BitVec,
    constant: bool,
}

impl Quadratic {
    fn from_poly(poly: &BoolPoly) -> Result<Self> {
        if poly.degree() > 2 {
            return Err(Error::Degree {
                degree: poly.degree(),
                max: 2,
            });
        }
        let n = poly.n_vars();
        let mut q = Quadratic {
            n,
            adj: vec![BitVec::zeros(n); n],
            lin: BitVec::zeros(n),
            constant: false,
        };
        for m in poly.monomials() {
            let v: Vec<usize> = m.vars().collect();
            match v[..] {
                [] => q.constant = true,
                [i] => q.lin.set(i, true),
                [i, j] => {
                    q.adj[i].set(j, true);
                    q.adj[j].set(i, true);
                }
                _ => unreachable!(),
            }
        }
        Ok(q)
    }

    fn find_edge(&self) -> Option<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .find_map(|(a, row)| row.first_one().map(|b| (a, b)))
    }

    fn functional(&self, support: &BitVec, var: Option<usize>, constant: bool) -> LinearFunctional {
        let mut coeffs = support.to_bools();
        if let Some(v) = var {
            coeffs[v] ^= true;
        }
        LinearFunctional::new(coeffs, constant)
    }
}

/// Affine change of variables `y = T(x)` and the canonical form `g` such that
/// `f(x) = g(T(x))`. `T` is returned as an [`AffineMap`] giving each `y_k` in
/// terms of `x`, so `g.substitute_affine(&T) == f`.
pub fn canonicalize(poly: &BoolPoly) -> Result<(AffineMap, QuadraticCanonicalForm)> {
    let mut q = Quadratic::from_poly(poly)?;
    let n = q.n;
    let mut rows: Vec<LinearFunctional> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    while let Some((a, b)) = q.find_edge() {
        let mut na = q.adj[a].clone();
        na.set(b, false);
        let mut nb = q.adj[b].clone();
        nb.set(a, false);
        let (la, lb) = (q.lin.get(a), q.lin.get(b));

        // y = x_a + L_b, y' = x_b + L_a
        rows.push(q.functional(&nb, Some(a), lb));
        rows.push(q.functional(&na, Some(b), la));
        used[a] = true;
        used[b] = true;

        // drop every term touching a or b
        q.adj[a] = BitVec::zeros(n);
        q.adj[b] = BitVec::zeros(n);
        for i in na.ones().chain(nb.ones()) {
            q.adj[i].set(a, false);
            q.adj[i].set(b, false);
        }
        q.lin.set(a, false);
        q.lin.set(b, false);

        // add L_a · L_b
        for i in 0..n {
            let (ia, ib) = (na.get(i), nb.get(i));
            if ia {
                q.adj[i].xor_assign(&nb);
            }
            if ib {
                q.adj[i].xor_assign(&na);
            }
            if ia && ib {
                // x_i² = x_i; the two row updates cancelled on the diagonal
                q.adj[i].set(i, false);
                q.lin.flip(i);
            }
        }
        if lb {
            q.lin.xor_assign(&na);
        }
        if la {
            q.lin.xor_assign(&nb);
        }
        q.constant ^= la & lb;
    }

    let h = rows.len() / 2;
    let tail = if let Some(t) = q.lin.first_one() {
        rows.push(q.functional(&q.lin, None, q.constant));
        used[t] = true;
        Tail::Linear
    } else if q.constant {
        Tail::Constant
    } else {
        Tail::None
    };
    for (i, &u) in used.iter().enumerate() {
        if !u {
            rows.push(LinearFunctional::coordinate(n, i));
        }
    }
    Ok((
        AffineMap { n_in: n, rows },
        QuadraticCanonicalForm { h, tail, n_vars: n },
    ))
}

/// Exact Δ of a polynomial of degree ≤ 2 in polynomial time.
pub fn delta_quadratic(poly: &BoolPoly) -> Result<DeltaValue> {
    Ok(canonicalize(poly)?.1.delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2poly::{random_functional, random_poly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(s: &str) -> BoolPoly {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_examples() {
        let (_, c) = canonicalize(&poly("nvars=2\nx1*x2")).unwrap();
        assert_eq!((c.h, c.tail), (1, Tail::None));
        let (_, c) = canonicalize(&poly("nvars=3\nx1*x2 + x3")).unwrap();
        assert_eq!((c.h, c.tail), (1, Tail::Linear));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_quadratic(&poly("nvars=2\nx1*x2")).unwrap(), 2.into());
        assert_eq!(delta_quadratic(&poly("nvars=3\nx1*x2 + x3")).unwrap(), 0.into());
        assert_eq!(delta_quadratic(&poly("nvars=2\nx1*x2 + 1")).unwrap(), (-2).into());
        assert_eq!(delta_quadratic(&BoolPoly::zero(5)).unwrap(), 32.into());
    }

    #[test]
    fn rejects_cubic() {
        assert!(matches!(
            canonicalize(&poly("nvars=3\nx1*x2*x3")),
            Err(Error::Degree { degree: 3, .. })
        ));
    }

    #[test]
    fn substitution_reproduces_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.gen_range(1..=12);
            let terms = rng.gen_range(0..3 * n);
            let f = random_poly(&mut rng, n, 2, terms);
            let (map, c) = canonicalize(&f).unwrap();
            assert!(map.is_invertible());
            assert_eq!(c.to_poly().substitute_affine(&map).unwrap(), f);
        }
    }

    #[test]
    fn agrees_with_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..=10);
            let terms = rng.gen_range(0..2 * n + 2);
            let f = random_poly(&mut rng, n, 2, terms);
            assert_eq!(delta_quadratic(&f).unwrap(), f.delta_bruteforce().unwrap());
        }
    }

    #[test]
    fn invariant_under_affine_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 30 {
            let n = rng.gen_range(1..=8);
            let map = AffineMap {
                n_in: n,
                rows: (0..n).map(|_| random_functional(&mut rng, n)).collect(),
            };
            if !map.is_invertible() {
                continue;
            }
            let f = random_poly(&mut rng, n, 2, 2 * n);
            let g = f.substitute_affine(&map).unwrap();
            assert_eq!(delta_quadratic(&g).unwrap(), delta_quadratic(&f).unwrap());
            assert_eq!(g.delta_bruteforce().unwrap(), f.delta_bruteforce().unwrap());
            checked += 1;
        }
    }
}
