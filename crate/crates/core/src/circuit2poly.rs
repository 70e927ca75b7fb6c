//! Straight-line circuits over {AND, XOR} and the reduction of a pair of
//! counting circuits to one polynomial of degree at most 4.
//!
//! For a fixed `x`, each assignment `z_k := a * b` becomes the equation
//! `Z_k = z_k + a*b = 0`. Gluing the equations with fresh multipliers `v_k`,
//!
//! ```text
//! F(y, z, v) = Σ_k v_k Z_k + v_0 (z_s + 1),
//! ```
//!
//! gives `Δ F = 2^{s+1} · #{y : Q(x, y) = 1}`: every assignment violating one
//! of the `s + 1` equations is balanced in the corresponding `v`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::f2poly::{BoolPoly, Monomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operand {
    X(usize),
    Y(usize),
    /// Earlier auxiliary variable, 0-based (`Z(0)` is `z1`).
    Z(usize),
    Const(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    And,
    Xor,
}

/// `z_{k+1} := a op b` for the assignment at position `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub op: Op,
    pub a: Operand,
    pub b: Operand,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraightLineCircuit {
    n_x: usize,
    n_y: usize,
    assignments: Vec<Assignment>,
}

impl StraightLineCircuit {
    pub fn new(n_x: usize, n_y: usize, assignments: Vec<Assignment>) -> Result<Self> {
        if assignments.is_empty() {
            return input("a circuit needs at least one assignment");
        }
        for (k, asg) in assignments.iter().enumerate() {
            for op in [asg.a, asg.b] {
                let ok = match op {
                    Operand::X(i) => i < n_x,
                    Operand::Y(i) => i < n_y,
                    Operand::Z(i) => i < k,
                    Operand::Const(_) => true,
                };
                if !ok {
                    return input(format!("assignment z{} uses an undefined operand {op:?}", k + 1));
                }
            }
        }
        Ok(StraightLineCircuit {
            n_x,
            n_y,
            assignments,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// Number of assignments `s`; the output is `z_s`.
    pub fn size(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn simulate(&self, x: &[bool], y: &[bool]) -> Result<bool> {
        if x.len() != self.n_x || y.len() != self.n_y {
            return input(format!(
                "circuit expects x:{} y:{}, got x:{} y:{}",
                self.n_x,
                self.n_y,
                x.len(),
                y.len()
            ));
        }
        let mut z = Vec::with_capacity(self.assignments.len());
        for asg in &self.assignments {
            let val = |o: Operand| match o {
                Operand::X(i) => x[i],
                Operand::Y(i) => y[i],
                Operand::Z(i) => z[i],
                Operand::Const(c) => c,
            };
            let (a, b) = (val(asg.a), val(asg.b));
            z.push(match asg.op {
                Op::And => a & b,
                Op::Xor => a ^ b,
            });
        }
        Ok(*z.last().expect("non-empty circuit"))
    }

    /// `#{y : Q(x, y) = 1}` by exhaustive simulation.
    pub fn count_solutions(&self, x: &[bool]) -> Result<u64> {
        if self.n_y > 30 {
            return Err(Error::TooLarge {
                what: "solution count",
                n: self.n_y,
                cutoff: 30,
            });
        }
        let mut count = 0;
        for mask in 0u64..1 << self.n_y {
            let y: Vec<bool> = (0..self.n_y).map(|i| mask >> i & 1 == 1).collect();
            count += self.simulate(x, &y)? as u64;
        }
        Ok(count)
    }

    /// Appends copies `z_{k+1} := z_k XOR 0` until the size is `s`; the output
    /// value is unchanged.
    pub fn padded_to(&self, s: usize) -> Self {
        let mut out = self.clone();
        while out.assignments.len() < s {
            let last = out.assignments.len() - 1;
            out.assignments.push(Assignment {
                op: Op::Xor,
                a: Operand::Z(last),
                b: Operand::Const(false),
            });
        }
        out
    }

    /// Variable layout of [`Self::indicator_poly`]: y, z, v_1..v_s, v_0.
    pub fn indicator_vars(&self) -> usize {
        self.n_y + 2 * self.size() + 1
    }

    /// `F_x(y, z, v) = Σ_{k=1..s} v_k (z_k + a_k * b_k) + v_0 (z_s + 1)`.
    pub fn indicator_poly(&self, x: &[bool]) -> Result<BoolPoly> {
        if x.len() != self.n_x {
            return input(format!("expected {} x bits, got {}", self.n_x, x.len()));
        }
        let s = self.size();
        let n = self.indicator_vars();
        let z = |k: usize| self.n_y + k;
        let v = |k: usize| self.n_y + s + k;
        let v0 = self.n_y + 2 * s;
        let operand = |o: Operand| -> BoolPoly {
            match o {
                Operand::X(i) if x[i] => BoolPoly::one(n),
                Operand::X(_) | Operand::Const(false) => BoolPoly::zero(n),
                Operand::Const(true) => BoolPoly::one(n),
                Operand::Y(i) => BoolPoly::var(n, i),
                Operand::Z(k) => BoolPoly::var(n, z(k)),
            }
        };
        let mut f = BoolPoly::zero(n);
        for (k, asg) in self.assignments.iter().enumerate() {
            let (a, b) = (operand(asg.a), operand(asg.b));
            let mut eq = match asg.op {
                Op::And => a.mul(&b),
                Op::Xor => a.add(&b),
            };
            eq.toggle(Monomial::new([z(k)]));
            f.add_assign(&eq.mul_monomial(&Monomial::new([v(k)])));
        }
        f.toggle(Monomial::new([v0, z(s - 1)]));
        f.toggle(Monomial::new([v0]));
        Ok(f)
    }
}

/// The constant `C` in `Δ F_x = C · #{y : Q(x, y)}` for a circuit of size `s`.
pub fn indicator_scale(s: usize) -> BigInt {
    BigInt::from(1) << (s + 1)
}

/// Two circuits with equal input shapes, padded to equal size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitPair {
    pub q1: StraightLineCircuit,
    pub q2: StraightLineCircuit,
}

impl CircuitPair {
    pub fn new(q1: StraightLineCircuit, q2: StraightLineCircuit) -> Result<Self> {
        if q1.n_x != q2.n_x || q1.n_y != q2.n_y {
            return input(format!(
                "circuit shapes differ: x:{} y:{} vs x:{} y:{}",
                q1.n_x, q1.n_y, q2.n_x, q2.n_y
            ));
        }
        let s = q1.size().max(q2.size());
        Ok(CircuitPair {
            q1: q1.padded_to(s),
            q2: q2.padded_to(s),
        })
    }

    pub fn swapped(&self) -> Self {
        CircuitPair {
            q1: self.q2.clone(),
            q2: self.q1.clone(),
        }
    }

    /// `#{y : Q1} − #{y : Q2}` by simulation.
    pub fn gap(&self, x: &[bool]) -> Result<i64> {
        Ok(self.q1.count_solutions(x)? as i64 - self.q2.count_solutions(x)? as i64)
    }
}

/// `F_x = (1 + w) F¹_x + w (1 + F²_x)` over the shared (y, z, v) variables and
/// one more variable `w` (the last one). `Δ F_x = Δ F¹_x − Δ F²_x`.
pub fn reduce_to_deg4(pair: &CircuitPair, x: &[bool]) -> Result<BoolPoly> {
    if pair.q1.size() != pair.q2.size() || pair.q1.n_y != pair.q2.n_y || pair.q1.n_x != pair.q2.n_x
    {
        return input("circuit pair is not padded to a common shape");
    }
    let n = pair.q1.indicator_vars();
    let f1 = pair.q1.indicator_poly(x)?.with_n_vars(n + 1)?;
    let f2 = pair.q2.indicator_poly(x)?.with_n_vars(n + 1)?;
    let w = Monomial::new([n]);
    let mut out = f1.clone();
    out.add_assign(&f1.mul_monomial(&w));
    out.add_assign(&f2.mul_monomial(&w));
    out.toggle(w);
    Ok(out)
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::X(i) => write!(f, "x{}", i + 1),
            Operand::Y(i) => write!(f, "y{}", i + 1),
            Operand::Z(i) => write!(f, "z{}", i + 1),
            Operand::Const(c) => write!(f, "{}", *c as u8),
        }
    }
}

impl fmt::Display for StraightLineCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs x:{} y:{}", self.n_x, self.n_y)?;
        for (k, a) in self.assignments.iter().enumerate() {
            let op = match a.op {
                Op::And => "AND",
                Op::Xor => "XOR",
            };
            writeln!(f, "z{} = {} {} {}", k + 1, a.a, op, a.b)?;
        }
        writeln!(f, "output z{}", self.size())
    }
}

fn parse_operand(tok: &str) -> Option<Operand> {
    match tok {
        "0" => return Some(Operand::Const(false)),
        "1" => return Some(Operand::Const(true)),
        _ => {}
    }
    let (kind, idx) = tok.split_at(1);
    let k: usize = idx.parse().ok().filter(|&k| k >= 1)?;
    match kind {
        "x" => Some(Operand::X(k - 1)),
        "y" => Some(Operand::Y(k - 1)),
        "z" => Some(Operand::Z(k - 1)),
        _ => None,
    }
}

impl FromStr for StraightLineCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut shape: Option<(usize, usize)> = None;
        let mut assignments = Vec::new();
        let mut output: Option<usize> = None;
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if shape.is_none() {
                let (Some(&"inputs"), Some(xs), Some(ys), 3) =
                    (toks.first(), toks.get(1), toks.get(2), toks.len())
                else {
                    return Err(perr("expected `inputs x:<n> y:<n>`".into()));
                };
                let count = |t: &str, p: &str| t.strip_prefix(p).and_then(|c| c.parse().ok());
                match (count(xs, "x:"), count(ys, "y:")) {
                    (Some(nx), Some(ny)) => shape = Some((nx, ny)),
                    _ => return Err(perr("expected `inputs x:<n> y:<n>`".into())),
                }
                continue;
            }
            if output.is_some() {
                return Err(perr("content after the output line".into()));
            }
            if toks[0] == "output" {
                let k = toks
                    .get(1)
                    .and_then(|t| parse_operand(t))
                    .and_then(|o| match o {
                        Operand::Z(k) => Some(k),
                        _ => None,
                    })
                    .ok_or_else(|| perr("expected `output z<s>`".into()))?;
                output = Some(k);
                continue;
            }
            if toks.len() != 5 || toks[1] != "=" {
                return Err(perr("expected `z<k> = <a> <AND|XOR> <b>`".into()));
            }
            match parse_operand(toks[0]) {
                Some(Operand::Z(k)) if k == assignments.len() => {}
                _ => {
                    return Err(perr(format!(
                        "expected target z{}, found `{}`",
                        assignments.len() + 1,
                        toks[0]
                    )))
                }
            }
            let op = match toks[3] {
                "AND" => Op::And,
                "XOR" => Op::Xor,
                other => return Err(perr(format!("unknown operator `{other}`"))),
            };
            let a = parse_operand(toks[2]).ok_or_else(|| perr(format!("bad operand `{}`", toks[2])))?;
            let b = parse_operand(toks[4]).ok_or_else(|| perr(format!("bad operand `{}`", toks[4])))?;
            assignments.push(Assignment { op, a, b });
        }
        let (n_x, n_y) = shape.ok_or(Error::Parse {
            line: 0,
            msg: "missing `inputs` header".into(),
        })?;
        match output {
            Some(k) if k + 1 == assignments.len() => {}
            Some(k) => {
                return input(format!(
                    "output must be the last variable z{}, found z{}",
                    assignments.len(),
                    k + 1
                ))
            }
            None => return input("missing `output z<s>` line"),
        }
        StraightLineCircuit::new(n_x, n_y, assignments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(s: &str) -> StraightLineCircuit {
        s.parse().unwrap()
    }

    #[test]
    fn simulate_examples() {
        let c = circuit("inputs x:1 y:1\nz1 = x1 AND y1\noutput z1");
        assert!(c.simulate(&[true], &[true]).unwrap());
        let c = circuit("inputs x:1 y:1\nz1 = x1 XOR y1\noutput z1");
        assert!(!c.simulate(&[true], &[true]).unwrap());
        let c = circuit("inputs x:1 y:2\nz1 = x1 AND y1\nz2 = z1 XOR y2\noutput z2");
        assert!(!c.simulate(&[true], &[true, true]).unwrap());
        assert!(c.simulate(&[true], &[true]).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!("z1 = y1 AND y1\noutput z1".parse::<StraightLineCircuit>().is_err());
        assert!("inputs x:0 y:1\nz1 = y2 AND y1\noutput z1"
            .parse::<StraightLineCircuit>()
            .is_err());
        assert!("inputs x:0 y:1\nz2 = y1 AND y1\noutput z2"
            .parse::<StraightLineCircuit>()
            .is_err());
        assert!("inputs x:0 y:1\nz1 = y1 OR y1\noutput z1"
            .parse::<StraightLineCircuit>()
            .is_err());
        assert!("inputs x:0 y:1\nz1 = y1 AND z1\noutput z1"
            .parse::<StraightLineCircuit>()
            .is_err());
        assert!("inputs x:0 y:1\nz1 = y1 AND y1\nz2 = z1 XOR 1\noutput z1"
            .parse::<StraightLineCircuit>()
            .is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "inputs x:1 y:2\nz1 = x1 AND y1\nz2 = z1 XOR 1\nz3 = z2 AND y2\noutput z3\n";
        assert_eq!(circuit(text).to_string(), text);
    }

    #[test]
    fn indicator_examples() {
        let c = circuit("inputs x:0 y:1\nz1 = y1 AND y1\noutput z1");
        let f = c.indicator_poly(&[]).unwrap();
        assert!(f.degree() <= 3);
        assert_eq!(f.delta_bruteforce().unwrap().0, indicator_scale(1));

        let zero = circuit("inputs x:0 y:2\nz1 = y1 XOR y1\noutput z1");
        assert_eq!(zero.indicator_poly(&[]).unwrap().delta_bruteforce().unwrap(), 0.into());

        let one = circuit("inputs x:0 y:2\nz1 = y1 XOR y1\nz2 = z1 XOR 1\noutput z2");
        let d = one.indicator_poly(&[]).unwrap().delta_bruteforce().unwrap().0;
        assert_eq!(d, indicator_scale(2) * 4);
    }

    #[test]
    fn padding_keeps_the_count() {
        let c = circuit("inputs x:1 y:2\nz1 = x1 AND y1\nz2 = z1 XOR y2\noutput z2");
        let p = c.padded_to(5);
        assert_eq!(p.size(), 5);
        for x in [false, true] {
            assert_eq!(c.count_solutions(&[x]).unwrap(), p.count_solutions(&[x]).unwrap());
            let d = p.indicator_poly(&[x]).unwrap().delta_bruteforce().unwrap().0;
            assert_eq!(d, indicator_scale(5) * p.count_solutions(&[x]).unwrap());
        }
    }

    #[test]
    fn deg4_examples() {
        // Q1 accepts y ∈ {0, 1}, Q2 accepts y = 1 only
        let q1 = circuit("inputs x:0 y:1\nz1 = y1 XOR y1\nz2 = z1 XOR 1\noutput z2");
        let q2 = circuit("inputs x:0 y:1\nz1 = y1 AND 1\noutput z1");
        let pair = CircuitPair::new(q1.clone(), q2).unwrap();
        let f = reduce_to_deg4(&pair, &[]).unwrap();
        assert!(f.degree() <= 4);
        let d = f.delta_bruteforce().unwrap();
        assert_eq!(d.signum(), 1);
        assert_eq!(d.0, indicator_scale(2) * pair.gap(&[]).unwrap());
        let swapped = reduce_to_deg4(&pair.swapped(), &[]).unwrap();
        assert_eq!(swapped.delta_bruteforce().unwrap().0, -d.0);

        let same = CircuitPair::new(q1.clone(), q1).unwrap();
        assert_eq!(reduce_to_deg4(&same, &[]).unwrap().delta_bruteforce().unwrap(), 0.into());
    }

    #[test]
    fn shape_mismatch() {
        let a = circuit("inputs x:0 y:1\nz1 = y1 AND y1\noutput z1");
        let b = circuit("inputs x:0 y:2\nz1 = y1 AND y2\noutput z1");
        assert!(CircuitPair::new(a, b).is_err());
    }
}
