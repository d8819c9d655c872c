//! Ordinal arithmetic below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a strictly decreasing list of `(exponent, coefficient)`
//! terms denoting `w^e1*c1 + ... + w^ek*ck`; the empty list is `0`.
//! Comparison, (left-absorbing) addition, right multiplication by naturals,
//! `w^-` powers, fundamental sequences of limits, point derivative ranks and
//! interval normal forms are all exact. The text syntax `w^(E)*c + ... + k`
//! round-trips through [`std::fmt::Display`] and [`std::str::FromStr`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// An ordinal below epsilon-zero, kept in Cantor normal form.
///
/// Invariants: exponents strictly decrease along the term list and every
/// coefficient is at least one. Both are maintained by construction; the
/// parser rejects text that breaks them instead of normalizing silently.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ordinal {
    /// `(exponent, coefficient)` pairs, exponents strictly decreasing.
    terms: Vec<(Ordinal, BigUint)>,
}

impl Ordinal {
    /// The ordinal `0`.
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    /// The ordinal `1`.
    pub fn one() -> Self {
        Ordinal::from_nat(1u32)
    }

    /// The first infinite ordinal.
    pub fn omega() -> Self {
        Ordinal::omega_power(&Ordinal::one())
    }

    /// A finite ordinal.
    pub fn from_nat(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![(Ordinal::zero(), n)],
            }
        }
    }

    /// `w^a` as a single-term normal form.
    pub fn omega_power(a: &Ordinal) -> Self {
        Ordinal {
            terms: vec![(a.clone(), BigUint::one())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The natural-number value, when the ordinal is finite.
    pub fn as_nat(&self) -> Option<&BigUint> {
        match self.terms.as_slice() {
            [] => None, // zero is handled by the caller when it cares
            [(e, c)] if e.is_zero() => Some(c),
            _ => None,
        }
    }

    /// Finite ordinals are the empty sum and sums with a single zero-exponent term.
    pub fn is_finite(&self) -> bool {
        self.is_zero() || self.as_nat().is_some()
    }

    /// A limit ordinal: nonzero with every term infinite-valued
    /// (equivalently, the last exponent is nonzero).
    pub fn is_limit(&self) -> bool {
        match self.terms.last() {
            Some((e, _)) => !e.is_zero(),
            None => false,
        }
    }

    /// A successor ordinal: nonzero and not a limit.
    pub fn is_successor(&self) -> bool {
        !self.is_zero() && !self.is_limit()
    }

    /// The ordinal sum `self + other` (left terms below the leading
    /// exponent of `other` are absorbed).
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some((lead, lead_coeff)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, BigUint)> = Vec::new();
        let mut merged = lead_coeff.clone();
        for (e, c) in &self.terms {
            match e.cmp(lead) {
                Ordering::Greater => terms.push((e.clone(), c.clone())),
                Ordering::Equal => merged += c,
                Ordering::Less => break,
            }
        }
        terms.push((lead.clone(), merged));
        terms.extend(other.terms[1..].iter().cloned());
        Ordinal { terms }
    }

    /// Add a natural number on the right.
    pub fn add_nat(&self, n: impl Into<BigUint>) -> Ordinal {
        self.add(&Ordinal::from_nat(n))
    }

    /// The ordinal product `self * n` for a natural `n`: the leading
    /// coefficient scales and the tail is kept once.
    pub fn nat_mul(&self, n: impl Into<BigUint>) -> Ordinal {
        let n = n.into();
        if n.is_zero() || self.is_zero() {
            return Ordinal::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].1 = &terms[0].1 * n;
        Ordinal { terms }
    }

    /// The predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor is nonzero");
        if last.1.is_one() {
            terms.pop();
        } else {
            last.1 -= BigUint::one();
        }
        Some(Ordinal { terms })
    }

    /// The `n`-th entry of the fixed fundamental sequence of a limit
    /// ordinal: for `d + w^(g+1)` it is `d + w^g*(n+1)`, and for
    /// `d + w^g` with `g` a limit it is `d + w^(g[n])`. The sequence is
    /// strictly increasing in `n` with supremum the input.
    pub fn fundamental_sequence(&self, n: u64) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.to_string()));
        }
        let (last_e, last_c) = self.terms.last().expect("limit is nonzero");
        let mut terms: Vec<(Ordinal, BigUint)> = self.terms[..self.terms.len() - 1].to_vec();
        if !last_c.is_one() {
            terms.push((last_e.clone(), last_c - BigUint::one()));
        }
        if let Some(gamma) = last_e.pred() {
            terms.push((gamma, BigUint::from(n) + BigUint::one()));
        } else {
            let inner = last_e.fundamental_sequence(n)?;
            terms.push((inner, BigUint::one()));
        }
        Ok(Ordinal { terms })
    }

    /// The derivative rank of the point `self >= 1` inside any ordinal
    /// interval containing it: the exponent of the last normal-form term,
    /// i.e. the order of the last derived set that still contains the point.
    pub fn point_rank(&self) -> Result<Ordinal> {
        match self.terms.last() {
            Some((e, _)) => Ok(e.clone()),
            None => Err(Error::ZeroOrdinal),
        }
    }

    /// The normal form of the interval `[1, self]` as a topological space:
    /// the unique `(alpha, m)` with the interval homeomorphic to
    /// `[1, w^alpha * m]`, together with the height `alpha + 1`.
    pub fn interval_form(&self) -> Result<IntervalForm> {
        match self.terms.first() {
            Some((e, c)) => Ok(IntervalForm {
                exponent: e.clone(),
                multiplicity: c.clone(),
                height: e.add(&Ordinal::one()),
            }),
            None => Err(Error::ZeroOrdinal),
        }
    }
}

/// Result of [`Ordinal::interval_form`]: `[1, gamma]` is homeomorphic to
/// `[1, w^exponent * multiplicity]` and has height `exponent + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalForm {
    pub exponent: Ordinal,
    pub multiplicity: BigUint,
    pub height: Ordinal,
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        // Term-lexicographic comparison is the ordinal order on normal forms;
        // a missing term means the smaller ordinal.
        for i in 0.. {
            return match (self.terms.get(i), other.terms.get(i)) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some((e1, c1)), Some((e2, c2))) => match e1.cmp(e2).then_with(|| c1.cmp(c2)) {
                    Ordering::Equal => continue,
                    other => other,
                },
            };
        }
        unreachable!()
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            if e == &Ordinal::one() {
                write!(f, "w")?;
            } else if let Some(n) = e.as_nat() {
                write!(f, "w^{n}")?;
            } else if e == &Ordinal::omega() {
                write!(f, "w^w")?;
            } else {
                write!(f, "w^({e})")?;
            }
            if !c.is_one() {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, detail: impl Into<String>) -> Error {
        Error::Parse {
            what: "ordinal",
            detail: format!("{} at byte {}", detail.into(), self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        if self.bytes[start] == b'0' && self.pos > start + 1 {
            return Err(self.err("leading zero"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string"))
    }

    /// One `w^E*c` / `w` / `k` term.
    fn term(&mut self) -> Result<(Ordinal, BigUint)> {
        if self.eat(b'w') {
            let exponent = if self.eat(b'^') {
                if self.eat(b'(') {
                    let e = self.ordinal()?;
                    self.skip_ws();
                    if !self.eat(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    e
                } else if self.eat(b'w') {
                    Ordinal::omega()
                } else {
                    Ordinal::from_nat(self.nat()?)
                }
            } else {
                Ordinal::one()
            };
            let coeff = if self.eat(b'*') {
                self.nat()?
            } else {
                BigUint::one()
            };
            if coeff.is_zero() {
                return Err(self.err("zero coefficient"));
            }
            Ok((exponent, coeff))
        } else {
            let n = self.nat()?;
            if n.is_zero() {
                return Err(self.err("'0' is only valid on its own"));
            }
            Ok((Ordinal::zero(), n))
        }
    }

    fn ordinal(&mut self) -> Result<Ordinal> {
        self.skip_ws();
        // Bare zero, not followed by more digits or terms.
        if self.peek() == Some(b'0') {
            let mark = self.pos;
            self.pos += 1;
            let next = self.peek();
            if !next.is_some_and(|b| b.is_ascii_digit()) {
                return Ok(Ordinal::zero());
            }
            self.pos = mark;
        }
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            if !self.eat(b'+') {
                break;
            }
            self.skip_ws();
            let term = self.term()?;
            let prev = &terms.last().expect("nonempty").0;
            if term.0.cmp(prev) != Ordering::Less {
                return Err(self.err("exponents must strictly decrease"));
            }
            terms.push(term);
        }
        Ok(Ordinal { terms })
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let value = p.ordinal()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input"));
        }
        Ok(value)
    }
}

impl TryFrom<String> for Ordinal {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Ordinal> for String {
    fn from(o: Ordinal) -> String {
        o.to_string()
    }
}
