use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{format_rational, parse_rational, rational_to_f64, Field, OrderedField, Rational, Scalar};

/// An element `a + b·√d` of a real quadratic field.
///
/// `d` is kept square-free. Rationals (b = 0) carry `d = 0` so that they can
/// be combined with elements of any field; combining two irrational elements
/// with different `d` is a programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational, d: u64) -> Self {
        if b.is_zero() || d == 0 {
            return Self::rational(a);
        }
        let (k, core) = split_square(d);
        let b = b * Rational::from_integer(BigInt::from(k));
        if core == 1 {
            return Self::rational(a + b);
        }
        QuadExt { a, b, d: core }
    }

    pub fn rational(a: Rational) -> Self {
        QuadExt { a, b: Rational::zero(), d: 0 }
    }

    /// `√d`.
    pub fn sqrt(d: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Square-free radicand, or 0 for a rational value.
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(BigInt::from(self.d))
    }

    fn joint_d(&self, other: &Self) -> u64 {
        match (self.d, other.d) {
            (0, d) | (d, 0) => d,
            (x, y) if x == y => x,
            (x, y) => panic!("mixing Q(sqrt {x}) and Q(sqrt {y})"),
        }
    }

    /// Parses sums of terms like `9/16 - 1/16*sqrt(17)`, `sqrt(3)`, `-2*sqrt(10)`.
    pub fn parse(s: &str) -> Option<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return None;
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        let mut depth = 0i32;
        for i in 0..bytes.len() {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && i > start => {
                    terms.push(&s[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut acc = QuadExt::zero();
        for t in terms {
            acc = acc + parse_term(t)?;
        }
        Some(acc)
    }
}

fn parse_term(t: &str) -> Option<QuadExt> {
    let (sign, body) = match t.as_bytes().first()? {
        b'+' => (1, &t[1..]),
        b'-' => (-1, &t[1..]),
        _ => (1, t),
    };
    let sign = Rational::from_integer(BigInt::from(sign));
    if let Some(pos) = body.find("sqrt(") {
        let close = body[pos..].find(')')? + pos;
        let d: u64 = body[pos + 5..close].parse().ok()?;
        let before = body[..pos].trim_end_matches('*');
        let after = &body[close + 1..];
        let mut coeff = if before.is_empty() { Rational::one() } else { parse_rational(before)? };
        if let Some(den) = after.strip_prefix('/') {
            coeff = coeff / parse_rational(den)?;
        } else if !after.is_empty() {
            return None;
        }
        Some(QuadExt::new(Rational::zero(), sign * coeff, d))
    } else {
        Some(QuadExt::rational(sign * parse_rational(body)?))
    }
}

/// Writes `d = k²·core` with `core` square-free.
fn split_square(d: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut core = d;
    let mut p = 2u64;
    while p * p <= core {
        while core % (p * p) == 0 {
            core /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, core)
}

pub fn is_square_free(d: u64) -> bool {
    d > 0 && split_square(d).0 == 1
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", format_rational(&self.a));
        }
        let b_abs = format_rational(&self.b.abs());
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{b_abs}*sqrt({})", self.d)
        } else {
            write!(f, "{} {sign} {b_abs}*sqrt({})", format_rational(&self.a), self.d)
        }
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::rational(Rational::one())
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: Self) -> Self {
        let d = self.joint_d(&rhs);
        QuadExt::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: Self) -> Self {
        let d = self.joint_d(&rhs);
        QuadExt::new(self.a - rhs.a, self.b - rhs.b, d)
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: Self) -> Self {
        let d = self.joint_d(&rhs);
        let dd = Rational::from_integer(BigInt::from(d));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dd;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadExt::new(a, b, d)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> Self {
        QuadExt { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero in quadratic field");
        let num = self * rhs.conj();
        QuadExt::new(num.a / &n, num.b / &n, num.d)
    }
}

impl Scalar for QuadExt {
    fn from_rational(r: &Rational) -> Self {
        QuadExt::rational(r.clone())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * (self.d as f64).sqrt()
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.to_f64().abs().max(f64::MIN_POSITIVE)
        }
    }
}

impl Field for QuadExt {}

impl OrderedField for QuadExt {
    fn sign(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        if sb == Ordering::Equal {
            return sa;
        }
        if sa != Ordering::Less && sb == Ordering::Greater {
            return Ordering::Greater;
        }
        if sa != Ordering::Greater && sb == Ordering::Less {
            return Ordering::Less;
        }
        // opposite signs: the larger of a² and b²d wins
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("sqrt of a square-free d is irrational"),
        }
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::rational(r)
    }
}

/// JSON shape `{a, b, d}` with rationals as strings.
#[derive(Serialize, Deserialize)]
struct QuadRepr {
    a: String,
    b: String,
    d: u64,
}

impl Serialize for QuadExt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuadRepr { a: format_rational(&self.a), b: format_rational(&self.b), d: self.d }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = QuadRepr::deserialize(de)?;
        let a = parse_rational(&r.a).ok_or_else(|| serde::de::Error::custom("bad rational a"))?;
        let b = parse_rational(&r.b).ok_or_else(|| serde::de::Error::custom("bad rational b"))?;
        if !b.is_zero() && !is_square_free(r.d) {
            return Err(serde::de::Error::custom("d must be square-free"));
        }
        Ok(QuadExt::new(a, b, r.d))
    }
}
