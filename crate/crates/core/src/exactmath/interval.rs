use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::{OrderedField, Rational};

use super::quad::QuadExt;

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_quad(&self, x: &QuadExt) -> bool {
        let lo = QuadExt::rational(self.lo.clone());
        let hi = QuadExt::rational(self.hi.clone());
        lo.cmp_exact(x) != Ordering::Greater && x.cmp_exact(&hi) != Ordering::Greater
    }

    /// Sign if the whole interval lies strictly on one side of zero.
    pub fn strict_sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Interval::point(Rational::one());
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    /// Enclosure of `√d` of width at most `10^-digits`.
    pub fn sqrt_enclosure(d: u64, digits: u32) -> Self {
        let scale = BigInt::from(10u32).pow(digits);
        let n = BigInt::from(d) * &scale * &scale;
        let r = n.sqrt();
        let lo = Rational::new(r.clone(), scale.clone());
        let hi = if &r * &r == n { lo.clone() } else { Rational::new(r + 1, scale) };
        Interval { lo, hi }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Self) -> Self {
        Interval { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Self) -> Self {
        Interval { lo: self.lo - rhs.hi, hi: self.hi - rhs.lo }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Self {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Self) -> Self {
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

/// Encloses `q` using a `√d` enclosure.
pub fn enclose_quad(q: &QuadExt, sqrt_d: &Interval) -> Interval {
    Interval::point(q.a().clone()) + Interval::point(q.b().clone()) * sqrt_d.clone()
}
