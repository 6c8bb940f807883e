use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{format_rational, Field, OrderedField, Rational, Scalar};

/// Dense univariate polynomial, coefficients lowest degree first, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> UPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(c: T, deg: usize) -> Self {
        let mut v = vec![T::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Evaluates in any ring that the coefficients embed into.
    pub fn eval_in<S: Scalar>(&self, x: &S, embed: impl Fn(&T) -> S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + embed(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * other.clone() + Self::constant(c.clone());
        }
        acc
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> UPoly<S> {
        UPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Field> UPoly<T> {
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree().unwrap();
        let lead_inv = divisor.lead().inv();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * lead_inv.clone();
            if !c.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].clone() - c.clone() * dc.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn square_free_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }
}

impl<T: Scalar> Add for UPoly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for UPoly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Neg for UPoly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<T: Scalar> Mul for UPoly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl fmt::Display for UPoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if !first {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let a = format_rational(&c.abs());
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*x")?,
                _ => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl UPoly<Rational> {
    /// Scales to integer coefficients with content 1 and positive leading
    /// coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if self.lead().is_negative() { -BigInt::one() } else { BigInt::one() };
        Self::new(ints.into_iter().map(|c| Rational::from_integer(c / &g * &sign)).collect())
    }

    /// Canonical Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return seq;
        }
        seq.push(d);
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            // positive rescaling keeps the sign pattern and the numbers small
            let neg = -r;
            let scaled = neg.primitive();
            seq.push(if scaled.lead().sign() == neg.lead().sign() { scaled } else { -scaled });
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    /// `lo` must not be a root.
    pub fn count_roots_in(&self, lo: &Rational, hi: &Rational) -> usize {
        let sf = self.square_free_part();
        let seq = sf.sturm_sequence();
        let va = sign_variations(&seq, lo);
        let vb = sign_variations(&seq, hi);
        va.saturating_sub(vb)
    }

    /// Cauchy bound: every real root lies strictly inside `(-b, b)`.
    pub fn root_bound(&self) -> Rational {
        let lead = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }

    /// Isolates every real root in the closed box `[lo, hi]`.
    pub fn isolate_roots(&self, lo: &Rational, hi: &Rational) -> Vec<RootInterval> {
        assert!(!self.is_zero(), "zero polynomial has no isolated roots");
        let sf = self.square_free_part().primitive();
        if sf.degree() == Some(0) {
            return Vec::new();
        }
        let seq = sf.sturm_sequence();
        let mut out = Vec::new();
        if sf.eval(lo).is_zero() {
            out.push(RootInterval::Exact(lo.clone()));
        }
        let mut stack = vec![(lo.clone(), hi.clone())];
        while let Some((a, b)) = stack.pop() {
            let n = sign_variations(&seq, &a).saturating_sub(sign_variations(&seq, &b));
            match n {
                0 => {}
                1 => {
                    if sf.eval(&b).is_zero() {
                        out.push(RootInterval::Exact(b));
                    } else {
                        out.push(RootInterval::Open { lo: a, hi: b });
                    }
                }
                _ => {
                    let m = split_point(&sf, &a, &b);
                    stack.push((a, m.clone()));
                    stack.push((m, b));
                }
            }
        }
        out.sort_by(|x, y| x.lo().cmp(y.lo()));
        out
    }

    pub fn real_roots(&self) -> Vec<RootInterval> {
        let b = self.root_bound();
        self.isolate_roots(&-b.clone(), &b)
    }

    /// Exact sign of the polynomial at a rational point.
    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).sign()
    }
}

fn sign_variations(seq: &[UPoly<Rational>], x: &Rational) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for p in seq {
        let s = p.eval(x).sign();
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// A point strictly between `a` and `b` that is not a root, near the middle.
fn split_point(p: &UPoly<Rational>, a: &Rational, b: &Rational) -> Rational {
    let w = b - a;
    for den in 2i64.. {
        for num in [den / 2, den / 2 + 1, (den - 1) / 2] {
            if num <= 0 || num >= den {
                continue;
            }
            let m = a + &w * Rational::new(BigInt::from(num), BigInt::from(den));
            if !p.eval(&m).is_zero() {
                return m;
            }
        }
    }
    unreachable!()
}

/// A real root located either exactly or in `(lo, hi]` as the only root.
#[derive(Clone, Debug, PartialEq)]
pub enum RootInterval {
    Exact(Rational),
    Open { lo: Rational, hi: Rational },
}

impl RootInterval {
    pub fn lo(&self) -> &Rational {
        match self {
            RootInterval::Exact(r) => r,
            RootInterval::Open { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            RootInterval::Exact(r) => r,
            RootInterval::Open { hi, .. } => hi,
        }
    }

    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn rp(c: &[i64]) -> UPoly<Rational> {
        UPoly::from_i64(c)
    }

    #[test]
    fn division_and_gcd() {
        let a = rp(&[-1, 0, 1]); // x² − 1
        let b = rp(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, rp(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&rp(&[-1, 1])), rp(&[-1, 1]));
    }

    #[test]
    fn square_free_of_cube() {
        let p = rp(&[-1, 2]);
        let cube = p.clone() * p.clone() * p;
        assert_eq!(cube.square_free_part(), rp(&[-1, 2]).monic());
        let roots = cube.real_roots();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].lo() < &rat(1, 2) && &rat(1, 2) <= roots[0].hi());
    }

    #[test]
    fn two_roots_in_unit_interval() {
        let p = rp(&[3, -14, 14]);
        let roots = p.isolate_roots(&int(0), &int(1));
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(p.count_roots_in(r.lo(), r.hi()), 1);
        }
    }

    #[test]
    fn compose_and_derivative() {
        let p = rp(&[0, 0, 1]);
        let q = rp(&[1, 1]);
        assert_eq!(p.compose(&q), rp(&[1, 2, 1]));
        assert_eq!(rp(&[5]).derivative(), UPoly::zero());
        assert_eq!(rp(&[1, 2, 3]).derivative(), rp(&[2, 6]));
    }

    #[test]
    fn display() {
        assert_eq!(rp(&[3, -14, 14]).to_string(), "14*x^2 - 14*x + 3");
    }
}
