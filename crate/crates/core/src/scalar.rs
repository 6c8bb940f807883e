//! Scalar abstractions shared by the polynomial, matrix and certificate code.
//!
//! Everything numeric in this crate is written against three layered traits:
//! [`Scalar`] (a commutative ring that can absorb rational constants),
//! [`Field`] (adds division) and [`OrderedField`] (adds an exact sign).
//! Exact types ([`Rational`], [`QuadExt`](crate::QuadExt),
//! [`NfElem`](crate::NfElem)) and the primitive floats all implement them, so
//! the same code path evaluates a blowup polynomial exactly or in `f64`.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Embeds a rational constant.
    fn from_rational(r: &Rational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    /// Nearest `f64`; exact types may round.
    fn to_f64(&self) -> f64;

    /// Size used to pick elimination pivots. Only needs to be zero exactly
    /// when the value is zero.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

pub trait Field: Scalar + Div<Output = Self> {
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

pub trait OrderedField: Field {
    /// Exact sign for exact types; IEEE comparison against zero for floats.
    fn sign(&self) -> Ordering;

    fn cmp_exact(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign()
    }

    fn is_negative_exact(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn abs_exact(&self) -> Self {
        if self.is_negative_exact() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            // Never report an exact nonzero as zero, even when it underflows.
            rational_to_f64(&self.abs()).max(f64::MIN_POSITIVE)
        }
    }
}

impl Field for Rational {}

impl OrderedField for Rational {
    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {
        $(
            impl Scalar for $t {
                fn from_rational(r: &Rational) -> Self {
                    rational_to_f64(r) as $t
                }
                fn to_f64(&self) -> f64 {
                    *self as f64
                }
            }

            impl Field for $t {}

            impl OrderedField for $t {
                fn sign(&self) -> Ordering {
                    self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
                }
            }
        )*
    };
}

impl_float_scalar!(f32, f64);

/// Converts a rational to the nearest `f64`, staying finite for huge
/// numerators and denominators where `BigRational::to_f64` would overflow.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    // scale so that the quotient has ~60 significant bits
    let scaled = if shift > 60 {
        Rational::new(n.clone(), d.clone() << (shift - 60) as usize)
    } else {
        Rational::new(n.clone() << (60 - shift) as usize, d.clone())
    };
    let q = ToPrimitive::to_f64(&scaled.to_integer()).unwrap_or(0.0);
    q * 2f64.powi((shift - 60) as i32)
}

/// Best rational approximation with denominator exactly `denom`.
pub fn round_to_denominator(x: f64, denom: u64) -> Rational {
    let scaled = (x * denom as f64).round();
    let numer = BigInt::from(scaled as i128);
    Rational::new(numer, BigInt::from(denom))
}

/// Converts a finite `f64` into the exactly equal rational.
pub fn f64_to_rational_exact(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `"p"`, `"p/q"` or a plain decimal like `"0.25"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_val: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        let mag = int_part.abs() * &scale + frac_val;
        let numer = if neg { -mag } else { mag };
        return Some(Rational::new(numer, scale));
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// `"p/q"` or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

pub fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}
