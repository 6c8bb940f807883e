use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::matrix::Matrix;
use super::poly::Poly;
use super::quad::QuadExt;
use super::upoly::{RootInterval, UPoly};
use crate::scalar::{rational_to_f64, Field, OrderedField, Rational, Scalar};

/// A real algebraic number: a square-free integer polynomial together with
/// an interval `(lo, hi]` holding exactly one of its roots.
///
/// When the root has been hit exactly by bisection, `lo == hi` and the value
/// is that rational.
#[derive(Clone, Debug)]
pub struct AlgebraicReal {
    poly: UPoly<Rational>,
    lo: Rational,
    hi: Rational,
}

impl AlgebraicReal {
    pub fn from_rational(r: Rational) -> Self {
        let poly = UPoly::new(vec![-r.clone(), Rational::one()]).primitive();
        AlgebraicReal { poly, lo: r.clone(), hi: r }
    }

    fn from_root_interval(poly: UPoly<Rational>, iv: RootInterval) -> Self {
        match iv {
            RootInterval::Exact(r) => AlgebraicReal { poly, lo: r.clone(), hi: r },
            RootInterval::Open { lo, hi } => AlgebraicReal { poly, lo, hi },
        }
    }

    /// All real roots of `p`, in increasing order.
    pub fn roots_of(p: &UPoly<Rational>) -> Vec<Self> {
        let sf = p.square_free_part().primitive();
        sf.real_roots().into_iter().map(|iv| Self::from_root_interval(sf.clone(), iv)).collect()
    }

    /// Roots of `p` in the closed box `[lo, hi]`.
    pub fn roots_in(p: &UPoly<Rational>, lo: &Rational, hi: &Rational) -> Vec<Self> {
        let sf = p.square_free_part().primitive();
        sf.isolate_roots(lo, hi).into_iter().map(|iv| Self::from_root_interval(sf.clone(), iv)).collect()
    }

    /// The unique root of `p` in `[lo, hi]`, if there is exactly one.
    pub fn unique_root_in(p: &UPoly<Rational>, lo: &Rational, hi: &Rational) -> Option<Self> {
        let mut r = Self::roots_in(p, lo, hi);
        (r.len() == 1).then(|| r.pop().unwrap())
    }

    pub fn from_quad(q: &QuadExt) -> Self {
        if let Some(r) = q.as_rational() {
            return Self::from_rational(r.clone());
        }
        let two = Rational::from_integer(BigInt::from(2));
        let poly = UPoly::new(vec![q.norm(), -(q.a() * &two), Rational::one()]).primitive();
        // conjugates are 2|b|√d apart; an enclosure narrower than that isolates
        let mut digits = 4;
        loop {
            let s = Interval::sqrt_enclosure(q.d(), digits);
            let e = super::interval::enclose_quad(q, &s);
            if e.width() < q.b().abs() {
                let lo = &e.lo - &e.width();
                return AlgebraicReal { poly, lo, hi: e.hi };
            }
            digits *= 2;
        }
    }

    pub fn poly(&self) -> &UPoly<Rational> {
        &self.poly
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_exact() {
            return Some(self.lo.clone());
        }
        if self.poly.degree() == Some(1) {
            let c = self.poly.coeffs();
            return Some(-c[0].clone() / c[1].clone());
        }
        None
    }

    /// Halves the isolating interval.
    pub fn refine(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2));
        let sm = self.poly.sign_at(&mid);
        if sm == Ordering::Equal {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        if sm != self.poly.sign_at(&self.lo) {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    pub fn refine_to(&mut self, width: &Rational) {
        while !self.is_exact() && &(&self.hi - &self.lo) > width {
            self.refine();
        }
    }

    pub fn refine_bits(&mut self, bits: u32) {
        for _ in 0..bits {
            self.refine();
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut c = self.clone();
        c.refine_to(&Rational::new(BigInt::one(), BigInt::one() << 60usize));
        rational_to_f64(&((&c.lo + &c.hi) / Rational::from_integer(BigInt::from(2))))
    }

    /// Decimal expansion rounded to `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        let mut c = self.clone();
        let scale = Rational::from_integer(BigInt::from(10u32).pow(digits));
        let round = |x: &Rational| (x * &scale + Rational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
        let tiny = Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits + 3));
        c.refine_to(&tiny);
        for _ in 0..200 {
            if c.is_exact() || round(&c.lo) == round(&c.hi) {
                break;
            }
            c.refine();
        }
        let n = round(&c.hi);
        format_fixed(&n, digits)
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        let mut c = self.clone();
        loop {
            if c.is_exact() {
                return c.lo.cmp(r);
            }
            if r <= &c.lo {
                return Ordering::Greater;
            }
            if r > &c.hi {
                return Ordering::Less;
            }
            if c.poly.eval(r).is_zero() {
                return Ordering::Equal;
            }
            c.refine();
        }
    }

    /// Exact equality with an element of a quadratic field.
    pub fn eq_quad(&self, q: &QuadExt) -> bool {
        let val = self.poly.eval_in(q, |c| QuadExt::rational(c.clone()));
        if !val.is_zero() {
            return false;
        }
        if self.is_exact() {
            return QuadExt::rational(self.lo.clone()) == *q;
        }
        let lo = QuadExt::rational(self.lo.clone());
        let hi = QuadExt::rational(self.hi.clone());
        lo.cmp_exact(q) == Ordering::Less && q.cmp_exact(&hi) != Ordering::Greater
    }

    pub fn cmp_quad(&self, q: &QuadExt) -> Ordering {
        if self.eq_quad(q) {
            return Ordering::Equal;
        }
        let mut c = self.clone();
        loop {
            let lo = QuadExt::rational(c.lo.clone());
            let hi = QuadExt::rational(c.hi.clone());
            if q.cmp_exact(&lo) != Ordering::Greater {
                return Ordering::Greater;
            }
            if q.cmp_exact(&hi) == Ordering::Greater {
                return Ordering::Less;
            }
            c.refine();
        }
    }

    /// Exact comparison of two algebraic reals.
    pub fn cmp_alg(&self, other: &Self) -> Ordering {
        if self.equals(other) {
            return Ordering::Equal;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            if a.hi < b.lo || (a.hi == b.lo && !b.is_exact()) {
                return Ordering::Less;
            }
            if b.hi < a.lo || (b.hi == a.lo && !a.is_exact()) {
                return Ordering::Greater;
            }
            a.refine();
            b.refine();
        }
    }

    /// Exact equality through the gcd of the defining polynomials.
    pub fn equals(&self, other: &Self) -> bool {
        if let (Some(x), Some(y)) = (self.as_rational(), other.as_rational()) {
            return x == y;
        }
        if let Some(x) = self.as_rational() {
            return other.cmp_rational(&x) == Ordering::Equal;
        }
        if let Some(y) = other.as_rational() {
            return self.cmp_rational(&y) == Ordering::Equal;
        }
        let g = self.poly.gcd(&other.poly);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        if lo >= hi {
            return false;
        }
        g.count_roots_in(lo, hi) > 0
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} near {}", self.poly, self.to_decimal(15))
    }
}

fn format_fixed(n: &BigInt, digits: u32) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let d = digits as usize;
    let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
    let (int, frac) = s.split_at(s.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `Q[x]/(m)` together with the real root of `m` that `x` stands for.
#[derive(Debug)]
pub struct NumberField {
    modulus: UPoly<Rational>,
    root: Mutex<AlgebraicReal>,
    approx: f64,
}

impl NumberField {
    /// `modulus` should be irreducible for division to be available; ring
    /// operations work for any modulus vanishing at `root`.
    pub fn new(root: AlgebraicReal) -> Arc<Self> {
        let modulus = root.poly().monic();
        let approx = root.to_f64();
        Arc::new(NumberField { modulus, root: Mutex::new(root), approx })
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap_or(0)
    }

    pub fn modulus(&self) -> &UPoly<Rational> {
        &self.modulus
    }

    pub fn root(&self) -> AlgebraicReal {
        self.root.lock().unwrap().clone()
    }

    /// The generator `α` as a field element.
    pub fn gen(self: &Arc<Self>) -> NfElem {
        NfElem::new(self, vec![Rational::zero(), Rational::one()])
    }

    pub fn elem(self: &Arc<Self>, coeffs: Vec<Rational>) -> NfElem {
        NfElem::new(self, coeffs)
    }

    /// Encloses `p(α)` with the root interval refined by `bits` halvings.
    fn enclose(&self, p: &UPoly<Rational>, bits: u32) -> Interval {
        let mut r = self.root.lock().unwrap();
        r.refine_bits(bits);
        let iv = r.interval();
        drop(r);
        let mut acc = Interval::point(Rational::zero());
        for c in p.coeffs().iter().rev() {
            acc = acc * iv.clone() + Interval::point(c.clone());
        }
        acc
    }
}

/// An element of a [`NumberField`]; rationals carry no field and mix freely.
#[derive(Clone)]
pub struct NfElem {
    field: Option<Arc<NumberField>>,
    poly: UPoly<Rational>,
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NfElem({})", self.poly)
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
}

impl NfElem {
    fn new(field: &Arc<NumberField>, coeffs: Vec<Rational>) -> Self {
        let p = UPoly::new(coeffs);
        let poly = p.div_rem(field.modulus()).1;
        NfElem { field: Some(field.clone()), poly }
    }

    pub fn rational(r: Rational) -> Self {
        NfElem { field: None, poly: UPoly::constant(r) }
    }

    pub fn poly(&self) -> &UPoly<Rational> {
        &self.poly
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.poly.degree().unwrap_or(0) == 0).then(|| self.poly.coeff(0))
    }

    fn joint(&self, other: &Self) -> Option<Arc<NumberField>> {
        match (&self.field, &other.field) {
            (None, f) | (f, None) => f.clone(),
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b) || a.modulus == b.modulus, "mixing different number fields");
                Some(a.clone())
            }
        }
    }

    fn wrap(field: Option<Arc<NumberField>>, p: UPoly<Rational>) -> Self {
        match field {
            Some(f) => {
                let poly = p.div_rem(f.modulus()).1;
                NfElem { field: Some(f), poly }
            }
            None => NfElem { field: None, poly: p },
        }
    }

    /// Whether the value is exactly zero, also when the modulus is reducible.
    pub fn is_zero_exact(&self) -> bool {
        if self.poly.is_zero() {
            return true;
        }
        let Some(f) = &self.field else { return false };
        let g = self.poly.gcd(f.modulus());
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let r = f.root();
        if r.is_exact() {
            return g.eval(r.lo()).is_zero();
        }
        g.count_roots_in(r.lo(), r.hi()) > 0
    }

    /// Minimal-degree annihilating polynomial found as the first linear
    /// dependency among powers of the element.
    pub fn annihilating_poly(&self) -> UPoly<Rational> {
        let Some(f) = &self.field else {
            return UPoly::new(vec![-self.poly.coeff(0), Rational::one()]);
        };
        let n = f.degree();
        let mut powers = vec![NfElem::rational(Rational::one())];
        for k in 1..=n {
            powers.push(powers[k - 1].clone() * self.clone());
            let cols: Vec<Vec<Rational>> = powers.iter().map(|p| (0..n).map(|i| p.poly.coeff(i)).collect()).collect();
            let m = Matrix::from_columns(&cols);
            let ker = m.kernel_basis();
            if let Some(v) = ker.first() {
                return UPoly::new(v.clone()).primitive();
            }
        }
        unreachable!("n+1 vectors in an n-dimensional space are dependent")
    }

    /// The element as an isolated real algebraic number.
    pub fn to_algebraic(&self) -> AlgebraicReal {
        if let Some(r) = self.as_rational() {
            return AlgebraicReal::from_rational(r);
        }
        let f = self.field.as_ref().unwrap();
        let ann = self.annihilating_poly().square_free_part().primitive();
        let mut roots = AlgebraicReal::roots_of(&ann);
        let mut bits = 8;
        loop {
            let e = f.enclose(&self.poly, bits);
            let hits: Vec<usize> = (0..roots.len())
                .filter(|&i| roots[i].hi() >= &e.lo && roots[i].lo() <= &e.hi)
                .collect();
            if hits.len() == 1 {
                return roots.swap_remove(hits[0]);
            }
            let w = e.width();
            for r in roots.iter_mut() {
                r.refine_to(&w);
            }
            bits += 8;
        }
    }
}

impl Zero for NfElem {
    fn zero() -> Self {
        NfElem::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

impl One for NfElem {
    fn one() -> Self {
        NfElem::rational(Rational::one())
    }
}

impl Add for NfElem {
    type Output = NfElem;
    fn add(self, rhs: Self) -> Self {
        let f = self.joint(&rhs);
        NfElem::wrap(f, self.poly + rhs.poly)
    }
}

impl Sub for NfElem {
    type Output = NfElem;
    fn sub(self, rhs: Self) -> Self {
        let f = self.joint(&rhs);
        NfElem::wrap(f, self.poly - rhs.poly)
    }
}

impl Mul for NfElem {
    type Output = NfElem;
    fn mul(self, rhs: Self) -> Self {
        let f = self.joint(&rhs);
        NfElem::wrap(f, self.poly * rhs.poly)
    }
}

impl Neg for NfElem {
    type Output = NfElem;
    fn neg(self) -> Self {
        NfElem { field: self.field, poly: -self.poly }
    }
}

impl Div for NfElem {
    type Output = NfElem;
    fn div(self, rhs: Self) -> Self {
        if let Some(r) = rhs.as_rational() {
            assert!(!r.is_zero(), "division by zero");
            let inv = Rational::one() / r;
            return NfElem { field: self.field, poly: self.poly.scale(&inv) };
        }
        let f = rhs.field.clone().unwrap();
        // solve (rhs · y) = 1 through the multiplication matrix
        let n = f.degree();
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|k| {
                let xk = NfElem::new(&f, {
                    let mut v = vec![Rational::zero(); k + 1];
                    v[k] = Rational::one();
                    v
                });
                let p = rhs.clone() * xk;
                (0..n).map(|i| p.poly.coeff(i)).collect()
            })
            .collect();
        let m = Matrix::from_columns(&cols);
        let mut e1 = vec![Rational::zero(); n];
        e1[0] = Rational::one();
        let y = m.solve(&e1).expect("element not invertible modulo the defining polynomial");
        self * NfElem::new(&f, y)
    }
}

impl Scalar for NfElem {
    fn from_rational(r: &Rational) -> Self {
        NfElem::rational(r.clone())
    }

    fn to_f64(&self) -> f64 {
        match &self.field {
            None => rational_to_f64(&self.poly.coeff(0)),
            Some(f) => self.poly.eval_in(&f.approx, rational_to_f64),
        }
    }

    fn magnitude(&self) -> f64 {
        if self.poly.is_zero() {
            0.0
        } else {
            self.to_f64().abs().max(f64::MIN_POSITIVE)
        }
    }
}

impl Field for NfElem {}

impl OrderedField for NfElem {
    fn sign(&self) -> Ordering {
        if let Some(r) = self.as_rational() {
            return r.sign();
        }
        if self.is_zero_exact() {
            return Ordering::Equal;
        }
        let f = self.field.as_ref().unwrap();
        let mut bits = 0;
        loop {
            if let Some(s) = f.enclose(&self.poly, bits).strict_sign() {
                return s;
            }
            bits += 8;
        }
    }
}

/// Evaluates a rational polynomial at a point whose coordinates live in a
/// common number field, returning the value as an isolated algebraic real.
pub fn eval_at_algebraic(p: &Poly<Rational>, assignment: &[NfElem]) -> AlgebraicReal {
    p.eval_in(assignment, |c| NfElem::rational(c.clone())).to_algebraic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn quadratic_roots_match_closed_form() {
        let p: UPoly<Rational> = UPoly::from_i64(&[3, -14, 14]);
        let roots = AlgebraicReal::roots_of(&p);
        assert_eq!(roots.len(), 2);
        let small = QuadExt::parse("1/2-1/14*sqrt(7)").unwrap();
        assert!(roots[0].eq_quad(&small));
        assert!(!roots[1].eq_quad(&small));
        assert_eq!(roots[0].to_decimal(15), "0.311017763495386");
    }

    #[test]
    fn from_quad_isolates_the_right_conjugate() {
        let q = QuadExt::parse("9/16-1/16*sqrt(17)").unwrap();
        let a = AlgebraicReal::from_quad(&q);
        assert!(a.eq_quad(&q));
        assert!(!a.eq_quad(&q.conj()));
        assert_eq!(a.cmp_quad(&q.conj()), Ordering::Less);
    }

    #[test]
    fn field_arithmetic() {
        let p: UPoly<Rational> = UPoly::from_i64(&[-2, 0, 1]);
        let r = AlgebraicReal::roots_in(&p, &int(0), &int(2)).pop().unwrap();
        let k = NumberField::new(r);
        let a = k.gen();
        assert_eq!((a.clone() * a.clone()).as_rational(), Some(int(2)));
        let inv = NfElem::one() / a.clone();
        assert_eq!(inv * a.clone(), NfElem::one());
        let x = a.clone() - NfElem::from_rational(&rat(7, 5));
        assert_eq!(x.sign(), Ordering::Greater);
        // x + (1 − x) = 1
        let one_minus = NfElem::one() - a.clone();
        assert_eq!((a + one_minus).to_algebraic().as_rational(), Some(int(1)));
    }

    #[test]
    fn equality_via_gcd() {
        let p: UPoly<Rational> = UPoly::from_i64(&[-2, 0, 1]);
        let q = p.clone() * UPoly::from_i64(&[-3, 1]);
        let a = AlgebraicReal::roots_in(&p, &int(0), &int(2)).pop().unwrap();
        let b = AlgebraicReal::roots_in(&q, &int(1), &int(2)).pop().unwrap();
        assert!(a.equals(&b));
        let c = AlgebraicReal::roots_in(&q, &int(2), &int(4)).pop().unwrap();
        assert!(!a.equals(&c));
        assert_eq!(a.cmp_alg(&c), Ordering::Less);
    }
}
