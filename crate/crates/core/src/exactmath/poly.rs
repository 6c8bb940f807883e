use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::upoly::UPoly;
use crate::scalar::{format_rational, parse_rational, Field, Rational, Scalar};

/// Sparse multivariate polynomial over named variables.
///
/// Terms map an exponent vector (one entry per variable, in the order of
/// `vars`) to a nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(vars: &[&str]) -> Self {
        Poly { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn with_vars(vars: Vec<String>) -> Self {
        Poly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: T) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &[&str], name: &str) -> Self {
        let idx = vars.iter().position(|v| *v == name).expect("unknown variable");
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, T::one());
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: T) {
        assert_eq!(exps.len(), self.vars.len(), "exponent vector length");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::with_vars(self.vars.clone());
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant_like(self, T::one());
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn constant_like(other: &Self, c: T) -> Self {
        let mut p = Self::with_vars(other.vars.clone());
        p.add_term(vec![0; other.vars.len()], c);
        p
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = Self::with_vars(self.vars.clone());
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c.clone() * T::from_i64(e[var] as i64));
        }
        out
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.eval_in(x, |c| c.clone())
    }

    /// Evaluates in a ring `S` that the coefficients embed into.
    pub fn eval_in<S: Scalar>(&self, x: &[S], embed: impl Fn(&T) -> S) -> S {
        assert_eq!(x.len(), self.vars.len(), "assignment length");
        let maxdeg: Vec<u32> =
            (0..self.vars.len()).map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<S>> = x
            .iter()
            .zip(&maxdeg)
            .map(|(xi, &d)| {
                let mut v = vec![S::one()];
                for k in 1..=d as usize {
                    v.push(v[k - 1].clone() * xi.clone());
                }
                v
            })
            .collect();
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = embed(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * powers[i][k as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Replaces variable `var` by the polynomial `q` (over the same variables).
    pub fn substitute(&self, var: usize, q: &Self) -> Self {
        assert_eq!(self.vars, q.vars, "substitution needs matching variables");
        let maxd = self.terms.keys().map(|e| e[var]).max().unwrap_or(0);
        let mut qpow = vec![Self::constant_like(self, T::one())];
        for k in 1..=maxd as usize {
            qpow.push(qpow[k - 1].clone() * q.clone());
        }
        let mut out = Self::with_vars(self.vars.clone());
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[var] = 0;
            let mut mono = Self::with_vars(self.vars.clone());
            mono.add_term(rest, c.clone());
            out = out + mono * qpow[e[var] as usize].clone();
        }
        out
    }

    /// Fixes variable `var` to a constant.
    pub fn specialize(&self, var: usize, value: &T) -> Self {
        let c = Self::constant_like(self, value.clone());
        self.substitute(var, &c)
    }

    /// Drops variables that no term uses.
    pub fn prune_vars(&self) -> Self {
        let used: Vec<usize> = (0..self.vars.len()).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect();
        let mut out = Poly::with_vars(used.iter().map(|&i| self.vars[i].clone()).collect());
        for (e, c) in &self.terms {
            out.add_term(used.iter().map(|&i| e[i]).collect(), c.clone());
        }
        out
    }

    /// Converts to a univariate polynomial in variable `var`; other
    /// exponents must be zero.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly<T>> {
        let deg = self.terms.keys().map(|e| e[var]).max().unwrap_or(0) as usize;
        let mut c = vec![T::zero(); deg + 1];
        for (e, v) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| i != var && k > 0) {
                return None;
            }
            c[e[var] as usize] = v.clone();
        }
        Some(UPoly::new(c))
    }

    pub fn from_upoly(p: &UPoly<T>, var: &str) -> Self {
        let mut out = Self::zero(&[var]);
        for (i, c) in p.coeffs().iter().enumerate() {
            out.add_term(vec![i as u32], c.clone());
        }
        out
    }

    pub fn map_coeffs<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Poly<S> {
        let mut out = Poly::with_vars(self.vars.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Rebuilds the polynomial over a superset/reordering of variables.
    pub fn with_var_order(&self, vars: &[String]) -> Self {
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("variable missing from target order"))
            .collect();
        let mut out = Poly::with_vars(vars.to_vec());
        for (e, c) in &self.terms {
            let mut e2 = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[idx[i]] = k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    fn align(a: Self, b: Self) -> (Self, Self) {
        if a.vars == b.vars {
            return (a, b);
        }
        let mut vars = a.vars.clone();
        for v in &b.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        (a.with_var_order(&vars), b.with_var_order(&vars))
    }
}

impl<T: Field> Poly<T> {
    /// Checks `p = c · Π factors` for some nonzero constant `c`, returning `c`.
    pub fn factor_verify(&self, factors: &[Poly<T>]) -> Option<T> {
        let mut prod = Poly::constant_like(self, T::one());
        for f in factors {
            prod = prod * f.clone();
        }
        let (p, prod) = Poly::align(self.clone(), prod);
        let (e, c) = prod.terms.iter().next()?;
        let ratio = p.coeff(e) / c.clone();
        if ratio.is_zero() {
            return None;
        }
        (p == prod.scale(&ratio)).then_some(ratio)
    }
}

impl<T: Scalar> Add for Poly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (mut a, b) = Poly::align(self, rhs);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }
}

impl<T: Scalar> Sub for Poly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for Poly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly { vars: self.vars, terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl<T: Scalar> Mul for Poly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = Poly::align(self, rhs);
        let mut out = Poly::with_vars(a.vars.clone());
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl fmt::Display for Poly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if !first {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            let a = c.abs();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else if a == Rational::from_integer(1.into()) {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// JSON form: variables plus sparse term list.
#[derive(Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<(Vec<u32>, String)>,
}

impl Poly<Rational> {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), format_rational(c))).collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Option<Self> {
        let mut p = Poly::with_vars(j.vars.clone());
        for (e, c) in &j.terms {
            if e.len() != j.vars.len() {
                return None;
            }
            p.add_term(e.clone(), parse_rational(c)?);
        }
        Some(p)
    }
}

impl<T: Scalar> Zero for Poly<T> {
    fn zero() -> Self {
        Poly::with_vars(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    type P = Poly<Rational>;

    #[test]
    fn product_rule_and_substitution() {
        let v = ["x", "y"];
        let x = P::var(&v, "x");
        let y = P::var(&v, "y");
        let p = x.clone() * x.clone() * y.clone();
        assert_eq!(p.partial_derivative(0), (x.clone() * y.clone()).scale(&int(2)));
        let q = p.substitute(1, &(x.clone() + P::constant(&v, int(1))));
        assert_eq!(q.eval(&[int(2), int(0)]), int(12));
    }

    #[test]
    fn factor_verify_up_to_constant() {
        let v = ["x"];
        let x = P::var(&v, "x");
        let one = P::constant(&v, int(1));
        let p = (x.clone() * x.clone() - one.clone()).scale(&int(-3));
        let c = p.factor_verify(&[x.clone() - one.clone(), x.clone() + one.clone()]);
        assert_eq!(c, Some(int(-3)));
        assert_eq!(p.factor_verify(&[x.clone() - one.clone(), x.clone()]), None);
    }

    #[test]
    fn different_variable_sets_align() {
        let a = P::var(&["x"], "x");
        let b = P::var(&["y"], "y");
        let s = a + b;
        assert_eq!(s.vars(), &["x".to_string(), "y".to_string()]);
        assert_eq!(s.eval(&[rat(1, 2), rat(1, 3)]), rat(5, 6));
    }

    #[test]
    fn constant_derivative_is_zero() {
        let p = P::constant(&["x"], int(7));
        assert!(p.partial_derivative(0).is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let v = ["x", "y"];
        let p = P::var(&v, "x").pow(3) - P::var(&v, "y").scale(&rat(2, 3));
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back = P::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(p, back);
    }
}
