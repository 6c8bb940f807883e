//! Loop patterns, blowups, homomorphisms and the blowup density polynomial.
//!
//! A pattern is a graph on `[m]` whose vertices may carry loops. Its blowup
//! replaces vertex `i` by a set `V_i`: a clique if `i` has a loop, otherwise
//! an independent set, with complete or empty bipartite graphs between parts.
//! [`StepGraphon`] generalizes this to arbitrary pair probabilities, which
//! covers random constructions such as `G(n, p)` or `R(K_{n,n}, p)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmath::Poly;
use crate::graphs::{classifier, pair_index, DenseGraph, Graph};
use crate::objectives::Objective;
use crate::scalar::{binomial, factorial, rational_to_f64, OrderedField, Rational, Scalar};

/// Largest pattern order.
pub const MAX_PATTERN_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("pattern order {0} exceeds {MAX_PATTERN_ORDER}")]
    TooLarge(usize),
    #[error("vertex {0} out of range")]
    Vertex(usize),
    #[error("cannot parse pattern {0:?}")]
    Parse(String),
    #[error("expected {expected} coordinates, got {got}")]
    Length { expected: usize, got: usize },
    #[error("coordinates must be nonnegative and sum to 1")]
    NotInSimplex,
}

/// A graph on `[m]` with optional loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    m: usize,
    adj: Vec<u64>,
    loops: u64,
}

/// Pattern JSON: `{m, edges: [[i, j]...], loops: [i...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternJson {
    pub m: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub loops: Vec<usize>,
}

impl Pattern {
    pub fn empty(m: usize) -> Result<Self, PatternError> {
        if m > MAX_PATTERN_ORDER {
            return Err(PatternError::TooLarge(m));
        }
        Ok(Pattern { m, adj: vec![0; m], loops: 0 })
    }

    /// Pattern from a pair list; `(i, i)` is a loop.
    pub fn new(m: usize, pairs: &[(usize, usize)]) -> Result<Self, PatternError> {
        let mut p = Self::empty(m)?;
        for &(i, j) in pairs {
            p.add(i, j)?;
        }
        Ok(p)
    }

    pub fn from_graph(g: &Graph) -> Self {
        Self::new(g.order(), &g.edges()).expect("graph order fits")
    }

    /// `m` looped vertices with no edges between them (blowup: disjoint cliques).
    pub fn loops_only(m: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..m).map(|i| (i, i)).collect();
        Self::new(m, &pairs).expect("order fits")
    }

    pub fn add(&mut self, i: usize, j: usize) -> Result<(), PatternError> {
        for v in [i, j] {
            if v >= self.m {
                return Err(PatternError::Vertex(v));
            }
        }
        if i == j {
            self.loops |= 1 << i;
        } else {
            self.adj[i] |= 1 << j;
            self.adj[j] |= 1 << i;
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn has_loop(&self, i: usize) -> bool {
        self.loops >> i & 1 == 1
    }

    /// Adjacency of parts `i` and `j`; for `i == j` this is the loop bit.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        if i == j {
            self.has_loop(i)
        } else {
            self.adj[i] >> j & 1 == 1
        }
    }

    /// Neighbourhood of `i` as a bitmask, including `i` itself when looped.
    pub fn neighborhood(&self, i: usize) -> u64 {
        self.adj[i] | (self.loops & 1 << i)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in i + 1..self.m {
                if self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn loop_list(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| self.has_loop(i)).collect()
    }

    /// Same edges, no loops (as a simple graph).
    pub fn without_loops(&self) -> Graph {
        assert!(self.m <= crate::graphs::MAX_ORDER, "pattern too large for a Graph");
        Graph::from_edges(self.m, &self.edges())
    }

    /// Deletes vertex `v`.
    pub fn remove_vertex(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.m).filter(|&i| i != v).collect();
        self.induced(&keep)
    }

    pub fn induced(&self, vs: &[usize]) -> Self {
        let mut p = Self::empty(vs.len()).unwrap();
        for (a, &i) in vs.iter().enumerate() {
            for (b, &j) in vs.iter().enumerate().skip(a) {
                if self.adjacent(i, j) {
                    p.add(a, b).unwrap();
                }
            }
        }
        p
    }

    pub fn complement(&self) -> Self {
        let mut p = Self::empty(self.m).unwrap();
        for i in 0..self.m {
            for j in i..self.m {
                if !self.adjacent(i, j) {
                    p.add(i, j).unwrap();
                }
            }
        }
        p
    }

    pub fn disjoint_union(&self, other: &Self) -> Result<Self, PatternError> {
        let mut p = Self::empty(self.m + other.m)?;
        for i in 0..self.m {
            for j in i..self.m {
                if self.adjacent(i, j) {
                    p.add(i, j)?;
                }
            }
        }
        for i in 0..other.m {
            for j in i..other.m {
                if other.adjacent(i, j) {
                    p.add(self.m + i, self.m + j)?;
                }
            }
        }
        Ok(p)
    }

    /// Parses `"m:ij,kl,..."` (single-digit vertices, `"ii"` is a loop, or
    /// `"i-j"` tokens for larger orders), `"Kn"` for a loopless complete
    /// graph, or pattern JSON.
    pub fn parse(s: &str) -> Result<Self, PatternError> {
        let s = s.trim();
        let bad = || PatternError::Parse(s.to_string());
        if s.starts_with('{') {
            let j: PatternJson = serde_json::from_str(s).map_err(|_| bad())?;
            return Self::from_json(&j);
        }
        if let Some(n) = s.strip_prefix('K') {
            let m: usize = n.parse().map_err(|_| bad())?;
            let mut p = Self::empty(m)?;
            for i in 0..m {
                for j in i + 1..m {
                    p.add(i, j)?;
                }
            }
            return Ok(p);
        }
        let (m, rest) = s.split_once(':').unwrap_or((s, ""));
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        let mut p = Self::empty(m)?;
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (i, j) = if let Some((a, b)) = tok.split_once('-') {
                (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
            } else {
                let d: Vec<usize> = tok.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect::<Option<_>>().ok_or_else(bad)?;
                if d.len() != 2 {
                    return Err(bad());
                }
                (d[0], d[1])
            };
            p.add(i, j)?;
        }
        Ok(p)
    }

    pub fn to_json(&self) -> PatternJson {
        PatternJson { m: self.m, edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(), loops: self.loop_list() }
    }

    pub fn from_json(j: &PatternJson) -> Result<Self, PatternError> {
        let mut p = Self::empty(j.m)?;
        for &[a, b] in &j.edges {
            p.add(a, b)?;
        }
        for &l in &j.loops {
            p.add(l, l)?;
        }
        Ok(p)
    }

    /// Compact text form accepted by [`Pattern::parse`].
    pub fn to_text(&self) -> String {
        let sep = if self.m > 10 { "-" } else { "" };
        let mut toks: Vec<String> = Vec::new();
        for i in 0..self.m {
            for j in i..self.m {
                if self.adjacent(i, j) {
                    toks.push(format!("{i}{sep}{j}"));
                }
            }
        }
        format!("{}:{}", self.m, toks.join(","))
    }

    /// The 0/1 step graphon of this pattern.
    pub fn to_step<T: Scalar>(&self) -> StepGraphon<T> {
        let m = self.m;
        let mut p = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                p.push(if self.adjacent(i, j) { T::one() } else { T::zero() });
            }
        }
        StepGraphon { m, p }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Pair probabilities between and within `m` parts; entry `(i, i)` is the
/// edge probability inside part `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon<T> {
    m: usize,
    p: Vec<T>,
}

impl<T: Scalar> StepGraphon<T> {
    /// `p` must be symmetric, given row-major.
    pub fn new(m: usize, p: Vec<T>) -> Self {
        assert_eq!(p.len(), m * m);
        for i in 0..m {
            for j in 0..i {
                assert!(p[i * m + j] == p[j * m + i], "step graphon must be symmetric");
            }
        }
        StepGraphon { m, p }
    }

    /// The `G(n, p)` limit.
    pub fn constant(p: T) -> Self {
        StepGraphon { m: 1, p: vec![p] }
    }

    /// The `R(K_{n,n}, p)` limit: density `p` across two parts, none inside.
    pub fn bipartite(p: T) -> Self {
        StepGraphon { m: 2, p: vec![T::zero(), p.clone(), p, T::zero()] }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn prob(&self, i: usize, j: usize) -> &T {
        &self.p[i * self.m + j]
    }
}

fn check_simplex<T: OrderedField>(a: &[T], m: usize) -> Result<(), PatternError> {
    if a.len() != m {
        return Err(PatternError::Length { expected: m, got: a.len() });
    }
    let mut s = T::zero();
    for x in a {
        if x.is_negative_exact() {
            return Err(PatternError::NotInSimplex);
        }
        s = s + x.clone();
    }
    if s.cmp_exact(&T::one()) != std::cmp::Ordering::Equal {
        return Err(PatternError::NotInSimplex);
    }
    Ok(())
}

/// Blowup of `b` with part sizes `sizes`; part `i` occupies a contiguous
/// block of vertices in order.
pub fn blowup_build(b: &Pattern, sizes: &[usize]) -> Result<DenseGraph, PatternError> {
    if sizes.len() != b.order() {
        return Err(PatternError::Length { expected: b.order(), got: sizes.len() });
    }
    let part: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
    let n = part.len();
    let mut g = DenseGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if b.adjacent(part[u], part[v]) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// All maps `V(f) → V(b)` preserving adjacency and non-adjacency, where two
/// vertices sent to the same part are adjacent iff the part has a loop.
pub fn homomorphisms(f: &Graph, b: &Pattern) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(f.order());
    fn rec(f: &Graph, b: &Pattern, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let d = cur.len();
        if d == f.order() {
            out.push(cur.clone());
            return;
        }
        for i in 0..b.order() {
            if (0..d).all(|u| f.has_edge(u, d) == b.adjacent(cur[u], i)) {
                cur.push(i);
                rec(f, b, cur, out);
                cur.pop();
            }
        }
    }
    rec(f, b, &mut cur, &mut out);
    out
}

pub fn has_homomorphism(f: &Graph, b: &Pattern) -> bool {
    let mut cur = Vec::with_capacity(f.order());
    fn rec(f: &Graph, b: &Pattern, cur: &mut Vec<usize>) -> bool {
        let d = cur.len();
        if d == f.order() {
            return true;
        }
        for i in 0..b.order() {
            if (0..d).all(|u| f.has_edge(u, d) == b.adjacent(cur[u], i)) {
                cur.push(i);
                if rec(f, b, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    rec(f, b, &mut cur)
}

/// Automorphisms of `b` (permutations preserving edges and loops).
pub fn pattern_automorphisms(b: &Pattern) -> Vec<Vec<usize>> {
    let m = b.order();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(b: &Pattern, used: u64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let d = cur.len();
        if d == b.order() {
            out.push(cur.clone());
            return;
        }
        for i in 0..b.order() {
            if used >> i & 1 == 1 || b.has_loop(i) != b.has_loop(d) {
                continue;
            }
            if (0..d).all(|u| b.adjacent(u, d) == b.adjacent(cur[u], i)) {
                cur.push(i);
                rec(b, used | 1 << i, cur, out);
                cur.pop();
            }
        }
    }
    rec(b, 0, &mut cur, &mut out);
    out
}

/// Homomorphisms `f → b` grouped into orbits under `aut(b)`; each orbit is
/// represented by its lexicographically smallest member.
pub fn homomorphism_orbits(f: &Graph, b: &Pattern) -> Vec<Vec<usize>> {
    let auts = pattern_automorphisms(b);
    let mut reps: Vec<Vec<usize>> = homomorphisms(f, b)
        .into_iter()
        .map(|h| auts.iter().map(|s| h.iter().map(|&x| s[x]).collect::<Vec<_>>()).min().unwrap())
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

/// Calls `f(c)` for every vector `c` of nonnegative integers with sum `k`
/// and `c_i = 0` wherever `allowed[i]` is false.
fn for_each_composition(k: usize, allowed: &[bool], f: &mut impl FnMut(&[usize])) {
    let mut c = vec![0usize; allowed.len()];
    fn rec(i: usize, left: usize, allowed: &[bool], c: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if i + 1 == allowed.len() || left == 0 {
            if left > 0 {
                if !allowed[i] {
                    return;
                }
                c[i] = left;
            }
            f(c);
            c[i] = 0;
            return;
        }
        let top = if allowed[i] { left } else { 0 };
        for t in (0..=top).rev() {
            c[i] = t;
            rec(i + 1, left - t, allowed, c, f);
        }
        c[i] = 0;
    }
    if allowed.is_empty() {
        if k == 0 {
            f(&[]);
        }
        return;
    }
    rec(0, k, allowed, &mut c, f);
}

/// Labeled pair bits of the blowup graph on `Σ c = κ` vertices, with the
/// first `c_0` vertices in part 0 and so on.
fn composition_bits(b: &Pattern, c: &[usize]) -> u32 {
    let part: Vec<usize> = c.iter().enumerate().flat_map(|(i, &t)| std::iter::repeat_n(i, t)).collect();
    let mut bits = 0u32;
    for v in 1..part.len() {
        for u in 0..v {
            if b.adjacent(part[u], part[v]) {
                bits |= 1 << pair_index(u, v);
            }
        }
    }
    bits
}

/// `λ_γ(B(x))` as a polynomial in `x0..x{m-1}`: the coefficient of `x^c` is
/// the multinomial `κ!/Π c_i!` times `γ` of the blowup graph with `c_i`
/// vertices in part `i`.
pub fn blowup_polynomial(gamma: &Objective, b: &Pattern) -> Poly<Rational> {
    let kappa = gamma.kappa();
    let vars: Vec<String> = (0..b.order()).map(|i| format!("x{i}")).collect();
    let mut poly = Poly::with_vars(vars);
    let cls = classifier(kappa);
    let kf = factorial(kappa as u64);
    for_each_composition(kappa, &vec![true; b.order()], &mut |c| {
        let w = &gamma.weights()[cls.class_of_bits(composition_bits(b, c))];
        if w.is_zero() {
            return;
        }
        let denom: BigInt = c.iter().map(|&t| factorial(t as u64)).product();
        let coef = w * Rational::new(kf.clone(), denom);
        poly.add_term(c.iter().map(|&t| t as u32).collect(), coef);
    });
    poly
}

/// `λ_γ(B(a))` evaluated directly in the scalar type of `a`.
pub fn eval_blowup<T: OrderedField>(gamma: &Objective, b: &Pattern, a: &[T]) -> Result<T, PatternError> {
    check_simplex(a, b.order())?;
    Ok(eval_blowup_unchecked(gamma, b, a))
}

fn eval_blowup_unchecked<T: Scalar>(gamma: &Objective, b: &Pattern, a: &[T]) -> T {
    let kappa = gamma.kappa();
    let cls = classifier(kappa);
    let allowed: Vec<bool> = a.iter().map(|x| !x.is_zero()).collect();
    // per class: Σ over compositions of Π a_i^{c_i} / c_i!
    let mut per_class: HashMap<usize, T> = HashMap::new();
    let inv_fact: Vec<T> =
        (0..=kappa).map(|t| T::from_rational(&Rational::new(BigInt::one(), factorial(t as u64)))).collect();
    for_each_composition(kappa, &allowed, &mut |c| {
        let k = cls.class_of_bits(composition_bits(b, c));
        if gamma.weights()[k].is_zero() {
            return;
        }
        let mut term = T::one();
        for (i, &t) in c.iter().enumerate() {
            if t > 0 {
                term = term * a[i].pow(t as u32) * inv_fact[t].clone();
            }
        }
        let e = per_class.entry(k).or_insert_with(T::zero);
        *e = e.clone() + term;
    });
    let mut total = T::zero();
    let mut keys: Vec<usize> = per_class.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        total = total + per_class[&k].clone() * T::from_rational(&gamma.weights()[k]);
    }
    total * T::from_rational(&Rational::from_integer(factorial(kappa as u64)))
}

/// Exact `λ_γ` of the finite blowup with the given part sizes, computed
/// from binomial counts without building the graph.
pub fn finite_blowup_lambda(gamma: &Objective, b: &Pattern, sizes: &[usize]) -> Result<Rational, PatternError> {
    if sizes.len() != b.order() {
        return Err(PatternError::Length { expected: b.order(), got: sizes.len() });
    }
    let kappa = gamma.kappa();
    let n: usize = sizes.iter().sum();
    let cls = classifier(kappa);
    let allowed: Vec<bool> = sizes.iter().map(|&s| s > 0).collect();
    let mut total = Rational::zero();
    for_each_composition(kappa, &allowed, &mut |c| {
        if c.iter().zip(sizes).any(|(&t, &s)| t > s) {
            return;
        }
        let w = &gamma.weights()[cls.class_of_bits(composition_bits(b, c))];
        if w.is_zero() {
            return;
        }
        let ways: BigInt = c.iter().zip(sizes).map(|(&t, &s)| binomial(s as u64, t as u64)).product();
        total += w * Rational::from_integer(ways);
    });
    Ok(total / Rational::from_integer(binomial(n as u64, kappa as u64)))
}

/// `λ_γ` of the step graphon `w` at part weights `a`.
///
/// Pairs with probability strictly between 0 and 1 are summed over both
/// outcomes, so cost grows with `2^(fractional pairs)`.
pub fn step_lambda<T: Scalar>(gamma: &Objective, w: &StepGraphon<T>, a: &[T]) -> T {
    assert_eq!(a.len(), w.order());
    let kappa = gamma.kappa();
    let cls = classifier(kappa);
    let allowed: Vec<bool> = a.iter().map(|x| !x.is_zero()).collect();
    let inv_fact: Vec<T> =
        (0..=kappa).map(|t| T::from_rational(&Rational::new(BigInt::one(), factorial(t as u64)))).collect();
    let mut total = T::zero();
    for_each_composition(kappa, &allowed, &mut |c| {
        let part: Vec<usize> = c.iter().enumerate().flat_map(|(i, &t)| std::iter::repeat_n(i, t)).collect();
        let mut weight = T::one();
        for (i, &t) in c.iter().enumerate() {
            if t > 0 {
                weight = weight * a[i].pow(t as u32) * inv_fact[t].clone();
            }
        }
        let exp = pair_expectation(gamma, &cls, |u, v| w.prob(part[u], part[v]).clone(), kappa, 0, 0);
        total = total.clone() + weight * exp;
    });
    total * T::from_rational(&Rational::from_integer(factorial(kappa as u64)))
}

/// Expected `γ` of the random labeled graph on `k` vertices whose pair
/// `(u, v)` is an edge with probability `prob(u, v)`, given fixed `bits`
/// for the first `done` pairs in graph6 order.
fn pair_expectation<T: Scalar>(
    gamma: &Objective,
    cls: &crate::graphs::Classifier,
    prob: impl Fn(usize, usize) -> T + Copy,
    k: usize,
    done: usize,
    bits: u32,
) -> T {
    let total = k * k.saturating_sub(1) / 2;
    if done == total {
        return T::from_rational(&gamma.weights()[cls.class_of_bits(bits)]);
    }
    // recover (u, v) from the graph6 pair index
    let mut v = 1;
    while v * (v + 1) / 2 <= done {
        v += 1;
    }
    let u = done - v * (v - 1) / 2;
    let p = prob(u, v);
    if p.is_zero() {
        return pair_expectation(gamma, cls, prob, k, done + 1, bits);
    }
    if p == T::one() {
        return pair_expectation(gamma, cls, prob, k, done + 1, bits | 1 << done);
    }
    let on = pair_expectation(gamma, cls, prob, k, done + 1, bits | 1 << done);
    let off = pair_expectation(gamma, cls, prob, k, done + 1, bits);
    p.clone() * on + (T::one() - p) * off
}

/// First-order optimality report for `a` as a maximizer over the simplex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizerReport {
    /// All partial derivatives agree on the support of `a` (exact).
    pub is_critical: bool,
    /// No coordinate off the support has a larger derivative (exact).
    pub boundary_checked: bool,
    /// No sampled nearby simplex point beats `a` (floating point).
    pub neighborhood_local_max: bool,
    pub value: f64,
    pub gradient: Vec<f64>,
}

pub fn verify_maximizer<T: OrderedField>(gamma: &Objective, b: &Pattern, a: &[T]) -> Result<MaximizerReport, PatternError> {
    check_simplex(a, b.order())?;
    let poly = blowup_polynomial(gamma, b);
    let m = b.order();
    let grads: Vec<T> = (0..m).map(|i| poly.partial_derivative(i).eval_in(a, |c| T::from_rational(c))).collect();
    let support: Vec<usize> = (0..m).filter(|&i| !a[i].is_zero()).collect();
    let mu = grads[support[0]].clone();
    let is_critical = support.iter().all(|&i| grads[i].cmp_exact(&mu) == std::cmp::Ordering::Equal);
    let boundary_checked = (0..m)
        .filter(|i| !support.contains(i))
        .all(|i| grads[i].cmp_exact(&mu) != std::cmp::Ordering::Greater);
    let pf = poly.map_coeffs(rational_to_f64);
    let af: Vec<f64> = a.iter().map(|x| x.to_f64()).collect();
    let value = pf.eval(&af);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut local = true;
    for _ in 0..500 {
        let eps = 1e-3;
        let mut y: Vec<f64> = af.iter().map(|&x| x + eps * (rng.gen::<f64>() - 0.5)).collect();
        project_simplex(&mut y);
        if pf.eval(&y) > value + 1e-12 {
            local = false;
            break;
        }
    }
    Ok(MaximizerReport {
        is_critical,
        boundary_checked,
        neighborhood_local_max: local,
        value,
        gradient: grads.iter().map(|g| g.to_f64()).collect(),
    })
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(y: &mut [f64]) {
    let mut u: Vec<f64> = y.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in y.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Numeric local maximum of a polynomial over the simplex by projected
/// gradient ascent from `starts` random points (plus the barycentre).
pub fn maximize_on_simplex(p: &Poly<f64>, starts: usize, seed: u64) -> (f64, Vec<f64>) {
    let m = p.nvars();
    if m == 0 {
        return (p.eval(&[]), vec![]);
    }
    let grads: Vec<Poly<f64>> = (0..m).map(|i| p.partial_derivative(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits = vec![vec![1.0 / m as f64; m]];
    for _ in 0..starts {
        let mut x: Vec<f64> = (0..m).map(|_| -rng.gen::<f64>().ln()).collect();
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        inits.push(x);
    }
    let results: Vec<(f64, Vec<f64>)> = inits
        .into_par_iter()
        .map(|mut x| {
            let mut val = p.eval(&x);
            let mut step = 0.1;
            for _ in 0..2000 {
                let g: Vec<f64> = grads.iter().map(|d| d.eval(&x)).collect();
                let mut improved = false;
                while step > 1e-12 {
                    let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                    project_simplex(&mut y);
                    let v = p.eval(&y);
                    if v > val {
                        improved = v - val > 1e-15;
                        x = y;
                        val = v;
                        step *= 1.5;
                        break;
                    }
                    step *= 0.5;
                }
                if !improved {
                    break;
                }
            }
            (val, x)
        })
        .collect();
    results.into_iter().max_by(|a, b| a.0.partial_cmp(&b.0).unwrap()).unwrap()
}

/// One entry of [`minimality_probe`]; values are numeric and not rigorous.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeEntry {
    pub deleted: usize,
    pub best_value: f64,
    pub argmax: Vec<f64>,
    pub rigorous: bool,
}

/// For each vertex of `b`, the numeric maximum of `λ_γ` over blowups of
/// `b` with that vertex deleted. Diagnostic only.
pub fn minimality_probe(gamma: &Objective, b: &Pattern, starts: usize, seed: u64) -> Vec<ProbeEntry> {
    (0..b.order())
        .map(|v| {
            let sub = b.remove_vertex(v);
            let p = blowup_polynomial(gamma, &sub).map_coeffs(rational_to_f64);
            let (best_value, argmax) = maximize_on_simplex(&p, starts, seed ^ v as u64);
            ProbeEntry { deleted: v, best_value, argmax, rigorous: false }
        })
        .collect()
}

/// Integer part sizes `⌊a_i n⌋`, with the remainder handed out to the
/// largest fractional parts.
pub fn part_sizes(a: &[f64], n: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = a.iter().map(|x| (x * n as f64).floor() as usize).collect();
    let mut rest = n.saturating_sub(sizes.iter().sum());
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| {
        let fi = a[i] * n as f64 - sizes[i] as f64;
        let fj = a[j] * n as f64 - sizes[j] as f64;
        fj.partial_cmp(&fi).unwrap()
    });
    for &i in order.iter().cycle().take(a.len() * 2) {
        if rest == 0 {
            break;
        }
        sizes[i] += 1;
        rest -= 1;
    }
    sizes
}

/// Rooted densities help: flag-density vector of the limit object for roots
/// placed in parts `root_parts`, over the given flag basis. Entry `i` is the
/// probability that `s − q` independent random vertices (part `k` with
/// probability `a_k`), together with the roots, form flag `i`, conditional on
/// the root pairs realizing the type.
pub fn step_flag_vector<T: Scalar>(
    w: &StepGraphon<T>,
    a: &[T],
    root_parts: &[usize],
    basis: &crate::flags::FlagBasis,
) -> Option<Vec<T>> {
    let q = basis.q();
    let s = basis.s();
    assert_eq!(root_parts.len(), q);
    // the type must be realizable on these parts
    let mut type_prob = T::one();
    for j in 1..q {
        for i in 0..j {
            let p = w.prob(root_parts[i], root_parts[j]).clone();
            type_prob = type_prob * if basis.tau().has_edge(i, j) { p } else { T::one() - p };
        }
    }
    if type_prob.is_zero() {
        return None;
    }
    let k = s - q;
    let m = w.order();
    let mut out = vec![T::zero(); basis.len()];
    let mut parts = vec![0usize; k];
    let cq = q * q.saturating_sub(1) / 2;
    let total = (m as u64).pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut weight = T::one();
        for x in parts.iter_mut() {
            *x = (c % m as u64) as usize;
            c /= m as u64;
            weight = weight * a[*x].clone();
        }
        if weight.is_zero() {
            continue;
        }
        let all: Vec<usize> = root_parts.iter().chain(parts.iter()).copied().collect();
        // sum over outcomes of the non-root pairs
        let npairs = s * (s - 1) / 2 - cq;
        let mut stack: Vec<(usize, u64, T)> = vec![(0, 0, weight)];
        while let Some((t, ext, wt)) = stack.pop() {
            if t == npairs {
                if let Some(i) = basis.index_of_ext(ext) {
                    out[i] = out[i].clone() + wt;
                }
                continue;
            }
            let idx = cq + t;
            let mut v = 1;
            while v * (v + 1) / 2 <= idx {
                v += 1;
            }
            let u = idx - v * (v - 1) / 2;
            let p = w.prob(all[u], all[v]).clone();
            if !p.is_zero() {
                stack.push((t + 1, ext | 1 << t, wt.clone() * p.clone()));
            }
            if p != T::one() {
                stack.push((t + 1, ext, wt * (T::one() - p)));
            }
        }
    }
    Some(out)
}

/// Root-to-part assignments consistent with the type `tau` in pattern `b`.
pub fn root_assignments(tau: &Graph, b: &Pattern) -> Vec<Vec<usize>> {
    homomorphisms(tau, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{gamma_edge, gamma_graph};
    use crate::scalar::{int, rat};

    #[test]
    fn parse_forms() {
        let p = Pattern::parse("3:01,22").unwrap();
        assert!(p.adjacent(0, 1) && p.has_loop(2) && !p.has_loop(0));
        assert_eq!(Pattern::parse(&p.to_text()).unwrap(), p);
        let k2 = Pattern::parse("K2").unwrap();
        assert_eq!(k2.edges(), vec![(0, 1)]);
        let j = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(Pattern::parse(&j).unwrap(), p);
        assert!(Pattern::parse("2:03").is_err());
        assert_eq!(Pattern::parse("12:0-11,5-5").unwrap().order(), 12);
    }

    #[test]
    fn blowups() {
        let two = Pattern::loops_only(2);
        let g = blowup_build(&two, &[3, 3]).unwrap().to_graph().unwrap();
        assert!(crate::graphs::is_isomorphic(&g, &Graph::complete(3).disjoint_union(&Graph::complete(3))));
        let k = blowup_build(&Pattern::parse("K2").unwrap(), &[2, 3]).unwrap().to_graph().unwrap();
        assert_eq!(k, Graph::complete_bipartite(2, 3));
    }

    #[test]
    fn homomorphism_examples() {
        let k2 = Graph::complete(2);
        assert_eq!(homomorphisms(&k2, &Pattern::loops_only(1)).len(), 1);
        assert_eq!(homomorphisms(&k2, &Pattern::loops_only(2)).len(), 2);
        assert!(homomorphisms(&Graph::complete(3), &Pattern::parse("K2").unwrap()).is_empty());
        assert_eq!(homomorphism_orbits(&k2, &Pattern::loops_only(2)).len(), 1);
    }

    #[test]
    fn p_of_x() {
        let p = blowup_polynomial(&gamma_edge(4, 3).unwrap(), &Pattern::loops_only(2));
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[3, 1]), int(4));
        assert_eq!(p.coeff(&[1, 3]), int(4));
        let v = eval_blowup(&gamma_edge(6, 7).unwrap(), &Pattern::loops_only(2), &[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(v, rat(15, 32));
    }

    #[test]
    fn finite_counts_match_graph_counts() {
        let b = Pattern::parse("4:00,01,12,23,33").unwrap();
        let g = blowup_build(&b, &[2, 2, 1, 3]).unwrap();
        let gamma = gamma_edge(5, 5).unwrap();
        let direct = crate::objectives::lambda_eval(&gamma, &g).unwrap().1;
        assert_eq!(finite_blowup_lambda(&gamma, &b, &[2, 2, 1, 3]).unwrap(), direct);
    }

    #[test]
    fn step_graphon_agrees_with_pattern() {
        let b = Pattern::parse("3:01,22").unwrap();
        let gamma = gamma_edge(5, 3).unwrap();
        let a = [rat(1, 5), rat(1, 3), rat(7, 15)];
        assert_eq!(step_lambda(&gamma, &b.to_step(), &a), eval_blowup(&gamma, &b, &a).unwrap());
        // edge density of G(1/3)
        let e = gamma_graph(&Graph::complete(2)).unwrap();
        assert_eq!(step_lambda(&e, &StepGraphon::constant(rat(1, 3)), &[int(1)]), rat(1, 3));
    }

    #[test]
    fn maximizer_report() {
        let r = verify_maximizer(&gamma_edge(4, 3).unwrap(), &Pattern::loops_only(2), &[rat(1, 2), rat(1, 2)]).unwrap();
        assert!(r.is_critical && r.boundary_checked && r.neighborhood_local_max);
        let r = verify_maximizer(&gamma_edge(4, 3).unwrap(), &Pattern::loops_only(2), &[rat(1, 3), rat(2, 3)]).unwrap();
        assert!(!r.is_critical);
    }

    #[test]
    fn simplex_projection() {
        let mut y = vec![0.5, 0.9, -0.2];
        project_simplex(&mut y);
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(y.iter().all(|&v| v >= 0.0));
        assert_eq!(part_sizes(&[0.5, 0.5], 7).iter().sum::<usize>(), 7);
    }
}
