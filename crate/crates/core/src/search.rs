//! Brute force over small orders, random samplers, quasirandomness checks,
//! edit distance to blowups and flip-based local search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{
    classifier, enumerate_graphs, graph6, pair_index, Adjacency, Classifier, DenseGraph, GraphError, HereditaryFamily,
    MAX_ENUM_ORDER,
};
use crate::objectives::{lambda_eval, Objective, ObjectiveError, ObjectiveJson};
use crate::patterns::{blowup_build, Pattern};
use crate::scalar::{binomial, format_rational, rational_to_f64, Rational};

/// Exact search is attempted only when `m^n` is at most this.
pub const EXACT_EDIT_LIMIT: u64 = 10_000_000;
/// Random restarts of the heuristic edit distance.
pub const EDIT_RESTARTS: usize = 32;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("order {n} is outside 1..={max}")]
    Order { n: usize, max: usize },
    #[error("probability {0} is not in [0, 1] with a 64-bit denominator")]
    Probability(String),
    #[error("partition has length {got}, graph has {n} vertices")]
    Partition { got: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Heuristic,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// A named value compared against the record's maximum.
#[derive(Clone, Debug, Serialize)]
pub struct Reference {
    pub label: String,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    /// The maximum equals `value`.
    pub attained: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalRecord {
    pub n: usize,
    pub objective: ObjectiveJson,
    /// `max Λ_γ(G)` over all `n`-vertex graphs.
    #[serde(serialize_with = "ser_rational")]
    pub max: Rational,
    pub argmax: Vec<String>,
    pub method: Method,
    pub classes: usize,
    pub reference: Option<Reference>,
}

impl ExtremalRecord {
    /// Records how the maximum relates to `value`.
    pub fn compare_with(&mut self, label: impl Into<String>, value: Rational) {
        let attained = self.max == value;
        self.reference = Some(Reference { label: label.into(), value, attained });
    }
}

/// `Λ_γ(n)` and all extremal classes, by exhaustive enumeration.
pub fn brute_max(gamma: &Objective, n: usize, family: Option<&HereditaryFamily>) -> Result<ExtremalRecord, SearchError> {
    if n == 0 || n > MAX_ENUM_ORDER {
        return Err(SearchError::Order { n, max: MAX_ENUM_ORDER });
    }
    let graphs = enumerate_graphs(n, family)?;
    let values: Vec<Rational> =
        graphs.par_iter().map(|g| lambda_eval(gamma, g).map(|v| v.0)).collect::<Result<_, _>>()?;
    let max = values.iter().max().cloned().unwrap_or_else(Rational::zero);
    let argmax = graphs.iter().zip(&values).filter(|(_, v)| **v == max).map(|(g, _)| graph6::encode(g)).collect();
    Ok(ExtremalRecord {
        n,
        objective: gamma.to_json(),
        max,
        argmax,
        method: Method::Exhaustive,
        classes: graphs.len(),
        reference: None,
    })
}

/// `Λ_{4,3}(K_m ⊔ K_{n−m}) = m·C(n−m, 3) + C(m, 3)·(n−m)`.
pub fn split_value(n: u64, m: u64) -> BigInt {
    assert!(m <= n);
    BigInt::from(m) * binomial(n - m, 3) + binomial(m, 3) * BigInt::from(n - m)
}

/// `(1/6)(n−2m−1)(4m²−4mn+4m+n²−5n+6)`: the change of [`split_value`]
/// when `m` grows by one.
pub fn increment_formula(n: &Rational, m: &Rational) -> Rational {
    let one = Rational::from_integer(1.into());
    let k = |x: i64| Rational::from_integer(x.into());
    let a = n - k(2) * m - &one;
    let b = k(4) * m * m - k(4) * m * n + k(4) * m + n * n - k(5) * n + k(6);
    a * b / k(6)
}

/// `R(G, p)`: every edge of `g` is kept independently with probability `p`.
/// Edges are visited in the order `(u, v)`, `u < v` lexicographic, and edge
/// `e` is kept iff a uniform draw from `0..den` is below `num`.
pub fn sample_subgraph<A: Adjacency>(g: &A, p: &Rational, seed: u64) -> Result<DenseGraph, SearchError> {
    let bad = || SearchError::Probability(format_rational(p));
    let num = p.numer().to_u64().ok_or_else(bad)?;
    let den = p.denom().to_u64().ok_or_else(bad)?;
    if num > den {
        return Err(bad());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.order();
    let mut out = DenseGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) && rng.gen_range(0..den) < num {
                out.add_edge(u, v);
            }
        }
    }
    Ok(out)
}

/// `K_n` as a dense graph.
pub fn complete_dense(n: usize) -> DenseGraph {
    blowup_build(&Pattern::loops_only(1), &[n]).expect("sizes match the pattern")
}

/// `K_{a,b}` as a dense graph, parts `0..a` and `a..a+b`.
pub fn complete_bipartite_dense(a: usize, b: usize) -> DenseGraph {
    blowup_build(&Pattern::new(2, &[(0, 1)]).expect("valid pattern"), &[a, b]).expect("sizes match the pattern")
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasirandomReport {
    /// `e(A, B)/(|A||B|)`.
    pub edge_density: f64,
    /// Homomorphism density of `C4` with sides mapped to `A` and `B`.
    pub c4_density: f64,
    pub edge_deviation: f64,
    pub c4_deviation: f64,
    pub within_tolerance: bool,
}

/// Bipartite quasirandomness of `g` across `partition` (values 0 and 1),
/// compared with densities `c` and `c⁴`. Edges inside a part are ignored.
pub fn quasirandom_check<A: Adjacency>(
    g: &A,
    partition: &[usize],
    c: f64,
    tol: f64,
) -> Result<QuasirandomReport, SearchError> {
    let n = g.order();
    if partition.len() != n {
        return Err(SearchError::Partition { got: partition.len(), n });
    }
    let a: Vec<usize> = (0..n).filter(|&v| partition[v] == 0).collect();
    let b: Vec<usize> = (0..n).filter(|&v| partition[v] != 0).collect();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut edges = 0u64;
    let mut c4 = 0u128;
    for &x in &a {
        edges += b.iter().filter(|&&y| g.has_edge(x, y)).count() as u64;
        for &x2 in &a {
            let cod = b.iter().filter(|&&y| g.has_edge(x, y) && g.has_edge(x2, y)).count() as u128;
            c4 += cod * cod;
        }
    }
    let edge_density = if a.is_empty() || b.is_empty() { 0.0 } else { edges as f64 / (na * nb) };
    let c4_density = if a.is_empty() || b.is_empty() { 0.0 } else { c4 as f64 / (na * na * nb * nb) };
    let edge_deviation = (edge_density - c).abs();
    let c4_deviation = (c4_density - c.powi(4)).abs();
    Ok(QuasirandomReport {
        edge_density,
        c4_density,
        edge_deviation,
        c4_deviation,
        within_tolerance: edge_deviation <= tol && c4_deviation <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EditResult {
    pub value: u64,
    /// Part of `B` for every vertex.
    pub partition: Vec<usize>,
    pub method: Method,
}

fn edit_cost<A: Adjacency>(g: &A, b: &Pattern, phi: &[usize]) -> u64 {
    let n = g.order();
    let mut c = 0;
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) != b.adjacent(phi[u], phi[v]) {
                c += 1;
            }
        }
    }
    c
}

/// Fewest adjacency changes turning `g` into a blowup of `b` (parts may be
/// empty). Exhaustive branch and bound when `m^n ≤ 10⁷` and `exact` is
/// requested; otherwise vertex-reassignment descent from
/// [`EDIT_RESTARTS`] seeded random starts, an upper bound.
pub fn edit_distance_to_blowup<A: Adjacency>(g: &A, b: &Pattern, exact: bool, seed: u64) -> EditResult {
    let n = g.order();
    let m = b.order();
    let size = (m as f64).powi(n as i32);
    if exact && size <= EXACT_EDIT_LIMIT as f64 {
        let mut best = (u64::MAX, vec![0; n]);
        let mut phi = Vec::with_capacity(n);
        fn rec<A: Adjacency>(g: &A, b: &Pattern, phi: &mut Vec<usize>, cost: u64, best: &mut (u64, Vec<usize>)) {
            let d = phi.len();
            if cost >= best.0 {
                return;
            }
            if d == g.order() {
                *best = (cost, phi.clone());
                return;
            }
            for part in 0..b.order() {
                let add = (0..d).filter(|&u| g.has_edge(u, d) != b.adjacent(phi[u], part)).count() as u64;
                phi.push(part);
                rec(g, b, phi, cost + add, best);
                phi.pop();
            }
        }
        if m > 0 {
            rec(g, b, &mut phi, 0, &mut best);
        }
        return EditResult { value: best.0, partition: best.1, method: Method::Exhaustive };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (u64::MAX, vec![0; n]);
    for _ in 0..EDIT_RESTARTS {
        let mut phi: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m.max(1))).collect();
        loop {
            let mut improved = false;
            for v in 0..n {
                let cost_at = |p: usize, phi: &[usize]| {
                    (0..n).filter(|&u| u != v && g.has_edge(u, v) != b.adjacent(phi[u], p)).count()
                };
                let cur = cost_at(phi[v], &phi);
                let (bp, bc) = (0..m).map(|p| (p, cost_at(p, &phi))).min_by_key(|x| x.1).unwrap_or((phi[v], cur));
                if bc < cur {
                    phi[v] = bp;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let c = edit_cost(g, b, &phi);
        if c < best.0 {
            best = (c, phi);
        }
    }
    EditResult { value: best.0, partition: best.1, method: Method::Heuristic }
}

#[derive(Clone, Debug)]
pub struct LocalSearchResult {
    pub graph: DenseGraph,
    pub value: Rational,
    pub flips: usize,
    /// No single flip improves the value.
    pub local_optimum: bool,
}

/// Improves `Λ_γ` by single-pair flips, returning the best graph seen (so
/// the value never drops below that of `g`). Each step takes the best
/// strictly improving flip; failing that, a seeded random flip keeping the
/// value (at most `n` in a row); failing that, two random flips applied to the best graph so far. `budget` bounds the
/// total number of flips.
pub fn local_search(gamma: &Objective, g: &DenseGraph, budget: usize, seed: u64) -> Result<LocalSearchResult, SearchError> {
    let n = g.order();
    let mut cur = g.clone();
    let mut value = lambda_eval(gamma, &cur)?.0;
    let mut best = (cur.clone(), value.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    if pairs.is_empty() {
        return Ok(LocalSearchResult { graph: cur, value, flips: 0, local_optimum: true });
    }
    if n < gamma.kappa() {
        return Err(ObjectiveError::HostTooSmall { n, kappa: gamma.kappa() }.into());
    }
    let cls = classifier(gamma.kappa());
    let (scaled, denom) = integer_weights(gamma.weights());
    let delta_of = |h: &mut DenseGraph, u: usize, v: usize| -> Result<Rational, SearchError> {
        Ok(Rational::new(flip_delta(gamma.kappa(), &scaled, &cls, h, u, v).into(), denom.clone()))
    };
    let mut flips = 0;
    let mut plateau = 0;
    while flips < budget {
        let mut up: Option<((usize, usize), Rational)> = None;
        let mut level = Vec::new();
        for &(u, v) in &pairs {
            let d = delta_of(&mut cur, u, v)?;
            if d.is_zero() {
                level.push((u, v));
            } else if d > Rational::zero() && up.as_ref().is_none_or(|b| d > b.1) {
                up = Some(((u, v), d));
            }
        }
        let moves: Vec<(usize, usize)> = match (up, level.choose(&mut rng)) {
            (Some((e, _)), _) => {
                plateau = 0;
                vec![e]
            }
            (None, Some(&e)) if plateau < n => {
                plateau += 1;
                vec![e]
            }
            _ => {
                // kick from the best graph so far
                plateau = 0;
                cur = best.0.clone();
                value = best.1.clone();
                (0..2).map(|_| *pairs.choose(&mut rng).expect("nonempty")).collect()
            }
        };
        for (u, v) in moves {
            if flips == budget {
                break;
            }
            value += delta_of(&mut cur, u, v)?;
            cur.toggle_edge(u, v);
            flips += 1;
        }
        if value > best.1 {
            best = (cur.clone(), value.clone());
        }
    }
    let (mut graph, value) = best;
    let mut local_optimum = true;
    for &(u, v) in &pairs {
        if delta_of(&mut graph, u, v)? > Rational::zero() {
            local_optimum = false;
            break;
        }
    }
    Ok(LocalSearchResult { graph, value, flips, local_optimum })
}

/// Change of `Λ_γ` (scaled) when the pair `uv` is flipped: only
/// `κ`-subsets holding both ends are affected. Weights are `w·denom`.
fn flip_delta(k: usize, w: &[i128], cls: &Classifier, g: &DenseGraph, u: usize, v: usize) -> i128 {
    let others: Vec<usize> = (0..g.order()).filter(|&x| x != u && x != v).collect();
    let mut acc = 0i128;
    let mut pick: Vec<usize> = (0..k - 2).collect();
    let mut verts = vec![u, v];
    verts.resize(k, 0);
    loop {
        for (i, &p) in pick.iter().enumerate() {
            verts[i + 2] = others[p];
        }
        let mut bits = 0u32;
        for j in 1..k {
            for i in 0..j {
                if g.has_edge(verts[i], verts[j]) {
                    bits |= 1 << pair_index(i, j);
                }
            }
        }
        let (a, b) = (cls.class_of_bits(bits), cls.class_of_bits(bits ^ 1));
        acc += w[b] - w[a];
        // next (k − 2)-combination of the others
        let mut i = pick.len();
        while i > 0 && pick[i - 1] == others.len() - pick.len() + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        pick[i - 1] += 1;
        for j in i..pick.len() {
            pick[j] = pick[j - 1] + 1;
        }
    }
    acc
}

/// Weights as integers over a common denominator.
fn integer_weights(w: &[Rational]) -> (Vec<i128>, BigInt) {
    let denom = w.iter().fold(BigInt::from(1), |d, x| d.lcm(x.denom()));
    let scaled = w
        .iter()
        .map(|x| (x * Rational::from_integer(denom.clone())).to_integer().to_i128().expect("weights fit in i128"))
        .collect();
    (scaled, denom)
}

/// `λ_γ` as a float, for reporting sampled graphs.
pub fn lambda_f64<A: Adjacency>(gamma: &Objective, g: &A) -> Result<f64, SearchError> {
    Ok(rational_to_f64(&lambda_eval(gamma, g)?.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::objectives::gamma_edge;
    use crate::scalar::{int, rat};

    #[test]
    fn empty_graph_maximizes_zero_edges() {
        let r = brute_max(&gamma_edge(3, 0).unwrap(), 5, None).unwrap();
        assert_eq!(r.max, Rational::from_integer(binomial(5, 3)));
        assert_eq!(r.argmax, vec![graph6::encode(&Graph::empty(5))]);
        assert_eq!(r.classes, 34);
    }

    #[test]
    fn increment_matches_split_values() {
        for n in 2..15u64 {
            for m in 0..n {
                let d = Rational::from_integer(split_value(n, m + 1) - split_value(n, m));
                assert_eq!(increment_formula(&int(n as i64), &int(m as i64)), d);
            }
        }
        assert_eq!(increment_formula(&int(7), &int(0)), int(20));
    }

    #[test]
    fn sampling_extremes() {
        let k = complete_dense(9);
        assert_eq!(sample_subgraph(&k, &int(1), 3).unwrap(), k);
        assert_eq!(sample_subgraph(&k, &int(0), 3).unwrap().edge_count(), 0);
        let a = sample_subgraph(&k, &rat(1, 3), 11).unwrap();
        assert_eq!(a, sample_subgraph(&k, &rat(1, 3), 11).unwrap());
        assert!(sample_subgraph(&k, &rat(4, 3), 1).is_err());
    }

    #[test]
    fn complete_bipartite_is_quasirandom_with_density_one() {
        let g = complete_bipartite_dense(5, 7);
        let part: Vec<usize> = (0..12).map(|v| (v >= 5) as usize).collect();
        let r = quasirandom_check(&g, &part, 1.0, 1e-12).unwrap();
        assert_eq!(r.edge_deviation, 0.0);
        assert_eq!(r.c4_deviation, 0.0);
    }

    #[test]
    fn blowups_have_zero_edit_distance() {
        let b = Pattern::parse("3:00,01,12").unwrap();
        let g = blowup_build(&b, &[2, 3, 2]).unwrap();
        assert_eq!(edit_distance_to_blowup(&g, &b, true, 0).value, 0);
        assert_eq!(edit_distance_to_blowup(&g, &b, false, 0).value, 0);
    }
}
