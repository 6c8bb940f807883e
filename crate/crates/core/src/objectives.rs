//! Objectives `γ` on `κ`-vertex graphs and the evaluators `Λ_γ`, `λ_γ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{
    automorphism_count, canonical_form, classifier, enumerate_graphs, graph6, induced_counts, walk_subsets_containing,
    Adjacency, Graph, GraphError,
};
use crate::scalar::{binomial, factorial, format_rational, parse_rational, Rational};

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("edge count {l} out of range for {kappa} vertices")]
    EdgeRange { kappa: usize, l: usize },
    #[error("objective order {0} outside 2..=8")]
    Order(usize),
    #[error("host graph has {n} vertices, fewer than κ = {kappa}")]
    HostTooSmall { n: usize, kappa: usize },
    #[error("red and blue edges overlap or orders differ")]
    BadColoring,
    #[error("bad objective descriptor: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Largest `κ` accepted (classification tables stop at 8).
pub const MAX_KAPPA: usize = 8;

/// How an objective was built; serialized alongside its weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ObjectiveKind {
    Edge { kappa: usize, l: usize },
    Graph { graph6: String },
    Semi { red: String, blue: String },
    Custom,
}

/// A weight per isomorphism class of `κ`-vertex graphs, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    kappa: usize,
    weights: Vec<Rational>,
    kind: ObjectiveKind,
}

/// Two disjoint edge sets on a common vertex set; other pairs are free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub red: Graph,
    pub blue: Graph,
}

impl ColoredGraph {
    pub fn new(red: Graph, blue: Graph) -> Result<Self, ObjectiveError> {
        if red.order() != blue.order() || red.edges().iter().any(|&(u, v)| blue.has_edge(u, v)) {
            return Err(ObjectiveError::BadColoring);
        }
        Ok(ColoredGraph { red, blue })
    }

    pub fn order(&self) -> usize {
        self.red.order()
    }

    /// Path with colours alternating along its edges, starting with `first_red`.
    pub fn alternating_path(edges: usize, first_red: bool) -> Self {
        let mut red = Graph::empty(edges + 1);
        let mut blue = Graph::empty(edges + 1);
        for i in 0..edges {
            if (i % 2 == 0) == first_red {
                red.add_edge(i, i + 1);
            } else {
                blue.add_edge(i, i + 1);
            }
        }
        ColoredGraph { red, blue }
    }

    /// Even cycle with alternating colours.
    pub fn alternating_cycle(len: usize) -> Self {
        assert!(len >= 4 && len % 2 == 0, "alternating cycle needs even length >= 4");
        let mut red = Graph::empty(len);
        let mut blue = Graph::empty(len);
        for i in 0..len {
            if i % 2 == 0 {
                red.add_edge(i, (i + 1) % len);
            } else {
                blue.add_edge(i, (i + 1) % len);
            }
        }
        ColoredGraph { red, blue }
    }

    /// Number of bijections `V(self) → V(f)` sending red pairs to edges and
    /// blue pairs to non-edges.
    pub fn compatible_bijections(&self, f: &Graph) -> u64 {
        let k = self.order();
        assert_eq!(k, f.order());
        let mut img = vec![0usize; k];
        let mut count = 0u64;
        fn rec(h: &ColoredGraph, f: &Graph, d: usize, used: u16, img: &mut Vec<usize>, count: &mut u64) {
            let k = h.order();
            if d == k {
                *count += 1;
                return;
            }
            for v in 0..k {
                if used >> v & 1 == 1 {
                    continue;
                }
                let ok = (0..d).all(|i| {
                    let e = f.has_edge(img[i], v);
                    !(h.red.has_edge(i, d) && !e || h.blue.has_edge(i, d) && e)
                });
                if ok {
                    img[d] = v;
                    rec(h, f, d + 1, used | 1 << v, img, count);
                }
            }
        }
        rec(self, f, 0, 0, &mut img, &mut count);
        count
    }
}

fn check_kappa(kappa: usize) -> Result<(), ObjectiveError> {
    if !(2..=MAX_KAPPA).contains(&kappa) {
        return Err(ObjectiveError::Order(kappa));
    }
    Ok(())
}

impl Objective {
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    /// The `κ`-vertex basis the weights are indexed by.
    pub fn basis(&self) -> Arc<Vec<Graph>> {
        enumerate_graphs(self.kappa, None).expect("kappa in range")
    }

    /// Weight of the class of `f`.
    pub fn weight_of(&self, f: &Graph) -> &Rational {
        &self.weights[classifier(self.kappa).class_of(f)]
    }

    pub fn custom(kappa: usize, weights: Vec<Rational>) -> Result<Self, ObjectiveError> {
        check_kappa(kappa)?;
        let n = enumerate_graphs(kappa, None)?.len();
        if weights.len() != n {
            return Err(ObjectiveError::Parse(format!("{} weights given, {n} classes", weights.len())));
        }
        Ok(Objective { kappa, weights, kind: ObjectiveKind::Custom })
    }

    /// Objective for the complementary problem: `γ'(F) = γ(F̄)`.
    pub fn complemented(&self) -> Self {
        let basis = self.basis();
        let cls = classifier(self.kappa);
        let weights = basis.iter().map(|f| self.weights[cls.class_of(&f.complement())].clone()).collect();
        let kind = match &self.kind {
            ObjectiveKind::Edge { kappa, l } => ObjectiveKind::Edge { kappa: *kappa, l: kappa * (kappa - 1) / 2 - l },
            _ => ObjectiveKind::Custom,
        };
        Objective { kappa: self.kappa, weights, kind }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ObjectiveKind::Edge { kappa, l } => format!("edge:{kappa},{l}"),
            ObjectiveKind::Graph { graph6 } => format!("graph:{graph6}"),
            ObjectiveKind::Semi { red, blue } => format!("semi:{red}/{blue}"),
            ObjectiveKind::Custom => "custom".into(),
        }
    }

    pub fn to_json(&self) -> ObjectiveJson {
        let basis = self.basis();
        ObjectiveJson {
            kind: self.kind.clone(),
            kappa: self.kappa,
            weights: basis
                .iter()
                .zip(&self.weights)
                .filter(|(_, w)| !w.is_zero())
                .map(|(g, w)| (graph6::encode(g), format_rational(w)))
                .collect(),
        }
    }

    /// Rebuilds from JSON. Named kinds are reconstructed from their
    /// parameters and must agree with any listed weights.
    pub fn from_json(j: &ObjectiveJson) -> Result<Self, ObjectiveError> {
        let from_weights = || -> Result<Objective, ObjectiveError> {
            check_kappa(j.kappa)?;
            let cls = classifier(j.kappa);
            let mut w = vec![Rational::zero(); cls.len()];
            for (g6, v) in &j.weights {
                let g = graph6::decode(g6)?;
                if g.order() != j.kappa {
                    return Err(ObjectiveError::Parse(format!("{g6} has the wrong order")));
                }
                w[cls.class_of(&g)] = parse_rational(v).ok_or_else(|| ObjectiveError::Parse(v.clone()))?;
            }
            Ok(Objective { kappa: j.kappa, weights: w, kind: ObjectiveKind::Custom })
        };
        let named = match &j.kind {
            ObjectiveKind::Edge { kappa, l } => gamma_edge(*kappa, *l)?,
            ObjectiveKind::Graph { graph6: g6 } => gamma_graph(&graph6::decode(g6)?)?,
            ObjectiveKind::Semi { red, blue } => {
                gamma_semi(&ColoredGraph::new(graph6::decode(red)?, graph6::decode(blue)?)?)?
            }
            ObjectiveKind::Custom => return from_weights(),
        };
        if !j.weights.is_empty() && from_weights()?.weights != named.weights {
            return Err(ObjectiveError::Parse("listed weights disagree with the named objective".into()));
        }
        Ok(named)
    }

    /// Parses `edge:K,L`, `graph:<g6>`, `semi:<red g6>/<blue g6>` or
    /// `custom:<path>`.
    pub fn parse(s: &str) -> Result<Self, ObjectiveError> {
        let bad = || ObjectiveError::Parse(s.to_string());
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "edge" => {
                let (k, l) = rest.split_once(',').ok_or_else(bad)?;
                gamma_edge(k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?)
            }
            "graph" => gamma_graph(&graph6::decode(rest)?),
            "semi" => {
                let (r, b) = rest.split_once('/').ok_or_else(bad)?;
                gamma_semi(&ColoredGraph::new(graph6::decode(r)?, graph6::decode(b)?)?)
            }
            "custom" => {
                let text = std::fs::read_to_string(rest).map_err(|e| ObjectiveError::Parse(format!("{rest}: {e}")))?;
                let j: ObjectiveJson =
                    serde_json::from_str(&text).map_err(|e| ObjectiveError::Parse(format!("{rest}: {e}")))?;
                Self::from_json(&j)
            }
            _ => Err(bad()),
        }
    }
}

/// Objective JSON: `{kind, kappa, params..., weights: {graph6: value}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveJson {
    #[serde(flatten)]
    pub kind: ObjectiveKind,
    pub kappa: usize,
    #[serde(default)]
    pub weights: BTreeMap<String, String>,
}

/// Indicator of "exactly `l` edges" on `κ` vertices.
pub fn gamma_edge(kappa: usize, l: usize) -> Result<Objective, ObjectiveError> {
    check_kappa(kappa)?;
    if l > kappa * (kappa - 1) / 2 {
        return Err(ObjectiveError::EdgeRange { kappa, l });
    }
    let weights = enumerate_graphs(kappa, None)?
        .iter()
        .map(|g| if g.edge_count() == l { Rational::one() } else { Rational::zero() })
        .collect();
    Ok(Objective { kappa, weights, kind: ObjectiveKind::Edge { kappa, l } })
}

/// Indicator of the class of `f`.
pub fn gamma_graph(f: &Graph) -> Result<Objective, ObjectiveError> {
    let kappa = f.order();
    check_kappa(kappa)?;
    let key = canonical_form(f).key;
    let weights = enumerate_graphs(kappa, None)?
        .iter()
        .map(|g| if canonical_form(g).key == key { Rational::one() } else { Rational::zero() })
        .collect();
    Ok(Objective { kappa, weights, kind: ObjectiveKind::Graph { graph6: graph6::encode(&key.graph()) } })
}

/// Semi-inducibility weights: compatible bijections over `κ!`.
pub fn gamma_semi(h: &ColoredGraph) -> Result<Objective, ObjectiveError> {
    let kappa = h.order();
    check_kappa(kappa)?;
    let kf = factorial(kappa as u64);
    let weights = enumerate_graphs(kappa, None)?
        .iter()
        .map(|g| Rational::new(BigInt::from(h.compatible_bijections(g)), kf.clone()))
        .collect();
    Ok(Objective {
        kappa,
        weights,
        kind: ObjectiveKind::Semi { red: graph6::encode(&h.red), blue: graph6::encode(&h.blue) },
    })
}

/// `(Λ_γ(G), λ_γ(G))`.
pub fn lambda_eval<A: Adjacency>(gamma: &Objective, g: &A) -> Result<(Rational, Rational), ObjectiveError> {
    let n = g.order();
    if n < gamma.kappa {
        return Err(ObjectiveError::HostTooSmall { n, kappa: gamma.kappa });
    }
    let counts = induced_counts(g, gamma.kappa);
    let big = weighted(&gamma.weights, &counts);
    let small = big.clone() / Rational::from_integer(binomial(n as u64, gamma.kappa as u64));
    Ok((big, small))
}

fn weighted(w: &[Rational], counts: &[u64]) -> Rational {
    let mut acc = Rational::zero();
    for (c, x) in counts.iter().zip(w) {
        if *c != 0 && !x.is_zero() {
            acc += x * Rational::from_integer(BigInt::from(*c));
        }
    }
    acc
}

/// `λ_γ(F)` for every graph in `graphs` (all of one order `N ≥ κ`).
pub fn lambda_on_basis(gamma: &Objective, graphs: &[Graph]) -> Result<Vec<Rational>, ObjectiveError> {
    graphs.par_iter().map(|g| lambda_eval(gamma, g).map(|x| x.1)).collect()
}

/// `Λ_γ(G, u)`: the weighted count of `κ`-subsets containing `u`.
pub fn lambda_vertex<A: Adjacency>(gamma: &Objective, g: &A, u: usize) -> Result<Rational, ObjectiveError> {
    let n = g.order();
    if n < gamma.kappa {
        return Err(ObjectiveError::HostTooSmall { n, kappa: gamma.kappa });
    }
    let cls = classifier(gamma.kappa);
    let mut counts = vec![0u64; cls.len()];
    walk_subsets_containing(g, gamma.kappa, u, &mut |b| counts[cls.class_of_bits(b)] += 1);
    Ok(weighted(&gamma.weights, &counts))
}

/// `t(F, G) = |aut(F)|/κ! · p(F, G)`: the probability that a uniformly
/// random injection `V(F) → V(G)` is an induced embedding.
pub fn embedding_density<A: Adjacency>(f: &Graph, g: &A) -> Result<Rational, ObjectiveError> {
    let p = crate::graphs::induced_density(f, g)?;
    let aut = Rational::from_integer(BigInt::from(automorphism_count(f)));
    Ok(p * aut / Rational::from_integer(factorial(f.order() as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn edge_objective() {
        let g = gamma_edge(4, 3).unwrap();
        assert_eq!(*g.weight_of(&Graph::path(4)), int(1));
        assert_eq!(*g.weight_of(&Graph::cycle(4)), int(0));
        assert_eq!(g.weights().iter().filter(|w| !w.is_zero()).count(), 3);
        assert!(gamma_edge(4, 7).is_err());
        assert_eq!(lambda_eval(&g, &Graph::cycle(5)).unwrap().1, int(1));
    }

    #[test]
    fn vertex_contributions_sum() {
        let g = gamma_edge(3, 2).unwrap();
        let star = Graph::star(3);
        let center = lambda_vertex(&g, &star, 0).unwrap();
        let leaf = lambda_vertex(&g, &star, 1).unwrap();
        assert_ne!(center, leaf);
        let total: Rational = (0..4).map(|u| lambda_vertex(&g, &star, u).unwrap()).sum();
        assert_eq!(total, lambda_eval(&g, &star).unwrap().0 * int(3));
    }

    #[test]
    fn semi_weights() {
        let red_edge = ColoredGraph::new(Graph::complete(2), Graph::empty(2)).unwrap();
        let g = gamma_semi(&red_edge).unwrap();
        let c5 = Graph::cycle(5);
        assert_eq!(lambda_eval(&g, &c5).unwrap().1, rat(1, 2));
        let p4 = ColoredGraph::alternating_path(3, false);
        assert_eq!(p4.blue.edge_count(), 2);
        assert_eq!(lambda_eval(&gamma_semi(&p4).unwrap(), &Graph::complete(5)).unwrap().1, int(0));
    }

    #[test]
    fn embedding_density_examples() {
        assert_eq!(embedding_density(&Graph::complete(2), &Graph::complete(3)).unwrap(), int(1));
        assert_eq!(embedding_density(&Graph::path(3), &Graph::cycle(4)).unwrap(), rat(1, 3));
    }

    #[test]
    fn parse_and_json() {
        let g = Objective::parse("edge:5,4").unwrap();
        assert_eq!(g, gamma_edge(5, 4).unwrap());
        let j = serde_json::to_string(&g.to_json()).unwrap();
        let back = Objective::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(Objective::parse("edge:5").is_err());
        assert_eq!(g.complemented(), gamma_edge(5, 6).unwrap());
    }
}
