//! Small simple graphs: bitset storage, canonical labeling, graph6,
//! enumeration up to isomorphism and induced-subgraph counting.

mod canon;
mod count;
mod dense;
mod enumerate;
pub mod graph6;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canon::{automorphism_count, canonical_form, canonical_form_rooted, is_isomorphic, Canon, CanonKey};
pub use count::{
    classifier, count_induced, for_each_subset_bits, induced_counts, induced_density, walk_subsets_containing,
    Classifier, MAX_CLASSIFIER_ORDER,
};
pub use dense::DenseGraph;
pub use enumerate::{enumerate_by_edge_augmentation, enumerate_graphs, MAX_ENUM_ORDER};

/// Largest order storable in a [`Graph`].
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("order {0} exceeds the supported maximum {1}")]
    OrderTooLarge(usize, usize),
    #[error("invalid edge ({0}, {1}) for a graph on {2} vertices")]
    InvalidEdge(usize, usize, usize),
    #[error("malformed graph6 string: {0}")]
    Graph6(String),
    #[error("pattern graph has more vertices than the host graph")]
    SizeMismatch,
}

/// Read access to adjacency, shared by the small and the large graph types.
pub trait Adjacency: Sync {
    fn order(&self) -> usize;
    fn has_edge(&self, u: usize, v: usize) -> bool;
}

/// Position of the pair `{i, j}` in graph6 column order.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    j * (j - 1) / 2 + i
}

/// A simple graph on at most 16 vertices stored as per-vertex neighbour
/// bitsets.
///
/// Equality is equality of labeled graphs; use [`canonical_form`] or
/// [`is_isomorphic`] to compare up to isomorphism. Lists produced by the
/// enumeration routines contain canonical labelings only, so on those the two
/// notions coincide.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u8,
    adj: [u16; MAX_ORDER],
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}, {:?})", self.n, self.edges())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", graph6::encode(self))
    }
}

impl Adjacency for Graph {
    fn order(&self) -> usize {
        self.n as usize
    }
    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_ORDER, "graph order {n} exceeds {MAX_ORDER}");
        Graph { n: n as u8, adj: [0; MAX_ORDER] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            g.adj[u] = (mask(n)) & !(1 << u);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Self::empty(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn star(leaves: usize) -> Self {
        Self::complete_bipartite(1, leaves)
    }

    /// Panics on invalid input; see [`Graph::try_from_edges`].
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::try_from_edges(n, edges).expect("invalid graph")
    }

    pub fn try_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n > MAX_ORDER {
            return Err(GraphError::OrderTooLarge(n, MAX_ORDER));
        }
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(GraphError::InvalidEdge(u, v, n));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Builds from labeled pair bits in graph6 order (bit `pair_index(i,j)`).
    pub fn from_bits(n: usize, bits: u128) -> Self {
        let mut g = Self::empty(n);
        for j in 1..n {
            for i in 0..j {
                if bits >> pair_index(i, j) & 1 == 1 {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Labeled pair bits in graph6 order.
    pub fn bits(&self) -> u128 {
        let mut b = 0u128;
        for j in 1..self.order() {
            for i in 0..j {
                if self.has_edge(i, j) {
                    b |= 1 << pair_index(i, j);
                }
            }
        }
        b
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.order() && v < self.order(), "invalid edge ({u}, {v})");
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
    }

    pub fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        if on {
            self.add_edge(u, v)
        } else {
            self.remove_edge(u, v)
        }
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        let on = self.has_edge(u, v);
        self.set_edge(u, v, !on);
    }

    /// Neighbourhood bitset of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> u16 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        (0..self.order()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.order() {
            for v in u + 1..self.order() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Self {
        let n = self.order();
        let mut g = *self;
        for u in 0..n {
            g.adj[u] = !self.adj[u] & mask(n) & !(1 << u);
        }
        g
    }

    /// Subgraph induced by `vs`, with `vs[i]` becoming vertex `i`.
    pub fn induced(&self, vs: &[usize]) -> Self {
        let mut g = Self::empty(vs.len());
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Vertex `i` of the result is vertex `order[i]` of `self`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.order());
        self.induced(order)
    }

    /// Vertex `v` of `self` becomes vertex `perm[v]` of the result.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.order());
        let mut g = Self::empty(self.order());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Appends a vertex adjacent to the vertices in the bitset `nbrs`.
    pub fn with_vertex(&self, nbrs: u16) -> Self {
        let n = self.order();
        assert!(n < MAX_ORDER);
        let mut g = *self;
        g.n += 1;
        for u in 0..n {
            if nbrs >> u & 1 == 1 {
                g.add_edge(u, n);
            }
        }
        g
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let n = self.order();
        let mut g = Self::empty(n + other.order());
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + n, v + n);
        }
        g
    }

    pub fn is_canonical(&self) -> bool {
        canonical_form(self).graph == *self
    }
}

#[inline]
pub(crate) fn mask(n: usize) -> u16 {
    if n >= 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// Graphs without an induced copy of any forbidden graph.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HereditaryFamily {
    #[serde(with = "graph6::list")]
    pub forbidden: Vec<Graph>,
}

impl HereditaryFamily {
    pub fn new(forbidden: Vec<Graph>) -> Self {
        HereditaryFamily { forbidden }
    }

    pub fn forbidding(g: Graph) -> Self {
        Self::new(vec![g])
    }

    pub fn contains<A: Adjacency>(&self, g: &A) -> bool {
        self.forbidden.iter().all(|f| !count::contains_induced(f, g))
    }

    /// Stable identifier for caching: sorted canonical graph6 strings.
    pub fn fingerprint(&self) -> String {
        let mut v: Vec<String> = self.forbidden.iter().map(|f| canonical_form(f).key.to_graph6()).collect();
        v.sort();
        v.dedup();
        v.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_operations() {
        let c4 = Graph::cycle(4);
        assert_eq!(c4.edge_count(), 4);
        assert_eq!(c4.complement().edge_count(), 2);
        assert_eq!(c4.complement().complement(), c4);
        assert_eq!(Graph::complete(3).complement(), Graph::empty(3));
        let p = c4.induced(&[0, 1, 2]);
        assert_eq!(p, Graph::path(3));
        assert_eq!(Graph::from_bits(4, c4.bits()), c4);
    }

    #[test]
    fn invalid_edges_rejected() {
        assert!(Graph::try_from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::try_from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::try_from_edges(17, &[]).is_err());
    }

    #[test]
    fn family_membership() {
        let fam = HereditaryFamily::forbidding(Graph::complete(3));
        assert!(fam.contains(&Graph::cycle(4)));
        assert!(!fam.contains(&Graph::complete(4)));
        assert!(fam.contains(&Graph::cycle(5)));
    }
}
