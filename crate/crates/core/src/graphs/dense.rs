use super::{Adjacency, Graph, MAX_ORDER};

/// A simple graph of arbitrary order with `u64`-word adjacency rows, used for
/// sampled and blown-up host graphs beyond the 16-vertex cap.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DenseGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Adjacency for DenseGraph {
    fn order(&self) -> usize {
        self.n
    }
    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }
}

impl DenseGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        DenseGraph { n, words, rows: vec![0; n * words] }
    }

    pub fn from_graph<A: Adjacency>(g: &A) -> Self {
        let mut d = Self::empty(g.order());
        for u in 0..g.order() {
            for v in u + 1..g.order() {
                if g.has_edge(u, v) {
                    d.add_edge(u, v);
                }
            }
        }
        d
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        Adjacency::has_edge(self, u, v)
    }

    pub fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u}, {v})");
        let (wu, bu) = (u * self.words + v / 64, v % 64);
        let (wv, bv) = (v * self.words + u / 64, u % 64);
        if on {
            self.rows[wu] |= 1 << bu;
            self.rows[wv] |= 1 << bv;
        } else {
            self.rows[wu] &= !(1 << bu);
            self.rows[wv] &= !(1 << bv);
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.set_edge(u, v, true);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.set_edge(u, v, false);
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        let on = self.has_edge(u, v);
        self.set_edge(u, v, !on);
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v * self.words..(v + 1) * self.words].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        let a = &self.rows[u * self.words..(u + 1) * self.words];
        let b = &self.rows[v * self.words..(v + 1) * self.words];
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
    }

    pub fn induced(&self, vs: &[usize]) -> DenseGraph {
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

    /// Converts to a [`Graph`] when small enough.
    pub fn to_graph(&self) -> Option<Graph> {
        if self.n > MAX_ORDER {
            return None;
        }
        Some(Graph::from_edges(self.n, &self.edges()))
    }
}

impl From<&Graph> for DenseGraph {
    fn from(g: &Graph) -> Self {
        DenseGraph::from_graph(g)
    }
}
