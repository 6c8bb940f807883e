//! Induced subgraph counting through labeled-bits classification tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{canonical_form, enumerate_graphs, pair_index, Adjacency, CanonKey, Graph, GraphError};
use crate::scalar::{binomial, Rational};

/// Largest subgraph order handled by the lookup tables (pair bits fit a `u32`).
pub const MAX_CLASSIFIER_ORDER: usize = 8;
const DENSE_LIMIT: usize = 6;

/// Maps the labeled pair bits of a `κ`-vertex graph to the index of its
/// isomorphism class in `enumerate_graphs(κ)`.
pub struct Classifier {
    kappa: usize,
    graphs: Arc<Vec<Graph>>,
    index: HashMap<CanonKey, u32>,
    dense: Option<Vec<u32>>,
    memo: RwLock<HashMap<u32, u32>>,
}

impl Classifier {
    fn build(kappa: usize) -> Self {
        let graphs = enumerate_graphs(kappa, None).expect("classifier order in range");
        let index: HashMap<CanonKey, u32> =
            graphs.iter().enumerate().map(|(i, g)| (canonical_form(g).key, i as u32)).collect();
        let dense = (kappa <= DENSE_LIMIT).then(|| {
            let nbits = kappa * kappa.saturating_sub(1) / 2;
            (0..1u32 << nbits)
                .into_par_iter()
                .map(|b| index[&canonical_form(&Graph::from_bits(kappa, b as u128)).key])
                .collect()
        });
        Classifier { kappa, graphs, index, dense, memo: RwLock::new(HashMap::new()) }
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// The canonical class representatives, in index order.
    pub fn graphs(&self) -> &Arc<Vec<Graph>> {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    #[inline]
    pub fn class_of_bits(&self, bits: u32) -> usize {
        if let Some(d) = &self.dense {
            return d[bits as usize] as usize;
        }
        if let Some(&c) = self.memo.read().unwrap().get(&bits) {
            return c as usize;
        }
        let c = self.index[&canonical_form(&Graph::from_bits(self.kappa, bits as u128)).key];
        self.memo.write().unwrap().insert(bits, c);
        c as usize
    }

    pub fn class_of(&self, g: &Graph) -> usize {
        assert_eq!(g.order(), self.kappa);
        self.class_of_bits(g.bits() as u32)
    }
}

/// Shared classifier for order `kappa` (at most 8).
pub fn classifier(kappa: usize) -> Arc<Classifier> {
    assert!(kappa <= MAX_CLASSIFIER_ORDER, "classifier order {kappa} too large");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Classifier>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&kappa) {
        return c.clone();
    }
    let c = Arc::new(Classifier::build(kappa));
    cache.lock().unwrap().entry(kappa).or_insert(c).clone()
}

/// Calls `f(bits, subset)` for every `k`-subset of vertices with first
/// element in `first`, where `bits` are the labeled pair bits of the induced
/// subgraph with the subset in increasing order (always 0 when `k > 8`).
fn walk_subsets<A: Adjacency + ?Sized>(
    g: &A,
    k: usize,
    first: std::ops::Range<usize>,
    f: &mut impl FnMut(u32, &[usize]),
) {
    let n = g.order();
    let mut stack = vec![0usize; k];
    fn rec<A: Adjacency + ?Sized>(
        g: &A,
        n: usize,
        k: usize,
        depth: usize,
        start: usize,
        end: usize,
        bits: u32,
        stack: &mut Vec<usize>,
        f: &mut impl FnMut(u32, &[usize]),
    ) {
        if depth == k {
            f(bits, stack);
            return;
        }
        let limit = end.min(n - (k - depth) + 1);
        for v in start..limit {
            let mut b = bits;
            if k <= MAX_CLASSIFIER_ORDER {
                for (i, &u) in stack[..depth].iter().enumerate() {
                    if g.has_edge(u, v) {
                        b |= 1 << pair_index(i, depth);
                    }
                }
            }
            stack[depth] = v;
            rec(g, n, k, depth + 1, v + 1, n, b, stack, f);
        }
    }
    if k == 0 {
        f(0, &[]);
        return;
    }
    if n < k {
        return;
    }
    rec(g, n, k, 0, first.start, first.end, 0, &mut stack, f);
}

/// Visits every `k`-subset with its induced labeled pair bits.
pub fn for_each_subset_bits<A: Adjacency + ?Sized>(g: &A, k: usize, mut f: impl FnMut(u32, &[usize])) {
    walk_subsets(g, k, 0..g.order(), &mut f);
}

/// Calls `f(bits)` for every `k`-subset containing `u`, with `u` placed first
/// in the labeling (requires `k <= 8`).
pub fn walk_subsets_containing<A: Adjacency + ?Sized>(g: &A, k: usize, u: usize, f: &mut impl FnMut(u32)) {
    assert!((1..=MAX_CLASSIFIER_ORDER).contains(&k));
    let pool: Vec<usize> = (0..g.order()).filter(|&v| v != u).collect();
    let mut stack = vec![u];
    fn rec<A: Adjacency + ?Sized>(
        g: &A,
        pool: &[usize],
        k: usize,
        start: usize,
        bits: u32,
        stack: &mut Vec<usize>,
        f: &mut impl FnMut(u32),
    ) {
        let d = stack.len();
        if d == k {
            f(bits);
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - d {
                break;
            }
            let v = pool[i];
            let mut b = bits;
            for (j, &w) in stack.iter().enumerate() {
                if g.has_edge(w, v) {
                    b |= 1 << pair_index(j, d);
                }
            }
            stack.push(v);
            rec(g, pool, k, i + 1, b, stack, f);
            stack.pop();
        }
    }
    rec(g, &pool, k, 0, 0, &mut stack, f);
}

/// `P(F, G)` for every class `F` of order `kappa`, indexed like
/// `enumerate_graphs(kappa)`.
pub fn induced_counts<A: Adjacency>(g: &A, kappa: usize) -> Vec<u64> {
    let cls = classifier(kappa);
    let n = g.order();
    let m = cls.len();
    if kappa == 0 {
        return vec![1];
    }
    let work = |v: usize| {
        let mut c = vec![0u64; m];
        walk_subsets(g, kappa, v..v + 1, &mut |b, _| c[cls.class_of_bits(b)] += 1);
        c
    };
    if n >= 24 {
        (0..n)
            .into_par_iter()
            .map(work)
            .reduce(|| vec![0u64; m], |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            })
    } else {
        let mut c = vec![0u64; m];
        walk_subsets(g, kappa, 0..n, &mut |b, _| c[cls.class_of_bits(b)] += 1);
        c
    }
}

/// Number of `v(f)`-subsets of `g` inducing a copy of `f`.
pub fn count_induced<A: Adjacency>(f: &Graph, g: &A) -> Result<u64, GraphError> {
    let k = f.order();
    if k > g.order() {
        return Err(GraphError::SizeMismatch);
    }
    if k <= MAX_CLASSIFIER_ORDER {
        let cls = classifier(k);
        let target = cls.class_of(f);
        let mut c = 0u64;
        for_each_subset_bits(g, k, |b, _| {
            if cls.class_of_bits(b) == target {
                c += 1;
            }
        });
        return Ok(c);
    }
    let key = canonical_form(f).key;
    let fe = f.edge_count();
    let mut c = 0u64;
    let mut sub = Vec::new();
    for_each_subset_bits(g, k, |_, s| {
        sub.clear();
        sub.extend_from_slice(s);
        let h = induced_small(g, &sub);
        if h.edge_count() == fe && canonical_form(&h).key == key {
            c += 1;
        }
    });
    Ok(c)
}

fn induced_small<A: Adjacency + ?Sized>(g: &A, vs: &[usize]) -> Graph {
    let mut h = Graph::empty(vs.len());
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if g.has_edge(vs[i], vs[j]) {
                h.add_edge(i, j);
            }
        }
    }
    h
}

/// `p(F, G) = P(F, G) / C(v(G), v(F))`.
pub fn induced_density<A: Adjacency>(f: &Graph, g: &A) -> Result<Rational, GraphError> {
    let c = count_induced(f, g)?;
    Ok(Rational::new(BigInt::from(c), binomial(g.order() as u64, f.order() as u64)))
}

/// Whether `g` has an induced copy of `f`, stopping at the first one.
pub(crate) fn contains_induced<A: Adjacency + ?Sized>(f: &Graph, g: &A) -> bool {
    let k = f.order();
    if k > g.order() {
        return false;
    }
    // backtracking embedding search with adjacency checks
    let n = g.order();
    let mut img = vec![usize::MAX; k];
    let mut used = vec![false; n];
    fn rec<A: Adjacency + ?Sized>(f: &Graph, g: &A, d: usize, img: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if d == f.order() {
            return true;
        }
        for v in 0..g.order() {
            if used[v] {
                continue;
            }
            if (0..d).all(|i| f.has_edge(i, d) == g.has_edge(img[i], v)) {
                img[d] = v;
                used[v] = true;
                if rec(f, g, d + 1, img, used) {
                    return true;
                }
                used[v] = false;
            }
        }
        false
    }
    rec(f, g, 0, &mut img, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::DenseGraph;

    #[test]
    fn small_counts() {
        assert_eq!(count_induced(&Graph::complete(2), &Graph::complete(3)).unwrap(), 3);
        assert_eq!(count_induced(&Graph::path(3), &Graph::cycle(4)).unwrap(), 4);
        assert_eq!(count_induced(&Graph::path(4), &Graph::cycle(5)).unwrap(), 5);
        assert!(count_induced(&Graph::complete(4), &Graph::complete(3)).is_err());
    }

    #[test]
    fn counts_sum_to_binomial() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (0, 3), (2, 6)]);
        for k in 0..=7 {
            let total: u64 = induced_counts(&g, k).iter().sum();
            assert_eq!(total, crate::scalar::binomial_u64(7, k));
        }
    }

    #[test]
    fn dense_host_matches_small_host() {
        let g = Graph::cycle(9);
        let d = DenseGraph::from(&g);
        assert_eq!(induced_counts(&g, 4), induced_counts(&d, 4));
    }

    #[test]
    fn large_pattern_fallback() {
        let g = Graph::complete_bipartite(5, 5);
        assert_eq!(count_induced(&Graph::complete_bipartite(5, 4), &g).unwrap(), 10);
        assert!(contains_induced(&Graph::cycle(4), &g));
        assert!(!contains_induced(&Graph::complete(3), &g));
    }
}
