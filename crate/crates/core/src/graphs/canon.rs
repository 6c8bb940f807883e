//! Canonical labeling by equitable refinement and individualization.
//!
//! The canonical labeling of a graph is the leaf of the search tree whose
//! adjacency bitstring (graph6 column order) is lexicographically smallest.
//! Rooted variants start from an ordered partition with each root in its own
//! leading cell, so roots keep positions `0..q`.

use std::fmt;

use super::{graph6, Graph};

/// Canonical byte string of a labeled graph: order plus the pair bits in
/// graph6 order, first pair in the most significant position. Ordering of
/// keys agrees with ordering of the corresponding graph6 strings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey {
    n: u8,
    code: u128,
}

impl fmt::Debug for CanonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonKey({})", self.to_graph6())
    }
}

impl CanonKey {
    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn graph(&self) -> Graph {
        Graph::from_bits(self.n as usize, code_to_bits(self.code, self.n as usize))
    }

    pub fn to_graph6(&self) -> String {
        graph6::encode(&self.graph())
    }

    /// The graph6 string as bytes: the canonical byte string.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_graph6().into_bytes()
    }
}

/// Result of canonical labeling.
#[derive(Clone, Debug)]
pub struct Canon {
    /// `labeling[i]` is the original vertex placed at position `i`.
    pub labeling: Vec<usize>,
    pub graph: Graph,
    pub key: CanonKey,
}

impl Canon {
    /// Position of original vertex `v` in the canonical graph.
    pub fn position(&self) -> Vec<usize> {
        let mut pos = vec![0; self.labeling.len()];
        for (i, &v) in self.labeling.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

fn code_of(g: &Graph, order: &[usize]) -> u128 {
    let mut code = 0u128;
    for j in 1..order.len() {
        let row = g.neighbors(order[j]);
        for i in 0..j {
            if row >> order[i] & 1 == 1 {
                code |= 1u128 << (127 - (j * (j - 1) / 2 + i));
            }
        }
    }
    code
}

fn code_to_bits(code: u128, n: usize) -> u128 {
    let total = n * n.saturating_sub(1) / 2;
    let mut bits = 0u128;
    for k in 0..total {
        if code >> (127 - k) & 1 == 1 {
            bits |= 1 << k;
        }
    }
    bits
}

fn prefix_mask(p: usize) -> u128 {
    let len = p * p.saturating_sub(1) / 2;
    if len == 0 {
        0
    } else {
        !0u128 << (128 - len)
    }
}

/// Splits cells by neighbour counts into every cell until stable.
fn refine(g: &Graph, cells: &mut Vec<u16>) {
    loop {
        let mut next: Vec<u16> = Vec::with_capacity(cells.len() + 2);
        let mut split = false;
        for &cell in cells.iter() {
            if cell.count_ones() == 1 {
                next.push(cell);
                continue;
            }
            let mut sigs: Vec<(Vec<u8>, usize)> = bits_of(cell)
                .map(|v| (cells.iter().map(|&c| (g.neighbors(v) & c).count_ones() as u8).collect(), v))
                .collect();
            sigs.sort();
            let mut cur = 0u16;
            for k in 0..sigs.len() {
                if k > 0 && sigs[k].0 != sigs[k - 1].0 {
                    next.push(cur);
                    cur = 0;
                    split = true;
                }
                cur |= 1 << sigs[k].1;
            }
            next.push(cur);
        }
        *cells = next;
        if !split {
            return;
        }
    }
}

fn bits_of(mut m: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

struct Search<'a> {
    g: &'a Graph,
    best: Option<(u128, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, mut cells: Vec<u16>) {
        refine(self.g, &mut cells);
        let p = cells.iter().take_while(|c| c.count_ones() == 1).count();
        let prefix: Vec<usize> = cells[..p].iter().map(|c| c.trailing_zeros() as usize).collect();
        if let Some((best, _)) = &self.best {
            let m = prefix_mask(p);
            let partial = code_of(self.g, &prefix) & m;
            if partial > best & m {
                return;
            }
        }
        if p == cells.len() {
            let code = code_of(self.g, &prefix);
            if self.best.as_ref().is_none_or(|(b, _)| code < *b) {
                self.best = Some((code, prefix));
            }
            return;
        }
        let target = cells[p];
        let mut tried: u16 = 0;
        for v in bits_of(target) {
            // a twin of an already individualized vertex gives an isomorphic subtree
            let twin = bits_of(tried).any(|u| {
                let m = !((1u16 << u) | (1u16 << v));
                self.g.neighbors(u) & m == self.g.neighbors(v) & m
            });
            if twin {
                continue;
            }
            tried |= 1 << v;
            let mut next = cells.clone();
            next[p] = target & !(1 << v);
            next.insert(p, 1 << v);
            self.run(next);
        }
    }
}

fn canon_with_cells(g: &Graph, cells: Vec<u16>) -> Canon {
    let n = g.order();
    if n == 0 {
        return Canon { labeling: vec![], graph: *g, key: CanonKey { n: 0, code: 0 } };
    }
    let mut s = Search { g, best: None };
    s.run(cells);
    let (code, labeling) = s.best.unwrap();
    let graph = g.reordered(&labeling);
    Canon { labeling, graph, key: CanonKey { n: n as u8, code } }
}

/// Canonical labeling: isomorphic graphs get identical keys and graphs.
pub fn canonical_form(g: &Graph) -> Canon {
    let n = g.order();
    let cells = if n == 0 { vec![] } else { vec![super::mask(n)] };
    canon_with_cells(g, cells)
}

/// Canonical labeling of a rooted graph: roots are fixed pointwise and placed
/// at positions `0..roots.len()` in the given order.
pub fn canonical_form_rooted(g: &Graph, roots: &[usize]) -> Canon {
    let n = g.order();
    let mut cells: Vec<u16> = roots.iter().map(|&r| 1u16 << r).collect();
    let rootmask = cells.iter().fold(0u16, |a, &c| a | c);
    assert_eq!(rootmask.count_ones() as usize, roots.len(), "roots must be distinct");
    let rest = super::mask(n) & !rootmask;
    if rest != 0 {
        cells.push(rest);
    }
    if n == 0 {
        return canon_with_cells(g, cells);
    }
    canon_with_cells(g, cells)
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.order() == b.order() && a.edge_count() == b.edge_count() && canonical_form(a).key == canonical_form(b).key
}

/// Order of the automorphism group via orbit–stabilizer: the orbit of a
/// vertex under the stabilizer of the previous choices is the set of
/// vertices giving the same rooted canonical key.
pub fn automorphism_count(g: &Graph) -> u128 {
    let n = g.order();
    let mut prefix: Vec<usize> = Vec::new();
    let mut total: u128 = 1;
    while prefix.len() < n {
        let mut cells: Vec<u16> = prefix.iter().map(|&r| 1u16 << r).collect();
        let used = cells.iter().fold(0u16, |a, &c| a | c);
        cells.push(super::mask(n) & !used);
        refine(g, &mut cells);
        if cells.iter().all(|c| c.count_ones() == 1) {
            break;
        }
        let cell = *cells.iter().find(|c| c.count_ones() > 1).unwrap();
        let v = cell.trailing_zeros() as usize;
        let key_of = |w: usize| {
            let mut r = prefix.clone();
            r.push(w);
            canonical_form_rooted(g, &r).key
        };
        let kv = key_of(v);
        let orbit = bits_of(cell).filter(|&w| w == v || key_of(w) == kv).count();
        total *= orbit as u128;
        prefix.push(v);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn invariant_under_relabeling() {
        let p4 = Graph::path(4);
        let k = canonical_form(&p4).key;
        for perm in all_perms(4) {
            assert_eq!(canonical_form(&p4.permuted(&perm)).key, k);
        }
        assert_ne!(canonical_form(&Graph::complete(3)).key, canonical_form(&Graph::path(3)).key);
    }

    #[test]
    fn labeling_reproduces_canonical_graph() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (0, 5)]);
        let c = canonical_form(&g);
        assert_eq!(g.reordered(&c.labeling), c.graph);
        assert_eq!(c.key.graph(), c.graph);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphism_count(&Graph::complete(3)), 6);
        assert_eq!(automorphism_count(&Graph::path(4)), 2);
        assert_eq!(automorphism_count(&Graph::cycle(5)), 10);
        assert_eq!(automorphism_count(&Graph::empty(6)), 720);
        assert_eq!(automorphism_count(&Graph::complete_bipartite(3, 3)), 72);
        let c4_pendant = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]);
        assert_eq!(automorphism_count(&c4_pendant), 2);
        // Petersen graph
        let mut e = vec![];
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        assert_eq!(automorphism_count(&Graph::from_edges(10, &e)), 120);
    }

    #[test]
    fn rooted_keeps_roots_first() {
        let g = Graph::path(4);
        let c = canonical_form_rooted(&g, &[3, 1]);
        assert_eq!(&c.labeling[..2], &[3, 1]);
        let c2 = canonical_form_rooted(&g, &[0, 2]);
        assert_eq!(c.key, c2.key);
        let c3 = canonical_form_rooted(&g, &[1, 3]);
        assert_ne!(c.key, c3.key);
    }

    #[test]
    fn large_symmetric_graphs_are_fast() {
        let g = Graph::complete_bipartite(8, 8);
        let c = canonical_form(&g);
        assert!(is_isomorphic(&c.graph, &g));
        assert_eq!(automorphism_count(&Graph::empty(16)), (1..=16u128).product());
    }
}
