//! Types, flags, flag bases, rooted densities and the product expansion.
//!
//! A flag is stored canonically with its roots at positions `0..q`, so the
//! subgraph induced on the first `q` vertices is its type. Labeled extensions
//! of a type are addressed by their "extension bits": the pair bits (graph6
//! order) of all pairs with at least one non-root endpoint. Because those
//! pairs come after the root pairs in graph6 order, the full pair bits are
//! `type_bits | ext << C(q, 2)`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{
    canonical_form, canonical_form_rooted, enumerate_graphs, graph6, pair_index, Adjacency, CanonKey, Graph,
    GraphError, HereditaryFamily,
};
use crate::scalar::{binomial, falling, Rational};

const NONE: u32 = u32::MAX;
const DENSE_EXT_BITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlagError {
    #[error("flag size {s} is smaller than the type order {q}")]
    SizeBelowType { s: usize, q: usize },
    #[error("flags have different types")]
    TypeMismatch,
    #[error("root tuple does not induce the type")]
    NotAnEmbedding,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("flag basis is not complete or has duplicates: {0}")]
    BadBasis(String),
    #[error("product cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A rooted graph with roots at positions `0..q`, canonically labeled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    key: CanonKey,
    q: u8,
}

impl Flag {
    /// Canonical flag of `g` rooted at the ordered tuple `roots`.
    pub fn new(g: &Graph, roots: &[usize]) -> Self {
        let c = canonical_form_rooted(g, roots);
        Flag { key: c.key, q: roots.len() as u8 }
    }

    pub fn graph(&self) -> Graph {
        self.key.graph()
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    pub fn order(&self) -> usize {
        self.key.order()
    }

    pub fn key(&self) -> CanonKey {
        self.key
    }

    /// The labeled type induced on the roots.
    pub fn type_graph(&self) -> Graph {
        self.graph().induced(&(0..self.q()).collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> FlagJson {
        FlagJson { graph6: graph6::encode(&self.graph()), roots: (0..self.q()).collect() }
    }
}

/// Serialized flag: a graph plus its ordered root tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagJson {
    pub graph6: String,
    pub roots: Vec<usize>,
}

impl FlagJson {
    pub fn to_flag(&self) -> Result<Flag, FlagError> {
        let g = graph6::decode(&self.graph6)?;
        let mut seen = vec![false; g.order()];
        for &r in &self.roots {
            if r >= g.order() || seen[r] {
                return Err(FlagError::NotAnEmbedding);
            }
            seen[r] = true;
        }
        Ok(Flag::new(&g, &self.roots))
    }
}

/// All `τ`-flags on `s` vertices up to root-preserving isomorphism, in
/// canonical order, with a lookup from labeled extensions to indices.
#[derive(Clone, Debug)]
pub struct FlagBasis {
    tau: Graph,
    s: usize,
    flags: Vec<Flag>,
    index: HashMap<CanonKey, u32>,
    ext_table: Option<Vec<u32>>,
}

pub fn ext_bit_count(q: usize, s: usize) -> usize {
    s * s.saturating_sub(1) / 2 - q * q.saturating_sub(1) / 2
}

impl FlagBasis {
    pub fn tau(&self) -> &Graph {
        &self.tau
    }

    pub fn q(&self) -> usize {
        self.tau.order()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    fn from_keys(tau: Graph, s: usize, mut flags: Vec<Flag>, family: Option<&HereditaryFamily>) -> Self {
        flags.sort();
        flags.dedup();
        let index: HashMap<CanonKey, u32> = flags.iter().enumerate().map(|(i, f)| (f.key, i as u32)).collect();
        let mut b = FlagBasis { tau, s, flags, index, ext_table: None };
        b.build_table(family);
        b
    }

    fn build_table(&mut self, family: Option<&HereditaryFamily>) {
        let q = self.q();
        let e = ext_bit_count(q, self.s);
        if e > DENSE_EXT_BITS {
            return;
        }
        let tb = self.tau.bits();
        let cq = q * q.saturating_sub(1) / 2;
        let roots: Vec<usize> = (0..q).collect();
        let table: Vec<u32> = (0..1u32 << e)
            .into_par_iter()
            .map(|ext| {
                let g = Graph::from_bits(self.s, tb | (ext as u128) << cq);
                if family.is_some_and(|f| !f.contains(&g)) {
                    return NONE;
                }
                let key = canonical_form_rooted(&g, &roots).key;
                *self.index.get(&key).unwrap_or(&NONE)
            })
            .collect();
        self.ext_table = Some(table);
    }

    /// Index of the flag formed by a labeled graph with roots `0..q`.
    pub fn index_of_labeled(&self, g: &Graph) -> Option<usize> {
        let q = self.q();
        let roots: Vec<usize> = (0..q).collect();
        self.index.get(&canonical_form_rooted(g, &roots).key).map(|&i| i as usize)
    }

    /// Index of the flag with the given extension bits.
    #[inline]
    pub fn index_of_ext(&self, ext: u64) -> Option<usize> {
        match &self.ext_table {
            Some(t) => {
                let i = t[ext as usize];
                (i != NONE).then_some(i as usize)
            }
            None => {
                let cq = self.q() * self.q().saturating_sub(1) / 2;
                let g = Graph::from_bits(self.s, self.tau.bits() | (ext as u128) << cq);
                self.index_of_labeled(&g)
            }
        }
    }

    pub fn index_of_flag(&self, f: &Flag) -> Option<usize> {
        self.index.get(&f.key).map(|&i| i as usize)
    }

    /// Builds a basis from an externally supplied flag list, keeping its
    /// order. The list must be exactly the set of `τ`-flags on `s` vertices
    /// (within `family`), each once.
    pub fn from_list(
        tau: Graph,
        s: usize,
        flags: Vec<Flag>,
        family: Option<&HereditaryFamily>,
    ) -> Result<Self, FlagError> {
        let reference = enumerate_flags(&tau, s, family)?;
        let mut seen = std::collections::HashSet::new();
        for f in &flags {
            if f.q() != tau.order() || f.order() != s || f.type_graph() != tau {
                return Err(FlagError::BadBasis("flag does not extend the type".into()));
            }
            if !seen.insert(f.key) {
                return Err(FlagError::BadBasis("duplicate flag".into()));
            }
            if reference.index_of_flag(f).is_none() {
                return Err(FlagError::BadBasis("flag outside the family".into()));
            }
        }
        if flags.len() != reference.len() {
            return Err(FlagError::BadBasis(format!("{} flags given, {} expected", flags.len(), reference.len())));
        }
        let index: HashMap<CanonKey, u32> = flags.iter().enumerate().map(|(i, f)| (f.key, i as u32)).collect();
        let mut b = FlagBasis { tau, s, flags, index, ext_table: None };
        b.build_table(family);
        Ok(b)
    }
}

/// Enumerates all `τ`-flags on `s` vertices.
pub fn enumerate_flags(tau: &Graph, s: usize, family: Option<&HereditaryFamily>) -> Result<FlagBasis, FlagError> {
    let q = tau.order();
    if s < q {
        return Err(FlagError::SizeBelowType { s, q });
    }
    if family.is_some_and(|f| !f.contains(tau)) {
        return Ok(FlagBasis::from_keys(*tau, s, vec![], family));
    }
    let roots: Vec<usize> = (0..q).collect();
    if q == 0 {
        let gs = enumerate_graphs(s, family)?;
        let flags = gs.iter().map(|g| Flag::new(g, &[])).collect();
        return Ok(FlagBasis::from_keys(*tau, s, flags, family));
    }
    // grow from the bare type one unlabeled vertex at a time
    let mut level: Vec<Graph> = vec![*tau];
    for t in q..s {
        let mut keys: Vec<CanonKey> = level
            .par_iter()
            .flat_map_iter(|g| {
                let g = *g;
                let roots = roots.clone();
                (0..1u32 << t).filter_map(move |nb| {
                    let h = g.with_vertex(nb as u16);
                    if family.is_some_and(|f| !f.contains(&h)) {
                        return None;
                    }
                    Some(canonical_form_rooted(&h, &roots).key)
                })
            })
            .collect();
        keys.sort();
        keys.dedup();
        level = keys.iter().map(|k| k.graph()).collect();
    }
    let flags = level.iter().map(|g| Flag::new(g, &roots)).collect();
    Ok(FlagBasis::from_keys(*tau, s, flags, family))
}

/// Canonical type representatives of order `q` (one per isomorphism class).
pub fn types_of_order(q: usize, family: Option<&HereditaryFamily>) -> Result<Vec<Graph>, FlagError> {
    Ok(enumerate_graphs(q, family)?.to_vec())
}

/// Extension bits of `(roots, xs)` inside `h`.
fn ext_bits<A: Adjacency + ?Sized>(h: &A, roots: &[usize], xs: &[usize]) -> u64 {
    let q = roots.len();
    let cq = q * q.saturating_sub(1) / 2;
    let mut bits = 0u64;
    let at = |p: usize| if p < q { roots[p] } else { xs[p - q] };
    for j in q..q + xs.len() {
        for i in 0..j {
            if h.has_edge(at(i), at(j)) {
                bits |= 1 << (pair_index(i, j) - cq);
            }
        }
    }
    bits
}

fn check_embedding<A: Adjacency + ?Sized>(h: &A, tau: &Graph, roots: &[usize]) -> Result<(), FlagError> {
    if roots.len() != tau.order() {
        return Err(FlagError::NotAnEmbedding);
    }
    for i in 0..roots.len() {
        if roots[i] >= h.order() || roots[..i].contains(&roots[i]) {
            return Err(FlagError::NotAnEmbedding);
        }
        for j in 0..i {
            if h.has_edge(roots[i], roots[j]) != tau.has_edge(i, j) {
                return Err(FlagError::NotAnEmbedding);
            }
        }
    }
    Ok(())
}

fn for_each_subset(pool: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    let mut cur = Vec::with_capacity(k);
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..=pool.len().saturating_sub(need) {
            if i >= pool.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(pool, k, 0, &mut cur, f);
}

/// Counts of each basis flag among the `(s − q)`-extensions of the rooted
/// host `(h, roots)`.
pub fn flag_counts<A: Adjacency + ?Sized>(h: &A, roots: &[usize], basis: &FlagBasis) -> Result<Vec<u64>, FlagError> {
    check_embedding(h, basis.tau(), roots)?;
    let k = basis.s() - basis.q();
    if h.order() < basis.s() {
        return Err(FlagError::Dimension("host smaller than the flag size".into()));
    }
    let pool: Vec<usize> = (0..h.order()).filter(|v| !roots.contains(v)).collect();
    let mut counts = vec![0u64; basis.len()];
    for_each_subset(&pool, k, &mut |xs| {
        if let Some(i) = basis.index_of_ext(ext_bits(h, roots, xs)) {
            counts[i] += 1;
        }
    });
    Ok(counts)
}

/// Flag-density vector of `(h, roots)` over `basis`; entries sum to 1 when
/// no family restriction removes extensions.
pub fn flag_vector<A: Adjacency + ?Sized>(h: &A, roots: &[usize], basis: &FlagBasis) -> Result<Vec<Rational>, FlagError> {
    let counts = flag_counts(h, roots, basis)?;
    let total = binomial((h.order() - basis.q()) as u64, (basis.s() - basis.q()) as u64);
    Ok(counts.into_iter().map(|c| Rational::new(BigInt::from(c), total.clone())).collect())
}

/// Rooted density `p((F, f), (H, h))` for flags of a common type.
pub fn flag_density(f: &Flag, h: &Flag) -> Result<Rational, FlagError> {
    if f.q() != h.q() || f.type_graph() != h.type_graph() {
        return Err(FlagError::TypeMismatch);
    }
    if f.order() > h.order() {
        return Err(FlagError::Dimension("flag larger than host".into()));
    }
    let q = f.q();
    let hg = h.graph();
    let roots: Vec<usize> = (0..q).collect();
    let pool: Vec<usize> = (q..h.order()).collect();
    let mut count = 0u64;
    for_each_subset(&pool, f.order() - q, &mut |xs| {
        let mut vs = roots.clone();
        vs.extend_from_slice(xs);
        if Flag::new(&hg.induced(&vs), &roots) == *f {
            count += 1;
        }
    });
    Ok(Rational::new(BigInt::from(count), binomial((h.order() - q) as u64, (f.order() - q) as u64)))
}

/// One type's share of the product expansion at order `N`.
///
/// For every basis graph `F` (indexed like the table's graph list) it stores
/// sparse counts `(i, j, c)` with `i ≤ j`, where `c` is the number of pairs
/// (injection `θ` of the type into `F` as labeled graph, ordered split
/// `(X₁, X₂)` of the other vertices) such that `(θ, X₁)` is flag `i` and
/// `(θ, X₂)` is flag `j`. Dividing by `normalizer` gives `D^τ_F(i, j)`.
#[derive(Clone, Debug)]
pub struct TypeBlock {
    pub basis: Arc<FlagBasis>,
    pub normalizer: BigInt,
    pub entries: Vec<Vec<(u32, u32, u64)>>,
}

impl TypeBlock {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dense `D^τ_F` for basis graph index `f`.
    pub fn dense(&self, f: usize) -> crate::exactmath::Matrix<Rational> {
        let n = self.dim();
        let mut m = crate::exactmath::Matrix::zeros(n, n);
        let norm = Rational::from_integer(self.normalizer.clone());
        for &(i, j, c) in &self.entries[f] {
            let v = Rational::from_integer(BigInt::from(c)) / &norm;
            m[(i as usize, j as usize)] = v.clone();
            m[(j as usize, i as usize)] = v;
        }
        m
    }
}

/// The product expansion of every type block over the order-`N` basis.
#[derive(Clone, Debug)]
pub struct ProductTable {
    pub n: usize,
    pub graphs: Arc<Vec<Graph>>,
    pub blocks: Vec<TypeBlock>,
}

/// `N!/(N−q)! · C(N−q, s−q)`: the number of (injection, ordered split) pairs.
pub fn product_normalizer(n: usize, q: usize, s: usize) -> BigInt {
    falling(n as u64, q as u64) * binomial((n - q) as u64, (s - q) as u64)
}

impl ProductTable {
    /// Expands the given flag bases (one per type, `s = (N + q)/2`) over the
    /// order-`N` graph list.
    pub fn build(n: usize, graphs: Arc<Vec<Graph>>, bases: Vec<Arc<FlagBasis>>) -> Result<Self, FlagError> {
        for b in &bases {
            if 2 * b.s() != n + b.q() {
                return Err(FlagError::Dimension(format!(
                    "type of order {} with flags of size {} does not fit N = {n}",
                    b.q(),
                    b.s()
                )));
            }
        }
        // one pass over injections per graph, matching labeled type bits
        let mut by_q: HashMap<usize, HashMap<u128, Vec<usize>>> = HashMap::new();
        for (t, b) in bases.iter().enumerate() {
            by_q.entry(b.q()).or_default().entry(b.tau().bits()).or_default().push(t);
        }
        let per_graph: Vec<Vec<Vec<(u32, u32, u64)>>> = graphs
            .par_iter()
            .map(|g| {
                let mut acc: Vec<HashMap<(u32, u32), u64>> = vec![HashMap::new(); bases.len()];
                for (&q, lookup) in &by_q {
                    for_each_injection(g, q, &mut |theta| {
                        let tb = g.induced(theta).bits();
                        let Some(ts) = lookup.get(&tb) else { return };
                        for &t in ts {
                            accumulate_splits(g, theta, &bases[t], &mut acc[t]);
                        }
                    });
                }
                acc.into_iter()
                    .map(|m| {
                        let mut v: Vec<(u32, u32, u64)> = m.into_iter().map(|((i, j), c)| (i, j, c)).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        let blocks = bases
            .iter()
            .enumerate()
            .map(|(t, b)| TypeBlock {
                basis: b.clone(),
                normalizer: product_normalizer(n, b.q(), b.s()),
                entries: per_graph.iter().map(|pg| pg[t].clone()).collect(),
            })
            .collect();
        Ok(ProductTable { n, graphs, blocks })
    }

    /// Standard SDP layout: every type class with `1 ≤ q ≤ N − 2`,
    /// `q ≡ N (mod 2)`, and a nonempty flag basis.
    pub fn for_order(n: usize, family: Option<&HereditaryFamily>) -> Result<Self, FlagError> {
        let graphs = enumerate_graphs(n, family)?;
        let bases = standard_bases(n, family)?;
        Self::build(n, graphs, bases)
    }

    /// Like [`ProductTable::for_order`], reading and writing one file per
    /// type block under `dir`. A file is keyed by the canonical type, `N` and
    /// a hash of the family; unreadable or inconsistent files are rebuilt.
    pub fn for_order_cached(n: usize, family: Option<&HereditaryFamily>, dir: &Path) -> Result<Self, FlagError> {
        let graphs = enumerate_graphs(n, family)?;
        let bases = standard_bases(n, family)?;
        let fam = family.map(HereditaryFamily::fingerprint).unwrap_or_default();
        let paths: Vec<PathBuf> = bases.iter().map(|b| dir.join(cache_file_name(b.tau(), n, &fam))).collect();
        let mut blocks: Vec<Option<TypeBlock>> =
            bases.iter().zip(&paths).map(|(b, p)| read_cached_block(p, b, n, graphs.len(), &fam)).collect();
        let missing: Vec<usize> = (0..bases.len()).filter(|&t| blocks[t].is_none()).collect();
        if !missing.is_empty() {
            let built = Self::build(n, graphs.clone(), missing.iter().map(|&t| bases[t].clone()).collect())?;
            std::fs::create_dir_all(dir).map_err(|e| FlagError::Cache(format!("{}: {e}", dir.display())))?;
            for (&t, blk) in missing.iter().zip(built.blocks) {
                write_cached_block(&paths[t], &blk, n, &fam)?;
                blocks[t] = Some(blk);
            }
        }
        Ok(ProductTable { n, graphs, blocks: blocks.into_iter().map(Option::unwrap).collect() })
    }
}

#[derive(Serialize, Deserialize)]
struct CachedBlock {
    n: usize,
    family: String,
    basis: Vec<FlagJson>,
    graphs: usize,
    normalizer: String,
    entries: Vec<Vec<(u32, u32, u64)>>,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn cache_file_name(tau: &Graph, n: usize, family: &str) -> String {
    let key: String = canonical_form(tau).key.to_graph6().bytes().map(|b| format!("{b:02x}")).collect();
    format!("prod-{key}-n{n}-{:016x}.json", fnv1a(family))
}

fn read_cached_block(path: &Path, basis: &Arc<FlagBasis>, n: usize, graphs: usize, family: &str) -> Option<TypeBlock> {
    let c: CachedBlock = serde_json::from_str(&std::fs::read_to_string(path).ok()?).ok()?;
    let same_basis = c.basis.len() == basis.len() && c.basis.iter().zip(basis.flags()).all(|(j, f)| *j == f.to_json());
    if c.n != n || c.family != family || c.graphs != graphs || !same_basis || c.entries.len() != graphs {
        return None;
    }
    let normalizer: BigInt = c.normalizer.parse().ok()?;
    if normalizer != product_normalizer(n, basis.q(), basis.s()) {
        return None;
    }
    let d = basis.len() as u32;
    if c.entries.iter().flatten().any(|&(i, j, _)| i > j || j >= d) {
        return None;
    }
    Some(TypeBlock { basis: basis.clone(), normalizer, entries: c.entries })
}

fn write_cached_block(path: &Path, blk: &TypeBlock, n: usize, family: &str) -> Result<(), FlagError> {
    let c = CachedBlock {
        n,
        family: family.to_string(),
        basis: blk.basis.flags().iter().map(Flag::to_json).collect(),
        graphs: blk.entries.len(),
        normalizer: blk.normalizer.to_string(),
        entries: blk.entries.clone(),
    };
    let text = serde_json::to_string(&c).map_err(|e| FlagError::Cache(e.to_string()))?;
    // write then rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, text).and_then(|_| std::fs::rename(&tmp, path)).map_err(|e| FlagError::Cache(format!("{}: {e}", path.display())))
}

/// Flag bases for all standard types at order `N`.
pub fn standard_bases(n: usize, family: Option<&HereditaryFamily>) -> Result<Vec<Arc<FlagBasis>>, FlagError> {
    let mut out = Vec::new();
    let mut q = if n % 2 == 0 { 2 } else { 1 };
    while q + 2 <= n {
        let s = (n + q) / 2;
        for tau in types_of_order(q, family)? {
            let b = enumerate_flags(&tau, s, family)?;
            if !b.is_empty() {
                out.push(Arc::new(b));
            }
        }
        q += 2;
    }
    Ok(out)
}

fn for_each_injection(g: &Graph, q: usize, f: &mut impl FnMut(&[usize])) {
    let n = g.order();
    let mut cur = Vec::with_capacity(q);
    fn rec(n: usize, q: usize, used: u16, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == q {
            f(cur);
            return;
        }
        for v in 0..n {
            if used >> v & 1 == 0 {
                cur.push(v);
                rec(n, q, used | 1 << v, cur, f);
                cur.pop();
            }
        }
    }
    rec(n, q, 0, &mut cur, f);
}

fn accumulate_splits(g: &Graph, theta: &[usize], basis: &FlagBasis, acc: &mut HashMap<(u32, u32), u64>) {
    let k = basis.s() - basis.q();
    let rest: Vec<usize> = (0..g.order()).filter(|v| !theta.contains(v)).collect();
    let m = rest.len();
    debug_assert_eq!(m, 2 * k);
    // flag index of every k-subset of `rest`, keyed by its bitmask over `rest`
    let mut idx: HashMap<u32, Option<usize>> = HashMap::new();
    let mut xs = Vec::with_capacity(k);
    for mask in 0u32..1 << m {
        if mask.count_ones() as usize != k {
            continue;
        }
        xs.clear();
        xs.extend((0..m).filter(|&i| mask >> i & 1 == 1).map(|i| rest[i]));
        idx.insert(mask, basis.index_of_ext(ext_bits(g, theta, &xs)));
    }
    let full = (1u32 << m) - 1;
    for (&mask, &i) in &idx {
        let (Some(i), Some(j)) = (i, idx[&(full & !mask)]) else { continue };
        if i <= j {
            *acc.entry((i as u32, j as u32)).or_insert(0) += 1;
        }
    }
}

/// Coefficient vector over the order-`N` basis of the product of two
/// `τ`-flags: entry `F` is `D^τ_F(F₁, F₂)`.
pub fn expand_product(
    tau: &Graph,
    f1: &Flag,
    f2: &Flag,
    n: usize,
    family: Option<&HereditaryFamily>,
) -> Result<Vec<Rational>, FlagError> {
    let q = tau.order();
    if f1.q() != q || f2.q() != q || f1.type_graph() != *tau || f2.type_graph() != *tau {
        return Err(FlagError::TypeMismatch);
    }
    if f1.order() + f2.order() != n + q {
        return Err(FlagError::Dimension(format!(
            "v(F1) + v(F2) - q = {} but N = {n}",
            f1.order() + f2.order() - q
        )));
    }
    let graphs = enumerate_graphs(n, family)?;
    let norm = falling(n as u64, q as u64) * binomial((n - q) as u64, (f1.order() - q) as u64);
    let k1 = f1.order() - q;
    let out = graphs
        .par_iter()
        .map(|g| {
            let mut count = 0u64;
            for_each_injection(g, q, &mut |theta| {
                if g.induced(theta) != *tau {
                    return;
                }
                let rest: Vec<usize> = (0..n).filter(|v| !theta.contains(v)).collect();
                for_each_subset(&rest, k1, &mut |x1| {
                    let x2: Vec<usize> = rest.iter().copied().filter(|v| !x1.contains(v)).collect();
                    let mut a = theta.to_vec();
                    a.extend_from_slice(x1);
                    let mut b = theta.to_vec();
                    b.extend_from_slice(&x2);
                    let roots: Vec<usize> = (0..q).collect();
                    if Flag::new(&g.induced(&a), &roots) == *f1 && Flag::new(&g.induced(&b), &roots) == *f2 {
                        count += 1;
                    }
                });
            });
            Rational::new(BigInt::from(count), norm.clone())
        })
        .collect();
    Ok(out)
}

/// Canonical key of a graph, for matching basis entries across sources.
pub fn graph_key(g: &Graph) -> CanonKey {
    canonical_form(g).key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn basis_sizes() {
        let v = Graph::empty(1);
        assert_eq!(enumerate_flags(&v, 2, None).unwrap().len(), 2);
        assert_eq!(enumerate_flags(&v, 3, None).unwrap().len(), 6);
        let e0 = Graph::empty(0);
        assert_eq!(enumerate_flags(&e0, 4, None).unwrap().len(), 11);
        assert!(enumerate_flags(&Graph::complete(2), 1, None).is_err());
        // every 3-vertex labeled type extends in 2^3 distinct ways
        for tau in types_of_order(3, None).unwrap() {
            assert_eq!(enumerate_flags(&tau, 4, None).unwrap().len(), 8);
        }
    }

    #[test]
    fn ext_table_matches_canonical_lookup() {
        let tau = Graph::from_edges(2, &[(0, 1)]);
        let b = enumerate_flags(&tau, 4, None).unwrap();
        for ext in 0..1u64 << ext_bit_count(2, 4) {
            let g = Graph::from_bits(4, tau.bits() | (ext as u128) << 1);
            assert_eq!(b.index_of_ext(ext), b.index_of_labeled(&g));
        }
    }

    #[test]
    fn product_example() {
        let v = Graph::empty(1);
        let edge_flag = Flag::new(&Graph::complete(2), &[0]);
        let coeffs = expand_product(&v, &edge_flag, &edge_flag, 3, None).unwrap();
        let graphs = enumerate_graphs(3, None).unwrap();
        for (g, c) in graphs.iter().zip(&coeffs) {
            let expect = match g.edge_count() {
                3 => rat(1, 1),
                2 => rat(1, 3),
                _ => rat(0, 1),
            };
            assert_eq!(*c, expect, "{g:?}");
        }
    }

    #[test]
    fn table_agrees_with_direct_expansion() {
        let t = ProductTable::for_order(5, None).unwrap();
        for block in &t.blocks {
            let fl = block.basis.flags();
            for i in 0..fl.len().min(3) {
                for j in i..fl.len().min(4) {
                    let direct = expand_product(block.basis.tau(), &fl[i], &fl[j], 5, None).unwrap();
                    for (f, d) in direct.iter().enumerate() {
                        assert_eq!(block.dense(f)[(i, j)], *d);
                    }
                }
            }
        }
    }

    #[test]
    fn flag_vector_on_c5() {
        let v = Graph::empty(1);
        let b = enumerate_flags(&v, 2, None).unwrap();
        let vec = flag_vector(&Graph::cycle(5), &[0], &b).unwrap();
        let adj = b.index_of_flag(&Flag::new(&Graph::complete(2), &[0])).unwrap();
        assert_eq!(vec[adj], rat(1, 2));
        assert!(flag_vector(&Graph::cycle(5), &[0, 1], &b).is_err());
    }

    #[test]
    fn density_of_bare_type_is_one() {
        let h = Flag::new(&Graph::cycle(5), &[0, 2]);
        let t = Flag::new(&Graph::empty(2), &[0, 1]);
        assert_eq!(flag_density(&t, &h).unwrap(), rat(1, 1));
    }
}
