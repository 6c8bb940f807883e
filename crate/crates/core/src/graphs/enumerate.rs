use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::{canonical_form, CanonKey, Graph, GraphError, HereditaryFamily};

/// Largest order accepted by [`enumerate_graphs`].
pub const MAX_ENUM_ORDER: usize = 10;

type Cache = Mutex<HashMap<(usize, String), Arc<Vec<Graph>>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// One canonical representative per isomorphism class of `n`-vertex graphs
/// (restricted to `family` if given), sorted by canonical key.
///
/// Generated by vertex extension from order `n - 1`; results are memoized.
pub fn enumerate_graphs(n: usize, family: Option<&HereditaryFamily>) -> Result<Arc<Vec<Graph>>, GraphError> {
    if n > MAX_ENUM_ORDER {
        return Err(GraphError::OrderTooLarge(n, MAX_ENUM_ORDER));
    }
    let fp = family.map(|f| f.fingerprint()).unwrap_or_default();
    if let Some(v) = cache().lock().unwrap().get(&(n, fp.clone())) {
        return Ok(v.clone());
    }
    let list = if n == 0 {
        vec![Graph::empty(0)]
    } else {
        let prev = enumerate_graphs(n - 1, family)?;
        let keys: HashSet<CanonKey> = prev
            .par_iter()
            .fold(HashSet::new, |mut acc, g| {
                for nbrs in 0..(1u32 << (n - 1)) {
                    let h = g.with_vertex(nbrs as u16);
                    if family.is_none_or(|f| f.contains(&h)) {
                        acc.insert(canonical_form(&h).key);
                    }
                }
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        sorted_graphs(keys)
    };
    let arc = Arc::new(list);
    cache().lock().unwrap().insert((n, fp), arc.clone());
    Ok(arc)
}

fn sorted_graphs(keys: HashSet<CanonKey>) -> Vec<Graph> {
    let mut keys: Vec<CanonKey> = keys.into_iter().collect();
    keys.sort();
    keys.iter().map(|k| k.graph()).collect()
}

/// Independent generator: grows graphs one edge at a time, level by level in
/// the number of edges. Used to cross-check [`enumerate_graphs`].
pub fn enumerate_by_edge_augmentation(n: usize) -> Vec<Graph> {
    let mut all: HashSet<CanonKey> = HashSet::new();
    let mut level: Vec<Graph> = vec![Graph::empty(n)];
    all.insert(canonical_form(&level[0]).key);
    while !level.is_empty() {
        let next: HashSet<CanonKey> = level
            .par_iter()
            .flat_map_iter(|g| {
                let g = *g;
                (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v))).filter_map(move |(u, v)| {
                    if g.has_edge(u, v) {
                        None
                    } else {
                        let mut h = g;
                        h.add_edge(u, v);
                        Some(canonical_form(&h).key)
                    }
                })
            })
            .collect();
        all.extend(next.iter().copied());
        level = next.into_iter().map(|k| k.graph()).collect();
    }
    sorted_graphs(all)
}
