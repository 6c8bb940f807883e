//! Slow reference computations that share no code with the library beyond
//! the plain `Graph` container.

use std::collections::HashMap;

use flagcert::exactmath::Matrix;
use flagcert::scalar::{binomial, falling};
use flagcert::{Graph, Rational};
use num_traits::{Signed, Zero};

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    fn rec(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, out);
            p.swap(i, j);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

fn same_under(a: &Graph, b: &Graph, perm: &[usize]) -> bool {
    let n = a.order();
    (0..n).all(|u| (u + 1..n).all(|v| a.has_edge(u, v) == b.has_edge(perm[u], perm[v])))
}

/// Isomorphism by trying every bijection.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    a.order() == b.order() && a.edge_count() == b.edge_count() && permutations(a.order()).iter().any(|p| same_under(a, b, p))
}

/// Isomorphism fixing the first `q` vertices pointwise.
pub fn rooted_isomorphic(a: &Graph, b: &Graph, q: usize) -> bool {
    let n = a.order();
    if n != b.order() || a.edge_count() != b.edge_count() {
        return false;
    }
    permutations(n - q).iter().any(|p| {
        let full: Vec<usize> = (0..q).chain(p.iter().map(|x| x + q)).collect();
        same_under(a, b, &full)
    })
}

/// Isomorphism classes of `n`-vertex graphs: every labeled graph is bucketed
/// by edge count and degree sequence, then compared with the bucket's
/// representatives by brute force.
pub fn naive_class_count(n: usize) -> usize {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    let mut buckets: HashMap<(usize, Vec<usize>), Vec<Graph>> = HashMap::new();
    for mask in 0u64..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
        let g = Graph::from_edges(n, &edges);
        let mut degs: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        degs.sort_unstable();
        let reps = buckets.entry((edges.len(), degs)).or_default();
        if !reps.iter().any(|r| isomorphic(r, &g)) {
            reps.push(g);
        }
    }
    buckets.values().map(Vec::len).sum()
}

fn injections(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, q, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, q, &mut cur, &mut out);
    out
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k);
    for mut s in subsets(&items[1..], k - 1) {
        s.insert(0, items[0]);
        out.push(s);
    }
    out
}

/// Probability that a random injection `θ` of the type into `g` together with
/// a random split of the remaining vertices into sets of sizes
/// `v(F₁) − q` and `v(F₂) − q` makes `(θ, X₁) ≅ F₁` and `(θ, X₂) ≅ F₂` (the
/// roots of `fᵢ` are its first `q` vertices).
pub fn product_coefficient(tau: &Graph, f1: &Graph, f2: &Graph, g: &Graph) -> Rational {
    let (n, q) = (g.order(), tau.order());
    let k1 = f1.order() - q;
    let mut hits = 0u64;
    for theta in injections(n, q) {
        if !same_under(tau, g, &theta) {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|v| !theta.contains(v)).collect();
        for x1 in subsets(&rest, k1) {
            let x2: Vec<usize> = rest.iter().copied().filter(|v| !x1.contains(v)).collect();
            let h1 = g.induced(&theta.iter().chain(&x1).copied().collect::<Vec<_>>());
            let h2 = g.induced(&theta.iter().chain(&x2).copied().collect::<Vec<_>>());
            if rooted_isomorphic(&h1, f1, q) && rooted_isomorphic(&h2, f2, q) {
                hits += 1;
            }
        }
    }
    let total = falling(n as u64, q as u64) * binomial((n - q) as u64, k1 as u64);
    Rational::new(hits.into(), total)
}

/// `Σ_{i,j} X_{ij} · c(Fᵢ, Fⱼ; g)` with coefficients from
/// [`product_coefficient`].
pub fn quadratic_form(tau: &Graph, flags: &[Graph], x: &Matrix<Rational>, g: &Graph) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..flags.len() {
        for j in 0..flags.len() {
            if x[(i, j)].is_zero() {
                continue;
            }
            acc += &x[(i, j)] * product_coefficient(tau, &flags[i], &flags[j], g);
        }
    }
    acc
}

fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut d = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    d
}

/// Positive semidefiniteness via nonnegativity of every principal minor.
pub fn psd_by_minors(x: &Matrix<Rational>) -> bool {
    let n = x.rows();
    (1u32..1 << n).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<Rational>> = idx.iter().map(|&i| idx.iter().map(|&j| x[(i, j)].clone()).collect()).collect();
        !det(sub).is_negative()
    })
}
