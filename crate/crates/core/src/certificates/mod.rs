//! Flag-algebra certificates: data model, JSON form, exact verification and
//! kernel diagnostics.
//!
//! A certificate for `λ_γ ≤ u` at order `N` carries one symmetric PSD matrix
//! `X^τ` per type and a slack `c_F ≥ 0` per `N`-vertex basis graph such that
//! for every basis graph `F`
//!
//! ```text
//! u − λ_γ(F) = Σ_τ ⟨X^τ, D^τ_F⟩ + c_F
//! ```
//!
//! where `D^τ_F` is the product-expansion matrix from [`crate::flags`].
//! Averaging this identity over the `N`-subsets of a large graph `G` shows
//! `λ_γ(G) ≤ u + O(1/n)`.

mod stability;

pub use stability::{check_stability, CheckStatus, StabilityCheck, StabilityInputs, StabilityReport};

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::exactmath::matrix::from_ldl;
use crate::exactmath::{Matrix, PsdVerdict, QuadExt};
use crate::flags::{enumerate_flags, flag_vector, Flag, FlagBasis, FlagError, FlagJson, ProductTable};
use crate::graphs::{enumerate_graphs, graph6, Adjacency, Graph, GraphError, HereditaryFamily};
use crate::objectives::{lambda_on_basis, Objective, ObjectiveError, ObjectiveJson};
use crate::patterns::{homomorphisms, step_flag_vector, Pattern, StepGraphon};
use crate::scalar::{format_rational, parse_rational, OrderedField, Rational};

pub const CERT_VERSION: u32 = 1;
pub const NORMALIZATION: &str = "coefficient-basis-v1";

#[derive(Debug, Error)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn malformed(m: impl Into<String>) -> CertError {
    CertError::Malformed(m.into())
}

/// Exact scalars that certificates can be written in.
pub trait ExactScalar: OrderedField + fmt::Display {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, d: Option<u64>) -> Result<Self, String>;
    /// The square-free `d` this value needs, if irrational.
    fn field_d(&self) -> Option<u64>;
    fn to_quad(&self) -> QuadExt;
}

fn rational_from_json(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| format!("bad rational {s:?}")),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(BigInt::from(i)))
            .ok_or_else(|| format!("non-integer JSON number {n}; write exact values as strings")),
        _ => Err(format!("expected an exact value, got {v}")),
    }
}

impl ExactScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value, _d: Option<u64>) -> Result<Self, String> {
        rational_from_json(v)
    }

    fn field_d(&self) -> Option<u64> {
        None
    }

    fn to_quad(&self) -> QuadExt {
        QuadExt::rational(self.clone())
    }
}

impl ExactScalar for QuadExt {
    fn to_json(&self) -> Value {
        if let Some(r) = self.as_rational() {
            Value::String(format_rational(r))
        } else {
            serde_json::to_value(self).expect("serializable")
        }
    }

    fn from_json(v: &Value, d: Option<u64>) -> Result<Self, String> {
        let q = match v {
            Value::Object(_) => serde_json::from_value::<QuadExt>(v.clone()).map_err(|e| e.to_string())?,
            Value::String(s) => match parse_rational(s) {
                Some(r) => QuadExt::rational(r),
                None => QuadExt::parse(s).ok_or_else(|| format!("bad quadratic value {s:?}"))?,
            },
            _ => QuadExt::rational(rational_from_json(v)?),
        };
        if let (Some(qd), Some(d)) = (q.field_d(), d) {
            if qd != d {
                return Err(format!("value {q} is outside Q(sqrt({d}))"));
            }
        }
        Ok(q)
    }

    fn field_d(&self) -> Option<u64> {
        (!self.is_rational()).then(|| self.d())
    }

    fn to_quad(&self) -> QuadExt {
        self.clone()
    }
}

/// One type block: the flag basis (in the certificate's own order) and `X^τ`.
#[derive(Clone, Debug)]
pub struct CertBlock<T> {
    pub basis: Arc<FlagBasis>,
    pub matrix: Matrix<T>,
}

#[derive(Clone, Debug)]
pub struct Certificate<T> {
    pub objective: Objective,
    pub n: usize,
    pub family: Option<HereditaryFamily>,
    pub bound: T,
    pub blocks: Vec<CertBlock<T>>,
    /// Indexed like `enumerate_graphs(n, family)`.
    pub slacks: Vec<T>,
    pub meta: Value,
}

/// Why a certificate fails; every variant can be re-checked on its own.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    NegativeSlack { index: usize, graph6: String, value: String },
    NotPsd { block: usize, type_graph6: String, witness: Vec<String>, value: String },
    IdentityMismatch { index: usize, graph6: String, lhs: String, rhs: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub verified: bool,
    pub bound: String,
    pub refutations: Vec<Refutation>,
}

impl Verdict {
    pub fn first(&self) -> Option<&Refutation> {
        self.refutations.first()
    }
}

impl<T: ExactScalar> Certificate<T> {
    /// The basis graphs the slacks are indexed by.
    pub fn basis_graphs(&self) -> Result<Arc<Vec<Graph>>, CertError> {
        Ok(enumerate_graphs(self.n, self.family.as_ref())?)
    }

    /// `X = 0`, `u = max_F λ_γ(F)`, `c_F = u − λ_γ(F)` over the standard types.
    pub fn trivial(objective: Objective, n: usize, family: Option<HereditaryFamily>) -> Result<Self, CertError> {
        let graphs = enumerate_graphs(n, family.as_ref())?;
        let lam = lambda_on_basis(&objective, &graphs)?;
        let u = lam.iter().max().cloned().unwrap_or_else(Rational::zero);
        let blocks = crate::flags::standard_bases(n, family.as_ref())?
            .into_iter()
            .map(|b| {
                let d = b.len();
                CertBlock { basis: b, matrix: Matrix::zeros(d, d) }
            })
            .collect();
        Ok(Certificate {
            objective,
            n,
            family,
            bound: T::from_rational(&u),
            blocks,
            slacks: lam.iter().map(|l| T::from_rational(&(&u - l))).collect(),
            meta: Value::Null,
        })
    }

    fn check_shape(&self) -> Result<Arc<Vec<Graph>>, CertError> {
        if self.n < self.objective.kappa() {
            return Err(malformed(format!("N = {} is below κ = {}", self.n, self.objective.kappa())));
        }
        let graphs = self.basis_graphs()?;
        if self.slacks.len() != graphs.len() {
            return Err(malformed(format!("{} slacks for {} basis graphs", self.slacks.len(), graphs.len())));
        }
        for (t, b) in self.blocks.iter().enumerate() {
            let q = b.basis.q();
            if q == 0 || q + 2 > self.n || (self.n - q) % 2 != 0 || 2 * b.basis.s() != self.n + q {
                return Err(malformed(format!("block {t}: type order {q} does not fit N = {}", self.n)));
            }
            let d = b.basis.len();
            if b.matrix.rows() != d || b.matrix.cols() != d {
                return Err(malformed(format!("block {t}: matrix is not {d}x{d}")));
            }
            if !b.matrix.is_symmetric() {
                return Err(malformed(format!("block {t}: matrix is not symmetric")));
            }
        }
        Ok(graphs)
    }

    /// Right side `Σ_τ ⟨X^τ, D^τ_F⟩` for every basis graph.
    pub fn quadratic_terms(&self) -> Result<Vec<T>, CertError> {
        let graphs = self.check_shape()?;
        let table = ProductTable::build(self.n, graphs, self.blocks.iter().map(|b| b.basis.clone()).collect())?;
        Ok(quadratic_terms(&table, &self.blocks.iter().map(|b| &b.matrix).collect::<Vec<_>>()))
    }

    /// Exact check of slacks, PSD blocks and the per-graph identity.
    pub fn verify(&self) -> Result<Verdict, CertError> {
        let graphs = self.check_shape()?;
        let mut refutations = Vec::new();
        for (i, c) in self.slacks.iter().enumerate() {
            if c.is_negative_exact() {
                refutations.push(Refutation::NegativeSlack {
                    index: i,
                    graph6: graph6::encode(&graphs[i]),
                    value: c.to_string(),
                });
            }
        }
        let psd: Vec<PsdVerdict<T>> = self.blocks.par_iter().map(|b| b.matrix.psd_check()).collect();
        for (t, v) in psd.into_iter().enumerate() {
            if let PsdVerdict::NotPsd { witness, value } = v {
                refutations.push(Refutation::NotPsd {
                    block: t,
                    type_graph6: graph6::encode(self.blocks[t].basis.tau()),
                    witness: witness.iter().map(|w| w.to_string()).collect(),
                    value: value.to_string(),
                });
            }
        }
        let lam = lambda_on_basis(&self.objective, &graphs)?;
        let quad = self.quadratic_terms()?;
        for (i, (l, qv)) in lam.iter().zip(quad).enumerate() {
            let lhs = self.bound.clone() - T::from_rational(l);
            let rhs = qv + self.slacks[i].clone();
            if lhs.cmp_exact(&rhs) != Ordering::Equal {
                refutations.push(Refutation::IdentityMismatch {
                    index: i,
                    graph6: graph6::encode(&graphs[i]),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
        Ok(Verdict { verified: refutations.is_empty(), bound: self.bound.to_string(), refutations })
    }

    /// Recomputes every slack from the identity, given `u` and the matrices.
    pub fn recompute_slacks(&mut self) -> Result<(), CertError> {
        let graphs = self.basis_graphs()?;
        if self.slacks.len() != graphs.len() {
            self.slacks = vec![T::zero(); graphs.len()];
        }
        let lam = lambda_on_basis(&self.objective, &graphs)?;
        let quad = self.quadratic_terms()?;
        self.slacks = lam.iter().zip(quad).map(|(l, q)| self.bound.clone() - T::from_rational(l) - q).collect();
        Ok(())
    }

    /// Minimum slack over basis graphs satisfying `pred`; `None` when no
    /// graph matches (an infinite minimum).
    pub fn slack_query(&self, pred: impl Fn(&Graph) -> bool) -> Result<SlackQuery<T>, CertError> {
        let graphs = self.basis_graphs()?;
        let mut min: Option<T> = None;
        let mut argmin = Vec::new();
        let mut matched = 0;
        for (g, c) in graphs.iter().zip(&self.slacks) {
            if !pred(g) {
                continue;
            }
            matched += 1;
            match min.as_ref().map(|m| c.cmp_exact(m)) {
                None | Some(Ordering::Less) => {
                    min = Some(c.clone());
                    argmin = vec![graph6::encode(g)];
                }
                Some(Ordering::Equal) => argmin.push(graph6::encode(g)),
                Some(Ordering::Greater) => {}
            }
        }
        Ok(SlackQuery { matched, min, argmin })
    }

    /// Rooted embeddings `f` of block `t`'s type into `g` with
    /// `‖X^τ v_{(G,f)}‖_∞ ≥ ε`, where `v` is the exact flag-density vector.
    pub fn diagnose<A: Adjacency>(&self, g: &A, t: usize, eps: &T) -> Result<Vec<Diagnosis>, CertError> {
        if !eps.sign().is_gt() {
            return Err(malformed("ε must be positive"));
        }
        let block = self.blocks.get(t).ok_or_else(|| malformed(format!("no block {t}")))?;
        let q = block.basis.q();
        let tau = *block.basis.tau();
        let n = g.order();
        let mut tuples = Vec::new();
        let mut cur = Vec::with_capacity(q);
        fn rec<A: Adjacency>(g: &A, tau: &Graph, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let d = cur.len();
            if d == tau.order() {
                out.push(cur.clone());
                return;
            }
            for v in 0..g.order() {
                if cur.contains(&v) {
                    continue;
                }
                if (0..d).all(|i| g.has_edge(cur[i], v) == tau.has_edge(i, d)) {
                    cur.push(v);
                    rec(g, tau, cur, out);
                    cur.pop();
                }
            }
        }
        if n >= block.basis.s() {
            rec(g, &tau, &mut cur, &mut tuples);
        }
        let out = tuples
            .par_iter()
            .filter_map(|roots| {
                let v = flag_vector(g, roots, &block.basis).ok()?;
                let xv = block.matrix.mul_vec(&v.iter().map(T::from_rational).collect::<Vec<_>>());
                let norm = xv.iter().map(|x| x.abs_exact()).fold(T::zero(), |a, b| if b.cmp_exact(&a).is_gt() { b } else { a });
                (norm.cmp_exact(eps) != Ordering::Less).then(|| Diagnosis { roots: roots.clone(), norm: norm.to_string(), norm_f64: norm.to_f64() })
            })
            .collect();
        Ok(out)
    }

    /// Index of the block whose type is isomorphic to `tau`.
    pub fn block_for_type(&self, tau: &Graph) -> Option<usize> {
        self.blocks.iter().position(|b| crate::graphs::is_isomorphic(b.basis.tau(), tau))
    }

    pub fn field_d(&self) -> Option<u64> {
        self.bound
            .field_d()
            .or_else(|| self.slacks.iter().find_map(|x| x.field_d()))
            .or_else(|| {
                self.blocks
                    .iter()
                    .find_map(|b| (0..b.matrix.rows()).find_map(|r| b.matrix.row(r).iter().find_map(|x| x.field_d())))
            })
    }
}

/// Result of [`Certificate::slack_query`].
#[derive(Clone, Debug)]
pub struct SlackQuery<T> {
    pub matched: usize,
    pub min: Option<T>,
    pub argmin: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnosis {
    pub roots: Vec<usize>,
    pub norm: String,
    pub norm_f64: f64,
}

/// `Σ_τ ⟨X^τ, D^τ_F⟩` for every graph of `table`.
pub fn quadratic_terms<T: ExactScalar>(table: &ProductTable, mats: &[&Matrix<T>]) -> Vec<T> {
    (0..table.graphs.len())
        .into_par_iter()
        .map(|f| {
            let mut acc = T::zero();
            for (block, x) in table.blocks.iter().zip(mats) {
                let mut s = T::zero();
                for &(i, j, c) in &block.entries[f] {
                    let xij = x[(i as usize, j as usize)].clone();
                    if xij.is_zero() {
                        continue;
                    }
                    let mult = if i == j { c } else { 2 * c };
                    s = s + xij * T::from_rational(&Rational::from_integer(BigInt::from(mult)));
                }
                if !s.is_zero() {
                    acc = acc + s * T::from_rational(&Rational::new(BigInt::one(), block.normalizer.clone()));
                }
            }
            acc
        })
        .collect()
}

/// `(deg u0 − deg u1)/(n − 2)` computed from the 2-rooted flag vector: the
/// density of "adjacent to `u0` only" minus that of "adjacent to `u1` only".
pub fn degree_functional<A: Adjacency>(g: &A, u0: usize, u1: usize) -> Result<Rational, CertError> {
    let n = g.order();
    if n < 3 || u0 == u1 || u0 >= n || u1 >= n {
        return Err(malformed("degree functional needs n >= 3 and distinct roots"));
    }
    let tau = if g.has_edge(u0, u1) { Graph::complete(2) } else { Graph::empty(2) };
    let basis = enumerate_flags(&tau, 3, None)?;
    let v = flag_vector(g, &[u0, u1], &basis)?;
    let only = |r: usize| {
        let mut h = tau.with_vertex(0);
        h.add_edge(r, 2);
        basis.index_of_labeled(&h).expect("flag exists")
    };
    let (a, b) = (only(0), only(1));
    Ok(&v[a] - &v[b])
}

/// Limiting flag-density vectors of the blowup `B(a)` for every assignment
/// of the roots of `basis`'s type to parts of `b` (one per homomorphism).
pub fn construction_kernel_vectors<T: ExactScalar>(
    b: &Pattern,
    a: &[T],
    basis: &FlagBasis,
) -> Result<Vec<(Vec<usize>, Vec<T>)>, CertError> {
    if a.len() != b.order() {
        return Err(malformed("ratio vector length differs from the pattern order"));
    }
    let w = b.to_step::<T>();
    Ok(homomorphisms(basis.tau(), b)
        .into_iter()
        .filter_map(|parts| step_flag_vector(&w, a, &parts, basis).map(|v| (parts, v)))
        .collect())
}

/// Kernel hints from a step graphon: every root-part tuple realizing the type
/// with positive probability.
pub fn step_kernel_vectors<T: ExactScalar>(w: &StepGraphon<T>, a: &[T], basis: &FlagBasis) -> Vec<(Vec<usize>, Vec<T>)> {
    let q = basis.q();
    let m = w.order();
    let mut out = Vec::new();
    for code in 0..(m as u64).pow(q as u32) {
        let mut c = code;
        let parts: Vec<usize> = (0..q)
            .map(|_| {
                let x = (c % m as u64) as usize;
                c /= m as u64;
                x
            })
            .collect();
        if parts.iter().any(|&p| a[p].is_zero()) {
            continue;
        }
        if let Some(v) = step_flag_vector(w, a, &parts, basis) {
            out.push((parts, v));
        }
    }
    out
}

/// Whether `ker(X) ∩ span{e_i : i ∈ coords} = {0}`, i.e. the columns of `X`
/// indexed by `coords` are linearly independent.
pub fn kernel_subspace_triviality<T: ExactScalar>(x: &Matrix<T>, coords: &[usize]) -> bool {
    let rows: Vec<usize> = (0..x.rows()).collect();
    x.submatrix(&rows, coords).rank() == coords.len()
}

// ---- JSON ----

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixJson {
    Dense(Vec<Vec<Value>>),
    Ldl {
        #[serde(rename = "L")]
        l: Vec<Vec<Value>>,
        #[serde(rename = "D")]
        d: Vec<Value>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypeJson {
    pub graph6: String,
    pub q: usize,
    pub flag_basis: Vec<FlagJson>,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub version: u32,
    pub normalization: String,
    pub objective: ObjectiveJson,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<String>>,
    pub bound: Value,
    pub types: Vec<TypeJson>,
    pub slacks: Vec<Value>,
    #[serde(default)]
    pub meta: Value,
}

impl<T: ExactScalar> Certificate<T> {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            version: CERT_VERSION,
            normalization: NORMALIZATION.into(),
            objective: self.objective.to_json(),
            n: self.n,
            field_d: self.field_d(),
            family: self.family.as_ref().map(|f| f.forbidden.iter().map(graph6::encode).collect()),
            bound: self.bound.to_json(),
            types: self
                .blocks
                .iter()
                .map(|b| TypeJson {
                    graph6: graph6::encode(b.basis.tau()),
                    q: b.basis.q(),
                    flag_basis: b.basis.flags().iter().map(Flag::to_json).collect(),
                    matrix: MatrixJson::Dense(
                        b.matrix.to_rows().iter().map(|r| r.iter().map(ExactScalar::to_json).collect()).collect(),
                    ),
                })
                .collect(),
            slacks: self.slacks.iter().map(ExactScalar::to_json).collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self, CertError> {
        if j.version != CERT_VERSION {
            return Err(malformed(format!("unsupported version {}", j.version)));
        }
        if j.normalization != NORMALIZATION {
            return Err(malformed(format!("unsupported normalization {:?}", j.normalization)));
        }
        let d = j.field_d;
        let val = |v: &Value| T::from_json(v, d).map_err(malformed);
        let objective = Objective::from_json(&j.objective)?;
        let family = match &j.family {
            Some(list) => Some(HereditaryFamily::new(list.iter().map(|s| graph6::decode(s)).collect::<Result<_, _>>()?)),
            None => None,
        };
        let mut blocks = Vec::new();
        for (t, ty) in j.types.iter().enumerate() {
            let tau = graph6::decode(&ty.graph6)?;
            if tau.order() != ty.q {
                return Err(malformed(format!("type {t}: q = {} but graph has {} vertices", ty.q, tau.order())));
            }
            if ty.q + 2 > j.n || (j.n - ty.q) % 2 != 0 {
                return Err(malformed(format!("type {t}: order {} does not fit N = {}", ty.q, j.n)));
            }
            let s = (j.n + ty.q) / 2;
            let flags = ty.flag_basis.iter().map(FlagJson::to_flag).collect::<Result<Vec<_>, _>>()?;
            let basis = FlagBasis::from_list(tau, s, flags, family.as_ref())
                .map_err(|e| malformed(format!("type {t}: {e}")))?;
            let dim = basis.len();
            let rows_of = |rows: &Vec<Vec<Value>>| -> Result<Matrix<T>, CertError> {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(malformed(format!("type {t}: matrix must be {dim}x{dim}")));
                }
                let rows = rows.iter().map(|r| r.iter().map(val).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
                Ok(Matrix::from_rows(rows))
            };
            let matrix = match &ty.matrix {
                MatrixJson::Dense(rows) => rows_of(rows)?,
                MatrixJson::Ldl { l, d: dd } => {
                    let l = rows_of(l)?;
                    if dd.len() != dim {
                        return Err(malformed(format!("type {t}: D must have {dim} entries")));
                    }
                    let dd = dd.iter().map(val).collect::<Result<Vec<_>, _>>()?;
                    from_ldl(&l, &dd)
                }
            };
            blocks.push(CertBlock { basis: Arc::new(basis), matrix });
        }
        let cert = Certificate {
            objective,
            n: j.n,
            family,
            bound: val(&j.bound)?,
            blocks,
            slacks: j.slacks.iter().map(val).collect::<Result<_, _>>()?,
            meta: j.meta.clone(),
        };
        cert.check_shape()?;
        Ok(cert)
    }
}

/// A certificate over `Q` or over a quadratic field, chosen by `field_d`.
#[derive(Clone, Debug)]
pub enum AnyCertificate {
    Rational(Certificate<Rational>),
    Quadratic(Certificate<QuadExt>),
}

impl AnyCertificate {
    pub fn from_json_str(s: &str) -> Result<Self, CertError> {
        let j: CertificateJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self, CertError> {
        match j.field_d {
            None => Ok(AnyCertificate::Rational(Certificate::from_json(j)?)),
            Some(d) => {
                if !crate::exactmath::quad::is_square_free(d) {
                    return Err(malformed(format!("field_d = {d} is not square-free")));
                }
                Ok(AnyCertificate::Quadratic(Certificate::from_json(j)?))
            }
        }
    }

    pub fn to_json(&self) -> CertificateJson {
        match self {
            AnyCertificate::Rational(c) => c.to_json(),
            AnyCertificate::Quadratic(c) => c.to_json(),
        }
    }

    pub fn verify(&self) -> Result<Verdict, CertError> {
        match self {
            AnyCertificate::Rational(c) => c.verify(),
            AnyCertificate::Quadratic(c) => c.verify(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyCertificate::Rational(c) => c.n,
            AnyCertificate::Quadratic(c) => c.n,
        }
    }

    pub fn bound_string(&self) -> String {
        match self {
            AnyCertificate::Rational(c) => c.bound.to_string(),
            AnyCertificate::Quadratic(c) => c.bound.to_string(),
        }
    }

    /// The bound as a quadratic number (rationals embed with `d` unset).
    pub fn bound_quad(&self) -> QuadExt {
        match self {
            AnyCertificate::Rational(c) => QuadExt::rational(c.bound.clone()),
            AnyCertificate::Quadratic(c) => c.bound.clone(),
        }
    }

    pub fn family(&self) -> Option<&HereditaryFamily> {
        match self {
            AnyCertificate::Rational(c) => c.family.as_ref(),
            AnyCertificate::Quadratic(c) => c.family.as_ref(),
        }
    }

    pub fn objective(&self) -> &Objective {
        match self {
            AnyCertificate::Rational(c) => &c.objective,
            AnyCertificate::Quadratic(c) => &c.objective,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::gamma_edge;
    use crate::scalar::rat;

    #[test]
    fn trivial_certificate_verifies() {
        let c: Certificate<Rational> = Certificate::trivial(gamma_edge(4, 3).unwrap(), 5, None).unwrap();
        assert_eq!(c.bound, rat(1, 1));
        assert!(c.verify().unwrap().verified);
        let mut bad = c.clone();
        bad.slacks[3] = rat(-1, 1_000_000);
        let v = bad.verify().unwrap();
        assert!(!v.verified);
        assert!(matches!(v.first(), Some(Refutation::NegativeSlack { index: 3, .. })));
    }

    #[test]
    fn json_roundtrip() {
        let c: Certificate<Rational> = Certificate::trivial(gamma_edge(3, 1).unwrap(), 5, None).unwrap();
        let s = serde_json::to_string(&c.to_json()).unwrap();
        let back = AnyCertificate::from_json_str(&s).unwrap();
        assert!(back.verify().unwrap().verified);
        let AnyCertificate::Rational(b) = back else { panic!() };
        assert_eq!(b.slacks, c.slacks);
    }

    #[test]
    fn non_psd_block_is_refuted() {
        let mut c: Certificate<Rational> = Certificate::trivial(gamma_edge(3, 1).unwrap(), 5, None).unwrap();
        c.blocks[0].matrix[(0, 0)] = rat(-1, 1);
        c.recompute_slacks().unwrap();
        let v = c.verify().unwrap();
        assert!(v.refutations.iter().any(|r| matches!(r, Refutation::NotPsd { block: 0, .. })));
    }

    #[test]
    fn degree_functional_examples() {
        let star = Graph::star(4);
        assert_eq!(degree_functional(&star, 0, 1).unwrap(), rat(1, 1));
        assert_eq!(degree_functional(&star, 1, 0).unwrap(), rat(-1, 1));
        assert_eq!(degree_functional(&Graph::cycle(6), 0, 3).unwrap(), rat(0, 1));
        assert!(degree_functional(&Graph::complete(2), 0, 1).is_err());
    }

    #[test]
    fn kernel_vectors_for_k2() {
        let b = Pattern::parse("K2").unwrap();
        let basis = enumerate_flags(&Graph::empty(1), 2, None).unwrap();
        let vs = construction_kernel_vectors(&b, &[rat(1, 2), rat(1, 2)], &basis).unwrap();
        assert_eq!(vs.len(), 2);
        for (_, v) in vs {
            assert_eq!(v, vec![rat(1, 2), rat(1, 2)]);
        }
    }

    #[test]
    fn kernel_triviality() {
        let id: Matrix<Rational> = Matrix::identity(3);
        assert!(kernel_subspace_triviality(&id, &[0, 2]));
        let z: Matrix<Rational> = Matrix::zeros(3, 3);
        assert!(!kernel_subspace_triviality(&z, &[1]));
    }
}
