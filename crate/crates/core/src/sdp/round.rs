//! Rounding a floating solution to an exact certificate.
//!
//! Per block, the hint vectors `h` (limiting flag vectors of the extremal
//! construction) are forced into the kernel: with `W` a basis of `{h}^⊥`,
//! `X = W Y Wᵀ` and only `Y` is rounded. Basis graphs of positive density in
//! the construction ("tight" graphs) must end with zero slack; an exact
//! exact correction of `Y` enforces this. The result is verified, and a
//! failure is returned as such.

use serde_json::json;
use thiserror::Error;

use super::{FloatSolution, SdpError, SdpProblem};
use crate::certificates::{CertBlock, CertError, Certificate, ExactScalar, Verdict};
use crate::exactmath::Matrix;
use crate::graphs::Graph;
use crate::patterns::{Pattern, StepGraphon};
use crate::scalar::round_to_denominator;

pub const DEFAULT_DENOM_BOUND: u64 = 1 << 20;
pub const DEFAULT_HINT_GUARD: f64 = 1e-4;
pub const DEFAULT_U_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum RoundError {
    #[error("solver value {u_float} is not within {tol} of the target {target}")]
    TargetMismatch { u_float: f64, target: String, tol: f64 },
    #[error("block {block}: hint {hint} is not near the kernel (‖X h‖∞ = {residual:e})")]
    HintGuard { block: usize, hint: usize, residual: f64 },
    #[error("block {block}: entry {value} overflows the denominator {denom}")]
    Overflow { block: usize, value: f64, denom: u64 },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

#[derive(Clone, Debug)]
pub struct RoundOptions<T> {
    /// The exact bound `u` the certificate should prove.
    pub target: T,
    pub denom_bound: u64,
    pub hint_guard: f64,
    pub u_tolerance: f64,
    /// Per basis graph: whether its slack must be exactly zero.
    pub tight: Option<Vec<bool>>,
}

impl<T> RoundOptions<T> {
    pub fn new(target: T) -> Self {
        RoundOptions {
            target,
            denom_bound: DEFAULT_DENOM_BOUND,
            hint_guard: DEFAULT_HINT_GUARD,
            u_tolerance: DEFAULT_U_TOLERANCE,
            tight: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoundOutcome<T> {
    pub certificate: Certificate<T>,
    pub verdict: Verdict,
}

impl<T> RoundOutcome<T> {
    pub fn verified(&self) -> bool {
        self.verdict.verified
    }
}

/// Graphs of positive density in the step graphon `W(a)`: those admitting a
/// map to parts of positive weight under which every edge has probability
/// `> 0` and every non-edge probability `< 1`.
pub fn tight_from_step<T: ExactScalar>(w: &StepGraphon<T>, a: &[T], graphs: &[Graph]) -> Vec<bool> {
    let support: Vec<usize> = (0..w.order()).filter(|&i| !a[i].is_zero()).collect();
    graphs
        .iter()
        .map(|g| {
            let n = g.order();
            let m = support.len();
            if m == 0 {
                return n == 0;
            }
            let mut phi = vec![0usize; n];
            loop {
                let ok = (0..n).all(|y| {
                    (0..y).all(|x| {
                        let p = w.prob(support[phi[x]], support[phi[y]]);
                        if g.has_edge(x, y) {
                            !p.is_zero()
                        } else {
                            !(p.clone() - T::one()).is_zero()
                        }
                    })
                });
                if ok {
                    return true;
                }
                // next map in odometer order
                let mut k = 0;
                while k < n && phi[k] + 1 == m {
                    phi[k] = 0;
                    k += 1;
                }
                if k == n {
                    return false;
                }
                phi[k] += 1;
            }
        })
        .collect()
}

/// [`tight_from_step`] for the blowup of a pattern.
pub fn tight_from_pattern<T: ExactScalar>(b: &Pattern, a: &[T], graphs: &[Graph]) -> Vec<bool> {
    tight_from_step(&b.to_step::<T>(), a, graphs)
}

/// Rational basis of the numerical kernel of every block: eigenvectors with
/// eigenvalue below `eig_tol`, brought to reduced row echelon form with full
/// pivoting and rounded entry-wise to the nearest fraction with denominator
/// at most `max_den`. Meant to be combined with construction hints when the
/// optimal matrices have a kernel larger than the construction explains; the
/// hint guard in [`round_solution`] still applies.
pub fn numerical_kernel_hints<T: ExactScalar>(sol: &FloatSolution, eig_tol: f64, max_den: u64) -> Vec<Vec<Vec<T>>> {
    sol.blocks
        .iter()
        .map(|x| {
            let d = x.rows();
            if d == 0 {
                return Vec::new();
            }
            let m = nalgebra::DMatrix::from_fn(d, d, |i, j| x[(i, j)]);
            let eig = nalgebra::SymmetricEigen::new(m);
            let mut k: Vec<Vec<f64>> = (0..d)
                .filter(|&c| eig.eigenvalues[c] < eig_tol)
                .map(|c| eig.eigenvectors.column(c).iter().copied().collect())
                .collect();
            let rows = k.len();
            let mut used = vec![false; d];
            for r in 0..rows {
                let mut best = (0.0, r, 0);
                for (i, row) in k.iter().enumerate().skip(r) {
                    for (c, v) in row.iter().enumerate() {
                        if !used[c] && v.abs() > best.0 {
                            best = (v.abs(), i, c);
                        }
                    }
                }
                let (_, i, c) = best;
                used[c] = true;
                k.swap(r, i);
                let p = k[r][c];
                k[r].iter_mut().for_each(|v| *v /= p);
                let pivot = k[r].clone();
                for (o, row) in k.iter_mut().enumerate() {
                    if o != r {
                        let f = row[c];
                        row.iter_mut().zip(&pivot).for_each(|(v, q)| *v -= f * q);
                    }
                }
            }
            k.iter().map(|row| row.iter().map(|&v| T::from_rational(&nearest_fraction(v, max_den))).collect()).collect()
        })
        .collect()
}

fn nearest_fraction(x: f64, max_den: u64) -> crate::scalar::Rational {
    let mut best = round_to_denominator(x, 1);
    let mut err = (x - x.round()).abs();
    for q in 2..=max_den.max(1) {
        let e = (x * q as f64 - (x * q as f64).round()).abs() / q as f64;
        if e + 1e-12 < err {
            err = e;
            best = round_to_denominator(x, q);
        }
    }
    best
}

fn to_f64_vec<T: ExactScalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64()).collect()
}

/// Basis of the orthogonal complement of the hints, as columns.
fn complement<T: ExactScalar>(d: usize, hints: &[Vec<T>]) -> Matrix<T> {
    if hints.is_empty() {
        return Matrix::identity(d);
    }
    let h = Matrix::from_rows(hints.to_vec());
    let ker = h.kernel_basis();
    if ker.is_empty() {
        return Matrix::zeros(d, 0);
    }
    Matrix::from_columns(&ker)
}

/// Rounds `sol` to a certificate for `p` proving `opts.target`.
///
/// `hints[t]` lists exact vectors to force into the kernel of block `t`.
pub fn round_solution<T: ExactScalar>(
    p: &SdpProblem,
    sol: &FloatSolution,
    hints: &[Vec<Vec<T>>],
    opts: &RoundOptions<T>,
) -> Result<RoundOutcome<T>, RoundError> {
    let nb = p.table.blocks.len();
    if sol.blocks.len() != nb || hints.len() != nb {
        return Err(RoundError::Shape(format!(
            "{nb} blocks, {} solution matrices, {} hint lists",
            sol.blocks.len(),
            hints.len()
        )));
    }
    let target_f = opts.target.to_f64();
    if !((sol.u - target_f).abs() < opts.u_tolerance) {
        return Err(RoundError::TargetMismatch { u_float: sol.u, target: opts.target.to_string(), tol: opts.u_tolerance });
    }
    let graphs = p.graphs().clone();
    if let Some(t) = &opts.tight {
        if t.len() != graphs.len() {
            return Err(RoundError::Shape(format!("{} tight flags for {} graphs", t.len(), graphs.len())));
        }
    }

    // kernel forcing and entry-wise rounding of Y
    let mut ws: Vec<Matrix<T>> = Vec::with_capacity(nb);
    let mut ys: Vec<Matrix<T>> = Vec::with_capacity(nb);
    for (t, blk) in p.table.blocks.iter().enumerate() {
        let d = blk.dim();
        let xf = &sol.blocks[t];
        if xf.rows() != d || xf.cols() != d {
            return Err(SdpError::Dimension(format!("block {t} is {}x{}, expected {d}x{d}", xf.rows(), xf.cols())).into());
        }
        for (k, h) in hints[t].iter().enumerate() {
            if h.len() != d {
                return Err(RoundError::Shape(format!("block {t}: hint {k} has length {}", h.len())));
            }
            let r = xf.mul_vec(&to_f64_vec(h)).into_iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !(r < opts.hint_guard) {
                return Err(RoundError::HintGuard { block: t, hint: k, residual: r });
            }
        }
        let w = complement(d, &hints[t]);
        let k = w.cols();
        let y = if k == 0 {
            Matrix::zeros(0, 0)
        } else {
            let wt = w.transpose();
            let gram = wt.mul(&w).inverse().expect("complement basis has full column rank");
            let proj = gram.mul(&wt).to_f64();
            let yf = proj.mul(xf).mul(&proj.transpose());
            let mut y = Matrix::zeros(k, k);
            for i in 0..k {
                for j in i..k {
                    let v = 0.5 * (yf[(i, j)] + yf[(j, i)]);
                    if !v.is_finite() || v.abs() * opts.denom_bound as f64 > 2f64.powi(100) {
                        return Err(RoundError::Overflow { block: t, value: v, denom: opts.denom_bound });
                    }
                    let r = T::from_rational(&round_to_denominator(v, opts.denom_bound));
                    y[(i, j)] = r.clone();
                    y[(j, i)] = r;
                }
            }
            y
        };
        ws.push(w);
        ys.push(y);
    }

    let lam: Vec<T> = p.lambda.iter().map(T::from_rational).collect();
    let mut correction = json!(null);
    if let Some(tight) = &opts.tight {
        correction = correct_tight(p, &ws, &mut ys, &lam, tight, &opts.target);
    }

    let blocks: Vec<CertBlock<T>> = p
        .table
        .blocks
        .iter()
        .zip(ws.iter().zip(&ys))
        .map(|(blk, (w, y))| {
            let x = if w.cols() == 0 { Matrix::zeros(blk.dim(), blk.dim()) } else { w.mul(y).mul(&w.transpose()) };
            CertBlock { basis: blk.basis.clone(), matrix: x }
        })
        .collect();
    let mut cert = Certificate {
        objective: p.objective.clone(),
        n: p.n,
        family: p.family.clone(),
        bound: opts.target.clone(),
        blocks,
        slacks: Vec::new(),
        meta: json!({
            "u_float": sol.u,
            "denom_bound": opts.denom_bound,
            "hints": hints.iter().map(Vec::len).collect::<Vec<_>>(),
            "tight_correction": correction,
        }),
    };
    cert.recompute_slacks()?;
    let verdict = cert.verify()?;
    Ok(RoundOutcome { certificate: cert, verdict })
}

/// `Σ_τ ⟨W Y Wᵀ, D^τ_F⟩` as a linear form in the upper triangles of the `Y`.
fn tight_row<T: ExactScalar>(p: &SdpProblem, ws: &[Matrix<T>], f: usize) -> Vec<T> {
    let mut row = Vec::new();
    for (blk, w) in p.table.blocks.iter().zip(ws) {
        let k = w.cols();
        if k == 0 {
            continue;
        }
        let d = blk.dense(f).map(|r| T::from_rational(r));
        let m = w.transpose().mul(&d).mul(w);
        for i in 0..k {
            for j in i..k {
                let v = m[(i, j)].clone();
                row.push(if i == j { v } else { v.clone() + v });
            }
        }
    }
    row
}

/// Adjusts the `Y` by an exact change on pivot coordinates making every tight
/// slack zero. Returns a JSON summary; leaves `ys` unchanged when the
/// system is inconsistent.
fn correct_tight<T: ExactScalar>(
    p: &SdpProblem,
    ws: &[Matrix<T>],
    ys: &mut [Matrix<T>],
    lam: &[T],
    tight: &[bool],
    u: &T,
) -> serde_json::Value {
    let idx: Vec<usize> = (0..tight.len()).filter(|&f| tight[f]).collect();
    let nvars: usize = ws.iter().map(|w| w.cols() * (w.cols() + 1) / 2).sum();
    if idx.is_empty() || nvars == 0 {
        return json!({ "tight": idx.len(), "applied": false });
    }
    let rows: Vec<Vec<T>> = idx.iter().map(|&f| tight_row(p, ws, f)).collect();
    let y_vec: Vec<T> = ys
        .iter()
        .flat_map(|y| {
            let k = y.rows();
            (0..k).flat_map(move |i| (i..k).map(move |j| y[(i, j)].clone()))
        })
        .collect();
    let resid: Vec<T> = rows
        .iter()
        .zip(&idx)
        .map(|(r, &f)| {
            let q = r.iter().zip(&y_vec).fold(T::zero(), |s, (a, b)| s + a.clone() * b.clone());
            u.clone() - lam[f].clone() - q
        })
        .collect();
    let a = Matrix::from_rows(rows);
    let (prow, pcol) = float_pivots(&a.to_f64());
    // exact solve on the pivot rows and columns, other variables unchanged
    let r = prow.len();
    let aug = Matrix::from_fn(r, r + 1, |i, j| if j < r { a[(prow[i], pcol[j])].clone() } else { resid[prow[i]].clone() });
    let (red, piv) = aug.rref();
    if piv.len() != r || piv.last() == Some(&r) {
        return json!({ "tight": idx.len(), "rank": r, "applied": false, "reason": "singular" });
    }
    let mut delta = vec![T::zero(); nvars];
    for (i, &c) in pcol.iter().enumerate() {
        delta[c] = red[(i, r)].clone();
    }
    let consistent = a
        .mul_vec(&delta)
        .iter()
        .zip(&resid)
        .all(|(l, r)| l.cmp_exact(r) == std::cmp::Ordering::Equal);
    if !consistent {
        return json!({ "tight": idx.len(), "rank": r, "applied": false, "reason": "inconsistent" });
    }
    let mut pos = 0;
    for y in ys.iter_mut() {
        let k = y.rows();
        for i in 0..k {
            for j in i..k {
                let v = y[(i, j)].clone() + delta[pos].clone();
                y[(i, j)] = v.clone();
                y[(j, i)] = v;
                pos += 1;
            }
        }
    }
    let max_change = delta.iter().map(|d| d.to_f64().abs()).fold(0.0, f64::max);
    json!({ "tight": idx.len(), "rank": prow.len(), "applied": true, "max_change": max_change })
}

/// Pivot rows and columns of Gaussian elimination with full pivoting.
fn float_pivots(a: &Matrix<f64>) -> (Vec<usize>, Vec<usize>) {
    let (n, m) = (a.rows(), a.cols());
    let mut w = a.to_rows();
    let scale = w.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    let tol = scale * 1e-9 * (n.max(m) as f64);
    let mut rows_left: Vec<usize> = (0..n).collect();
    let mut cols_left: Vec<usize> = (0..m).collect();
    let (mut prow, mut pcol) = (Vec::new(), Vec::new());
    loop {
        let mut best = (0.0, 0, 0);
        for (ri, &r) in rows_left.iter().enumerate() {
            for (ci, &c) in cols_left.iter().enumerate() {
                if w[r][c].abs() > best.0 {
                    best = (w[r][c].abs(), ri, ci);
                }
            }
        }
        if best.0 <= tol {
            break;
        }
        let (r, c) = (rows_left.swap_remove(best.1), cols_left.swap_remove(best.2));
        let pivot_row = w[r].clone();
        for &o in &rows_left {
            let f = w[o][c] / pivot_row[c];
            if f != 0.0 {
                for k in 0..m {
                    w[o][k] -= f * pivot_row[k];
                }
            }
        }
        prow.push(r);
        pcol.push(c);
    }
    (prow, pcol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::gamma_edge;
    use crate::scalar::{rat, Rational};
    use crate::sdp::assemble;

    #[test]
    fn zero_matrices_round_to_trivial_certificate() {
        let p = assemble(&gamma_edge(4, 3).unwrap(), 4, None).unwrap();
        let u = p.lambda.iter().max().unwrap().clone();
        let sol = FloatSolution {
            u: crate::scalar::rational_to_f64(&u),
            blocks: p.block_dims().iter().map(|&d| Matrix::zeros(d, d)).collect(),
            meta: json!(null),
        };
        let hints = vec![Vec::<Vec<Rational>>::new(); p.table.blocks.len()];
        let out = round_solution(&p, &sol, &hints, &RoundOptions::new(u)).unwrap();
        assert!(out.verified());
    }

    #[test]
    fn target_far_from_solver_value_is_rejected() {
        let p = assemble(&gamma_edge(4, 3).unwrap(), 4, None).unwrap();
        let sol = FloatSolution {
            u: 0.9,
            blocks: p.block_dims().iter().map(|&d| Matrix::zeros(d, d)).collect(),
            meta: json!(null),
        };
        let hints = vec![Vec::<Vec<Rational>>::new(); p.table.blocks.len()];
        let e = round_solution(&p, &sol, &hints, &RoundOptions::new(rat(1, 2))).unwrap_err();
        assert!(matches!(e, RoundError::TargetMismatch { .. }));
    }

    #[test]
    fn tight_set_of_complete_bipartite_limit() {
        let b = Pattern::parse("2:01").unwrap();
        let g = vec![Graph::complete(3), Graph::from_edges(3, &[(0, 1), (1, 2)]), Graph::empty(3)];
        let t = tight_from_pattern(&b, &[rat(1, 2), rat(1, 2)], &g);
        assert_eq!(t, vec![false, true, true]);
    }
}
