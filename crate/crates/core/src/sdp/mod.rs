//! The flag-algebra semidefinite program: assembly, SDPA export, solution
//! import and rounding to exact certificates.
//!
//! Variables are `u` followed by the upper triangle of every `X^τ`. The
//! program minimizes `u` subject to `X^τ ⪰ 0` and, for every basis graph `F`,
//! `u − λ_γ(F) − Σ_τ ⟨X^τ, D^τ_F⟩ ≥ 0`.

mod round;
mod sdpa;

pub use round::{
    numerical_kernel_hints, round_solution, DEFAULT_DENOM_BOUND, DEFAULT_HINT_GUARD, tight_from_pattern, tight_from_step, RoundError, RoundOptions, RoundOutcome,
};
pub use sdpa::{export_sdpa, import_solution, max_relative_deviation, parse_sdpa, run_solver, FloatSolution, SdpaData, SdpaEntry};

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::certificates::{construction_kernel_vectors, step_kernel_vectors, CertError, ExactScalar};
use crate::flags::{FlagError, ProductTable};
use crate::graphs::{Graph, GraphError, HereditaryFamily};
use crate::objectives::{lambda_on_basis, Objective, ObjectiveError};
use crate::patterns::{Pattern, StepGraphon};
use crate::scalar::Rational;

/// Largest `N` accepted by [`assemble`].
pub const MAX_SDP_ORDER: usize = 8;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("N = {n} must lie in κ..={MAX_SDP_ORDER} (κ = {kappa})")]
    Order { n: usize, kappa: usize },
    #[error("solution does not match the problem: {0}")]
    Dimension(String),
    #[error("cannot parse solver file: {0}")]
    Parse(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// An assembled program with exact data.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub objective: Objective,
    pub n: usize,
    pub family: Option<HereditaryFamily>,
    pub table: ProductTable,
    /// `λ_γ(F)` for every basis graph.
    pub lambda: Vec<Rational>,
}

impl SdpProblem {
    pub fn graphs(&self) -> &Arc<Vec<Graph>> {
        &self.table.graphs
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.table.blocks.iter().map(|b| b.dim()).collect()
    }

    /// Number of scalar variables: `u` plus all upper-triangular entries.
    pub fn num_vars(&self) -> usize {
        1 + self.block_dims().iter().map(|d| d * (d + 1) / 2).sum::<usize>()
    }

    /// 0-based variable index of `X^τ_{ij}` (`i ≤ j`) in block `t`.
    pub fn var_index(&self, t: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let mut off = 1;
        for d in &self.block_dims()[..t] {
            off += d * (d + 1) / 2;
        }
        let d = self.table.blocks[t].dim();
        // row-major upper triangle
        off + i * d - i * (i + 1) / 2 + i + (j - i)
    }

    /// Kernel hints for every block from a pattern construction.
    pub fn pattern_hints<T: ExactScalar>(&self, b: &Pattern, a: &[T]) -> Result<Vec<Vec<Vec<T>>>, SdpError> {
        self.table
            .blocks
            .iter()
            .map(|blk| Ok(construction_kernel_vectors(b, a, &blk.basis)?.into_iter().map(|(_, v)| v).collect()))
            .collect()
    }

    /// Kernel hints for every block from a step-graphon construction.
    pub fn step_hints<T: ExactScalar>(&self, w: &StepGraphon<T>, a: &[T]) -> Vec<Vec<Vec<T>>> {
        self.table
            .blocks
            .iter()
            .map(|blk| step_kernel_vectors(w, a, &blk.basis).into_iter().map(|(_, v)| v).collect())
            .collect()
    }
}

/// Builds the program for `γ` at order `N`, optionally within a family.
pub fn assemble(objective: &Objective, n: usize, family: Option<&HereditaryFamily>) -> Result<SdpProblem, SdpError> {
    if n < objective.kappa() || n > MAX_SDP_ORDER {
        return Err(SdpError::Order { n, kappa: objective.kappa() });
    }
    let table = ProductTable::for_order(n, family)?;
    finish(objective, n, family, table)
}

/// [`assemble`] with the product table cached on disk under `dir`.
pub fn assemble_cached(
    objective: &Objective,
    n: usize,
    family: Option<&HereditaryFamily>,
    dir: &Path,
) -> Result<SdpProblem, SdpError> {
    if n < objective.kappa() || n > MAX_SDP_ORDER {
        return Err(SdpError::Order { n, kappa: objective.kappa() });
    }
    let table = ProductTable::for_order_cached(n, family, dir)?;
    finish(objective, n, family, table)
}

fn finish(objective: &Objective, n: usize, family: Option<&HereditaryFamily>, table: ProductTable) -> Result<SdpProblem, SdpError> {
    let lambda = lambda_on_basis(objective, &table.graphs)?;
    Ok(SdpProblem { objective: objective.clone(), n, family: family.cloned(), table, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::gamma_edge;

    #[test]
    fn block_layout_for_5_4() {
        let p = assemble(&gamma_edge(5, 4).unwrap(), 5, None).unwrap();
        let qs: Vec<usize> = p.table.blocks.iter().map(|b| b.basis.q()).collect();
        assert!(qs.iter().all(|&q| q == 1 || q == 3));
        assert_eq!(p.table.blocks[0].basis.q(), 1);
        assert_eq!(p.table.blocks[0].dim(), 6);
        assert_eq!(p.graphs().len(), 34);
    }

    #[test]
    fn variable_indices_are_dense() {
        let p = assemble(&gamma_edge(4, 3).unwrap(), 4, None).unwrap();
        let mut seen = vec![false; p.num_vars()];
        seen[0] = true;
        for (t, d) in p.block_dims().into_iter().enumerate() {
            for i in 0..d {
                for j in i..d {
                    let v = p.var_index(t, i, j);
                    assert!(!seen[v]);
                    seen[v] = true;
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn cached_assembly_matches() {
        let dir = tempfile::tempdir().unwrap();
        let g = gamma_edge(4, 3).unwrap();
        let fresh = assemble(&g, 6, None).unwrap();
        let first = assemble_cached(&g, 6, None, dir.path()).unwrap();
        let second = assemble_cached(&g, 6, None, dir.path()).unwrap();
        assert!(std::fs::read_dir(dir.path()).unwrap().count() == fresh.table.blocks.len());
        for (a, (b, c)) in fresh.table.blocks.iter().zip(first.table.blocks.iter().zip(&second.table.blocks)) {
            assert_eq!(a.entries, b.entries);
            assert_eq!(a.entries, c.entries);
        }
        assert_eq!(fresh.lambda, second.lambda);
    }

    #[test]
    fn order_bounds() {
        assert!(assemble(&gamma_edge(5, 4).unwrap(), 4, None).is_err());
        assert!(assemble(&gamma_edge(3, 1).unwrap(), 9, None).is_err());
    }
}
