//! Finite conditions of the perfect-stability criterion for a pattern `B`,
//! a maximizing ratio vector `a` and a designated type `τ`.

use std::cmp::Ordering;

use serde::Serialize;

use super::{AnyCertificate, CertError, Certificate, ExactScalar};
use crate::exactmath::{AlgebraicReal, QuadExt};
use crate::graphs::{graph6, Graph};
use crate::patterns::{eval_blowup, has_homomorphism, homomorphism_orbits, Pattern};
use crate::scalar::OrderedField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotChecked,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityCheck {
    pub id: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub checks: Vec<StabilityCheck>,
}

impl StabilityReport {
    pub fn get(&self, id: &str) -> Option<&StabilityCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// No check failed (unchecked items are allowed).
    pub fn no_failures(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

pub struct StabilityInputs<'a, T> {
    pub cert: Option<&'a Certificate<T>>,
    pub pattern: &'a Pattern,
    pub a: &'a [T],
    pub tau: &'a Graph,
    /// Certificate over the `τ`-free family.
    pub aux_tau_free: Option<&'a AnyCertificate>,
    /// Certificate over the family forbidding `B` with loops dropped.
    pub aux_loopless_free: Option<&'a AnyCertificate>,
}

fn check(id: &'static str, ok: bool, detail: impl Into<String>) -> StabilityCheck {
    StabilityCheck { id, status: if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail: detail.into() }
}

fn not_checked(id: &'static str, detail: impl Into<String>) -> StabilityCheck {
    StabilityCheck { id, status: CheckStatus::NotChecked, detail: detail.into() }
}

/// Exact comparison of quadratic numbers possibly in different fields.
pub fn cmp_quad(a: &QuadExt, b: &QuadExt) -> Ordering {
    let same = a.is_rational() || b.is_rational() || a.d() == b.d();
    if same {
        (a.clone() - b.clone()).sign()
    } else {
        AlgebraicReal::from_quad(a).cmp_quad(b)
    }
}

/// Conditions checked (by id):
/// - `cert`: the main certificate verifies;
/// - `1`: `λ_γ(B(a))` equals the certificate bound exactly;
/// - `2a`: an auxiliary `τ`-free certificate verifies a bound strictly below;
/// - `2b`: homomorphisms `τ → B` form a single `aut(B)`-orbit;
/// - `2c`: the traces `Γ_B(x) ∩ f(V(τ))` are pairwise distinct;
/// - `3`: every basis graph with zero slack maps homomorphically to `B`;
/// - `i`: the block of `τ` has corank exactly 1;
/// - `ii`: an auxiliary certificate forbidding loopless `B` verifies a bound
///   strictly below.
pub fn check_stability<T: ExactScalar>(inp: &StabilityInputs<'_, T>) -> Result<StabilityReport, CertError> {
    let mut checks = Vec::new();
    let b = inp.pattern;
    let u = inp.cert.map(|c| c.bound.to_quad());

    match inp.cert {
        Some(c) => {
            let v = c.verify()?;
            checks.push(check("cert", v.verified, format!("{} refutation(s)", v.refutations.len())));
            match eval_blowup(&c.objective, b, inp.a) {
                Ok(val) => {
                    let ok = val.cmp_exact(&c.bound) == Ordering::Equal;
                    checks.push(check("1", ok, format!("blowup value {val}, bound {}", c.bound)));
                }
                Err(e) => checks.push(check("1", false, e.to_string())),
            }
        }
        None => {
            checks.push(not_checked("cert", "no certificate given"));
            checks.push(not_checked("1", "no certificate given"));
        }
    }

    let aux_check = |id: &'static str, aux: Option<&AnyCertificate>, forbidden: &Graph| -> Result<StabilityCheck, CertError> {
        let Some(aux) = aux else {
            return Ok(not_checked(id, "auxiliary certificate not supplied"));
        };
        let Some(u) = &u else {
            return Ok(not_checked(id, "no main certificate to compare with"));
        };
        let forbids = aux.family().is_some_and(|f| !f.contains(forbidden));
        if !forbids {
            return Ok(check(id, false, format!("family does not exclude {}", graph6::encode(forbidden))));
        }
        if let Some(c) = inp.cert {
            if aux.objective() != &c.objective {
                return Ok(check(id, false, "objective differs from the main certificate"));
            }
        }
        let v = aux.verify()?;
        if !v.verified {
            return Ok(check(id, false, "auxiliary certificate does not verify"));
        }
        let ord = cmp_quad(&aux.bound_quad(), u);
        Ok(check(id, ord == Ordering::Less, format!("auxiliary bound {} vs {}", aux.bound_string(), u)))
    };
    checks.push(aux_check("2a", inp.aux_tau_free, inp.tau)?);

    let orbits = homomorphism_orbits(inp.tau, b);
    checks.push(check("2b", orbits.len() == 1, format!("{} orbit(s): {:?}", orbits.len(), orbits)));

    match orbits.first() {
        Some(f) => {
            let image: u64 = f.iter().fold(0, |m, &x| m | 1 << x);
            let traces: Vec<u64> = (0..b.order()).map(|x| b.neighborhood(x) & image).collect();
            let mut sorted = traces.clone();
            sorted.sort_unstable();
            sorted.dedup();
            checks.push(check("2c", sorted.len() == traces.len(), format!("traces {traces:?} for hom {f:?}")));
        }
        None => checks.push(check("2c", false, "no homomorphism from τ to B")),
    }

    match inp.cert {
        Some(c) => {
            let graphs = c.basis_graphs()?;
            let bad: Vec<String> = graphs
                .iter()
                .zip(&c.slacks)
                .filter(|(g, s)| s.is_zero() && !has_homomorphism(g, b))
                .map(|(g, _)| graph6::encode(g))
                .collect();
            let zero = c.slacks.iter().filter(|s| s.is_zero()).count();
            checks.push(check("3", bad.is_empty(), format!("{zero} zero slacks; without hom to B: {bad:?}")));
            match c.block_for_type(inp.tau) {
                Some(t) => {
                    let cr = c.blocks[t].matrix.corank();
                    checks.push(check("i", cr == 1, format!("corank {cr} (block {t})")));
                }
                None => checks.push(check("i", false, "certificate has no block for τ")),
            }
        }
        None => {
            checks.push(not_checked("3", "no certificate given"));
            checks.push(not_checked("i", "no certificate given"));
        }
    }

    let loopless = if b.order() <= crate::graphs::MAX_ORDER { Some(b.without_loops()) } else { None };
    match loopless {
        Some(g) => checks.push(aux_check("ii", inp.aux_loopless_free, &g)?),
        None => checks.push(not_checked("ii", "pattern too large")),
    }
    Ok(StabilityReport { checks })
}
