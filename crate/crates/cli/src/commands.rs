use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use flagcert::certificates::{
    check_stability, AnyCertificate, CertError, Certificate, ExactScalar, StabilityInputs, StabilityReport,
};
use flagcert::flags::expand_product;
use flagcert::graphs::{count_induced, enumerate_graphs, graph6, induced_density};
use flagcert::objectives::{embedding_density, lambda_eval, Objective};
use flagcert::patterns::{
    blowup_polynomial, eval_blowup, finite_blowup_lambda, has_homomorphism, maximize_on_simplex, minimality_probe,
    part_sizes, Pattern,
};
use flagcert::scalar::{format_rational, rational_to_f64};
use flagcert::sdp::{
    assemble, assemble_cached, export_sdpa, import_solution, numerical_kernel_hints, round_solution, run_solver,
    tight_from_pattern, RoundError, RoundOptions, SdpProblem,
};
use flagcert::search::{brute_max, edit_distance_to_blowup, quasirandom_check, sample_subgraph};
use flagcert::{Graph, QuadExt, Rational};
use serde_json::{json, Value};

use crate::input::{self, Exact};
use crate::{Cmd, Outcome, CACHE_ENV, SOLVER_ENV};

pub fn run(cmd: &Cmd, header: &Value) -> Result<Outcome> {
    match cmd {
        Cmd::Enumerate(a) => {
            let fam = input::family(&a.family.forbid)?;
            let gs = enumerate_graphs(a.n, fam.as_ref())?;
            let list: Vec<String> = gs.iter().map(graph6::encode).collect();
            let mut text = vec![format!("count: {}", gs.len())];
            if a.list {
                text.extend(list.iter().cloned());
            }
            let mut result = json!({ "n": a.n, "count": gs.len() });
            if a.list {
                result["graphs"] = json!(list);
            }
            Ok(Outcome::ok(text, result))
        }
        Cmd::Density(a) => {
            let f = input::graph(&a.f)?;
            let g = input::host(&a.graph)?;
            let ind = induced_density(&f, &g)?;
            let emb = embedding_density(&f, &g)?;
            Ok(Outcome::ok(
                vec![format!("induced: {}", format_rational(&ind)), format!("embedding: {}", format_rational(&emb))],
                json!({ "induced": format_rational(&ind), "embedding": format_rational(&emb) }),
            ))
        }
        Cmd::ObjectiveEval(a) => {
            let gamma = Objective::parse(&a.obj)?;
            let g = input::host(&a.graph)?;
            let (big, small) = lambda_eval(&gamma, &g)?;
            Ok(Outcome::ok(
                vec![format!("Lambda: {}", format_rational(&big)), format!("lambda: {}", format_rational(&small))],
                json!({ "Lambda": format_rational(&big), "lambda": format_rational(&small) }),
            ))
        }
        Cmd::BlowupEval(a) => {
            let gamma = Objective::parse(&a.obj)?;
            let b = input::pattern(&a.pattern)?;
            let value = match (&a.ratios, &a.sizes) {
                (Some(r), _) => match input::exact_list(r)? {
                    Exact::Rational(v) => format_rational(&eval_blowup(&gamma, &b, &v)?),
                    Exact::Quadratic(v) => eval_blowup(&gamma, &b, &v)?.to_string(),
                },
                (None, Some(s)) => format_rational(&finite_blowup_lambda(&gamma, &b, &input::sizes(s)?)?),
                (None, None) => bail!("give --ratios or --sizes"),
            };
            Ok(Outcome::ok(vec![value.clone()], json!({ "value": value })))
        }
        Cmd::BlowupOpt(a) => {
            let gamma = Objective::parse(&a.obj)?;
            let b = input::pattern(&a.pattern)?;
            let poly = blowup_polynomial(&gamma, &b).map_coeffs(rational_to_f64);
            let (value, argmax) = maximize_on_simplex(&poly, a.starts, a.seed);
            let mut text = vec![format!("value: {value}"), format!("argmax: {argmax:?}")];
            let mut result = json!({ "value": value, "argmax": argmax });
            if let Some(n) = a.n {
                let sizes = part_sizes(&argmax, n);
                let lam = finite_blowup_lambda(&gamma, &b, &sizes)?;
                text.push(format!("sizes: {sizes:?} lambda: {}", format_rational(&lam)));
                result["finite"] = json!({ "sizes": sizes, "lambda": format_rational(&lam) });
            }
            if a.probe {
                let probe = minimality_probe(&gamma, &b, a.starts, a.seed);
                for p in &probe {
                    text.push(format!("without {}: {} at {:?}", p.deleted, p.best_value, p.argmax));
                }
                result["probe"] = probe
                    .iter()
                    .map(|p| json!({ "deleted": p.deleted, "best_value": p.best_value, "argmax": p.argmax, "rigorous": p.rigorous }))
                    .collect();
            }
            Ok(Outcome::ok(text, result))
        }
        Cmd::Expand(a) => {
            let fam = input::family(&a.family.forbid)?;
            let tau = input::graph(&a.tau)?;
            let v = expand_product(&tau, &input::flag(&a.f1)?, &input::flag(&a.f2)?, a.n, fam.as_ref())?;
            let gs = enumerate_graphs(a.n, fam.as_ref())?;
            let terms: Vec<(String, String)> = gs
                .iter()
                .zip(&v)
                .filter(|(_, c)| **c != Rational::from_integer(0.into()))
                .map(|(g, c)| (graph6::encode(g), format_rational(c)))
                .collect();
            let text = terms.iter().map(|(g, c)| format!("{g} {c}")).collect();
            let result = json!({ "terms": terms.iter().map(|(g, c)| json!({ "graph6": g, "coefficient": c })).collect::<Vec<_>>() });
            Ok(Outcome::ok(text, result))
        }
        Cmd::SdpExport(a) => {
            let gamma = Objective::parse(&a.obj)?;
            let fam = input::family(&a.family.forbid)?;
            let p = problem(&gamma, a.n, fam.as_ref())?;
            export_sdpa(&p, &a.out)?;
            let side = sidecar(&a.out);
            std::fs::write(&side, serde_json::to_string_pretty(header)?).with_context(|| side.display().to_string())?;
            let dims = p.block_dims();
            Ok(Outcome::ok(
                vec![
                    format!("variables: {}", p.num_vars()),
                    format!("blocks: {dims:?} + slack {} + 1", p.lambda.len()),
                    format!("written: {}", a.out.display()),
                ],
                json!({ "variables": p.num_vars(), "block_dims": dims, "graphs": p.lambda.len(), "out": a.out }),
            ))
        }
        Cmd::Round(a) => round(a, header),
        Cmd::Verify(a) => {
            let cert = match input::certificate(&a.cert) {
                Ok(c) => c,
                Err(e) => bail!("{e}"),
            };
            let v = cert.verify()?;
            let mut text = vec![format!("verified: {}", v.verified), format!("bound: {}", v.bound)];
            if let Some(r) = v.first() {
                text.push(format!("refutation: {}", serde_json::to_string(r)?));
            }
            Ok(Outcome { status: u8::from(!v.verified), text, result: serde_json::to_value(&v)? })
        }
        Cmd::Stability(a) => {
            let b = input::pattern(&a.pattern)?;
            let tau = input::graph(&a.tau)?;
            let ratios = input::exact_list(&a.ratios)?;
            let load = |p: &Option<PathBuf>| -> Result<Option<AnyCertificate>> {
                p.as_ref().map(|p| input::certificate(p).map_err(anyhow::Error::from)).transpose()
            };
            let main = load(&a.cert)?;
            let (t, l) = (load(&a.aux_tau_free)?, load(&a.aux_loopless_free)?);
            let report = match (&main, &ratios) {
                (Some(AnyCertificate::Quadratic(c)), r) => stability(Some(c), &b, &r.quads(), &tau, &t, &l)?,
                (Some(AnyCertificate::Rational(c)), Exact::Rational(r)) => stability(Some(c), &b, r, &tau, &t, &l)?,
                (Some(AnyCertificate::Rational(_)), Exact::Quadratic(_)) => {
                    bail!("irrational ratios need a certificate over a quadratic field")
                }
                (None, Exact::Rational(r)) => stability::<Rational>(None, &b, r, &tau, &t, &l)?,
                (None, r @ Exact::Quadratic(_)) => stability::<QuadExt>(None, &b, &r.quads(), &tau, &t, &l)?,
            };
            let text = report.checks.iter().map(|c| format!("{} {:?} {}", c.id, c.status, c.detail)).collect();
            Ok(Outcome { status: u8::from(!report.no_failures()), text, result: serde_json::to_value(&report)? })
        }
        Cmd::SlackQuery(a) => {
            let contains = a.contains.iter().map(|s| input::graph(s)).collect::<Result<Vec<_>>>()?;
            let free = a.free.iter().map(|s| input::graph(s)).collect::<Result<Vec<_>>>()?;
            let hom = a.hom.as_deref().map(input::pattern).transpose()?;
            let pred = |g: &Graph| {
                contains.iter().all(|f| count_induced(f, g).is_ok_and(|c| c > 0))
                    && free.iter().all(|f| count_induced(f, g).is_ok_and(|c| c == 0))
                    && hom.as_ref().map_or(true, |b| has_homomorphism(g, b))
            };
            let (matched, min, argmin) = match input::certificate(&a.cert).map_err(|e| anyhow!("{e}"))? {
                AnyCertificate::Rational(c) => slack_query(&c, pred)?,
                AnyCertificate::Quadratic(c) => slack_query(&c, pred)?,
            };
            let shown = min.clone().unwrap_or_else(|| "inf".into());
            let mut text = vec![format!("matched: {matched}"), format!("min: {shown}")];
            text.extend(argmin.iter().cloned());
            Ok(Outcome::ok(text, json!({ "matched": matched, "min": min, "argmin": argmin })))
        }
        Cmd::Brute(a) => {
            let gamma = Objective::parse(&a.obj)?;
            let fam = input::family(&a.family.forbid)?;
            let mut rec = brute_max(&gamma, a.n, fam.as_ref())?;
            if let Some(r) = &a.reference {
                rec.compare_with("reference", input::rational(r)?);
            }
            let mut text = vec![format!("max: {}", format_rational(&rec.max)), format!("classes: {}", rec.classes)];
            text.push(format!("argmax: {}", rec.argmax.join(" ")));
            if let Some(r) = &rec.reference {
                text.push(format!("reference {} attained: {}", format_rational(&r.value), r.attained));
            }
            Ok(Outcome::ok(text, serde_json::to_value(&rec)?))
        }
        Cmd::Sample(a) => {
            let g = input::host(&a.graph)?;
            let p = input::rational(&a.p)?;
            let s = sample_subgraph(&g, &p, a.seed)?;
            let n = s.order();
            let pairs = n * n.saturating_sub(1) / 2;
            let mut text = vec![format!("vertices: {n}"), format!("edges: {}", s.edge_count())];
            let mut result = json!({ "vertices": n, "edges": s.edge_count(), "pairs": pairs });
            if let Some(obj) = &a.obj {
                let (big, small) = lambda_eval(&Objective::parse(obj)?, &s)?;
                text.push(format!("Lambda: {} lambda: {}", format_rational(&big), format_rational(&small)));
                result["Lambda"] = json!(format_rational(&big));
                result["lambda"] = json!(format_rational(&small));
            }
            if let Some(parts) = &a.parts {
                let sizes = input::sizes(parts)?;
                if sizes.len() != 2 {
                    bail!("--parts takes two sizes");
                }
                let partition: Vec<usize> = (0..sizes[0]).map(|_| 0).chain((0..sizes[1]).map(|_| 1)).collect();
                let rep = quasirandom_check(&s, &partition, rational_to_f64(&p), a.tol)?;
                text.push(format!(
                    "quasirandom: {} (edge density {}, C4 density {})",
                    rep.within_tolerance, rep.edge_density, rep.c4_density
                ));
                result["quasirandom"] = serde_json::to_value(&rep)?;
            }
            if a.print {
                let g6 = graph6::encode_adj(&s);
                text.push(g6.clone());
                result["graph6"] = json!(g6);
            }
            Ok(Outcome::ok(text, result))
        }
        Cmd::Editdist(a) => {
            let g = input::host(&a.graph)?;
            let b = input::pattern(&a.pattern)?;
            let r = edit_distance_to_blowup(&g, &b, !a.heuristic, a.seed);
            Ok(Outcome::ok(
                vec![format!("distance: {}", r.value), format!("method: {:?}", r.method), format!("partition: {:?}", r.partition)],
                serde_json::to_value(&r)?,
            ))
        }
        Cmd::Diagnose(a) => {
            let g = input::host(&a.graph)?;
            let tau = input::graph(&a.tau)?;
            let eps = input::rational(&a.eps)?;
            let cert = input::certificate(&a.cert).map_err(|e| anyhow!("{e}"))?;
            let found = match &cert {
                AnyCertificate::Rational(c) => diagnose(c, &g, &tau, &eps)?,
                AnyCertificate::Quadratic(c) => diagnose(c, &g, &tau, &QuadExt::rational(eps))?,
            };
            let text = found.iter().map(|d| format!("{:?} {}", d.roots, d.norm)).collect();
            Ok(Outcome::ok(text, json!({ "embeddings": found })))
        }
    }
}

fn problem(gamma: &Objective, n: usize, fam: Option<&flagcert::HereditaryFamily>) -> Result<SdpProblem> {
    Ok(match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => assemble_cached(gamma, n, fam, Path::new(&dir))?,
        _ => assemble(gamma, n, fam)?,
    })
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".job.json");
    PathBuf::from(s)
}

fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn round(a: &crate::RoundArgs, header: &Value) -> Result<Outcome> {
    let gamma = Objective::parse(&a.obj)?;
    let fam = input::family(&a.family.forbid)?;
    let p = problem(&gamma, a.n, fam.as_ref())?;
    let text = match &a.solution {
        Some(path) => std::fs::read_to_string(path).with_context(|| path.display().to_string())?,
        None => {
            let template = a
                .solver
                .clone()
                .or_else(|| std::env::var(SOLVER_ENV).ok())
                .ok_or_else(|| anyhow!("no --solution, --solver or ${SOLVER_ENV}"))?;
            let (dat, sol) = (with_suffix(&a.out, ".dat-s"), with_suffix(&a.out, ".sol"));
            export_sdpa(&p, &dat)?;
            run_solver(&template, &dat, &sol)?;
            std::fs::read_to_string(&sol).with_context(|| sol.display().to_string())?
        }
    };
    let sol = import_solution(&p, &text)?;
    let b = a.pattern.as_deref().map(input::pattern).transpose()?;
    let ratios = a.ratios.as_deref().map(input::exact_list).transpose()?;
    let target = a.target.as_deref().map(input::exact).transpose()?;
    let quadratic = matches!(ratios, Some(Exact::Quadratic(_))) || matches!(target, Some(Exact::Quadratic(_)));
    let res = if quadratic {
        let ratios = ratios.map(|r| r.quads());
        let target = target.map(|t| t.quads().remove(0));
        round_with(&p, &sol, a, b.as_ref(), ratios, target).map(|o| o.map(|(c, v)| (c.to_json(), v)))
    } else {
        let unwrap = |e: Option<Exact>| match e {
            Some(Exact::Rational(v)) => Some(v),
            _ => None,
        };
        let target = unwrap(target).map(|mut v| v.remove(0));
        round_with(&p, &sol, a, b.as_ref(), unwrap(ratios), target).map(|o| o.map(|(c, v)| (c.to_json(), v)))
    }?;
    match res {
        Ok((mut cert, verdict)) => {
            cert.meta = header.clone();
            cert.meta["solver_value"] = json!(sol.u);
            std::fs::write(&a.out, serde_json::to_string_pretty(&cert)?).with_context(|| a.out.display().to_string())?;
            let mut text = vec![format!("verified: {}", verdict.verified), format!("bound: {}", verdict.bound)];
            text.push(format!("written: {}", a.out.display()));
            Ok(Outcome { status: u8::from(!verdict.verified), text, result: serde_json::to_value(&verdict)? })
        }
        Err(e) => Ok(Outcome {
            status: 1,
            text: vec![format!("infeasible: {e}")],
            result: json!({ "verified": false, "error": e.to_string(), "solver_value": sol.u }),
        }),
    }
}

type Rounded<T> = Result<(Certificate<T>, flagcert::certificates::Verdict), RoundError>;

/// Outer error: malformed input. Inner error: the rounding did not go through.
fn round_with<T: ExactScalar>(
    p: &SdpProblem,
    sol: &flagcert::sdp::FloatSolution,
    a: &crate::RoundArgs,
    b: Option<&Pattern>,
    ratios: Option<Vec<T>>,
    target: Option<T>,
) -> Result<Rounded<T>> {
    let target = match (target, b, &ratios) {
        (Some(t), _, _) => t,
        (None, Some(b), Some(r)) => eval_blowup(&p.objective, b, r)?,
        _ => bail!("give --target or --pattern with --ratios"),
    };
    let mut hints: Vec<Vec<Vec<T>>> = match (b, &ratios) {
        (Some(b), Some(r)) => p.pattern_hints(b, r)?,
        _ => vec![Vec::new(); p.table.blocks.len()],
    };
    if let Some(tol) = a.kernel_tol {
        for (h, extra) in hints.iter_mut().zip(numerical_kernel_hints::<T>(sol, tol, a.kernel_den)) {
            h.extend(extra);
        }
    }
    let mut opts = RoundOptions::new(target);
    opts.denom_bound = a.denom_bound;
    opts.hint_guard = a.tol;
    if let (Some(b), Some(r)) = (b, &ratios) {
        opts.tight = Some(tight_from_pattern(b, r, p.graphs()));
    }
    Ok(match round_solution(p, sol, &hints, &opts) {
        Ok(o) => Ok((o.certificate, o.verdict)),
        Err(e @ (RoundError::Shape(_) | RoundError::Sdp(_) | RoundError::Cert(_))) => return Err(e.into()),
        Err(e) => Err(e),
    })
}

fn stability<T: ExactScalar>(
    cert: Option<&Certificate<T>>,
    b: &Pattern,
    a: &[T],
    tau: &Graph,
    aux_tau_free: &Option<AnyCertificate>,
    aux_loopless_free: &Option<AnyCertificate>,
) -> Result<StabilityReport, CertError> {
    check_stability(&StabilityInputs {
        cert,
        pattern: b,
        a,
        tau,
        aux_tau_free: aux_tau_free.as_ref(),
        aux_loopless_free: aux_loopless_free.as_ref(),
    })
}

fn slack_query<T: ExactScalar>(
    c: &Certificate<T>,
    pred: impl Fn(&Graph) -> bool,
) -> Result<(usize, Option<String>, Vec<String>)> {
    let q = c.slack_query(pred)?;
    Ok((q.matched, q.min.map(|m| m.to_string()), q.argmin))
}

fn diagnose<T: ExactScalar>(
    c: &Certificate<T>,
    g: &flagcert::DenseGraph,
    tau: &Graph,
    eps: &T,
) -> Result<Vec<flagcert::certificates::Diagnosis>> {
    let t = c.block_for_type(tau).ok_or_else(|| anyhow!("certificate has no block for type {}", graph6::encode(tau)))?;
    Ok(c.diagnose(g, t, eps)?)
}
