//! The three solver round trips, shared by the tests and the acceptance run.

use flagcert::objectives::{gamma_edge, gamma_semi, ColoredGraph};
use flagcert::patterns::{eval_blowup, Pattern, StepGraphon};
use flagcert::scalar::rat;
use flagcert::sdp::{assemble, numerical_kernel_hints, round_solution, tight_from_pattern, tight_from_step, RoundOptions, RoundOutcome};
use flagcert::Rational;

use super::solver::solve;

pub struct Trip {
    pub u_float: f64,
    pub outcome: RoundOutcome<Rational>,
}

pub fn edge_5_4(template: &str) -> Result<Trip, String> {
    let gamma = gamma_edge(5, 4).unwrap();
    let p = assemble(&gamma, 5, None).unwrap();
    let sol = solve(&p, template);
    let b = Pattern::parse("2:00,11").unwrap();
    let a = vec![rat(1, 2), rat(1, 2)];
    let target = eval_blowup(&gamma, &b, &a).unwrap();
    let hints = p.pattern_hints(&b, &a).unwrap();
    let mut opts = RoundOptions::new(target);
    opts.denom_bound = 1 << 30;
    opts.tight = Some(tight_from_pattern(&b, &a, p.graphs()));
    let outcome = round_solution(&p, &sol, &hints, &opts).map_err(|e| e.to_string())?;
    Ok(Trip { u_float: sol.u, outcome })
}

/// Every 1/3-regular graphon is extremal, so several of them supply hints.
pub fn alternating_path(template: &str) -> Result<Trip, String> {
    let gamma = gamma_semi(&ColoredGraph::alternating_path(3, false)).unwrap();
    let p = assemble(&gamma, 4, None).unwrap();
    let sol = solve(&p, template);
    let third = rat(1, 3);
    let two = |e: Rational| {
        let (d, o) = (&third + &e, &third - &e);
        (StepGraphon::new(2, vec![d.clone(), o.clone(), o, d]), vec![rat(1, 2), rat(1, 2)])
    };
    let h = rat(1, 2);
    let z = Rational::from_integer(0.into());
    let constructions = vec![
        (StepGraphon::constant(third.clone()), vec![Rational::from_integer(1.into())]),
        two(rat(1, 6)),
        two(rat(1, 3)),
        two(rat(-1, 6)),
        (
            StepGraphon::new(3, vec![z.clone(), h.clone(), h.clone(), h.clone(), z.clone(), h.clone(), h.clone(), h, z]),
            vec![rat(1, 3); 3],
        ),
    ];
    let mut hints = vec![Vec::new(); p.table.blocks.len()];
    let mut tight = vec![false; p.graphs().len()];
    for (w, a) in &constructions {
        if flagcert::patterns::step_lambda(&gamma, w, a) != rat(4, 27) {
            return Err("construction is not extremal".into());
        }
        for (acc, hs) in hints.iter_mut().zip(p.step_hints(w, a)) {
            acc.extend(hs);
        }
        for (t, x) in tight.iter_mut().zip(tight_from_step(w, a, p.graphs())) {
            *t |= x;
        }
    }
    let mut opts = RoundOptions::new(rat(4, 27));
    opts.tight = Some(tight);
    let outcome = round_solution(&p, &sol, &hints, &opts).map_err(|e| e.to_string())?;
    Ok(Trip { u_float: sol.u, outcome })
}

/// Quasirandom optima have kernels far larger than the construction's flag
/// vectors, so a rationalized numerical kernel is added.
pub fn alternating_cycle(template: &str) -> Result<Trip, String> {
    let gamma = gamma_semi(&ColoredGraph::alternating_cycle(6)).unwrap();
    let p = assemble(&gamma, 6, None).unwrap();
    let sol = solve(&p, template);
    let w = StepGraphon::constant(rat(1, 2));
    let a = vec![Rational::from_integer(1.into())];
    let mut hints = p.step_hints(&w, &a);
    for (h, extra) in hints.iter_mut().zip(numerical_kernel_hints(&sol, 1e-4, 8)) {
        h.extend(extra);
    }
    let mut opts = RoundOptions::new(rat(1, 64));
    opts.tight = Some(tight_from_step(&w, &a, p.graphs()));
    let outcome = round_solution(&p, &sol, &hints, &opts).map_err(|e| e.to_string())?;
    Ok(Trip { u_float: sol.u, outcome })
}
