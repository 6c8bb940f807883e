use std::path::{Path, PathBuf};
use std::process::Command;

use flagcert::sdp::{export_sdpa, import_solution, run_solver, FloatSolution, SdpProblem};

/// Solver command template: `FLAGCERT_SOLVER` if set, else the bundled
/// cvxpy script when python can import cvxpy.
pub fn solver_template() -> Option<String> {
    if let Ok(t) = std::env::var("FLAGCERT_SOLVER") {
        return Some(t);
    }
    let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/sdpa_solve.py");
    let ok = Command::new("python3")
        .args(["-c", "import cvxpy, clarabel"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false);
    ok.then(|| format!("python3 {} {{in}} {{out}}", script.display()))
}

pub fn solve(p: &SdpProblem, template: &str) -> FloatSolution {
    let dir = tempfile::tempdir().unwrap();
    let input: PathBuf = dir.path().join("problem.dat-s");
    let output = dir.path().join("problem.sol");
    export_sdpa(p, &input).unwrap();
    run_solver(template, &input, &output).unwrap();
    if let Ok(keep) = std::env::var("FLAGCERT_KEEP") {
        std::fs::copy(&input, format!("{keep}.dat-s")).unwrap();
        std::fs::copy(&output, format!("{keep}.sol")).unwrap();
    }
    import_solution(p, &std::fs::read_to_string(&output).unwrap()).unwrap()
}
