//! SDPA sparse (`.dat-s`) emission and solver solution parsing.
//!
//! Emission rules: blocks and variables are 1-indexed; blocks are, in order,
//! one PSD block per type, the slack block as a diagonal block written with
//! negative size, and a `1×1` block `u − min_F λ_γ(F) ≥ 0`. Only entries with
//! `i ≤ j` are written. The file encodes `Σ_k x_k F_k − F_0 ⪰ 0` with
//! objective `min c·x`, where `x_1 = u` and the remaining variables are the
//! upper triangles of the `X^τ` in row-major order.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use num_traits::{ToPrimitive, Zero};

use super::{SdpError, SdpProblem};
use crate::exactmath::Matrix;
use crate::scalar::{rational_to_f64, Rational};

/// One nonzero `(F_mat)_{i,j}` of block `block` (all 1-based; `mat = 0` is `F_0`).
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaEntry {
    pub mat: usize,
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Parsed contents of a `.dat-s` file.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaData {
    pub num_vars: usize,
    pub block_struct: Vec<i64>,
    pub c: Vec<f64>,
    pub entries: Vec<SdpaEntry>,
}

/// Floating solution read back from a solver.
#[derive(Clone, Debug)]
pub struct FloatSolution {
    pub u: f64,
    pub blocks: Vec<Matrix<f64>>,
    pub meta: serde_json::Value,
}

fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Exact rational entries of the file: `(mat, block, i, j, value)`.
pub(crate) fn exact_entries(p: &SdpProblem) -> Vec<(usize, usize, usize, usize, Rational)> {
    let nt = p.table.blocks.len();
    let lp = nt + 1;
    let mut out = Vec::new();
    for (t, blk) in p.table.blocks.iter().enumerate() {
        let d = blk.dim();
        for i in 0..d {
            for j in i..d {
                out.push((p.var_index(t, i, j) + 1, t + 1, i + 1, j + 1, Rational::from_integer(1.into())));
            }
        }
    }
    for (f, lam) in p.lambda.iter().enumerate() {
        let row = f + 1;
        if !lam.is_zero() {
            out.push((0, lp, row, row, lam.clone()));
        }
        out.push((1, lp, row, row, Rational::from_integer(1.into())));
        for (t, blk) in p.table.blocks.iter().enumerate() {
            let norm = Rational::from_integer(blk.normalizer.clone());
            for &(i, j, c) in &blk.entries[f] {
                let mult = if i == j { c } else { 2 * c };
                let coef = Rational::from_integer(mult.into()) / &norm;
                out.push((p.var_index(t, i as usize, j as usize) + 1, lp, row, row, -coef));
            }
        }
    }
    let min = p.lambda.iter().min().cloned().unwrap_or_else(Rational::zero);
    if !min.is_zero() {
        out.push((0, nt + 2, 1, 1, min));
    }
    out.push((1, nt + 2, 1, 1, Rational::from_integer(1.into())));
    out
}

/// Writes the problem in SDPA sparse format.
pub fn export_sdpa(p: &SdpProblem, path: &Path) -> Result<(), SdpError> {
    let mut s = String::new();
    let _ = writeln!(s, "\"flag-algebra bound for {} at N = {}", p.objective.describe(), p.n);
    let m = p.num_vars();
    let _ = writeln!(s, "{m}");
    let nt = p.table.blocks.len();
    let _ = writeln!(s, "{}", nt + 2);
    let mut bs: Vec<String> = p.block_dims().iter().map(|d| d.to_string()).collect();
    bs.push(format!("-{}", p.lambda.len()));
    bs.push("1".into());
    let _ = writeln!(s, "{}", bs.join(" "));
    let mut c = vec!["0"; m];
    c[0] = "1";
    let _ = writeln!(s, "{}", c.join(" "));
    for (mat, block, i, j, v) in exact_entries(p) {
        let _ = writeln!(s, "{mat} {block} {i} {j} {}", fmt_f64(rational_to_f64(&v)));
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')')).filter(|t| !t.is_empty())
}

fn parse_f64(t: &str) -> Result<f64, SdpError> {
    t.parse::<f64>().map_err(|_| SdpError::Parse(format!("bad number {t:?}")))
}

/// Reads a `.dat-s` file.
pub fn parse_sdpa(text: &str) -> Result<SdpaData, SdpError> {
    let mut lines =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let mut next = |what: &str| lines.next().ok_or_else(|| SdpError::Parse(format!("missing {what}")));
    let num_vars: usize = tokens(next("variable count")?)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| SdpError::Parse("bad variable count".into()))?;
    let nb: usize = tokens(next("block count")?)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| SdpError::Parse("bad block count".into()))?;
    let block_struct: Vec<i64> = tokens(next("block structure")?)
        .take(nb)
        .map(|t| t.parse::<i64>().map_err(|_| SdpError::Parse(format!("bad block size {t:?}"))))
        .collect::<Result<_, _>>()?;
    if block_struct.len() != nb {
        return Err(SdpError::Parse("block structure too short".into()));
    }
    let c: Vec<f64> = tokens(next("objective")?).take(num_vars).map(parse_f64).collect::<Result<_, _>>()?;
    if c.len() != num_vars {
        return Err(SdpError::Parse("objective vector too short".into()));
    }
    let mut entries = Vec::new();
    for l in lines {
        let t: Vec<&str> = tokens(l).collect();
        if t.len() < 5 {
            return Err(SdpError::Parse(format!("bad entry line {l:?}")));
        }
        let int = |k: usize| t[k].parse::<usize>().map_err(|_| SdpError::Parse(format!("bad index in {l:?}")));
        let e = SdpaEntry { mat: int(0)?, block: int(1)?, i: int(2)?, j: int(3)?, value: parse_f64(t[4])? };
        if e.mat > num_vars || e.block == 0 || e.block > nb {
            return Err(SdpError::Parse(format!("entry out of range: {l:?}")));
        }
        entries.push(e);
    }
    Ok(SdpaData { num_vars, block_struct, c, entries })
}

/// Largest relative deviation between the exact problem data and a parsed
/// file (entries missing from either side count as deviation).
pub fn max_relative_deviation(p: &SdpProblem, d: &SdpaData) -> f64 {
    use std::collections::HashMap;
    let mut got: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    for e in &d.entries {
        *got.entry((e.mat, e.block, e.i, e.j)).or_default() += e.value;
    }
    let mut worst = 0.0f64;
    for (mat, b, i, j, v) in exact_entries(p) {
        let want = v.to_f64().unwrap_or(f64::NAN);
        let have = got.remove(&(mat, b, i, j)).unwrap_or(0.0);
        let dev = (have - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(dev);
    }
    if got.values().any(|v| *v != 0.0) {
        return f64::INFINITY;
    }
    worst
}

/// Reads a solver solution. Two layouts are accepted: CSDP-style (first line
/// the vector `x`, then lines `2 block i j value` for the matrix variable)
/// and SDPA-style output (`xVec = {…}`). Only `x` is used; the block
/// matrices are rebuilt from it.
pub fn import_solution(p: &SdpProblem, text: &str) -> Result<FloatSolution, SdpError> {
    let m = p.num_vars();
    let x: Vec<f64> = if let Some(pos) = text.find("xVec") {
        let rest = &text[pos + 4..];
        let open = rest.find('{').ok_or_else(|| SdpError::Parse("xVec without '{'".into()))?;
        let close = rest[open..].find('}').ok_or_else(|| SdpError::Parse("xVec without '}'".into()))? + open;
        tokens(&rest[open + 1..close]).map(parse_f64).collect::<Result<_, _>>()?
    } else {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'))
            .ok_or_else(|| SdpError::Parse("empty solution file".into()))?;
        tokens(first).map(parse_f64).collect::<Result<_, _>>()?
    };
    if x.len() != m {
        return Err(SdpError::Dimension(format!("solution has {} variables, problem has {m}", x.len())));
    }
    let mut blocks = Vec::new();
    for (t, d) in p.block_dims().into_iter().enumerate() {
        let mut mat = Matrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = x[p.var_index(t, i, j)];
                mat[(i, j)] = v;
                mat[(j, i)] = v;
            }
        }
        blocks.push(mat);
    }
    let layout = if text.contains("xVec") { "sdpa" } else { "csdp" };
    Ok(FloatSolution { u: x[0], blocks, meta: serde_json::json!({ "layout": layout }) })
}

/// Runs an external solver. The template is a shell command in which `{in}`
/// and `{out}` are replaced by the file paths.
pub fn run_solver(template: &str, input: &Path, output: &Path) -> Result<(), SdpError> {
    let cmd = template.replace("{in}", &input.display().to_string()).replace("{out}", &output.display().to_string());
    let st = Command::new("sh").arg("-c").arg(&cmd).output()?;
    if !output.exists() {
        let err = String::from_utf8_lossy(&st.stderr);
        return Err(SdpError::Solver(format!("`{cmd}` produced no output file ({}): {}", st.status, err.trim())));
    }
    Ok(())
}
