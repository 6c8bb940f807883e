//! Parsers for command-line values.

use anyhow::{anyhow, bail, Context, Result};
use flagcert::certificates::{AnyCertificate, CertError};
use flagcert::graphs::graph6;
use flagcert::patterns::{blowup_build, Pattern};
use flagcert::scalar::parse_rational;
use flagcert::search::{complete_bipartite_dense, complete_dense};
use flagcert::{DenseGraph, Graph, HereditaryFamily, QuadExt, Rational};

pub fn rational(s: &str) -> Result<Rational> {
    parse_rational(s.trim()).ok_or_else(|| anyhow!("not a rational number: {s:?}"))
}

/// Exact values that are either all rational or involve one square root.
pub enum Exact {
    Rational(Vec<Rational>),
    Quadratic(Vec<QuadExt>),
}

pub fn exact_list(s: &str) -> Result<Exact> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if s.contains("sqrt") {
        let v = parts
            .iter()
            .map(|p| QuadExt::parse(p).ok_or_else(|| anyhow!("not a quadratic number: {p:?}")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(d) = v.iter().find_map(|x| (!x.is_rational()).then(|| x.d())) {
            if v.iter().any(|x| !x.is_rational() && x.d() != d) {
                bail!("values lie in different quadratic fields");
            }
        }
        Ok(Exact::Quadratic(v))
    } else {
        Ok(Exact::Rational(parts.iter().map(|p| rational(p)).collect::<Result<_>>()?))
    }
}

pub fn exact(s: &str) -> Result<Exact> {
    if s.contains(',') {
        bail!("expected a single value, got {s:?}");
    }
    exact_list(s)
}

impl Exact {
    pub fn quads(&self) -> Vec<QuadExt> {
        match self {
            Exact::Rational(v) => v.iter().cloned().map(QuadExt::rational).collect(),
            Exact::Quadratic(v) => v.clone(),
        }
    }
}

pub fn graph(s: &str) -> Result<Graph> {
    graph6::decode(s.trim()).with_context(|| format!("bad graph6 string {s:?}"))
}

pub fn family(list: &[String]) -> Result<Option<HereditaryFamily>> {
    if list.is_empty() {
        return Ok(None);
    }
    Ok(Some(HereditaryFamily::new(list.iter().map(|s| graph(s)).collect::<Result<_>>()?)))
}

pub fn pattern(s: &str) -> Result<Pattern> {
    Pattern::parse(s).with_context(|| format!("bad pattern {s:?}"))
}

fn usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().with_context(|| format!("not a count: {t:?}")))
        .collect()
}

pub fn sizes(s: &str) -> Result<Vec<usize>> {
    usize_list(s)
}

/// A flag written `graph6:r0,r1,...` (roots are vertex indices).
pub fn flag(s: &str) -> Result<flagcert::flags::Flag> {
    let (g, roots) = s.split_once(':').unwrap_or((s, ""));
    let g = graph(g)?;
    let roots = usize_list(roots)?;
    let json = flagcert::flags::FlagJson { graph6: graph6::encode(&g), roots };
    json.to_flag().with_context(|| format!("bad flag {s:?}"))
}

/// A host graph: `graph6`, `file:<path>` (first graph6 line), `K:<n>`,
/// `K:<a>,<b>` (complete bipartite) or `blowup:<pattern>/<sizes>`.
pub fn host(s: &str) -> Result<DenseGraph> {
    if let Some(path) = s.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let line = text.lines().map(str::trim).find(|l| !l.is_empty()).ok_or_else(|| anyhow!("{path} is empty"))?;
        return graph6::decode_dense(line).with_context(|| format!("bad graph6 in {path}"));
    }
    if let Some(rest) = s.strip_prefix("K:") {
        let v = usize_list(rest)?;
        return match v[..] {
            [n] => Ok(complete_dense(n)),
            [a, b] => Ok(complete_bipartite_dense(a, b)),
            _ => bail!("K: takes one or two sizes"),
        };
    }
    if let Some(rest) = s.strip_prefix("blowup:") {
        let (p, sz) = rest.rsplit_once('/').ok_or_else(|| anyhow!("expected blowup:<pattern>/<sizes>"))?;
        return Ok(blowup_build(&pattern(p)?, &sizes(sz)?)?);
    }
    graph6::decode_dense(s.trim()).with_context(|| format!("bad graph6 string {s:?}"))
}

/// Reads a certificate; errors here are "malformed".
pub fn certificate(path: &std::path::Path) -> Result<AnyCertificate, CertError> {
    let text = std::fs::read_to_string(path).map_err(|e| CertError::Malformed(format!("{}: {e}", path.display())))?;
    AnyCertificate::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn host_forms() {
        assert_eq!(host("K:5").unwrap().edge_count(), 10);
        assert_eq!(host("K:2,3").unwrap().edge_count(), 6);
        assert_eq!(host("blowup:2:00,11/2,3").unwrap().edge_count(), 4);
        assert_eq!(host("C~").unwrap().edge_count(), 6);
        assert!(host("blowup:2:01").is_err());
    }

    #[test]
    fn exact_values() {
        assert!(matches!(exact_list("1/3, 2/3").unwrap(), Exact::Rational(v) if v.len() == 2));
        assert!(matches!(exact("1/2-1/6*sqrt(3)").unwrap(), Exact::Quadratic(_)));
        assert!(exact_list("sqrt(2),sqrt(3)").is_err());
        assert!(exact("1/2,1/2").is_err());
    }

    #[test]
    fn flags_with_roots() {
        let f = flag("Bw:0").unwrap();
        assert_eq!((f.q(), f.order()), (1, 3));
        assert!(flag("Bw:0,0").is_err());
    }
}
