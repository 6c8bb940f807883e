//! The graph6 text format (orders up to 62).

use super::{Adjacency, DenseGraph, Graph, GraphError, MAX_ORDER};

/// Encodes any adjacency structure with at most 62 vertices.
pub fn encode_adj<A: Adjacency + ?Sized>(g: &A) -> String {
    let n = g.order();
    assert!(n <= 62, "graph6 encoding here supports n <= 62");
    let mut out = vec![(n as u8) + 63];
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            k += 1;
            if k == 6 {
                out.push(acc + 63);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push((acc << (6 - k)) + 63);
    }
    String::from_utf8(out).unwrap()
}

pub fn encode(g: &Graph) -> String {
    encode_adj(g)
}

/// Decodes to the order and the list of edges.
pub fn decode_edges(s: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let s = s.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes = s.as_bytes();
    let bad = |m: &str| GraphError::Graph6(format!("{m}: {s:?}"));
    let first = *bytes.first().ok_or_else(|| bad("empty string"))?;
    if !(63..=125).contains(&first) {
        return Err(bad("order byte out of range"));
    }
    let n = (first - 63) as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    let need = nbits.div_ceil(6);
    if bytes.len() != 1 + need {
        return Err(bad("wrong length"));
    }
    let mut bits = Vec::with_capacity(need * 6);
    for &b in &bytes[1..] {
        if !(63..=126).contains(&b) {
            return Err(bad("byte out of range"));
        }
        let v = b - 63;
        for t in (0..6).rev() {
            bits.push(v >> t & 1 == 1);
        }
    }
    if bits[nbits..].iter().any(|&b| b) {
        return Err(bad("nonzero padding"));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Ok((n, edges))
}

pub fn decode(s: &str) -> Result<Graph, GraphError> {
    let (n, edges) = decode_edges(s)?;
    if n > MAX_ORDER {
        return Err(GraphError::OrderTooLarge(n, MAX_ORDER));
    }
    Graph::try_from_edges(n, &edges)
}

pub fn decode_dense(s: &str) -> Result<DenseGraph, GraphError> {
    let (n, edges) = decode_edges(s)?;
    let mut g = DenseGraph::empty(n);
    for (u, v) in edges {
        g.add_edge(u, v);
    }
    Ok(g)
}

/// Newline-separated graph6 lines; blank lines are skipped.
pub fn decode_list(text: &str) -> Result<Vec<Graph>, GraphError> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).map(decode).collect()
}

pub fn encode_list(gs: &[Graph]) -> String {
    let mut s = String::new();
    for g in gs {
        s.push_str(&encode(g));
        s.push('\n');
    }
    s
}

/// Serde adapter storing a graph list as graph6 strings.
pub mod list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::super::Graph;

    pub fn serialize<S: Serializer>(gs: &[Graph], s: S) -> Result<S::Ok, S::Error> {
        gs.iter().map(super::encode).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Graph>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| super::decode(s).map_err(serde::de::Error::custom)).collect()
    }
}
