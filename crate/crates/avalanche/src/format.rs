//! File and command-line formats: graphs, polynomials, sandpiles, parent
//! arrays and parking functions.

use std::str::FromStr;

use avalanche_core::families::RootedTree;
use avalanche_core::{Graph, MultiPoly, Sandpile};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Core(#[from] avalanche_core::Error),

    #[error("cannot parse {what}: {msg}")]
    Parse { what: &'static str, msg: String },
}

fn parse_err(what: &'static str, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { what, msg: msg.into() }
}

/// `{"vertices": n, "sink": s, "edges": [[u, v, w], ...], "labels": [...]}`.
///
/// Edges are undirected and duplicate entries add up. `labels` is optional
/// and names every vertex, sink included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    pub sink: usize,
    pub edges: Vec<(usize, usize, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        GraphFile {
            vertices: g.n_vertices(),
            sink: g.sink(),
            edges: g.edges(),
            labels: Some(g.labels().to_vec()),
        }
    }

    pub fn to_graph(&self) -> Result<Graph, FormatError> {
        let mut g = Graph::from_edges(self.vertices, self.sink, &self.edges)?;
        if let Some(labels) = &self.labels {
            g.set_labels(labels.clone())?;
        }
        Ok(g)
    }
}

pub fn parse_graph_json(s: &str) -> Result<Graph, FormatError> {
    serde_json::from_str::<GraphFile>(s)?.to_graph()
}

/// JSON number holding an arbitrary-precision integer.
pub fn big_number(n: &BigInt) -> Value {
    Value::Number(Number::from_str(&n.to_string()).expect("integers are valid JSON numbers"))
}

/// `{"k": count, ...}` with keys in increasing numeric order.
pub fn histogram_json<'a>(entries: impl IntoIterator<Item = (u64, &'a BigInt)>) -> Value {
    Value::Object(
        entries
            .into_iter()
            .map(|(k, c)| (k.to_string(), big_number(c)))
            .collect::<Map<_, _>>(),
    )
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    exp: Vec<u32>,
    coef: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyFile {
    vars: usize,
    terms: Vec<TermFile>,
}

/// `{"vars": n, "terms": [{"exp": [...], "coef": "..."}]}`, terms in
/// descending graded-lex order.
pub fn poly_to_json(p: &MultiPoly) -> Value {
    let file = PolyFile {
        vars: p.n_vars(),
        terms: p
            .canonical_terms()
            .into_iter()
            .map(|(e, c)| TermFile { exp: e.clone(), coef: c.to_string() })
            .collect(),
    };
    serde_json::to_value(file).expect("polynomial serializes")
}

pub fn poly_from_json(s: &str) -> Result<MultiPoly, FormatError> {
    let file: PolyFile = serde_json::from_str(s)?;
    let mut terms = Vec::with_capacity(file.terms.len());
    for t in file.terms {
        let c = BigInt::from_str(&t.coef).map_err(|_| parse_err("polynomial", format!("bad coefficient {:?}", t.coef)))?;
        terms.push((t.exp, c));
    }
    Ok(MultiPoly::from_terms(file.vars, terms)?)
}

/// Parses the text form `2*x1*x2 + x1^3 - 4`. Variable `xK` is the `K`-th
/// variable (1-based). The variable count is the largest index seen unless
/// `n_vars` is given.
pub fn poly_from_text(s: &str, n_vars: Option<usize>) -> Result<MultiPoly, FormatError> {
    let bad = |msg: String| parse_err("polynomial", msg);
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty input".into()));
    }
    let mut terms: Vec<(Vec<(usize, u32)>, BigInt)> = Vec::new();
    let mut max_var = 0;
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (negative, body) = match rest.as_bytes()[0] {
            b'-' => (true, &rest[1..]),
            b'+' if !terms.is_empty() => (false, &rest[1..]),
            _ if terms.is_empty() => (false, rest),
            _ => return Err(bad(format!("expected + or - before {rest:?}"))),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        rest = tail;
        let mut coef = BigInt::from(1);
        let mut vars = Vec::new();
        for factor in term.split('*') {
            if let Some(v) = factor.strip_prefix('x') {
                let (idx, exp) = match v.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad(format!("bad exponent in {factor:?}")))?),
                    None => (v, 1),
                };
                let idx: usize = idx.parse().map_err(|_| bad(format!("bad variable {factor:?}")))?;
                if idx == 0 {
                    return Err(bad("variables are numbered from x1".into()));
                }
                max_var = max_var.max(idx);
                vars.push((idx - 1, exp));
            } else {
                let c = BigInt::from_str(factor).map_err(|_| bad(format!("bad factor {factor:?}")))?;
                coef *= c;
            }
        }
        terms.push((vars, if negative { -coef } else { coef }));
    }
    let n = match n_vars {
        Some(n) if n < max_var => return Err(bad(format!("x{max_var} exceeds {n} variables"))),
        Some(n) => n,
        None => max_var,
    };
    let mut p = MultiPoly::zero(n);
    for (vars, c) in terms {
        let mut e = vec![0u32; n];
        for (i, k) in vars {
            e[i] += k;
        }
        p.add_term(e, c);
    }
    Ok(p)
}

/// JSON if the input starts with `{`, the text form otherwise.
pub fn parse_poly(s: &str) -> Result<MultiPoly, FormatError> {
    if s.trim_start().starts_with('{') {
        poly_from_json(s)
    } else {
        poly_from_text(s, None)
    }
}

/// Grain counts separated by commas or spaces. A token `d^k` stands for `k`
/// copies of `d`, so `1^3 0 1^5` is `1,1,1,0,1,1,1,1,1`.
pub fn parse_sandpile(s: &str) -> Result<Sandpile, FormatError> {
    let mut grains = Vec::new();
    for tok in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let bad = || parse_err("sandpile", format!("bad token {tok:?}"));
        match tok.split_once('^') {
            Some((d, k)) => {
                let d: u64 = d.parse().map_err(|_| bad())?;
                let k: usize = k.parse().map_err(|_| bad())?;
                grains.extend(std::iter::repeat_n(d, k));
            }
            None => grains.push(tok.parse().map_err(|_| bad())?),
        }
    }
    Ok(Sandpile::new(grains))
}

pub fn sandpile_json(c: &Sandpile) -> Value {
    Value::from(c.grains().to_vec())
}

pub fn sandpile_text(c: &Sandpile) -> String {
    c.grains().iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// A parent array, root marked by `null` (JSON) or `s` (text), e.g.
/// `[null, 0, 1]` or `s 0 1`.
pub fn parse_parents(s: &str) -> Result<RootedTree, FormatError> {
    let parents: Vec<Option<usize>> = if s.trim_start().starts_with('[') {
        serde_json::from_str(s)?
    } else {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "s" | "-" => Ok(None),
                _ => t.parse().map(Some).map_err(|_| parse_err("parent array", format!("bad entry {t:?}"))),
            })
            .collect::<Result<_, _>>()?
    };
    Ok(RootedTree::from_parents(parents)?)
}

pub fn parents_json(t: &RootedTree) -> Value {
    serde_json::to_value(t.parents()).expect("parent array serializes")
}

pub fn parents_text(t: &RootedTree) -> String {
    t.parents()
        .iter()
        .map(|p| p.map_or_else(|| "s".to_string(), |p| p.to_string()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A JSON array of 0-based values.
pub fn parse_parking(s: &str) -> Result<Vec<u64>, FormatError> {
    Ok(serde_json::from_str(s)?)
}
