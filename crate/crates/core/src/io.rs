//! Text formats for graphs and trees.
//!
//! A graph file is UTF-8 text. Blank lines and lines starting with `#` are
//! ignored. The first remaining line is `graph <n> <m>`, followed in any
//! order by exactly `m` lines `edge <u> <v> [<w>]`, optional `req <v> <r>`
//! lines and at most one `sources <s1> <s2> <p> [<q>]` line. Ids are 0-based;
//! omitted weights, requirements and `q` default to 0, 0 and 1.
//!
//! A tree file holds `edge <u> <v>` lines; `tree` and `cost` lines are
//! skipped so solver output can be fed back in.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, Lambda, LambdaError, TwoSourceSpec, VertexId};
use crate::tree::SpanningTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected `graph <n> <m>` before any other line")]
    MissingHeader,
    #[error("second `graph` line")]
    DuplicateHeader,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{directive}` takes {expected} arguments")]
    Arity {
        directive: &'static str,
        expected: &'static str,
    },
    #[error("`{0}` is not a nonnegative integer")]
    Malformed(String),
    #[error("negative number `{0}`")]
    NegativeNumber(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: u64, n: usize },
    #[error("header declares {declared} edges, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("second requirement for vertex {0}")]
    DuplicateRequirement(VertexId),
    #[error("second `sources` line")]
    DuplicateSources,
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}-{1} is not an edge of the graph")]
    NotAHostEdge(VertexId, VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    pub sources: Option<TwoSourceSpec>,
}

fn number(tok: &str) -> Result<u64, ParseErrorKind> {
    if let Some(rest) = tok.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseErrorKind::NegativeNumber(tok.to_string()));
        }
    }
    tok.parse().map_err(|_| ParseErrorKind::Malformed(tok.to_string()))
}

fn vertex(tok: &str, n: usize) -> Result<VertexId, ParseErrorKind> {
    let v = number(tok)?;
    usize::try_from(v)
        .ok()
        .filter(|&v| v < n)
        .ok_or(ParseErrorKind::OutOfRange { vertex: v, n })
}

fn arity(
    args: &[&str],
    range: std::ops::RangeInclusive<usize>,
    directive: &'static str,
    expected: &'static str,
) -> Result<(), ParseErrorKind> {
    if range.contains(&args.len()) {
        Ok(())
    } else {
        Err(ParseErrorKind::Arity { directive, expected })
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed.split_whitespace().collect()))
        }
    })
}

pub fn parse_graph(text: &str) -> Result<GraphFile, ParseError> {
    let mut lines = content_lines(text);
    let at = |line| move |kind| ParseError { line, kind };

    let (header_line, header) = lines.next().ok_or(ParseError {
        line: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    if header[0] != "graph" {
        return Err(at(header_line)(ParseErrorKind::MissingHeader));
    }
    let (n, m) = (|| {
        arity(&header[1..], 2..=2, "graph", "2")?;
        let n = usize::try_from(number(header[1])?).map_err(|_| ParseErrorKind::Malformed(header[1].into()))?;
        let m = usize::try_from(number(header[2])?).map_err(|_| ParseErrorKind::Malformed(header[2].into()))?;
        if n == 0 {
            return Err(ParseErrorKind::Graph(GraphError::NoVertices));
        }
        Ok((n, m))
    })()
    .map_err(at(header_line))?;

    let mut edges: Vec<(VertexId, VertexId, u64)> = Vec::with_capacity(m.min(1 << 20));
    let mut seen_edges = HashSet::new();
    let mut reqs = vec![0u64; n];
    let mut has_req = vec![false; n];
    let mut sources: Option<(VertexId, VertexId, u64, u64)> = None;
    let mut last_line = header_line;

    for (line, toks) in lines {
        last_line = line;
        let args = &toks[1..];
        (|| -> Result<(), ParseErrorKind> {
            match toks[0] {
                "graph" => Err(ParseErrorKind::DuplicateHeader),
                "edge" => {
                    arity(args, 2..=3, "edge", "2 or 3")?;
                    let u = vertex(args[0], n)?;
                    let v = vertex(args[1], n)?;
                    let w = args.get(2).map_or(Ok(0), |t| number(t))?;
                    if u == v {
                        return Err(ParseErrorKind::SelfLoop(u));
                    }
                    if !seen_edges.insert((u.min(v), u.max(v))) {
                        return Err(ParseErrorKind::DuplicateEdge(u.min(v), u.max(v)));
                    }
                    edges.push((u, v, w));
                    Ok(())
                }
                "req" => {
                    arity(args, 2..=2, "req", "2")?;
                    let v = vertex(args[0], n)?;
                    let r = number(args[1])?;
                    if std::mem::replace(&mut has_req[v], true) {
                        return Err(ParseErrorKind::DuplicateRequirement(v));
                    }
                    reqs[v] = r;
                    Ok(())
                }
                "sources" => {
                    arity(args, 3..=4, "sources", "3 or 4")?;
                    if sources.is_some() {
                        return Err(ParseErrorKind::DuplicateSources);
                    }
                    let s1 = vertex(args[0], n)?;
                    let s2 = vertex(args[1], n)?;
                    let p = number(args[2])?;
                    let q = args.get(3).map_or(Ok(1), |t| number(t))?;
                    Lambda::new(p, q)?;
                    sources = Some((s1, s2, p, q));
                    Ok(())
                }
                other => Err(ParseErrorKind::UnknownDirective(other.to_string())),
            }
        })()
        .map_err(at(line))?;
    }
    if edges.len() != m {
        return Err(at(last_line)(ParseErrorKind::EdgeCountMismatch {
            declared: m,
            found: edges.len(),
        }));
    }
    let graph = Graph::with_requirements(n, edges, reqs).map_err(|e| at(header_line)(e.into()))?;
    let sources = sources.map(|(s1, s2, p, q)| {
        TwoSourceSpec::new(s1, s2, Lambda::new(p, q).expect("validated above"))
    });
    Ok(GraphFile { graph, sources })
}

/// Serializes `g` in the graph file format; [`parse_graph`] reads it back.
pub fn write_graph(g: &Graph, sources: Option<&TwoSourceSpec>) -> String {
    let mut out = String::new();
    writeln!(out, "graph {} {}", g.n(), g.m()).unwrap();
    for e in g.edges() {
        writeln!(out, "edge {} {} {}", e.u, e.v, e.weight).unwrap();
    }
    for (v, &r) in g.requirements().iter().enumerate() {
        if r != 0 {
            writeln!(out, "req {v} {r}").unwrap();
        }
    }
    if let Some(s) = sources {
        writeln!(
            out,
            "sources {} {} {} {}",
            s.s1,
            s.s2,
            s.lambda.numer(),
            s.lambda.denom()
        )
        .unwrap();
    }
    out
}

/// Host edge ids of the `edge <u> <v>` lines in `text`.
pub fn parse_tree(text: &str, g: &Graph) -> Result<Vec<EdgeId>, ParseError> {
    let mut out = Vec::new();
    for (line, toks) in content_lines(text) {
        if toks[0] != "edge" {
            continue;
        }
        let at = |kind| ParseError { line, kind };
        let args = &toks[1..];
        // Solver output has two ids; a third token (a weight) is tolerated.
        arity(args, 2..=3, "edge", "2 or 3").map_err(at)?;
        let u = vertex(args[0], g.n()).map_err(at)?;
        let v = vertex(args[1], g.n()).map_err(at)?;
        let e = g
            .edge_between(u, v)
            .ok_or_else(|| at(ParseErrorKind::NotAHostEdge(u, v)))?;
        out.push(e);
    }
    Ok(out)
}

/// `tree <n>` followed by one `edge <u> <v>` line per tree edge, ascending
/// by `(u, v)`.
pub fn write_tree(t: &SpanningTree) -> String {
    let mut out = String::new();
    writeln!(out, "tree {}", t.n()).unwrap();
    for (u, v, _) in t.edge_pairs() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    out
}

/// `p/q`, or `p` for integers.
pub fn format_ratio(r: &Ratio<i128>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fixed six-decimal rendering, rounded half away from zero.
pub fn format_decimal(r: &Ratio<i128>) -> String {
    let scaled = (*r * Ratio::from_integer(1_000_000)).round().to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let a = scaled.unsigned_abs();
    format!("{sign}{}.{:06}", a / 1_000_000, a % 1_000_000)
}

/// Parses `p/q` or `p` as a nonnegative rational.
pub fn parse_ratio(s: &str) -> Option<Ratio<i128>> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i128>().ok()?, q.trim().parse::<i128>().ok()?),
        None => (s.trim().parse::<i128>().ok()?, 1),
    };
    (p >= 0 && q > 0).then(|| Ratio::new(p, q))
}
