//! Text formats for graphs and solutions.
//!
//! Graph file:
//! ```text
//! c optional comments
//! p kforest <n> <m> <k>
//! e <u> <v>        (m lines, 1-based endpoints)
//! ```
//! Solution file:
//! ```text
//! s kforest <size>
//! a <edge_id> <forest>   (size lines, both 1-based)
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, ForestFamily, MultiGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: MultiGraph,
    pub k: usize,
    /// One message per dropped self-loop.
    pub warnings: Vec<String>,
}

fn number(line: usize, token: Option<&str>, what: &str) -> Result<usize> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token.parse().map_err(|_| {
        Error::parse(
            line,
            format!("{what} `{token}` is not a non-negative integer"),
        )
    })
}

fn no_trailing<'a>(line: usize, mut rest: impl Iterator<Item = &'a str>) -> Result<()> {
    match rest.next() {
        Some(extra) => Err(Error::parse(line, format!("unexpected token `{extra}`"))),
        None => Ok(()),
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut graph = MultiGraph::new(0);
    let mut k = 0;
    let mut warnings = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse(line, "duplicate problem line"));
                }
                if tokens.next() != Some("kforest") {
                    return Err(Error::parse(line, "expected `p kforest <n> <m> <k>`"));
                }
                let n = number(line, tokens.next(), "vertex count")?;
                let m = number(line, tokens.next(), "edge count")?;
                k = number(line, tokens.next(), "k")?;
                no_trailing(line, tokens)?;
                if k < 1 {
                    return Err(Error::parse(line, "k must be at least 1"));
                }
                graph = MultiGraph::new(n);
                header = Some((n, m));
            }
            Some("e") => {
                let Some((n, m)) = header else {
                    return Err(Error::parse(line, "edge line before the problem line"));
                };
                if graph.edge_slots() == m {
                    return Err(Error::parse(
                        line,
                        format!("more than the declared {m} edges"),
                    ));
                }
                let u = number(line, tokens.next(), "endpoint")?;
                let v = number(line, tokens.next(), "endpoint")?;
                no_trailing(line, tokens)?;
                for x in [u, v] {
                    if x < 1 || x > n {
                        return Err(Error::parse(line, format!("endpoint {x} outside 1..={n}")));
                    }
                }
                let id = graph
                    .add_edge(u - 1, v - 1)
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                if u == v {
                    warnings.push(format!(
                        "line {line}: self-loop on vertex {u} dropped (edge id {})",
                        id.index() + 1
                    ));
                }
            }
            Some(other) => {
                return Err(Error::parse(line, format!("unknown line type `{other}`")));
            }
        }
    }

    let Some((_, m)) = header else {
        return Err(Error::parse(last_line.max(1), "missing problem line"));
    };
    if graph.edge_slots() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("declared {m} edges but found {}", graph.edge_slots()),
        ));
    }
    Ok(GraphFile { graph, k, warnings })
}

/// Writes `g` with its original endpoints, self-loops included, so that
/// parsing the output reproduces the same ids.
pub fn emit_graph(g: &MultiGraph, k: usize, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(
        out,
        "p kforest {} {} {}",
        g.vertex_slots(),
        g.edge_slots(),
        k
    );
    for i in 0..g.edge_slots() {
        if let Some((u, v)) = g.original_endpoints(EdgeId(i)) {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
    }
    out
}

/// A parsed solution file. Edge ids and forest indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub assignments: Vec<(EdgeId, usize)>,
}

impl SolutionFile {
    pub fn size(&self) -> usize {
        self.assignments.len()
    }
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut declared: Option<usize> = None;
    let mut assignments = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            None | Some("c") => {}
            Some("s") => {
                if declared.is_some() {
                    return Err(Error::parse(line, "duplicate solution line"));
                }
                if tokens.next() != Some("kforest") {
                    return Err(Error::parse(line, "expected `s kforest <size>`"));
                }
                declared = Some(number(line, tokens.next(), "size")?);
                no_trailing(line, tokens)?;
            }
            Some("a") => {
                if declared.is_none() {
                    return Err(Error::parse(line, "assignment before the solution line"));
                }
                let e = number(line, tokens.next(), "edge id")?;
                let i = number(line, tokens.next(), "forest index")?;
                no_trailing(line, tokens)?;
                if e < 1 {
                    return Err(Error::parse(line, "edge ids start at 1"));
                }
                if i < 1 {
                    return Err(Error::parse(line, "forest indices start at 1"));
                }
                assignments.push((EdgeId(e - 1), i - 1));
            }
            Some(other) => {
                return Err(Error::parse(line, format!("unknown line type `{other}`")));
            }
        }
    }
    let Some(size) = declared else {
        return Err(Error::parse(last_line.max(1), "missing solution line"));
    };
    if size != assignments.len() {
        return Err(Error::parse(
            last_line.max(1),
            format!(
                "declared size {size} but found {} assignments",
                assignments.len()
            ),
        ));
    }
    Ok(SolutionFile { assignments })
}

/// Assignments in ascending edge id order.
pub fn emit_solution(f: &ForestFamily) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s kforest {}", f.len());
    for (e, i) in f.assigned() {
        let _ = writeln!(out, "a {} {}", e.index() + 1, i + 1);
    }
    out
}
