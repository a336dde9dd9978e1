//! Line-oriented text format for collections of graphs.
//!
//! ```text
//! # comment
//! graph <id>
//! node <node-label>
//! edge <edge-label> <lo> <hi>
//! ```
//!
//! Tokens are separated by ASCII whitespace. `edge` lines attach to the most
//! recent `node`, and `node` lines belong to the most recent `graph`. Bounds
//! are decimal `i64` values or `-inf` / `inf`, with `lo < hi`; the attachment
//! covers `[lo, hi)`. A `#` starts a comment that runs to the end of the
//! line, and blank lines are ignored. Node labels must be unique within a
//! graph. An edge line overlapping an earlier line for the same edge on the
//! same node is unioned with it and reported as a warning.

use std::fmt::Write as _;

use crate::ibdgraph::IbdGraph;
use crate::intervals::Marker;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct GraphFile {
    pub graphs: Vec<IbdGraph>,
    pub warnings: Vec<ParseWarning>,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn parse_marker(tok: &str, line: usize) -> Result<Marker, ParseError> {
    tok.parse::<Marker>()
        .map_err(|_| err(line, format!("invalid marker `{tok}`")))
}

pub fn parse(text: &str) -> Result<GraphFile, ParseError> {
    let mut out = GraphFile::default();
    let mut node: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_ascii_whitespace().collect();
        let Some((&kw, args)) = toks.split_first() else {
            continue;
        };
        match (kw, args) {
            ("graph", [id]) => {
                out.graphs.push(IbdGraph::new(*id));
                node = None;
            }
            ("node", [label]) => {
                let g = out
                    .graphs
                    .last_mut()
                    .ok_or_else(|| err(line, "node before any graph"))?;
                if g.nodes.iter().any(|n| n.label == *label) {
                    return Err(err(
                        line,
                        format!("duplicate node `{label}` in graph `{}`", g.id),
                    ));
                }
                node = Some(g.add_node(*label));
            }
            ("edge", [label, lo, hi]) => {
                let (g, n) = match (out.graphs.last_mut(), node) {
                    (Some(g), Some(n)) => (g, n),
                    _ => return Err(err(line, "edge before any node")),
                };
                let (lo, hi) = (parse_marker(lo, line)?, parse_marker(hi, line)?);
                let overlapped = g
                    .attach(n, label, lo, hi)
                    .map_err(|e| err(line, e.to_string()))?;
                if overlapped {
                    out.warnings.push(ParseWarning {
                        line,
                        message: format!(
                            "edge `{label}` overlaps an earlier line on node `{}`; unioned",
                            g.nodes[n].label
                        ),
                    });
                }
            }
            ("graph" | "node" | "edge", _) => {
                return Err(err(line, format!("wrong number of fields for `{kw}`")))
            }
            _ => return Err(err(line, format!("unknown record `{kw}`"))),
        }
    }
    Ok(out)
}

/// Serializes graphs so that [`parse`] reads them back unchanged. Edges are
/// written in label order, one line per interval.
pub fn write(graphs: &[IbdGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        let _ = writeln!(out, "graph {}", g.id);
        for n in &g.nodes {
            let _ = writeln!(out, "node {}", n.label);
            for (edge, vset) in &n.edges {
                for (lo, hi) in vset.intervals() {
                    let _ = writeln!(out, "edge {edge} {lo} {hi}");
                }
            }
        }
    }
    out
}
