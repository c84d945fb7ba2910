//! Text formats: edge lists, community files and walk-network exports.
//!
//! Edge lists hold one `u v` or `u v w` per line; node ids are arbitrary
//! tokens. Community files hold one community per line as
//! whitespace-separated tokens. Blank lines and lines starting with `#`
//! are ignored in both.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use mscd_core::{Cover, Graph};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: expected `u v` or `u v w`, found {fields} fields")]
    FieldCount { line: usize, fields: usize },
    #[error("line {line}: weight `{token}` is not a number")]
    BadWeight { line: usize, token: String },
    #[error("line {line}: weight {weight} must be finite and > 0")]
    NonPositiveWeight { line: usize, weight: f64 },
    #[error("line {line}: duplicate edge `{u}` - `{v}`")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: unknown node `{token}`")]
    UnknownNode { line: usize, token: String },
    #[error("line {line}: node `{token}` repeated within one community")]
    RepeatedNode { line: usize, token: String },
    #[error(transparent)]
    Graph(#[from] mscd_core::Error),
}

/// Two-way map between file tokens and dense node ids, in order of first
/// appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeNames {
    tokens: Vec<String>,
    ids: HashMap<String, usize>,
}

impl NodeNames {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    /// Id of `token`, registering it if new.
    pub fn intern(&mut self, token: &str) -> usize {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len();
        self.tokens.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }

    /// Plain numeric names `0..n`.
    pub fn numeric(n: usize) -> Self {
        let mut names = NodeNames::default();
        for i in 0..n {
            names.intern(&i.to_string());
        }
        names
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

/// Parses an edge list into a graph plus its token map.
pub fn parse_edge_list(text: &str) -> Result<(Graph, NodeNames), FormatError> {
    let mut names = NodeNames::default();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (line, fields) in content_lines(text) {
        if !(2..=3).contains(&fields.len()) {
            return Err(FormatError::FieldCount { line, fields: fields.len() });
        }
        let w = match fields.get(2) {
            None => 1.0,
            Some(tok) => tok.parse::<f64>().map_err(|_| FormatError::BadWeight {
                line,
                token: (*tok).to_owned(),
            })?,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(FormatError::NonPositiveWeight { line, weight: w });
        }
        let u = names.intern(fields[0]);
        let v = names.intern(fields[1]);
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(FormatError::DuplicateEdge {
                line,
                u: fields[0].to_owned(),
                v: fields[1].to_owned(),
            });
        }
        edges.push((u, v, w));
    }
    let g = Graph::from_edges(names.len(), edges)?;
    Ok((g, names))
}

/// Parses a community file. Unknown tokens are an error unless `extend` is
/// set, in which case they are added to `names`.
pub fn parse_communities(text: &str, names: &mut NodeNames, extend: bool) -> Result<Vec<Vec<usize>>, FormatError> {
    let mut out = Vec::new();
    for (line, fields) in content_lines(text) {
        let mut community = Vec::with_capacity(fields.len());
        let mut here = HashSet::new();
        for tok in fields {
            let id = match names.id(tok) {
                Some(id) => id,
                None if extend => names.intern(tok),
                None => {
                    return Err(FormatError::UnknownNode {
                        line,
                        token: tok.to_owned(),
                    })
                }
            };
            if !here.insert(id) {
                return Err(FormatError::RepeatedNode {
                    line,
                    token: tok.to_owned(),
                });
            }
            community.push(id);
        }
        out.push(community);
    }
    Ok(out)
}

/// One community per line, members in node-id order.
pub fn format_communities(cover: &Cover, names: &NodeNames) -> String {
    let mut out = String::new();
    for c in cover.communities() {
        let line: Vec<&str> = c.iter().map(|&v| names.token(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Edge list of a (possibly derived) network, each pair once. Diagonal
/// entries are halved so that reading the file back reproduces them.
pub fn format_edges(g: &Graph, names: &NodeNames) -> String {
    let mut out = String::new();
    for u in 0..g.node_count() {
        for (v, w) in g.neighbors(u) {
            if v < u || w <= 0.0 {
                continue;
            }
            let w = if u == v { w / 2.0 } else { w };
            let _ = writeln!(out, "{} {} {}", names.token(u), names.token(v), w);
        }
    }
    out
}
