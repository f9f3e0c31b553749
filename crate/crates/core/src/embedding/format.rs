//! The `.emb` text format.
//!
//! ```text
//! # K3 on the sphere
//! a: b c
//! b: c a
//! c: a b
//! ```
//!
//! Each line gives the cyclic rotation at a vertex as neighbour tokens. The
//! `k`-th parallel edge towards `b` is written `b#k` (`b` alone means `b#1`);
//! a loop appears twice in its own vertex's line under the same token. A `#`
//! at the start of a line or after whitespace starts a comment.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{Dart, EdgeId, RotationSystem, Vertex, VertexId};
use crate::error::{Error, Result};

/// Removes a trailing comment: `#` at line start or preceded by whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

/// Splits `name#k` into the label and multiplicity index.
pub(crate) fn split_token(token: &str) -> Result<(VertexId, u32), String> {
    let (name, k) = match token.split_once('#') {
        Some((name, k)) => {
            let k: u32 = k.parse().map_err(|_| format!("bad multiplicity in {token:?}"))?;
            if k == 0 {
                return Err(format!("multiplicity must be positive in {token:?}"));
            }
            (name, k)
        }
        None => (token, 1),
    };
    let name = VertexId::new(name).map_err(|e| e.to_string())?;
    Ok((name, k))
}

/// A parsed rotation line, before darts are paired.
pub(crate) struct RawLine {
    pub line: usize,
    pub vertex: VertexId,
    pub tokens: Vec<(VertexId, u32)>,
}

/// Splits `vertex: tokens...` lines; the token text is handed to `token`
/// so that other formats can attach data to each neighbour.
pub(crate) fn read_lines<T>(
    text: &str,
    mut other: impl FnMut(usize, &str) -> Result<bool>,
    mut token: impl FnMut(usize, &str) -> Result<((VertexId, u32), T)>,
) -> Result<Vec<(RawLine, Vec<T>)>> {
    let mut out = Vec::new();
    let mut seen = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() || other(line, body)? {
            continue;
        }
        let (head, rest) = body
            .split_once(':')
            .ok_or_else(|| Error::parse(line, "expected `vertex: neighbours...`"))?;
        let vertex = VertexId::new(head.trim()).map_err(|e| Error::parse(line, e.to_string()))?;
        if seen.insert(vertex.clone(), line).is_some() {
            return Err(Error::parse(line, format!("duplicate vertex {vertex}")));
        }
        let mut tokens = Vec::new();
        let mut extra = Vec::new();
        for t in rest.split_whitespace() {
            let (tok, data) = token(line, t)?;
            tokens.push(tok);
            extra.push(data);
        }
        out.push((RawLine { line, vertex, tokens }, extra));
    }
    if out.is_empty() {
        return Err(Error::parse(0, "no vertices"));
    }
    Ok(out)
}

/// Pairs neighbour tokens into edges and builds the rotation system. Darts in
/// each rotation keep the order of the tokens on the line.
pub(crate) fn assemble(lines: &[RawLine]) -> Result<RotationSystem> {
    let index: HashMap<&VertexId, usize> =
        lines.iter().enumerate().map(|(i, l)| (&l.vertex, i)).collect();
    // (lower vertex, higher vertex, k) -> edge id and placed ends
    let mut edges: HashMap<(usize, usize, u32), (EdgeId, u8)> = HashMap::new();
    let mut ends: Vec<[Vertex; 2]> = Vec::new();
    let mut rotations: Vec<Vec<Dart>> = vec![Vec::new(); lines.len()];
    for (v, l) in lines.iter().enumerate() {
        for (name, k) in &l.tokens {
            let w = *index.get(name).ok_or_else(|| {
                Error::parse(l.line, format!("dangling edge end: {name} has no rotation line"))
            })?;
            let key = (v.min(w), v.max(w), *k);
            let entry = edges.entry(key).or_insert_with(|| {
                ends.push([Vertex(v as u32), Vertex(w as u32)]);
                (EdgeId(ends.len() as u32 - 1), 0)
            });
            let placed = entry.1;
            let dart = match (placed, v == w) {
                (0, _) if ends[entry.0.idx()][0].idx() == v => Dart::new(entry.0, false),
                (0, _) => Dart::new(entry.0, true),
                (1, true) => Dart::new(entry.0, true),
                (1, false) if ends[entry.0.idx()][1].idx() == v => Dart::new(entry.0, true),
                _ => {
                    let tok = if *k == 1 { name.to_string() } else { format!("{name}#{k}") };
                    return Err(Error::parse(
                        l.line,
                        format!("duplicate arc-end placement of {tok} at {}", l.vertex),
                    ));
                }
            };
            entry.1 += 1;
            rotations[v].push(dart);
        }
    }
    for (&(a, b, k), &(_, placed)) in &edges {
        if placed != 2 {
            let line = lines[a].line.max(lines[b].line);
            return Err(Error::parse(
                line,
                format!(
                    "dangling edge end: {}-{}#{} placed only once",
                    lines[a].vertex, lines[b].vertex, k
                ),
            ));
        }
    }
    let labels = lines.iter().map(|l| l.vertex.clone()).collect();
    RotationSystem::from_parts(labels, ends, rotations)
}

pub fn parse_embedding(text: &str) -> Result<RotationSystem> {
    let lines = read_lines(text, |_, _| Ok(false), |line, t| {
        split_token(t).map(|x| (x, ())).map_err(|m| Error::parse(line, m))
    })?;
    let raw: Vec<RawLine> = lines.into_iter().map(|(l, _)| l).collect();
    assemble(&raw)
}

impl FromStr for RotationSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_embedding(s)
    }
}

/// Canonical presentation: vertex order, rotation start and the parallel-edge
/// numbering used by the writer and by symbolic edge references.
pub(crate) struct Layout {
    pub order: Vec<Vertex>,
    pub rotations: Vec<Vec<Dart>>,
    pub multiplicity: Vec<u32>,
}

impl RotationSystem {
    pub(crate) fn layout(&self) -> Layout {
        let mut order: Vec<Vertex> = self.vertices().collect();
        order.sort_by_key(|&v| self.rank(v));
        let rotations: Vec<Vec<Dart>> = self
            .vertices()
            .map(|v| {
                let rot = self.rotation(v);
                let keys: Vec<u32> = rot.iter().map(|&d| self.rank(self.head(d))).collect();
                let n = rot.len();
                let best = (0..n)
                    .min_by(|&s, &t| {
                        (0..n).map(|i| keys[(s + i) % n]).cmp((0..n).map(|i| keys[(t + i) % n]))
                    })
                    .unwrap_or(0);
                let mut rot = rot.to_vec();
                rot.rotate_left(best);
                rot
            })
            .collect();
        let mut multiplicity = vec![0u32; self.edge_count()];
        let mut counters: HashMap<(Vertex, Vertex), u32> = HashMap::new();
        for &v in &order {
            for &d in &rotations[v.idx()] {
                let w = self.head(d);
                if self.rank(w) < self.rank(v) || multiplicity[d.edge().idx()] != 0 {
                    continue;
                }
                let c = counters.entry((v, w)).or_insert(0);
                *c += 1;
                multiplicity[d.edge().idx()] = *c;
            }
        }
        Layout { order, rotations, multiplicity }
    }

    /// Token naming the far end of `d` in the canonical writer.
    pub(crate) fn token_with(&self, layout: &Layout, d: Dart) -> String {
        let k = layout.multiplicity[d.edge().idx()];
        let head = self.label(self.head(d));
        if k == 1 {
            head.to_string()
        } else {
            format!("{head}#{k}")
        }
    }

    /// Finds the `k`-th edge between `a` and `b` in canonical numbering.
    pub fn edge_by_ref(&self, a: &str, b: &str, k: u32) -> Result<EdgeId> {
        let va = self.require_vertex(a)?;
        let vb = self.require_vertex(b)?;
        let layout = self.layout();
        self.rotation(va)
            .iter()
            .find(|&&d| self.head(d) == vb && layout.multiplicity[d.edge().idx()] == k)
            .map(|d| d.edge())
            .ok_or_else(|| {
                Error::UnknownEdge(if k == 1 { format!("{a}-{b}") } else { format!("{a}-{b}#{k}") })
            })
    }

    /// Canonical multiplicity index of an edge among its parallel copies.
    pub fn multiplicity_index(&self, e: EdgeId) -> u32 {
        self.layout().multiplicity[e.idx()]
    }

    /// The canonical `.emb` text.
    pub fn to_emb(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let layout = self.layout();
        for &v in &layout.order {
            write!(f, "{}:", self.label(v))?;
            for &d in &layout.rotations[v.idx()] {
                write!(f, " {}", self.token_with(&layout, d))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_k3() {
        let rs = parse_embedding("a: b c\nb: c a\nc: a b").unwrap();
        assert_eq!((rs.vertex_count(), rs.edge_count()), (3, 3));
        assert!(rs.is_complete());
    }

    #[test]
    fn duplicate_vertex_line() {
        let err = parse_embedding("a: b\nb: a\na: b").unwrap_err();
        assert_eq!(err.to_string(), "line 3: duplicate vertex a");
    }

    #[test]
    fn dangling_end() {
        let err = parse_embedding("a: b c\nb: a\nc:").unwrap_err();
        assert!(err.to_string().contains("dangling"), "{err}");
        let err = parse_embedding("a: b\nb: a q").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_placement() {
        let err = parse_embedding("a: b b\nb: a").unwrap_err();
        assert!(err.to_string().contains("duplicate arc-end"), "{err}");
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_embedding("a: b\n\nb a").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn comments_and_parallel_edges() {
        let text = "# digon\na: b b#2   # two edges\nb: a#2 a\n";
        let rs = parse_embedding(text).unwrap();
        assert_eq!(rs.edge_count(), 2);
        assert_eq!(rs.to_string(), "a: b b#2\nb: a#2 a\n");
        let fs = rs.trace_faces();
        assert_eq!(fs.face_count, 2);
        assert_eq!(fs.genus(), 0);
    }

    #[test]
    fn loops() {
        let rs = parse_embedding("a: a a b\nb: a").unwrap();
        assert_eq!(rs.edge_count(), 2);
        let fs = rs.trace_faces();
        assert_eq!(fs.total_sides(), 4);
        assert_eq!(fs.genus(), 0);
    }

    #[test]
    fn writer_sorts_and_rotates() {
        let rs = parse_embedding("c: b a\nb: a c\na: c b").unwrap();
        assert_eq!(rs.to_string(), "a: b c\nb: a c\nc: a b\n");
    }

    #[test]
    fn edge_references() {
        let rs = parse_embedding("a: b b#2 c\nb: a#2 c a\nc: a b").unwrap();
        let e1 = rs.edge_by_ref("a", "b", 1).unwrap();
        let e2 = rs.edge_by_ref("b", "a", 2).unwrap();
        assert_ne!(e1, e2);
        assert!(rs.edge_by_ref("a", "b", 3).is_err());
        assert!(rs.edge_by_ref("a", "z", 1).is_err());
    }
}
