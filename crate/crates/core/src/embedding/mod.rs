//! Orientable embeddings stored as rotation systems.
//!
//! Every edge `e` owns two darts (arcs): `2e` leaves the first endpoint and
//! `2e + 1` leaves the second. A rotation is the cyclic order of the darts
//! leaving a vertex. Loops put both of their darts into the same rotation and
//! parallel edges are ordinary distinct edges.
//!
//! Values are immutable; every surgery returns a fresh [`RotationSystem`].

mod draft;
mod faces;
pub(crate) mod format;
mod label;
mod surgery;

use std::collections::{HashMap, VecDeque};
use std::fmt;

pub use faces::{euler_genus, FaceSet, FaceWalk};
pub use format::parse_embedding;
pub use surgery::face_at;
pub use label::VertexId;
pub(crate) use draft::Draft;

use crate::error::{Error, Result};

/// An edge index within one rotation system.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

/// A vertex index within one rotation system.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(pub u32);

/// One of the two opposite arcs of an edge.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub u32);

impl Dart {
    pub fn new(edge: EdgeId, reversed: bool) -> Self {
        Dart(edge.0 * 2 + reversed as u32)
    }

    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 / 2)
    }

    pub fn reverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl Vertex {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A connected graph together with a cyclic order of darts at every vertex.
#[derive(Clone)]
pub struct RotationSystem {
    labels: Vec<VertexId>,
    lookup: HashMap<VertexId, Vertex>,
    /// Position of each vertex in natural label order.
    rank: Vec<u32>,
    ends: Vec<[Vertex; 2]>,
    rotations: Vec<Vec<Dart>>,
    succ: Vec<Dart>,
    pred: Vec<Dart>,
}

impl RotationSystem {
    /// Builds and validates a rotation system from raw parts.
    ///
    /// `ends[e][0]` is where dart `2e` leaves from and `ends[e][1]` where
    /// dart `2e + 1` leaves from. Each dart must appear exactly once, in the
    /// rotation of the vertex it leaves, and the graph must be connected.
    pub fn from_parts(
        labels: Vec<VertexId>,
        ends: Vec<[Vertex; 2]>,
        rotations: Vec<Vec<Dart>>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Invalid("no vertices".into()));
        }
        if rotations.len() != labels.len() {
            return Err(Error::Invalid("rotation count differs from vertex count".into()));
        }
        let mut lookup = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if lookup.insert(l.clone(), Vertex(i as u32)).is_some() {
                return Err(Error::DuplicateVertex(l.to_string()));
            }
        }
        let darts = ends.len() * 2;
        let mut seen = vec![false; darts];
        let mut succ = vec![Dart(0); darts];
        let mut pred = vec![Dart(0); darts];
        for (v, rot) in rotations.iter().enumerate() {
            for (i, &d) in rot.iter().enumerate() {
                if d.idx() >= darts {
                    return Err(Error::Invalid(format!("dart {} out of range", d.0)));
                }
                if std::mem::replace(&mut seen[d.idx()], true) {
                    return Err(Error::Invalid(format!("dart {} placed twice", d.0)));
                }
                let tail = ends[d.edge().idx()][d.is_reversed() as usize];
                if tail.idx() != v {
                    return Err(Error::Invalid(format!(
                        "dart {} placed at {} but leaves {}",
                        d.0,
                        labels[v],
                        labels.get(tail.idx()).map(|l| l.as_str()).unwrap_or("?")
                    )));
                }
                let next = rot[(i + 1) % rot.len()];
                succ[d.idx()] = next;
                pred[next.idx()] = d;
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(Error::Invalid(format!("dart {d} not placed in any rotation")));
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        let mut rank = vec![0; labels.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r as u32;
        }
        let rs = RotationSystem { labels, lookup, rank, ends, rotations, succ, pred };
        if !rs.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(rs)
    }

    fn is_connected(&self) -> bool {
        let n = self.labels.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &d in &self.rotations[v] {
                let w = self.head(d).idx();
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.labels.len() as u32).map(Vertex)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.ends.len() as u32).map(EdgeId)
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.succ.len() as u32).map(Dart)
    }

    pub fn label(&self, v: Vertex) -> &VertexId {
        &self.labels[v.idx()]
    }

    pub fn vertex(&self, label: &str) -> Option<Vertex> {
        VertexId::new(label).ok().and_then(|l| self.lookup.get(&l).copied())
    }

    pub fn require_vertex(&self, label: &str) -> Result<Vertex> {
        self.vertex(label).ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    /// Position of `v` when vertices are sorted by label.
    pub fn rank(&self, v: Vertex) -> u32 {
        self.rank[v.idx()]
    }

    pub fn rotation(&self, v: Vertex) -> &[Dart] {
        &self.rotations[v.idx()]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rotations[v.idx()].len()
    }

    pub fn tail(&self, d: Dart) -> Vertex {
        self.ends[d.edge().idx()][d.is_reversed() as usize]
    }

    pub fn head(&self, d: Dart) -> Vertex {
        self.ends[d.edge().idx()][1 - d.is_reversed() as usize]
    }

    pub fn endpoints(&self, e: EdgeId) -> [Vertex; 2] {
        self.ends[e.idx()]
    }

    /// Next dart after `d` in the rotation at its tail.
    pub fn succ(&self, d: Dart) -> Dart {
        self.succ[d.idx()]
    }

    pub fn pred(&self, d: Dart) -> Dart {
        self.pred[d.idx()]
    }

    /// Face-tracing step: arriving along `d`, leave by the successor of its
    /// reverse in the rotation at the head.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        self.succ[d.reverse().idx()]
    }

    /// All edges joining `a` and `b`.
    pub fn edges_between(&self, a: Vertex, b: Vertex) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.rotations[a.idx()]
            .iter()
            .filter(|&&d| self.head(d) == b)
            .map(|d| d.edge())
            .collect();
        out.dedup();
        if a == b {
            out.sort();
            out.dedup();
        }
        out
    }

    pub fn is_adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.rotations[a.idx()].iter().any(|&d| self.head(d) == b)
    }

    /// True when there are no loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.ends.len());
        self.ends.iter().all(|&[a, b]| a != b && seen.insert((a.min(b), a.max(b))))
    }

    /// True when the graph is simple and every pair of vertices is adjacent.
    pub fn is_complete(&self) -> bool {
        let n = self.labels.len();
        self.is_simple() && self.ends.len() == n * (n - 1) / 2
    }

    /// Returns the same embedding with one vertex renamed.
    pub fn relabel(&self, v: Vertex, label: VertexId) -> Result<Self> {
        if let Some(&other) = self.lookup.get(&label) {
            if other != v {
                return Err(Error::DuplicateVertex(label.to_string()));
            }
        }
        let mut labels = self.labels.clone();
        labels[v.idx()] = label;
        RotationSystem::from_parts(labels, self.ends.clone(), self.rotations.clone())
    }

    /// Renames every vertex through `f`.
    pub fn map_labels(&self, mut f: impl FnMut(&VertexId) -> Result<VertexId>) -> Result<Self> {
        let labels = self.labels.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        RotationSystem::from_parts(labels, self.ends.clone(), self.rotations.clone())
    }

    /// Human-readable description of an edge, e.g. `3-x#2`.
    pub fn describe_edge(&self, e: EdgeId) -> String {
        let [a, b] = self.ends[e.idx()];
        format!("{}-{}", self.label(a), self.label(b))
    }
}

impl PartialEq for RotationSystem {
    /// Two rotation systems are equal when they describe the same labelled
    /// embedding, independent of internal edge numbering and rotation start.
    fn eq(&self, other: &Self) -> bool {
        self.labels.len() == other.labels.len()
            && self.ends.len() == other.ends.len()
            && self.to_string() == other.to_string()
    }
}

impl Eq for RotationSystem {}

impl fmt::Debug for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RotationSystem {{\n{}}}", self)
    }
}
