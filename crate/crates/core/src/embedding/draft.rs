use super::{Dart, EdgeId, RotationSystem, Vertex, VertexId};
use crate::error::{Error, Result};

/// Mutable scratch copy of a rotation system used while performing surgery.
///
/// Removed edges and vertices leave holes so that dart and vertex ids stay
/// stable until [`Draft::finish`] compacts them.
pub(crate) struct Draft {
    labels: Vec<Option<VertexId>>,
    ends: Vec<Option<[Vertex; 2]>>,
    rotations: Vec<Vec<Dart>>,
}

/// Old-to-new dart map produced when a draft is compacted.
pub(crate) struct Remap {
    darts: Vec<Option<Dart>>,
}

impl Remap {
    pub fn dart(&self, d: Dart) -> Option<Dart> {
        self.darts.get(d.0 as usize).copied().flatten()
    }

    pub fn edge(&self, e: EdgeId) -> Option<EdgeId> {
        self.dart(Dart::new(e, false)).map(Dart::edge)
    }
}

impl Draft {
    pub fn from_system(rs: &RotationSystem) -> Self {
        Draft {
            labels: rs.labels.iter().cloned().map(Some).collect(),
            ends: rs.ends.iter().copied().map(Some).collect(),
            rotations: rs.rotations.clone(),
        }
    }

    pub fn add_vertex(&mut self, label: VertexId) -> Vertex {
        self.labels.push(Some(label));
        self.rotations.push(Vec::new());
        Vertex(self.labels.len() as u32 - 1)
    }

    /// Adds an edge whose darts are not yet placed in any rotation.
    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> EdgeId {
        self.ends.push(Some([a, b]));
        EdgeId(self.ends.len() as u32 - 1)
    }

    pub fn tail(&self, d: Dart) -> Vertex {
        self.ends[d.edge().idx()].expect("dart of a removed edge")[d.is_reversed() as usize]
    }

    pub fn set_rotation(&mut self, v: Vertex, rotation: Vec<Dart>) {
        self.rotations[v.idx()] = rotation;
    }

    /// Moves one end of an edge to another vertex without touching rotations.
    pub fn set_tail(&mut self, d: Dart, v: Vertex) {
        let ends = self.ends[d.edge().idx()].as_mut().expect("dart of a removed edge");
        ends[d.is_reversed() as usize] = v;
    }

    /// Inserts `d` immediately after `anchor` in the rotation at `anchor`'s tail.
    pub fn insert_after(&mut self, anchor: Dart, d: Dart) {
        let v = self.tail(anchor);
        let rot = &mut self.rotations[v.idx()];
        let pos = rot.iter().position(|&x| x == anchor).expect("anchor dart not placed");
        rot.insert(pos + 1, d);
    }

    pub fn remove_edge(&mut self, e: EdgeId) {
        let [a, b] = self.ends[e.idx()].take().expect("edge removed twice");
        for v in [a, b] {
            self.rotations[v.idx()].retain(|d| d.edge() != e);
        }
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        let incident: Vec<EdgeId> = self.rotations[v.idx()].iter().map(|d| d.edge()).collect();
        for e in incident {
            if self.ends[e.idx()].is_some() {
                self.remove_edge(e);
            }
        }
        self.labels[v.idx()] = None;
    }

    pub fn finish(self) -> Result<(RotationSystem, Remap)> {
        let mut vmap = vec![None; self.labels.len()];
        let mut labels = Vec::new();
        for (i, l) in self.labels.into_iter().enumerate() {
            if let Some(l) = l {
                vmap[i] = Some(Vertex(labels.len() as u32));
                labels.push(l);
            }
        }
        let mut dmap = vec![None; self.ends.len() * 2];
        let mut ends = Vec::new();
        for (i, e) in self.ends.iter().enumerate() {
            if let Some([a, b]) = *e {
                let map = |v: Vertex| {
                    vmap[v.idx()].ok_or_else(|| Error::Internal("edge at removed vertex".into()))
                };
                let new = EdgeId(ends.len() as u32);
                ends.push([map(a)?, map(b)?]);
                dmap[2 * i] = Some(Dart::new(new, false));
                dmap[2 * i + 1] = Some(Dart::new(new, true));
            }
        }
        let mut rotations = Vec::with_capacity(labels.len());
        for (i, rot) in self.rotations.into_iter().enumerate() {
            if vmap[i].is_none() {
                continue;
            }
            let rot = rot
                .into_iter()
                .map(|d| dmap[d.idx()].ok_or_else(|| Error::Internal("removed dart placed".into())))
                .collect::<Result<Vec<_>>>()?;
            rotations.push(rot);
        }
        let rs = RotationSystem::from_parts(labels, ends, rotations)?;
        Ok((rs, Remap { darts: dmap }))
    }
}
