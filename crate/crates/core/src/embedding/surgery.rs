//! Surgery on rotation systems. Every operation validates its preconditions
//! against the traced faces and returns a new value.

use super::{Dart, Draft, EdgeId, FaceSet, FaceWalk, RotationSystem, Vertex, VertexId};
use crate::error::{Error, Result};

impl RotationSystem {
    /// Reverses every rotation. Faces of the result are the reversed walks.
    pub fn mirror(&self) -> RotationSystem {
        let rotations = self
            .rotations
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        RotationSystem::from_parts(self.labels.clone(), self.ends.clone(), rotations)
            .expect("mirroring preserves validity")
    }

    /// Removes a vertex together with its incident edges.
    pub fn delete_vertex(&self, v: Vertex) -> Result<RotationSystem> {
        if self.vertex_count() == 1 {
            return Err(Error::pre("cannot delete the only vertex"));
        }
        let mut draft = Draft::from_system(self);
        draft.remove_vertex(v);
        Ok(draft.finish()?.0)
    }

    /// Replaces edge `(a, b)` on triangles `[a, b, c]` and `[b, a, d]` by
    /// `(c, d)`. Returns the new embedding and the id of the new edge.
    pub fn flip_edge(&self, e: EdgeId) -> Result<(RotationSystem, EdgeId)> {
        if e.idx() >= self.edge_count() {
            return Err(Error::UnknownEdge(format!("#{}", e.0)));
        }
        let fs = self.trace_faces();
        let fwd = Dart::new(e, false);
        let back = fwd.reverse();
        let (f1, p1) = fs.locate(fwd);
        let (f2, p2) = fs.locate(back);
        if f1 == f2 {
            return Err(Error::pre(format!(
                "edge {} has both sides on the same face",
                self.describe_edge(e)
            )));
        }
        let (t1, t2) = (&fs.faces[f1], &fs.faces[f2]);
        if !t1.is_triangle() || !t2.is_triangle() {
            return Err(Error::pre(format!("edge {} is not between two triangles", self.describe_edge(e))));
        }
        // t1 = fwd, x2 (b -> c), x3 (c -> a); t2 = back, y2 (a -> d), y3 (d -> b)
        let x2 = t1.darts[(p1 + 1) % 3];
        let y2 = t2.darts[(p2 + 1) % 3];
        let c = self.head(x2);
        let d = self.head(y2);
        if c == d {
            return Err(Error::pre(format!(
                "edge {} has the same apex {} on both sides",
                self.describe_edge(e),
                self.label(c)
            )));
        }
        let mut draft = Draft::from_system(self);
        draft.remove_edge(e);
        let new = draft.add_edge(c, d);
        draft.insert_after(x2.reverse(), Dart::new(new, false));
        draft.insert_after(y2.reverse(), Dart::new(new, true));
        let (rs, remap) = draft.finish()?;
        let new = remap.edge(new).expect("new edge kept");
        Ok((rs, new))
    }

    /// Inserts an edge inside `face` between two of its corners, splitting it.
    pub fn add_edge_in_face(
        &self,
        face: &FaceWalk,
        corner1: usize,
        corner2: usize,
    ) -> Result<(RotationSystem, EdgeId)> {
        let fs = self.trace_faces();
        fs.index_of(face)?;
        let k = face.len();
        if corner1 >= k || corner2 >= k {
            return Err(Error::pre(format!("corner out of range for a {k}-sided face")));
        }
        if corner1 == corner2 {
            return Err(Error::pre("corners must be distinct"));
        }
        let a = face.corners[corner1];
        let b = face.corners[corner2];
        let mut draft = Draft::from_system(self);
        let new = draft.add_edge(a, b);
        draft.insert_after(face.incoming(corner1).reverse(), Dart::new(new, false));
        draft.insert_after(face.incoming(corner2).reverse(), Dart::new(new, true));
        let (rs, remap) = draft.finish()?;
        Ok((rs, remap.edge(new).expect("new edge kept")))
    }

    /// Joins a corner of one face to a corner of another face; the two faces
    /// merge and the genus grows by one.
    pub fn add_edge_across_faces(
        &self,
        face1: &FaceWalk,
        corner1: usize,
        face2: &FaceWalk,
        corner2: usize,
    ) -> Result<(RotationSystem, EdgeId)> {
        let fs = self.trace_faces();
        let i1 = fs.index_of(face1)?;
        let i2 = fs.index_of(face2)?;
        if i1 == i2 {
            return Err(Error::pre("corners lie on the same face; use add_edge_in_face"));
        }
        if corner1 >= face1.len() || corner2 >= face2.len() {
            return Err(Error::pre("corner out of range"));
        }
        let a = face1.corners[corner1];
        let b = face2.corners[corner2];
        let mut draft = Draft::from_system(self);
        let new = draft.add_edge(a, b);
        draft.insert_after(face1.incoming(corner1).reverse(), Dart::new(new, false));
        draft.insert_after(face2.incoming(corner2).reverse(), Dart::new(new, true));
        let (rs, remap) = draft.finish()?;
        Ok((rs, remap.edge(new).expect("new edge kept")))
    }

    /// Deletes an edge. Distinct side faces merge; a face on both sides splits
    /// and the genus drops by one. Refuses deletions that disconnect.
    pub fn delete_edge(&self, e: EdgeId) -> Result<RotationSystem> {
        if e.idx() >= self.edge_count() {
            return Err(Error::UnknownEdge(format!("#{}", e.0)));
        }
        let mut draft = Draft::from_system(self);
        draft.remove_edge(e);
        Ok(draft.finish()?.0)
    }

    /// Places a new vertex inside `face` joined to every corner occurrence,
    /// turning a `k`-gon into `k` triangles.
    pub fn subdivide_face(&self, face: &FaceWalk, label: VertexId) -> Result<RotationSystem> {
        let fs = self.trace_faces();
        fs.index_of(face)?;
        if self.lookup.contains_key(&label) {
            return Err(Error::DuplicateVertex(label.to_string()));
        }
        let mut draft = Draft::from_system(self);
        let hub = draft.add_vertex(label);
        let mut spokes = Vec::with_capacity(face.len());
        for i in 0..face.len() {
            let e = draft.add_edge(face.corners[i], hub);
            draft.insert_after(face.incoming(i).reverse(), Dart::new(e, false));
            spokes.push(Dart::new(e, true));
        }
        spokes.reverse();
        draft.set_rotation(hub, spokes);
        Ok(draft.finish()?.0)
    }

    /// Contracts a non-loop edge; the merged vertex keeps the label of `keep`
    /// and its rotation is the two rotations spliced at the edge.
    pub fn contract_edge(&self, e: EdgeId, keep: Vertex) -> Result<RotationSystem> {
        if e.idx() >= self.edge_count() {
            return Err(Error::UnknownEdge(format!("#{}", e.0)));
        }
        let [a, b] = self.endpoints(e);
        if a == b {
            return Err(Error::pre("cannot contract a loop"));
        }
        let (from_keep, other) = if keep == a {
            (Dart::new(e, false), b)
        } else if keep == b {
            (Dart::new(e, true), a)
        } else {
            return Err(Error::pre("kept vertex is not an endpoint of the edge"));
        };
        let after = |v: Vertex, d: Dart| -> Vec<Dart> {
            let rot = self.rotation(v);
            let p = rot.iter().position(|&x| x == d).expect("dart at its tail");
            (1..rot.len()).map(|i| rot[(p + i) % rot.len()]).collect()
        };
        let mut merged = after(keep, from_keep);
        let moved = after(other, from_keep.reverse());
        let mut draft = Draft::from_system(self);
        for &d in &moved {
            draft.set_tail(d, keep);
        }
        merged.extend(moved);
        draft.set_rotation(other, Vec::new());
        draft.set_rotation(keep, Vec::new());
        draft.remove_edge(e);
        draft.remove_vertex(other);
        draft.set_rotation(keep, merged);
        Ok(draft.finish()?.0)
    }

    /// First half of the vertex split: `w`, doubly incident with the
    /// hexagon `[w, a, b, w, c, d]`, becomes adjacent vertices `u` and `v` with
    /// rotations `(v, a, ..., b)` and `(u, c, ..., d)`. Returns the embedding
    /// and the new `(u, v)` edge, which lies twice on an 8-sided face.
    pub fn split_vertex_joined(
        &self,
        w: Vertex,
        hexagon: &FaceWalk,
        u_label: VertexId,
        v_label: VertexId,
    ) -> Result<(RotationSystem, EdgeId)> {
        let fs = self.trace_faces();
        fs.index_of(hexagon)?;
        let nontri: Vec<usize> = fs.nontriangular().map(|(i, _)| i).collect();
        if nontri.len() != 1 {
            return Err(Error::pre(format!(
                "expected exactly one nontriangular face, found {}",
                nontri.len()
            )));
        }
        if hexagon.len() != 6 {
            return Err(Error::pre(format!("face has {} sides, not 6", hexagon.len())));
        }
        if fs.index_of(hexagon)? != nontri[0] {
            return Err(Error::pre("given face is not the nontriangular face"));
        }
        let at: Vec<usize> = (0..6).filter(|&i| hexagon.corners[i] == w).collect();
        if at.is_empty() {
            return Err(Error::pre(format!("{} is not on the face", self.label(w))));
        }
        if at.len() != 2 || at[1] - at[0] != 3 {
            return Err(Error::pre(format!(
                "face is not of the form [w, a, b, w, c, d] for w = {}",
                self.label(w)
            )));
        }
        let s = at[0];
        let dart = |i: usize| hexagon.darts[(s + i) % 6];
        let corner = |i: usize| hexagon.corners[(s + i) % 6];
        let others = [corner(1), corner(2), corner(4), corner(5)];
        for (i, x) in others.iter().enumerate() {
            if *x == w || others[i + 1..].contains(x) {
                return Err(Error::pre("face corners a, b, c, d are not distinct"));
            }
        }
        for l in [&u_label, &v_label] {
            if self.lookup.contains_key(l) && self.lookup[l] != w {
                return Err(Error::DuplicateVertex(l.to_string()));
            }
        }
        if u_label == v_label {
            return Err(Error::DuplicateVertex(u_label.to_string()));
        }
        // rotation at w reads (w->d) (w->a) p.. (w->b) (w->c) q..
        let rot = self.rotation(w);
        let start = rot.iter().position(|&x| x == dart(0)).expect("dart at w");
        let rot: Vec<Dart> = (0..rot.len()).map(|i| rot[(start + i) % rot.len()]).collect();
        let to_b = dart(2).reverse();
        let split = rot.iter().position(|&x| x == to_b).expect("dart w->b") + 1;
        if rot[split % rot.len()] != dart(3) || *rot.last().unwrap() != dart(5).reverse() {
            return Err(Error::Internal("rotation at w does not match the hexagon".into()));
        }
        let (u_part, v_part) = rot.split_at(split);
        let mut draft = Draft::from_system(self);
        let u = draft.add_vertex(u_label);
        let v = draft.add_vertex(v_label);
        let uv = draft.add_edge(u, v);
        let mut u_rot = vec![Dart::new(uv, false)];
        let mut v_rot = vec![Dart::new(uv, true)];
        for &d in u_part {
            draft.set_tail(d, u);
            u_rot.push(d);
        }
        for &d in v_part {
            draft.set_tail(d, v);
            v_rot.push(d);
        }
        draft.set_rotation(w, Vec::new());
        draft.remove_vertex(w);
        draft.set_rotation(u, u_rot);
        draft.set_rotation(v, v_rot);
        let (rs, remap) = draft.finish()?;
        Ok((rs, remap.edge(uv).expect("uv kept")))
    }

    /// Splits `w` on its doubly incident hexagon and deletes the new `(u, v)`
    /// edge, leaving triangles `[u, a, b]` and `[v, c, d]`; the genus drops by one.
    pub fn split_vertex(
        &self,
        w: Vertex,
        hexagon: &FaceWalk,
        u_label: VertexId,
        v_label: VertexId,
    ) -> Result<RotationSystem> {
        let (joined, uv) = self.split_vertex_joined(w, hexagon, u_label, v_label)?;
        let fs = joined.trace_faces();
        let (f1, _) = fs.locate(Dart::new(uv, false));
        let (f2, _) = fs.locate(Dart::new(uv, true));
        if f1 != f2 || fs.faces[f1].len() != 8 {
            return Err(Error::Internal("split edge is not doubly incident with an 8-gon".into()));
        }
        joined.delete_edge(uv)
    }
}

impl RotationSystem {
    /// Removes `vertices` (with incident edges) and `edges`. For each marker
    /// dart, the rotation at its tail is scanned forward to the first
    /// surviving dart, and the face of the result containing that dart is
    /// reported. Markers at removed vertices are an error.
    pub fn remove_and_locate(
        &self,
        vertices: &[Vertex],
        edges: &[EdgeId],
        markers: &[Dart],
    ) -> Result<(RotationSystem, FaceSet, Vec<usize>)> {
        let mut gone_edge = vec![false; self.edge_count()];
        let mut gone_vertex = vec![false; self.vertex_count()];
        for &v in vertices {
            gone_vertex[v.idx()] = true;
            for &d in self.rotation(v) {
                gone_edge[d.edge().idx()] = true;
            }
        }
        for &e in edges {
            gone_edge[e.idx()] = true;
        }
        let mut survivors = Vec::with_capacity(markers.len());
        for &m in markers {
            if gone_vertex[self.tail(m).idx()] {
                return Err(Error::pre("marker dart leaves a removed vertex"));
            }
            let mut d = self.succ(m);
            while gone_edge[d.edge().idx()] {
                if d == m {
                    return Err(Error::pre(format!(
                        "vertex {} loses every edge",
                        self.label(self.tail(m))
                    )));
                }
                d = self.succ(d);
            }
            survivors.push(d);
        }
        let mut draft = Draft::from_system(self);
        for (i, gone) in gone_edge.iter().enumerate() {
            if *gone {
                draft.remove_edge(EdgeId(i as u32));
            }
        }
        for &v in vertices {
            draft.remove_vertex(v);
        }
        let (rs, remap) = draft.finish()?;
        let fs = rs.trace_faces();
        let faces = survivors
            .into_iter()
            .map(|d| fs.locate(remap.dart(d).expect("surviving dart")).0)
            .collect();
        Ok((rs, fs, faces))
    }
}

/// Faces that a corner-addressed operation can refer to.
pub fn face_at<'a>(fs: &'a FaceSet, index: usize) -> Result<&'a FaceWalk> {
    fs.faces
        .get(index)
        .ok_or_else(|| Error::pre(format!("face index {index} out of range ({} faces)", fs.faces.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> RotationSystem {
        "a: b c\nb: c a\nc: a b".parse().unwrap()
    }

    fn k4() -> RotationSystem {
        // planar: 0 centre, 1 2 3 counter-clockwise around it
        "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap()
    }

    fn counts(rs: &RotationSystem) -> (usize, usize, usize, u32) {
        let fs = rs.trace_faces();
        (fs.vertices, fs.edges, fs.face_count, fs.genus())
    }

    #[test]
    fn k4_planar() {
        let fs = k4().trace_faces();
        assert_eq!(fs.face_count, 4);
        assert!(fs.is_triangular());
        assert_eq!(fs.genus(), 0);
    }

    #[test]
    fn mirror_k3() {
        let m = k3().mirror();
        assert_eq!(m.to_string(), "a: b c\nb: a c\nc: a b\n");
        let expect: RotationSystem = "a: c b\nb: a c\nc: b a".parse().unwrap();
        assert_eq!(m, expect);
        assert_eq!(m.genus(), 0);
        assert_eq!(m.mirror(), k3());
    }

    #[test]
    fn delete_vertex_cases() {
        let rs = k4();
        for v in rs.vertices() {
            let d = rs.delete_vertex(v).unwrap();
            assert_eq!(counts(&d), (3, 3, 2, 0));
        }
        let k2 = k3().delete_vertex(Vertex(0)).unwrap();
        assert_eq!(counts(&k2), (2, 1, 1, 0));
        let path: RotationSystem = "a: b\nb: a c\nc: b".parse().unwrap();
        assert_eq!(path.delete_vertex(path.vertex("b").unwrap()).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn flip_in_k4_and_back() {
        let rs = k4();
        let e = rs.edge_by_ref("1", "2", 1).unwrap();
        let (flipped, new) = rs.flip_edge(e).unwrap();
        // apexes of 1-2 are 0 and 3, already adjacent: a parallel edge appears
        assert!(!flipped.is_simple());
        assert_eq!(counts(&flipped), counts(&rs));
        let (back, _) = flipped.flip_edge(new).unwrap();
        assert_eq!(back, rs);
    }

    #[test]
    fn flip_rejects_same_face() {
        let k2: RotationSystem = "a: b\nb: a".parse().unwrap();
        let err = k2.flip_edge(EdgeId(0)).unwrap_err();
        assert!(err.to_string().contains("same face"), "{err}");
        // K3: both sides are triangles but the apex is the same vertex
        let err = k3().flip_edge(EdgeId(0)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn hexagon_chord() {
        let hex: RotationSystem = "1: 2 6\n2: 3 1\n3: 4 2\n4: 5 3\n5: 6 4\n6: 1 5".parse().unwrap();
        let fs = hex.trace_faces();
        let (rs, _) = hex.add_edge_in_face(&fs.faces[0], 0, 3).unwrap();
        assert_eq!(rs.trace_faces().face_vector(), vec![4, 4, 6]);
    }

    #[test]
    fn handle_on_k3() {
        let rs = k3();
        let fs = rs.trace_faces();
        let (h, _) = rs.add_edge_across_faces(&fs.faces[0], 0, &fs.faces[1], 1).unwrap();
        assert_eq!(counts(&h), (3, 4, 1, 1));
        let err = rs.add_edge_across_faces(&fs.faces[0], 0, &fs.faces[0], 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn delete_edge_cases() {
        let rs = k4();
        let d = rs.delete_edge(rs.edge_by_ref("1", "2", 1).unwrap()).unwrap();
        assert_eq!(d.trace_faces().face_vector(), vec![3, 3, 4]);
        let path: RotationSystem = "a: b\nb: a c\nc: b".parse().unwrap();
        assert_eq!(path.delete_edge(EdgeId(0)).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn subdivide_triangle() {
        let rs = k3();
        let fs = rs.trace_faces();
        let s = rs.subdivide_face(&fs.faces[0], VertexId::new("z").unwrap()).unwrap();
        let sf = s.trace_faces();
        assert_eq!(sf.face_count, 4);
        assert!(sf.is_triangular());
        assert_eq!(s.degree(s.vertex("z").unwrap()), 3);
        assert!(rs.subdivide_face(&fs.faces[0], VertexId::new("a").unwrap()).is_err());
    }

    #[test]
    fn contract_in_k3() {
        let rs = k3();
        let e = rs.edge_by_ref("a", "b", 1).unwrap();
        let c = rs.contract_edge(e, rs.vertex("a").unwrap()).unwrap();
        assert_eq!(counts(&c), (2, 2, 2, 0));
        assert!(!c.is_simple());
        let looped: RotationSystem = "a: a a b\nb: a".parse().unwrap();
        let lp = looped.edges().find(|&e| looped.endpoints(e)[0] == looped.endpoints(e)[1]).unwrap();
        assert!(looped.contract_edge(lp, Vertex(0)).is_err());
    }
}
