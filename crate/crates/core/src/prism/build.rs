use serde::Serialize;

use super::{is_facial_cover, is_patchwork, FacialCover};
use crate::embedding::{Dart, EdgeId, FaceSet, RotationSystem, Vertex, VertexId};
use crate::error::{Error, Result};

/// Label of the second-side copy of a vertex.
pub fn prime(label: &VertexId) -> VertexId {
    VertexId::new(format!("{label}'")).expect("priming keeps a label valid")
}

/// Base label of a second-side vertex, or `None` for a first-side label.
pub fn unprime(label: &VertexId) -> Option<VertexId> {
    label.as_str().strip_suffix('\'').and_then(|b| VertexId::new(b).ok())
}

/// Joins `rs` to its mirror image through one tube per cover face.
///
/// Side 0 is `rs`; side 1 is its mirror with primed labels. For each cover
/// face in canonical order, every corner vertex not yet matched receives the
/// matching edge `(v, v')`, placed in the corner of the face and in the
/// mirrored corner of its copy. The resulting genus is `2g + h - 1`.
pub fn build_prism(rs: &RotationSystem, cover: &FacialCover) -> Result<RotationSystem> {
    if !rs.is_complete() {
        return Err(Error::pre("base embedding is not of a complete graph"));
    }
    if let Some(v) = rs.vertices().find(|&v| unprime(rs.label(v)).is_some()) {
        return Err(Error::pre(format!("base label {} already carries a prime", rs.label(v))));
    }
    let fs = rs.trace_faces();
    let check = is_facial_cover(rs, &fs, cover);
    if !check.ok {
        return Err(Error::pre(format!("not a facial cover: {}", check.witnesses.join("; "))));
    }
    let n = rs.vertex_count() as u32;
    let m = rs.edge_count() as u32;
    let mut labels: Vec<VertexId> = rs.vertices().map(|v| rs.label(v).clone()).collect();
    labels.extend(rs.vertices().map(|v| prime(rs.label(v))));
    let mut ends: Vec<[Vertex; 2]> = rs.edges().map(|e| rs.endpoints(e)).collect();
    ends.extend(rs.edges().map(|e| rs.endpoints(e).map(|v| Vertex(v.0 + n))));
    let copy = |d: Dart| Dart(d.0 + 2 * m);
    let mut rotations: Vec<Vec<Dart>> = rs.vertices().map(|v| rs.rotation(v).to_vec()).collect();
    rotations.extend(rs.vertices().map(|v| rs.rotation(v).iter().rev().map(|&d| copy(d)).collect()));

    let mut matched = vec![false; n as usize];
    for &f in &cover.faces {
        let face = &fs.faces[f];
        let mut added = 0;
        for i in 0..face.len() {
            let w = face.corners[i];
            if std::mem::replace(&mut matched[w.idx()], true) {
                continue;
            }
            let e = EdgeId(ends.len() as u32);
            ends.push([w, Vertex(w.0 + n)]);
            let anchor = face.incoming(i).reverse();
            let rot = &mut rotations[w.idx()];
            let p = rot.iter().position(|&x| x == anchor).expect("corner dart at w");
            rot.insert(p + 1, Dart::new(e, false));
            let anchor = copy(face.darts[i]);
            let rot = &mut rotations[w.idx() + n as usize];
            let p = rot.iter().position(|&x| x == anchor).expect("corner dart at w'");
            rot.insert(p + 1, Dart::new(e, true));
            added += 1;
        }
        if added == 0 {
            return Err(Error::pre(format!(
                "cover face {f} receives no matching edge; its vertices are covered by earlier faces"
            )));
        }
    }
    let prism = RotationSystem::from_parts(labels, ends, rotations)?;
    let g = fs.genus() as i64;
    let expect = 2 * g + cover.len() as i64 - 1;
    let got = prism.genus() as i64;
    if got != expect {
        return Err(Error::Internal(format!("prism genus {got}, expected 2g + h - 1 = {expect}")));
    }
    Ok(prism)
}

/// Structure of a `K_n x K_2` embedding: the side of each vertex and which
/// edges are matching edges.
struct PrismShape {
    n: usize,
    side: Vec<u8>,
    matching: Vec<bool>,
}

fn prism_shape(rs: &RotationSystem) -> Result<PrismShape> {
    let total = rs.vertex_count();
    if total % 2 != 0 || total < 4 {
        return Err(Error::pre("not a prism graph: vertex count"));
    }
    let n = total / 2;
    let mut side = vec![0u8; total];
    let mut partner = vec![Vertex(0); total];
    for v in rs.vertices() {
        if let Some(base) = unprime(rs.label(v)) {
            side[v.idx()] = 1;
            let b = rs
                .vertex(base.as_str())
                .ok_or_else(|| Error::pre(format!("not a prism graph: {} has no base", rs.label(v))))?;
            if unprime(rs.label(b)).is_some() {
                return Err(Error::pre("not a prism graph: doubly primed label"));
            }
            partner[v.idx()] = b;
            partner[b.idx()] = v;
        }
    }
    if side.iter().filter(|&&s| s == 1).count() != n {
        return Err(Error::pre("not a prism graph: sides differ in size"));
    }
    if !rs.is_simple() || rs.edge_count() != n * (n - 1) + n {
        return Err(Error::pre("not a prism graph: wrong edge count or not simple"));
    }
    let mut matching = vec![false; rs.edge_count()];
    for e in rs.edges() {
        let [a, b] = rs.endpoints(e);
        if side[a.idx()] != side[b.idx()] {
            if partner[a.idx()] != b {
                return Err(Error::pre(format!(
                    "not a prism graph: cross edge {}",
                    rs.describe_edge(e)
                )));
            }
            matching[e.idx()] = true;
        }
    }
    // simple, right edge count, n matching edges between partners and no
    // other cross edges: each side is complete
    if matching.iter().filter(|&&m| m).count() != n {
        return Err(Error::pre("not a prism graph: matching is incomplete"));
    }
    Ok(PrismShape { n, side, matching })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnugReport {
    pub n: usize,
    pub genus: u32,
    pub face_count: usize,
    /// Faces incident with at least one matching edge.
    pub matching_faces: Vec<usize>,
    pub snug: bool,
    pub witnesses: Vec<String>,
}

/// Snug: every face with a matching edge is a quadrilateral and every other
/// face is a triangle. Errors when the graph is not `K_n x K_2`.
pub fn check_snug(rs: &RotationSystem) -> Result<SnugReport> {
    let shape = prism_shape(rs)?;
    let fs = rs.trace_faces();
    let mut matching_faces = Vec::new();
    let mut witnesses = Vec::new();
    for (i, f) in fs.faces.iter().enumerate() {
        let on_matching = f.darts.iter().any(|d| shape.matching[d.edge().idx()]);
        let want = if on_matching { 4 } else { 3 };
        if on_matching {
            matching_faces.push(i);
        }
        if f.len() != want {
            witnesses.push(format!(
                "face {i} [{}] has {} sides, expected {want}",
                f.corner_labels(rs).collect::<Vec<_>>().join(" "),
                f.len()
            ));
        }
    }
    let snug = witnesses.is_empty();
    let n = shape.n;
    let genus = fs.genus();
    if snug {
        let n = n as i64;
        if 6 * genus as i64 != (n - 2) * (n - 3) {
            return Err(Error::Internal(format!("snug embedding of genus {genus} for n = {n}")));
        }
        if 3 * fs.face_count as i64 != 2 * n * n - n {
            return Err(Error::Internal(format!("snug embedding with {} faces", fs.face_count)));
        }
    }
    Ok(SnugReport { n, genus, face_count: fs.face_count, matching_faces, snug, witnesses })
}

/// One side of a sliced snug prism: an embedding of `K_n` with base labels
/// and its punctured faces.
#[derive(Clone, Debug)]
pub struct SideSlice {
    pub embedding: RotationSystem,
    pub faces: FaceSet,
    pub patchwork: FacialCover,
}

/// Cuts a snug prism along its matching edges. Side 1 is mirrored back and
/// unprimed so that slicing a prism built from `rs` returns `rs` twice.
pub fn slice(rs: &RotationSystem) -> Result<[SideSlice; 2]> {
    let report = check_snug(rs)?;
    if !report.snug {
        return Err(Error::NotSnug(report.witnesses.join("; ")));
    }
    let shape = prism_shape(rs)?;
    let matching: Vec<EdgeId> = rs.edges().filter(|e| shape.matching[e.idx()]).collect();
    let mut out = Vec::with_capacity(2);
    for s in 0..2u8 {
        let drop: Vec<Vertex> = rs.vertices().filter(|v| shape.side[v.idx()] != s).collect();
        let markers: Vec<Dart> = rs
            .vertices()
            .filter(|v| shape.side[v.idx()] == s)
            .map(|v| {
                *rs.rotation(v)
                    .iter()
                    .find(|d| shape.matching[d.edge().idx()])
                    .expect("each vertex has a matching edge")
            })
            .collect();
        let (side, fs, punctured) = rs.remove_and_locate(&drop, &matching, &markers)?;
        let (embedding, faces, patchwork) = if s == 0 {
            (side, fs, FacialCover::new(punctured))
        } else {
            let base = side.mirror().map_labels(|l| {
                unprime(l).ok_or_else(|| Error::Internal(format!("unprimed label {l} on side 1")))
            })?;
            let mfs = base.trace_faces();
            let idx = punctured.iter().map(|&f| mfs.locate(fs.faces[f].darts[0].reverse()).0).collect();
            (base, mfs, FacialCover::new(idx))
        };
        let check = is_patchwork(&embedding, &faces, &patchwork);
        if !check.ok {
            return Err(Error::Internal(format!(
                "punctured faces of side {s} are not a patchwork: {}",
                check.witnesses.join("; ")
            )));
        }
        out.push(SideSlice { embedding, faces, patchwork });
    }
    let [a, b]: [SideSlice; 2] = out.try_into().map_err(|_| Error::Internal("two sides".into()))?;
    let (g0, g1) = (a.faces.genus(), b.faces.genus());
    let h = a.patchwork.len();
    if b.patchwork.len() != h || report.genus as usize + 1 != (g0 + g1) as usize + h {
        return Err(Error::Internal(format!(
            "slice genera {g0} + {g1} with patchworks {h}/{} do not add up to {}",
            b.patchwork.len(),
            report.genus
        )));
    }
    Ok([a, b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::{attach_vortices, derive, parse_log};

    fn k3() -> RotationSystem {
        "a: b c\nb: c a\nc: a b".parse().unwrap()
    }

    fn k4() -> RotationSystem {
        "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap()
    }

    #[test]
    fn k3_prism() {
        let p = build_prism(&k3(), &FacialCover::new(vec![0])).unwrap();
        let fs = p.trace_faces();
        assert_eq!(fs.genus(), 0);
        assert_eq!(fs.face_count, 5);
        assert_eq!(fs.length_histogram().into_iter().collect::<Vec<_>>(), vec![(3, 2), (4, 3)]);
        let r = check_snug(&p).unwrap();
        assert!(r.snug);
        assert_eq!(r.matching_faces.len(), 3);
        let [a, b] = slice(&p).unwrap();
        assert_eq!(a.embedding, k3());
        assert_eq!(b.embedding, k3());
        assert_eq!(a.patchwork.len(), 1);
    }

    #[test]
    fn k4_prism_not_snug() {
        let rs = k4();
        let fs = rs.trace_faces();
        let zero = rs.vertex("0").unwrap();
        let f0 = (0..fs.faces.len()).find(|&i| fs.faces[i].incidences(zero) == 1).unwrap();
        let f1 = (f0 + 1..fs.faces.len())
            .find(|&i| fs.faces[i].incidences(zero) == 1 && !(fs.faces[i].corners.iter().all(|c| fs.faces[f0].corners.contains(c))))
            .unwrap();
        let cover = FacialCover::new(vec![f0, f1]);
        let p = build_prism(&rs, &cover).unwrap();
        assert_eq!(p.genus(), 1);
        let r = check_snug(&p).unwrap();
        assert!(!r.snug);
        assert!(!r.witnesses.is_empty());
        assert!(matches!(slice(&p).unwrap_err(), Error::NotSnug(_)));
    }

    #[test]
    fn k7_prism_genus_four() {
        let rs = derive(&parse_log("m=7\ncircuit 0: 1 3 2 6 4 5").unwrap()).unwrap();
        let fs = rs.trace_faces();
        let n = fs.faces.len();
        let mut cover = None;
        'outer: for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let f = FacialCover::new(vec![a, b, c]);
                    if is_facial_cover(&rs, &fs, &f).ok {
                        cover = Some(f);
                        break 'outer;
                    }
                }
            }
        }
        let p = build_prism(&rs, &cover.unwrap()).unwrap();
        assert_eq!(p.genus(), 4);
    }

    #[test]
    fn k19_prism_from_hamiltonian_face() {
        let log = parse_log("m=19\ncircuit 0: 15 x 4 11 5 y 14 6 16 18 z 1 17 10 13 8 12 2 3 9 7").unwrap();
        let full = attach_vortices(&derive(&log).unwrap(), &log).unwrap();
        let mut rs = full.clone();
        for l in ["x", "y", "z"] {
            rs = rs.delete_vertex(rs.vertex(l).unwrap()).unwrap();
        }
        let fs = rs.trace_faces();
        assert_eq!(fs.genus(), 28);
        let ham: Vec<usize> = fs.nontriangular().map(|(i, _)| i).collect();
        assert_eq!(ham.len(), 3);
        for &h in &ham {
            assert!(rs.vertices().all(|v| fs.faces[h].incidences(v) == 1));
        }
        let cover = FacialCover::new(vec![ham[0]]);
        let p = build_prism(&rs, &cover).unwrap();
        assert_eq!(p.genus(), 56);
        assert!(!check_snug(&p).unwrap().snug);
    }

    #[test]
    fn rejects_non_prism() {
        assert!(check_snug(&k4()).is_err());
        assert!(build_prism(&k4().delete_edge(EdgeId(0)).unwrap(), &FacialCover::new(vec![0])).is_err());
    }

    #[test]
    fn redundant_cover_face() {
        let rs = k4();
        let cover = FacialCover::new(vec![0, 1, 2, 3]);
        let err = build_prism(&rs, &cover).unwrap_err();
        assert!(err.to_string().contains("no matching edge"), "{err}");
    }
}
