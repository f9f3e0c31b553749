use super::{is_patchwork, FacialCover};
use crate::embedding::{Dart, FaceSet, RotationSystem, Vertex};
use crate::error::{Error, Result};

/// Finds nonadjacent `u`, `v` such that the remaining vertices are pairwise
/// adjacent and the neighbourhoods of `u` and `v` partition them. Pairs are
/// tried in label order.
pub fn find_split_pair(rs: &RotationSystem) -> Option<(Vertex, Vertex)> {
    if !rs.is_simple() || rs.vertex_count() < 4 {
        return None;
    }
    let n = rs.vertex_count();
    let mut order: Vec<Vertex> = rs.vertices().collect();
    order.sort_by_key(|&v| rs.rank(v));
    let mut adj = vec![vec![false; n]; n];
    for e in rs.edges() {
        let [a, b] = rs.endpoints(e);
        adj[a.idx()][b.idx()] = true;
        adj[b.idx()][a.idx()] = true;
    }
    // u and v have degree summing to n - 2; every other vertex has degree n - 2
    let rest_degree = n - 2;
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i + 1..] {
            if adj[u.idx()][v.idx()] || rs.degree(u) + rs.degree(v) != n - 2 {
                continue;
            }
            if rs.degree(u) == 0 || rs.degree(v) == 0 {
                continue;
            }
            let ok = rs.vertices().filter(|&w| w != u && w != v).all(|w| {
                let (a, b) = (adj[w.idx()][u.idx()], adj[w.idx()][v.idx()]);
                a != b && rs.degree(w) == rest_degree
            });
            if ok {
                return Some((u, v));
            }
        }
    }
    None
}

/// True when the embedded graph is split-complete.
pub fn split_complete_check(rs: &RotationSystem) -> bool {
    find_split_pair(rs).is_some()
}

/// Deletes the special vertices `u`, `v` of a triangular split-complete
/// embedding. Their links become two faces that form a patchwork of the
/// remaining complete graph.
pub fn delete_uv(rs: &RotationSystem) -> Result<(RotationSystem, FaceSet, FacialCover)> {
    let (u, v) = find_split_pair(rs).ok_or_else(|| Error::pre("graph is not split-complete"))?;
    if !rs.trace_faces().is_triangular() {
        return Err(Error::pre("embedding is not triangular"));
    }
    let markers: Vec<Dart> = [u, v]
        .iter()
        .flat_map(|&s| rs.rotation(s).iter().map(|d| d.reverse()))
        .collect();
    let (out, fs, faces) = rs.remove_and_locate(&[u, v], &[], &markers)?;
    let cover = FacialCover::new(faces);
    let check = is_patchwork(&out, &fs, &cover);
    if cover.len() != 2 || !check.ok {
        return Err(Error::Internal(format!(
            "link faces of u and v are not a two-face patchwork: {}",
            check.witnesses.join("; ")
        )));
    }
    Ok((out, fs, cover))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::{attach_vortices, derive, parse_log};

    #[test]
    fn recognises_split_pair() {
        let rs: RotationSystem = "1: 2 3 u\n2: 3 1 v\n3: 1 2 v\nu: 1\nv: 2 3".parse().unwrap();
        let (u, v) = find_split_pair(&rs).unwrap();
        assert_eq!((rs.label(u).as_str(), rs.label(v).as_str()), ("u", "v"));
        let k4: RotationSystem = "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap();
        assert!(!split_complete_check(&k4));
    }

    #[test]
    fn three_special_vertices_are_not_split_complete() {
        let log = parse_log("m=19\ncircuit 0: 15 x 4 11 5 y 14 6 16 18 z 1 17 10 13 8 12 2 3 9 7").unwrap();
        let full = attach_vortices(&derive(&log).unwrap(), &log).unwrap();
        assert!(!split_complete_check(&full));
    }

    #[test]
    fn delete_uv_preconditions() {
        let k4: RotationSystem = "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap();
        assert!(delete_uv(&k4).unwrap_err().to_string().contains("split-complete"));
        let rs: RotationSystem = "1: 2 3 u\n2: 3 1 v\n3: 1 2 v\nu: 1\nv: 2 3".parse().unwrap();
        assert!(delete_uv(&rs).unwrap_err().to_string().contains("triangular"));
    }
}
