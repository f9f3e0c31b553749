use std::collections::BTreeMap;

use super::{Dart, RotationSystem, Vertex};
use crate::error::{Error, Result};

/// A closed boundary walk.
///
/// `darts[i]` leaves corner `corners[i]`; the walk is stored starting at the
/// rotation whose corner labels are lexicographically least.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceWalk {
    pub darts: Vec<Dart>,
    pub corners: Vec<Vertex>,
}

impl FaceWalk {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn is_triangle(&self) -> bool {
        self.darts.len() == 3
    }

    /// Dart arriving at corner `i`.
    pub fn incoming(&self, i: usize) -> Dart {
        self.darts[(i + self.darts.len() - 1) % self.darts.len()]
    }

    /// The reversed walk, as traced in the mirror image.
    pub fn reversed(&self) -> Vec<Dart> {
        self.darts.iter().rev().map(|d| d.reverse()).collect()
    }

    /// Labels of the corners in walk order.
    pub fn corner_labels<'a>(&'a self, rs: &'a RotationSystem) -> impl Iterator<Item = &'a str> + 'a {
        self.corners.iter().map(move |&v| rs.label(v).as_str())
    }

    /// Number of times `v` occurs as a corner.
    pub fn incidences(&self, v: Vertex) -> usize {
        self.corners.iter().filter(|&&c| c == v).count()
    }
}

/// Result of face tracing.
#[derive(Clone, Debug)]
pub struct FaceSet {
    pub faces: Vec<FaceWalk>,
    /// `(face index, position)` for each dart.
    face_of: Vec<(usize, usize)>,
    pub vertices: usize,
    pub edges: usize,
    /// Face count. Differs from `faces.len()` only for the edgeless
    /// one-vertex graph, whose single face has an empty boundary.
    pub face_count: usize,
}

impl FaceSet {
    /// Face index and position of `d` within that face.
    pub fn locate(&self, d: Dart) -> (usize, usize) {
        self.face_of[d.0 as usize]
    }

    pub fn face_containing(&self, d: Dart) -> &FaceWalk {
        &self.faces[self.face_of[d.0 as usize].0]
    }

    pub fn genus(&self) -> u32 {
        euler_genus(self).expect("tracer output always has integral genus")
    }

    /// Euler characteristic `v - e + f`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.face_count as i64
    }

    pub fn total_sides(&self) -> usize {
        self.faces.iter().map(FaceWalk::len).sum()
    }

    /// Histogram of face lengths.
    pub fn length_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for f in &self.faces {
            *h.entry(f.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn is_triangular(&self) -> bool {
        self.faces.iter().all(FaceWalk::is_triangle)
    }

    pub fn nontriangular(&self) -> impl Iterator<Item = (usize, &FaceWalk)> + '_ {
        self.faces.iter().enumerate().filter(|(_, f)| !f.is_triangle())
    }

    /// Sorted face lengths, the face vector of the embedding.
    pub fn face_vector(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.faces.iter().map(FaceWalk::len).collect();
        v.sort_unstable();
        v
    }

    /// Checks that `face` (possibly constructed elsewhere) is a face of this set
    /// and returns its index.
    pub fn index_of(&self, face: &FaceWalk) -> Result<usize> {
        let first = *face.darts.first().ok_or_else(|| Error::pre("empty face walk"))?;
        let (i, _) = self.locate(first);
        let f = &self.faces[i];
        if f.len() == face.len() && rotation_of(&f.darts, &face.darts) {
            Ok(i)
        } else {
            Err(Error::pre("walk is not a face of this embedding"))
        }
    }
}

fn rotation_of(a: &[Dart], b: &[Dart]) -> bool {
    let Some(shift) = a.iter().position(|&d| d == b[0]) else {
        return false;
    };
    (0..a.len()).all(|i| a[(shift + i) % a.len()] == b[i])
}

/// `(2 - v + e - f) / 2`, failing if the value is odd or negative.
pub fn euler_genus(fs: &FaceSet) -> Result<u32> {
    let twice = 2 - fs.euler_characteristic();
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::Internal(format!(
            "Euler characteristic {} does not give an orientable genus",
            fs.euler_characteristic()
        )));
    }
    Ok((twice / 2) as u32)
}

impl RotationSystem {
    /// Traces every face by the next-after-reverse rule.
    pub fn trace_faces(&self) -> FaceSet {
        let darts = self.succ.len();
        let mut visited = vec![false; darts];
        let mut raw: Vec<Vec<Dart>> = Vec::new();
        for start in 0..darts {
            if visited[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = Dart(start as u32);
            while !visited[d.idx()] {
                visited[d.idx()] = true;
                walk.push(d);
                d = self.next_in_face(d);
            }
            raw.push(walk);
        }
        let mut keyed: Vec<(Vec<u32>, FaceWalk)> = raw
            .into_iter()
            .map(|w| {
                let w = self.canonical_start(w);
                let key = w.iter().map(|&d| self.rank(self.tail(d))).collect();
                let corners = w.iter().map(|&d| self.tail(d)).collect();
                (key, FaceWalk { darts: w, corners })
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.darts.cmp(&b.1.darts)));
        let faces: Vec<FaceWalk> = keyed.into_iter().map(|(_, f)| f).collect();
        let mut face_of = vec![(0, 0); darts];
        for (i, f) in faces.iter().enumerate() {
            for (p, d) in f.darts.iter().enumerate() {
                face_of[d.idx()] = (i, p);
            }
        }
        let face_count = if darts == 0 { 1 } else { faces.len() };
        FaceSet { faces, face_of, vertices: self.vertex_count(), edges: self.edge_count(), face_count }
    }

    fn canonical_start(&self, walk: Vec<Dart>) -> Vec<Dart> {
        let n = walk.len();
        let key = |s: usize| -> (Vec<u32>, Vec<Dart>) {
            let darts: Vec<Dart> = (0..n).map(|i| walk[(s + i) % n]).collect();
            (darts.iter().map(|&d| self.rank(self.tail(d))).collect(), darts)
        };
        let best = (0..n).min_by_key(|&s| key(s)).unwrap_or(0);
        let mut walk = walk;
        walk.rotate_left(best);
        walk
    }

    pub fn genus(&self) -> u32 {
        self.trace_faces().genus()
    }
}
