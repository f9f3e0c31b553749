use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FaceVector;
use crate::embedding::{FaceSet, RotationSystem};
use crate::error::{Error, Result};
use crate::prism::FacialCover;

/// A requested cover shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// A cotriangular patchwork whose faces have exactly these lengths.
    Patchwork(Vec<usize>),
    /// Any facial cover with this many faces.
    Cover(usize),
}

impl Shape {
    /// Whether an embedding of `K_n` with face vector `v` could carry this
    /// shape.
    pub fn admits(&self, v: &FaceVector, n: usize) -> bool {
        match self {
            Shape::Patchwork(lengths) => {
                if lengths.iter().sum::<usize>() != n || lengths.iter().any(|&l| l < 3) {
                    return false;
                }
                // every nontriangular face lies in the patchwork
                let mut rest = lengths.clone();
                for l in v.nontriangular() {
                    match rest.iter().position(|&x| x == l) {
                        Some(p) => {
                            rest.swap_remove(p);
                        }
                        None => return false,
                    }
                }
                let triangles = v.face_count() - v.nontriangular().len();
                rest.iter().all(|&l| l == 3) && rest.len() <= triangles
            }
            Shape::Cover(h) => *h >= 1 && *h <= v.face_count(),
        }
    }
}

/// `patchwork:4,5` or `cover:2`.
impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Patchwork(l) => {
                let parts: Vec<String> = l.iter().map(usize::to_string).collect();
                write!(f, "patchwork:{}", parts.join(","))
            }
            Shape::Cover(h) => write!(f, "cover:{h}"),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::pre(format!("bad shape {s:?}; expected patchwork:4,5 or cover:2"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "patchwork" => {
                let mut l = rest
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                l.sort_unstable();
                Ok(Shape::Patchwork(l))
            }
            "cover" => Ok(Shape::Cover(rest.trim().parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Every cover of the given shape, in lexicographic order of face indices.
/// Facial covers are enumerated by plain combination, so keep them small.
pub fn find_covers(rs: &RotationSystem, fs: &FaceSet, shape: &Shape) -> Vec<FacialCover> {
    let n = rs.vertex_count();
    let mut out = Vec::new();
    match shape {
        Shape::Patchwork(lengths) => {
            if fs.nontriangular().any(|(_, f)| !lengths.contains(&f.len())) {
                return out;
            }
            let mut want = lengths.clone();
            let mut used = vec![false; n];
            let mut chosen = Vec::new();
            exact_covers(rs, fs, &mut want, &mut used, &mut chosen, &mut out);
            out.retain(|c| fs.nontriangular().all(|(i, _)| c.faces.contains(&i)));
        }
        Shape::Cover(h) => {
            let mut chosen = Vec::new();
            combinations(fs, *h, 0, &mut chosen, &mut |c| {
                let mut seen = vec![false; n];
                for &f in c {
                    for &v in &fs.faces[f].corners {
                        seen[v.idx()] = true;
                    }
                }
                if seen.iter().all(|&s| s) {
                    out.push(FacialCover::new(c.to_vec()));
                }
            });
        }
    }
    out.sort_by(|a, b| a.faces.cmp(&b.faces));
    out.dedup();
    out
}

fn exact_covers(
    rs: &RotationSystem,
    fs: &FaceSet,
    want: &mut Vec<usize>,
    used: &mut Vec<bool>,
    chosen: &mut Vec<usize>,
    out: &mut Vec<FacialCover>,
) {
    let Some(first) = used.iter().position(|&u| !u) else {
        if want.is_empty() {
            out.push(FacialCover::new(chosen.clone()));
        }
        return;
    };
    if want.is_empty() {
        return;
    }
    let target = rs.vertices().nth(first).expect("vertex index in range");
    for (i, f) in fs.faces.iter().enumerate() {
        let Some(slot) = want.iter().position(|&l| l == f.len()) else { continue };
        if f.incidences(target) != 1 || f.corners.iter().any(|c| used[c.idx()]) {
            continue;
        }
        let mut distinct = f.corners.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != f.len() {
            continue;
        }
        let l = want.swap_remove(slot);
        for c in &f.corners {
            used[c.idx()] = true;
        }
        chosen.push(i);
        exact_covers(rs, fs, want, used, chosen, out);
        chosen.pop();
        for c in &f.corners {
            used[c.idx()] = false;
        }
        want.push(l);
        let last = want.len() - 1;
        want.swap(slot, last);
    }
}

fn combinations(fs: &FaceSet, h: usize, from: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if chosen.len() == h {
        f(chosen);
        return;
    }
    for i in from..fs.faces.len() {
        chosen.push(i);
        combinations(fs, h, i + 1, chosen, f);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prism::{is_facial_cover, is_patchwork};

    #[test]
    fn shape_text() {
        assert_eq!("patchwork:5,4".parse::<Shape>().unwrap(), Shape::Patchwork(vec![4, 5]));
        assert_eq!("cover:2".parse::<Shape>().unwrap(), Shape::Cover(2));
        assert_eq!(Shape::Patchwork(vec![3, 6]).to_string(), "patchwork:3,6");
        assert!("blob:1".parse::<Shape>().is_err());
    }

    #[test]
    fn k3_patchworks_and_k4_covers() {
        let k3: RotationSystem = "a: b c\nb: c a\nc: a b".parse().unwrap();
        let fs = k3.trace_faces();
        let p = find_covers(&k3, &fs, &Shape::Patchwork(vec![3]));
        assert_eq!(p.len(), 2);
        for c in &p {
            assert!(is_patchwork(&k3, &fs, c).ok);
        }
        let k4: RotationSystem = "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap();
        let fs = k4.trace_faces();
        let c = find_covers(&k4, &fs, &Shape::Cover(2));
        // any two of the four triangles cover all four vertices
        assert_eq!(c.len(), 6);
        for x in &c {
            assert!(is_facial_cover(&k4, &fs, x).ok);
        }
    }
}
