//! Embeddings of the prism graphs `K_n x K_2`: genus formulas, facial covers
//! and patchworks, the mirror-and-tube construction, snugness, slicing and
//! split-complete graphs.

mod build;
mod split;

use serde::Serialize;

pub use build::{build_prism, check_snug, prime, slice, unprime, SideSlice, SnugReport};
pub use split::{delete_uv, find_split_pair, split_complete_check};

use crate::embedding::{FaceSet, RotationSystem};
use crate::error::{Error, Result};

/// `ceil((n-2)(n-3)/6)`, the Euler lower bound on the genus of `K_n x K_2`.
pub fn lower_bound(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::pre(format!("n = {n} is below 2")));
    }
    if n <= 3 {
        return Ok(0);
    }
    Ok(((n - 2) * (n - 3)).div_ceil(6))
}

/// Genus of `K_n x K_2`: the lower bound, plus one for `n = 5` and `n = 9`.
pub fn genus_formula(n: u64) -> Result<u64> {
    let b = lower_bound(n)?;
    Ok(if n == 5 || n == 9 { b + 1 } else { b })
}

/// A set of face indices into one [`FaceSet`], sorted and without repeats.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FacialCover {
    pub faces: Vec<usize>,
}

impl FacialCover {
    pub fn new(mut faces: Vec<usize>) -> Self {
        faces.sort_unstable();
        faces.dedup();
        FacialCover { faces }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// Outcome of a cover or patchwork check with human-readable witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    pub ok: bool,
    pub witnesses: Vec<String>,
}

impl CoverCheck {
    fn from(witnesses: Vec<String>) -> Self {
        CoverCheck { ok: witnesses.is_empty(), witnesses }
    }
}

fn range_witnesses(fs: &FaceSet, cover: &FacialCover) -> Vec<String> {
    cover
        .faces
        .iter()
        .filter(|&&f| f >= fs.faces.len())
        .map(|f| format!("face index {f} out of range ({} faces)", fs.faces.len()))
        .collect()
}

fn incidences(rs: &RotationSystem, fs: &FaceSet, cover: &FacialCover) -> Vec<usize> {
    let mut count = vec![0usize; rs.vertex_count()];
    for &f in &cover.faces {
        for &c in &fs.faces[f].corners {
            count[c.idx()] += 1;
        }
    }
    count
}

/// Every vertex must lie on at least one face of the cover.
pub fn is_facial_cover(rs: &RotationSystem, fs: &FaceSet, cover: &FacialCover) -> CoverCheck {
    let bad = range_witnesses(fs, cover);
    if !bad.is_empty() {
        return CoverCheck::from(bad);
    }
    let count = incidences(rs, fs, cover);
    CoverCheck::from(
        rs.vertices()
            .filter(|v| count[v.idx()] == 0)
            .map(|v| format!("vertex {} is uncovered", rs.label(v)))
            .collect(),
    )
}

/// Every vertex has exactly one incidence with the cover faces, and every
/// face outside the cover is a triangle.
pub fn is_patchwork(rs: &RotationSystem, fs: &FaceSet, cover: &FacialCover) -> CoverCheck {
    let bad = range_witnesses(fs, cover);
    if !bad.is_empty() {
        return CoverCheck::from(bad);
    }
    let count = incidences(rs, fs, cover);
    let mut witnesses = Vec::new();
    for v in rs.vertices() {
        match count[v.idx()] {
            1 => {}
            0 => witnesses.push(format!("vertex {} is uncovered", rs.label(v))),
            k => witnesses.push(format!("vertex {} has {k} incidences", rs.label(v))),
        }
    }
    for (i, f) in fs.faces.iter().enumerate() {
        if !f.is_triangle() && cover.faces.binary_search(&i).is_err() {
            witnesses.push(format!(
                "face {i} [{}] outside the cover has {} sides",
                f.corner_labels(rs).collect::<Vec<_>>().join(" "),
                f.len()
            ));
        }
    }
    CoverCheck::from(witnesses)
}

/// `.cov` text: one face per line as its canonical corner sequence.
pub fn write_cover(rs: &RotationSystem, fs: &FaceSet, cover: &FacialCover) -> String {
    let mut out = String::new();
    for &f in &cover.faces {
        out.push_str(&fs.faces[f].corner_labels(rs).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

/// Reads a `.cov` file, matching each line to a face by its cyclic corner
/// sequence. Faces with identical corner sequences are taken in order.
pub fn parse_cover(rs: &RotationSystem, fs: &FaceSet, text: &str) -> Result<FacialCover> {
    let mut taken = vec![false; fs.faces.len()];
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = crate::embedding::format::strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let corners = body
            .split_whitespace()
            .map(|t| rs.vertex(t).ok_or_else(|| Error::parse(line, format!("unknown vertex {t}"))))
            .collect::<Result<Vec<_>>>()?;
        let found = fs.faces.iter().enumerate().position(|(j, f)| {
            !taken[j]
                && f.corners.len() == corners.len()
                && (0..corners.len()).any(|s| {
                    (0..corners.len()).all(|k| f.corners[(s + k) % corners.len()] == corners[k])
                })
        });
        let j = found.ok_or_else(|| Error::parse(line, format!("no face [{body}]")))?;
        taken[j] = true;
        faces.push(j);
    }
    Ok(FacialCover::new(faces))
}
