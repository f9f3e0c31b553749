//! Exhaustive backtracking over rotation systems of `K_n` at a fixed genus,
//! looking for embeddings whose faces admit a patchwork or facial cover of a
//! requested shape.

mod checkpoint;
mod engine;
mod shapes;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use checkpoint::Checkpoint;
pub use engine::{brute_force_vectors, search_patchworks, Finding, SearchOutcome, SearchStatus, TaskResult};
pub use shapes::{find_covers, Shape};

use crate::error::{Error, Result};

/// A multiset of face lengths, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceVector(pub Vec<usize>);

impl FaceVector {
    pub fn new(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable();
        FaceVector(lengths)
    }

    pub fn face_count(&self) -> usize {
        self.0.len()
    }

    pub fn side_sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Lengths other than 3.
    pub fn nontriangular(&self) -> Vec<usize> {
        self.0.iter().copied().filter(|&l| l != 3).collect()
    }

    /// Number of faces of each length, indexed by length.
    pub fn counts(&self, max_len: usize) -> Vec<u32> {
        let mut c = vec![0u32; max_len + 1];
        for &l in &self.0 {
            c[l] += 1;
        }
        c
    }
}

/// Written as `3^20 4^3`.
impl fmt::Display for FaceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in &self.0 {
            *counts.entry(l).or_default() += 1;
        }
        let parts: Vec<String> = counts
            .into_iter()
            .map(|(l, c)| if c == 1 { l.to_string() } else { format!("{l}^{c}") })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for FaceVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (l, c) = tok.split_once('^').unwrap_or((tok, "1"));
            let l: usize = l.parse().map_err(|_| Error::pre(format!("bad face length {tok:?}")))?;
            let c: usize = c.parse().map_err(|_| Error::pre(format!("bad multiplicity {tok:?}")))?;
            out.extend(std::iter::repeat_n(l, c));
        }
        Ok(FaceVector::new(out))
    }
}

/// Edge count of `K_n`.
pub fn complete_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Face count of a cellular embedding of `K_n` at genus `g`, if positive.
pub fn face_count(n: usize, g: usize) -> Option<usize> {
    let f = 2 - 2 * g as i64 - n as i64 + complete_edges(n) as i64;
    (f > 0).then_some(f as usize)
}

/// Partitions of `total` into at most `max_parts` positive parts, each
/// partition in non-increasing order.
fn partitions(total: usize, max_parts: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, cap: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if parts == 0 {
            return;
        }
        for p in (1..=cap.min(rest)).rev() {
            cur.push(p);
            go(rest - p, p, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, max_parts, &mut Vec::new(), &mut out);
    out
}

/// All face vectors of `K_n` at genus `g` (lengths at least 3, correct face
/// count and side sum) that could host one of `shapes`. With no shapes every
/// vector is returned. Infeasible input gives an empty list.
pub fn face_vector_candidates(n: usize, g: usize, shapes: &[Shape]) -> Vec<FaceVector> {
    if n < 3 {
        return Vec::new();
    }
    let Some(f) = face_count(n, g) else { return Vec::new() };
    let sides = 2 * complete_edges(n);
    if sides < 3 * f {
        return Vec::new();
    }
    let mut out: Vec<FaceVector> = partitions(sides - 3 * f, f)
        .into_iter()
        .map(|p| {
            let mut lengths = vec![3; f - p.len()];
            lengths.extend(p.iter().map(|x| x + 3));
            FaceVector::new(lengths)
        })
        .filter(|v| shapes.is_empty() || shapes.iter().any(|s| s.admits(v, n)))
        .collect();
    out.sort();
    out
}

/// What to search for.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSpec {
    pub n: usize,
    pub genus: usize,
    pub shapes: Vec<Shape>,
    /// Admissible face vectors; defaults to the candidates for `shapes`.
    pub vectors: Option<Vec<FaceVector>>,
    /// Total node budget, split evenly across top-level tasks.
    pub budget: Option<u64>,
    /// Re-expand every pruned branch and check it holds no admissible leaf.
    pub audit: bool,
    /// Stop storing findings beyond this many (they are still counted).
    pub max_findings: usize,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many tasks, leaving the rest pending in the checkpoint.
    #[serde(skip)]
    pub max_tasks: Option<usize>,
}

impl SearchSpec {
    pub fn new(n: usize, genus: usize, shapes: Vec<Shape>) -> Self {
        SearchSpec {
            n,
            genus,
            shapes,
            vectors: None,
            budget: None,
            audit: false,
            max_findings: 100,
            threads: None,
            checkpoint: None,
            max_tasks: None,
        }
    }

    pub fn admissible(&self) -> Vec<FaceVector> {
        match &self.vectors {
            Some(v) => v.clone(),
            None => face_vector_candidates(self.n, self.genus, &self.shapes),
        }
    }

    /// SHA-256 of the fields that determine the result.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::json!({
            "n": self.n,
            "genus": self.genus,
            "shapes": self.shapes,
            "vectors": self.admissible(),
            "budget": self.budget,
            "audit": self.audit,
            "max_findings": self.max_findings,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vectors(list: &[FaceVector]) -> Vec<String> {
        let mut out: Vec<String> = list.iter().map(|v| v.to_string()).collect();
        out.sort();
        out
    }

    #[test]
    fn k9_genus3_cases() {
        let c = face_vector_candidates(9, 3, &[]);
        assert_eq!(vectors(&c), vec!["3^20 4^3", "3^21 4 5", "3^22 6"]);
        let p = face_vector_candidates(9, 3, &[Shape::Patchwork(vec![3, 6]), Shape::Patchwork(vec![4, 5])]);
        assert_eq!(vectors(&p), vec!["3^21 4 5", "3^22 6"]);
    }

    #[test]
    fn k7_torus_forced_triangular() {
        assert_eq!(vectors(&face_vector_candidates(7, 1, &[])), vec!["3^14"]);
        assert!(face_vector_candidates(7, 1, &[Shape::Patchwork(vec![4, 3])]).is_empty());
    }

    #[test]
    fn k5_single_pentagon() {
        assert!(face_vector_candidates(5, 1, &[Shape::Patchwork(vec![5])]).is_empty());
    }

    #[test]
    fn infeasible_is_empty() {
        assert!(face_vector_candidates(7, 0, &[]).is_empty());
        assert!(face_vector_candidates(4, 5, &[]).is_empty());
    }

    #[test]
    fn vector_text() {
        let v: FaceVector = "3^2 4 5".parse().unwrap();
        assert_eq!(v.0, vec![3, 3, 4, 5]);
        assert_eq!(v.to_string(), "3^2 4 5");
    }

    #[test]
    fn spec_hash_is_stable() {
        let a = SearchSpec::new(5, 1, vec![]);
        let mut b = a.clone();
        b.threads = Some(3);
        assert_eq!(a.hash(), b.hash());
        b.budget = Some(10);
        assert_ne!(a.hash(), b.hash());
    }
}
