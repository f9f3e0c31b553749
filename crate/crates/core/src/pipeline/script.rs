use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::embedding::format::{split_token, strip_comment};
use crate::embedding::{EdgeId, FaceSet, FaceWalk, RotationSystem, VertexId};
use crate::error::{Error, Result};

/// A face named either by its index in canonical face order (`f12`) or by
/// its corner sequence (`[2,y,x]`), matched up to cyclic rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FaceRef {
    Index(usize),
    Corners(Vec<String>),
}

impl FaceRef {
    /// Refers to face `index` by its corners when no other face has the same
    /// cyclic corner sequence, and by index otherwise.
    pub fn for_face(rs: &RotationSystem, fs: &FaceSet, index: usize) -> FaceRef {
        let face = &fs.faces[index];
        let unique = fs
            .faces
            .iter()
            .enumerate()
            .all(|(j, g)| j == index || cyclic_shift(&g.corners, &face.corners).is_none());
        if unique {
            FaceRef::Corners(face.corner_labels(rs).map(str::to_string).collect())
        } else {
            FaceRef::Index(index)
        }
    }

    /// The face index and the offset that maps written corner positions to
    /// positions in the canonical walk.
    pub fn resolve(&self, rs: &RotationSystem, fs: &FaceSet) -> Result<(usize, usize)> {
        match self {
            FaceRef::Index(i) => {
                if *i >= fs.faces.len() {
                    return Err(Error::pre(format!("no face f{i} ({} faces)", fs.faces.len())));
                }
                Ok((*i, 0))
            }
            FaceRef::Corners(labels) => {
                let corners = labels.iter().map(|l| rs.require_vertex(l)).collect::<Result<Vec<_>>>()?;
                let mut hits = fs
                    .faces
                    .iter()
                    .enumerate()
                    .filter_map(|(i, f)| cyclic_shift(&f.corners, &corners).map(|s| (i, s)));
                let first = hits.next().ok_or_else(|| Error::pre(format!("no face {self}")))?;
                if hits.next().is_some() {
                    return Err(Error::pre(format!("face {self} is ambiguous; use an index")));
                }
                Ok(first)
            }
        }
    }
}

/// Offset `s` with `a[(s + k) % n] == b[k]` for all `k`, if any.
fn cyclic_shift<T: PartialEq>(a: &[T], b: &[T]) -> Option<usize> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let n = a.len();
    (0..n).find(|&s| (0..n).all(|k| a[(s + k) % n] == b[k]))
}

impl fmt::Display for FaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceRef::Index(i) => write!(f, "f{i}"),
            FaceRef::Corners(c) => write!(f, "[{}]", c.join(",")),
        }
    }
}

impl FromStr for FaceRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let labels: Vec<String> = inner.split(',').map(|t| t.trim().to_string()).collect();
            for l in &labels {
                VertexId::new(l.clone())?;
            }
            return Ok(FaceRef::Corners(labels));
        }
        if let Some(i) = s.strip_prefix('f').and_then(|r| r.parse().ok()) {
            return Ok(FaceRef::Index(i));
        }
        Err(Error::pre(format!("bad face reference {s:?}; expected f3 or [a,b,c]")))
    }
}

/// The `k`-th edge between `a` and `b`, written `a b` or `a b#k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeRef {
    pub a: String,
    pub b: String,
    pub k: u32,
}

impl EdgeRef {
    pub fn for_edge(rs: &RotationSystem, e: EdgeId) -> EdgeRef {
        let [a, b] = rs.endpoints(e);
        EdgeRef { a: rs.label(a).to_string(), b: rs.label(b).to_string(), k: rs.multiplicity_index(e) }
    }

    pub fn resolve(&self, rs: &RotationSystem) -> Result<EdgeId> {
        rs.edge_by_ref(&self.a, &self.b, self.k)
    }

    fn parse(a: &str, b: &str) -> Result<EdgeRef> {
        VertexId::new(a)?;
        let (b, k) = split_token(b).map_err(Error::pre)?;
        Ok(EdgeRef { a: a.to_string(), b: b.to_string(), k })
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{} {}", self.a, self.b)
        } else {
            write!(f, "{} {}#{}", self.a, self.b, self.k)
        }
    }
}

/// One surgery step. Corner numbers count from 0 along the face as written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    Flip { edge: EdgeRef },
    AddFace { face: FaceRef, i: usize, j: usize },
    AddHandle { face1: FaceRef, i: usize, face2: FaceRef, j: usize },
    Delete { edge: EdgeRef },
    Subdivide { face: FaceRef, name: String },
    /// Split of `w` on its doubly incident hexagon; the new vertices default to
    /// `u` and `v`.
    Split { w: String, face: FaceRef, u: String, v: String },
    /// Contracts the edge, keeping the label of its first endpoint.
    Contract { edge: EdgeRef },
}

/// Expected change of `(v, e, f, genus)` for one step.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub v: i64,
    pub e: i64,
    pub f: i64,
    pub genus: i64,
}

impl Counts {
    pub fn of(fs: &FaceSet) -> Counts {
        Counts {
            v: fs.vertices as i64,
            e: fs.edges as i64,
            f: fs.face_count as i64,
            genus: fs.genus() as i64,
        }
    }

    fn plus(self, d: Counts) -> Counts {
        Counts { v: self.v + d.v, e: self.e + d.e, f: self.f + d.f, genus: self.genus + d.genus }
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={} e={} f={} genus={}", self.v, self.e, self.f, self.genus)
    }
}

fn face<'a>(rs: &RotationSystem, fs: &'a FaceSet, r: &FaceRef) -> Result<(&'a FaceWalk, usize)> {
    let (i, shift) = r.resolve(rs, fs)?;
    Ok((&fs.faces[i], shift))
}

fn corner(walk: &FaceWalk, shift: usize, i: usize) -> Result<usize> {
    if i >= walk.len() {
        return Err(Error::pre(format!("corner {i} out of range for a {}-sided face", walk.len())));
    }
    Ok((shift + i) % walk.len())
}

fn label(s: &str) -> Result<VertexId> {
    VertexId::new(s)
}

impl Step {
    /// Applies the step and returns the result with the delta that the
    /// operation promises.
    pub fn apply(&self, rs: &RotationSystem, fs: &FaceSet) -> Result<(RotationSystem, Counts)> {
        let d = |v, e, f, genus| Counts { v, e, f, genus };
        match self {
            Step::Flip { edge } => Ok((rs.flip_edge(edge.resolve(rs)?)?.0, d(0, 0, 0, 0))),
            Step::AddFace { face: r, i, j } => {
                let (walk, s) = face(rs, fs, r)?;
                let out = rs.add_edge_in_face(walk, corner(walk, s, *i)?, corner(walk, s, *j)?)?.0;
                Ok((out, d(0, 1, 1, 0)))
            }
            Step::AddHandle { face1, i, face2, j } => {
                let (w1, s1) = face(rs, fs, face1)?;
                let (w2, s2) = face(rs, fs, face2)?;
                let out = rs.add_edge_across_faces(w1, corner(w1, s1, *i)?, w2, corner(w2, s2, *j)?)?.0;
                Ok((out, d(0, 1, -1, 1)))
            }
            Step::Delete { edge } => {
                let e = edge.resolve(rs)?;
                let (f1, _) = fs.locate(crate::embedding::Dart::new(e, false));
                let (f2, _) = fs.locate(crate::embedding::Dart::new(e, true));
                let delta = if f1 == f2 { d(0, -1, 1, -1) } else { d(0, -1, -1, 0) };
                Ok((rs.delete_edge(e)?, delta))
            }
            Step::Subdivide { face: r, name } => {
                let (walk, _) = face(rs, fs, r)?;
                let k = walk.len() as i64;
                Ok((rs.subdivide_face(walk, label(name)?)?, d(1, k, k - 1, 0)))
            }
            Step::Split { w, face: r, u, v } => {
                let (walk, _) = face(rs, fs, r)?;
                let w = rs.require_vertex(w)?;
                Ok((rs.split_vertex(w, walk, label(u)?, label(v)?)?, d(1, 0, 1, -1)))
            }
            Step::Contract { edge } => {
                let e = edge.resolve(rs)?;
                let keep = rs.require_vertex(&edge.a)?;
                Ok((rs.contract_edge(e, keep)?, d(-1, -1, 0, 0)))
            }
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Flip { edge } => write!(f, "flip {edge}"),
            Step::AddFace { face, i, j } => write!(f, "addface {face} {i} {j}"),
            Step::AddHandle { face1, i, face2, j } => write!(f, "addhandle {face1} {i} {face2} {j}"),
            Step::Delete { edge } => write!(f, "del {edge}"),
            Step::Subdivide { face, name } => write!(f, "subdivide {face} {name}"),
            Step::Split { w, face, u, v } => {
                if u == "u" && v == "v" {
                    write!(f, "split {w} {face}")
                } else {
                    write!(f, "split {w} {face} {u} {v}")
                }
            }
            Step::Contract { edge } => write!(f, "contract {edge}"),
        }
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: Vec<&str> = s.split_whitespace().collect();
        let num = |x: &str| x.parse::<usize>().map_err(|_| Error::pre(format!("bad corner {x:?}")));
        let arity = |n: &[usize]| {
            if n.contains(&(t.len() - 1)) {
                Ok(())
            } else {
                Err(Error::pre(format!("wrong number of arguments for {:?}", t[0])))
            }
        };
        let Some(&op) = t.first() else { return Err(Error::pre("empty step")) };
        let step = match op {
            "flip" => {
                arity(&[2])?;
                Step::Flip { edge: EdgeRef::parse(t[1], t[2])? }
            }
            "addface" => {
                arity(&[3])?;
                Step::AddFace { face: t[1].parse()?, i: num(t[2])?, j: num(t[3])? }
            }
            "addhandle" => {
                arity(&[4])?;
                Step::AddHandle { face1: t[1].parse()?, i: num(t[2])?, face2: t[3].parse()?, j: num(t[4])? }
            }
            "del" => {
                arity(&[2])?;
                Step::Delete { edge: EdgeRef::parse(t[1], t[2])? }
            }
            "subdivide" => {
                arity(&[2])?;
                label(t[2])?;
                Step::Subdivide { face: t[1].parse()?, name: t[2].to_string() }
            }
            "split" => {
                arity(&[2, 4])?;
                let (u, v) = if t.len() == 5 { (t[3], t[4]) } else { ("u", "v") };
                label(t[1])?;
                label(u)?;
                label(v)?;
                Step::Split { w: t[1].to_string(), face: t[2].parse()?, u: u.to_string(), v: v.to_string() }
            }
            "contract" => {
                arity(&[2])?;
                Step::Contract { edge: EdgeRef::parse(t[1], t[2])? }
            }
            other => return Err(Error::pre(format!("unknown step {other:?}"))),
        };
        Ok(step)
    }
}

/// An ordered list of steps; the `.tsf` file format, one step per line.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TransformationScript {
    pub steps: Vec<Step>,
}

impl fmt::Display for TransformationScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for TransformationScript {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            let step = body.parse().map_err(|e: Error| match e {
                Error::Precondition(m) => Error::parse(i + 1, m),
                other => Error::parse(i + 1, other.to_string()),
            })?;
            steps.push(step);
        }
        Ok(TransformationScript { steps })
    }
}

/// State after one step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub step: usize,
    pub op: String,
    pub before: Counts,
    pub expected: Counts,
    pub traced: Counts,
}

#[derive(Clone, Debug)]
pub struct ScriptRun {
    pub embedding: RotationSystem,
    pub trail: Vec<AuditEntry>,
}

/// The first step that failed, with the embedding it was applied to.
#[derive(Clone, Debug)]
pub struct ScriptFailure {
    pub step: usize,
    pub op: String,
    pub error: Error,
    pub state: RotationSystem,
    pub trail: Vec<AuditEntry>,
}

impl fmt::Display for ScriptFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({}): {}", self.step + 1, self.op, self.error)
    }
}

impl std::error::Error for ScriptFailure {}

/// Runs every step, checking after each one that the traced counts agree
/// with the counts predicted by the operation.
pub fn run_script(rs: &RotationSystem, script: &TransformationScript) -> Result<ScriptRun, Box<ScriptFailure>> {
    let mut cur = rs.clone();
    let mut fs = cur.trace_faces();
    let mut trail = Vec::with_capacity(script.steps.len());
    for (i, step) in script.steps.iter().enumerate() {
        let fail = |error: Error, state: &RotationSystem, trail: &Vec<AuditEntry>| {
            Box::new(ScriptFailure { step: i, op: step.to_string(), error, state: state.clone(), trail: trail.clone() })
        };
        let before = Counts::of(&fs);
        let (next, delta) = step.apply(&cur, &fs).map_err(|e| fail(e, &cur, &trail))?;
        let next_fs = next.trace_faces();
        let entry = AuditEntry {
            step: i,
            op: step.to_string(),
            before,
            expected: before.plus(delta),
            traced: Counts::of(&next_fs),
        };
        if entry.expected != entry.traced {
            let msg = format!("expected {} but traced {}", entry.expected, entry.traced);
            trail.push(entry);
            return Err(fail(Error::Internal(msg), &cur, &trail));
        }
        trail.push(entry);
        cur = next;
        fs = next_fs;
    }
    Ok(ScriptRun { embedding: cur, trail })
}

#[cfg(test)]
mod tests {
    use super::*;

    const K4: &str = "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0";

    #[test]
    fn step_text_round_trip() {
        let text = "flip a b\nflip a b#2\naddface [2,y,x] 0 2\naddhandle f3 1 f7 0\ndel 4 5#2\n\
                    subdivide f0 w\nsplit 10 [10,1,2,10,3,4]\nsplit 10 f2 p q\ncontract a b\n";
        let script: TransformationScript = text.parse().unwrap();
        assert_eq!(script.steps.len(), 9);
        assert_eq!(script.to_string(), text);
        assert!("twist a b".parse::<TransformationScript>().is_err());
        let err = "flip a b\naddface f1 0".parse::<TransformationScript>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn empty_script_is_identity() {
        let rs: RotationSystem = K4.parse().unwrap();
        let run = run_script(&rs, &TransformationScript::default()).unwrap();
        assert_eq!(run.embedding, rs);
        assert!(run.trail.is_empty());
    }

    #[test]
    fn double_flip_is_identity() {
        let rs: RotationSystem = K4.parse().unwrap();
        let (once, new) = rs.flip_edge(rs.edge_by_ref("0", "1", 1).unwrap()).unwrap();
        let back = EdgeRef::for_edge(&once, new);
        let script = TransformationScript {
            steps: vec![Step::Flip { edge: EdgeRef { a: "0".into(), b: "1".into(), k: 1 } }, Step::Flip { edge: back }],
        };
        let run = run_script(&rs, &script).unwrap();
        assert_eq!(run.embedding.to_string(), rs.to_string());
        assert_eq!(run.trail.len(), 2);
    }

    #[test]
    fn failure_reports_step_and_state() {
        let rs: RotationSystem = K4.parse().unwrap();
        let script: TransformationScript = "subdivide f0 9\ndel 0 7".parse().unwrap();
        let err = run_script(&rs, &script).unwrap_err();
        assert_eq!(err.step, 1);
        assert_eq!(err.state.vertex_count(), 5);
        assert_eq!(err.trail.len(), 1);
    }

    #[test]
    fn face_refs_resolve_by_corners() {
        let rs: RotationSystem = K4.parse().unwrap();
        let fs = rs.trace_faces();
        for i in 0..fs.faces.len() {
            let r = FaceRef::for_face(&rs, &fs, i);
            assert!(matches!(r, FaceRef::Corners(_)));
            let (j, _) = r.resolve(&rs, &fs).unwrap();
            assert_eq!(i, j);
        }
        // a triangle of a planar K4 is a face in exactly one orientation
        let found = ["[0,1,2]", "[0,2,1]"]
            .iter()
            .filter(|t| t.parse::<FaceRef>().unwrap().resolve(&rs, &fs).is_ok())
            .count();
        assert_eq!(found, 1);
        assert!("f9".parse::<FaceRef>().unwrap().resolve(&rs, &fs).is_err());
    }
}
