use std::collections::HashSet;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::script::{EdgeRef, FaceRef, Step, TransformationScript};
use crate::embedding::{FaceSet, FaceWalk, RotationSystem, Vertex};
use crate::error::{Error, Result};

/// Surgery steps tried when no budget is given.
pub const DEFAULT_BUDGET: u64 = 300_000;

/// True when exactly one face is nontriangular, it has six sides, and some
/// vertex occurs on it twice.
pub fn c9_target_check(rs: &RotationSystem) -> bool {
    target_face(rs, &rs.trace_faces()).is_some()
}

/// Index of the target hexagon and its repeated vertex.
pub fn target_face(rs: &RotationSystem, fs: &FaceSet) -> Option<(usize, Vertex)> {
    let mut non = fs.nontriangular();
    let (i, f) = non.next()?;
    if non.next().is_some() || f.len() != 6 {
        return None;
    }
    let w = rs.vertices().find(|&v| f.incidences(v) == 2)?;
    Some((i, w))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionStatus {
    Found,
    Exhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct Completion {
    pub status: CompletionStatus,
    /// Embeddings produced by a surgery step during the search.
    pub explored: u64,
    /// Pairs of disks whose replacement was attempted.
    pub patches: u64,
    pub script: TransformationScript,
    #[serde(skip)]
    pub embedding: Option<RotationSystem>,
}

/// Largest number of faces in a single opened disk.
pub const MAX_DISK_FACES: usize = 9;

/// Largest total number of faces in a pair of opened disks.
pub const MAX_PAIR_FACES: usize = 7;

/// Faces whose dual graph is a tree; deleting the shared edges merges them
/// into one face without changing the genus.
struct Disk {
    faces: Vec<usize>,
    inner: Vec<(Vertex, Vertex)>,
    verts: Vec<bool>,
}

fn corners(t: &FaceWalk) -> [Vertex; 3] {
    let mut c = [t.corners[0], t.corners[1], t.corners[2]];
    c.sort_unstable();
    c
}

fn pair(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    (a.min(b), a.max(b))
}

fn dual(rs: &RotationSystem, fs: &FaceSet) -> Vec<Vec<(usize, (Vertex, Vertex))>> {
    fs.faces
        .iter()
        .map(|f| {
            f.darts
                .iter()
                .map(|&d| (fs.locate(d.reverse()).0, pair(rs.tail(d), rs.head(d))))
                .collect()
        })
        .collect()
}

/// Grows dual trees from `roots` up to `max` faces. `need(set)` is a lower
/// bound on the faces still to add, used to cut growth short.
fn grow_disks(
    rs: &RotationSystem,
    fs: &FaceSet,
    roots: &[usize],
    max: usize,
    need: &dyn Fn(&[usize]) -> usize,
) -> Vec<Disk> {
    let nb = dual(rs, fs);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut raw = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn grow(
        set: &mut Vec<usize>,
        inner: &mut Vec<(Vertex, Vertex)>,
        max: usize,
        nb: &[Vec<(usize, (Vertex, Vertex))>],
        need: &dyn Fn(&[usize]) -> usize,
        seen: &mut HashSet<Vec<usize>>,
        out: &mut Vec<(Vec<usize>, Vec<(Vertex, Vertex)>)>,
    ) {
        let mut key = set.clone();
        key.sort_unstable();
        if !seen.insert(key.clone()) {
            return;
        }
        let missing = need(set);
        if missing == 0 {
            out.push((key, inner.clone()));
        }
        if set.len() + missing.max(1) > max {
            return;
        }
        let mut next: Vec<(usize, (Vertex, Vertex))> = Vec::new();
        for &f in set.iter() {
            for &(g, e) in &nb[f] {
                if set.contains(&g) || next.iter().any(|&(h, _)| h == g) {
                    continue;
                }
                if nb[g].iter().filter(|(h, _)| set.contains(h)).count() == 1 {
                    next.push((g, e));
                }
            }
        }
        for (g, e) in next {
            set.push(g);
            inner.push(e);
            grow(set, inner, max, nb, need, seen, out);
            inner.pop();
            set.pop();
        }
    }
    for &f in roots {
        grow(&mut vec![f], &mut Vec::new(), max, &nb, need, &mut seen, &mut raw);
    }
    raw.into_iter()
        .map(|(faces, inner)| {
            let mut verts = vec![false; rs.vertex_count()];
            for &f in &faces {
                for &c in &fs.faces[f].corners {
                    verts[c.idx()] = true;
                }
            }
            Disk { faces, inner, verts }
        })
        .collect()
}

fn disks(rs: &RotationSystem, fs: &FaceSet, max: usize) -> Vec<Disk> {
    let all: Vec<usize> = (0..fs.faces.len()).collect();
    grow_disks(rs, fs, &all, max, &|_| 0)
}

/// Disks of up to `max` faces with every special vertex on them.
fn special_disks(rs: &RotationSystem, fs: &FaceSet, sp: &[Vertex; 3], max: usize) -> Vec<Disk> {
    let nb = dual(rs, fs);
    let dist: Vec<Vec<usize>> = sp
        .iter()
        .map(|&s| {
            let mut d = vec![usize::MAX; fs.faces.len()];
            let mut queue = std::collections::VecDeque::new();
            for (i, f) in fs.faces.iter().enumerate() {
                if f.corners.contains(&s) {
                    d[i] = 0;
                    queue.push_back(i);
                }
            }
            while let Some(f) = queue.pop_front() {
                for &(g, _) in &nb[f] {
                    if d[g] == usize::MAX {
                        d[g] = d[f] + 1;
                        queue.push_back(g);
                    }
                }
            }
            d
        })
        .collect();
    let roots: Vec<usize> = (0..fs.faces.len()).filter(|&f| dist[0][f] == 0).collect();
    let need = |set: &[usize]| -> usize {
        dist.iter().map(|d| set.iter().map(|&f| d[f]).min().unwrap_or(usize::MAX)).max().unwrap_or(0)
    };
    grow_disks(rs, fs, &roots, max, &need)
}

/// One placement of a required edge: a diagonal of face `f`, or, when `g`
/// is set, the handle from corner `i` of `f` to corner `j` of `g`.
#[derive(Copy, Clone)]
struct Move {
    f: usize,
    i: usize,
    g: Option<usize>,
    j: usize,
}

struct Search {
    budget: u64,
    /// Corners of the triangles left alone, which never take the handle.
    kept: HashSet<[Vertex; 3]>,
    out: Completion,
    found: Option<(Vec<Step>, RotationSystem)>,
}

impl Search {
    fn spend(&mut self) -> bool {
        if self.out.explored >= self.budget {
            return false;
        }
        self.out.explored += 1;
        true
    }

    /// Puts the required edges back, one of them as the handle, so that
    /// only one hexagon with a repeated vertex is left over.
    fn fill(&mut self, rs: &RotationSystem, fs: &FaceSet, need: &[(Vertex, Vertex)], handle: bool, steps: &mut Vec<Step>) -> bool {
        if need.is_empty() {
            if handle && target_face(rs, fs).is_some() && rs.is_complete() {
                self.found = Some((steps.clone(), rs.clone()));
                return true;
            }
            return false;
        }
        let open: Vec<usize> = fs.nontriangular().map(|(f, _)| f).collect();
        let mut ends = open.clone();
        if !handle {
            ends.extend((0..fs.faces.len()).filter(|&f| fs.faces[f].is_triangle() && !self.kept.contains(&corners(&fs.faces[f]))));
        }
        let mut usable = vec![false; fs.faces.len()];
        let mut best: Option<(usize, Vec<Move>)> = None;
        for (k, &e) in need.iter().enumerate() {
            let mut opts = Vec::new();
            for &f in &open {
                let w = &fs.faces[f];
                let n = w.len();
                for i in 0..n {
                    for j in i + 2..n {
                        if (i == 0 && j == n - 1) || pair(w.corners[i], w.corners[j]) != e {
                            continue;
                        }
                        opts.push(Move { f, i, g: None, j });
                        usable[f] = true;
                    }
                }
            }
            for &f in ends.iter().filter(|_| !handle) {
                let w = &fs.faces[f];
                let n = w.len();
                for &g in ends.iter().filter(|&&g| g > f) {
                    let u = &fs.faces[g];
                    for i in 0..n {
                        for j in 0..u.len() {
                            if pair(w.corners[i], u.corners[j]) == e {
                                opts.push(Move { f, i, g: Some(g), j });
                                usable[f] = true;
                                usable[g] = true;
                            }
                        }
                    }
                }
            }
            if opts.is_empty() {
                return false;
            }
            if best.as_ref().is_none_or(|(_, o)| opts.len() < o.len()) {
                best = Some((k, opts));
            }
        }
        // faces that no remaining edge can enter are final
        let mut hexagons = 0;
        for &f in &open {
            let w = &fs.faces[f];
            if usable[f] {
                continue;
            }
            if w.len() != 6 || !w.corners.iter().any(|&v| w.incidences(v) == 2) {
                return false;
            }
            hexagons += 1;
        }
        if hexagons > 1 {
            return false;
        }
        let (k, opts) = best.expect("need is nonempty");
        let rest: Vec<(Vertex, Vertex)> = need.iter().enumerate().filter(|&(x, _)| x != k).map(|(_, &e)| e).collect();
        for m in opts {
            if !self.spend() {
                return false;
            }
            let (next, step) = match m.g {
                None => {
                    let Ok((next, _)) = rs.add_edge_in_face(&fs.faces[m.f], m.i, m.j) else { continue };
                    (next, Step::AddFace { face: FaceRef::for_face(rs, fs, m.f), i: m.i, j: m.j })
                }
                Some(g) => {
                    let Ok((next, _)) = rs.add_edge_across_faces(&fs.faces[m.f], m.i, &fs.faces[g], m.j) else { continue };
                    let step = Step::AddHandle {
                        face1: FaceRef::for_face(rs, fs, m.f),
                        i: m.i,
                        face2: FaceRef::for_face(rs, fs, g),
                        j: m.j,
                    };
                    (next, step)
                }
            };
            steps.push(step);
            let nfs = next.trace_faces();
            if self.fill(&next, &nfs, &rest, handle || m.g.is_some(), steps) {
                return true;
            }
            steps.pop();
        }
        false
    }

    fn patch(&mut self, start: &RotationSystem, disks: &[&Disk], k3: &[(Vertex, Vertex)]) -> Result<bool> {
        self.out.patches += 1;
        let mut rs = start.clone();
        let mut steps = Vec::new();
        for &(a, b) in disks.iter().flat_map(|d| &d.inner) {
            let edge = EdgeRef { a: start.label(a).to_string(), b: start.label(b).to_string(), k: 1 };
            rs = rs.delete_edge(edge.resolve(&rs)?)?;
            steps.push(Step::Delete { edge });
        }
        let mut need: Vec<(Vertex, Vertex)> = disks.iter().flat_map(|d| &d.inner).chain(k3).copied().collect();
        need.sort_unstable();
        let sfs = start.trace_faces();
        self.kept = (0..sfs.faces.len())
            .filter(|f| disks.iter().all(|d| !d.faces.contains(f)))
            .map(|f| corners(&sfs.faces[f]))
            .collect();
        let fs = rs.trace_faces();
        Ok(self.fill(&rs, &fs, &need, false, &mut steps))
    }
}

/// Whether every required edge has both ends on the opened region, which is
/// one disk or two disks that the handle will join.
fn viable(disks: &[&Disk], k3: &[(Vertex, Vertex)]) -> bool {
    if disks.len() == 2 && disks[0].faces.iter().any(|f| disks[1].faces.contains(f)) {
        return false;
    }
    let on = |v: Vertex| disks.iter().any(|d| d.verts[v.idx()]);
    let mut cross = disks.len() == 1;
    for &(a, b) in disks.iter().flat_map(|d| &d.inner).chain(k3) {
        if !on(a) || !on(b) {
            return false;
        }
        if disks.len() == 2 {
            let (a, b) = (a.idx(), b.idx());
            cross |= (disks[0].verts[a] && disks[1].verts[b]) || (disks[0].verts[b] && disks[1].verts[a]);
        }
    }
    cross
}

/// Disk choices to try, fewest faces first: single disks holding all three
/// special vertices, and face-disjoint pairs of at most [`MAX_PAIR_FACES`]
/// faces in total where at least one disk holds a special vertex.
fn candidates(
    all: &[Disk],
    singles: std::ops::Range<usize>,
    paired: std::ops::Range<usize>,
    k3: &[(Vertex, Vertex)],
    seed: u64,
) -> Vec<(usize, Vec<u8>, Vec<usize>)> {
    let tie = |ids: &[usize]| -> Vec<u8> {
        let faces = ids.iter().flat_map(|&i| all[i].faces.iter().chain([&usize::MAX]));
        if seed == 0 {
            return faces.flat_map(|f| f.to_be_bytes()).collect();
        }
        let mut h = Sha256::new();
        h.update(seed.to_le_bytes());
        for f in faces {
            h.update(f.to_le_bytes());
        }
        h.finalize().to_vec()
    };
    let size = |ids: &[usize]| ids.iter().map(|&i| all[i].faces.len()).sum::<usize>();
    let mut out = Vec::new();
    for i in singles {
        if viable(&[&all[i]], k3) {
            out.push((size(&[i]), tie(&[i]), vec![i]));
        }
    }
    // each disk of a pair holds a special vertex, or the other disk would
    // already work alone
    let mask = |d: &Disk| k3.iter().flat_map(|&(a, b)| [a, b]).filter(|v| d.verts[v.idx()]).count();
    let holding: Vec<usize> = paired.filter(|&i| mask(&all[i]) > 0).collect();
    for (x, &i) in holding.iter().enumerate() {
        for &j in &holding[x + 1..] {
            if all[i].faces.len() + all[j].faces.len() <= MAX_PAIR_FACES && viable(&[&all[i], &all[j]], k3) {
                out.push((size(&[i, j]), tie(&[i, j]), vec![i, j]));
            }
        }
    }
    out.sort();
    out
}

fn check_input(rs: &RotationSystem, specials: &[&str; 3]) -> Result<[Vertex; 3]> {
    let s = [
        rs.require_vertex(specials[0])?,
        rs.require_vertex(specials[1])?,
        rs.require_vertex(specials[2])?,
    ];
    if s[0] == s[1] || s[0] == s[2] || s[1] == s[2] {
        return Err(Error::pre("special vertices must be distinct"));
    }
    if !rs.is_simple() {
        return Err(Error::pre("graph has parallel edges or loops"));
    }
    for (p, q) in [(0, 1), (0, 2), (1, 2)] {
        if rs.is_adjacent(s[p], s[q]) {
            return Err(Error::pre(format!(
                "special vertices {} and {} are adjacent",
                specials[p], specials[q]
            )));
        }
    }
    if !rs.trace_faces().is_triangular() {
        return Err(Error::pre("embedding is not triangular"));
    }
    for v in rs.vertices() {
        for w in rs.vertices() {
            let special = s.contains(&v) && s.contains(&w);
            if v < w && !special && !rs.is_adjacent(v, w) {
                return Err(Error::pre(format!(
                    "{} and {} are not adjacent",
                    rs.label(v),
                    rs.label(w)
                )));
            }
        }
    }
    Ok(s)
}

/// Searches for surgery that turns a triangular embedding of a complete
/// graph minus the triangle on `specials` into an embedding of the complete
/// graph passing [`c9_target_check`], one genus higher.
///
/// Each candidate opens one disk of faces (up to [`MAX_DISK_FACES`]) or two
/// disjoint disks by deleting the edges inside them. The deleted edges and
/// the missing triangle are then put back, exactly one of them as a handle
/// between two different faces and the rest as diagonals. Candidates are
/// tried by size, then by face indices (or by a hash salted with a nonzero
/// `seed`). `budget` bounds the number of surgery steps tried.
pub fn find_hexagon_completion(
    rs: &RotationSystem,
    specials: &[&str; 3],
    budget: u64,
    seed: u64,
) -> Result<Completion> {
    let sp = check_input(rs, specials)?;
    let fs = rs.trace_faces();
    let k3 = vec![pair(sp[0], sp[1]), pair(sp[0], sp[2]), pair(sp[1], sp[2])];
    let mut all = special_disks(rs, &fs, &sp, MAX_DISK_FACES);
    let split = all.len();
    all.extend(disks(rs, &fs, MAX_PAIR_FACES - 1));
    let order = candidates(&all, 0..split, split..all.len(), &k3, seed);
    let mut search = Search {
        budget,
        out: Completion {
            status: CompletionStatus::Exhausted,
            explored: 0,
            patches: 0,
            script: TransformationScript::default(),
            embedding: None,
        },
        found: None,
        kept: HashSet::new(),
    };
    for (_, _, ids) in order {
        if search.out.explored >= budget {
            break;
        }
        let chosen: Vec<&Disk> = ids.iter().map(|&i| &all[i]).collect();
        if search.patch(rs, &chosen, &k3)? {
            break;
        }
    }
    let mut out = search.out;
    if let Some((steps, emb)) = search.found {
        out.status = CompletionStatus::Found;
        out.script = TransformationScript { steps };
        out.embedding = Some(emb);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_check_cases() {
        let k4: RotationSystem = "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap();
        assert!(!c9_target_check(&k4));
        // a hexagon [w,a,b,w,c,d] appears when a vertex is glued from two triangles
        let rs: RotationSystem = "w: a b c d\na: b w\nb: w a\nc: d w\nd: w c".parse().unwrap();
        let fs = rs.trace_faces();
        assert_eq!(fs.face_vector(), vec![3, 3, 6]);
        assert!(c9_target_check(&rs));
    }

    #[test]
    fn adjacent_specials_are_rejected() {
        let k4: RotationSystem = "0: 1 2 3\n1: 3 2 0\n2: 1 3 0\n3: 2 1 0".parse().unwrap();
        let err = find_hexagon_completion(&k4, &["0", "1", "2"], 10, 0).unwrap_err();
        assert!(err.to_string().contains("adjacent"));
    }

    fn z19() -> RotationSystem {
        use crate::current::{attach_vortices, derive, parse_log};
        let log = parse_log("m=19\ncircuit 0: 15 x 4 11 5 y 14 6 16 18 z 1 17 10 13 8 12 2 3 9 7").unwrap();
        attach_vortices(&derive(&log).unwrap(), &log).unwrap()
    }

    #[test]
    fn zero_budget_explores_nothing() {
        let out = find_hexagon_completion(&z19(), &["x", "y", "z"], 0, 0).unwrap();
        assert_eq!(out.status, CompletionStatus::Exhausted);
        assert_eq!(out.explored, 0);
        assert!(out.embedding.is_none());
    }

    #[test]
    fn runs_are_reproducible() {
        let rs = z19();
        for seed in [0, 7] {
            let a = find_hexagon_completion(&rs, &["x", "y", "z"], 3000, seed).unwrap();
            let b = find_hexagon_completion(&rs, &["x", "y", "z"], 3000, seed).unwrap();
            assert_eq!((a.explored, a.patches, a.status), (b.explored, b.patches, b.status));
            assert_eq!(a.script, b.script);
        }
    }
}
