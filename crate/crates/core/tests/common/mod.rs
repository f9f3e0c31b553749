#![allow(dead_code)]

use std::collections::HashMap;

use prismatic::current::{derive, parse_log};
use prismatic::pipeline::{run_script, Counts, EdgeRef, FaceRef, Step, TransformationScript};
use prismatic::prism::{build_prism, check_snug, is_patchwork, parse_cover, slice, FacialCover};
use prismatic::search::{search_patchworks, SearchSpec, Shape};
use prismatic::{EdgeId, RotationSystem, Vertex, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const Z19_LOG: &str = "m=19\ncircuit 0: 15 x 4 11 5 y 14 6 16 18 z 1 17 10 13 8 12 2 3 9 7";

pub fn k7_torus() -> RotationSystem {
    derive(&parse_log("m=7\ncircuit 0: 1 3 2 6 4 5").unwrap()).unwrap()
}

/// `K_n` on labels `0..n` with every rotation shuffled.
pub fn random_complete<R: Rng>(n: usize, rng: &mut R) -> RotationSystem {
    let mut text = String::new();
    for v in 0..n {
        let mut nb: Vec<usize> = (0..n).filter(|&w| w != v).collect();
        nb.shuffle(rng);
        let nb: Vec<String> = nb.iter().map(|w| w.to_string()).collect();
        text.push_str(&format!("{v}: {}\n", nb.join(" ")));
    }
    text.parse().unwrap()
}

/// Same embedding with labels permuted.
pub fn relabel<R: Rng>(rs: &RotationSystem, rng: &mut R) -> RotationSystem {
    relabel_with_map(rs, rng).0
}

/// Permutes labels; the map sends old labels to new ones.
pub fn relabel_with_map<R: Rng>(rs: &RotationSystem, rng: &mut R) -> (RotationSystem, HashMap<String, String>) {
    let mut labels: Vec<String> = rs.vertices().map(|v| rs.label(v).to_string()).collect();
    labels.shuffle(rng);
    let mut text = String::new();
    for v in rs.vertices() {
        let nb: Vec<&str> = rs
            .rotation(v)
            .iter()
            .map(|&d| labels[rs.head(d).idx()].as_str())
            .collect();
        text.push_str(&format!("{}: {}\n", labels[v.idx()], nb.join(" ")));
    }
    let map = rs.vertices().map(|v| (rs.label(v).to_string(), labels[v.idx()].clone())).collect();
    (text.parse().unwrap(), map)
}

/// An embedding and the face corner sequences of a patchwork in it.
#[derive(Clone)]
pub struct Patched {
    pub name: String,
    pub embedding: RotationSystem,
    pub cover: String,
}

impl Patched {
    pub fn cover(&self, rs: &RotationSystem) -> FacialCover {
        parse_cover(rs, &rs.trace_faces(), &self.cover).unwrap()
    }
}

/// Small embeddings of complete graphs with known patchworks.
pub fn patched_sources() -> Vec<Patched> {
    let mut out = Vec::new();
    let k3: RotationSystem = "a: b c\nb: c a\nc: a b".parse().unwrap();
    out.push(Patched { name: "K3".into(), embedding: k3, cover: "a b c\n".into() });
    let k7 = k7_torus();
    for v in k7.vertices() {
        let k6 = k7.delete_vertex(v).unwrap();
        let fs = k6.trace_faces();
        let (_, hex) = fs.nontriangular().next().unwrap();
        let cover = hex.corner_labels(&k6).collect::<Vec<_>>().join(" ");
        out.push(Patched { name: format!("K7-{}", k7.label(v)), embedding: k6, cover });
    }
    for (n, g, shapes) in [
        (6, 1, vec![Shape::Patchwork(vec![6]), Shape::Patchwork(vec![3, 3])]),
        (8, 2, vec![Shape::Patchwork(vec![4, 4])]),
    ] {
        let mut spec = SearchSpec::new(n, g, shapes);
        spec.max_findings = 4;
        for f in search_patchworks(&spec).unwrap().findings {
            out.push(Patched {
                name: format!("K{n} genus {g} task {}", f.task),
                embedding: f.embedding.parse().unwrap(),
                cover: f.cover,
            });
        }
    }
    out
}

/// A random step that can be applied to `rs`, if one was found.
pub fn random_step<R: Rng>(rs: &RotationSystem, rng: &mut R, fresh: &mut usize) -> Option<Step> {
    let fs = rs.trace_faces();
    let nf = fs.faces.len();
    let f = rng.gen_range(0..nf);
    let walk = &fs.faces[f];
    let e = EdgeId(rng.gen_range(0..rs.edge_count()) as u32);
    let step = match rng.gen_range(0..7) {
        0 => Step::Flip { edge: EdgeRef::for_edge(rs, e) },
        1 if walk.len() >= 2 => {
            let i = rng.gen_range(0..walk.len());
            let j = (i + rng.gen_range(1..walk.len())) % walk.len();
            Step::AddFace { face: FaceRef::for_face(rs, &fs, f), i, j }
        }
        2 if nf >= 2 => {
            let g = (f + rng.gen_range(1..nf)) % nf;
            Step::AddHandle {
                face1: FaceRef::for_face(rs, &fs, f),
                i: rng.gen_range(0..walk.len()),
                face2: FaceRef::for_face(rs, &fs, g),
                j: rng.gen_range(0..fs.faces[g].len()),
            }
        }
        3 if rs.edge_count() > rs.vertex_count() => Step::Delete { edge: EdgeRef::for_edge(rs, e) },
        4 if rs.vertex_count() < 12 => {
            *fresh += 1;
            Step::Subdivide { face: FaceRef::for_face(rs, &fs, f), name: format!("s{fresh}") }
        }
        5 if rs.vertex_count() > 3 => Step::Contract { edge: EdgeRef::for_edge(rs, e) },
        _ => return None,
    };
    Some(step)
}

/// Runs `sequences` random surgery sequences of eight steps on small
/// complete graphs, checking an incremental count ledger against tracing
/// after every step and replaying each sequence as a script. Returns the
/// number of steps applied.
pub fn ledger_sequences(seed: u64, sequences: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fresh = 0;
    let mut applied = 0;
    for _ in 0..sequences {
        let n = rng.gen_range(3..7);
        let start = random_complete(n, &mut rng);
        let mut rs = start.clone();
        let mut ledger = Counts::of(&rs.trace_faces());
        let mut steps = Vec::new();
        while steps.len() < 8 {
            let Some(step) = random_step(&rs, &mut rng, &mut fresh) else { continue };
            let fs = rs.trace_faces();
            // operations refuse some inputs (disconnecting deletions, loops)
            let Ok((next, delta)) = step.apply(&rs, &fs) else { continue };
            ledger = Counts {
                v: ledger.v + delta.v,
                e: ledger.e + delta.e,
                f: ledger.f + delta.f,
                genus: ledger.genus + delta.genus,
            };
            assert_eq!(ledger, Counts::of(&next.trace_faces()), "after {step}");
            steps.push(step);
            rs = next;
            applied += 1;
        }
        let script = TransformationScript { steps };
        let text = script.to_string();
        let reparsed: TransformationScript = text.parse().unwrap();
        let run = run_script(&start, &reparsed).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(run.embedding.to_emb(), rs.to_emb());
        assert!(run.trail.iter().all(|a| a.expected == a.traced));
    }
    applied
}

/// Builds the prism of a relabelled (and maybe mirrored) copy of `src`,
/// checks it is snug, slices it, and rebuilds from side 0.
pub fn slice_round_trip_case<R: Rng>(src: &Patched, rng: &mut R) {
    let (mut rs, map) = relabel_with_map(&src.embedding, rng);
    let text: String = src
        .cover
        .lines()
        .map(|l| l.split_whitespace().map(|t| map[t].as_str()).collect::<Vec<_>>().join(" ") + "\n")
        .collect();
    let fs = rs.trace_faces();
    let mut faces = parse_cover(&rs, &fs, &text).unwrap().faces;
    if rng.gen_bool(0.5) {
        rs = rs.mirror();
        let mfs = rs.trace_faces();
        faces = faces.iter().map(|&f| mfs.locate(fs.faces[f].darts[0].reverse()).0).collect();
    }
    let fs = rs.trace_faces();
    let cover = FacialCover::new(faces);
    assert!(is_patchwork(&rs, &fs, &cover).ok, "{}", src.name);
    let prism = build_prism(&rs, &cover).unwrap();
    let report = check_snug(&prism).unwrap();
    assert!(report.snug, "{}: {:?}", src.name, report.witnesses);
    let [side0, side1] = slice(&prism).unwrap();
    for side in [&side0, &side1] {
        assert!(is_patchwork(&side.embedding, &side.faces, &side.patchwork).ok);
        assert_eq!(side.embedding.vertex_count(), rs.vertex_count());
    }
    let rebuilt = build_prism(&side0.embedding, &side0.patchwork).unwrap();
    assert_eq!(rebuilt.trace_faces().genus(), report.genus, "{}", src.name);
    assert!(check_snug(&rebuilt).unwrap().snug);
}

pub fn id(s: &str) -> VertexId {
    VertexId::new(s).unwrap()
}

/// Genus-2 embeddings of `K_8` with a patchwork of two quadrilaterals.
pub fn k8_findings(limit: usize) -> Vec<(RotationSystem, String)> {
    let mut spec = SearchSpec::new(8, 2, vec![Shape::Patchwork(vec![4, 4])]);
    spec.max_findings = limit;
    let out = search_patchworks(&spec).unwrap();
    assert!(out.findings_count > 0);
    out.findings.into_iter().map(|f| (f.embedding.parse().unwrap(), f.cover)).collect()
}

/// Puts `u` and `v` into the two patchwork faces: a triangular split-complete
/// embedding.
pub fn split_complete(rs: &RotationSystem, cover: &str) -> RotationSystem {
    let lines: Vec<&str> = cover.lines().collect();
    let fs = rs.trace_faces();
    let f = parse_cover(rs, &fs, lines[0]).unwrap().faces[0];
    let rs = rs.subdivide_face(&fs.faces[f], id("u")).unwrap();
    let fs = rs.trace_faces();
    let f = parse_cover(&rs, &fs, lines[1]).unwrap().faces[0];
    rs.subdivide_face(&fs.faces[f], id("v")).unwrap()
}

/// Inserts the edge `(u, v)` between a face at `u` and a face at `v`, then
/// contracts it.
pub fn join_uv<R: Rng>(rs: &RotationSystem, rng: &mut R) -> RotationSystem {
    let fs = rs.trace_faces();
    let (u, v) = (rs.vertex("u").unwrap(), rs.vertex("v").unwrap());
    let at = |w: Vertex| -> Vec<(usize, usize)> {
        fs.faces
            .iter()
            .enumerate()
            .flat_map(|(f, walk)| walk.corners.iter().enumerate().filter(move |(_, &c)| c == w).map(move |(i, _)| (f, i)))
            .collect()
    };
    let (fu, fv) = (at(u), at(v));
    let (f1, i) = fu[rng.gen_range(0..fu.len())];
    let (f2, j) = fv[rng.gen_range(0..fv.len())];
    let (joined, e) = rs.add_edge_across_faces(&fs.faces[f1], i, &fs.faces[f2], j).unwrap();
    assert_eq!(joined.trace_faces().genus(), fs.genus() + 1);
    joined.contract_edge(e, joined.vertex("u").unwrap()).unwrap()
}

pub fn split_hexagon(rs: &RotationSystem) -> RotationSystem {
    let fs = rs.trace_faces();
    let (_, hex) = fs.nontriangular().next().unwrap();
    let w = *hex.corners.iter().find(|&&c| hex.incidences(c) == 2).unwrap();
    let renamed = rs.relabel(w, id("w")).unwrap();
    let fs = renamed.trace_faces();
    let (_, hex) = fs.nontriangular().next().unwrap();
    renamed.split_vertex(renamed.vertex("w").unwrap(), hex, id("u"), id("v")).unwrap()
}
