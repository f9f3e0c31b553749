use std::collections::HashMap;

use super::{CircuitLog, LogEntry};
use crate::embedding::{Dart, EdgeId, RotationSystem, Vertex, VertexId};
use crate::error::{Error, Result};

/// Builds the derived embedding on the vertex set `Z_m`: the rotation at `v`
/// is the log of circuit `v mod j` with `v` added to every current. Vortex
/// letters are skipped.
pub fn derive(log: &CircuitLog) -> Result<RotationSystem> {
    let m = log.modulus();
    let j = log.index();
    if j as u32 > m {
        return Err(Error::Current(format!("index {j} exceeds modulus {m}")));
    }
    let currents: Vec<Vec<u32>> = (0..j).map(|i| log.currents(i).collect()).collect();
    let mut position: Vec<HashMap<u32, usize>> = Vec::with_capacity(j);
    for (i, c) in currents.iter().enumerate() {
        let mut map = HashMap::new();
        for (p, &x) in c.iter().enumerate() {
            if map.insert(x, p).is_some() {
                return Err(Error::Current(format!("current {x} repeated in circuit {i}")));
            }
        }
        position.push(map);
    }
    let labels = (0..m)
        .map(|v| VertexId::new(v.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let mut slots: Vec<Vec<Option<Dart>>> =
        (0..m as usize).map(|v| vec![None; currents[v % j].len()]).collect();
    let mut ends = Vec::new();
    for v in 0..m as usize {
        for p in 0..slots[v].len() {
            if slots[v][p].is_some() {
                continue;
            }
            let c = currents[v % j][p];
            let w = (v + c as usize) % m as usize;
            let back = (m - c) % m;
            let q = *position[w % j].get(&back).ok_or_else(|| {
                Error::Current(format!(
                    "arc {v}->{w} with current {c} has no partner: {back} missing from circuit {}",
                    w % j
                ))
            })?;
            let e = EdgeId(ends.len() as u32);
            ends.push([Vertex(v as u32), Vertex(w as u32)]);
            slots[v][p] = Some(Dart::new(e, false));
            slots[w][q] = Some(Dart::new(e, true));
        }
    }
    let rotations = slots
        .into_iter()
        .map(|s| s.into_iter().map(|d| d.expect("every slot paired")).collect())
        .collect();
    RotationSystem::from_parts(labels, ends, rotations)
}

/// Where a vortex letter sits in the log: circuit `i`, between currents
/// `before` and `after`.
struct LetterSite {
    letter: char,
    circuit: usize,
    before: u32,
    after: u32,
}

fn letter_sites(log: &CircuitLog) -> Result<Vec<LetterSite>> {
    let mut out = Vec::new();
    for (i, c) in log.circuits().iter().enumerate() {
        let n = c.len();
        for (p, e) in c.iter().enumerate() {
            let LogEntry::Vortex(letter) = *e else { continue };
            let find = |step: isize| {
                (1..n).find_map(|k| match c[((p as isize + step * k as isize).rem_euclid(n as isize)) as usize] {
                    LogEntry::Current(x) => Some(x),
                    LogEntry::Vortex(_) => None,
                })
            };
            let (Some(before), Some(after)) = (find(-1), find(1)) else {
                return Err(Error::Current(format!("circuit {i} has no currents around {letter}")));
            };
            out.push(LetterSite { letter, circuit: i, before, after });
        }
    }
    Ok(out)
}

/// Subdivides the Hamiltonian face belonging to each vortex letter with a
/// new vertex named by the letter.
///
/// A letter between currents `c1` and `c2` in circuit `i` corresponds, at
/// every vertex `v = i mod j`, to the corner between the darts towards
/// `v + c1` and `v + c2`. All of those corners must lie on a single
/// Hamiltonian face; anything else is reported as an error.
pub fn attach_vortices(rs: &RotationSystem, log: &CircuitLog) -> Result<RotationSystem> {
    let m = log.modulus();
    let j = log.index() as u32;
    if rs.vertex_count() != m as usize {
        return Err(Error::pre(format!(
            "embedding has {} vertices, log has modulus {m}",
            rs.vertex_count()
        )));
    }
    let sites = letter_sites(log)?;
    let fs = rs.trace_faces();
    let hamiltonian: Vec<usize> = fs
        .faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.len() == m as usize && rs.vertices().all(|v| f.incidences(v) == 1))
        .map(|(i, _)| i)
        .collect();
    let letters = log.letters();
    if hamiltonian.len() != letters.len() {
        return Err(Error::pre(format!(
            "{} Hamiltonian faces for {} vortex letters",
            hamiltonian.len(),
            letters.len()
        )));
    }
    let vertex = |x: u32| rs.require_vertex(&x.to_string());
    // letter -> (face index, a dart on it given by its end labels)
    let mut assigned: Vec<(char, usize, (String, String))> = Vec::new();
    for site in &sites {
        let mut face = None;
        for v in (site.circuit as u32..m).step_by(j as usize) {
            let vx = vertex(v)?;
            let to = vertex((v + site.after) % m)?;
            let from = vertex((v + site.before) % m)?;
            let dart = rs
                .rotation(vx)
                .iter()
                .copied()
                .find(|&d| rs.head(d) == to && rs.head(rs.pred(d)) == from)
                .ok_or_else(|| {
                    Error::pre(format!(
                        "vertex {v} has no corner between {} and {} for letter {}",
                        (v + site.before) % m,
                        (v + site.after) % m,
                        site.letter
                    ))
                })?;
            let (f, _) = fs.locate(dart);
            match face {
                None => face = Some((f, (rs.label(vx).to_string(), rs.label(to).to_string()))),
                Some((g, _)) if g != f => {
                    return Err(Error::pre(format!(
                        "letter {} points at more than one face",
                        site.letter
                    )))
                }
                _ => {}
            }
        }
        let Some((f, key)) = face else {
            return Err(Error::pre(format!("letter {} has no corner", site.letter)));
        };
        if !hamiltonian.contains(&f) {
            return Err(Error::pre(format!("letter {} points at a non-Hamiltonian face", site.letter)));
        }
        match assigned.iter().find(|(l, _, _)| *l == site.letter) {
            Some((_, g, _)) if *g != f => {
                return Err(Error::pre(format!("letter {} points at more than one face", site.letter)))
            }
            Some(_) => {}
            None => {
                if let Some((other, _, _)) = assigned.iter().find(|(_, g, _)| *g == f) {
                    return Err(Error::pre(format!(
                        "letters {other} and {} share one face",
                        site.letter
                    )));
                }
                assigned.push((site.letter, f, key));
            }
        }
    }
    let mut out = rs.clone();
    for (letter, _, (a, b)) in assigned {
        let fs = out.trace_faces();
        let va = out.require_vertex(&a)?;
        let vb = out.require_vertex(&b)?;
        let dart = out
            .rotation(va)
            .iter()
            .copied()
            .find(|&d| out.head(d) == vb)
            .ok_or_else(|| Error::Internal("face marker edge vanished".into()))?;
        let face = fs.face_containing(dart).clone();
        out = out.subdivide_face(&face, VertexId::new(letter.to_string())?)?;
    }
    Ok(out)
}
