use std::fmt;

use serde::Serialize;

use super::{gcd, CircuitLog, CurrentGraph, LogEntry};
use crate::embedding::Dart;
use crate::error::{Error, Result};

/// Construction principles for index-1 (`A*`) and index-3 (`B*`) current graphs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Principle {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    B4,
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The principle needs the current graph's structure, which was not given.
    NotCheckable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrincipleReport {
    pub principle: Principle,
    pub verdict: Verdict,
    pub witnesses: Vec<String>,
}

impl PrincipleReport {
    fn from_witnesses(principle: Principle, witnesses: Vec<String>) -> Self {
        let verdict = if witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
        PrincipleReport { principle, verdict, witnesses }
    }

    fn unchecked(principle: Principle) -> Self {
        PrincipleReport { principle, verdict: Verdict::NotCheckable, witnesses: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Elements of `1..m` that do not appear exactly once among `currents`.
fn once_each(currents: impl Iterator<Item = u32>, m: u32) -> Vec<u32> {
    let mut count = vec![0usize; m as usize];
    for c in currents {
        count[c as usize] += 1;
    }
    (1..m).filter(|&x| count[x as usize] != 1).collect()
}

/// Checks principles A1 to A4. The log alone decides A2; the others need
/// `cg` and are reported as not checkable without it.
pub fn check_index1(log: &CircuitLog, cg: Option<&CurrentGraph>) -> Vec<PrincipleReport> {
    let m = log.modulus();
    let a2 = if log.index() != 1 {
        PrincipleReport::from_witnesses(Principle::A2, vec![format!("index is {}, not 1", log.index())])
    } else {
        let bad = once_each(log.currents(0), m);
        PrincipleReport::from_witnesses(Principle::A2, bad.iter().map(u32::to_string).collect())
    };
    let Some(cg) = cg else {
        return vec![
            PrincipleReport::unchecked(Principle::A1),
            a2,
            PrincipleReport::unchecked(Principle::A3),
            PrincipleReport::unchecked(Principle::A4),
        ];
    };
    let rs = cg.embedding();
    let label = |v| rs.label(v).to_string();
    let a1 = rs.vertices().filter(|&v| !matches!(rs.degree(v), 1 | 3)).map(label).collect();
    let a3 = rs
        .vertices()
        .filter(|&v| rs.degree(v) == 3 && cg.excess(v) != 0)
        .map(|v| format!("{} has excess {}", rs.label(v), cg.excess(v)))
        .collect();
    let a4 = rs
        .vertices()
        .filter(|&v| rs.degree(v) == 1 && gcd(cg.excess(v), m) != 1)
        .map(|v| format!("{} has excess {}", rs.label(v), cg.excess(v)))
        .collect();
    vec![
        PrincipleReport::from_witnesses(Principle::A1, a1),
        a2,
        PrincipleReport::from_witnesses(Principle::A3, a3),
        PrincipleReport::from_witnesses(Principle::A4, a4),
    ]
}

/// Checks principles B1 to B4, numbering the circuits in canonical face order.
pub fn check_index3(cg: &CurrentGraph) -> Vec<PrincipleReport> {
    let faces = cg.embedding().trace_faces().faces.len();
    let numbering: Vec<usize> = (0..faces).collect();
    check_index3_numbered(cg, &numbering).expect("identity numbering is valid")
}

/// Checks principles B1 to B4 where face `f` (canonical order) is circuit
/// `numbering[f]`.
pub fn check_index3_numbered(cg: &CurrentGraph, numbering: &[usize]) -> Result<Vec<PrincipleReport>> {
    let rs = cg.embedding();
    let m = cg.modulus();
    let fs = rs.trace_faces();
    let mut sorted = numbering.to_vec();
    sorted.sort_unstable();
    if sorted != (0..fs.faces.len()).collect::<Vec<_>>() {
        return Err(Error::pre(format!("numbering must permute 0..{}", fs.faces.len())));
    }
    let b1 = rs
        .vertices()
        .filter(|&v| rs.degree(v) != 3)
        .map(|v| rs.label(v).to_string())
        .collect();
    let mut b2 = Vec::new();
    if fs.faces.len() != 3 {
        b2.push(format!("index is {}, not 3", fs.faces.len()));
    }
    for (f, face) in fs.faces.iter().enumerate() {
        let bad = once_each(face.darts.iter().map(|&d| cg.current(d)), m);
        if !bad.is_empty() {
            let list: Vec<String> = bad.iter().map(u32::to_string).collect();
            b2.push(format!("circuit {}: {}", numbering[f], list.join(" ")));
        }
    }
    let subgroup = gcd(3, m);
    let mut b3 = Vec::new();
    for v in rs.vertices().filter(|&v| cg.excess(v) != 0) {
        let excess = cg.excess(v);
        if gcd(excess, m) != subgroup {
            b3.push(format!("{} has excess {excess}", rs.label(v)));
        }
        for (f, face) in fs.faces.iter().enumerate() {
            if face.incidences(v) == 0 {
                b3.push(format!("circuit {} misses {}", numbering[f], rs.label(v)));
            }
        }
    }
    let mut b4 = Vec::new();
    if m % 3 != 0 {
        b4.push(format!("3 does not divide {m}"));
    } else {
        for e in rs.edges() {
            let plus = Dart::new(e, false);
            let i = numbering[fs.locate(plus).0] as i64;
            let j = numbering[fs.locate(plus.reverse()).0] as i64;
            let alpha = cg.current(plus) as i64;
            if (j - i - alpha).rem_euclid(3) != 0 {
                b4.push(format!(
                    "arc {}->{} with current {alpha}: circuits {i} and {j}",
                    rs.label(rs.tail(plus)),
                    rs.label(rs.head(plus))
                ));
            }
        }
    }
    Ok(vec![
        PrincipleReport::from_witnesses(Principle::B1, b1),
        PrincipleReport::from_witnesses(Principle::B2, b2),
        PrincipleReport::from_witnesses(Principle::B3, b3),
        PrincipleReport::from_witnesses(Principle::B4, b4),
    ])
}

/// Tries every circuit numbering of a current graph with three faces and
/// returns the first that satisfies B4.
pub fn find_index3_numbering(cg: &CurrentGraph) -> Option<Vec<usize>> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    if cg.embedding().trace_faces().faces.len() != 3 {
        return None;
    }
    PERMS.iter().map(|p| p.to_vec()).find(|p| {
        check_index3_numbered(cg, p)
            .map(|r| r.iter().any(|x| x.principle == Principle::B4 && x.passed()))
            .unwrap_or(false)
    })
}

/// Rewrites a log so that its circuits follow `numbering` (face `f` becomes
/// circuit `numbering[f]`).
pub fn renumber(log: &CircuitLog, numbering: &[usize]) -> Result<CircuitLog> {
    if numbering.len() != log.index() {
        return Err(Error::pre("numbering length differs from index"));
    }
    let mut circuits: Vec<Vec<LogEntry>> = vec![Vec::new(); log.index()];
    for (f, &n) in numbering.iter().enumerate() {
        circuits[n] = log.circuit(f).to_vec();
    }
    CircuitLog::new(log.modulus(), circuits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::{derive, parse_current_graph, parse_log};

    const Z19_LOG: &str = "m=19 index=1\ncircuit 0: 15 x 4 11 5 y 14 6 16 18 z 1 17 10 13 8 12 2 3 9 7\n";

    fn verdict(r: &[PrincipleReport], p: Principle) -> &PrincipleReport {
        r.iter().find(|x| x.principle == p).unwrap()
    }

    #[test]
    fn published_log_satisfies_a2() {
        let log = parse_log(Z19_LOG).unwrap();
        let r = check_index1(&log, None);
        assert!(verdict(&r, Principle::A2).passed());
        assert_eq!(verdict(&r, Principle::A1).verdict, Verdict::NotCheckable);
        assert_eq!(verdict(&r, Principle::A4).verdict, Verdict::NotCheckable);
    }

    #[test]
    fn missing_current_is_reported() {
        let log = parse_log(Z19_LOG).unwrap();
        let pos = log.circuit(0).iter().position(|e| *e == LogEntry::Current(7)).unwrap();
        let r = check_index1(&log.without(0, pos).unwrap(), None);
        let a2 = verdict(&r, Principle::A2);
        assert_eq!(a2.verdict, Verdict::Fail);
        assert_eq!(a2.witnesses, vec!["7"]);
    }

    #[test]
    fn excess_must_generate() {
        // a single edge: each end has degree 1, excesses 2 and 2 in Z_4
        let cg = parse_current_graph("m=4\np: q[+2]\nq: p[-2]\n").unwrap();
        let log = cg.trace_circuits().unwrap();
        let r = check_index1(&log, Some(&cg));
        assert!(verdict(&r, Principle::A1).passed());
        assert_eq!(verdict(&r, Principle::A4).verdict, Verdict::Fail);
        assert_eq!(verdict(&r, Principle::A4).witnesses.len(), 2);
    }

    /// Every 3-regular current graph satisfying B2 over `Z_m` has three faces
    /// of length `m - 1`, hence `3(m-1)/2` edges and `m - 1` vertices. Its Euler
    /// characteristic must be even.
    fn b2_euler_characteristic(m: i64) -> Option<i64> {
        let sides = 3 * (m - 1);
        if sides % 2 != 0 || sides % 3 != 0 {
            return None;
        }
        let e = sides / 2;
        Some(2 * e / 3 - e + 3)
    }

    #[test]
    fn no_index3_instance_over_z9() {
        let chi = b2_euler_characteristic(9).unwrap();
        assert_eq!(chi, -1);
        assert_ne!(chi.rem_euclid(2), 0);
        assert_eq!(b2_euler_characteristic(3), Some(2));
    }

    /// Exhaustive search over 3-regular current graphs on two vertices (all
    /// rotations of the theta graph and its relatives, all currents in `Z_3`).
    fn theta_instances() -> Vec<(CurrentGraph, Vec<usize>)> {
        let mut found = Vec::new();
        let q_orders = ["p#3 p#2 p", "p#2 p#3 p"];
        for q in q_orders {
            for code in 0..8u32 {
                let cur: Vec<i64> = (0..3).map(|i| if code >> i & 1 == 1 { 1 } else { 2 }).collect();
                let text = format!(
                    "m=3\np: q[{}] q#2[{}] q#3[{}]\n{}\n",
                    cur[0],
                    cur[1],
                    cur[2],
                    q.split(' ')
                        .map(|t| {
                            let k = t.strip_prefix("p#").map(|k| k.parse::<usize>().unwrap()).unwrap_or(1);
                            format!("{t}[{}]", -cur[k - 1])
                        })
                        .fold("q:".to_string(), |a, t| a + " " + &t)
                );
                let Ok(cg) = parse_current_graph(&text) else { continue };
                for numbering in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                    let Ok(r) = check_index3_numbered(&cg, &numbering) else { continue };
                    if r.iter().all(PrincipleReport::passed) {
                        found.push((cg.clone(), numbering.to_vec()));
                    }
                }
            }
        }
        found
    }

    #[test]
    fn smallest_index3_instance() {
        let found = theta_instances();
        assert!(!found.is_empty());
        let (cg, numbering) = &found[0];
        assert_eq!(cg.embedding().trace_faces().faces.len(), 3);
        let log = renumber(&cg.trace_circuits().unwrap(), numbering).unwrap();
        let rs = derive(&log).unwrap();
        assert!(rs.trace_faces().is_triangular());
        assert!(find_index3_numbering(cg).is_some());

        // a numbering that breaks B4
        let bad = (0..6)
            .map(|k| match k {
                0 => vec![0, 1, 2],
                1 => vec![0, 2, 1],
                2 => vec![1, 0, 2],
                3 => vec![1, 2, 0],
                4 => vec![2, 0, 1],
                _ => vec![2, 1, 0],
            })
            .find(|p| !check_index3_numbered(cg, p).unwrap()[3].passed())
            .unwrap();
        let r = check_index3_numbered(cg, &bad).unwrap();
        assert_eq!(r[3].verdict, Verdict::Fail);
        assert!(r[3].witnesses[0].starts_with("arc "));
    }

    #[test]
    fn vortex_excess_outside_subgroup() {
        // excess 1 at a degree-3 vertex in Z_9 generates all of Z_9, not <3>
        let cg = parse_current_graph("m=9\np: q[+1] q#2[+1] q#3[+8]\nq: p#3[+1] p#2[-1] p[-1]\n").unwrap();
        let r = check_index3(&cg);
        assert_eq!(r[2].verdict, Verdict::Fail);
        assert!(r[2].witnesses.iter().any(|w| w.contains("excess 1")));
    }
}
