//! Current graphs over cyclic groups `Z_m`, their circuit logs, and derived
//! embeddings.

mod derive;
mod principles;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use derive::{attach_vortices, derive};
pub use principles::{
    check_index1, check_index3, check_index3_numbered, find_index3_numbering, renumber, Principle,
    PrincipleReport, Verdict,
};

use crate::embedding::format::{assemble, read_lines, split_token, strip_comment, RawLine};
use crate::embedding::{Dart, RotationSystem, Vertex};
use crate::error::{Error, Result};

/// Reduces `value` to `0..m`.
pub fn residue(value: i64, m: u32) -> u32 {
    value.rem_euclid(m as i64) as u32
}

/// Greatest common divisor, with `gcd(0, m) = m`.
pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One entry of a circuit log: a current or a vortex letter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LogEntry {
    Current(u32),
    Vortex(char),
}

/// Logs of all circuits of a current graph, indexed by circuit number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitLog {
    modulus: u32,
    circuits: Vec<Vec<LogEntry>>,
}

impl CircuitLog {
    pub fn new(modulus: u32, circuits: Vec<Vec<LogEntry>>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Current(format!("modulus {modulus} is too small")));
        }
        if circuits.is_empty() {
            return Err(Error::Current("log has no circuits".into()));
        }
        for (i, c) in circuits.iter().enumerate() {
            let mut letters = Vec::new();
            for e in c {
                match *e {
                    LogEntry::Current(0) => {
                        return Err(Error::Current(format!("circuit {i} carries current 0")))
                    }
                    LogEntry::Current(x) if x >= modulus => {
                        return Err(Error::Current(format!("current {x} not reduced mod {modulus}")))
                    }
                    LogEntry::Vortex(l) if letters.contains(&l) => {
                        return Err(Error::Current(format!("letter {l} repeated in circuit {i}")))
                    }
                    LogEntry::Vortex(l) => letters.push(l),
                    LogEntry::Current(_) => {}
                }
            }
        }
        Ok(CircuitLog { modulus, circuits })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of circuits.
    pub fn index(&self) -> usize {
        self.circuits.len()
    }

    pub fn circuit(&self, i: usize) -> &[LogEntry] {
        &self.circuits[i]
    }

    pub fn circuits(&self) -> &[Vec<LogEntry>] {
        &self.circuits
    }

    /// Currents of circuit `i`, letters skipped.
    pub fn currents(&self, i: usize) -> impl Iterator<Item = u32> + '_ {
        self.circuits[i].iter().filter_map(|e| match e {
            LogEntry::Current(c) => Some(*c),
            LogEntry::Vortex(_) => None,
        })
    }

    /// Distinct vortex letters in order of first appearance.
    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        for c in &self.circuits {
            for e in c {
                if let LogEntry::Vortex(l) = e {
                    if !out.contains(l) {
                        out.push(*l);
                    }
                }
            }
        }
        out
    }

    pub fn without(&self, circuit: usize, position: usize) -> Result<Self> {
        let mut circuits = self.circuits.clone();
        circuits[circuit].remove(position);
        CircuitLog::new(self.modulus, circuits)
    }
}

pub fn parse_log(text: &str) -> Result<CircuitLog> {
    let mut modulus = None;
    let mut declared_index = None;
    let mut circuits: BTreeMap<usize, (usize, Vec<LogEntry>)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        if modulus.is_none() {
            let (m, j) = parse_header(body).map_err(|e| Error::parse(line, e))?;
            modulus = Some(m);
            declared_index = j;
            continue;
        }
        let m = modulus.unwrap();
        let (head, rest) = body
            .split_once(':')
            .ok_or_else(|| Error::parse(line, "expected `circuit <i>: tokens...`"))?;
        let idx: usize = head
            .trim()
            .strip_prefix("circuit")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(line, format!("bad circuit header {head:?}")))?;
        let mut entries = Vec::new();
        for tok in rest.split_whitespace() {
            entries.push(parse_entry(tok, m).map_err(|e| Error::parse(line, e))?);
        }
        if circuits.insert(idx, (line, entries)).is_some() {
            return Err(Error::parse(line, format!("circuit {idx} given twice")));
        }
    }
    let m = modulus.ok_or_else(|| Error::parse(0, "missing `m=<int>` header"))?;
    let count = circuits.len();
    if let Some(j) = declared_index {
        if j != count {
            return Err(Error::parse(0, format!("header declares index {j} but {count} circuits given")));
        }
    }
    let mut out = Vec::with_capacity(count);
    for (expected, (idx, (line, entries))) in circuits.into_iter().enumerate() {
        if idx != expected {
            return Err(Error::parse(line, format!("circuits must be numbered 0..{count}")));
        }
        if entries.iter().any(|e| *e == LogEntry::Current(0)) {
            return Err(Error::parse(line, "current 0 is not allowed"));
        }
        out.push(entries);
    }
    CircuitLog::new(m, out)
}

fn parse_header(body: &str) -> std::result::Result<(u32, Option<usize>), String> {
    let mut m = None;
    let mut j = None;
    for field in body.split_whitespace() {
        match field.split_once('=') {
            Some(("m", v)) => m = Some(v.parse::<u32>().map_err(|_| format!("bad modulus {v:?}"))?),
            Some(("index", v)) => j = Some(v.parse::<usize>().map_err(|_| format!("bad index {v:?}"))?),
            _ => return Err(format!("unexpected header field {field:?}")),
        }
    }
    let m = m.ok_or("header must give m=<int>")?;
    if m < 2 {
        return Err(format!("modulus {m} is too small"));
    }
    Ok((m, j))
}

fn parse_entry(tok: &str, m: u32) -> std::result::Result<LogEntry, String> {
    let mut chars = tok.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_ascii_alphabetic() {
            return Ok(LogEntry::Vortex(c));
        }
    }
    let tok = tok.strip_prefix('+').unwrap_or(tok);
    let v: i64 = tok.parse().map_err(|_| format!("unknown token {tok:?}"))?;
    let r = residue(v, m);
    if r == 0 {
        return Err(format!("current {v} is 0 mod {m}"));
    }
    Ok(LogEntry::Current(r))
}

impl FromStr for CircuitLog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_log(s)
    }
}

impl fmt::Display for CircuitLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m={} index={}", self.modulus, self.circuits.len())?;
        for (i, c) in self.circuits.iter().enumerate() {
            write!(f, "circuit {i}:")?;
            for e in c {
                match e {
                    LogEntry::Current(x) => write!(f, " {x}")?,
                    LogEntry::Vortex(l) => write!(f, " {l}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// An embedded graph with currents on its darts.
#[derive(Clone, Debug)]
pub struct CurrentGraph {
    rs: RotationSystem,
    modulus: u32,
    currents: Vec<u32>,
    vortices: BTreeMap<Vertex, char>,
}

impl CurrentGraph {
    /// Checks antisymmetry, nonzero currents, and that every labelled vortex
    /// has nonzero excess.
    pub fn new(
        rs: RotationSystem,
        modulus: u32,
        currents: Vec<u32>,
        vortices: BTreeMap<Vertex, char>,
    ) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Current(format!("modulus {modulus} is too small")));
        }
        if currents.len() != 2 * rs.edge_count() {
            return Err(Error::Current("one current per dart required".into()));
        }
        for e in rs.edges() {
            let f = currents[Dart::new(e, false).0 as usize];
            let b = currents[Dart::new(e, true).0 as usize];
            if f == 0 || b == 0 || f >= modulus || b >= modulus {
                return Err(Error::Current(format!("edge {} carries current 0", rs.describe_edge(e))));
            }
            if (f + b) % modulus != 0 {
                return Err(Error::Current(format!(
                    "edge {} violates antisymmetry: {f} and {b}",
                    rs.describe_edge(e)
                )));
            }
        }
        let cg = CurrentGraph { rs, modulus, currents, vortices };
        let mut letters = Vec::new();
        for (&v, &l) in &cg.vortices {
            if cg.excess(v) == 0 {
                return Err(Error::Current(format!("vortex {} has zero excess", cg.rs.label(v))));
            }
            if letters.contains(&l) {
                return Err(Error::Current(format!("letter {l} used twice")));
            }
            letters.push(l);
        }
        Ok(cg)
    }

    pub fn embedding(&self) -> &RotationSystem {
        &self.rs
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn current(&self, d: Dart) -> u32 {
        self.currents[d.0 as usize]
    }

    pub fn vortices(&self) -> &BTreeMap<Vertex, char> {
        &self.vortices
    }

    /// Sum of the currents leaving `v`.
    pub fn excess(&self, v: Vertex) -> u32 {
        let s: u64 = self.rs.rotation(v).iter().map(|&d| self.current(d) as u64).sum();
        (s % self.modulus as u64) as u32
    }

    /// Logs of every face, in canonical face order, with vortex letters
    /// appended where the walk passes a labelled vertex.
    pub fn trace_circuits(&self) -> Result<CircuitLog> {
        let fs = self.rs.trace_faces();
        let circuits = fs
            .faces
            .iter()
            .map(|f| {
                let mut log = Vec::with_capacity(f.len() + 1);
                for &d in &f.darts {
                    log.push(LogEntry::Current(self.current(d)));
                    if let Some(&l) = self.vortices.get(&self.rs.head(d)) {
                        log.push(LogEntry::Vortex(l));
                    }
                }
                log
            })
            .collect();
        CircuitLog::new(self.modulus, circuits)
    }

    /// The `.cgr` text.
    pub fn to_cgr(&self) -> String {
        let layout = self.rs.layout();
        let mut out = format!("m={}\n", self.modulus);
        for &v in &layout.order {
            out.push_str(self.rs.label(v).as_str());
            out.push(':');
            for &d in &layout.rotations[v.idx()] {
                let c = self.current(d) as i64;
                let shown = if 2 * c > self.modulus as i64 { c - self.modulus as i64 } else { c };
                out.push_str(&format!(" {}[{:+}]", self.rs.token_with(&layout, d), shown));
            }
            out.push('\n');
        }
        for (&v, &l) in &self.vortices {
            out.push_str(&format!("vortex {} {}\n", self.rs.label(v), l));
        }
        out
    }
}

/// Parses the `.cgr` format: an `m=<int>` header, embedding lines whose
/// neighbour tokens carry currents (`v: w[+5] u[-3]`), and `vortex <v> <letter>`
/// lines.
pub fn parse_current_graph(text: &str) -> Result<CurrentGraph> {
    let mut modulus: Option<u32> = None;
    let mut vortex_lines: Vec<(usize, String, char)> = Vec::new();
    let lines = read_lines(
        text,
        |line, body| {
            if body.starts_with("m=") {
                let (m, _) = parse_header(body).map_err(|e| Error::parse(line, e))?;
                modulus = Some(m);
                return Ok(true);
            }
            if let Some(rest) = body.strip_prefix("vortex ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [v, l] = parts[..] else {
                    return Err(Error::parse(line, "expected `vortex <vertex> <letter>`"));
                };
                let mut cs = l.chars();
                let (Some(c), None) = (cs.next(), cs.next()) else {
                    return Err(Error::parse(line, format!("vortex label {l:?} is not a single letter")));
                };
                vortex_lines.push((line, v.to_string(), c));
                return Ok(true);
            }
            Ok(false)
        },
        |line, t| {
            let open = t.find('[').ok_or_else(|| Error::parse(line, format!("token {t:?} has no current")))?;
            let close = t
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line, format!("token {t:?} has no closing bracket")))?;
            let value = &close[open + 1..];
            let value: i64 = value
                .strip_prefix('+')
                .unwrap_or(value)
                .parse()
                .map_err(|_| Error::parse(line, format!("bad current in {t:?}")))?;
            let tok = split_token(&t[..open]).map_err(|m| Error::parse(line, m))?;
            Ok((tok, (line, value)))
        },
    )?;
    let m = modulus.ok_or_else(|| Error::parse(0, "missing `m=<int>` header"))?;
    let (raw, data): (Vec<RawLine>, Vec<Vec<(usize, i64)>>) = lines.into_iter().unzip();
    let rs = assemble(&raw)?;
    let mut currents = vec![0u32; 2 * rs.edge_count()];
    for (v, data) in rs.vertices().zip(&data) {
        for (&d, &(line, value)) in rs.rotation(v).iter().zip(data) {
            let r = residue(value, m);
            if r == 0 {
                return Err(Error::parse(line, format!("current {value} is 0 mod {m}")));
            }
            currents[d.0 as usize] = r;
        }
    }
    let mut vortices = BTreeMap::new();
    for (line, v, l) in vortex_lines {
        let vx = rs.vertex(&v).ok_or_else(|| Error::parse(line, format!("unknown vertex {v}")))?;
        if vortices.insert(vx, l).is_some() {
            return Err(Error::parse(line, format!("vertex {v} labelled twice")));
        }
    }
    CurrentGraph::new(rs, m, currents, vortices)
}

impl FromStr for CurrentGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_current_graph(s)
    }
}
