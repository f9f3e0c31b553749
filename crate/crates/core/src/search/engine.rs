use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::shapes::{find_covers, Shape};
use super::{complete_edges, FaceVector, SearchSpec};
use crate::embedding::{Dart, RotationSystem, Vertex, VertexId};
use crate::error::{Error, Result};
use crate::prism::{is_facial_cover, is_patchwork, parse_cover, write_cover};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// Every task ran to completion: the search covered the whole space.
    Complete,
    /// Some task ran out of budget.
    BudgetExhausted,
    /// Tasks remain pending (stopped by a task limit); resume from the checkpoint.
    Interrupted,
}

/// An embedding together with a cover of a requested shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub task: usize,
    pub shape: Shape,
    pub vector: FaceVector,
    /// Canonical `.emb` text.
    pub embedding: String,
    /// Canonical `.cov` text.
    pub cover: String,
}

impl Finding {
    /// Re-parses and re-traces the certificate from scratch.
    pub fn validate(&self, genus: usize) -> Result<()> {
        let rs: RotationSystem = self.embedding.parse()?;
        let fs = rs.trace_faces();
        if fs.genus() as usize != genus {
            return Err(Error::Internal(format!("finding has genus {}, not {genus}", fs.genus())));
        }
        if FaceVector::new(fs.faces.iter().map(|f| f.len()).collect()) != self.vector {
            return Err(Error::Internal("finding face vector differs".into()));
        }
        let cover = parse_cover(&rs, &fs, &self.cover)?;
        let check = match &self.shape {
            Shape::Patchwork(lengths) => {
                let mut got: Vec<usize> = cover.faces.iter().map(|&f| fs.faces[f].len()).collect();
                got.sort_unstable();
                if &got != lengths {
                    return Err(Error::Internal("finding cover has the wrong face lengths".into()));
                }
                is_patchwork(&rs, &fs, &cover)
            }
            Shape::Cover(h) => {
                if cover.len() != *h {
                    return Err(Error::Internal("finding cover has the wrong size".into()));
                }
                is_facial_cover(&rs, &fs, &cover)
            }
        };
        if !check.ok {
            return Err(Error::Internal(format!("finding fails its check: {}", check.witnesses.join("; "))));
        }
        Ok(())
    }
}

/// Result of one top-level task (one rotation at the second vertex).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskResult {
    pub task: usize,
    pub nodes: u64,
    pub complete: bool,
    pub audit_nodes: u64,
    pub audit_violations: u64,
    pub leaves: Vec<u64>,
    pub findings_count: u64,
    pub findings: Vec<Finding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub nodes: u64,
    pub tasks_total: usize,
    pub tasks_done: usize,
    /// Number of complete embeddings reached for each admissible face vector.
    pub leaves: BTreeMap<String, u64>,
    pub findings_count: u64,
    pub findings: Vec<Finding>,
    pub audit_nodes: u64,
    pub audit_violations: u64,
}

/// `K_n` on labels `1..n`; dart `2e` runs from the lower endpoint of edge `e`.
pub(crate) struct Graph {
    n: usize,
    nbrs: Vec<Vec<usize>>,
    /// `dart_to[v][k]` leaves `v` towards `nbrs[v][k]`.
    dart_to: Vec<Vec<u32>>,
    ends: Vec<[usize; 2]>,
}

impl Graph {
    pub(crate) fn complete(n: usize) -> Self {
        let mut ends = Vec::with_capacity(complete_edges(n));
        let mut dart_to = vec![vec![0u32; n.saturating_sub(1)]; n];
        let nbrs: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&w| w != v).collect()).collect();
        for a in 0..n {
            for b in a + 1..n {
                let e = ends.len() as u32;
                ends.push([a, b]);
                dart_to[a][b - 1] = 2 * e;
                dart_to[b][a] = 2 * e + 1;
            }
        }
        Graph { n, nbrs, dart_to, ends }
    }

    fn darts(&self) -> usize {
        2 * self.ends.len()
    }

    fn tail(&self, d: u32) -> usize {
        self.ends[(d >> 1) as usize][(d & 1) as usize]
    }

    fn head(&self, d: u32) -> usize {
        self.ends[(d >> 1) as usize][1 - (d & 1) as usize]
    }

    /// Rotations of vertex `v` with its first neighbour fixed, in
    /// lexicographic order of neighbour positions.
    pub(crate) fn rotations(&self, v: usize) -> Vec<Vec<usize>> {
        let deg = self.nbrs[v].len();
        let mut out = Vec::new();
        let mut cur = vec![0];
        let mut used = vec![false; deg];
        if deg > 0 {
            used[0] = true;
        }
        fn go(deg: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if cur.len() == deg {
                out.push(cur.clone());
                return;
            }
            for k in 1..deg {
                if !used[k] {
                    used[k] = true;
                    cur.push(k);
                    go(deg, cur, used, out);
                    cur.pop();
                    used[k] = false;
                }
            }
        }
        if deg == 0 {
            return vec![vec![]];
        }
        go(deg, &mut cur, &mut used, &mut out);
        out
    }

    /// Builds the rotation system for neighbour-position rotations.
    pub(crate) fn embedding(&self, rot: &[Vec<usize>]) -> Result<RotationSystem> {
        let labels = (1..=self.n).map(|i| VertexId::new(i.to_string())).collect::<Result<Vec<_>>>()?;
        let ends = self.ends.iter().map(|&[a, b]| [Vertex(a as u32), Vertex(b as u32)]).collect();
        let rotations = (0..self.n)
            .map(|v| rot[v].iter().map(|&k| Dart(self.dart_to[v][k])).collect())
            .collect();
        RotationSystem::from_parts(labels, ends, rotations)
    }
}

enum Undo {
    Chain { at: u32, other: u32, len: u32 },
    Closed(u32),
    Excess(u32),
}

/// Depth-first search state for one task.
struct Walker<'a> {
    g: &'a Graph,
    vectors: &'a [Vec<u32>],
    max_len: u32,
    forced: [Option<&'a [usize]>; 2],
    shapes: &'a [Shape],
    admissible: &'a [FaceVector],
    // chains of face steps: `other` links the two ends of each open chain
    other: Vec<u32>,
    len: Vec<u32>,
    closed: Vec<u32>,
    // sides beyond three summed over closed faces, plus lower bounds for
    // the faces of open chains; never more than `max_excess`
    excess: u32,
    max_excess: u32,
    undo: Vec<Undo>,
    rot: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    budget: Option<u64>,
    audit: bool,
    auditing: u32,
    max_findings: usize,
    out: TaskResult,
}

enum Flow {
    Go,
    Stop,
}

impl<'a> Walker<'a> {
    /// Records the face step "after `t`, the walk continues with `s`".
    /// Returns the length of the closed face, or a lower bound on the length
    /// of the face holding the merged open chain.
    fn link(&mut self, t: u32, s: u32) -> (bool, u32) {
        let a = self.other[t as usize];
        self.undo.push(Undo::Excess(self.excess));
        if a == s {
            let l = self.len[t as usize];
            if (l as usize) < self.closed.len() {
                self.closed[l as usize] += 1;
            }
            self.undo.push(Undo::Closed(l));
            self.excess = self.excess - self.chain_excess(a, t) + l.saturating_sub(3);
            return (true, l);
        }
        let b = self.other[s as usize];
        let l = self.len[t as usize] + self.len[s as usize];
        self.excess -= self.chain_excess(a, t) + self.chain_excess(s, b);
        for x in [a, b] {
            self.undo.push(Undo::Chain { at: x, other: self.other[x as usize], len: self.len[x as usize] });
        }
        self.other[a as usize] = b;
        self.other[b as usize] = a;
        self.len[a as usize] = l;
        self.len[b as usize] = l;
        // the chain runs from dart a to dart b; unless b ends where a starts,
        // at least one more side is missing
        let gap = self.g.head(b) != self.g.tail(a);
        self.excess += (l + gap as u32).saturating_sub(3);
        (false, l + gap as u32)
    }

    /// Lower bound on the excess of the face through the open chain from
    /// dart `first` to dart `last`.
    fn chain_excess(&self, first: u32, last: u32) -> u32 {
        let gap = self.g.head(last) != self.g.tail(first);
        (self.len[first as usize] + gap as u32).saturating_sub(3)
    }

    fn rollback(&mut self, mark: usize) {
        while self.undo.len() > mark {
            match self.undo.pop().expect("undo entry") {
                Undo::Chain { at, other, len } => {
                    self.other[at as usize] = other;
                    self.len[at as usize] = len;
                }
                Undo::Closed(l) => {
                    if (l as usize) < self.closed.len() {
                        self.closed[l as usize] -= 1;
                    }
                }
                Undo::Excess(x) => self.excess = x,
            }
        }
    }

    /// Some admissible vector still dominates the closed faces and, for an
    /// open chain of length `open`, has a spare face at least that long.
    fn feasible(&self, closed_len: Option<u32>, open: Option<u32>) -> bool {
        if let Some(l) = closed_len {
            if l > self.max_len || l < 3 {
                return false;
            }
        }
        if let Some(l) = open {
            if l > self.max_len {
                return false;
            }
        }
        if self.excess > self.max_excess {
            return false;
        }
        self.vectors.iter().any(|v| {
            (3..=self.max_len as usize).all(|l| self.closed[l] <= v[l])
                && open.is_none_or(|o| (o as usize..=self.max_len as usize).any(|l| v[l] > self.closed[l]))
        })
    }

    fn count_node(&mut self) -> Flow {
        if self.auditing > 0 {
            self.out.audit_nodes += 1;
            return Flow::Go;
        }
        if let Some(b) = self.budget {
            if self.out.nodes >= b {
                self.out.complete = false;
                return Flow::Stop;
            }
        }
        self.out.nodes += 1;
        Flow::Go
    }

    fn descend(&mut self, ok: bool, v: usize, pos: usize) -> Flow {
        if ok {
            return self.place(v, pos);
        }
        if self.audit && self.auditing == 0 {
            self.auditing += 1;
            let flow = self.place(v, pos);
            self.auditing -= 1;
            return flow;
        }
        Flow::Go
    }

    fn place(&mut self, v: usize, pos: usize) -> Flow {
        if v == self.g.n {
            self.leaf();
            return Flow::Go;
        }
        let deg = self.g.nbrs[v].len();
        if pos == deg {
            let first = self.rot[v][0];
            let last = self.rot[v][deg - 1];
            let t = self.g.dart_to[v][last] ^ 1;
            let s = self.g.dart_to[v][first];
            let mark = self.undo.len();
            let (closed, l) = self.link(t, s);
            let ok = self.auditing > 0
                || if closed { self.feasible(Some(l), None) } else { self.feasible(None, Some(l)) };
            let flow = self.descend(ok, v + 1, 0);
            self.rollback(mark);
            return flow;
        }
        if pos == 0 {
            self.rot[v].push(0);
            self.used[v][0] = true;
            let flow = self.place(v, 1);
            self.used[v][0] = false;
            self.rot[v].pop();
            return flow;
        }
        let forced = if v < 2 { self.forced[v] } else { None };
        for k in 1..deg {
            if self.used[v][k] || forced.is_some_and(|f| f[pos] != k) {
                continue;
            }
            if let Flow::Stop = self.count_node() {
                return Flow::Stop;
            }
            let prev = self.rot[v][pos - 1];
            let t = self.g.dart_to[v][prev] ^ 1;
            let s = self.g.dart_to[v][k];
            let mark = self.undo.len();
            let (closed, l) = self.link(t, s);
            let ok = self.auditing > 0
                || if closed { self.feasible(Some(l), None) } else { self.feasible(None, Some(l)) };
            self.rot[v].push(k);
            self.used[v][k] = true;
            let flow = self.descend(ok, v, pos + 1);
            self.used[v][k] = false;
            self.rot[v].pop();
            self.rollback(mark);
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Go
    }

    fn leaf(&mut self) {
        let hit = self
            .vectors
            .iter()
            .position(|v| (3..=self.max_len as usize).all(|l| self.closed[l] == v[l]));
        let Some(i) = hit else { return };
        if self.auditing > 0 {
            self.out.audit_violations += 1;
            return;
        }
        self.out.leaves[i] += 1;
        if self.shapes.is_empty() {
            return;
        }
        let rs = self.g.embedding(&self.rot).expect("search leaves are valid rotation systems");
        let fs = rs.trace_faces();
        let vector = &self.admissible[i];
        for shape in self.shapes {
            if !shape.admits(vector, self.g.n) {
                continue;
            }
            for cover in find_covers(&rs, &fs, shape) {
                self.out.findings_count += 1;
                if self.out.findings.len() < self.max_findings {
                    self.out.findings.push(Finding {
                        task: self.out.task,
                        shape: shape.clone(),
                        vector: vector.clone(),
                        embedding: rs.to_string(),
                        cover: write_cover(&rs, &fs, &cover),
                    });
                }
            }
        }
    }
}

struct Plan {
    graph: Graph,
    prefixes: Vec<Vec<usize>>,
    fixed: Vec<usize>,
    admissible: Vec<FaceVector>,
    vectors: Vec<Vec<u32>>,
    max_len: u32,
    max_excess: u32,
}

fn plan(spec: &SearchSpec) -> Result<Plan> {
    if spec.n < 3 {
        return Err(Error::pre("search needs n >= 3"));
    }
    if spec.n > 16 {
        return Err(Error::pre("search supports n <= 16"));
    }
    let admissible = spec.admissible();
    let sides = 2 * complete_edges(spec.n);
    for v in &admissible {
        if v.side_sum() != sides || v.0.iter().any(|&l| l < 3) {
            return Err(Error::pre(format!("face vector {v} does not fit K_{}", spec.n)));
        }
        if super::face_count(spec.n, spec.genus) != Some(v.face_count()) {
            return Err(Error::pre(format!("face vector {v} does not have genus {}", spec.genus)));
        }
    }
    let max_len = admissible.iter().flat_map(|v| v.0.iter().copied()).max().unwrap_or(3) as u32;
    let vectors = admissible.iter().map(|v| v.counts(max_len as usize)).collect();
    let graph = Graph::complete(spec.n);
    let fixed = (0..graph.nbrs[0].len()).collect();
    let prefixes = graph.rotations(1);
    let max_excess = admissible.iter().map(|v| v.side_sum() - 3 * v.face_count()).max().unwrap_or(0) as u32;
    Ok(Plan { graph, prefixes, fixed, admissible, vectors, max_len, max_excess })
}

fn run_task(plan: &Plan, spec: &SearchSpec, task: usize, budget: Option<u64>) -> TaskResult {
    let g = &plan.graph;
    let darts = g.darts();
    let mut w = Walker {
        g,
        vectors: &plan.vectors,
        max_len: plan.max_len,
        forced: [Some(&plan.fixed), Some(&plan.prefixes[task])],
        shapes: &spec.shapes,
        admissible: &plan.admissible,
        other: (0..darts as u32).collect(),
        len: vec![1; darts],
        closed: vec![0; plan.max_len as usize + 1],
        excess: 0,
        max_excess: plan.max_excess,
        undo: Vec::new(),
        rot: vec![Vec::new(); g.n],
        used: g.nbrs.iter().map(|n| vec![false; n.len()]).collect(),
        budget,
        auditing: 0,
        audit: spec.audit,
        max_findings: spec.max_findings,
        out: TaskResult {
            task,
            nodes: 0,
            complete: true,
            audit_nodes: 0,
            audit_violations: 0,
            leaves: vec![0; plan.admissible.len()],
            findings_count: 0,
            findings: Vec::new(),
        },
    };
    w.place(0, 0);
    w.out
}

/// Runs the search, splitting work by the rotation at the second vertex.
/// Results do not depend on the number of threads. With a checkpoint path,
/// finished tasks are saved after every batch and skipped on resume.
pub fn search_patchworks(spec: &SearchSpec) -> Result<SearchOutcome> {
    let plan = plan(spec)?;
    let tasks_total = plan.prefixes.len();
    let per_task = spec.budget.map(|b| b / tasks_total as u64);
    let hash = spec.hash();
    let mut done: BTreeMap<usize, TaskResult> = BTreeMap::new();
    if let Some(path) = &spec.checkpoint {
        if path.exists() {
            let cp = Checkpoint::load(path)?;
            if cp.spec_hash != hash || cp.tasks_total != tasks_total {
                return Err(Error::Checkpoint(format!(
                    "{} belongs to a different search",
                    path.display()
                )));
            }
            for r in cp.results {
                done.insert(r.task, r);
            }
        }
    }
    let mut pending: Vec<usize> = (0..tasks_total).filter(|t| !done.contains_key(t)).collect();
    if let Some(limit) = spec.max_tasks {
        pending.truncate(limit);
    }
    let threads = spec.threads.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let batch = (threads * 16).max(64);
    for chunk in pending.chunks(batch) {
        let results: Vec<TaskResult> =
            pool.install(|| chunk.par_iter().map(|&t| run_task(&plan, spec, t, per_task)).collect());
        for r in results {
            done.insert(r.task, r);
        }
        if let Some(path) = &spec.checkpoint {
            Checkpoint {
                version: Checkpoint::VERSION,
                spec_hash: hash.clone(),
                tasks_total,
                results: done.values().cloned().collect(),
            }
            .save(path)?;
        }
    }
    let mut outcome = SearchOutcome {
        status: SearchStatus::Complete,
        nodes: 0,
        tasks_total,
        tasks_done: done.len(),
        leaves: plan.admissible.iter().map(|v| (v.to_string(), 0)).collect(),
        findings_count: 0,
        findings: Vec::new(),
        audit_nodes: 0,
        audit_violations: 0,
    };
    for r in done.values() {
        outcome.nodes += r.nodes;
        outcome.audit_nodes += r.audit_nodes;
        outcome.audit_violations += r.audit_violations;
        outcome.findings_count += r.findings_count;
        for (v, c) in plan.admissible.iter().zip(&r.leaves) {
            *outcome.leaves.get_mut(&v.to_string()).expect("vector key") += c;
        }
        for f in &r.findings {
            if outcome.findings.len() < spec.max_findings {
                outcome.findings.push(f.clone());
            }
        }
        if !r.complete {
            outcome.status = SearchStatus::BudgetExhausted;
        }
    }
    if done.len() < tasks_total {
        outcome.status = SearchStatus::Interrupted;
    }
    for f in &outcome.findings {
        f.validate(spec.genus)?;
    }
    Ok(outcome)
}

/// Counts every rotation system of `K_n` with the first vertex's rotation
/// fixed, by face vector, by tracing each one. Only for tiny `n`.
pub fn brute_force_vectors(n: usize) -> Result<BTreeMap<FaceVector, u64>> {
    let g = Graph::complete(n);
    let options: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|v| if v == 0 { vec![(0..n - 1).collect()] } else { g.rotations(v) })
        .collect();
    let mut idx = vec![0usize; n];
    let mut out = BTreeMap::new();
    loop {
        let rot: Vec<Vec<usize>> = (0..n).map(|v| options[v][idx[v]].clone()).collect();
        let rs = g.embedding(&rot)?;
        let fs = rs.trace_faces();
        *out.entry(FaceVector::new(fs.faces.iter().map(|f| f.len()).collect())).or_insert(0) += 1;
        let mut v = 0;
        loop {
            if v == n {
                return Ok(out);
            }
            idx[v] += 1;
            if idx[v] < options[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}
