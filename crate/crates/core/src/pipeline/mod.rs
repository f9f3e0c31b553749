//! Surgery scripts and the route from a triangular embedding of a complete
//! graph minus a triangle to a snug prism: complete to one hexagon with a
//! repeated vertex, split that vertex, delete the split pair, build the prism.

mod complete;
mod script;

use serde::Serialize;

pub use complete::{c9_target_check, find_hexagon_completion, target_face, Completion, CompletionStatus, DEFAULT_BUDGET};
pub use script::{
    run_script, AuditEntry, Counts, EdgeRef, FaceRef, ScriptFailure, ScriptRun, Step, TransformationScript,
};

use crate::embedding::{RotationSystem, VertexId};
use crate::error::{Error, Result};
use crate::prism::{build_prism, check_snug, delete_uv, genus_formula, SnugReport};

/// Genus after each stage of the pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct GenusLedger {
    pub start: u32,
    pub completed: u32,
    pub split: u32,
    pub sliced: u32,
    pub prism: u32,
    /// `genus_formula(n)` for the prism `K_n x K_2`.
    pub expected: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineResult {
    pub completion: Completion,
    pub ledger: Option<GenusLedger>,
    pub snug: Option<SnugReport>,
    #[serde(skip)]
    pub prism: Option<RotationSystem>,
}

fn fresh_label(rs: &RotationSystem, base: &str) -> Result<VertexId> {
    let mut name = base.to_string();
    let mut k = 1;
    while rs.vertex(&name).is_some() {
        name = format!("{base}{k}");
        k += 1;
    }
    VertexId::new(name)
}

/// Takes a hexagon completion found by [`find_hexagon_completion`] through
/// the vertex split, the deletion of the split pair, and the prism build.
pub fn finish_pipeline(start: &RotationSystem, completed: &RotationSystem) -> Result<(GenusLedger, SnugReport, RotationSystem)> {
    let fs = completed.trace_faces();
    let (hex, w) = complete::target_face(completed, &fs).ok_or_else(|| Error::pre("completion misses the hexagon target"))?;
    let u = fresh_label(completed, "u")?;
    let v = fresh_label(completed, "v")?;
    let split = completed.split_vertex(w, &fs.faces[hex], u, v)?;
    let split_genus = split.genus();
    let (kn, kn_faces, cover) = delete_uv(&split)?;
    let prism = build_prism(&kn, &cover)?;
    let report = check_snug(&prism)?;
    let n = kn.vertex_count() as u64;
    let ledger = GenusLedger {
        start: start.genus(),
        completed: fs.genus(),
        split: split_genus,
        sliced: kn_faces.genus(),
        prism: prism.genus(),
        expected: genus_formula(n)?,
    };
    Ok((ledger, report, prism))
}

/// Runs the hexagon search and, when it succeeds, the rest of the pipeline.
pub fn run_pipeline(rs: &RotationSystem, specials: &[&str; 3], budget: u64, seed: u64) -> Result<PipelineResult> {
    let completion = find_hexagon_completion(rs, specials, budget, seed)?;
    let Some(done) = completion.embedding.clone() else {
        return Ok(PipelineResult { completion, ledger: None, snug: None, prism: None });
    };
    let (ledger, report, prism) = finish_pipeline(rs, &done)?;
    Ok(PipelineResult { completion, ledger: Some(ledger), snug: Some(report), prism: Some(prism) })
}
