mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use prismatic::current::{
    attach_vortices, check_index1, check_index3, derive, parse_current_graph, parse_log, Verdict,
};
use prismatic::pipeline::{
    finish_pipeline, find_hexagon_completion, run_script, target_face, CompletionStatus, TransformationScript,
    DEFAULT_BUDGET,
};
use prismatic::prism::{
    build_prism, check_snug, genus_formula, is_facial_cover, is_patchwork, lower_bound, parse_cover, slice,
    split_complete_check, write_cover, FacialCover,
};
use prismatic::search::{search_patchworks, SearchSpec, SearchStatus, Shape};
use prismatic::{RotationSystem, VertexId};

use report::CommandReport;

#[derive(Parser)]
#[command(name = "prismatic", version, about = "Build, transform and certify orientable graph embeddings")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the faces of an embedding and report its genus.
    Trace {
        emb: PathBuf,
        /// List every face.
        #[arg(long)]
        faces: bool,
    },
    /// Derive an embedding from a circuit log.
    Derive {
        log: PathBuf,
        /// Also attach the vortex letters as vertices.
        #[arg(long)]
        attach: bool,
        /// Output file (default: the log path with extension .emb).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check the construction principles of a log, with its current graph if given.
    CheckCurrent {
        log: PathBuf,
        /// Current graph (.cgr); needed for the principles that the log alone cannot decide.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Attach vortex letters to an embedding derived from a log.
    Attach {
        emb: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build the prism embedding of K_n x K_2 from an embedding and a facial cover.
    Prism {
        emb: PathBuf,
        /// Cover faces as canonical face indices, e.g. f0,f3.
        #[arg(long, value_delimiter = ',', conflicts_with = "cover_file")]
        cover: Vec<String>,
        /// Cover file (.cov), one face per line.
        #[arg(long)]
        cover_file: Option<PathBuf>,
        #[arg(short, long, default_value = "out.emb")]
        out: PathBuf,
    },
    /// Check that a prism embedding is snug.
    Snug { emb: PathBuf },
    /// Cut a snug prism into its two sides with their patchworks.
    Slice {
        emb: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Split the repeated vertex of the single hexagonal face.
    Split {
        emb: PathBuf,
        #[arg(long, default_value = "u")]
        u: String,
        #[arg(long, default_value = "v")]
        v: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a transformation script, checking counts after every step.
    Transform {
        emb: PathBuf,
        script: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// List the count ledger of every step.
        #[arg(long)]
        audit: bool,
    },
    /// Search for a hexagon completion of K_n minus a triangle and run the
    /// prism pipeline on it.
    #[command(name = "complete-c9")]
    CompleteC9 {
        emb: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "x,y,z")]
        specials: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Enumerate embeddings of K_n at a genus that carry a requested cover.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        genus: usize,
        /// Shapes such as patchwork:4,5 or cover:2 (repeatable).
        #[arg(long = "shapes", num_args = 1..)]
        shapes: Vec<String>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Re-expand pruned branches and count admissible leaves inside them.
        #[arg(long)]
        audit: bool,
        #[arg(long, default_value_t = 100)]
        max_findings: usize,
        /// Stop after this many tasks (resume later from the checkpoint).
        #[arg(long)]
        max_tasks: Option<usize>,
        /// Directory for finding .emb and .cov files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Lower bound and genus of K_n x K_2.
    Formula { n: u64 },
}

fn load_emb(r: &mut CommandReport, path: &Path) -> Result<RotationSystem> {
    let text = r.read(path)?;
    text.parse().with_context(|| format!("in {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into())
}

fn shape_counts(r: &mut CommandReport, rs: &RotationSystem, prefix: &str) {
    let fs = rs.trace_faces();
    r.count(&format!("{prefix}vertices"), rs.vertex_count());
    r.count(&format!("{prefix}edges"), rs.edge_count());
    r.count(&format!("{prefix}faces"), fs.faces.len());
    r.genus(if prefix.is_empty() { "embedding" } else { prefix.trim_end_matches('_') }, fs.genus());
}

fn histogram(rs: &RotationSystem) -> String {
    let fs = rs.trace_faces();
    let parts: Vec<String> = fs
        .length_histogram()
        .into_iter()
        .map(|(l, c)| if c == 1 { l.to_string() } else { format!("{l}^{c}") })
        .collect();
    format!("face lengths {}", parts.join(" "))
}

fn trace(r: &mut CommandReport, emb: &Path, faces: bool) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let fs = rs.trace_faces();
    shape_counts(r, &rs, "");
    r.flag("triangular", fs.is_triangular());
    r.flag("complete", rs.is_complete());
    r.verdict("euler", prismatic::embedding::euler_genus(&fs).is_ok());
    r.detail(histogram(&rs));
    if faces {
        for (i, f) in fs.faces.iter().enumerate() {
            r.detail(format!("f{i} [{}]", f.corner_labels(&rs).collect::<Vec<_>>().join(" ")));
        }
    }
    Ok(())
}

fn derive_cmd(r: &mut CommandReport, log_path: &Path, attach: bool, out: Option<PathBuf>) -> Result<()> {
    let log = parse_log(&r.read(log_path)?).with_context(|| format!("in {}", log_path.display()))?;
    let mut rs = derive(&log)?;
    if attach {
        rs = attach_vortices(&rs, &log)?;
    }
    let fs = rs.trace_faces();
    shape_counts(r, &rs, "");
    r.flag("triangular", fs.is_triangular());
    r.flag("complete", rs.is_complete());
    r.detail(histogram(&rs));
    let out = out.unwrap_or_else(|| log_path.with_extension("emb"));
    r.write(&out, &rs.to_string())
}

fn check_current(r: &mut CommandReport, log_path: &Path, graph: Option<PathBuf>) -> Result<()> {
    let log = parse_log(&r.read(log_path)?).with_context(|| format!("in {}", log_path.display()))?;
    let cg = match graph {
        Some(p) => Some(parse_current_graph(&r.read(&p)?).with_context(|| format!("in {}", p.display()))?),
        None => None,
    };
    r.count("modulus", log.modulus());
    r.count("index", log.index());
    let reports = match log.index() {
        1 => check_index1(&log, cg.as_ref()),
        3 => check_index3(cg.as_ref().ok_or_else(|| anyhow!("an index-3 log needs --graph"))?),
        k => bail!("logs of index {k} are not supported"),
    };
    for p in reports {
        match p.verdict {
            Verdict::NotCheckable => r.detail(format!("{} not checkable without the current graph", p.principle)),
            v => r.verdict(&p.principle.to_string(), v == Verdict::Pass),
        }
        for w in p.witnesses {
            r.detail(format!("{}: {w}", p.principle));
        }
    }
    Ok(())
}

fn attach_cmd(r: &mut CommandReport, emb: &Path, log_path: &Path, out: Option<PathBuf>) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let log = parse_log(&r.read(log_path)?).with_context(|| format!("in {}", log_path.display()))?;
    let done = attach_vortices(&rs, &log)?;
    shape_counts(r, &done, "");
    r.flag("triangular", done.trace_faces().is_triangular());
    let out = out.unwrap_or_else(|| emb.with_file_name(format!("{}.attached.emb", stem(emb))));
    r.write(&out, &done.to_string())
}

fn prism_cmd(r: &mut CommandReport, emb: &Path, cover: &[String], cover_file: Option<PathBuf>, out: &Path) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let fs = rs.trace_faces();
    let cover = match cover_file {
        Some(p) => parse_cover(&rs, &fs, &r.read(&p)?).with_context(|| format!("in {}", p.display()))?,
        None if cover.is_empty() => bail!("give --cover or --cover-file"),
        None => FacialCover::new(
            cover
                .iter()
                .map(|t| t.trim().trim_start_matches('f').parse::<usize>().map_err(|_| anyhow!("bad face {t:?}")))
                .collect::<Result<_>>()?,
        ),
    };
    let check = is_facial_cover(&rs, &fs, &cover);
    r.verdict("facial_cover", check.ok);
    for w in check.witnesses {
        r.detail(w);
    }
    if !r.passed() {
        return Ok(());
    }
    r.flag("patchwork", is_patchwork(&rs, &fs, &cover).ok);
    r.count("cover_faces", cover.len());
    r.genus("input", fs.genus());
    let prism = build_prism(&rs, &cover)?;
    let n = rs.vertex_count() as u64;
    shape_counts(r, &prism, "prism_");
    r.genus("lower_bound", lower_bound(n)?);
    r.flag("snug", check_snug(&prism)?.snug);
    r.write(out, &prism.to_string())
}

fn snug_cmd(r: &mut CommandReport, emb: &Path) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let rep = check_snug(&rs)?;
    r.count("n", rep.n);
    r.count("faces", rep.face_count);
    r.genus("prism", rep.genus);
    r.genus("lower_bound", lower_bound(rep.n as u64)?);
    r.genus("formula", genus_formula(rep.n as u64)?);
    r.verdict("snug", rep.snug);
    for w in rep.witnesses {
        r.detail(w);
    }
    Ok(())
}

fn slice_cmd(r: &mut CommandReport, emb: &Path, out_dir: &Path) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let rep = check_snug(&rs)?;
    r.verdict("snug", rep.snug);
    if !rep.snug {
        for w in rep.witnesses {
            r.detail(w);
        }
        return Ok(());
    }
    r.genus("prism", rep.genus);
    let sides = slice(&rs)?;
    let base = stem(emb);
    for (i, side) in sides.iter().enumerate() {
        let check = is_patchwork(&side.embedding, &side.faces, &side.patchwork);
        r.verdict(&format!("side{i}_patchwork"), check.ok);
        for w in check.witnesses {
            r.detail(format!("side {i}: {w}"));
        }
        r.genus(&format!("side{i}"), side.faces.genus());
        r.count(&format!("side{i}_patchwork_faces"), side.patchwork.len());
        r.write(&out_dir.join(format!("{base}.side{i}.emb")), &side.embedding.to_string())?;
        r.write(
            &out_dir.join(format!("{base}.side{i}.cov")),
            &write_cover(&side.embedding, &side.faces, &side.patchwork),
        )?;
    }
    Ok(())
}

fn split_cmd(r: &mut CommandReport, emb: &Path, u: &str, v: &str, out: Option<PathBuf>) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let fs = rs.trace_faces();
    let (hex, w) = target_face(&rs, &fs)
        .ok_or_else(|| anyhow!("needs exactly one nontriangular face, a hexagon with a repeated vertex"))?;
    r.detail(format!("split {} on f{hex}", rs.label(w)));
    let split = rs.split_vertex(w, &fs.faces[hex], VertexId::new(u)?, VertexId::new(v)?)?;
    r.genus("input", fs.genus());
    shape_counts(r, &split, "split_");
    r.verdict("genus_drop", split.genus() + 1 == fs.genus());
    r.verdict("triangular", split.trace_faces().is_triangular());
    r.verdict("split_complete", split_complete_check(&split));
    let out = out.unwrap_or_else(|| emb.with_file_name(format!("{}.split.emb", stem(emb))));
    r.write(&out, &split.to_string())
}

fn transform_cmd(r: &mut CommandReport, emb: &Path, script: &Path, out: Option<PathBuf>, audit: bool) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let text = r.read(script)?;
    let script: TransformationScript = text.parse().context("in the script")?;
    r.count("steps", script.steps.len());
    r.genus("input", rs.genus());
    let run = match run_script(&rs, &script) {
        Ok(run) => run,
        Err(fail) => {
            if let prismatic::Error::Internal(_) = fail.error {
                r.verdict("ledger", false);
                r.detail(fail.to_string());
                return Ok(());
            }
            bail!("{fail}");
        }
    };
    r.verdict("ledger", run.trail.iter().all(|e| e.expected == e.traced));
    if audit {
        for e in &run.trail {
            r.detail(format!("{} {}: {} -> {}", e.step + 1, e.op, e.before, e.traced));
        }
    }
    shape_counts(r, &run.embedding, "output_");
    let out = out.unwrap_or_else(|| script_out(emb));
    r.write(&out, &run.embedding.to_string())
}

fn script_out(emb: &Path) -> PathBuf {
    emb.with_file_name(format!("{}.out.emb", stem(emb)))
}

fn complete_cmd(
    r: &mut CommandReport,
    emb: &Path,
    specials: &[String],
    budget: u64,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    let rs = load_emb(r, emb)?;
    let [a, b, c] = specials else { bail!("give three special vertices") };
    let completion = find_hexagon_completion(&rs, &[a.as_str(), b.as_str(), c.as_str()], budget, seed)?;
    r.genus("input", rs.genus());
    r.count("budget", budget);
    r.count("explored", completion.explored);
    r.count("patches", completion.patches);
    let found = completion.status == CompletionStatus::Found;
    r.verdict("completion_found", found);
    let Some(done) = completion.embedding else { return Ok(()) };
    let base = stem(emb);
    // replay the script from the input rather than trusting the search
    let replay = run_script(&rs, &completion.script).map_err(|f| anyhow!("{f}"))?;
    r.verdict("script_replays", replay.embedding.to_string() == done.to_string());
    r.write(&out_dir.join(format!("{base}.c9.tsf")), &completion.script.to_string())?;
    r.write(&out_dir.join(format!("{base}.c9.emb")), &replay.embedding.to_string())?;
    let (ledger, snug, prism) = finish_pipeline(&rs, &replay.embedding)?;
    r.genus("completed", ledger.completed);
    r.genus("split", ledger.split);
    r.genus("sliced", ledger.sliced);
    r.genus("prism", ledger.prism);
    r.genus("formula", ledger.expected);
    r.verdict("snug", snug.snug);
    r.verdict("genus_exact", u64::from(ledger.prism) == ledger.expected);
    r.write(&out_dir.join(format!("{base}.prism.emb")), &prism.to_string())
}

#[allow(clippy::too_many_arguments)]
fn search_cmd(
    r: &mut CommandReport,
    n: usize,
    genus: usize,
    shapes: &[String],
    budget: Option<u64>,
    threads: Option<usize>,
    checkpoint: Option<PathBuf>,
    audit: bool,
    max_findings: usize,
    max_tasks: Option<usize>,
    out_dir: Option<PathBuf>,
) -> Result<()> {
    let shapes: Vec<Shape> = shapes.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let mut spec = SearchSpec::new(n, genus, shapes);
    spec.budget = budget;
    spec.audit = audit;
    spec.max_findings = max_findings;
    spec.threads = thread_cap(threads);
    spec.checkpoint = checkpoint;
    spec.max_tasks = max_tasks;
    for v in spec.admissible() {
        r.detail(format!("admissible {v}"));
    }
    let out = search_patchworks(&spec)?;
    r.count("nodes", out.nodes);
    r.count("tasks_total", out.tasks_total);
    r.count("tasks_done", out.tasks_done);
    r.count("findings", out.findings_count);
    r.flag("complete", out.status == SearchStatus::Complete);
    r.flag("budget_exhausted", out.status == SearchStatus::BudgetExhausted);
    r.flag("interrupted", out.status == SearchStatus::Interrupted);
    for (v, c) in &out.leaves {
        r.detail(format!("leaves {v}: {c}"));
    }
    if audit {
        r.count("audit_nodes", out.audit_nodes);
        r.verdict("audit", out.audit_violations == 0);
    }
    let mut valid = true;
    for (i, f) in out.findings.iter().enumerate() {
        if let Err(e) = f.validate(genus) {
            valid = false;
            r.detail(format!("finding {i}: {e}"));
        }
        if let Some(dir) = &out_dir {
            r.write(&dir.join(format!("finding{i:03}.emb")), &f.embedding)?;
            r.write(&dir.join(format!("finding{i:03}.cov")), &f.cover)?;
        }
    }
    r.verdict("findings_valid", valid);
    Ok(())
}

fn formula_cmd(r: &mut CommandReport, n: u64) -> Result<()> {
    let bound = lower_bound(n)?;
    let genus = genus_formula(n)?;
    r.count("n", n);
    r.genus("lower_bound", bound);
    r.genus("formula", genus);
    r.flag("exception", genus != bound);
    // the bound recomputed by plain ceiling arithmetic
    let product = (n as i64 - 2) * (n as i64 - 3);
    let direct = if product <= 0 { 0 } else { ((product + 5) / 6) as u64 };
    r.verdict("bound_arithmetic", direct == bound);
    Ok(())
}

/// `--threads`, capped by `PRISMATIC_THREADS`.
fn thread_cap(requested: Option<usize>) -> Option<usize> {
    let env = std::env::var("PRISMATIC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&t| t > 0);
    match (requested, env) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn run(cli: Cli) -> Result<CommandReport> {
    let name = match &cli.command {
        Command::Trace { .. } => "trace",
        Command::Derive { .. } => "derive",
        Command::CheckCurrent { .. } => "check-current",
        Command::Attach { .. } => "attach",
        Command::Prism { .. } => "prism",
        Command::Snug { .. } => "snug",
        Command::Slice { .. } => "slice",
        Command::Split { .. } => "split",
        Command::Transform { .. } => "transform",
        Command::CompleteC9 { .. } => "complete-c9",
        Command::Search { .. } => "search",
        Command::Formula { .. } => "formula",
    };
    let mut r = CommandReport::new(name);
    match cli.command {
        Command::Trace { emb, faces } => trace(&mut r, &emb, faces)?,
        Command::Derive { log, attach, out } => derive_cmd(&mut r, &log, attach, out)?,
        Command::CheckCurrent { log, graph } => check_current(&mut r, &log, graph)?,
        Command::Attach { emb, log, out } => attach_cmd(&mut r, &emb, &log, out)?,
        Command::Prism { emb, cover, cover_file, out } => prism_cmd(&mut r, &emb, &cover, cover_file, &out)?,
        Command::Snug { emb } => snug_cmd(&mut r, &emb)?,
        Command::Slice { emb, out_dir } => slice_cmd(&mut r, &emb, &out_dir)?,
        Command::Split { emb, u, v, out } => split_cmd(&mut r, &emb, &u, &v, out)?,
        Command::Transform { emb, script, out, audit } => transform_cmd(&mut r, &emb, &script, out, audit)?,
        Command::CompleteC9 { emb, specials, budget, seed, out_dir } => {
            complete_cmd(&mut r, &emb, &specials, budget, seed, &out_dir)?
        }
        Command::Search { n, genus, shapes, budget, threads, checkpoint, audit, max_findings, max_tasks, out_dir } => {
            search_cmd(&mut r, n, genus, &shapes, budget, threads, checkpoint, audit, max_findings, max_tasks, out_dir)?
        }
        Command::Formula { n } => formula_cmd(&mut r, n)?,
    }
    r.stamp();
    Ok(r)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = thread_cap(None) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let json = cli.json;
    match run(cli) {
        Ok(report) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.to_text());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
