use std::io::Write;
use std::path::{Path, PathBuf};

use devassist_core::config::Config;
use devassist_core::embed::{embed_text, EmbeddingVector};
use devassist_core::fusion::{assemble_context, estimate_tokens, score_items, ContextItem, ContextSource};
use devassist_core::index::{RecordMetadata, VectorIndex};
use devassist_core::layout::check_layout_xml;
use devassist_core::router::{
    build_mdp, expected_cost_breakdown, route as lookup, value_iteration, PolicyExport, RoutingState,
};
use devassist_core::sim::{
    canonical_json, compare_policies, generate_workload, run_simulation, solve_policy, PolicyKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{CliError, Status};

/// Extensions picked up by `index`. Anything the mini parser rejects is
/// embedded from its tokens instead.
const INDEXED_EXTENSIONS: &[&str] = &[
    "java", "kt", "kts", "scala", "groovy", "c", "h", "cc", "cpp", "hpp", "cs", "js", "ts", "go",
    "rs", "swift", "dart", "m", "mm", "py", "md", "txt",
];

pub fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        Some(p) => Ok(Config::load(p)?),
        None => Ok(Config::default()),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn json_or_die<T: Serialize>(value: &T) -> String {
    canonical_json(value).expect("report types serialize to JSON")
}

fn source_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::io(dir, "not a directory"));
    }
    let mut files = Vec::new();
    let walker = WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let indexed = entry.file_type().is_file()
            && entry
                .path()
                .extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| INDEXED_EXTENSIONS.contains(&x));
        if indexed {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}

fn relative_id(dir: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(dir).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub fn index(config: &Config, dir: &Path, cap: usize, out: &Path) -> Result<Status, CliError> {
    let bands = &config.embed;
    bands.validate().map_err(CliError::invalid)?;
    let files = source_files(dir)?;
    let (taken, over_cap) = files.split_at(files.len().min(cap));

    let embedded: Vec<(PathBuf, Result<(EmbeddingVector, bool, u32), String>)> = taken
        .par_iter()
        .map(|path| {
            let result = std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|text| {
                    let lines = text.lines().count().max(1) as u32;
                    embed_text(&text, bands)
                        .map(|(v, parsed)| (v, parsed, lines))
                        .map_err(|e| e.to_string())
                });
            (path.clone(), result)
        })
        .collect();

    let mut index = VectorIndex::new(bands.config_hash());
    let mut unreadable = Vec::new();
    for (path, result) in embedded {
        match result {
            Ok((vector, parsed, lines)) => {
                let meta = RecordMetadata {
                    path: path.to_string_lossy().into_owned(),
                    span: (1, lines),
                    source_kind: if parsed { "code" } else { "text" }.to_string(),
                };
                index.insert(&relative_id(dir, &path), &vector, meta)?;
            }
            Err(e) => unreadable.push((path, e)),
        }
    }
    index.save(out)?;
    println!("indexed {} files into {}", index.len(), out.display());

    if !over_cap.is_empty() {
        eprintln!(
            "warning: skipped {} files beyond the {cap}-file cap:",
            over_cap.len()
        );
        for p in over_cap {
            eprintln!("  {}", p.display());
        }
    }
    if !unreadable.is_empty() {
        eprintln!("warning: skipped {} unreadable files:", unreadable.len());
        for (p, e) in &unreadable {
            eprintln!("  {}: {e}", p.display());
        }
    }
    Ok(if over_cap.is_empty() && unreadable.is_empty() {
        Status::Ok
    } else {
        Status::Degraded
    })
}

/// A context item supplied on the command line, embedded on load.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtraItem {
    source: ContextSource,
    text: String,
    #[serde(default)]
    timestamp: f64,
    #[serde(default)]
    near_breakpoint: bool,
}

#[derive(Serialize)]
struct QueryEntry<'a> {
    source: ContextSource,
    weight: f64,
    text: &'a str,
}

#[derive(Serialize)]
struct QueryOutput<'a> {
    entries: Vec<QueryEntry<'a>>,
    total_tokens: u64,
}

fn hit_text(meta: &RecordMetadata) -> String {
    let body = std::fs::read_to_string(&meta.path).unwrap_or_default();
    let (first, last) = meta.span;
    let lines: Vec<&str> = body
        .lines()
        .skip(first.saturating_sub(1) as usize)
        .take((last + 1).saturating_sub(first) as usize)
        .collect();
    if lines.is_empty() {
        format!("{}:{}-{}", meta.path, first, last)
    } else {
        format!("// {}\n{}", meta.path, lines.join("\n"))
    }
}

pub fn query(
    config: &Config,
    text: &str,
    top_k: usize,
    budget: i64,
    index_path: &Path,
    context: Option<&Path>,
    now: Option<f64>,
) -> Result<Status, CliError> {
    if budget < 0 {
        return Err(CliError::Invalid(format!("budget must be non-negative, got {budget}")));
    }
    let bands = &config.embed;
    let index = VectorIndex::load_expecting(index_path, &bands.config_hash())?;
    let (q, _) = embed_text(text, bands).map_err(CliError::invalid)?;

    let extras: Vec<ExtraItem> = match context {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    let now = now.unwrap_or_else(|| extras.iter().map(|e| e.timestamp).fold(0.0, f64::max));

    let mut items = Vec::new();
    for hit in index.search(&q, top_k).hits {
        let record = index
            .records()
            .iter()
            .find(|r| r.id == hit.id)
            .expect("hit ids come from the index");
        let text = hit_text(&hit.metadata);
        items.push(ContextItem {
            source: ContextSource::CodeContext,
            vector: EmbeddingVector::from_f32(&record.vector).map_err(CliError::invalid)?,
            token_cost: estimate_tokens(&text),
            text,
            timestamp: now,
            near_breakpoint: false,
        });
    }
    for e in extras {
        let (vector, _) = embed_text(&e.text, bands).map_err(CliError::invalid)?;
        items.push(ContextItem {
            source: e.source,
            vector,
            token_cost: estimate_tokens(&e.text),
            text: e.text,
            timestamp: e.timestamp,
            near_breakpoint: e.near_breakpoint,
        });
    }

    let fused = if items.is_empty() {
        None
    } else {
        let scored = score_items(&q, &items, &config.fusion, now).map_err(CliError::invalid)?;
        Some(assemble_context(&scored, budget).map_err(CliError::invalid)?)
    };
    let output = QueryOutput {
        entries: fused
            .iter()
            .flat_map(|f| &f.entries)
            .map(|e| QueryEntry {
                source: e.item.source,
                weight: e.weight,
                text: &e.item.text,
            })
            .collect(),
        total_tokens: fused.as_ref().map_or(0, |f| f.total_tokens),
    };
    print!("{}", json_or_die(&output));
    Ok(Status::Ok)
}

pub fn describe_layout(file: &Path) -> Result<Status, CliError> {
    let xml = read_text(file)?;
    let report = check_layout_xml(&xml).map_err(|e| CliError::Invalid(format!("{}: {e}", file.display())))?;
    #[derive(Serialize)]
    struct Out<'a> {
        statements: &'a [devassist_core::layout::LayoutStatement],
        findings: &'a [devassist_core::layout::Inconsistency],
    }
    print!(
        "{}",
        json_or_die(&Out {
            statements: &report.statements,
            findings: &report.findings,
        })
    );
    Ok(if report.findings.is_empty() {
        Status::Ok
    } else {
        Status::Degraded
    })
}

pub fn route(
    config: &Config,
    state: RoutingState,
    policy_path: Option<&Path>,
    save_policy: Option<&Path>,
) -> Result<Status, CliError> {
    let mdp = build_mdp(
        &config.device(),
        &config.network_model(),
        &config.cost_model(),
        &devassist_core::router::ComplexityMix(config.router.complexity_mix),
    )
    .map_err(CliError::invalid)?;
    let hash = config.router_hash();
    let policy = match policy_path {
        Some(p) => {
            let export: PolicyExport = serde_json::from_str(&read_text(p)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            if export.config_hash != hash {
                return Err(CliError::Invalid(format!(
                    "{} was solved for config {}, current config is {hash}",
                    p.display(),
                    export.config_hash
                )));
            }
            export.into_policy().map_err(CliError::invalid)?
        }
        None => value_iteration(&mdp.model, config.router.tolerance).map_err(CliError::invalid)?,
    };
    if let Some(p) = save_policy {
        write_file(p, json_or_die(&PolicyExport::from_policy(&policy, hash)).as_bytes())?;
    }
    let action = lookup(&policy, state);
    let cost = expected_cost_breakdown(&mdp, state, action).map_err(CliError::invalid)?;
    let weighted = mdp.cost.weigh(&cost);
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{action}");
    let _ = writeln!(out, "latency_ms: {}", cost.latency_ms);
    let _ = writeln!(out, "energy_units: {}", cost.energy_units);
    let _ = writeln!(out, "accuracy_loss: {}", cost.accuracy_loss);
    let _ = writeln!(out, "weighted_cost: {weighted}");
    let _ = writeln!(out, "state_value: {}", policy.value[state.index()]);
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    config_hash: String,
    metrics: &'a devassist_core::sim::MetricsReport,
}

pub fn simulate(
    config: &Config,
    seed: Option<u64>,
    policy: Option<PolicyKind>,
    out: &Path,
    events_path: Option<&Path>,
) -> Result<Status, CliError> {
    let mut sim = config.sim_config();
    if let Some(s) = seed {
        sim.seed = s;
    }
    if let Some(p) = policy {
        sim.policy = p;
    }
    let workload = generate_workload(&sim.workload, sim.seed).map_err(CliError::invalid)?;
    let solved = match sim.policy {
        PolicyKind::Mdp => Some(solve_policy(&sim).map_err(CliError::invalid)?),
        _ => None,
    };
    let outcome = run_simulation(&workload, &sim, solved.as_ref()).map_err(CliError::invalid)?;
    let report = SimulationReport {
        config_hash: devassist_core::fingerprint(&sim),
        metrics: &outcome.metrics,
    };
    write_file(out, json_or_die(&report).as_bytes())?;
    if let Some(p) = events_path {
        let mut lines = String::new();
        for e in &outcome.events {
            lines.push_str(&serde_json::to_string(e).expect("events serialize"));
            lines.push('\n');
        }
        write_file(p, lines.as_bytes())?;
    }
    let m = &outcome.metrics;
    println!(
        "{}: {} tasks, median {} ms, sub-second {:.4}, cloud calls {:.4}",
        m.policy, m.n_tasks, m.median_latency_ms, m.sub_second_fraction, m.cloud_call_fraction
    );
    Ok(Status::Ok)
}

pub fn compare(
    config: &Config,
    seed: Option<u64>,
    out: &Path,
    csv: Option<&Path>,
) -> Result<Status, CliError> {
    let mut base = config.sim_config();
    if let Some(s) = seed {
        base.seed = s;
    }
    if config.simulation.policies.is_empty() {
        return Err(CliError::Invalid("simulation.policies is empty".into()));
    }
    let workload = generate_workload(&base.workload, base.seed).map_err(CliError::invalid)?;
    let configs: Vec<_> = config.simulation.policies.iter().map(|p| base.with_policy(*p)).collect();
    let report = compare_policies(&workload, &configs).map_err(CliError::invalid)?;
    write_file(out, json_or_die(&report).as_bytes())?;
    let csv_path = csv.map(Path::to_path_buf).unwrap_or_else(|| out.with_extension("csv"));
    write_file(&csv_path, report.to_csv().as_bytes())?;
    for m in &report.reports {
        println!(
            "{}: median {} ms, sub-second {:.4}, cloud calls {:.4}",
            m.policy, m.median_latency_ms, m.sub_second_fraction, m.cloud_call_fraction
        );
    }
    Ok(Status::Ok)
}
