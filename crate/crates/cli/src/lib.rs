//! Command implementations behind the `crabs` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crabs_core::eval::{aggregate, score_notebook, GroundTruth, MetricsReport};
use crabs_core::par::{map_ordered, Execution};
use crabs_core::resolver::{make_resolver, FixedResolver, Resolve, ResolverConfig, ResolverKind, ResponseCache};
use crabs_core::syntax::AnalyzerOptions;
use crabs_core::{dot, load_notebook, run_pipeline, EstimateMode, GraphDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ANALYSIS: i32 = 2;
pub const EXIT_RESOLVER: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Notebook {
        path: PathBuf,
        #[source]
        source: crabs_core::Error,
    },
    #[error(transparent)]
    Core(#[from] crabs_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Notebook { source, .. } | CliError::Core(source) if source.is_resolver_failure() => EXIT_RESOLVER,
            _ => EXIT_ANALYSIS,
        }
    }
}

fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError::Notebook {
        path: path.to_path_buf(),
        source: err.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Command {
    #[default]
    Analyze,
    Eval,
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum View {
    #[default]
    Flows,
    Deps,
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub command: Command,
    pub notebook_paths: Vec<PathBuf>,
    pub resolver: ResolverConfig,
    pub output_dir: PathBuf,
    pub export_format: ExportFormat,
    pub view: View,
    pub estimate_mode: EstimateMode,
    pub track_imports: bool,
    /// Notebooks analyzed at once.
    pub jobs: usize,
    /// Annotations for the truth-oracle resolver.
    pub truth_dir: Option<PathBuf>,
}

/// Reads every `*.json` annotation in `dir`, keyed by notebook id.
pub fn load_truth_dir(dir: &Path) -> Result<BTreeMap<String, GroundTruth>, CliError> {
    let mut out = BTreeMap::new();
    for path in json_files(dir)? {
        let truth = GroundTruth::load(&path).map_err(|source| CliError::Notebook { path, source })?;
        out.insert(truth.notebook_id.clone(), truth);
    }
    Ok(out)
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// The notebook id used for output names and annotation lookup: the file
/// stem.
pub fn notebook_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

#[derive(Debug, Default)]
pub struct AnalyzeSummary {
    pub written: Vec<PathBuf>,
    pub failures: Vec<CliError>,
}

impl AnalyzeSummary {
    /// Resolver failures outrank other failures.
    pub fn exit_code(&self) -> i32 {
        self.failures.iter().map(CliError::exit_code).max().unwrap_or(EXIT_OK)
    }
}

/// Analyzes every notebook and writes `<out>/<id>.json` for each. A failing
/// notebook is reported and the others continue.
pub fn run_analyze(config: &RunConfig) -> Result<AnalyzeSummary, CliError> {
    if config.notebook_paths.is_empty() {
        return Err(CliError::Usage("no notebooks given".into()));
    }
    fs::create_dir_all(&config.output_dir).map_err(|e| io_error(&config.output_dir, e))?;
    let truth = match &config.truth_dir {
        Some(dir) => load_truth_dir(dir)?,
        None => BTreeMap::new(),
    };
    let uses_resolver = config.estimate_mode == EstimateMode::Resolved;
    let cache = if uses_resolver {
        config.resolver.open_cache()?
    } else {
        None
    };
    let oracle = config.resolver.resolver == ResolverKind::TruthOracle;
    // One backend shared by every notebook, except the oracle which needs
    // each notebook's annotation.
    let shared = if uses_resolver && !oracle {
        Some(make_resolver(&config.resolver, cache.clone(), None)?)
    } else {
        None
    };
    let options = AnalyzerOptions {
        track_imports: config.track_imports,
    };

    let results = map_ordered(Execution::with_jobs(config.jobs), &config.notebook_paths, |path| {
        analyze_one(path, config, &options, shared.as_deref(), &cache, &truth)
    });

    let mut summary = AnalyzeSummary::default();
    for r in results {
        match r {
            Ok(p) => summary.written.push(p),
            Err(e) => {
                log::error!("{e}");
                summary.failures.push(e);
            }
        }
    }
    Ok(summary)
}

fn analyze_one(
    path: &Path,
    config: &RunConfig,
    options: &AnalyzerOptions,
    shared: Option<&dyn Resolve>,
    cache: &Option<Arc<ResponseCache>>,
    truth: &BTreeMap<String, GroundTruth>,
) -> Result<PathBuf, CliError> {
    let id = notebook_id(path);
    let fail = |source: crabs_core::Error| CliError::Notebook {
        path: path.to_path_buf(),
        source,
    };
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    let cells = load_notebook(&bytes, id.clone()).map_err(fail)?;

    let owned;
    let resolver: &dyn Resolve = match shared {
        Some(r) => r,
        None => {
            let flows = truth.get(&id).map(|t| t.flows.as_slice());
            owned = if config.estimate_mode == EstimateMode::Resolved {
                make_resolver(&config.resolver, cache.clone(), flows).map_err(fail)?
            } else {
                Box::new(FixedResolver::new(false))
            };
            owned.as_ref()
        }
    };
    let result = run_pipeline(&cells, options, config.estimate_mode, resolver, &config.resolver).map_err(fail)?;
    let text = result.document().to_json().map_err(fail)?;
    let out = config.output_dir.join(format!("{id}.json"));
    fs::write(&out, text).map_err(|e| io_error(&out, e))?;
    Ok(out)
}

/// Scores every graph document in `pred_dir` against the annotation with the
/// same notebook id in `truth_dir` and writes the report to `out`.
pub fn run_eval(pred_dir: &Path, truth_dir: &Path, out: &Path) -> Result<MetricsReport, CliError> {
    let truth = load_truth_dir(truth_dir)?;
    let mut scores = BTreeMap::new();
    let mut missing = BTreeMap::new();
    for path in json_files(pred_dir)? {
        let doc = match fs::read_to_string(&path)
            .map_err(crabs_core::Error::from)
            .and_then(|t| GraphDocument::from_json(&t))
        {
            Ok(d) => d,
            Err(e) => {
                log::error!("{}: {e}", path.display());
                missing.insert(notebook_id(&path), e.to_string());
                continue;
            }
        };
        let Some(t) = truth.get(&doc.notebook_id) else {
            let msg = format!("no annotation for notebook `{}`", doc.notebook_id);
            log::error!("{msg}");
            missing.insert(doc.notebook_id.clone(), msg);
            continue;
        };
        match score_notebook(&doc.flow_graph(), t, &doc.resolutions) {
            Ok(s) => {
                scores.insert(doc.notebook_id.clone(), s);
            }
            Err(e) => {
                log::error!("{}: {e}", doc.notebook_id);
                missing.insert(doc.notebook_id.clone(), e.to_string());
            }
        }
    }
    let mut report = aggregate(scores)?;
    report.incomplete = !missing.is_empty();
    report.missing = missing;
    let mut text = serde_json::to_string_pretty(&report).map_err(crabs_core::Error::from)?;
    text.push('\n');
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(out, text).map_err(|e| io_error(out, e))?;
    Ok(report)
}

/// Renders one view of a graph document.
pub fn run_export(graph: &Path, format: ExportFormat, view: View) -> Result<String, CliError> {
    let text = fs::read_to_string(graph).map_err(|e| io_error(graph, e))?;
    let doc = GraphDocument::from_json(&text).map_err(|source| CliError::Notebook {
        path: graph.to_path_buf(),
        source,
    })?;
    let rendered = match (format, view) {
        (ExportFormat::Dot, View::Flows) => dot::flows_to_dot(&doc),
        (ExportFormat::Dot, View::Deps) => dot::deps_to_dot(&doc),
        (ExportFormat::Json, View::Flows) => pretty(&doc.flow_graph())?,
        (ExportFormat::Json, View::Deps) => pretty(&doc.dependency_graph())?,
    };
    Ok(rendered)
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(crabs_core::Error::from)?;
    s.push('\n');
    Ok(s)
}
