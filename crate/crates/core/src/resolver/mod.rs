//! Ambiguity resolution: turn each item between the bounds into a yes/no
//! verdict with a pluggable backend.

mod cache;
mod heuristic;
mod llm;
mod prompt;
mod verdict;

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cache::{CacheEntry, ResponseCache};
pub use heuristic::HeuristicResolver;
pub use llm::LlmHttpResolver;
pub use prompt::{build_prompt, prompt_hash, SYSTEM_MESSAGE, TEMPLATE_VERSION};
pub use verdict::parse_verdict;

use crate::ambiguity::{Ambiguity, AmbiguityKind};
use crate::error::{Error, Result};
use crate::flow::InformationFlow;
use crate::notebook::{CellSequence, CodeCell};
use crate::par::{try_map_ordered, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionRecord {
    pub ambiguity: Ambiguity,
    /// True when the name is an input (or output candidate) of the cell.
    pub verdict: bool,
    pub resolver_id: String,
    pub prompt_hash: String,
    pub raw_response: Option<String>,
    /// The backend's answer was unparseable and the verdict is the
    /// configured substitute.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub substituted: bool,
}

/// One question put to a backend.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub ambiguity: &'a Ambiguity,
    pub cell: &'a CodeCell,
    pub prompt: &'a str,
    pub prompt_hash: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    /// `None` when the raw response carries no recognizable yes/no.
    pub verdict: Option<bool>,
    pub raw_response: Option<String>,
}

impl Answer {
    pub fn of(verdict: bool, raw: impl Into<String>) -> Self {
        Self {
            verdict: Some(verdict),
            raw_response: Some(raw.into()),
        }
    }
}

pub trait Resolve: Send + Sync {
    fn id(&self) -> &str;
    fn answer(&self, query: &Query<'_>) -> Result<Answer>;
}

impl<R: Resolve + ?Sized> Resolve for Box<R> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        (**self).answer(query)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolverKind {
    LlmHttp,
    Heuristic,
    Replay,
    TruthOracle,
    AssumeYes,
    AssumeNo,
}

impl ResolverKind {
    pub const ALL: [ResolverKind; 6] = [
        ResolverKind::LlmHttp,
        ResolverKind::Heuristic,
        ResolverKind::Replay,
        ResolverKind::TruthOracle,
        ResolverKind::AssumeYes,
        ResolverKind::AssumeNo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResolverKind::LlmHttp => "llm-http",
            ResolverKind::Heuristic => "heuristic",
            ResolverKind::Replay => "replay",
            ResolverKind::TruthOracle => "truth-oracle",
            ResolverKind::AssumeYes => "assume-yes",
            ResolverKind::AssumeNo => "assume-no",
        }
    }
}

impl FromStr for ResolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown resolver `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnUnparseable {
    #[default]
    Fail,
    AssumeYes,
    AssumeNo,
}

impl FromStr for OnUnparseable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fail" => Ok(OnUnparseable::Fail),
            "assume-yes" => Ok(OnUnparseable::AssumeYes),
            "assume-no" => Ok(OnUnparseable::AssumeNo),
            _ => Err(Error::Config(format!("unknown on-unparseable policy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolverConfig {
    pub resolver: ResolverKind,
    pub endpoint_url: Option<String>,
    pub model_name: Option<String>,
    pub temperature: f64,
    pub on_unparseable: OnUnparseable,
    pub cache_path: Option<PathBuf>,
    /// Maximum number of questions in flight at once.
    pub concurrency: usize,
    pub timeout_secs: u64,
    /// Verdict of the heuristic resolver when no rule applies.
    pub heuristic_default: bool,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        Self {
            resolver: ResolverKind::AssumeNo,
            endpoint_url: None,
            model_name: None,
            temperature: 0.0,
            on_unparseable: OnUnparseable::Fail,
            cache_path: None,
            concurrency: 4,
            timeout_secs: 60,
            heuristic_default: false,
        }
    }
}

impl ResolverConfig {
    pub fn with_kind(resolver: ResolverKind) -> Self {
        Self {
            resolver,
            ..Self::default()
        }
    }

    /// Opens the configured cache file, if any.
    pub fn open_cache(&self) -> Result<Option<Arc<ResponseCache>>> {
        self.cache_path
            .as_ref()
            .map(|p| ResponseCache::open(p).map(Arc::new))
            .transpose()
    }
}

/// Builds the backend described by `config`. `truth` is needed only by the
/// truth oracle; answers of non-replay backends are recorded in `cache`.
pub fn make_resolver(
    config: &ResolverConfig,
    cache: Option<Arc<ResponseCache>>,
    truth: Option<&[InformationFlow]>,
) -> Result<Box<dyn Resolve>> {
    let record = |inner: Box<dyn Resolve>| -> Box<dyn Resolve> {
        match &cache {
            Some(c) => Box::new(Recording::new(inner, c.clone())),
            None => inner,
        }
    };
    Ok(match config.resolver {
        ResolverKind::LlmHttp => {
            let endpoint = config
                .endpoint_url
                .clone()
                .ok_or_else(|| Error::Config("llm-http needs an endpoint URL".into()))?;
            let model = config.model_name.clone().unwrap_or_else(|| "gpt-4o".into());
            let api_key = std::env::var("CRABS_API_KEY").ok();
            record(Box::new(LlmHttpResolver::new(
                endpoint,
                model,
                config.temperature,
                api_key,
                config.timeout_secs,
            )))
        }
        ResolverKind::Heuristic => record(Box::new(HeuristicResolver::new(config.heuristic_default))),
        ResolverKind::Replay => {
            let cache = cache.ok_or_else(|| Error::Config("replay needs a cache file".into()))?;
            Box::new(ReplayResolver::new(cache))
        }
        ResolverKind::TruthOracle => {
            let truth = truth.ok_or_else(|| Error::Config("truth-oracle needs a ground-truth annotation".into()))?;
            record(Box::new(TruthOracle::new(truth)))
        }
        ResolverKind::AssumeYes => record(Box::new(FixedResolver::new(true))),
        ResolverKind::AssumeNo => record(Box::new(FixedResolver::new(false))),
    })
}

/// Resolves every ambiguity; records keep the input order.
pub fn resolve_all(
    ambiguities: &[Ambiguity],
    cells: &CellSequence,
    resolver: &dyn Resolve,
    config: &ResolverConfig,
) -> Result<Vec<ResolutionRecord>> {
    let exec = Execution::with_jobs(config.concurrency);
    try_map_ordered(exec, ambiguities, |a| {
        resolve_one(a, cells, resolver, config.on_unparseable)
    })
}

fn resolve_one(
    ambiguity: &Ambiguity,
    cells: &CellSequence,
    resolver: &dyn Resolve,
    on_unparseable: OnUnparseable,
) -> Result<ResolutionRecord> {
    let cell = cells
        .get(ambiguity.cell_index)
        .filter(|c| !c.skipped)
        .ok_or_else(|| Error::Config(format!("{ambiguity} does not name an analyzable cell")))?;
    let prompt = build_prompt(cell, ambiguity);
    let hash = prompt_hash(&prompt);
    let query = Query {
        ambiguity,
        cell,
        prompt: &prompt,
        prompt_hash: &hash,
    };
    let answer = resolver.answer(&query)?;
    let (verdict, substituted) = match (answer.verdict, on_unparseable) {
        (Some(v), _) => (v, false),
        (None, OnUnparseable::Fail) => {
            return Err(Error::UnparseableResponse {
                ambiguity: ambiguity.to_string(),
                raw: answer.raw_response.unwrap_or_default(),
            })
        }
        (None, OnUnparseable::AssumeYes) => (true, true),
        (None, OnUnparseable::AssumeNo) => (false, true),
    };
    if substituted {
        log::warn!("unparseable answer for {ambiguity}; using {verdict}");
    }
    Ok(ResolutionRecord {
        ambiguity: ambiguity.clone(),
        verdict,
        resolver_id: resolver.id().to_string(),
        prompt_hash: hash,
        raw_response: answer.raw_response,
        substituted,
    })
}

/// Always answers the same way: `true` reproduces the upper bound, `false`
/// the lower bound.
#[derive(Debug, Clone)]
pub struct FixedResolver {
    verdict: bool,
}

impl FixedResolver {
    pub fn new(verdict: bool) -> Self {
        Self { verdict }
    }
}

impl Resolve for FixedResolver {
    fn id(&self) -> &str {
        if self.verdict {
            "assume-yes"
        } else {
            "assume-no"
        }
    }

    fn answer(&self, _query: &Query<'_>) -> Result<Answer> {
        Ok(Answer::of(self.verdict, if self.verdict { "yes" } else { "no" }))
    }
}

/// Answers from annotated flows: a name is an input of cell `c` iff some
/// annotated flow ends at `c` with that name, an output iff one starts there.
#[derive(Debug, Clone)]
pub struct TruthOracle {
    flows: Vec<InformationFlow>,
}

impl TruthOracle {
    pub fn new(flows: &[InformationFlow]) -> Self {
        Self { flows: flows.to_vec() }
    }

    pub fn verdict(&self, ambiguity: &Ambiguity) -> bool {
        self.flows.iter().any(|f| {
            f.name == ambiguity.name
                && match ambiguity.kind {
                    AmbiguityKind::Input => f.target == ambiguity.cell_index,
                    AmbiguityKind::OutputCandidate => f.source == ambiguity.cell_index,
                }
        })
    }
}

impl Resolve for TruthOracle {
    fn id(&self) -> &str {
        "truth-oracle"
    }

    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        let v = self.verdict(query.ambiguity);
        Ok(Answer::of(v, if v { "yes" } else { "no" }))
    }
}

/// Serves answers only from the cache.
#[derive(Debug, Clone)]
pub struct ReplayResolver {
    cache: Arc<ResponseCache>,
}

impl ReplayResolver {
    pub fn new(cache: Arc<ResponseCache>) -> Self {
        Self { cache }
    }
}

impl Resolve for ReplayResolver {
    fn id(&self) -> &str {
        "replay"
    }

    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        let entry = self.cache.get(query.prompt_hash).ok_or_else(|| Error::CacheMiss {
            prompt_hash: query.prompt_hash.to_string(),
        })?;
        Ok(Answer {
            verdict: Some(entry.verdict),
            raw_response: entry.raw_response,
        })
    }
}

/// Consults the cache before the wrapped backend and stores every parsed
/// answer it gets back.
pub struct Recording<R> {
    inner: R,
    cache: Arc<ResponseCache>,
}

impl<R: Resolve> Recording<R> {
    pub fn new(inner: R, cache: Arc<ResponseCache>) -> Self {
        Self { inner, cache }
    }
}

impl<R: Resolve> Resolve for Recording<R> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        if let Some(entry) = self.cache.get(query.prompt_hash) {
            return Ok(Answer {
                verdict: Some(entry.verdict),
                raw_response: entry.raw_response,
            });
        }
        let answer = self.inner.answer(query)?;
        if let Some(verdict) = answer.verdict {
            self.cache.append(CacheEntry {
                prompt_hash: query.prompt_hash.to_string(),
                verdict,
                raw_response: answer.raw_response.clone(),
                resolver_id: self.inner.id().to_string(),
                template_version: TEMPLATE_VERSION.to_string(),
            })?;
        }
        Ok(answer)
    }
}
