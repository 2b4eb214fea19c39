//! Readability annotations from chat-completion LLM endpoints.
//!
//! Each unit text is inserted into one of four prompt templates, sent as a
//! single user message, and the reply is parsed into an integer on the
//! template's scale. Replies are cached on disk keyed by everything that
//! influences them, so reruns only contact the endpoint for new work.

pub mod cache;
pub mod error;
pub mod parse;
pub mod prompt;
pub mod provider;

use std::num::NonZeroU32;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use futures::{stream, StreamExt, TryStreamExt};
use governor::{DefaultDirectRateLimiter, Quota, RateLimiter};
use serde::{Deserialize, Serialize};

pub use cache::{cache_key, Cache, CacheEntry};
pub use error::{Error, ParseFailure, Result};
pub use parse::parse_response;
pub use prompt::{render_prompt, PromptSpec, Variant};
pub use provider::{Decoding, Endpoint, ProviderKind};

/// A unit to annotate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitText {
    pub unit_id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub decoding: Decoding,
    /// Extra attempts per unit after an unreadable reply or a retryable
    /// transport failure.
    pub retries: usize,
    /// Requests in flight at once.
    pub concurrency: usize,
    /// Sustained request rate of the token bucket.
    pub requests_per_second: u32,
    /// Bucket capacity.
    pub burst: u32,
    pub timeout_secs: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            decoding: Decoding::default(),
            retries: 2,
            concurrency: 4,
            requests_per_second: 5,
            burst: 5,
            timeout_secs: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationResult {
    pub unit_id: String,
    pub model_id: String,
    pub variant: Variant,
    pub raw_response: String,
    /// `None` when no attempt produced a valid answer.
    pub value: Option<i64>,
    pub attempts: usize,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRun {
    pub results: Vec<AnnotationResult>,
    /// HTTP requests sent during this run.
    pub requests: usize,
}

impl AnnotationRun {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.value.is_none()).count()
    }
}

struct Job<'a> {
    unit: &'a UnitText,
    prompt: String,
    key: String,
}

struct Client<'a> {
    http: reqwest::Client,
    endpoint: &'a Endpoint,
    spec: &'a PromptSpec,
    settings: &'a Settings,
    api_key: String,
    limiter: DefaultDirectRateLimiter,
    requests: AtomicUsize,
}

enum Outcome {
    Reply(String),
    Retryable(String),
}

impl Client<'_> {
    async fn send(&self, prompt: &str) -> std::result::Result<Outcome, String> {
        self.limiter.until_ready().await;
        self.requests.fetch_add(1, Ordering::Relaxed);
        let req = self
            .http
            .post(self.endpoint.url())
            .json(&self.endpoint.body(prompt, &self.settings.decoding));
        let resp = match self.endpoint.authorize(req, &self.api_key).send().await {
            Ok(r) => r,
            Err(e) => return Ok(Outcome::Retryable(e.to_string())),
        };
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Ok(Outcome::Retryable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(format!("HTTP {status}"));
        }
        let body: serde_json::Value = resp.json().await.map_err(|e| e.to_string())?;
        self.endpoint
            .extract(&body)
            .map(Outcome::Reply)
            .ok_or_else(|| "response has no message text".to_string())
    }

    async fn run(&self, job: &Job<'_>) -> Result<CacheEntry> {
        let max = 1 + self.settings.retries;
        let mut prompt = job.prompt.clone();
        let mut last_reply = None;
        let mut last_error = String::new();
        for attempt in 1..=max {
            let transport = |message: String| Error::Transport {
                unit_id: job.unit.unit_id.clone(),
                attempts: attempt,
                message,
            };
            match self.send(&prompt).await.map_err(transport)? {
                Outcome::Retryable(msg) => {
                    tracing::debug!(unit = %job.unit.unit_id, attempt, %msg, "retrying request");
                    last_error = msg;
                    tokio::time::sleep(Duration::from_millis(100 << attempt.min(6))).await;
                }
                Outcome::Reply(raw) => match parse_response(&raw, self.spec.output_range) {
                    Ok(value) => {
                        return Ok(CacheEntry {
                            raw_response: raw,
                            value: Some(value),
                            attempts: attempt,
                        })
                    }
                    Err(_) => {
                        if attempt == 1 {
                            prompt.push_str(&self.spec.repair_instruction());
                        }
                        last_reply = Some(raw);
                    }
                },
            }
        }
        match last_reply {
            Some(raw) => Ok(CacheEntry {
                raw_response: raw,
                value: None,
                attempts: max,
            }),
            None => Err(Error::Transport {
                unit_id: job.unit.unit_id.clone(),
                attempts: max,
                message: last_error,
            }),
        }
    }
}

/// Cache key of one unit under the given model, prompt and decoding.
pub fn unit_key(model_id: &str, spec: &PromptSpec, text: &str, decoding: &Decoding) -> String {
    let decoding = serde_json::to_vec(decoding).expect("decoding serializes");
    cache_key(&[
        model_id.as_bytes(),
        spec.variant.as_str().as_bytes(),
        spec.template().as_bytes(),
        text.as_bytes(),
        &decoding,
    ])
}

/// Annotates every unit, in input order.
///
/// Cache hits never touch the network, and the API key is only read when at
/// least one unit misses the cache. Replies that stay unreadable after all
/// retries are returned with `value: None` and cached like any other reply.
pub async fn annotate(
    units: &[UnitText],
    model_id: &str,
    spec: &PromptSpec,
    endpoint: &Endpoint,
    settings: &Settings,
    cache: &Cache,
) -> Result<AnnotationRun> {
    let mut slots: Vec<Option<AnnotationResult>> = Vec::with_capacity(units.len());
    let mut jobs = Vec::new();
    for unit in units {
        let prompt = spec.render(&unit.text)?;
        let key = unit_key(model_id, spec, &unit.text, &settings.decoding);
        match cache.get(&key)? {
            Some(hit) => slots.push(Some(result(unit, model_id, spec, hit, true))),
            None => {
                slots.push(None);
                jobs.push(Job { unit, prompt, key });
            }
        }
    }
    if jobs.is_empty() {
        return Ok(finish(slots, 0));
    }

    let api_key = std::env::var(&endpoint.api_key_env).map_err(|_| Error::MissingCredentials {
        var: endpoint.api_key_env.clone(),
        provider: format!("{:?}", endpoint.provider).to_lowercase(),
    })?;
    let nz = |v: u32, what: &str| {
        NonZeroU32::new(v).ok_or_else(|| Error::Config(format!("{what} must be positive")))
    };
    if settings.concurrency == 0 {
        return Err(Error::Config("concurrency must be positive".into()));
    }
    let quota = Quota::per_second(nz(settings.requests_per_second, "requests_per_second")?)
        .allow_burst(nz(settings.burst, "burst")?);
    let http = reqwest::Client::builder()
        .timeout(Duration::from_secs(settings.timeout_secs))
        .build()
        .map_err(|e| Error::Config(format!("HTTP client: {e}")))?;
    let client = Client {
        http,
        endpoint,
        spec,
        settings,
        api_key,
        limiter: RateLimiter::direct(quota),
        requests: AtomicUsize::new(0),
    };

    let fresh: Vec<AnnotationResult> = stream::iter(jobs.iter())
        .map(|job| async {
            let entry = client.run(job).await?;
            cache.put(&job.key, &entry)?;
            Ok::<_, Error>(result(job.unit, model_id, spec, entry, false))
        })
        .buffered(settings.concurrency)
        .try_collect()
        .await?;

    let mut fresh = fresh.into_iter();
    for slot in slots.iter_mut().filter(|s| s.is_none()) {
        *slot = fresh.next();
    }
    let run = finish(slots, client.requests.load(Ordering::Relaxed));
    let failed = run.failures();
    if failed > 0 {
        tracing::warn!(failed, model_id, "units without a valid answer");
    }
    Ok(run)
}

fn result(
    unit: &UnitText,
    model_id: &str,
    spec: &PromptSpec,
    e: CacheEntry,
    cached: bool,
) -> AnnotationResult {
    AnnotationResult {
        unit_id: unit.unit_id.clone(),
        model_id: model_id.to_string(),
        variant: spec.variant,
        raw_response: e.raw_response,
        value: e.value,
        attempts: e.attempts,
        cached,
    }
}

fn finish(slots: Vec<Option<AnnotationResult>>, requests: usize) -> AnnotationRun {
    AnnotationRun {
        results: slots.into_iter().map(|s| s.expect("every slot filled")).collect(),
        requests,
    }
}

/// Writes `unit_id,model_id,variant,value`; failed units get an empty value.
pub fn write_annotations(path: impl AsRef<Path>, results: &[AnnotationResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["unit_id", "model_id", "variant", "value"])?;
    for r in results {
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([r.unit_id.as_str(), &r.model_id, r.variant.as_str(), &value])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.as_ref().to_path_buf(),
        source,
    })
}
