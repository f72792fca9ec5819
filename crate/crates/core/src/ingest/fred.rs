//! Client for the FRED `series/observations` endpoint.
//!
//! HTTP goes through the [`Transport`] trait so tests can script responses.
//! The process-wide offline switch makes [`HttpTransport`] refuse every
//! request; [`network_attempts`] counts requests that reached it at all.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Duration;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::series::{Frequency, Window};

use super::csv::{is_missing, parse_date, parse_value, CsvLoad};
use super::SeriesSpec;

pub const DEFAULT_BASE_URL: &str = "https://api.stlouisfed.org/fred";
pub const API_KEY_ENV: &str = "FRED_API_KEY";

static OFFLINE: AtomicBool = AtomicBool::new(false);
static ATTEMPTS: AtomicUsize = AtomicUsize::new(0);

/// Blocks (or re-allows) all HTTP issued through [`HttpTransport`].
pub fn set_offline(offline: bool) {
    OFFLINE.store(offline, Ordering::SeqCst);
}

pub fn is_offline() -> bool {
    OFFLINE.load(Ordering::SeqCst)
}

/// Requests that reached [`HttpTransport`] in this process, including refused ones.
pub fn network_attempts() -> usize {
    ATTEMPTS.load(Ordering::SeqCst)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Offline,
    Network(String),
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> std::result::Result<HttpResponse, TransportError>;
}

/// Blocking HTTP via `ureq`.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpTransport { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(30))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> std::result::Result<HttpResponse, TransportError> {
        ATTEMPTS.fetch_add(1, Ordering::SeqCst);
        if is_offline() {
            return Err(TransportError::Offline);
        }
        let mut resp = self.agent.get(url).call().map_err(|e| TransportError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Network(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles after each further failure.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(500) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct FredObservation {
    pub date: String,
    pub value: String,
}

#[derive(Debug, Deserialize)]
struct ObservationsBody {
    observations: Vec<FredObservation>,
}

#[derive(Debug, Deserialize)]
struct ErrorBody {
    error_message: String,
}

/// Raw response body plus its decoded observations.
#[derive(Debug, Clone, PartialEq)]
pub struct FredPayload {
    pub series_id: String,
    pub body: String,
    pub observations: Vec<FredObservation>,
}

pub fn parse_observations(body: &str) -> Result<Vec<FredObservation>> {
    Ok(serde_json::from_str::<ObservationsBody>(body)?.observations)
}

/// Converts a payload body to a series; `"."` values are dropped and counted.
pub fn payload_to_series(body: &str, spec: &SeriesSpec) -> Result<CsvLoad> {
    let observations = parse_observations(body)?;
    let mut points = Vec::with_capacity(observations.len());
    let mut dropped = 0;
    for (k, obs) in observations.iter().enumerate() {
        // observation index stands in for a line number
        let line = k as u64 + 1;
        let date = parse_date(&obs.date, line)?;
        if is_missing(&obs.value) {
            dropped += 1;
            continue;
        }
        points.push(crate::series::Observation::new(date, parse_value(&obs.value, line)?));
    }
    let raw = crate::series::TimeSeries::new(spec.id.clone(), spec.freq, spec.unit, points)?;
    Ok(CsvLoad { series: spec.finish(raw)?, dropped })
}

pub struct FredClient<T: Transport = HttpTransport> {
    base_url: String,
    api_key: String,
    transport: T,
    retry: RetryPolicy,
}

impl FredClient<HttpTransport> {
    /// Client using `FRED_API_KEY` and the public endpoint.
    pub fn from_env() -> Result<Self> {
        let key = std::env::var(API_KEY_ENV)
            .map_err(|_| Error::Config(format!("{API_KEY_ENV} is not set")))?;
        FredClient::new(DEFAULT_BASE_URL, &key, HttpTransport::default())
    }
}

impl<T: Transport> FredClient<T> {
    pub fn new(base_url: &str, api_key: &str, transport: T) -> Result<Self> {
        if api_key.trim().is_empty() {
            return Err(Error::Config("FRED API key is empty".into()));
        }
        Ok(FredClient {
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key: api_key.to_string(),
            transport,
            retry: RetryPolicy::default(),
        })
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn observations_url(&self, series_id: &str, window: Option<&Window>, freq: Option<Frequency>) -> String {
        let mut url = url::Url::parse(&format!("{}/series/observations", self.base_url))
            .expect("base url was validated as a URL prefix");
        {
            let mut q = url.query_pairs_mut();
            q.append_pair("series_id", series_id)
                .append_pair("api_key", &self.api_key)
                .append_pair("file_type", "json");
            if let Some(w) = window {
                q.append_pair("observation_start", &w.start().to_string())
                    .append_pair("observation_end", &w.end().to_string());
            }
            if let Some(f) = freq {
                q.append_pair("frequency", f.fred_code()).append_pair("aggregation_method", "avg");
            }
        }
        url.into()
    }

    /// Fetches observations, retrying 429 and 5xx responses and transport
    /// failures with exponential backoff. Other 4xx responses fail at once.
    pub fn fetch(&self, series_id: &str, window: Option<&Window>, freq: Option<Frequency>) -> Result<FredPayload> {
        url::Url::parse(&self.base_url).map_err(|e| Error::Config(format!("bad FRED base url: {e}")))?;
        let url = self.observations_url(series_id, window, freq);
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts {
            if attempt > 1 {
                std::thread::sleep(self.retry.base_delay * 2u32.pow(attempt - 2));
            }
            match self.transport.get(&url) {
                Err(TransportError::Offline) => return Err(Error::Offline),
                Err(TransportError::Network(e)) => {
                    log::warn!("FRED {series_id}: attempt {attempt} failed: {e}");
                    last = e;
                }
                Ok(resp) if resp.status == 200 => {
                    let observations = parse_observations(&resp.body)?;
                    return Ok(FredPayload { series_id: series_id.to_string(), body: resp.body, observations });
                }
                Ok(resp) if resp.status == 429 || resp.status >= 500 => {
                    log::warn!("FRED {series_id}: attempt {attempt} got HTTP {}", resp.status);
                    last = format!("HTTP {}", resp.status);
                }
                Ok(resp) => return Err(classify(series_id, resp)),
            }
        }
        Err(Error::NetworkExhausted { attempts: self.retry.max_attempts, last })
    }
}

fn classify(series_id: &str, resp: HttpResponse) -> Error {
    let message = serde_json::from_str::<ErrorBody>(&resp.body)
        .map(|b| b.error_message)
        .unwrap_or_else(|_| resp.body.chars().take(200).collect());
    let lower = message.to_ascii_lowercase();
    match resp.status {
        404 => Error::UnknownSeries(series_id.to_string()),
        400 if lower.contains("series does not exist") => Error::UnknownSeries(series_id.to_string()),
        400 | 401 | 403 => Error::Auth { status: resp.status, message },
        status => Error::Http { status, message },
    }
}
