//! Client for a remote SPARQL endpoint.

use std::io::Read;
use std::sync::Mutex;
use std::thread::sleep;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::store::{from_results_json, QueryResult};

const RESULTS_MEDIA_TYPE: &str = "application/sparql-results+json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub url: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    /// Minimum gap between the start of consecutive requests.
    pub min_delay_ms: u64,
    pub user_agent: String,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: "https://query.wikidata.org/sparql".into(),
            timeout_secs: 60,
            max_retries: 3,
            min_delay_ms: 1000,
            user_agent: concat!("kbqa/", env!("CARGO_PKG_VERSION")).into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum EndpointError {
    #[error("endpoint answered HTTP {status}")]
    HttpError { status: u16 },
    #[error("request timed out")]
    Timeout,
    #[error("malformed results: {detail}")]
    MalformedResults { detail: String },
    #[error("transport failure: {detail}")]
    Transport { detail: String },
}

/// Shareable handle; requests from all threads are issued one at a time.
pub struct Endpoint {
    config: EndpointConfig,
    agent: ureq::Agent,
    last_request: Mutex<Option<Instant>>,
}

fn is_timeout(e: &ureq::Transport) -> bool {
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        if let Some(io) = s.downcast_ref::<std::io::Error>() {
            return matches!(io.kind(), std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock);
        }
        source = s.source();
    }
    e.to_string().contains("timed out")
}

impl Endpoint {
    pub fn new(config: EndpointConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(config.timeout_secs.max(1)))
            .user_agent(&config.user_agent)
            .build();
        Endpoint {
            config,
            agent,
            last_request: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn execute(&self, query: &str) -> Result<QueryResult, EndpointError> {
        let mut last = self.last_request.lock().unwrap_or_else(|p| p.into_inner());
        let min_gap = Duration::from_millis(self.config.min_delay_ms);
        let mut attempt = 0u32;
        loop {
            if let Some(t) = *last {
                let since = t.elapsed();
                if since < min_gap {
                    sleep(min_gap - since);
                }
            }
            *last = Some(Instant::now());
            let resp = self
                .agent
                .post(&self.config.url)
                .set("Accept", RESULTS_MEDIA_TYPE)
                .send_form(&[("query", query)]);
            match resp {
                Ok(r) => {
                    let mut body = String::new();
                    r.into_reader()
                        .read_to_string(&mut body)
                        .map_err(|e| EndpointError::MalformedResults { detail: e.to_string() })?;
                    return from_results_json(&body).map_err(|e| EndpointError::MalformedResults { detail: e.0 });
                }
                Err(ureq::Error::Status(429, r)) if attempt < self.config.max_retries => {
                    attempt += 1;
                    let hinted = r
                        .header("Retry-After")
                        .and_then(|v| v.trim().parse::<u64>().ok())
                        .map(Duration::from_secs);
                    let backoff = min_gap.max(Duration::from_millis(50)) * 2u32.saturating_pow(attempt - 1);
                    sleep(hinted.unwrap_or(backoff).min(Duration::from_secs(60)));
                }
                Err(ureq::Error::Status(status, _)) => return Err(EndpointError::HttpError { status }),
                Err(ureq::Error::Transport(t)) if is_timeout(&t) => return Err(EndpointError::Timeout),
                Err(ureq::Error::Transport(t)) => {
                    return Err(EndpointError::Transport { detail: t.to_string() })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    /// Serves the canned responses in order, one per connection.
    fn serve(responses: Vec<(u16, &'static str)>) -> (String, Arc<AtomicUsize>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/sparql", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let counter = hits.clone();
        std::thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                }
                let mut req_body = vec![0; len];
                reader.read_exact(&mut req_body).unwrap();
                counter.fetch_add(1, Ordering::SeqCst);
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: {RESULTS_MEDIA_TYPE}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
            }
        });
        (url, hits)
    }

    fn endpoint(url: String, retries: u32) -> Endpoint {
        Endpoint::new(EndpointConfig {
            url,
            timeout_secs: 5,
            max_retries: retries,
            min_delay_ms: 0,
            user_agent: "test".into(),
        })
    }

    #[test]
    fn ask_and_empty_select() {
        let (url, _) = serve(vec![
            (200, r#"{"head":{},"boolean":true}"#),
            (200, r#"{"head":{"vars":["a"]},"results":{"bindings":[]}}"#),
        ]);
        let ep = endpoint(url, 0);
        assert_eq!(ep.execute("ASK {}").unwrap(), QueryResult::Boolean(true));
        assert_eq!(
            ep.execute("SELECT ?a {}").unwrap(),
            QueryResult::Bindings {
                vars: vec!["a".into()],
                rows: vec![]
            }
        );
    }

    #[test]
    fn too_many_requests_is_retried_then_fails() {
        let (url, hits) = serve(vec![(429, ""), (429, ""), (429, "")]);
        let ep = endpoint(url, 2);
        assert_eq!(ep.execute("ASK {}"), Err(EndpointError::HttpError { status: 429 }));
        assert_eq!(hits.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn retry_recovers() {
        let (url, _) = serve(vec![(429, ""), (200, r#"{"head":{},"boolean":false}"#)]);
        assert_eq!(endpoint(url, 1).execute("ASK {}").unwrap(), QueryResult::Boolean(false));
    }

    #[test]
    fn bad_body_is_malformed() {
        let (url, _) = serve(vec![(200, "<html>")]);
        assert!(matches!(
            endpoint(url, 0).execute("ASK {}"),
            Err(EndpointError::MalformedResults { .. })
        ));
        let (url, _) = serve(vec![(500, "")]);
        assert_eq!(endpoint(url, 3).execute("ASK {}"), Err(EndpointError::HttpError { status: 500 }));
    }
}
