//! HTTP transport contract with live, in-memory and record/replay backends.
//!
//! Fixture files live at `<dir>/<sha256(request)>.resp`: a status line
//! (`HTTP/1.1 200 OK`), a newline, then the raw response body. The hash is
//! taken over the canonical request text returned by
//! [`HttpRequest::canonical`].

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("no fixture for {method} {url} (expected {path})")]
    MissingFixture {
        method: String,
        url: String,
        path: PathBuf,
    },
    #[error("malformed fixture {path}: {reason}")]
    MalformedFixture { path: PathBuf, reason: String },
    #[error("fixture io error: {0}")]
    Io(#[from] io::Error),
    #[error("request to {url} failed: {reason}")]
    Network { url: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpRequest {
    pub method: String,
    pub url: String,
    pub body: Option<String>,
}

impl HttpRequest {
    pub fn get(url: impl Into<String>) -> Self {
        Self {
            method: "GET".into(),
            url: url.into(),
            body: None,
        }
    }

    pub fn post_json(url: impl Into<String>, body: impl Into<String>) -> Self {
        Self {
            method: "POST".into(),
            url: url.into(),
            body: Some(body.into()),
        }
    }

    /// `METHOD url` followed by `\n` and the body when there is one.
    pub fn canonical(&self) -> String {
        match &self.body {
            Some(body) => format!("{} {}\n{}", self.method, self.url, body),
            None => format!("{} {}", self.method, self.url),
        }
    }

    /// Lowercase hex sha256 of [`Self::canonical`].
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

impl HttpResponse {
    pub fn ok(body: impl Into<String>) -> Self {
        Self {
            status: 200,
            body: body.into(),
        }
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    /// Serializes into the fixture file format.
    pub fn to_fixture(&self) -> String {
        format!(
            "HTTP/1.1 {} {}\n{}",
            self.status,
            reason_phrase(self.status),
            self.body
        )
    }

    pub fn from_fixture(contents: &str) -> Result<Self, String> {
        let (status_line, body) = contents.split_once('\n').unwrap_or((contents, ""));
        let mut parts = status_line.trim_end_matches('\r').split(' ');
        let proto = parts.next().unwrap_or_default();
        if !proto.starts_with("HTTP/") {
            return Err(format!("bad status line {status_line:?}"));
        }
        let status = parts
            .next()
            .and_then(|s| s.parse::<u16>().ok())
            .ok_or_else(|| format!("bad status code in {status_line:?}"))?;
        Ok(Self {
            status,
            body: body.to_owned(),
        })
    }
}

fn reason_phrase(status: u16) -> &'static str {
    match status {
        200 => "OK",
        201 => "Created",
        204 => "No Content",
        400 => "Bad Request",
        404 => "Not Found",
        500 => "Internal Server Error",
        502 => "Bad Gateway",
        503 => "Service Unavailable",
        _ => "Unknown",
    }
}

pub trait Transport: Send + Sync {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        (**self).send(request)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        (**self).send(request)
    }
}

/// Replays recorded responses from a fixture directory. Read-only.
#[derive(Debug, Clone)]
pub struct FixtureTransport {
    dir: PathBuf,
}

impl FixtureTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(dir: &Path, request: &HttpRequest) -> PathBuf {
        dir.join(format!("{}.resp", request.fingerprint()))
    }
}

impl Transport for FixtureTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let path = Self::path_for(&self.dir, request);
        let contents = match fs::read_to_string(&path) {
            Ok(c) => c,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(TransportError::MissingFixture {
                    method: request.method.clone(),
                    url: request.url.clone(),
                    path,
                })
            }
            Err(e) => return Err(e.into()),
        };
        HttpResponse::from_fixture(&contents)
            .map_err(|reason| TransportError::MalformedFixture { path, reason })
    }
}

/// Forwards to `inner` and writes every response into the fixture directory.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { inner, dir })
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let response = self.inner.send(request)?;
        fs::write(
            FixtureTransport::path_for(&self.dir, request),
            response.to_fixture(),
        )?;
        Ok(response)
    }
}

/// In-memory routes keyed by request fingerprint. Unrouted requests fail
/// like a missing fixture.
#[derive(Debug, Default)]
pub struct MemoryTransport {
    routes: HashMap<String, HttpResponse>,
    log: Mutex<Vec<HttpRequest>>,
}

impl MemoryTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn route(mut self, request: HttpRequest, response: HttpResponse) -> Self {
        self.routes.insert(request.fingerprint(), response);
        self
    }

    /// Requests seen so far, in order.
    pub fn requests(&self) -> Vec<HttpRequest> {
        self.log.lock().expect("log lock").clone()
    }
}

impl Transport for MemoryTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        self.log.lock().expect("log lock").push(request.clone());
        self.routes
            .get(&request.fingerprint())
            .cloned()
            .ok_or_else(|| TransportError::MissingFixture {
                method: request.method.clone(),
                url: request.url.clone(),
                path: PathBuf::from(format!("memory:{}", request.fingerprint())),
            })
    }
}

/// Blocking HTTP transport for live providers.
pub struct LiveTransport {
    agent: ureq::Agent,
    headers: Vec<(String, String)>,
}

impl LiveTransport {
    pub fn new() -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(std::time::Duration::from_secs(30)))
            .build()
            .into();
        Self {
            agent,
            headers: Vec::new(),
        }
    }

    /// Adds a header sent with every request (e.g. an API key).
    pub fn with_header(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.headers.push((name.into(), value.into()));
        self
    }
}

impl Default for LiveTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for LiveTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let network = |reason: String| TransportError::Network {
            url: request.url.clone(),
            reason,
        };
        let result = match (request.method.as_str(), &request.body) {
            ("GET", _) => {
                let mut req = self.agent.get(&request.url);
                for (k, v) in &self.headers {
                    req = req.header(k, v);
                }
                req.call()
            }
            (_, body) => {
                let mut req = self.agent.post(&request.url);
                for (k, v) in &self.headers {
                    req = req.header(k, v);
                }
                req.header("content-type", "application/json")
                    .send(body.clone().unwrap_or_default())
            }
        };
        let mut response = result.map_err(|e| network(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| network(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    #[test]
    fn fingerprint_covers_method_url_and_body() {
        let a = HttpRequest::get("https://x/a");
        let b = HttpRequest::post_json("https://x/a", "{}");
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
        assert_eq!(
            HttpRequest::get("abc").fingerprint(),
            // sha256("GET abc")
            hex::encode(Sha256::digest(b"GET abc"))
        );
    }

    #[test]
    fn fixture_format_parses_status_and_body() {
        let r = HttpResponse::from_fixture("HTTP/1.1 404 Not Found\nline1\nline2").unwrap();
        assert_eq!(r.status, 404);
        assert_eq!(r.body, "line1\nline2");
        assert!(HttpResponse::from_fixture("garbage").is_err());
        let original = HttpResponse::ok("{\"a\":1}\n");
        assert_eq!(
            HttpResponse::from_fixture(&original.to_fixture()).unwrap(),
            original
        );
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let req = HttpRequest::get("https://example.test/page");
        let memory = MemoryTransport::new().route(req.clone(), HttpResponse::ok("hello"));
        let recorder = RecordingTransport::new(memory, dir.path()).unwrap();
        assert_eq!(recorder.send(&req).unwrap().body, "hello");

        let replay = FixtureTransport::new(dir.path());
        assert_eq!(replay.send(&req).unwrap(), HttpResponse::ok("hello"));
        let missing = replay.send(&HttpRequest::get("https://example.test/other"));
        assert!(matches!(
            missing,
            Err(TransportError::MissingFixture { .. })
        ));
    }

    #[test]
    fn live_transport_talks_http() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut content_length = 0;
            let mut api_key = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" {
                    break;
                }
                let lower = line.to_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    content_length = v.trim().parse().unwrap();
                }
                if let Some(v) = lower.strip_prefix("x-api-key:") {
                    api_key = v.trim().to_owned();
                }
            }
            let mut body = vec![0; content_length];
            reader.read_exact(&mut body).unwrap();
            let reply = format!(
                "{}|{}|{}",
                request_line.trim(),
                api_key,
                String::from_utf8(body).unwrap()
            );
            write!(
                stream,
                "HTTP/1.1 201 Created\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                reply.len(),
                reply
            )
            .unwrap();
        });
        let transport = LiveTransport::new().with_header("x-api-key", "secret");
        let resp = transport
            .send(&HttpRequest::post_json(
                format!("http://{addr}/hook"),
                "{\"k\":1}",
            ))
            .unwrap();
        server.join().unwrap();
        assert_eq!(resp.status, 201);
        assert_eq!(resp.body, "POST /hook HTTP/1.1|secret|{\"k\":1}");
    }

    #[test]
    fn live_transport_reports_connection_failure() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        drop(listener);
        let err = LiveTransport::new()
            .send(&HttpRequest::get(format!("http://{addr}/")))
            .unwrap_err();
        assert!(matches!(err, TransportError::Network { .. }));
    }
}
