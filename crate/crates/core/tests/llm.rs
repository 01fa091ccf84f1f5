mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::time::Duration;

use common::*;
use har_pioneer::llm::*;

/// Fails the test on any network attempt.
struct NoNetwork(Arc<AtomicUsize>);

impl Transport for NoNetwork {
    fn post_chat(&self, _: &str, _: &str, _: &serde_json::Value, _: Duration) -> Result<String, LlmError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        panic!("network access in a test that must stay offline");
    }
}

/// Answers every request with a canned reply and counts calls.
struct Canned(Arc<AtomicUsize>, String);

impl Transport for Canned {
    fn post_chat(&self, _: &str, _: &str, _: &serde_json::Value, _: Duration) -> Result<String, LlmError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        Ok(self.1.clone())
    }
}

fn replay_config() -> LlmConfig {
    LlmConfig {
        mode: Mode::Replay,
        cassette_dir: Some(fixtures().join("cassettes")),
        ..LlmConfig::default()
    }
}

#[test]
fn replay_returns_recorded_reply_without_network() {
    let calls = Arc::new(AtomicUsize::new(0));
    let client = LlmClient::with_transport(replay_config(), Box::new(NoNetwork(calls.clone()))).unwrap();
    let mut s = client.new_session(None);
    let reply = client.complete(&mut s, &rendered_prompts()["prompt_B.txt"]).unwrap();
    assert_eq!(reply, read_fixture("replies/sensors_B.txt"));
    assert_eq!(s.len(), 2);
    assert_eq!(s.messages()[1].role, Role::Assistant);

    // the feature prompt continues the variant-A chat
    let mut s = client.new_session(None);
    client.complete(&mut s, &rendered_prompts()["prompt_A.txt"]).unwrap();
    let f = client.complete(&mut s, &rendered_prompts()["prompt_feat.txt"]).unwrap();
    assert_eq!(f, read_fixture("replies/features.txt"));
    assert_eq!(s.len(), 4);
    assert_eq!(calls.load(Ordering::SeqCst), 0);
}

#[test]
fn replay_miss_names_the_fingerprint() {
    let client = LlmClient::with_transport(replay_config(), Box::new(NoNetwork(Default::default()))).unwrap();
    let mut s = client.new_session(None);
    match client.complete(&mut s, "an unknown prompt") {
        Err(LlmError::CassetteMiss(fp)) => assert_eq!(fp.len(), 64),
        other => panic!("{other:?}"),
    }
    assert!(s.is_empty());
}

#[test]
fn a_fresh_session_does_not_match_a_continued_one() {
    // same prompt text, different history, different fingerprint
    let client = LlmClient::with_transport(replay_config(), Box::new(NoNetwork(Default::default()))).unwrap();
    let mut s = client.new_session(None);
    assert!(matches!(
        client.complete(&mut s, &rendered_prompts()["prompt_feat.txt"]),
        Err(LlmError::CassetteMiss(_))
    ));
}

#[test]
fn record_then_replay_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var("HAR_TEST_TOKEN_RECORD", "secret-token-value");
    let calls = Arc::new(AtomicUsize::new(0));
    let config = LlmConfig {
        mode: Mode::Record,
        cassette_dir: Some(dir.path().into()),
        api_key_env: "HAR_TEST_TOKEN_RECORD".into(),
        ..LlmConfig::default()
    };
    let rec = LlmClient::with_transport(config.clone(), Box::new(Canned(calls.clone(), "first".into()))).unwrap();
    let mut s = rec.new_session(Some("system text"));
    assert_eq!(s.len(), 1);
    assert_eq!(rec.complete(&mut s, "q1").unwrap(), "first");
    assert_eq!(rec.complete(&mut s, "q2").unwrap(), "first");
    assert_eq!(calls.load(Ordering::SeqCst), 2);

    let replay = LlmClient::with_transport(
        LlmConfig { mode: Mode::Replay, ..config },
        Box::new(NoNetwork(Default::default())),
    )
    .unwrap();
    let mut r = replay.new_session(Some("system text"));
    replay.complete(&mut r, "q1").unwrap();
    replay.complete(&mut r, "q2").unwrap();
    assert_eq!(r.messages(), s.messages());

    let text = std::fs::read_to_string(dir.path().join(CASSETTE_FILE)).unwrap();
    assert!(!text.contains("secret-token-value"));
    assert!(!text.to_lowercase().contains("bearer"));
}

#[test]
fn sessions() {
    let client = LlmClient::with_transport(replay_config(), Box::new(NoNetwork(Default::default()))).unwrap();
    let a = client.new_session(None);
    let b = client.new_session(None);
    assert_eq!(a.len(), 0);
    assert_ne!(a.id(), b.id());
    let mut s = client.new_session(None);
    assert!(matches!(client.complete(&mut s, "   "), Err(LlmError::Session(_))));
}

#[test]
fn config_errors() {
    let no_dir = LlmConfig { cassette_dir: None, ..LlmConfig::default() };
    assert!(matches!(LlmClient::new(no_dir), Err(LlmError::Config(_))));
    let retries = LlmConfig { retries: 2, ..replay_config() };
    assert!(matches!(LlmClient::new(retries), Err(LlmError::Config(_))));

    let live = LlmConfig {
        mode: Mode::Live,
        api_key_env: "HAR_TEST_TOKEN_UNSET".into(),
        ..LlmConfig::default()
    };
    let calls = Arc::new(AtomicUsize::new(0));
    let client = LlmClient::with_transport(live, Box::new(Canned(calls.clone(), "x".into()))).unwrap();
    let mut s = client.new_session(None);
    assert!(matches!(client.complete(&mut s, "q"), Err(LlmError::Config(_))));
    assert_eq!(calls.load(Ordering::SeqCst), 0);
}

struct Seen {
    request_line: String,
    headers: Vec<String>,
    body: serde_json::Value,
}

/// One-shot HTTP server on localhost. Returns its base URL and a channel
/// with what it received.
fn mock_server(status: u16, body: &'static str, delay: Duration) -> (String, mpsc::Receiver<Seen>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut request_line = String::new();
        reader.read_line(&mut request_line).unwrap();
        let mut headers = Vec::new();
        let mut len = 0;
        loop {
            let mut h = String::new();
            reader.read_line(&mut h).unwrap();
            let h = h.trim_end().to_string();
            if h.is_empty() {
                break;
            }
            if let Some(v) = h.to_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap();
            }
            headers.push(h);
        }
        let mut buf = vec![0; len];
        reader.read_exact(&mut buf).unwrap();
        let _ = tx.send(Seen {
            request_line,
            headers,
            body: serde_json::from_slice(&buf).unwrap(),
        });
        std::thread::sleep(delay);
        let mut stream = stream;
        let _ = write!(
            stream,
            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
    });
    (url, rx)
}

fn live(url: &str, env: &str) -> LlmClient {
    std::env::set_var(env, "tok-123");
    LlmClient::new(LlmConfig {
        mode: Mode::Live,
        base_url: url.to_string(),
        api_key_env: env.into(),
        timeout_s: 1,
        ..LlmConfig::default()
    })
    .unwrap()
}

#[test]
fn live_posts_chat_completions_json() {
    let (url, rx) = mock_server(200, r#"{"choices":[{"message":{"role":"assistant","content":"hello"}}]}"#, Duration::ZERO);
    let client = live(&url, "HAR_TEST_TOKEN_LIVE");
    let mut s = client.new_session(Some("sys"));
    assert_eq!(client.complete(&mut s, "hi").unwrap(), "hello");
    let seen = rx.recv().unwrap();
    assert!(seen.request_line.starts_with("POST /chat/completions "));
    assert!(seen.headers.iter().any(|h| h == "Authorization: Bearer tok-123"));
    assert_eq!(
        seen.body,
        serde_json::json!({
            "model": "gpt-4",
            "temperature": 0.0,
            "messages": [{"role": "system", "content": "sys"}, {"role": "user", "content": "hi"}],
        })
    );
    assert_eq!(s.len(), 3);
}

#[test]
fn live_non_2xx_is_a_transport_error() {
    let (url, _rx) = mock_server(429, r#"{"error":"rate limited"}"#, Duration::ZERO);
    let client = live(&url, "HAR_TEST_TOKEN_429");
    let mut s = client.new_session(None);
    match client.complete(&mut s, "hi") {
        Err(LlmError::Transport { status, body }) => {
            assert_eq!(status, Some(429));
            assert!(body.contains("rate limited"));
        }
        other => panic!("{other:?}"),
    }
    assert!(s.is_empty());
}

#[test]
fn live_timeout() {
    let (url, _rx) = mock_server(200, "{}", Duration::from_secs(3));
    let client = live(&url, "HAR_TEST_TOKEN_TIMEOUT");
    let mut s = client.new_session(None);
    assert!(matches!(client.complete(&mut s, "hi"), Err(LlmError::Timeout(1))));
}

#[test]
fn live_malformed_response() {
    let (url, _rx) = mock_server(200, r#"{"choices":[]}"#, Duration::ZERO);
    let client = live(&url, "HAR_TEST_TOKEN_BAD");
    let mut s = client.new_session(None);
    assert!(matches!(client.complete(&mut s, "hi"), Err(LlmError::Protocol(_))));
}
