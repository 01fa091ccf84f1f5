use std::time::Duration;

use super::LlmError;

/// Sends one chat-completions request and returns the reply text.
pub trait Transport: Send + Sync {
    fn post_chat(&self, url: &str, token: &str, body: &serde_json::Value, timeout: Duration) -> Result<String, LlmError>;
}

/// Blocking HTTP transport.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

const BODY_EXCERPT: usize = 500;

fn excerpt(s: &str) -> String {
    s.chars().take(BODY_EXCERPT).collect()
}

fn is_timeout(err: &ureq::Transport) -> bool {
    let mut source = std::error::Error::source(err);
    while let Some(e) = source {
        if let Some(io) = e.downcast_ref::<std::io::Error>() {
            return matches!(io.kind(), std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock);
        }
        source = e.source();
    }
    false
}

/// Pull `choices[0].message.content` out of a response body.
pub fn reply_text(body: &serde_json::Value) -> Result<String, LlmError> {
    body.pointer("/choices/0/message/content")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| LlmError::Protocol("response has no choices[0].message.content".into()))
}

impl Transport for HttpTransport {
    fn post_chat(&self, url: &str, token: &str, body: &serde_json::Value, timeout: Duration) -> Result<String, LlmError> {
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        let resp = agent
            .post(url)
            .set("Authorization", &format!("Bearer {token}"))
            .send_json(body);
        match resp {
            Ok(r) => {
                let text = r.into_string().map_err(|e| LlmError::Protocol(e.to_string()))?;
                let v: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| LlmError::Protocol(format!("{e}: {}", excerpt(&text))))?;
                reply_text(&v)
            }
            Err(ureq::Error::Status(status, r)) => Err(LlmError::Transport {
                status: Some(status),
                body: excerpt(&r.into_string().unwrap_or_default()),
            }),
            Err(ureq::Error::Transport(t)) if is_timeout(&t) => Err(LlmError::Timeout(timeout.as_secs())),
            Err(ureq::Error::Transport(t)) => Err(LlmError::Transport {
                status: None,
                body: t.to_string(),
            }),
        }
    }
}
