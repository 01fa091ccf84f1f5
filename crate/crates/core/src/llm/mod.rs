//! Chat-completions client with live, record and replay modes.

mod cassette;
mod session;
mod transport;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub use cassette::{request_fingerprint, Cassette, CassetteEntry, CASSETTE_FILE};
pub use session::{ChatSession, Message, Role};
pub use transport::{reply_text, HttpTransport, Transport};

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("no recorded reply for request {0}")]
    CassetteMiss(String),
    #[error("cassette: {0}")]
    Cassette(String),
    #[error("HTTP error{}: {body}", status.map(|s| format!(" {s}")).unwrap_or_default())]
    Transport { status: Option<u16>, body: String },
    #[error("request timed out after {0} s")]
    Timeout(u64),
    #[error("bad response: {0}")]
    Protocol(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("session: {0}")]
    Session(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Record,
    #[default]
    Replay,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "live" => Ok(Mode::Live),
            "record" => Ok(Mode::Record),
            "replay" => Ok(Mode::Replay),
            _ => Err(format!("unknown mode `{s}` (expected live, record or replay)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_s: u64,
    pub mode: Mode,
    pub cassette_dir: Option<PathBuf>,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    /// Extra attempts after a timeout or 5xx, at most 1.
    pub retries: u8,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4".into(),
            temperature: 0.0,
            timeout_s: 120,
            mode: Mode::Replay,
            cassette_dir: None,
            api_key_env: "OPENAI_API_KEY".into(),
            retries: 0,
        }
    }
}

pub struct LlmClient {
    config: LlmConfig,
    transport: Box<dyn Transport>,
    cassette: Option<Arc<Cassette>>,
}

impl std::fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmClient").field("config", &self.config).finish_non_exhaustive()
    }
}

impl LlmClient {
    pub fn new(config: LlmConfig) -> Result<Self, LlmError> {
        Self::with_transport(config, Box::new(HttpTransport))
    }

    pub fn with_transport(config: LlmConfig, transport: Box<dyn Transport>) -> Result<Self, LlmError> {
        if config.retries > 1 {
            return Err(LlmError::Config("retries must be 0 or 1".into()));
        }
        let cassette = match (config.mode, &config.cassette_dir) {
            (Mode::Live, _) => None,
            (_, Some(dir)) => Some(Arc::new(Cassette::open(dir)?)),
            (_, None) => return Err(LlmError::Config("record and replay modes need a cassette directory".into())),
        };
        Ok(Self {
            config,
            transport,
            cassette,
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    pub fn new_session(&self, system_text: Option<&str>) -> ChatSession {
        ChatSession::new(&self.config.model, self.config.temperature, system_text)
    }

    /// Send `prompt` as the next user turn and append both turns on success.
    pub fn complete(&self, session: &mut ChatSession, prompt: &str) -> Result<String, LlmError> {
        if prompt.trim().is_empty() {
            return Err(LlmError::Session("empty prompt".into()));
        }
        if session.messages().last().is_some_and(|m| m.role == Role::User) {
            return Err(LlmError::Session("the last message is already a user turn".into()));
        }
        let messages = session.with_user(prompt);
        let fp = request_fingerprint(session.model(), &messages, session.temperature());
        let reply = match self.config.mode {
            Mode::Replay => {
                let cassette = self.cassette.as_ref().expect("replay has a cassette");
                cassette.get(&fp).ok_or(LlmError::CassetteMiss(fp))?.reply
            }
            Mode::Live | Mode::Record => {
                let reply = self.send(session, &messages)?;
                if let Some(c) = &self.cassette {
                    c.insert(
                        &fp,
                        CassetteEntry {
                            reply: reply.clone(),
                            model: session.model().to_string(),
                            recorded_at: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
                            request_summary: prompt.chars().take(120).collect(),
                        },
                    )?;
                }
                reply
            }
        };
        session.push(Role::User, prompt).map_err(LlmError::Session)?;
        session.push(Role::Assistant, &reply).map_err(LlmError::Session)?;
        Ok(reply)
    }

    fn send(&self, session: &ChatSession, messages: &[Message]) -> Result<String, LlmError> {
        let token = std::env::var(&self.config.api_key_env)
            .ok()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| LlmError::Config(format!("environment variable {} is not set", self.config.api_key_env)))?;
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": session.model(),
            "messages": messages,
            "temperature": session.temperature(),
        });
        let timeout = Duration::from_secs(self.config.timeout_s);
        let mut attempt = 0;
        loop {
            match self.transport.post_chat(&url, &token, &body, timeout) {
                Err(LlmError::Timeout(_) | LlmError::Transport { status: None | Some(500..=599), .. })
                    if attempt < self.config.retries =>
                {
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}
