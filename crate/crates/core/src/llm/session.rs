use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// One conversation. Messages are append-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatSession {
    id: String,
    model: String,
    temperature: f64,
    messages: Vec<Message>,
}

impl ChatSession {
    pub fn new(model: &str, temperature: f64, system_text: Option<&str>) -> Self {
        let messages = system_text
            .map(|s| {
                vec![Message {
                    role: Role::System,
                    content: s.to_string(),
                }]
            })
            .unwrap_or_default();
        Self {
            id: uuid::Uuid::new_v4().to_string(),
            model: model.to_string(),
            temperature,
            messages,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Append a message. Two assistant turns in a row are refused.
    pub fn push(&mut self, role: Role, content: &str) -> Result<(), String> {
        if role == Role::Assistant && self.messages.last().is_some_and(|m| m.role == Role::Assistant) {
            return Err("two consecutive assistant messages".into());
        }
        self.messages.push(Message {
            role,
            content: content.to_string(),
        });
        Ok(())
    }

    /// The messages that would be sent if `prompt` were the next user turn.
    pub fn with_user(&self, prompt: &str) -> Vec<Message> {
        let mut m = self.messages.clone();
        m.push(Message {
            role: Role::User,
            content: prompt.to_string(),
        });
        m
    }
}
