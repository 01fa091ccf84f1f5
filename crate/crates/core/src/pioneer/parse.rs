//! Turning free-text LLM replies into suggestion sets.
//!
//! Candidate items come from numbered or bulleted top-level lines (the text
//! before the first `:` or dash separator) and from a trailing
//! `SUGGESTED_SENSORS: [...]` / `SUGGESTED_FEATURES: [...]` block. When a
//! reply has neither, location phrases are pulled out of plain sentences.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::features::FeatureKind;
use crate::ingest::{catalog_contains_token, Catalog};
use crate::model::hex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuggestionKind {
    Sensor,
    Feature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestionSet {
    pub kind: SuggestionKind,
    /// Catalog location ids or feature registry ids, first occurrence order.
    pub resolved: Vec<String>,
    pub unresolved: Vec<String>,
    pub raw_reply: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_fingerprint: Option<String>,
}

impl SuggestionSet {
    pub fn empty(kind: SuggestionKind) -> Self {
        Self {
            kind,
            resolved: Vec::new(),
            unresolved: Vec::new(),
            raw_reply: String::new(),
            prompt_fingerprint: None,
        }
    }

    /// Stable hash of the suggestion content, recorded as provenance when applied.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(match self.kind {
            SuggestionKind::Sensor => b"sensor\0".as_slice(),
            SuggestionKind::Feature => b"feature\0".as_slice(),
        });
        for r in &self.resolved {
            h.update(r.as_bytes());
            h.update([0]);
        }
        h.update([1]);
        for u in &self.unresolved {
            h.update(u.as_bytes());
            h.update([0]);
        }
        h.update([1]);
        h.update(self.raw_reply.as_bytes());
        hex(&h.finalize())[..16].to_string()
    }

    pub fn with_prompt(mut self, prompt: &str) -> Self {
        self.prompt_fingerprint = Some(hex(&Sha256::digest(prompt.as_bytes()))[..16].to_string());
        self
    }

    fn push_resolved(&mut self, id: String) {
        if !self.resolved.contains(&id) {
            self.resolved.push(id);
        }
    }

    fn push_unresolved(&mut self, raw: String) {
        if !raw.is_empty() && !self.unresolved.contains(&raw) {
            self.unresolved.push(raw);
        }
    }
}

fn list_item_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(\s*)(?:\d+[.)]|\(\d+\)|[-*•+])\s+(.+)$").unwrap())
}

fn block_re(tag: &str) -> Regex {
    Regex::new(&format!(r"(?is){tag}\s*:\s*\[(.*?)\]")).unwrap()
}

fn prose_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)\b(?:on|at|to|near|around)\s+(?:the\s+)?(?:(?:user|subject|person|participant|wearer)'s\s+)?([a-z][a-z\- ]*?)\s*(?:[.,;:!?]|$)",
        )
        .unwrap()
    })
}

/// Strip markdown emphasis and cut a list line down to its heading.
fn item_head(text: &str) -> String {
    let t = text.replace("**", "").replace("__", "").replace('`', "");
    let mut end = t.len();
    for sep in [":", " - ", " \u{2013} ", " \u{2014} "] {
        if let Some(i) = t.find(sep) {
            end = end.min(i);
        }
    }
    t[..end]
        .trim()
        .trim_end_matches(['.', ',', ';'])
        .trim()
        .to_string()
}

fn split_block(inner: &str) -> Vec<String> {
    inner
        .split([',', '\n'])
        .map(|s| s.trim().trim_matches(['"', '\'', '“', '”']).trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Candidate items in document order: list headings, then the block.
fn extract_items(reply: &str, block_tag: &str) -> Vec<String> {
    let block = block_re(block_tag);
    let without_block = block.replace_all(reply, "");
    let mut items: Vec<String> = without_block
        .lines()
        .filter_map(|line| list_item_re().captures(line))
        .filter(|c| c[1].chars().count() < 2)
        .map(|c| item_head(&c[2]))
        .filter(|s| !s.is_empty())
        .collect();
    for caps in block.captures_iter(reply) {
        items.extend(split_block(&caps[1]));
    }
    items
}

fn prose_items(reply: &str) -> Vec<String> {
    prose_re()
        .captures_iter(reply)
        .map(|c| c[1].trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Extract sensor locations from a reply and resolve them against the catalog.
pub fn parse_sensor_suggestions(reply: &str, catalog: &Catalog) -> SuggestionSet {
    let mut set = SuggestionSet::empty(SuggestionKind::Sensor);
    set.raw_reply = reply.to_string();
    let mut items = extract_items(reply, "SUGGESTED_SENSORS");
    if items.is_empty() {
        items = prose_items(reply);
    }
    for item in items {
        match catalog.resolve(&item) {
            Ok(loc) => set.push_resolved(loc.id.clone()),
            Err(_) => set.push_unresolved(item),
        }
    }
    set
}

fn normalize_feature_text(s: &str) -> String {
    s.to_lowercase()
        .chars()
        .map(|c| if c == '-' || c == '_' { ' ' } else { c })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Map a free-text feature name onto the registry: exact id or alias first,
/// then the longest alias found inside the text. Ties are unresolved.
pub fn resolve_feature(name: &str) -> Option<FeatureKind> {
    let text = normalize_feature_text(name);
    if text.is_empty() {
        return None;
    }
    if let Some(k) = FeatureKind::ALL
        .into_iter()
        .find(|k| normalize_feature_text(k.id()) == text || k.aliases().contains(&text.as_str()))
    {
        return Some(k);
    }
    let mut best_len = 0;
    let mut best: Vec<FeatureKind> = Vec::new();
    for k in FeatureKind::ALL {
        let Some(len) = k
            .aliases()
            .iter()
            .filter(|a| catalog_contains_token(&text, a))
            .map(|a| a.len())
            .max()
        else {
            continue;
        };
        if len > best_len {
            best_len = len;
            best = vec![k];
        } else if len == best_len {
            best.push(k);
        }
    }
    match best.as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}

/// Extract feature names from a reply and resolve them against the registry.
pub fn parse_feature_suggestions(reply: &str) -> SuggestionSet {
    let mut set = SuggestionSet::empty(SuggestionKind::Feature);
    set.raw_reply = reply.to_string();
    for item in extract_items(reply, "SUGGESTED_FEATURES") {
        match resolve_feature(&item) {
            Some(k) => set.push_resolved(k.id().to_string()),
            None => set.push_unresolved(item),
        }
    }
    set
}
