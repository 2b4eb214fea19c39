//! Provider adapters mapping one user message onto each chat API.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    /// `POST {base_url}/v1/chat/completions`.
    Openai,
    /// `POST {base_url}/v1/messages`.
    Anthropic,
}

/// Where and how to reach one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub provider: ProviderKind,
    pub base_url: String,
    /// Model name sent to the provider.
    pub model: String,
    /// Environment variable holding the API key.
    pub api_key_env: String,
}

/// Decoding parameters. They are part of the cache key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decoding {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for Decoding {
    fn default() -> Self {
        Decoding {
            temperature: 0.0,
            max_tokens: 16,
        }
    }
}

impl Endpoint {
    pub(crate) fn url(&self) -> String {
        let base = self.base_url.trim_end_matches('/');
        match self.provider {
            ProviderKind::Openai => format!("{base}/v1/chat/completions"),
            ProviderKind::Anthropic => format!("{base}/v1/messages"),
        }
    }

    pub(crate) fn body(&self, prompt: &str, decoding: &Decoding) -> Value {
        json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": decoding.temperature,
            "max_tokens": decoding.max_tokens,
        })
    }

    pub(crate) fn authorize(&self, req: reqwest::RequestBuilder, key: &str) -> reqwest::RequestBuilder {
        match self.provider {
            ProviderKind::Openai => req.bearer_auth(key),
            ProviderKind::Anthropic => req
                .header("x-api-key", key)
                .header("anthropic-version", "2023-06-01"),
        }
    }

    /// Reply text from a response body.
    pub(crate) fn extract(&self, body: &Value) -> Option<String> {
        let text = match self.provider {
            ProviderKind::Openai => body.pointer("/choices/0/message/content"),
            ProviderKind::Anthropic => body.pointer("/content/0/text"),
        };
        text.and_then(Value::as_str).map(str::to_string)
    }
}
