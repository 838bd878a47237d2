//! Chat-completion backend over HTTP.

use std::time::Duration;

use serde_json::{json, Value};

use super::{parse_verdict, Answer, Query, Resolve, SYSTEM_MESSAGE};
use crate::error::{Error, Result};

pub struct LlmHttpResolver {
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: Option<String>,
    agent: ureq::Agent,
    id: String,
}

impl LlmHttpResolver {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        temperature: f64,
        api_key: Option<String>,
        timeout_secs: u64,
    ) -> Self {
        let model = model.into();
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(timeout_secs.max(1))))
            .build()
            .into();
        Self {
            endpoint: endpoint.into(),
            id: format!("llm-http:{model}"),
            model,
            temperature,
            api_key,
            agent,
        }
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
        })
    }

    fn post(&self, body: &Value) -> std::result::Result<Value, ureq::Error> {
        let mut req = self
            .agent
            .post(&self.endpoint)
            .header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        req.send_json(body)?.body_mut().read_json::<Value>()
    }
}

/// Text of the first choice's message.
fn response_text(v: &Value) -> Option<&str> {
    v.get("choices")?.get(0)?.get("message")?.get("content")?.as_str()
}

impl Resolve for LlmHttpResolver {
    fn id(&self) -> &str {
        &self.id
    }

    fn answer(&self, query: &Query<'_>) -> Result<Answer> {
        let body = self.request_body(query.prompt);
        let response = match self.post(&body) {
            Ok(v) => v,
            Err(first) => {
                log::warn!("request for {} failed ({first}); retrying once", query.ambiguity);
                self.post(&body).map_err(|err| Error::Transport {
                    ambiguity: query.ambiguity.to_string(),
                    message: err.to_string(),
                })?
            }
        };
        match response_text(&response) {
            Some(text) => Ok(Answer {
                verdict: parse_verdict(text),
                raw_response: Some(text.to_string()),
            }),
            None => Ok(Answer {
                verdict: None,
                raw_response: Some(response.to_string()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_has_chat_shape() {
        let r = LlmHttpResolver::new("http://localhost:1/v1", "m", 0.0, None, 5);
        let b = r.request_body("Q?");
        assert_eq!(b["model"], "m");
        assert_eq!(b["temperature"], 0.0);
        assert_eq!(b["messages"][1]["role"], "user");
        assert_eq!(b["messages"][1]["content"], "Q?");
    }

    #[test]
    fn first_choice_text() {
        let v = json!({"choices": [{"message": {"role": "assistant", "content": "Yes."}}]});
        assert_eq!(response_text(&v), Some("Yes."));
        assert_eq!(response_text(&json!({"error": "x"})), None);
    }
}
