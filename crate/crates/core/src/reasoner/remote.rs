//! Chat-completions reasoner with bounded concurrency, retries, graceful
//! degradation and an optional transcript.
//!
//! The API key is read from an environment variable at call time and is
//! never logged, stored or written to the transcript.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::{
    branch_user_message, handoff_user_message, parse_branch_reply, parse_handoff_reply, BRANCH_ROLE, HANDOFF_ROLE, QA_ROLE,
};
use super::transcript::{read_transcript, replay_table, request_hash, Transcript};
use super::{BranchJudgment, BranchQuery, HandoffJudgment, HandoffQuery, Reasoner};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteConfig {
    /// Full URL of a chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_s: f64,
    pub retries: u32,
    pub backoff_s: f64,
    pub max_in_flight: usize,
    pub transcript: Option<PathBuf>,
    /// Answer from a recorded transcript instead of the network.
    pub replay: Option<PathBuf>,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "SPOT_API_KEY".into(),
            timeout_s: 20.0,
            retries: 2,
            backoff_s: 0.5,
            max_in_flight: 4,
            transcript: None,
            replay: None,
        }
    }
}

impl RemoteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_in_flight == 0 || !(self.timeout_s > 0.0) || !(self.backoff_s >= 0.0) {
            return Err(Error::InvalidInput("remote reasoner: bad limits".into()));
        }
        if self.endpoint.is_empty() || self.model.is_empty() || self.api_key_env.is_empty() {
            return Err(Error::InvalidInput("remote reasoner: endpoint, model and api_key_env are required".into()));
        }
        Ok(())
    }
}

struct Gate {
    in_flight: Mutex<usize>,
    cv: Condvar,
    max: usize,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.max {
            n = self.cv.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.cv.notify_one();
    }
}

pub struct RemoteReasoner {
    cfg: RemoteConfig,
    agent: ureq::Agent,
    gate: Gate,
    transcript: Option<Transcript>,
    replay: Option<HashMap<String, String>>,
}

impl RemoteReasoner {
    pub fn new(cfg: RemoteConfig) -> Result<Self> {
        cfg.validate()?;
        let replay = match &cfg.replay {
            Some(p) => Some(replay_table(&read_transcript(p)?)),
            None => None,
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(cfg.timeout_s)))
            .http_status_as_error(true)
            .build()
            .into();
        Ok(RemoteReasoner {
            transcript: cfg.transcript.clone().map(Transcript::new),
            gate: Gate {
                in_flight: Mutex::new(0),
                cv: Condvar::new(),
                max: cfg.max_in_flight,
            },
            agent,
            replay,
            cfg,
        })
    }

    fn transcript_key(system: &str, user: &str) -> String {
        format!("[system]\n{system}\n[user]\n{user}")
    }

    fn post_once(&self, body: &str, key: Option<&str>) -> std::result::Result<String, String> {
        let mut req = self.agent.post(&self.cfg.endpoint).header("Content-Type", "application/json");
        if let Some(k) = key {
            req = req.header("Authorization", format!("Bearer {k}"));
        }
        let mut resp = req.send(body).map_err(describe)?;
        let text = resp.body_mut().read_to_string().map_err(describe)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| format!("bad response json: {e}"))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| "response has no choices[0].message.content".to_string())
    }

    /// Free-text answer to a synthesized retrieval prompt.
    pub fn ask(&self, prompt: &str) -> Result<String> {
        self.complete(QA_ROLE, prompt).map_err(Error::Remote)
    }

    /// Sends one exchange and returns the assistant's text.
    fn complete(&self, system: &str, user: &str) -> std::result::Result<String, String> {
        let key_text = Self::transcript_key(system, user);
        if let Some(table) = &self.replay {
            return table
                .get(&request_hash(&key_text))
                .cloned()
                .ok_or_else(|| "no recorded reply".to_string());
        }
        let body = json!({
            "model": self.cfg.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        })
        .to_string();
        let key = std::env::var(&self.cfg.api_key_env).ok();
        let _permit = self.gate.acquire();
        let mut last = String::new();
        for attempt in 0..=self.cfg.retries {
            if attempt > 0 {
                let wait = self.cfg.backoff_s * 2f64.powi(attempt as i32 - 1);
                std::thread::sleep(Duration::from_secs_f64(wait));
            }
            match self.post_once(&body, key.as_deref()) {
                Ok(reply) => {
                    if let Some(t) = &self.transcript {
                        if let Err(e) = t.append(&key_text, &reply) {
                            log::warn!("transcript write failed: {e}");
                        }
                    }
                    return Ok(reply);
                }
                Err(e) => {
                    log::debug!("reasoner attempt {} failed: {e}", attempt + 1);
                    last = e;
                }
            }
        }
        Err(last)
    }
}

/// Error text safe to log: status codes and transport kinds only.
fn describe(e: ureq::Error) -> String {
    match e {
        ureq::Error::StatusCode(c) => format!("http status {c}"),
        ureq::Error::Timeout(_) => "timeout".into(),
        ureq::Error::Io(io) => format!("io: {}", io.kind()),
        other => format!("transport: {}", other.to_string().chars().take(120).collect::<String>()),
    }
}

impl Reasoner for RemoteReasoner {
    fn name(&self) -> &str {
        "remote"
    }

    fn judge_branches(&self, q: &BranchQuery) -> Result<BranchJudgment> {
        q.validate()?;
        let user = branch_user_message(q);
        let outcome = self
            .complete(BRANCH_ROLE, &user)
            .and_then(|reply| parse_branch_reply(&reply, q).map_err(|e| e.to_string()));
        Ok(outcome.unwrap_or_else(|e| {
            log::warn!("reasoner degraded to neutral: {e}");
            BranchJudgment::neutral(q, &format!("degraded: {e}"))
        }))
    }

    fn score_cameras(&self, q: &HandoffQuery) -> Option<HandoffJudgment> {
        if q.candidates.is_empty() {
            return None;
        }
        let user = handoff_user_message(q);
        match self
            .complete(HANDOFF_ROLE, &user)
            .and_then(|reply| parse_handoff_reply(&reply, q).map_err(|e| e.to_string()))
        {
            Ok(j) => Some(j),
            Err(e) => {
                log::warn!("handoff scoring degraded: {e}");
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reasoner::tests::query;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    /// Serves `replies` in order, one per connection, and records requests.
    fn mock(replies: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let seen = Arc::new(Mutex::new(Vec::new()));
        let seen2 = seen.clone();
        std::thread::spawn(move || {
            for (status, body) in replies {
                let Ok((mut s, _)) = listener.accept() else { return };
                let req = read_request(&mut s);
                seen2.lock().unwrap().push(req);
                let resp = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = s.write_all(resp.as_bytes());
            }
        });
        (format!("http://{addr}/v1/chat/completions"), seen)
    }

    fn read_request(s: &mut std::net::TcpStream) -> String {
        let mut buf = Vec::new();
        let mut chunk = [0u8; 4096];
        loop {
            let n = s.read(&mut chunk).unwrap_or(0);
            if n == 0 {
                break;
            }
            buf.extend_from_slice(&chunk[..n]);
            let text = String::from_utf8_lossy(&buf);
            if let Some(h) = text.find("\r\n\r\n") {
                let len = text[..h]
                    .lines()
                    .find_map(|l| {
                        let l = l.to_ascii_lowercase();
                        l.strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap())
                    })
                    .unwrap_or(0);
                if buf.len() >= h + 4 + len {
                    break;
                }
            }
        }
        String::from_utf8_lossy(&buf).into_owned()
    }

    fn completion(content: &str) -> String {
        json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string()
    }

    fn cfg(endpoint: String) -> RemoteConfig {
        RemoteConfig {
            endpoint,
            api_key_env: "SPOT_TEST_KEY_UNSET".into(),
            timeout_s: 5.0,
            backoff_s: 0.01,
            ..Default::default()
        }
    }

    #[test]
    fn parses_reply_and_records_transcript() {
        let q = query(&[0.0, 90.0]);
        let reply = "{\"branches\":[{\"id\":10,\"score\":0.3,\"reason\":\"a\"},{\"id\":11,\"score\":0.8,\"reason\":\"b\"}]}";
        let (url, seen) = mock(vec![(200, completion(reply))]);
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("t.jsonl");
        let r = RemoteReasoner::new(RemoteConfig {
            transcript: Some(tpath.clone()),
            ..cfg(url)
        })
        .unwrap();
        let j = r.judge_branches(&q).unwrap();
        assert_eq!(j.score_of(11).unwrap().score, 0.8);
        let req = seen.lock().unwrap()[0].clone();
        assert!(req.contains("Strategic Navigation Supervisor"));
        assert!(req.contains("\"temperature\":0"));

        // Replay answers identically without a server.
        let replayed = RemoteReasoner::new(RemoteConfig {
            replay: Some(tpath),
            ..cfg("http://127.0.0.1:9/unused".into())
        })
        .unwrap();
        assert_eq!(replayed.judge_branches(&q).unwrap(), j);
    }

    #[test]
    fn retries_then_succeeds() {
        let q = query(&[0.0]);
        let reply = "{\"branches\":[{\"id\":10,\"score\":0.7,\"reason\":\"ok\"}]}";
        let (url, seen) = mock(vec![(500, "{}".into()), (200, completion(reply))]);
        let j = RemoteReasoner::new(cfg(url)).unwrap().judge_branches(&q).unwrap();
        assert_eq!(j.branches[0].score, 0.7);
        assert_eq!(seen.lock().unwrap().len(), 2);
    }

    #[test]
    fn degrades_on_failure_and_bad_replies() {
        let q = query(&[0.0, 45.0]);
        let (url, _) = mock(vec![(500, "{}".into()), (500, "{}".into()), (500, "{}".into())]);
        let j = RemoteReasoner::new(cfg(url)).unwrap().judge_branches(&q).unwrap();
        assert!(j.branches.iter().all(|b| b.score == 0.5 && b.reason.starts_with("degraded:")));

        let (url, _) = mock(vec![(200, completion("I think left is best."))]);
        let r = RemoteReasoner::new(RemoteConfig { retries: 0, ..cfg(url) }).unwrap();
        let j = r.judge_branches(&q).unwrap();
        assert!(j.branches.iter().all(|b| b.score == 0.5));
    }

    #[test]
    fn key_goes_in_header_only() {
        let var = "SPOT_TEST_KEY_HEADER";
        std::env::set_var(var, "sekrit-value");
        let q = query(&[0.0]);
        let reply = "{\"branches\":[{\"id\":10,\"score\":0.6,\"reason\":\"ok\"}]}";
        let (url, seen) = mock(vec![(200, completion(reply))]);
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("t.jsonl");
        let r = RemoteReasoner::new(RemoteConfig {
            api_key_env: var.into(),
            transcript: Some(tpath.clone()),
            ..cfg(url)
        })
        .unwrap();
        r.judge_branches(&q).unwrap();
        let req = seen.lock().unwrap()[0].clone();
        let (head, body) = req.split_once("\r\n\r\n").unwrap();
        assert!(head.contains("sekrit-value"));
        assert!(!body.contains("sekrit-value"));
        assert!(!std::fs::read_to_string(tpath).unwrap().contains("sekrit-value"));
    }

    #[test]
    fn in_flight_is_bounded() {
        let gate = Arc::new(Gate {
            in_flight: Mutex::new(0),
            cv: Condvar::new(),
            max: 2,
        });
        let peak = Arc::new(AtomicUsize::new(0));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let g = gate.clone();
                let peak = peak.clone();
                std::thread::spawn(move || {
                    let _p = g.acquire();
                    let now = *g.in_flight.lock().unwrap();
                    peak.fetch_max(now, Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(10));
                })
            })
            .collect();
        handles.into_iter().for_each(|h| h.join().unwrap());
        assert!(peak.load(Ordering::SeqCst) <= 2);
    }
}
