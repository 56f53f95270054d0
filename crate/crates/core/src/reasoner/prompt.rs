//! Prompt rendering and reply parsing for text-based reasoners.

use serde_json::{json, Value};

use super::{BranchJudgment, BranchQuery, HandoffJudgment, HandoffQuery};
use crate::error::{Error, Result};

pub const BRANCH_ROLE: &str = "You are a Strategic Navigation Supervisor. Your role is to validate the heuristic path suggestion by analyzing the Driver's Profile and Road Context .";

pub const HANDOFF_ROLE: &str = "You are an assistant scoring CCTV candidates for optimal vehicle tracking.";

pub const QA_ROLE: &str =
    "You answer questions about a road network monitored by CCTV cameras, using only the documents provided.";

const BRANCH_TASK: &str = "Evaluate each branch: does it match the driver's turn intent, is it physically feasible at the current speed, and do the road tags permit it? \
Answer with JSON only: {\"branches\": [{\"id\": <int>, \"score\": <0..1>, \"reason\": <string>}]} with exactly one entry per branch id.";

const HANDOFF_TASK: &str = "Score each CCTV candidate by how well it will capture the vehicle next. \
Answer with JSON only: {\"candidates\": [{\"id\": <string>, \"score\": <0..1>, \"reason\": <string>}]} with exactly one entry per candidate id.";

/// Keys come out sorted because `serde_json::Value` maps are ordered, so the
/// rendering is byte-stable and transcripts replay.
pub fn branch_user_message(q: &BranchQuery) -> String {
    let input = json!({
        "driver": q.driver,
        "state": q.state,
        "branches": q.branches,
    });
    format!("Input:\n{}\n\n{}", serde_json::to_string_pretty(&input).expect("serializable"), BRANCH_TASK)
}

pub fn handoff_user_message(q: &HandoffQuery) -> String {
    format!(
        "Input:\n{}\n\n{}",
        serde_json::to_string_pretty(&serde_json::to_value(q).expect("serializable")).expect("serializable"),
        HANDOFF_TASK
    )
}

/// The first balanced `{...}` block in `text`, honouring JSON strings.
pub fn extract_json_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in text[start..].char_indices() {
        if in_str {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + i + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

fn reply_object(text: &str) -> Result<Value> {
    let obj = extract_json_object(text).ok_or_else(|| Error::InvalidInput("reply has no JSON object".into()))?;
    Ok(serde_json::from_str(obj)?)
}

/// Parses a branch reply and checks it answers exactly the queried ids.
pub fn parse_branch_reply(text: &str, q: &BranchQuery) -> Result<BranchJudgment> {
    let j: BranchJudgment = serde_json::from_value(reply_object(text)?)?;
    if !j.answers(q) {
        return Err(Error::InvalidInput("reply does not answer every branch exactly once".into()));
    }
    Ok(j)
}

pub fn parse_handoff_reply(text: &str, q: &HandoffQuery) -> Result<HandoffJudgment> {
    let j: HandoffJudgment = serde_json::from_value(reply_object(text)?)?;
    if !j.answers(q) {
        return Err(Error::InvalidInput("reply does not answer every candidate exactly once".into()));
    }
    Ok(j)
}
