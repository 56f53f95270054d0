//! The pluggable judgment boundary consulted by the planner.
//!
//! A reasoner scores the branches leaving an intersection and, optionally,
//! the handoff candidates of a finished plan. Scores are probabilities; 0.5
//! is neutral and leaves the planner's own scores untouched.

pub mod heuristic;
pub mod oracle;
pub mod prompt;
pub mod remote;
pub mod transcript;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use heuristic::HeuristicReasoner;
pub use oracle::OracleReasoner;
pub use remote::{RemoteConfig, RemoteReasoner};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverSummary {
    pub aggr: f64,
    /// One of `PREP_LEFT`, `PREP_RIGHT`, `STRAIGHT`.
    pub turn_intent: String,
    pub intent_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub speed_m_s: f64,
    pub location: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchInfo {
    pub id: u32,
    /// Signed turn relative to the current heading, left positive.
    pub turn_angle_deg: f64,
    pub semantic_tags: Vec<String>,
    pub feasible: bool,
    /// Where the branch leads.
    pub target: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchQuery {
    pub driver: DriverSummary,
    pub state: VehicleState,
    pub branches: Vec<BranchInfo>,
}

impl BranchQuery {
    pub fn validate(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::InvalidQuery("no branches".into()));
        }
        let mut ids: Vec<u32> = self.branches.iter().map(|b| b.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidQuery("duplicate branch id".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchScore {
    pub id: u32,
    pub score: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchJudgment {
    pub branches: Vec<BranchScore>,
}

impl BranchJudgment {
    pub fn neutral(q: &BranchQuery, reason: &str) -> Self {
        BranchJudgment {
            branches: q
                .branches
                .iter()
                .map(|b| BranchScore {
                    id: b.id,
                    score: 0.5,
                    reason: reason.to_string(),
                })
                .collect(),
        }
    }

    /// True when every queried id is answered exactly once with a score in
    /// [0, 1] and nothing else is answered.
    pub fn answers(&self, q: &BranchQuery) -> bool {
        self.branches.len() == q.branches.len()
            && q.branches
                .iter()
                .all(|b| self.branches.iter().filter(|s| s.id == b.id).count() == 1)
            && self.branches.iter().all(|s| (0.0..=1.0).contains(&s.score))
    }

    pub fn score_of(&self, id: u32) -> Option<&BranchScore> {
        self.branches.iter().find(|s| s.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoffItem {
    pub id: String,
    pub eta_s: f64,
    pub dwell_s: f64,
    pub angle_deg: f64,
    pub speed_m_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoffQuery {
    pub candidates: Vec<HandoffItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoffScore {
    pub id: String,
    pub score: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoffJudgment {
    pub candidates: Vec<HandoffScore>,
}

impl HandoffJudgment {
    pub fn answers(&self, q: &HandoffQuery) -> bool {
        self.candidates.len() == q.candidates.len()
            && q.candidates
                .iter()
                .all(|c| self.candidates.iter().filter(|s| s.id == c.id).count() == 1)
            && self.candidates.iter().all(|s| (0.0..=1.0).contains(&s.score))
    }
}

pub trait Reasoner: Send + Sync {
    fn name(&self) -> &str;

    fn judge_branches(&self, q: &BranchQuery) -> Result<BranchJudgment>;

    /// `None` means "no opinion": the planner keeps its built-in handoff
    /// score.
    fn score_cameras(&self, _q: &HandoffQuery) -> Option<HandoffJudgment> {
        None
    }
}

/// Always neutral.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullReasoner;

impl Reasoner for NullReasoner {
    fn name(&self) -> &str {
        "null"
    }

    fn judge_branches(&self, q: &BranchQuery) -> Result<BranchJudgment> {
        q.validate()?;
        Ok(BranchJudgment::neutral(q, "neutral"))
    }
}

/// Returns the same probability for every branch.
#[derive(Debug, Clone, Copy)]
pub struct ConstantReasoner {
    pub p: f64,
}

impl Reasoner for ConstantReasoner {
    fn name(&self) -> &str {
        "constant"
    }

    fn judge_branches(&self, q: &BranchQuery) -> Result<BranchJudgment> {
        q.validate()?;
        let mut j = BranchJudgment::neutral(q, "constant");
        j.branches.iter_mut().for_each(|b| b.score = self.p);
        Ok(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn query(angles: &[f64]) -> BranchQuery {
        BranchQuery {
            driver: DriverSummary {
                aggr: 0.3,
                turn_intent: "PREP_LEFT".into(),
                intent_prob: 0.96,
            },
            state: VehicleState {
                speed_m_s: 8.0,
                location: [0.0, 0.0],
            },
            branches: angles
                .iter()
                .enumerate()
                .map(|(i, a)| BranchInfo {
                    id: i as u32 + 10,
                    turn_angle_deg: *a,
                    semantic_tags: vec!["Intersection".into()],
                    feasible: true,
                    target: [0.0, 0.0],
                })
                .collect(),
        }
    }

    #[test]
    fn null_is_neutral_and_total() {
        let q = query(&[0.0, 90.0, -90.0]);
        let j = NullReasoner.judge_branches(&q).unwrap();
        assert!(j.answers(&q));
        assert!(j.branches.iter().all(|b| b.score == 0.5 && b.reason == "neutral"));
        let empty = query(&[]);
        assert!(matches!(NullReasoner.judge_branches(&empty), Err(Error::InvalidQuery(_))));
        assert!(NullReasoner.score_cameras(&HandoffQuery { candidates: vec![] }).is_none());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut q = query(&[0.0, 10.0]);
        q.branches[1].id = q.branches[0].id;
        assert!(q.validate().is_err());
    }
}
