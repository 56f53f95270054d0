use super::{BranchJudgment, BranchQuery, BranchScore, Reasoner};
use crate::error::Result;
use crate::perception::Turn;

/// Branches sharper than this count as turns.
pub const TURN_ANGLE_DEG: f64 = 30.0;

/// Deterministic rule table mirroring the supervisor's three questions:
/// does the branch match the intent, is it drivable at this speed, and do
/// the road tags allow it.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicReasoner;

pub fn branch_turn(angle_deg: f64) -> Turn {
    if angle_deg > TURN_ANGLE_DEG {
        Turn::Left
    } else if angle_deg < -TURN_ANGLE_DEG {
        Turn::Right
    } else {
        Turn::Straight
    }
}

pub fn intent_turn(label: &str) -> Turn {
    match label {
        "PREP_LEFT" => Turn::Left,
        "PREP_RIGHT" => Turn::Right,
        _ => Turn::Straight,
    }
}

pub fn intent_label(t: Turn) -> &'static str {
    match t {
        Turn::Left => "PREP_LEFT",
        Turn::Right => "PREP_RIGHT",
        Turn::Straight => "STRAIGHT",
    }
}

fn forbids(tag: &str, t: Turn) -> bool {
    match tag {
        "NoEntry" => true,
        "NoLeftTurn" => t == Turn::Left,
        "NoRightTurn" => t == Turn::Right,
        "LeftOnly" => t != Turn::Left,
        "RightOnly" => t != Turn::Right,
        "StraightOnly" => t != Turn::Straight,
        _ => false,
    }
}

impl Reasoner for HeuristicReasoner {
    fn name(&self) -> &str {
        "heuristic"
    }

    fn judge_branches(&self, q: &BranchQuery) -> Result<BranchJudgment> {
        q.validate()?;
        let intent = intent_turn(&q.driver.turn_intent);
        let branches = q
            .branches
            .iter()
            .map(|b| {
                let turn = branch_turn(b.turn_angle_deg);
                let mut score: f64 = 0.5;
                let mut fired = Vec::new();
                if turn == intent {
                    score += 0.25;
                    fired.push("intent_match");
                }
                if b.turn_angle_deg.abs() > 60.0 && q.state.speed_m_s > 10.0 {
                    score -= 0.2;
                    fired.push("too_fast_for_turn");
                }
                if b.semantic_tags.iter().any(|t| forbids(t, turn)) {
                    score -= 0.3;
                    fired.push("tag_forbids");
                }
                if fired.is_empty() {
                    fired.push("no_rule");
                }
                BranchScore {
                    id: b.id,
                    score: score.clamp(0.05, 0.95),
                    reason: fired.join(","),
                }
            })
            .collect();
        Ok(BranchJudgment { branches })
    }
}
