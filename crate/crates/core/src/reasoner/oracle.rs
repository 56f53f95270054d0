use super::{BranchJudgment, BranchQuery, Reasoner};
use crate::error::Result;
use crate::geometry::{point_segment_distance, Point2};

/// Knows the ground-truth trajectory: branches leading onto it score high.
///
/// Used only to measure how much a well-informed reasoner can help.
#[derive(Debug, Clone)]
pub struct OracleReasoner {
    pub truth: Vec<Point2>,
    pub tolerance: f64,
    pub hit: f64,
}

impl OracleReasoner {
    pub fn new(truth: Vec<Point2>) -> Self {
        OracleReasoner {
            truth,
            tolerance: 3.0,
            hit: 0.9,
        }
    }

    fn distance_to_truth(&self, p: Point2) -> f64 {
        match self.truth.len() {
            0 => f64::INFINITY,
            1 => self.truth[0].dist(p),
            _ => self
                .truth
                .windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

impl Reasoner for OracleReasoner {
    fn name(&self) -> &str {
        "oracle"
    }

    fn judge_branches(&self, q: &BranchQuery) -> Result<BranchJudgment> {
        q.validate()?;
        let mut j = BranchJudgment::neutral(q, "neutral");
        for (s, b) in j.branches.iter_mut().zip(&q.branches) {
            if self.distance_to_truth(Point2::new(b.target[0], b.target[1])) <= self.tolerance {
                s.score = self.hit;
                s.reason = "on ground truth".into();
            }
        }
        Ok(j)
    }
}
