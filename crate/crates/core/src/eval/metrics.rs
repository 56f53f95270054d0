use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// A predicted trajectory and the ground truth it is scored against.
/// `alignment[i]` is the truth index paired with `predicted[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPair {
    pub predicted: Vec<Point2>,
    pub truth: Vec<Point2>,
    pub alignment: Vec<usize>,
}

impl TrajectoryPair {
    /// Pairs point `i` with truth point `i`; lengths must match.
    pub fn index_aligned(predicted: Vec<Point2>, truth: Vec<Point2>) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::InvalidInput(format!(
                "index alignment needs equal lengths, got {} and {}",
                predicted.len(),
                truth.len()
            )));
        }
        let alignment = (0..predicted.len()).collect();
        Ok(TrajectoryPair {
            predicted,
            truth,
            alignment,
        })
    }

    /// Pairs each predicted point with the truth point nearest in time.
    pub fn time_aligned(predicted: Vec<Point2>, pred_t: &[f64], truth: Vec<Point2>, truth_t: &[f64]) -> Result<Self> {
        if predicted.len() != pred_t.len() || truth.len() != truth_t.len() {
            return Err(Error::InvalidInput("timestamps must match points one to one".into()));
        }
        let alignment = align_nearest_time(pred_t, truth_t)?;
        Ok(TrajectoryPair {
            predicted,
            truth,
            alignment,
        })
    }

    fn check(&self) -> Result<()> {
        if self.predicted.is_empty() || self.truth.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if self.alignment.len() != self.predicted.len() || self.alignment.iter().any(|&j| j >= self.truth.len()) {
            return Err(Error::InvalidInput("alignment must cover every predicted point".into()));
        }
        Ok(())
    }

    fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.predicted
            .iter()
            .zip(&self.alignment)
            .map(|(p, &j)| p.dist(self.truth[j]))
    }
}

/// For each predicted timestamp, the index of the nearest truth timestamp
/// (earlier index on ties). Both inputs must be non-decreasing; the result
/// is then monotone.
pub fn align_nearest_time(pred_t: &[f64], truth_t: &[f64]) -> Result<Vec<usize>> {
    if truth_t.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if truth_t.windows(2).any(|w| w[1] < w[0]) || pred_t.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("timestamps must be non-decreasing".into()));
    }
    Ok(pred_t
        .iter()
        .map(|&t| {
            let k = truth_t.partition_point(|&x| x < t);
            if k == 0 {
                0
            } else if k == truth_t.len() || t - truth_t[k - 1] <= truth_t[k] - t {
                k - 1
            } else {
                k
            }
        })
        .collect())
}

/// Mean Euclidean distance over aligned pairs.
pub fn ade(pair: &TrajectoryPair) -> Result<f64> {
    pair.check()?;
    Ok(pair.distances().sum::<f64>() / pair.predicted.len() as f64)
}

/// Distance between the last predicted point and its aligned truth point.
pub fn fde(pair: &TrajectoryPair) -> Result<f64> {
    let (dx, dy) = fde_axis(pair)?;
    Ok(dx.hypot(dy))
}

/// World-axis absolute endpoint differences `(|Δx|, |Δy|)`.
pub fn fde_axis(pair: &TrajectoryPair) -> Result<(f64, f64)> {
    pair.check()?;
    let n = pair.predicted.len() - 1;
    let d = pair.predicted[n] - pair.truth[pair.alignment[n]];
    Ok((d.x.abs(), d.y.abs()))
}

/// `(step, distance)` per aligned index.
pub fn per_step_errors(pair: &TrajectoryPair) -> Result<Vec<(usize, f64)>> {
    pair.check()?;
    Ok(pair.distances().enumerate().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionCase {
    pub scenario_id: String,
    pub gt_next_cam: String,
    /// Ranked camera ids, best first, no repeats.
    pub predicted_topk: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TopK {
    pub top1: usize,
    pub topk: usize,
    pub n: usize,
}

pub fn topk_accuracy(cases: &[PredictionCase], k: usize) -> Result<TopK> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be >= 1".into()));
    }
    let mut out = TopK {
        n: cases.len(),
        ..Default::default()
    };
    for c in cases {
        let mut seen = std::collections::BTreeSet::new();
        if !c.predicted_topk.iter().all(|id| seen.insert(id)) {
            return Err(Error::InvalidInput(format!("{}: ranked cameras repeat", c.scenario_id)));
        }
        if c.predicted_topk.first() == Some(&c.gt_next_cam) {
            out.top1 += 1;
        }
        if c.predicted_topk.iter().take(k).any(|id| *id == c.gt_next_cam) {
            out.topk += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn identical_is_zero() {
        let p = pts(&[(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)]);
        let pair = TrajectoryPair::index_aligned(p.clone(), p).unwrap();
        assert_eq!(ade(&pair).unwrap(), 0.0);
        assert_eq!(fde(&pair).unwrap(), 0.0);
        assert_eq!(fde_axis(&pair).unwrap(), (0.0, 0.0));
        assert!(per_step_errors(&pair).unwrap().iter().all(|r| r.1 == 0.0));
    }

    #[test]
    fn unit_offset() {
        let pair = TrajectoryPair::index_aligned(pts(&[(0.0, 0.0), (1.0, 0.0)]), pts(&[(0.0, 1.0), (1.0, 1.0)])).unwrap();
        assert_eq!(ade(&pair).unwrap(), 1.0);
    }

    #[test]
    fn three_four_five_endpoint() {
        let pair = TrajectoryPair::index_aligned(pts(&[(0.0, 0.0), (3.0, 4.0)]), pts(&[(0.0, 0.0), (0.0, 0.0)])).unwrap();
        assert_eq!(fde(&pair).unwrap(), 5.0);
        assert_eq!(fde_axis(&pair).unwrap(), (3.0, 4.0));
    }

    #[test]
    fn single_point_one_row() {
        let pair = TrajectoryPair::index_aligned(pts(&[(1.0, 1.0)]), pts(&[(1.0, 2.0)])).unwrap();
        assert_eq!(per_step_errors(&pair).unwrap(), vec![(0, 1.0)]);
    }

    #[test]
    fn empty_rejected() {
        let pair = TrajectoryPair::index_aligned(vec![], vec![]).unwrap();
        assert!(matches!(ade(&pair), Err(Error::EmptyTrajectory)));
        assert!(matches!(fde(&pair), Err(Error::EmptyTrajectory)));
    }

    #[test]
    fn nearest_time_alignment() {
        let a = align_nearest_time(&[-1.0, 0.04, 0.05, 0.06, 0.5, 9.0], &[0.0, 0.1, 0.2]).unwrap();
        assert_eq!(a, vec![0, 0, 0, 1, 2, 2]);
        assert!(align_nearest_time(&[0.0], &[]).is_err());
    }

    #[test]
    fn topk_counts() {
        let case = |gt: &str, ranked: &[&str]| PredictionCase {
            scenario_id: "s".into(),
            gt_next_cam: gt.into(),
            predicted_topk: ranked.iter().map(|s| s.to_string()).collect(),
        };
        let all = vec![case("A", &["A", "B"]), case("B", &["B"])];
        assert_eq!(topk_accuracy(&all, 3).unwrap(), TopK { top1: 2, topk: 2, n: 2 });
        let third = vec![case("C", &["A", "B", "C"])];
        assert_eq!(topk_accuracy(&third, 3).unwrap(), TopK { top1: 0, topk: 1, n: 1 });
        assert_eq!(topk_accuracy(&third, 2).unwrap(), TopK { top1: 0, topk: 0, n: 1 });
        assert!(topk_accuracy(&[case("A", &["A", "A"])], 3).is_err());
        assert!(topk_accuracy(&third, 0).is_err());
    }

    /// Naive re-evaluation used as the oracle below.
    fn naive(p: &[(f64, f64)], g: &[(f64, f64)]) -> (f64, f64) {
        let mut sum = 0.0;
        for i in 0..p.len() {
            sum += ((p[i].0 - g[i].0).powi(2) + (p[i].1 - g[i].1).powi(2)).sqrt();
        }
        let n = p.len() - 1;
        (sum / p.len() as f64, ((p[n].0 - g[n].0).powi(2) + (p[n].1 - g[n].1).powi(2)).sqrt())
    }

    proptest! {
        #[test]
        fn matches_naive(v in prop::collection::vec(((-1e3..1e3f64, -1e3..1e3f64), (-1e3..1e3f64, -1e3..1e3f64)), 1..120)) {
            let (p, g): (Vec<_>, Vec<_>) = v.into_iter().unzip();
            let pair = TrajectoryPair::index_aligned(pts(&p), pts(&g)).unwrap();
            let (a, f) = naive(&p, &g);
            prop_assert!((ade(&pair).unwrap() - a).abs() < 1e-12 * a.max(1.0));
            prop_assert!((fde(&pair).unwrap() - f).abs() < 1e-12 * f.max(1.0));
            let rows = per_step_errors(&pair).unwrap();
            let mean = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
            prop_assert_eq!(mean, ade(&pair).unwrap());
            prop_assert!(fde(&pair).unwrap() <= ade(&pair).unwrap() * p.len() as f64 + 1e-9);
        }

        #[test]
        fn top1_le_topk_le_n(gts in prop::collection::vec(0u8..5, 0..30), k in 1usize..5) {
            let cases: Vec<PredictionCase> = gts.iter().enumerate().map(|(i, g)| PredictionCase {
                scenario_id: i.to_string(),
                gt_next_cam: g.to_string(),
                predicted_topk: (0..(i % 5) as u8).map(|c| ((c + i as u8) % 5).to_string()).collect(),
            }).collect();
            let r = topk_accuracy(&cases, k).unwrap();
            prop_assert!(r.top1 <= r.topk && r.topk <= r.n);
        }

        #[test]
        fn alignment_is_monotone(mut a in prop::collection::vec(-10.0..10.0f64, 0..40), mut b in prop::collection::vec(-10.0..10.0f64, 1..40)) {
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            let al = align_nearest_time(&a, &b).unwrap();
            prop_assert!(al.windows(2).all(|w| w[0] <= w[1]));
            for (t, &j) in a.iter().zip(&al) {
                let best = b.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min);
                prop_assert_eq!((b[j] - t).abs(), best);
            }
        }
    }
}
