use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perception::Turn;
use crate::reasoner::heuristic::intent_label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverProfile {
    /// Aggressiveness in [0, 1].
    pub aggr: f64,
    /// Probabilities indexed by `Turn::index` (left, right, straight).
    pub turn_intent: [f64; 3],
    /// Turn the vehicle is visibly preparing for as it leaves the camera.
    /// Overrides the habit label at the first junction of every hypothesis.
    #[serde(default)]
    pub prep_intent: Option<Turn>,
}

impl DriverProfile {
    pub fn neutral() -> Self {
        DriverProfile {
            aggr: 0.5,
            turn_intent: [1.0 / 3.0; 3],
            prep_intent: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.turn_intent.iter().sum();
        if !(0.0..=1.0).contains(&self.aggr)
            || self.turn_intent.iter().any(|p| !(0.0..=1.0).contains(p))
            || (sum - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidInput(format!("invalid driver profile {self:?}")));
        }
        Ok(())
    }

    /// Most likely turn; ties prefer straight, then left.
    pub fn dominant_intent(&self) -> (Turn, f64) {
        [Turn::Straight, Turn::Left, Turn::Right]
            .into_iter()
            .map(|t| (t, self.turn_intent[t.index()]))
            .fold((Turn::Straight, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
    }

    pub fn intent_label(&self) -> (&'static str, f64) {
        let (t, p) = self.dominant_intent();
        (intent_label(t), p)
    }
}

/// Percentile with linear interpolation between order statistics
/// (`q` in [0, 1]). `None` for an empty slice.
pub fn percentile_linear(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// Aggressiveness from the 90th percentile of |acceleration| and turn intent
/// from Laplace-smoothed counts of the given turn events.
pub fn driver_profile(acc_history: &[f64], a_max: f64, turn_events: &[Turn]) -> Result<DriverProfile> {
    if !(a_max > 0.0) {
        return Err(Error::InvalidInput(format!("a_max must be positive, got {a_max}")));
    }
    let abs: Vec<f64> = acc_history.iter().map(|a| a.abs()).collect();
    let aggr = match percentile_linear(&abs, 0.9) {
        Some(p90) => (p90 / a_max).clamp(0.0, 1.0),
        None => 0.5,
    };
    let mut counts = [1.0f64; 3];
    for t in turn_events {
        counts[t.index()] += 1.0;
    }
    let total = counts.iter().sum::<f64>();
    Ok(DriverProfile {
        aggr,
        turn_intent: counts.map(|c| c / total),
        prep_intent: None,
    })
}
