use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::kinematics::KinematicState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorThresholds {
    pub eps_v: f64,
    pub eps_a: f64,
    pub eps_theta: f64,
    pub delta_theta_turn: f64,
}

impl Default for BehaviorThresholds {
    fn default() -> Self {
        BehaviorThresholds {
            eps_v: 0.5,
            eps_a: 2.0,
            eps_theta: 0.8,
            delta_theta_turn: 0.02,
        }
    }
}

impl BehaviorThresholds {
    pub fn validate(&self) -> crate::error::Result<()> {
        let all = [self.eps_v, self.eps_a, self.eps_theta, self.delta_theta_turn];
        if all.iter().all(|x| *x > 0.0 && x.is_finite()) {
            Ok(())
        } else {
            Err(crate::error::Error::InvalidInput("behavior thresholds must be positive".into()))
        }
    }
}

/// Eight-way direction relative to the camera; positive angles are left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir8 {
    F,
    FL,
    L,
    BL,
    B,
    BR,
    R,
    FR,
}

impl Dir8 {
    pub const ALL: [Dir8; 8] = [Dir8::F, Dir8::FL, Dir8::L, Dir8::BL, Dir8::B, Dir8::BR, Dir8::R, Dir8::FR];

    pub fn as_str(self) -> &'static str {
        match self {
            Dir8::F => "F",
            Dir8::FL => "FL",
            Dir8::L => "L",
            Dir8::BL => "BL",
            Dir8::B => "B",
            Dir8::BR => "BR",
            Dir8::R => "R",
            Dir8::FR => "FR",
        }
    }

    pub fn parse(s: &str) -> Option<Dir8> {
        Dir8::ALL.into_iter().find(|d| d.as_str() == s)
    }

    /// Sector center in radians.
    pub fn center(self) -> f64 {
        let k = Dir8::ALL.iter().position(|d| *d == self).unwrap() as f64;
        let c = k * PI / 4.0;
        if c > PI {
            c - 2.0 * PI
        } else {
            c
        }
    }
}

impl fmt::Display for Dir8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 45° sectors centered on multiples of 45°; a boundary angle belongs to
/// the sector on its counterclockwise side.
pub fn classify_dir8(theta_rel: f64) -> Dir8 {
    let k = ((theta_rel + PI / 8.0) / (PI / 4.0)).floor() as i64;
    Dir8::ALL[k.rem_euclid(8) as usize]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Turn {
    Left,
    Right,
    Straight,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Left, Turn::Right, Turn::Straight];

    pub fn index(self) -> usize {
        match self {
            Turn::Left => 0,
            Turn::Right => 1,
            Turn::Straight => 2,
        }
    }
}

pub fn detect_turn(delta_theta_rel: f64, delta_theta_turn: f64) -> Turn {
    if delta_theta_rel > delta_theta_turn {
        Turn::Left
    } else if delta_theta_rel < -delta_theta_turn {
        Turn::Right
    } else {
        Turn::Straight
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Behavior {
    Stop,
    Accel,
    Decel,
    SharpTurn,
    Cruise,
}

/// Stop, then SharpTurn, then Accel/Decel, else Cruise.
pub fn classify_behavior(s: &KinematicState, th: &BehaviorThresholds) -> Behavior {
    if s.v < th.eps_v {
        Behavior::Stop
    } else if s.theta_rel.abs() > th.eps_theta {
        Behavior::SharpTurn
    } else if s.a > th.eps_a {
        Behavior::Accel
    } else if s.a < -th.eps_a {
        Behavior::Decel
    } else {
        Behavior::Cruise
    }
}
