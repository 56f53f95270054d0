#![no_main]

use libfuzzer_sys::fuzz_target;
use spot_core::reasoner::prompt::{extract_json_object, parse_branch_reply, parse_handoff_reply};
use spot_core::reasoner::{BranchInfo, BranchQuery, DriverSummary, HandoffItem, HandoffQuery, VehicleState};

fn branch_query() -> BranchQuery {
    let branch = |id: u32, angle: f64| BranchInfo {
        id,
        turn_angle_deg: angle,
        semantic_tags: vec!["Road".into()],
        feasible: true,
        target: [0.0, 0.0],
    };
    BranchQuery {
        driver: DriverSummary {
            aggr: 0.3,
            turn_intent: "PREP_LEFT".into(),
            intent_prob: 0.9,
        },
        state: VehicleState {
            speed_m_s: 8.0,
            location: [0.0, 0.0],
        },
        branches: vec![branch(1, 0.0), branch(2, 90.0), branch(3, -90.0)],
    }
}

fn handoff_query() -> HandoffQuery {
    let item = |id: &str| HandoffItem {
        id: id.into(),
        eta_s: 3.0,
        dwell_s: 2.0,
        angle_deg: 45.0,
        speed_m_s: 8.0,
    };
    HandoffQuery {
        candidates: vec![item("CCTV_01"), item("CCTV_02")],
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(obj) = extract_json_object(text) {
        assert!(obj.starts_with('{') && obj.ends_with('}'));
    }
    let q = branch_query();
    if let Ok(j) = parse_branch_reply(text, &q) {
        assert!(j.answers(&q));
    }
    let h = handoff_query();
    if let Ok(j) = parse_handoff_reply(text, &h) {
        assert!(j.answers(&h));
    }
});
