//! Replays the checked-in fuzz corpus through the same entry points and
//! invariants as the fuzz targets, so seeds stay valid on stable.

use std::fs;
use std::path::PathBuf;

use spot_core::eval::{render_report, rows_from_json};
use spot_core::map::documents::{parse_document_line, parse_documents};
use spot_core::map::MapFile;
use spot_core::perception::io::read_observations;
use spot_core::pipeline::Config;
use spot_core::reasoner::prompt::extract_json_object;
use spot_core::retrieval::parse_token;
use spot_core::retrieval::sidecar::read_sidecar;
use spot_core::sim::{read_gt, read_visits};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn document_seeds_parse_and_round_trip() {
    for (name, text) in seeds("document_line") {
        if name == "file" {
            assert!(parse_documents(&text).is_ok());
            continue;
        }
        let doc = parse_document_line(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc.render(), text, "{name}");
        assert_eq!(parse_document_line(&doc.render()).unwrap(), doc);
    }
}

#[test]
fn token_seeds_parse() {
    for (name, text) in seeds("token") {
        parse_token(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn csv_seeds_parse() {
    for (name, text) in seeds("observations_csv") {
        read_observations(text.as_bytes()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, text) in seeds("gt_csv") {
        assert!(!read_gt(text.as_bytes()).unwrap_or_else(|e| panic!("{name}: {e}")).is_empty());
    }
    for (name, text) in seeds("visits_csv") {
        assert!(!read_visits(text.as_bytes()).unwrap_or_else(|e| panic!("{name}: {e}")).is_empty());
    }
}

#[test]
fn json_seeds_parse() {
    for (name, text) in seeds("map_json") {
        MapFile::from_json(&text).and_then(MapFile::into_parts).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, text) in seeds("sidecar") {
        assert!(!read_sidecar(&text).unwrap_or_else(|e| panic!("{name}: {e}")).is_empty());
    }
    for (name, text) in seeds("report_json") {
        render_report(&rows_from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"))).unwrap();
    }
    for (name, text) in seeds("reasoner_reply") {
        assert!(extract_json_object(&text).is_some(), "{name}");
    }
}

#[test]
fn config_seeds_load() {
    for (name, text) in seeds("config") {
        let (overrides, body) = match text.split_once('\n') {
            Some((first, rest)) if first.contains('=') && !first.starts_with('{') => (vec![first.to_string()], rest),
            _ => (Vec::new(), text.as_str()),
        };
        Config::load(body, &overrides).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
