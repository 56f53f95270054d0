//! File-based stages. Each reads the previous stage's files under the
//! output directory and rewrites its own subdirectory from scratch, so a
//! rerun with the same config reproduces the tree byte for byte.

use std::collections::BTreeSet;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::case::{
    adjacent_cameras, camera, handoff_from_states, random_topk_expectation, score_plan, track_visit_samples, Handoff,
};
use super::config::{Config, ReasonerChoice};
use crate::error::{Error, Result};
use crate::eval::{ade, fde_axis, per_step_errors, render_report, topk_accuracy, write_per_step, ReportRow};
use crate::geometry::{Aabb, Point2};
use crate::map::documents::{parse_documents, render_documents_file};
use crate::map::route::shortest_route;
use crate::map::{
    build_fovs, build_zones, compute_gates, generate_documents, parse_cctv_index, CameraSpec, FovPolygon, MapFile,
    RoadGraph,
};
use crate::perception::io::{read_observations, write_world_track};
use crate::perception::{ExitState, Turn};
use crate::planner::{plan, start_waypoint, PlanResult};
use crate::reasoner::RemoteReasoner;
use crate::retrieval::sidecar::{read_sidecar, write_sidecar, SidecarEntry};
use crate::retrieval::{minhash, synthesize_prompt, IndexedDoc, RetrievalIndex};
use crate::sim::export::{read_gt, read_visits};
use crate::sim::observe::TRACK_ID;
use crate::sim::{export, generate_fleet, ScenarioSpec, Visit};

/// Where every stage reads and writes.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }
    pub fn sim(&self) -> PathBuf {
        self.root.join("sim")
    }
    pub fn map_file(&self) -> PathBuf {
        self.sim().join("map.json")
    }
    pub fn scenarios_file(&self) -> PathBuf {
        self.sim().join("scenarios.json")
    }
    pub fn scenario_dir(&self, id: &str) -> PathBuf {
        self.sim().join(id)
    }
    pub fn mapdoc(&self) -> PathBuf {
        self.root.join("mapdoc")
    }
    pub fn track(&self) -> PathBuf {
        self.root.join("track")
    }
    pub fn plan(&self) -> PathBuf {
        self.root.join("plan")
    }
    pub fn eval(&self) -> PathBuf {
        self.root.join("eval")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub spec: ScenarioSpec,
    pub habit: Turn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitTrack {
    pub visit: Visit,
    pub samples: usize,
    pub exit: Option<ExitState>,
}

/// Perception output for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackFile {
    pub scenario_id: String,
    pub visits: Vec<VisitTrack>,
    /// The scored handoff (last pair of visits), when there is one.
    pub handoff: Option<Handoff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct IndexEntry {
    doc_id: String,
    subject_ids: Vec<String>,
    bbox: Aabb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Baseline {
    k: usize,
    n_cases: usize,
    /// Expected Top-K count of guessing uniformly among adjacent cameras.
    random_topk_expected: f64,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))
}

fn fresh_dir(p: &Path) -> Result<()> {
    if p.exists() {
        fs::remove_dir_all(p)?;
    }
    fs::create_dir_all(p)?;
    Ok(())
}

fn read_text(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))
}

fn open(p: &Path) -> Result<fs::File> {
    fs::File::open(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))
}

/// Names the file in parse errors.
fn in_file<T>(p: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", p.display()),
        },
        Error::Csv(c) => Error::InvalidInput(format!("{}: {c}", p.display())),
        Error::Json(j) => Error::InvalidInput(format!("{}: {j}", p.display())),
        other => other,
    })
}

struct MapParts {
    graph: RoadGraph,
    cams: Vec<CameraSpec>,
    fovs: Vec<FovPolygon>,
}

fn load_map(l: &Layout) -> Result<MapParts> {
    let path = l.map_file();
    let (graph, cams) = in_file(&path, MapFile::from_json(&read_text(&path)?).and_then(MapFile::into_parts))?;
    let fovs = build_fovs(&cams, 0.0)?;
    Ok(MapParts { graph, cams, fovs })
}

fn load_scenarios(l: &Layout) -> Result<Vec<ScenarioRecord>> {
    let path = l.scenarios_file();
    in_file(&path, serde_json::from_str(&read_text(&path)?).map_err(Error::from))
}

fn load_visits(l: &Layout, id: &str) -> Result<Vec<Visit>> {
    let path = l.scenario_dir(id).join("visits.csv");
    in_file(&path, read_visits(open(&path)?))
}

fn load_track(l: &Layout, id: &str) -> Result<TrackFile> {
    let path = l.track().join(id).join("track.json");
    in_file(&path, serde_json::from_str(&read_text(&path)?).map_err(Error::from))
}

fn write_json<T: Serialize>(p: &Path, v: &T) -> Result<()> {
    fs::write(p, serde_json::to_string_pretty(v)? + "\n")?;
    Ok(())
}

/// Town, cameras and every scenario's ground truth, pixel observations and
/// visits.
pub fn cmd_sim(cfg: &Config, jobs: usize) -> Result<()> {
    let l = Layout::new(&cfg.output_dir);
    let fleet = pool(jobs)?.install(|| generate_fleet(&cfg.fleet))?;
    fresh_dir(&l.sim())?;
    fs::write(l.map_file(), MapFile::from_graph(&fleet.town.graph, &fleet.cameras).to_json())?;
    let records: Vec<ScenarioRecord> = fleet
        .scenarios
        .iter()
        .map(|s| ScenarioRecord {
            spec: s.spec.clone(),
            habit: s.habit,
        })
        .collect();
    write_json(&l.scenarios_file(), &records)?;
    for s in &fleet.scenarios {
        export(&s.gt, &s.observations, &s.visits, &l.scenario_dir(&s.spec.scenario_id))?;
    }
    log::info!("sim: {} scenarios, {} cameras", fleet.scenarios.len(), fleet.cameras.len());
    Ok(())
}

/// Map documents, their spatial index and MinHash signatures.
pub fn cmd_mapdoc(cfg: &Config) -> Result<()> {
    let l = Layout::new(&cfg.output_dir);
    let m = load_map(&l)?;
    let gates = compute_gates(&m.graph, &m.fovs);
    let zones = build_zones(&m.graph, &gates, &m.cams);
    let docs = generate_documents(&m.graph, &gates, &zones, &m.cams, &m.fovs);
    let text = render_documents_file(&docs);
    let parsed = parse_documents(&text)?;
    if parsed.iter().ne(docs.iter().map(|d| &d.body)) {
        return Err(Error::InvalidMap("documents do not parse back to their source".into()));
    }
    let mh = cfg.retrieval.minhash();
    let sidecar = docs
        .iter()
        .map(|d| Ok(SidecarEntry::new(&d.doc_id, &minhash(&d.text, &mh)?)))
        .collect::<Result<Vec<_>>>()?;
    let index: Vec<IndexEntry> = docs
        .iter()
        .map(|d| IndexEntry {
            doc_id: d.doc_id.clone(),
            subject_ids: d.subject_ids.clone(),
            bbox: d.bbox,
        })
        .collect();
    fresh_dir(&l.mapdoc())?;
    fs::write(l.mapdoc().join("documents.txt"), text)?;
    fs::write(l.mapdoc().join("signatures.json"), write_sidecar(&sidecar))?;
    write_json(&l.mapdoc().join("index.json"), &index)?;
    log::info!("mapdoc: {} documents", docs.len());
    Ok(())
}

fn track_one(l: &Layout, m: &MapParts, id: &str, cfg: &Config) -> Result<TrackFile> {
    let dir = l.scenario_dir(id);
    let obs_path = dir.join("observations.csv");
    let obs = in_file(&obs_path, read_observations(open(&obs_path)?))?;
    let visits = load_visits(l, id)?;
    let out = l.track().join(id);
    fs::create_dir_all(&out)?;
    let mut tracks = Vec::new();
    let mut states = Vec::new();
    for (k, v) in visits.iter().enumerate() {
        let cam = camera(&m.cams, &v.cctv_id)?;
        let (samples, st) = match track_visit_samples(&obs, cam, v, &cfg.case.thresholds) {
            Ok(r) => r,
            Err(Error::TooFewSamples { .. }) => (Vec::new(), Vec::new()),
            Err(e) => return Err(e),
        };
        let f = fs::File::create(out.join(format!("visit_{k:02}_{}.csv", v.cctv_id)))?;
        write_world_track(BufWriter::new(f), TRACK_ID, &samples)?;
        tracks.push(VisitTrack {
            visit: v.clone(),
            samples: samples.len(),
            exit: crate::perception::summarize_exit_state(&st, &v.cctv_id, &cfg.case.exit).ok(),
        });
        states.push(st);
    }
    let handoff = if visits.len() >= 2 && states[..visits.len() - 1].iter().all(|s| !s.is_empty()) {
        let src = visits.len() - 2;
        Some(handoff_from_states(&states[..=src], &visits[src].cctv_id, &m.graph, &cfg.case)?)
    } else {
        None
    };
    let tf = TrackFile {
        scenario_id: id.to_string(),
        visits: tracks,
        handoff,
    };
    write_json(&out.join("track.json"), &tf)?;
    Ok(tf)
}

/// World tracks and exit states for every visit, plus the driver profile
/// of each scenario's scored handoff.
pub fn cmd_track(cfg: &Config, jobs: usize) -> Result<()> {
    let l = Layout::new(&cfg.output_dir);
    let m = load_map(&l)?;
    let records = load_scenarios(&l)?;
    fresh_dir(&l.track())?;
    let done = pool(jobs)?.install(|| {
        records
            .par_iter()
            .map(|r| track_one(&l, &m, &r.spec.scenario_id, cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    log::info!("track: {} scenarios", done.len());
    Ok(())
}

/// One plan per scored handoff, as JSON plus a readable score trace.
pub fn cmd_plan(cfg: &Config, jobs: usize) -> Result<()> {
    let l = Layout::new(&cfg.output_dir);
    let m = load_map(&l)?;
    let records = load_scenarios(&l)?;
    let reasoner = cfg.reasoner.build()?;
    fresh_dir(&l.plan())?;
    let n = pool(jobs)?.install(|| {
        records
            .par_iter()
            .map(|r| {
                let id = &r.spec.scenario_id;
                let Some(h) = load_track(&l, id)?.handoff else { return Ok(0) };
                let p = plan(&h.exit, &m.graph, &m.fovs, &h.profile, &cfg.case.beam, reasoner.as_ref())?;
                fs::write(l.plan().join(format!("{id}.json")), p.to_json() + "\n")?;
                fs::write(l.plan().join(format!("{id}.trace.txt")), p.render_trace())?;
                Ok(1)
            })
            .collect::<Result<Vec<usize>>>()
    })?;
    log::info!("plan: {} plans with reasoner {}", n.iter().sum::<usize>(), reasoner.name());
    Ok(())
}

/// Metrics over every plan: report.md, results.json, per_step.csv and the
/// random-guess baseline.
pub fn cmd_eval(cfg: &Config) -> Result<()> {
    let l = Layout::new(&cfg.output_dir);
    let m = load_map(&l)?;
    let records = load_scenarios(&l)?;
    let mut cases = Vec::new();
    let mut errs = Vec::new();
    let mut steps = Vec::new();
    let mut model = String::new();
    let mut random = 0.0;
    for r in &records {
        let id = &r.spec.scenario_id;
        let plan_path = l.plan().join(format!("{id}.json"));
        if !plan_path.exists() {
            continue;
        }
        let p: PlanResult = in_file(&plan_path, serde_json::from_str(&read_text(&plan_path)?).map_err(Error::from))?;
        let h = load_track(&l, id)?
            .handoff
            .ok_or_else(|| Error::InvalidInput(format!("{id}: plan exists but the track has no handoff")))?;
        let visits = load_visits(&l, id)?;
        let (src, next) = match (visits.get(h.source), visits.get(h.source + 1)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidInput(format!("{id}: handoff visit {} out of range", h.source))),
        };
        let gt_path = l.scenario_dir(id).join("gt_traj.csv");
        let gt = in_file(&gt_path, read_gt(open(&gt_path)?))?;
        let (case, pair) = score_plan(&p, &gt, src, next, id, &cfg.case)?;
        let start = start_waypoint(&m.graph, h.exit.exit_position, cfg.case.beam.snap_radius_m)?;
        let adj = adjacent_cameras(&m.graph, &m.fovs, &src.cctv_id, start);
        random += random_topk_expectation(&adj, &next.cctv_id, cfg.case.top_k);
        errs.push((ade(&pair)?, fde_axis(&pair)?));
        steps.extend(per_step_errors(&pair)?.into_iter().map(|(k, d)| (id.clone(), k, d)));
        cases.push(case);
        model = p.reasoner;
    }
    let rows = if cases.is_empty() {
        Vec::new()
    } else {
        let n = cases.len() as f64;
        let t = topk_accuracy(&cases, cfg.case.top_k)?;
        vec![ReportRow {
            model,
            fde_x: errs.iter().map(|e| e.1 .0).sum::<f64>() / n,
            fde_y: errs.iter().map(|e| e.1 .1).sum::<f64>() / n,
            ade: errs.iter().map(|e| e.0).sum::<f64>() / n,
            top1: t.top1,
            topk: t.topk,
            n_cases: t.n,
        }]
    };
    let (text, json) = render_report(&rows)?;
    fresh_dir(&l.eval())?;
    fs::write(l.eval().join("report.md"), text)?;
    fs::write(l.eval().join("results.json"), json)?;
    write_per_step(BufWriter::new(fs::File::create(l.eval().join("per_step.csv"))?), &steps)?;
    write_json(
        &l.eval().join("baseline.json"),
        &Baseline {
            k: cfg.case.top_k,
            n_cases: cases.len(),
            random_topk_expected: random,
        },
    )?;
    log::info!("eval: {} cases", cases.len());
    Ok(())
}

/// Camera ids mentioned in `text`, in order of first mention.
pub fn mentioned_cameras(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for w in text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
        if parse_cctv_index(w).is_some() && !out.iter().any(|x| x == w) {
            out.push(w.to_string());
        }
    }
    out
}

fn route_answer(m: &MapParts, from: &str, to: &str) -> Result<String> {
    let gates = compute_gates(&m.graph, &m.fovs);
    let wps = shortest_route(&m.graph, &gates, &m.fovs, from, to)?;
    let len: f64 = wps.windows(2).map(|w| w[0].position.dist(w[1].position)).sum();
    let mut roads: Vec<u32> = Vec::new();
    for w in &wps {
        if roads.last() != Some(&w.road_id) {
            roads.push(w.road_id);
        }
    }
    let roads: Vec<String> = roads.iter().map(u32::to_string).collect();
    Ok(format!(
        "Shortest route {from} -> {to}: {} waypoints, {len:.1} m\nRoads: {}\n",
        wps.len(),
        roads.join(" -> ")
    ))
}

fn load_index(l: &Layout, cfg: &Config) -> Result<(RetrievalIndex, Vec<IndexedDoc>)> {
    let dir = l.mapdoc();
    let text = read_text(&dir.join("documents.txt"))?;
    let index_path = dir.join("index.json");
    let entries: Vec<IndexEntry> =
        in_file(&index_path, serde_json::from_str(&read_text(&index_path)?).map_err(Error::from))?;
    let lines: Vec<&str> = text.lines().filter(|s| !s.is_empty()).collect();
    if lines.len() != entries.len() {
        return Err(Error::InvalidInput(format!(
            "documents.txt has {} lines but index.json has {} entries",
            lines.len(),
            entries.len()
        )));
    }
    let docs: Vec<IndexedDoc> = entries
        .into_iter()
        .zip(lines)
        .map(|(e, t)| IndexedDoc {
            doc_id: e.doc_id,
            text: t.to_string(),
            bbox: e.bbox,
        })
        .collect();
    let mut idx = RetrievalIndex::build(docs.clone(), &cfg.retrieval)?;
    let sc_path = dir.join("signatures.json");
    let sidecar = in_file(&sc_path, read_sidecar(&read_text(&sc_path)?))?;
    let ids: BTreeSet<&str> = sidecar.iter().map(|e| e.doc_id.as_str()).collect();
    if ids.len() != idx.docs.len() || idx.docs.keys().any(|k| !ids.contains(k.as_str())) {
        return Err(Error::InvalidInput("signatures.json does not match documents.txt".into()));
    }
    idx.signatures = sidecar.iter().map(|e| (e.doc_id.clone(), e.signature())).collect();
    Ok((idx, docs))
}

/// Answers a question about the map. Two camera ids in the question ask
/// for the route between them; anything else is retrieval QA.
pub fn cmd_query(cfg: &Config, question: &str, pos: Option<Point2>) -> Result<String> {
    let l = Layout::new(&cfg.output_dir);
    let m = load_map(&l)?;
    let cams = mentioned_cameras(question);
    let known: Vec<&String> = cams.iter().filter(|c| m.cams.iter().any(|k| &k.cctv_id == *c)).collect();
    if let [a, b, ..] = known[..] {
        return route_answer(&m, a, b);
    }
    let (idx, _) = load_index(&l, cfg)?;
    let ranked = idx.search(question, pos, None)?;
    if ranked.is_empty() {
        return Ok(match pos {
            Some(p) => format!("No map documents match near ({:.1}, {:.1}).\n", p.x, p.y),
            None => "No map documents match the question.\n".to_string(),
        });
    }
    let with_text: Vec<_> = ranked.iter().map(|d| (d.clone(), idx.docs[&d.doc_id].text.clone())).collect();
    let prompt = synthesize_prompt(question, &with_text, &[], cfg.retrieval.prompt_budget);
    if let ReasonerChoice::Remote(rc) = &cfg.reasoner {
        return RemoteReasoner::new(rc.clone())?.ask(&prompt);
    }
    let mut out = prompt;
    out.push_str("[RANKED]\n");
    for (i, d) in ranked.iter().enumerate() {
        out.push_str(&format!("{}. {} {:.4}\n", i + 1, d.doc_id, d.s_final));
    }
    Ok(out)
}

/// sim, mapdoc, track, plan, eval.
pub fn run_pipeline(cfg: &Config, jobs: usize) -> Result<()> {
    cmd_sim(cfg, jobs)?;
    cmd_mapdoc(cfg)?;
    cmd_track(cfg, jobs)?;
    cmd_plan(cfg, jobs)?;
    cmd_eval(cfg)
}
