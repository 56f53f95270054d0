//! Templated text tokens for scenes, routes and documents.
//!
//! ```text
//! [SCENE] cam=C05 mv=F>FR>R pos=(120.5, 50.2)
//! [ROUTE] to=C07 turn=RIGHT sem=Intersection
//! [DOC] type=Zone id=Z_02 sem=SchoolZone
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::map::parse_cctv_index;
use crate::perception::Dir8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub source_ids: Vec<String>,
}

/// `CCTV_05` -> `C05`; other ids pass through.
pub fn short_cam(id: &str) -> String {
    match parse_cctv_index(id) {
        Some(i) => format!("C{i:02}"),
        None => id.to_string(),
    }
}

fn fmt1(x: f64) -> String {
    let s = format!("{x:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

fn sem(tags: &[&str]) -> String {
    if tags.is_empty() {
        "none".into()
    } else {
        tags.join(",")
    }
}

fn check_field(name: &str, v: &str) -> Result<()> {
    if v.is_empty() || v.chars().any(|c| c.is_whitespace()) {
        return Err(Error::InvalidInput(format!("token field {name} must be a non-empty word, got {v:?}")));
    }
    Ok(())
}

pub fn tokenize_scene(position: Point2, cctv_id: &str, history: &[Dir8]) -> Result<Token> {
    if history.is_empty() {
        return Err(Error::InvalidInput("scene token needs at least one direction label".into()));
    }
    check_field("cam", cctv_id)?;
    let mv: Vec<&str> = history.iter().map(|d| d.as_str()).collect();
    Ok(Token {
        text: format!(
            "[SCENE] cam={} mv={} pos=({}, {})",
            short_cam(cctv_id),
            mv.join(">"),
            fmt1(position.x),
            fmt1(position.y)
        ),
        source_ids: vec![cctv_id.to_string()],
    })
}

pub fn tokenize_route(next_cam: &str, turn_type: &str, tags: &[&str]) -> Result<Token> {
    check_field("to", next_cam)?;
    check_field("turn", turn_type)?;
    for t in tags {
        check_field("sem", t)?;
    }
    Ok(Token {
        text: format!("[ROUTE] to={} turn={} sem={}", short_cam(next_cam), turn_type, sem(tags)),
        source_ids: vec![next_cam.to_string()],
    })
}

pub fn tokenize_doc(obj_type: &str, id: &str, attrs: &[&str]) -> Result<Token> {
    check_field("type", obj_type)?;
    check_field("id", id)?;
    for t in attrs {
        check_field("sem", t)?;
    }
    Ok(Token {
        text: format!("[DOC] type={obj_type} id={id} sem={}", sem(attrs)),
        source_ids: vec![id.to_string()],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParsedToken {
    Scene { cam: String, mv: Vec<Dir8>, pos: (f64, f64) },
    Route { to: String, turn: String, sem: Vec<String> },
    Doc { obj_type: String, id: String, sem: Vec<String> },
}

fn field<'a>(part: Option<&'a str>, key: &str) -> Result<&'a str> {
    let p = part.ok_or_else(|| Error::parse(1, format!("missing field {key}")))?;
    let v = p
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(1, format!("expected {key}=")))?;
    if v.is_empty() {
        return Err(Error::parse(1, format!("empty field {key}")));
    }
    Ok(v)
}

fn parse_sem(v: &str) -> Result<Vec<String>> {
    if v == "none" {
        return Ok(Vec::new());
    }
    let tags: Vec<String> = v.split(',').map(str::to_string).collect();
    if tags.iter().any(String::is_empty) {
        return Err(Error::parse(1, "empty semantic tag"));
    }
    Ok(tags)
}

fn parse_coord(s: &str) -> Result<f64> {
    let ok = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || b == b'.' || b == b'-');
    let x: f64 = if ok { s.parse().map_err(|_| Error::parse(1, "bad coordinate"))? } else { f64::NAN };
    if !x.is_finite() {
        return Err(Error::parse(1, format!("bad coordinate {s:?}")));
    }
    Ok(x)
}

/// Parses any of the three token templates.
pub fn parse_token(text: &str) -> Result<ParsedToken> {
    if let Some(rest) = text.strip_prefix("[SCENE] ") {
        // pos=(x, y) contains a space, so split it off first
        let (head, pos) = rest
            .split_once(" pos=(")
            .ok_or_else(|| Error::parse(1, "missing pos"))?;
        let mut parts = head.split(' ');
        let cam = field(parts.next(), "cam")?.to_string();
        let mv_text = field(parts.next(), "mv")?;
        if parts.next().is_some() {
            return Err(Error::parse(1, "unexpected scene field"));
        }
        let mv = mv_text
            .split('>')
            .map(|l| Dir8::parse(l).ok_or_else(|| Error::parse(1, format!("bad direction {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let inner = pos.strip_suffix(')').ok_or_else(|| Error::parse(1, "unterminated pos"))?;
        let (x, y) = inner.split_once(", ").ok_or_else(|| Error::parse(1, "bad pos"))?;
        Ok(ParsedToken::Scene {
            cam,
            mv,
            pos: (parse_coord(x)?, parse_coord(y)?),
        })
    } else if let Some(rest) = text.strip_prefix("[ROUTE] ") {
        let mut parts = rest.split(' ');
        let to = field(parts.next(), "to")?.to_string();
        let turn = field(parts.next(), "turn")?.to_string();
        let sem = parse_sem(field(parts.next(), "sem")?)?;
        if parts.next().is_some() {
            return Err(Error::parse(1, "unexpected route field"));
        }
        Ok(ParsedToken::Route { to, turn, sem })
    } else if let Some(rest) = text.strip_prefix("[DOC] ") {
        let mut parts = rest.split(' ');
        let obj_type = field(parts.next(), "type")?.to_string();
        let id = field(parts.next(), "id")?.to_string();
        let sem = parse_sem(field(parts.next(), "sem")?)?;
        if parts.next().is_some() {
            return Err(Error::parse(1, "unexpected doc field"));
        }
        Ok(ParsedToken::Doc { obj_type, id, sem })
    } else {
        Err(Error::parse(1, "unknown token kind"))
    }
}
