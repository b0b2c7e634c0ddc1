//! JSON formats for systems, games, networks, triangulations and results.
//!
//! Values are JSON integers, decimal numbers, `"p/q"` strings or `"inf"`. Indices in files are
//! 1-based. Output objects use sorted keys.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::convert::{AndOrNetwork, GameArc, MeanPayoffGame, Node, Parity, ParityGame, ParityVertex, WaitCondition};
use crate::covector::CovectorGraph;
use crate::error::{FormatError, ParseValueError};
use crate::solver::{Certificate, SupportResult, TraceEvent};
use crate::stm::{AbstractOutcome, AbstractStm};
use crate::system::{SignMatrix, SignedSystem};
use crate::tropical::{format_rational, parse_rational, Point, Rational, TropicalMatrix, TropicalValue};

fn shape(msg: impl Into<String>) -> FormatError {
    FormatError::Shape(msg.into())
}

pub fn value_from_json(v: &Value) -> Result<TropicalValue, FormatError> {
    match v {
        Value::Number(num) => Ok(TropicalValue::Finite(parse_rational(&num.to_string())?)),
        Value::String(s) => Ok(s.parse()?),
        Value::Null => Ok(TropicalValue::Infinity),
        other => Err(FormatError::Value(ParseValueError(other.to_string()))),
    }
}

pub fn rational_from_json(v: &Value) -> Result<Rational, FormatError> {
    match value_from_json(v)? {
        TropicalValue::Finite(r) => Ok(r),
        TropicalValue::Infinity => Err(shape("weight must be finite")),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    match (r.is_integer(), i64::try_from(r.numer())) {
        (true, Ok(v)) => json!(v),
        _ => json!(format_rational(r)),
    }
}

pub fn value_to_json(v: &TropicalValue) -> Value {
    match v {
        TropicalValue::Finite(r) => rational_to_json(r),
        TropicalValue::Infinity => json!("inf"),
    }
}

pub fn point_to_json(x: &Point) -> Value {
    Value::Array(x.0.iter().map(value_to_json).collect())
}

pub fn point_from_json(v: &Value) -> Result<Point, FormatError> {
    let items = v.as_array().ok_or_else(|| shape("point must be an array"))?;
    Ok(Point(items.iter().map(value_from_json).collect::<Result<_, _>>()?))
}

/// Signed system file: `{"matrix": [[...]], "signs": ["+-.", ...], "coords"?: [...], "rows"?: [...]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub system: SignedSystem,
    pub coords: Option<Vec<String>>,
    pub rows: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDto {
    matrix: Vec<Vec<Value>>,
    signs: Vec<String>,
    coords: Option<Vec<String>>,
    rows: Option<Vec<String>>,
}

pub fn parse_system(text: &str) -> Result<SystemFile, FormatError> {
    let dto: SystemDto = serde_json::from_str(text)?;
    let rows: Vec<Vec<TropicalValue>> = dto
        .matrix
        .iter()
        .map(|row| row.iter().map(value_from_json).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let matrix = TropicalMatrix::from_rows(rows).ok_or_else(|| shape("matrix rows differ in length"))?;
    let signs = parse_signs(&dto.signs)?;
    if signs.rows() != n || (n > 0 && signs.cols() != d) {
        return Err(shape(format!("signs are {}x{}, matrix is {n}x{d}", signs.rows(), signs.cols())));
    }
    if dto.coords.as_ref().is_some_and(|c| c.len() != d) || dto.rows.as_ref().is_some_and(|r| r.len() != n) {
        return Err(shape("name lists do not match the matrix"));
    }
    Ok(SystemFile { system: SignedSystem::new(matrix, signs)?, coords: dto.coords, rows: dto.rows })
}

fn parse_signs(rows: &[String]) -> Result<SignMatrix, FormatError> {
    let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
    SignMatrix::parse_rows(&refs).ok_or_else(|| shape("sign rows must use '+', '-', '.' and have equal length"))
}

pub fn system_to_json(file: &SystemFile) -> Value {
    let sys = &file.system;
    let matrix: Vec<Value> =
        (0..sys.n()).map(|j| Value::Array((0..sys.d()).map(|i| value_to_json(sys.a(j, i))).collect())).collect();
    let signs: Vec<String> = (0..sys.n()).map(|j| sys.signs().row_string(j)).collect();
    let mut out = json!({ "matrix": matrix, "signs": signs });
    if let Some(c) = &file.coords {
        out["coords"] = json!(c);
    }
    if let Some(r) = &file.rows {
        out["rows"] = json!(r);
    }
    out
}

/// Mean payoff game file: `{"v0": [...], "v1": [...], "arcs": [{"from", "to", "weight"}]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDto {
    v0: Vec<String>,
    v1: Vec<String>,
    arcs: Vec<ArcDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDto {
    from: String,
    to: String,
    weight: Value,
}

fn node_index(names: &BTreeMap<&str, Node>, name: &str) -> Result<Node, FormatError> {
    names.get(name).copied().ok_or_else(|| shape(format!("unknown node {name}")))
}

pub fn parse_game(text: &str) -> Result<MeanPayoffGame, FormatError> {
    let dto: GameDto = serde_json::from_str(text)?;
    let mut names: BTreeMap<&str, Node> = BTreeMap::new();
    for (k, name) in dto.v0.iter().enumerate() {
        names.insert(name, Node::V0(k));
    }
    for (k, name) in dto.v1.iter().enumerate() {
        if names.insert(name, Node::V1(k)).is_some() {
            return Err(shape(format!("node name {name} used twice")));
        }
    }
    if names.len() != dto.v0.len() + dto.v1.len() {
        return Err(shape("node names must be distinct"));
    }
    let arcs = dto
        .arcs
        .iter()
        .map(|a| {
            Ok(GameArc {
                from: node_index(&names, &a.from)?,
                to: node_index(&names, &a.to)?,
                weight: rational_from_json(&a.weight)?,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    MeanPayoffGame::new(dto.v0.clone(), dto.v1.clone(), arcs).map_err(|e| shape(e.to_string()))
}

pub fn game_to_json(game: &MeanPayoffGame) -> Value {
    let arcs: Vec<Value> = game
        .arcs()
        .iter()
        .map(|a| json!({ "from": game.name(a.from), "to": game.name(a.to), "weight": rational_to_json(&a.weight) }))
        .collect();
    json!({ "v0": game.v0, "v1": game.v1, "arcs": arcs })
}

/// AND-OR network file: `{"states": [...], "waits": [{"name", "x": [[state, weight]], "j": [[state, weight]]}]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AndOrDto {
    states: Vec<String>,
    waits: Vec<WaitDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WaitDto {
    name: String,
    x: Vec<(String, Value)>,
    j: Vec<(String, Value)>,
}

pub fn parse_andor(text: &str) -> Result<AndOrNetwork, FormatError> {
    let dto: AndOrDto = serde_json::from_str(text)?;
    let index: BTreeMap<&str, usize> = dto.states.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    let side = |list: &[(String, Value)]| -> Result<(Vec<usize>, Vec<Rational>), FormatError> {
        list.iter()
            .map(|(s, w)| {
                let k = index.get(s.as_str()).copied().ok_or_else(|| shape(format!("unknown state {s}")))?;
                Ok((k, rational_from_json(w)?))
            })
            .collect::<Result<Vec<_>, FormatError>>()
            .map(|v| v.into_iter().unzip())
    };
    let mut waits = Vec::new();
    for w in &dto.waits {
        let (x, x_weights) = side(&w.x)?;
        let (j, j_weights) = side(&w.j)?;
        waits.push(WaitCondition { name: w.name.clone(), x, j, x_weights, j_weights });
    }
    let net = AndOrNetwork { states: dto.states.clone(), waits };
    net.validate().map_err(|e| shape(e.to_string()))?;
    Ok(net)
}

/// Parity game file: `{"vertices": [{"name", "owner": "even"|"odd", "label"}], "arcs": [[from, to]]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParityDto {
    vertices: Vec<ParityVertexDto>,
    arcs: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParityVertexDto {
    name: String,
    owner: String,
    label: u32,
}

pub fn parse_parity(text: &str) -> Result<ParityGame, FormatError> {
    let dto: ParityDto = serde_json::from_str(text)?;
    let mut vertices = Vec::new();
    for v in &dto.vertices {
        let owner = match v.owner.as_str() {
            "even" => Parity::Even,
            "odd" => Parity::Odd,
            other => return Err(shape(format!("owner must be even or odd, got {other}"))),
        };
        vertices.push(ParityVertex { name: v.name.clone(), owner, label: v.label });
    }
    let index: BTreeMap<&str, usize> = dto.vertices.iter().enumerate().map(|(k, v)| (v.name.as_str(), k)).collect();
    let arcs = dto
        .arcs
        .iter()
        .map(|(a, b)| match (index.get(a.as_str()), index.get(b.as_str())) {
            (Some(&x), Some(&y)) => Ok((x, y)),
            _ => Err(shape(format!("unknown vertex in arc {a} -> {b}"))),
        })
        .collect::<Result<_, _>>()?;
    Ok(ParityGame { vertices, arcs })
}

/// Triangulation file: `{"d": .., "n": .., "trees": [[[coords of apex 1], ...], ...], "signs": [...]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangulationDto {
    n: usize,
    d: usize,
    trees: Vec<Vec<Vec<usize>>>,
    signs: Vec<String>,
}

pub fn parse_triangulation(text: &str) -> Result<AbstractStm, FormatError> {
    let dto: TriangulationDto = serde_json::from_str(text)?;
    let signs = parse_signs(&dto.signs)?;
    if signs.rows() != dto.n || signs.cols() != dto.d {
        return Err(shape(format!("signs are {}x{}, expected {}x{}", signs.rows(), signs.cols(), dto.n, dto.d)));
    }
    let mut trees = Vec::with_capacity(dto.trees.len());
    for tree in &dto.trees {
        let mut apexes = Vec::with_capacity(tree.len());
        for coords in tree {
            if coords.iter().any(|&c| c == 0 || c > dto.d) {
                return Err(shape(format!("coordinates must lie in 1..={}", dto.d)));
            }
            apexes.push(coords.iter().map(|c| c - 1).collect());
        }
        trees.push(apexes);
    }
    AbstractStm::new(dto.d, &trees, signs).map_err(|e| shape(e.to_string()))
}

pub fn triangulation_to_json(stm: &AbstractStm) -> Value {
    let trees: Vec<Vec<Vec<usize>>> = stm
        .trees()
        .iter()
        .map(|g| g.neighbours().into_iter().map(|cs| cs.into_iter().map(|c| c + 1).collect()).collect())
        .collect();
    let signs: Vec<String> = (0..stm.n()).map(|j| stm.signs().row_string(j)).collect();
    json!({ "n": stm.n(), "d": stm.d(), "trees": trees, "signs": signs })
}

fn one_based(items: impl IntoIterator<Item = usize>) -> Vec<usize> {
    items.into_iter().map(|k| k + 1).collect()
}

/// Edges as `[coordinate, apex, sign]`, 1-based and sorted.
pub fn covector_to_json(g: &CovectorGraph) -> Value {
    let edges: Vec<Value> = g.edge_list().into_iter().map(|(i, j, s)| json!([i, j, s.as_char().to_string()])).collect();
    json!({ "edges": edges, "support": one_based(g.support().iter().copied()), "tuple": g.tuple_notation() })
}

fn event_to_json(e: &TraceEvent) -> Value {
    json!({
        "delta": e.phase_delta + 1,
        "coords": one_based(e.coords.iter().copied()),
        "basis": one_based(e.basis.iter().copied()),
        "entering": e.entering.map(|k| k + 1),
        "leaving": e.leaving.map(|k| k + 1),
        "point": point_to_json(&e.cramer_point),
    })
}

pub fn certificate_to_json(cert: &Certificate, with_trace: bool) -> Value {
    let phases: Vec<Value> = cert
        .phases
        .iter()
        .map(|p| json!({ "delta": p.delta + 1, "coords": one_based(p.coords.iter().copied()), "pivots": p.pivots }))
        .collect();
    let mut out = json!({
        "verdict": cert.verdict.to_string(),
        "point": point_to_json(&cert.point.normalized()),
        "covector": covector_to_json(&cert.covector),
        "basis": one_based(cert.basis.iter().copied()),
        "delta": cert.delta + 1,
        "blocking_apex": cert.blocking_apex.map(|k| k + 1),
        "phases": phases,
    });
    if with_trace {
        out["trace"] = Value::Array(cert.trace.iter().map(event_to_json).collect());
    }
    out
}

pub fn support_to_json(res: &SupportResult) -> Value {
    let blocker = res.blocker.as_ref().map(|b| {
        let matching: Vec<Value> = b.matching.iter().map(|(&i, &j)| json!([i + 1, j + 1])).collect();
        json!({
            "point": point_to_json(&b.point),
            "covector": covector_to_json(&b.covector),
            "covered": one_based(b.covered.iter().copied()),
            "matching": matching,
        })
    });
    json!({
        "support": one_based(res.support.iter().copied()),
        "witness": res.witness.as_ref().map(|w| point_to_json(&w.normalized())),
        "blocker": blocker,
    })
}

pub fn abstract_to_json(out: &AbstractOutcome) -> Value {
    let trail: Vec<Value> = out
        .trace
        .iter()
        .map(|e| {
            json!({
                "delta": e.delta + 1,
                "coords": one_based(e.coords.iter().copied()),
                "basis": one_based(e.basis.iter().copied()),
                "entering": e.entering.map(|k| k + 1),
                "leaving": e.leaving.map(|k| k + 1),
                "covector": e.covector.tuple_notation(),
            })
        })
        .collect();
    json!({
        "verdict": out.verdict.to_string(),
        "covector": covector_to_json(&out.state.covector),
        "basis": one_based(out.state.basis.iter().copied()),
        "coords": one_based(out.state.all_coords()),
        "trail": trail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_roundtrip() {
        let text =
            r#"{"matrix": [[0, "1/2", "inf"], [-3, 4.5, null]], "signs": ["+-.", "-+."], "coords": ["a", "b", "c"]}"#;
        let file = parse_system(text).unwrap();
        assert_eq!(file.system.a(1, 1), &"9/2".parse::<TropicalValue>().unwrap());
        assert!(file.system.a(1, 2).is_infinite());
        let back = parse_system(&system_to_json(&file).to_string()).unwrap();
        assert_eq!(back, file);
        assert_eq!(system_to_json(&file)["matrix"][1][1], json!("9/2"));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_system("{").is_err());
        assert!(parse_system(r#"{"matrix": [[0, 1]], "signs": ["+"]}"#).is_err());
        assert!(parse_system(r#"{"matrix": [[0, true]], "signs": ["+-"]}"#).is_err());
        assert!(parse_system(r#"{"matrix": [[0, "inf"]], "signs": ["+-"]}"#).is_err());
        assert!(parse_system(r#"{"matrix": [[0]], "signs": ["+"], "extra": 1}"#).is_err());
    }

    #[test]
    fn game_and_triangulation() {
        let text = r#"{"v0": ["x1", "x2"], "v1": ["a1", "a2"], "arcs": [
            {"from": "a1", "to": "x1", "weight": 1}, {"from": "x1", "to": "a2", "weight": 4},
            {"from": "x2", "to": "a1", "weight": 0}, {"from": "a2", "to": "x2", "weight": -3}]}"#;
        let game = parse_game(text).unwrap();
        assert_eq!(parse_game(&game_to_json(&game).to_string()).unwrap(), game);
        let tri = r#"{"n": 2, "d": 2, "trees": [[[1, 2], [2]], [[1], [1, 2]]], "signs": ["+-", "-+"]}"#;
        let stm = parse_triangulation(tri).unwrap();
        assert_eq!(stm.trees().len(), 2);
        assert_eq!(parse_triangulation(&triangulation_to_json(&stm).to_string()).unwrap(), stm);
        assert!(parse_triangulation(r#"{"n": 1, "d": 1, "trees": [[[2]]], "signs": ["-"]}"#).is_err());
    }
}
