//! Mean payoff games, AND-OR scheduling networks and parity games as signed systems.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use crate::error::ConvertError;
use crate::system::{Sign, SignMatrix, SignedSystem};
use crate::tropical::{Point, Rational, TropicalMatrix, TropicalValue};

/// Node of a bipartite game: `V0` holds coordinate states, `V1` apex states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    V0(usize),
    V1(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GameArc {
    pub from: Node,
    pub to: Node,
    pub weight: Rational,
}

/// Bipartite mean payoff game. Player 1 moves on `V1` and maximizes; player 0 minimizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanPayoffGame {
    pub v0: Vec<String>,
    pub v1: Vec<String>,
    arcs: Vec<GameArc>,
}

impl MeanPayoffGame {
    /// Checks bipartiteness, index ranges, and at most one arc per `V0`–`V1` pair.
    pub fn new(v0: Vec<String>, v1: Vec<String>, mut arcs: Vec<GameArc>) -> Result<Self, ConvertError> {
        let mut names = BTreeSet::new();
        for name in v0.iter().chain(&v1) {
            if !names.insert(name.as_str()) {
                return Err(ConvertError::DuplicateNode(name.clone()));
            }
        }
        let game = MeanPayoffGame { v0, v1, arcs: Vec::new() };
        let mut pairs = BTreeSet::new();
        for arc in &arcs {
            let pair = match (arc.from, arc.to) {
                (Node::V0(i), Node::V1(j)) | (Node::V1(j), Node::V0(i)) => (i, j),
                _ => return Err(ConvertError::NotBipartite(game.name(arc.from), game.name(arc.to))),
            };
            if pair.0 >= game.v0.len() {
                return Err(ConvertError::UnknownNode(format!("V0 #{}", pair.0 + 1)));
            }
            if pair.1 >= game.v1.len() {
                return Err(ConvertError::UnknownNode(format!("V1 #{}", pair.1 + 1)));
            }
            if !pairs.insert(pair) {
                return Err(ConvertError::DuplicatePair(game.name(arc.from), game.name(arc.to)));
            }
        }
        arcs.sort();
        Ok(MeanPayoffGame { arcs, ..game })
    }

    pub fn arcs(&self) -> &[GameArc] {
        &self.arcs
    }

    pub fn name(&self, node: Node) -> String {
        match node {
            Node::V0(i) => self.v0.get(i).cloned().unwrap_or_else(|| format!("#{}", i + 1)),
            Node::V1(j) => self.v1.get(j).cloned().unwrap_or_else(|| format!("#{}", j + 1)),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Node> {
        self.v0
            .iter()
            .position(|n| n == name)
            .map(Node::V0)
            .or_else(|| self.v1.iter().position(|n| n == name).map(Node::V1))
    }

    /// Outgoing arcs of `node`.
    pub fn successors(&self, node: Node) -> impl Iterator<Item = &GameArc> {
        self.arcs.iter().filter(move |a| a.from == node)
    }
}

fn default_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|k| format!("{prefix}{k}")).collect()
}

/// Arc `V0 i -> V1 j` of weight `w` gives `(w, -)` at `(j, i)`; arc `V1 j -> V0 i` gives `(-w, +)`.
pub fn mpg_to_signed(game: &MeanPayoffGame) -> Result<SignedSystem, ConvertError> {
    let (d, n) = (game.v0.len(), game.v1.len());
    if d == 0 || n == 0 {
        return Err(ConvertError::EmptyGame);
    }
    let mut entries = vec![TropicalValue::Infinity; n * d];
    let mut signs = vec![vec![Sign::Bullet; d]; n];
    for arc in game.arcs() {
        let (i, j, value, sign) = match (arc.from, arc.to) {
            (Node::V0(i), Node::V1(j)) => (i, j, arc.weight.clone(), Sign::Minus),
            (Node::V1(j), Node::V0(i)) => (i, j, -arc.weight.clone(), Sign::Plus),
            _ => unreachable!("validated bipartite"),
        };
        entries[j * d + i] = TropicalValue::Finite(value);
        signs[j][i] = sign;
    }
    if let Some(j) = (0..n).find(|&j| signs[j].iter().all(|s| *s == Sign::Bullet)) {
        return Err(ConvertError::EmptyRow(game.v1[j].clone()));
    }
    let matrix = TropicalMatrix::new(n, d, entries).expect("consistent dimensions");
    Ok(SignedSystem::new(matrix, SignMatrix::from_rows(signs).expect("rectangular"))?)
}

/// Inverse of [`mpg_to_signed`]; nodes are named `x1..` and `a1..`.
pub fn signed_to_mpg(sys: &SignedSystem) -> MeanPayoffGame {
    signed_to_mpg_named(sys, default_names("x", sys.d()), default_names("a", sys.n()))
}

pub fn signed_to_mpg_named(sys: &SignedSystem, v0: Vec<String>, v1: Vec<String>) -> MeanPayoffGame {
    let mut arcs = Vec::new();
    for j in 0..sys.n() {
        for i in 0..sys.d() {
            let Some(a) = sys.a(j, i).finite() else { continue };
            match sys.sigma(j, i) {
                Sign::Minus => arcs.push(GameArc { from: Node::V0(i), to: Node::V1(j), weight: a.clone() }),
                Sign::Plus => arcs.push(GameArc { from: Node::V1(j), to: Node::V0(i), weight: -a.clone() }),
                Sign::Bullet => {}
            }
        }
    }
    arcs.sort();
    MeanPayoffGame { v0, v1, arcs }
}

/// Waiting condition `(X, J)`: the condition starts once some state of `X` has started, and
/// delays every state of `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaitCondition {
    pub name: String,
    pub x: Vec<usize>,
    pub j: Vec<usize>,
    /// Weight of the arc from `x[k]` into the condition.
    pub x_weights: Vec<Rational>,
    /// Weight of the arc from the condition to `j[k]`.
    pub j_weights: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AndOrNetwork {
    pub states: Vec<String>,
    pub waits: Vec<WaitCondition>,
}

impl AndOrNetwork {
    pub fn validate(&self) -> Result<(), ConvertError> {
        for (k, w) in self.waits.iter().enumerate() {
            if w.x.is_empty() {
                return Err(ConvertError::EmptyWait(k));
            }
            if w.x.iter().any(|v| w.j.contains(v)) {
                return Err(ConvertError::OverlappingWait(k));
            }
            if let Some(&v) = w.x.iter().chain(&w.j).find(|&&v| v >= self.states.len()) {
                return Err(ConvertError::UnknownNode(format!("state #{}", v + 1)));
            }
            if w.x_weights.len() != w.x.len() || w.j_weights.len() != w.j.len() {
                return Err(ConvertError::MissingWeight(w.name.clone(), "state".into()));
            }
        }
        Ok(())
    }
}

/// One row per waiting condition: `(ω(v,u), +)` for `v ∈ X`, `(-ω(u,v), -)` for `v ∈ J`.
pub fn andor_to_signed(net: &AndOrNetwork) -> Result<SignedSystem, ConvertError> {
    net.validate()?;
    let (d, n) = (net.states.len(), net.waits.len());
    if d == 0 || n == 0 {
        return Err(ConvertError::EmptyGame);
    }
    let mut entries = vec![TropicalValue::Infinity; n * d];
    let mut signs = vec![vec![Sign::Bullet; d]; n];
    for (u, w) in net.waits.iter().enumerate() {
        for (&v, weight) in w.x.iter().zip(&w.x_weights) {
            entries[u * d + v] = TropicalValue::Finite(weight.clone());
            signs[u][v] = Sign::Plus;
        }
        for (&v, weight) in w.j.iter().zip(&w.j_weights) {
            entries[u * d + v] = TropicalValue::Finite(-weight.clone());
            signs[u][v] = Sign::Minus;
        }
    }
    let matrix = TropicalMatrix::new(n, d, entries).expect("consistent dimensions");
    Ok(SignedSystem::new(matrix, SignMatrix::from_rows(signs).expect("rectangular"))?)
}

/// `t_u = min_{v ∈ J} (t_v - ω(u,v))`.
pub fn or_start_times(net: &AndOrNetwork, v_times: &Point) -> Point {
    Point(
        net.waits
            .iter()
            .map(|w| {
                w.j.iter()
                    .zip(&w.j_weights)
                    .map(|(&v, weight)| v_times.0[v].shifted(&-weight.clone()))
                    .min()
                    .unwrap_or(TropicalValue::Infinity)
            })
            .collect(),
    )
}

/// Whether `(t_v, t_u)` satisfies both the AND and the OR constraints of the network.
pub fn schedule_satisfied(net: &AndOrNetwork, v_times: &Point, u_times: &Point) -> bool {
    net.waits.iter().enumerate().all(|(u, w)| {
        let tu = &u_times.0[u];
        let or_ok =
            w.x.iter()
                .zip(&w.x_weights)
                .map(|(&v, weight)| v_times.0[v].shifted(weight))
                .min()
                .is_some_and(|m| *tu >= m);
        let and_ok = w.j.iter().zip(&w.j_weights).all(|(&v, weight)| match tu {
            TropicalValue::Infinity => true,
            _ => v_times.0[v] >= tu.shifted(weight),
        });
        or_ok && and_ok
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityVertex {
    pub name: String,
    pub owner: Parity,
    pub label: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    pub vertices: Vec<ParityVertex>,
    pub arcs: Vec<(usize, usize)>,
}

/// Mean payoff game whose player 1 wins exactly where player even wins.
///
/// Outgoing arcs of a vertex labeled `k` weigh `(-M)^k` with `M` the vertex count. Even
/// vertices go to `V1`, odd ones to `V0`. Arcs between vertices of the same owner, and one arc
/// of each opposite pair, are routed through zero-weight helper nodes.
pub fn parity_to_mpg(pg: &ParityGame) -> Result<MeanPayoffGame, ConvertError> {
    if pg.vertices.is_empty() {
        return Err(ConvertError::EmptyGame);
    }
    let mut names = BTreeSet::new();
    for v in &pg.vertices {
        if !names.insert(v.name.as_str()) {
            return Err(ConvertError::DuplicateNode(v.name.clone()));
        }
    }
    let m = BigInt::from(pg.vertices.len());
    let mut v0 = Vec::new();
    let mut v1 = Vec::new();
    let mut place = Vec::with_capacity(pg.vertices.len());
    for v in &pg.vertices {
        place.push(match v.owner {
            Parity::Even => {
                v1.push(v.name.clone());
                Node::V1(v1.len() - 1)
            }
            Parity::Odd => {
                v0.push(v.name.clone());
                Node::V0(v0.len() - 1)
            }
        });
    }
    let arc_set: BTreeSet<(usize, usize)> = pg.arcs.iter().copied().collect();
    if let Some(&(a, b)) = pg.arcs.iter().find(|(a, b)| *a >= pg.vertices.len() || *b >= pg.vertices.len()) {
        return Err(ConvertError::UnknownNode(format!("vertex #{}", a.max(b) + 1)));
    }
    let mut arcs = Vec::new();
    let mut helper = 0usize;
    let mut fresh = |side: Parity, v0: &mut Vec<String>, v1: &mut Vec<String>| {
        helper += 1;
        let name = format!("~{helper}");
        match side {
            Parity::Even => {
                v1.push(name);
                Node::V1(v1.len() - 1)
            }
            Parity::Odd => {
                v0.push(name);
                Node::V0(v0.len() - 1)
            }
        }
    };
    for &(a, b) in &arc_set {
        let weight = Rational::from_integer((-m.clone()).pow(pg.vertices[a].label));
        let (from, to) = (place[a], place[b]);
        let zero = Rational::zero();
        match (from, to) {
            (Node::V0(_), Node::V0(_)) => {
                let h = fresh(Parity::Even, &mut v0, &mut v1);
                arcs.push(GameArc { from, to: h, weight });
                arcs.push(GameArc { from: h, to, weight: zero });
            }
            (Node::V1(_), Node::V1(_)) => {
                let h = fresh(Parity::Odd, &mut v0, &mut v1);
                arcs.push(GameArc { from, to: h, weight });
                arcs.push(GameArc { from: h, to, weight: zero });
            }
            (Node::V0(_), Node::V1(_)) if arc_set.contains(&(b, a)) => {
                let h1 = fresh(Parity::Even, &mut v0, &mut v1);
                let h2 = fresh(Parity::Odd, &mut v0, &mut v1);
                arcs.push(GameArc { from, to: h1, weight });
                arcs.push(GameArc { from: h1, to: h2, weight: zero.clone() });
                arcs.push(GameArc { from: h2, to, weight: zero });
            }
            _ => arcs.push(GameArc { from, to, weight }),
        }
    }
    MeanPayoffGame::new(v0, v1, arcs)
}

/// Node of the converted game standing for parity vertex `k`.
pub fn parity_vertex_node(pg: &ParityGame, k: usize) -> Node {
    let owner = pg.vertices[k].owner;
    let rank = pg.vertices[..k].iter().filter(|v| v.owner == owner).count();
    match owner {
        Parity::Even => Node::V1(rank),
        Parity::Odd => Node::V0(rank),
    }
}

/// Arc weights keyed by endpoint names, for diagnostics.
pub fn arc_table(game: &MeanPayoffGame) -> BTreeMap<(String, String), Rational> {
    game.arcs().iter().map(|a| ((game.name(a.from), game.name(a.to)), a.weight.clone())).collect()
}
