//! Independent checks: mean payoff games by strategy enumeration, and integer brute force.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::convert::{MeanPayoffGame, Node};
use crate::error::OracleError;
use crate::solver::Strategy;
use crate::system::{Sign, SignedSystem};
use crate::tropical::{Point, Rational, TropicalValue};

/// Player-1 positional strategies enumerated at most.
pub const STRATEGY_CAP: u128 = 1_000_000;

/// Outcome of a play: a cycle mean, or a win by a stuck opponent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GameValue {
    /// Player 1 cannot move.
    NegInfinity,
    Mean(Rational),
    /// Player 0 cannot move.
    PosInfinity,
}

impl GameValue {
    pub fn is_nonnegative(&self) -> bool {
        match self {
            GameValue::NegInfinity => false,
            GameValue::Mean(m) => !m.is_negative(),
            GameValue::PosInfinity => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    /// `V0` states from which player 1 secures a nonnegative outcome.
    pub non_losing: BTreeSet<usize>,
    /// Optimal value of every `V0` state.
    pub values: Vec<GameValue>,
}

impl OracleVerdict {
    pub fn feasible(&self) -> bool {
        !self.non_losing.is_empty()
    }
}

trait KarpWeight: Clone + Ord + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + From<i64> {}
impl<W> KarpWeight for W where W: Clone + Ord + Add<Output = W> + Sub<Output = W> + Mul<Output = W> + From<i64> {}

/// Karp on a strongly connected graph: minimum cycle mean as `(total, length)`.
fn karp<W: KarpWeight>(m: usize, arcs: &[(usize, usize, W)]) -> Option<(W, usize)> {
    if arcs.is_empty() {
        return None;
    }
    let mut table: Vec<Vec<Option<W>>> = vec![vec![None; m]; m + 1];
    table[0][arcs[0].0] = Some(W::from(0));
    for k in 1..=m {
        let (prev, cur) = table.split_at_mut(k);
        for (u, v, w) in arcs {
            if let Some(du) = &prev[k - 1][*u] {
                let cand = du.clone() + w.clone();
                if cur[0][*v].as_ref().is_none_or(|c| cand < *c) {
                    cur[0][*v] = Some(cand);
                }
            }
        }
    }
    let less =
        |a: &(W, usize), b: &(W, usize)| (a.0.clone() * W::from(b.1 as i64)).cmp(&(b.0.clone() * W::from(a.1 as i64)));
    let mut best: Option<(W, usize)> = None;
    for v in 0..m {
        let Some(dm) = &table[m][v] else { continue };
        let mut worst: Option<(W, usize)> = None;
        for k in 0..m {
            if let Some(dk) = &table[k][v] {
                let cand = (dm.clone() - dk.clone(), m - k);
                if worst.as_ref().is_none_or(|w| less(&cand, w) == Ordering::Greater) {
                    worst = Some(cand);
                }
            }
        }
        if let Some(w) = worst {
            if best.as_ref().is_none_or(|b| less(&w, b) == Ordering::Less) {
                best = Some(w);
            }
        }
    }
    best
}

/// Integer weights: `values * scale` exactly.
struct Scaled {
    ints: Vec<BigInt>,
    scale: BigInt,
}

fn scale(weights: &[&Rational]) -> Scaled {
    let scale = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let ints = weights.iter().map(|w| w.numer() * (&scale / w.denom())).collect();
    Scaled { ints, scale }
}

/// Minimum cycle mean of each strongly connected component, in the order of `comps`.
fn component_means(n: usize, arcs: &[(usize, usize, Rational)], comps: &[Vec<usize>]) -> Vec<Option<Rational>> {
    let weights: Vec<&Rational> = arcs.iter().map(|a| &a.2).collect();
    let Scaled { ints, scale } = scale(&weights);
    let bound = ints.iter().map(|v| v.abs()).max().unwrap_or_default() * BigInt::from(n + 1) * BigInt::from(n + 1);
    let small = bound.bits() < 100;
    let mut comp_of = vec![usize::MAX; n];
    let mut local = vec![0usize; n];
    for (c, nodes) in comps.iter().enumerate() {
        for (k, &v) in nodes.iter().enumerate() {
            comp_of[v] = c;
            local[v] = k;
        }
    }
    let mut per_comp: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for (idx, (u, v, _)) in arcs.iter().enumerate() {
        if comp_of[*u] == comp_of[*v] {
            per_comp[comp_of[*u]].push(idx);
        }
    }
    per_comp
        .iter()
        .enumerate()
        .map(|(c, idxs)| {
            let m = comps[c].len();
            let res = if small {
                let a: Vec<(usize, usize, i128)> = idxs
                    .iter()
                    .map(|&i| (local[arcs[i].0], local[arcs[i].1], ints[i].to_i128().expect("bounded")))
                    .collect();
                karp(m, &a).map(|(t, l)| (BigInt::from(t), l))
            } else {
                let a: Vec<(usize, usize, BigInt)> =
                    idxs.iter().map(|&i| (local[arcs[i].0], local[arcs[i].1], ints[i].clone())).collect();
                karp(m, &a)
            };
            res.map(|(total, len)| Rational::new(total, &scale * BigInt::from(len)))
        })
        .collect()
}

/// Minimum cycle mean of a directed graph on `n` nodes; `None` if acyclic.
pub fn min_mean_cycle(n: usize, arcs: &[(usize, usize, Rational)]) -> Option<Rational> {
    let comps = components(n, arcs);
    component_means(n, arcs, &comps).into_iter().flatten().min()
}

fn components(n: usize, arcs: &[(usize, usize, Rational)]) -> Vec<Vec<usize>> {
    let mut g = DiGraph::<(), ()>::with_capacity(n, arcs.len());
    let idx: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (u, v, _) in arcs {
        g.add_edge(idx[*u], idx[*v], ());
    }
    tarjan_scc(&g).into_iter().map(|c| c.into_iter().map(|x| x.index()).collect()).collect()
}

/// Value of every node when the chooser controls all branching.
///
/// `dead_end[v]` is the outcome if play gets stuck at `v`. A minimizing chooser takes the
/// smallest reachable outcome, a maximizing one the largest.
fn chooser_values(
    n: usize,
    arcs: &[(usize, usize, Rational)],
    dead_end: &[GameValue],
    minimize: bool,
) -> Vec<Option<GameValue>> {
    let flipped: Vec<(usize, usize, Rational)>;
    let work = if minimize {
        arcs
    } else {
        flipped = arcs.iter().map(|(u, v, w)| (*u, *v, -w.clone())).collect();
        &flipped
    };
    let comps = components(n, work);
    let means = component_means(n, work, &comps);
    let mut comp_of = vec![0usize; n];
    for (c, nodes) in comps.iter().enumerate() {
        for &v in nodes {
            comp_of[v] = c;
        }
    }
    let mut out_degree = vec![0usize; n];
    let mut succ_comps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    for (u, v, _) in work {
        out_degree[*u] += 1;
        if comp_of[*u] != comp_of[*v] {
            succ_comps[comp_of[*u]].insert(comp_of[*v]);
        }
    }
    let better = |a: &GameValue, b: &GameValue| if minimize { a < b } else { a > b };
    // tarjan_scc lists sink components first
    let mut best: Vec<Option<GameValue>> = vec![None; comps.len()];
    for c in 0..comps.len() {
        let mut cand: Option<GameValue> = means[c].clone().map(|m| GameValue::Mean(if minimize { m } else { -m }));
        for &v in &comps[c] {
            if out_degree[v] == 0 {
                let d = dead_end[v].clone();
                if cand.as_ref().is_none_or(|x| better(&d, x)) {
                    cand = Some(d);
                }
            }
        }
        for &s in &succ_comps[c] {
            if let Some(d) = &best[s] {
                if cand.as_ref().is_none_or(|x| better(d, x)) {
                    cand = Some(d.clone());
                }
            }
        }
        best[c] = cand;
    }
    (0..n).map(|v| best[comp_of[v]].clone()).collect()
}

fn node_index(game: &MeanPayoffGame, node: Node) -> usize {
    match node {
        Node::V0(i) => i,
        Node::V1(j) => game.v0.len() + j,
    }
}

fn dead_ends(game: &MeanPayoffGame) -> Vec<GameValue> {
    let mut v = vec![GameValue::PosInfinity; game.v0.len()];
    v.extend(std::iter::repeat_n(GameValue::NegInfinity, game.v1.len()));
    v
}

/// Optimal values of the `V0` states by enumerating player-1 positional strategies.
pub fn mpg_winning_states(game: &MeanPayoffGame) -> Result<OracleVerdict, OracleError> {
    let (d, n) = (game.v0.len(), game.v1.len());
    let total = d + n;
    let mut fixed_arcs: Vec<(usize, usize, Rational)> = Vec::new();
    let mut choices: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); n];
    for arc in game.arcs() {
        let e = (node_index(game, arc.from), node_index(game, arc.to), arc.weight.clone());
        match arc.from {
            Node::V0(_) => fixed_arcs.push(e),
            Node::V1(j) => choices[j].push(e),
        }
    }
    let count = choices.iter().try_fold(1u128, |acc, c| acc.checked_mul(c.len().max(1) as u128));
    match count {
        Some(c) if c <= STRATEGY_CAP => {}
        Some(c) => return Err(OracleError::ScaleCap(c)),
        None => return Err(OracleError::ScaleCap(u128::MAX)),
    }
    let dead = dead_ends(game);
    let mut best: Vec<GameValue> = vec![GameValue::NegInfinity; d];
    let mut pick = vec![0usize; n];
    loop {
        let mut arcs = fixed_arcs.clone();
        for (j, opts) in choices.iter().enumerate() {
            if let Some(e) = opts.get(pick[j]) {
                arcs.push(e.clone());
            }
        }
        let values = chooser_values(total, &arcs, &dead, true);
        for (i, b) in best.iter_mut().enumerate() {
            let v = values[i].clone().expect("every node has an outcome");
            if v > *b {
                *b = v;
            }
        }
        let mut k = 0;
        while k < n {
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let non_losing = (0..d).filter(|&i| best[i].is_nonnegative()).collect();
    Ok(OracleVerdict { non_losing, values: best })
}

/// Value from each start when one player follows `strategy` and the other plays optimally.
///
/// An apex strategy fixes the moves of player 1; a coordinate strategy fixes player 0 on the
/// mapped states. Returns `None` if a strategy edge is not an arc of the game.
pub fn restricted_values(game: &MeanPayoffGame, strategy: &Strategy) -> Option<Vec<GameValue>> {
    let total = game.v0.len() + game.v1.len();
    let mut arcs = Vec::new();
    let (fixed, minimize) = match strategy {
        Strategy::Apex(m) => (m.iter().map(|(&j, &i)| (Node::V1(j), Node::V0(i))).collect::<Vec<_>>(), true),
        Strategy::Coordinate(m) => (m.iter().map(|(&i, &j)| (Node::V0(i), Node::V1(j))).collect(), false),
    };
    for &(from, to) in &fixed {
        if !game.successors(from).any(|a| a.to == to) {
            return None;
        }
    }
    for arc in game.arcs() {
        let owned_by_fixed = match (strategy, arc.from) {
            (Strategy::Apex(_), Node::V1(_)) => true,
            (Strategy::Coordinate(m), Node::V0(i)) => m.contains_key(&i),
            _ => false,
        };
        if owned_by_fixed && !fixed.contains(&(arc.from, arc.to)) {
            continue;
        }
        arcs.push((node_index(game, arc.from), node_index(game, arc.to), arc.weight.clone()));
    }
    let values = chooser_values(total, &arcs, &dead_ends(game), minimize);
    Some(values.into_iter().map(|v| v.expect("every node has an outcome")).collect())
}

/// Scans integer points in a box around zero, one support pattern at a time.
///
/// The first coordinate of each support is pinned to 0; the others range over
/// `[-radius, radius]` with `radius = 2 d ω + d` unless given.
pub fn brute_force_point(sys: &SignedSystem, radius: Option<i64>) -> Result<Option<Point>, OracleError> {
    let d = sys.d();
    if d > 4 {
        return Err(OracleError::TooManyCoordinates(d));
    }
    let mut rows: Vec<Vec<(usize, i64, Sign)>> = Vec::with_capacity(sys.n());
    let mut omega = 0i64;
    for r in 0..sys.n() {
        let mut row = Vec::new();
        for c in 0..d {
            if let Some(v) = sys.a(r, c).finite() {
                if !v.is_integer() {
                    return Err(OracleError::NonInteger);
                }
                let v = v.to_integer().to_i64().ok_or(OracleError::NonInteger)?;
                omega = omega.max(v.abs());
                row.push((c, v, sys.sigma(r, c)));
            }
        }
        rows.push(row);
    }
    let radius = radius.unwrap_or(2 * d as i64 * omega + d as i64);
    const INF: i64 = i64::MAX;
    for mask in 1u32..(1 << d) {
        let cols: Vec<usize> = (0..d).filter(|c| mask & (1 << c) != 0).collect();
        let local: Vec<Vec<(usize, i64, Sign)>> = rows
            .iter()
            .map(|row| row.iter().filter(|(c, _, _)| mask & (1 << c) != 0).copied().collect())
            .filter(|row: &Vec<(usize, i64, Sign)>| !row.is_empty())
            .collect();
        let mut x = vec![INF; d];
        for &c in &cols {
            x[c] = -radius;
        }
        x[cols[0]] = 0;
        loop {
            let ok = local.iter().all(|row| {
                let (mut lhs, mut rhs) = (INF, INF);
                for &(c, a, s) in row {
                    let v = a + x[c];
                    match s {
                        Sign::Plus => lhs = lhs.min(v),
                        Sign::Minus => rhs = rhs.min(v),
                        Sign::Bullet => {}
                    }
                }
                lhs <= rhs
            });
            if ok {
                let point =
                    x.iter().map(|&v| if v == INF { TropicalValue::Infinity } else { TropicalValue::int(v) }).collect();
                return Ok(Some(Point(point)));
            }
            let mut k = 1;
            while k < cols.len() {
                let c = cols[k];
                if x[c] < radius {
                    x[c] += 1;
                    break;
                }
                x[c] = -radius;
                k += 1;
            }
            if k >= cols.len() {
                break;
            }
        }
    }
    Ok(None)
}

pub fn brute_force_feasible(sys: &SignedSystem, radius: Option<i64>) -> Result<bool, OracleError> {
    brute_force_point(sys, radius).map(|p| p.is_some())
}

/// Every simple cycle's mean, by exhaustive search; for cross-checking on tiny graphs.
pub fn min_mean_cycle_exhaustive(n: usize, arcs: &[(usize, usize, Rational)]) -> Option<Rational> {
    fn walk(
        start: usize,
        at: usize,
        arcs: &[(usize, usize, Rational)],
        on_path: &mut Vec<bool>,
        sum: Rational,
        len: usize,
        best: &mut Option<Rational>,
    ) {
        for (u, v, w) in arcs {
            if *u != at {
                continue;
            }
            let total = &sum + w;
            if *v == start {
                let mean = &total / Rational::from_integer(BigInt::from(len + 1));
                if best.as_ref().is_none_or(|b| mean < *b) {
                    *best = Some(mean);
                }
            } else if *v > start && !on_path[*v] {
                on_path[*v] = true;
                walk(start, *v, arcs, on_path, total, len + 1, best);
                on_path[*v] = false;
            }
        }
    }
    let mut best = None;
    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        walk(s, s, arcs, &mut on_path, Rational::zero(), 0, &mut best);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::{mpg_to_signed, signed_to_mpg, GameArc};

    fn r(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn karp_examples() {
        assert_eq!(min_mean_cycle(1, &[(0, 0, r(-3))]), Some(r(-3)));
        assert_eq!(min_mean_cycle(3, &[(0, 1, r(1)), (1, 2, r(5))]), None);
        assert_eq!(min_mean_cycle(2, &[(0, 1, r(1)), (1, 0, r(-3))]), Some(r(-1)));
        let arcs = [(0, 1, "1/2".parse().unwrap()), (1, 0, r(0)), (1, 2, r(-4)), (2, 1, r(3))];
        assert_eq!(min_mean_cycle(3, &arcs), Some("-1/2".parse().unwrap()));
        assert_eq!(min_mean_cycle_exhaustive(3, &arcs), Some("-1/2".parse().unwrap()));
    }

    #[test]
    fn karp_on_huge_weights_uses_big_integers() {
        let big: Rational = "100000000000000000000000000000000000000".parse().unwrap();
        let arcs = [(0, 1, big.clone()), (1, 0, -big.clone() - r(2))];
        assert_eq!(min_mean_cycle(2, &arcs), Some(r(-1)));
    }

    fn two_cycle_game() -> MeanPayoffGame {
        MeanPayoffGame::new(
            vec!["x1".into(), "x2".into()],
            vec!["a1".into(), "a2".into()],
            vec![
                GameArc { from: Node::V1(0), to: Node::V0(0), weight: r(1) },
                GameArc { from: Node::V0(0), to: Node::V1(1), weight: r(4) },
                GameArc { from: Node::V0(1), to: Node::V1(0), weight: r(0) },
                GameArc { from: Node::V1(1), to: Node::V0(1), weight: r(-3) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn mean_payoff_example_is_non_losing() {
        let v = mpg_winning_states(&two_cycle_game()).unwrap();
        assert_eq!(v.non_losing, BTreeSet::from([0, 1]));
        assert_eq!(v.values[0], GameValue::Mean(r(1) / r(2)));
        let sys = mpg_to_signed(&two_cycle_game()).unwrap();
        assert!(brute_force_feasible(&sys, None).unwrap());
    }

    #[test]
    fn zero_cycle_is_non_losing_and_dead_ends_lose() {
        let arc = |from, to| GameArc { from, to, weight: r(0) };
        let g = MeanPayoffGame::new(
            vec!["x1".into(), "x2".into()],
            vec!["a1".into(), "a2".into()],
            vec![
                arc(Node::V0(0), Node::V1(0)),
                arc(Node::V1(0), Node::V0(1)),
                arc(Node::V0(1), Node::V1(1)),
                arc(Node::V1(1), Node::V0(0)),
            ],
        )
        .unwrap();
        let v = mpg_winning_states(&g).unwrap();
        assert_eq!(v.non_losing, BTreeSet::from([0, 1]));
        assert_eq!(v.values, vec![GameValue::Mean(r(0)), GameValue::Mean(r(0))]);
        let stuck =
            MeanPayoffGame::new(vec!["x".into()], vec!["a".into()], vec![arc(Node::V0(0), Node::V1(0))]).unwrap();
        assert_eq!(mpg_winning_states(&stuck).unwrap().values, vec![GameValue::NegInfinity]);
        let free =
            MeanPayoffGame::new(vec!["x".into()], vec!["a".into()], vec![arc(Node::V1(0), Node::V0(0))]).unwrap();
        assert_eq!(mpg_winning_states(&free).unwrap().values, vec![GameValue::PosInfinity]);
    }

    #[test]
    fn max_support_second_system_has_no_winning_state() {
        let sys = SignedSystem::from_ints(
            &[
                vec![Some(0), Some(0), None, None],
                vec![Some(0), Some(2), Some(11), None],
                vec![None, None, Some(0), Some(0)],
                vec![None, None, Some(2), Some(0)],
            ],
            &["+-..", "-++.", "..-+", "..+-"],
        )
        .unwrap();
        assert!(!mpg_winning_states(&signed_to_mpg(&sys)).unwrap().feasible());
        assert!(!brute_force_feasible(&sys, None).unwrap());
    }

    #[test]
    fn example_system_is_feasible() {
        let sys = SignedSystem::from_ints(
            &[
                vec![Some(0), Some(0), Some(0)],
                vec![Some(0), Some(-1), Some(-2)],
                vec![Some(0), Some(-2), Some(-4)],
                vec![Some(0), None, Some(-6)],
            ],
            &["+--", "+-+", "+-+", "-.+"],
        )
        .unwrap();
        let p = brute_force_point(&sys, None).unwrap().unwrap();
        assert!(sys.evaluate_feasible(&p).unwrap());
        assert_eq!(mpg_winning_states(&signed_to_mpg(&sys)).unwrap().non_losing, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn brute_force_rejects_fractions_and_size() {
        let sys = SignedSystem::from_ints(&[vec![Some(1), Some(0)], vec![Some(5), Some(0)]], &["+-", "-+"]).unwrap();
        assert!(!brute_force_feasible(&sys, Some(0)).unwrap());
        assert!(brute_force_feasible(&sys, None).unwrap());
        let wide = SignedSystem::from_ints(&[vec![Some(0); 5]], &["+++++"]).unwrap();
        assert!(matches!(brute_force_point(&wide, None), Err(OracleError::TooManyCoordinates(5))));
    }
}
