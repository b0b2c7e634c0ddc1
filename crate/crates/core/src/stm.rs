//! Signed tropical matroids given by an explicit list of maximal trees.
//!
//! Nothing here looks at matrix entries: Cramer covectors are picked out of the tree list by
//! their degree sequence, and pivots walk from tree to tree.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::binomial;

use crate::covector::{covector_of, matchings_in, verify_covector_axioms, Classification, CovectorGraph};
use crate::cramer::is_basic_covector;
use crate::error::StmError;
use crate::solver::{full_order, Chooser, SolveOptions, Verdict};
use crate::system::{Sign, SignMatrix, SignedSystem};
use crate::tropical::{is_generic, Point, Rational};

/// Maximal covector graphs of a triangulation of `Δ_{n-1} × Δ_{d-1}` together with signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractStm {
    n: usize,
    d: usize,
    trees: Vec<CovectorGraph>,
    signs: SignMatrix,
}

impl AbstractStm {
    /// `trees[t][j]` lists the 0-based coordinates adjacent to apex `j` in tree `t`.
    pub fn new(d: usize, trees: &[Vec<Vec<usize>>], signs: SignMatrix) -> Result<Self, StmError> {
        let n = signs.rows();
        if signs.cols() != d {
            return Err(StmError::Invalid(vec![format!("sign matrix has {} columns, expected {d}", signs.cols())]));
        }
        let mut graphs = Vec::with_capacity(trees.len());
        for (t, tuple) in trees.iter().enumerate() {
            if tuple.len() != n {
                return Err(StmError::Invalid(vec![format!(
                    "tree {} has {} apex entries, expected {n}",
                    t + 1,
                    tuple.len()
                )]));
            }
            if let Some(&i) = tuple.iter().flatten().find(|&&i| i >= d) {
                return Err(StmError::Invalid(vec![format!("tree {} uses coordinate {} > {d}", t + 1, i + 1)]));
            }
            graphs.push(CovectorGraph::from_neighbours(&signs, tuple, Some((0..d).collect())));
        }
        Ok(AbstractStm { n, d, trees: graphs, signs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trees(&self) -> &[CovectorGraph] {
        &self.trees
    }

    pub fn signs(&self) -> &SignMatrix {
        &self.signs
    }

    /// Same trees under a different sign matrix.
    pub fn with_signs(&self, signs: SignMatrix) -> Result<Self, StmError> {
        let tuples: Vec<Vec<Vec<usize>>> = self.trees.iter().map(CovectorGraph::neighbours).collect();
        AbstractStm::new(self.d, &tuples, signs)
    }
}

/// Parses tuple notation such as `(13,3,1,12,1,1)` into 0-based neighbour lists.
///
/// Each entry is a run of 1-based single-digit coordinates.
pub fn parse_tuple(text: &str) -> Option<Vec<Vec<usize>>> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    inner
        .split(',')
        .map(|part| {
            let part = part.trim();
            if part.is_empty() {
                return None;
            }
            part.chars().map(|c| c.to_digit(10).filter(|&v| v > 0).map(|v| v as usize - 1)).collect()
        })
        .collect()
}

/// Checks fullness, genericity, trimmedness, the tree count, the degree sequences and
/// comparability of matchings.
pub fn validate_stm(stm: &AbstractStm) -> Result<(), StmError> {
    let (n, d) = (stm.n, stm.d);
    let mut problems = Vec::new();
    if n == 0 || d == 0 {
        return Err(StmError::Invalid(vec!["empty ground set".into()]));
    }
    let all: BTreeSet<usize> = (0..d).collect();
    for (t, g) in stm.trees.iter().enumerate() {
        if !g.is_spanning_tree(&all) {
            problems.push(format!("tree {} {} is not a spanning tree", t + 1, g.tuple_notation()));
        }
    }
    let covered: BTreeSet<(usize, usize)> = stm.trees.iter().flat_map(|g| g.edge_set()).collect();
    for i in 0..d {
        for j in 0..n {
            if !covered.contains(&(i, j)) {
                problems.push(format!("not full: edge ({}, {}) lies in no tree", i + 1, j + 1));
            }
        }
    }
    for j in 0..n {
        let minus = (0..d).filter(|&i| stm.signs.get(j, i) == Sign::Minus).count();
        if minus != 1 || (0..d).any(|i| stm.signs.get(j, i) == Sign::Bullet) {
            problems.push(format!("not trimmed: sign row {} needs exactly one '-' and no '.'", j + 1));
        }
    }
    let expected = binomial(n + d - 2, n - 1);
    if stm.trees.len() != expected {
        problems.push(format!("{} trees, expected {expected}", stm.trees.len()));
    }
    let mut sequences: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (t, g) in stm.trees.iter().enumerate() {
        if let Some(first) = sequences.insert(g.degree_sequence(), t) {
            problems.push(format!(
                "trees {} and {} share the degree sequence {:?}",
                first + 1,
                t + 1,
                g.degree_sequence()
            ));
        }
    }
    let compositions =
        sequences.keys().filter(|s| s.iter().all(|&k| k >= 1) && s.iter().sum::<usize>() == n + d - 1).count();
    if compositions != expected {
        problems.push(format!("{compositions} of {expected} degree sequences are realized"));
    }
    let mut seen: BTreeMap<(Vec<usize>, Vec<usize>), (BTreeSet<(usize, usize)>, usize)> = BTreeMap::new();
    'trees: for (t, g) in stm.trees.iter().enumerate() {
        for mu in matchings_in(g) {
            let edges: BTreeSet<(usize, usize)> = mu.edges.iter().copied().collect();
            let key = (
                edges.iter().map(|e| e.0).collect::<BTreeSet<_>>().into_iter().collect(),
                edges.iter().map(|e| e.1).collect::<BTreeSet<_>>().into_iter().collect(),
            );
            match seen.get(&key) {
                Some((other, s)) if *other != edges => {
                    problems.push(format!(
                        "trees {} and {} contain different matchings on the same nodes",
                        s + 1,
                        t + 1
                    ));
                    continue 'trees;
                }
                Some(_) => {}
                None => {
                    seen.insert(key, (edges, t));
                }
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(StmError::Invalid(problems))
    }
}

/// Maximal trees with the coordinates outside `coords` deleted, keeping those without an
/// isolated apex.
pub fn contraction_covectors(stm: &AbstractStm, coords: &BTreeSet<usize>) -> Vec<CovectorGraph> {
    let mut out: Vec<CovectorGraph> = Vec::new();
    for g in &stm.trees {
        let h = g.restrict_coords(coords);
        if h.isolated_apexes().is_empty() && !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

fn contraction_trees(stm: &AbstractStm, coords: &BTreeSet<usize>) -> Vec<CovectorGraph> {
    contraction_covectors(stm, coords).into_iter().filter(|g| g.is_spanning_tree(coords)).collect()
}

/// The tree on `coords ⊔ [n]` where apexes in `basis` have degree 2 and all others degree 1.
pub fn abstract_cramer(
    stm: &AbstractStm,
    basis: &BTreeSet<usize>,
    coords: &BTreeSet<usize>,
) -> Result<CovectorGraph, StmError> {
    if basis.len() + 1 != coords.len() {
        return Err(StmError::Precondition(format!(
            "basis of size {} needs {} coordinates, got {}",
            basis.len(),
            basis.len() + 1,
            coords.len()
        )));
    }
    let want: Vec<usize> = (0..stm.n).map(|j| if basis.contains(&j) { 2 } else { 1 }).collect();
    let mut hits = contraction_trees(stm, coords).into_iter().filter(|g| g.degree_sequence() == want);
    let key = || (basis.iter().copied().collect(), coords.iter().copied().collect());
    let found = hits.next().ok_or_else(|| {
        let (basis, coords) = key();
        StmError::CramerNotFound { basis, coords }
    })?;
    if hits.next().is_some() {
        let (basis, coords) = key();
        return Err(StmError::CramerAmbiguous { basis, coords });
    }
    Ok(found)
}

/// Non-basic apexes whose only edge is negative.
fn negative_leaves(g: &CovectorGraph) -> Vec<(usize, usize)> {
    (0..g.n())
        .filter_map(|j| match g.apex_edges(j).as_slice() {
            [(i, Sign::Minus)] => Some((j, *i)),
            _ => None,
        })
        .collect()
}

/// Feasibility status of a basic covector with distinguished coordinate `delta`.
pub fn check_feasible_basic(g: &CovectorGraph, delta: usize) -> Classification {
    if negative_leaves(g).is_empty() {
        Classification::Feasible
    } else if g.coord_edges(delta).iter().any(|(_, s)| *s == Sign::Minus) {
        Classification::TotallyInfeasible
    } else {
        Classification::Infeasible
    }
}

/// A basic covector together with its basis, coordinate set `D` and distinguished coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicState {
    pub basis: BTreeSet<usize>,
    pub coords: BTreeSet<usize>,
    pub delta: usize,
    pub covector: CovectorGraph,
}

impl BasicState {
    pub fn all_coords(&self) -> BTreeSet<usize> {
        let mut all = self.coords.clone();
        all.insert(self.delta);
        all
    }

    pub fn is_basic(&self) -> bool {
        is_basic_covector(&self.covector, &self.basis, &self.coords, self.delta)
    }

    /// Cramer covector `C(basis, coords ∪ {delta})`.
    pub fn cramer(
        stm: &AbstractStm,
        basis: BTreeSet<usize>,
        coords: BTreeSet<usize>,
        delta: usize,
    ) -> Result<Self, StmError> {
        let mut all = coords.clone();
        all.insert(delta);
        let covector = abstract_cramer(stm, &basis, &all)?;
        Ok(BasicState { basis, coords, delta, covector })
    }
}

/// Entering apex `r` hangs off coordinate `i` in `D`; returns `(i, p)` with `p` the `i`-shaped basic apex.
fn leaving_apex(stm: &AbstractStm, state: &BasicState, r: usize) -> Result<(usize, usize), StmError> {
    if state.basis.contains(&r) {
        return Err(StmError::Precondition(format!("apex {} is basic", r + 1)));
    }
    let i = match state.covector.apex_edges(r).as_slice() {
        [(i, Sign::Minus)] if state.coords.contains(i) => *i,
        _ => {
            return Err(StmError::Precondition(format!("apex {} is not a negative leaf on D", r + 1)));
        }
    };
    let p = state
        .basis
        .iter()
        .copied()
        .find(|&p| stm.signs.get(p, i) == Sign::Minus)
        .ok_or_else(|| StmError::Precondition(format!("no basic apex of shape {}", i + 1)))?;
    Ok((i, p))
}

/// Replaces the basic apex of the shape of `r` by `r` and recomputes the Cramer covector.
pub fn next_basic_covector(stm: &AbstractStm, state: &BasicState, r: usize) -> Result<BasicState, StmError> {
    let (_, p) = leaving_apex(stm, state, r)?;
    let mut basis = state.basis.clone();
    basis.remove(&p);
    basis.insert(r);
    let next = BasicState::cramer(stm, basis, state.coords.clone(), state.delta)?;
    if !next.is_basic() {
        return Err(StmError::NotBasic);
    }
    Ok(next)
}

/// One edge exchange `w = y - removed + added`; `apex` is the apex of `added`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkStep {
    pub removed: (usize, usize),
    pub added: (usize, usize),
    pub apex: usize,
    pub covector: CovectorGraph,
}

/// Edge-exchange walk to the next basic covector, recording every intermediate tree.
pub fn next_covector_walk(
    stm: &AbstractStm,
    state: &BasicState,
    r: usize,
) -> Result<(BasicState, Vec<WalkStep>), StmError> {
    let all = state.all_coords();
    let trees = contraction_trees(stm, &all);
    let cap = trees.len() * (stm.n + 1);
    let mut y = state.covector.clone();
    let mut basis = state.basis.clone();
    let mut log = Vec::new();
    loop {
        let current =
            BasicState { basis: basis.clone(), coords: state.coords.clone(), delta: state.delta, covector: y.clone() };
        let (i, p) = leaving_apex(stm, &current, r)?;
        let mut e = (i, p);
        let q = loop {
            if log.len() >= cap {
                return Err(StmError::Walk(format!("no basic covector after {cap} exchanges")));
            }
            let mut rest = y.clone();
            rest.remove(e.0, e.1).ok_or_else(|| StmError::Walk(format!("edge {:?} missing", e)))?;
            let mut candidates = trees.iter().filter(|t| **t != y && rest.is_subgraph_of(t));
            let w = candidates.next().ok_or_else(|| StmError::Walk("no tree extends the forest".into()))?.clone();
            if candidates.next().is_some() {
                return Err(StmError::Walk("several trees extend the forest".into()));
            }
            let rest_edges = rest.edge_set();
            let mut fresh = w.edge_set().into_iter().filter(|f| !rest_edges.contains(f));
            let f = fresh.next().ok_or_else(|| StmError::Walk("no new edge".into()))?;
            let q = f.1;
            log.push(WalkStep { removed: e, added: f, apex: q, covector: w.clone() });
            y = w;
            if y.sign(i, q) == Some(Sign::Minus) {
                break q;
            }
            let own: Vec<(usize, Sign)> = rest.apex_edges(q);
            e = if y.apex_degree(q) == 3 {
                let plus: Vec<usize> = own.iter().filter(|(_, s)| *s == Sign::Plus).map(|(c, _)| *c).collect();
                match plus.as_slice() {
                    [c] => (*c, q),
                    _ => return Err(StmError::Walk(format!("apex {} has no unique positive edge", q + 1))),
                }
            } else {
                match own.as_slice() {
                    [(c, _)] => (*c, q),
                    _ => return Err(StmError::Walk(format!("apex {} has unexpected degree", q + 1))),
                }
            };
        };
        basis.remove(&p);
        basis.insert(q);
        if q == r {
            break;
        }
    }
    let next = BasicState { basis, coords: state.coords.clone(), delta: state.delta, covector: y };
    if !next.is_basic() {
        return Err(StmError::NotBasic);
    }
    Ok((next, log))
}

/// Eligible entering apexes: non-basic apexes hanging off `D` by a negative edge.
pub fn eligible(state: &BasicState) -> Vec<usize> {
    negative_leaves(&state.covector)
        .into_iter()
        .filter(|(j, i)| !state.basis.contains(j) && state.coords.contains(i))
        .map(|(j, _)| j)
        .collect()
}

fn extreme(
    stm: &AbstractStm,
    state: BasicState,
    chooser: &mut Chooser<'_>,
    trace: &mut Vec<AbstractEvent>,
) -> Result<(BasicState, usize), StmError> {
    let mut state = state;
    let mut pivots = 0;
    let cap = binomial(stm.n, state.coords.len()).max(1);
    while check_feasible_basic(&state.covector, state.delta) == Classification::Infeasible {
        if pivots >= cap {
            return Err(StmError::Walk(format!("pivot bound {cap} exceeded")));
        }
        let r = chooser.pick(&eligible(&state))?;
        let (_, p) = leaving_apex(stm, &state, r)?;
        state = next_basic_covector(stm, &state, r)?;
        pivots += 1;
        trace.push(AbstractEvent::from_state(&state, Some(r), Some(p)));
    }
    Ok((state, pivots))
}

/// Pivots with the smallest eligible apex until the basic covector is feasible or totally infeasible.
pub fn find_extreme_covector(
    stm: &AbstractStm,
    state: &BasicState,
) -> Result<(BasicState, Vec<AbstractEvent>), StmError> {
    let opts = SolveOptions::default();
    let mut chooser = Chooser::new(&opts);
    let mut trace = Vec::new();
    let (end, _) = extreme(stm, state.clone(), &mut chooser, &mut trace)?;
    Ok((end, trace))
}

/// One basic covector visited by `solve_abstract`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractEvent {
    pub delta: usize,
    pub coords: Vec<usize>,
    pub basis: Vec<usize>,
    pub entering: Option<usize>,
    pub leaving: Option<usize>,
    pub covector: CovectorGraph,
}

impl AbstractEvent {
    fn from_state(state: &BasicState, entering: Option<usize>, leaving: Option<usize>) -> Self {
        AbstractEvent {
            delta: state.delta,
            coords: state.coords.iter().copied().collect(),
            basis: state.basis.iter().copied().collect(),
            entering,
            leaving,
            covector: state.covector.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AbstractOutcome {
    pub verdict: Verdict,
    pub state: BasicState,
    pub trace: Vec<AbstractEvent>,
    /// `(delta, |D|, pivots)` for every phase.
    pub phases: Vec<(usize, usize, usize)>,
}

/// Grows the coordinate set until a feasible or a totally infeasible basic covector on all
/// coordinates appears.
pub fn solve_abstract(stm: &AbstractStm, opts: &SolveOptions) -> Result<AbstractOutcome, StmError> {
    validate_stm(stm)?;
    let order = full_order(stm.d, opts.delta_order.as_deref()).map_err(|e| StmError::Precondition(e.to_string()))?;
    let mut chooser = Chooser::new(opts);
    let mut state = BasicState::cramer(stm, BTreeSet::new(), BTreeSet::new(), order[0])?;
    let mut trace = vec![AbstractEvent::from_state(&state, None, None)];
    let mut phases = Vec::new();
    loop {
        let mut check = check_feasible_basic(&state.covector, state.delta);
        let mut pivots = 0;
        if check == Classification::Infeasible {
            (state, pivots) = extreme(stm, state, &mut chooser, &mut trace)?;
            check = check_feasible_basic(&state.covector, state.delta);
        }
        phases.push((state.delta, state.coords.len(), pivots));
        if check == Classification::Feasible || state.coords.len() + 1 == stm.d {
            chooser.finish()?;
            let verdict = if check == Classification::Feasible { Verdict::Feasible } else { Verdict::Infeasible };
            return Ok(AbstractOutcome { verdict, state, trace, phases });
        }
        let at_delta: Vec<usize> = negative_leaves(&state.covector)
            .into_iter()
            .filter(|&(j, i)| i == state.delta && !state.basis.contains(&j))
            .map(|(j, _)| j)
            .collect();
        let j = chooser.pick(&at_delta)?;
        let mut basis = state.basis.clone();
        basis.insert(j);
        let mut coords = state.coords.clone();
        coords.insert(state.delta);
        let delta = order.iter().copied().find(|c| !coords.contains(c)).expect("a coordinate is left");
        state = BasicState::cramer(stm, basis, coords, delta)?;
        trace.push(AbstractEvent::from_state(&state, Some(j), None));
    }
}

/// Potentials `x_i` on the component of every coordinate reachable through `edges`.
fn potentials(
    sys: &SignedSystem,
    d: usize,
    n: usize,
    edges: &[(usize, usize)],
) -> (Vec<Option<Rational>>, Vec<Option<usize>>) {
    let mut x: Vec<Option<Rational>> = vec![None; d];
    let mut comp: Vec<Option<usize>> = vec![None; d];
    let mut apex_comp: Vec<Option<usize>> = vec![None; n];
    let entry = |j: usize, i: usize| sys.a(j, i).finite().cloned().expect("finite matrix");
    for start in 0..d {
        if comp[start].is_some() {
            continue;
        }
        comp[start] = Some(start);
        x[start] = Some(Rational::from_integer(0.into()));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let xi = x[i].clone().expect("set");
            for &(c, j) in edges.iter().filter(|e| e.0 == i) {
                let level = entry(j, c) + &xi;
                apex_comp[j] = Some(start);
                for &(c2, _) in edges.iter().filter(|e| e.1 == j && e.0 != c) {
                    if comp[c2].is_none() {
                        comp[c2] = Some(start);
                        x[c2] = Some(&level - entry(j, c2));
                        stack.push(c2);
                    }
                }
            }
        }
    }
    (x, comp)
}

fn consistent(sys: &SignedSystem, d: usize, n: usize, edges: &[(usize, usize)]) -> bool {
    let (x, comp) = potentials(sys, d, n, edges);
    let entry = |j: usize, i: usize| sys.a(j, i).finite().cloned().expect("finite matrix");
    let apexes: BTreeSet<usize> = edges.iter().map(|e| e.1).collect();
    for &j in &apexes {
        let mine: Vec<usize> = edges.iter().filter(|e| e.1 == j).map(|e| e.0).collect();
        let c0 = mine[0];
        let level = entry(j, c0) + x[c0].clone().expect("set");
        for i in 0..d {
            if comp[i] != comp[c0] {
                continue;
            }
            let value = entry(j, i) + x[i].clone().expect("set");
            if mine.contains(&i) {
                if value != level {
                    return false;
                }
            } else if value <= level {
                return false;
            }
        }
    }
    true
}

/// Union-find root with path halving.
fn root(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn search_trees(sys: &SignedSystem, apex: usize, edges: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    let (n, d) = (sys.n(), sys.d());
    if apex == n {
        if edges.len() == n + d - 1 {
            out.push(edges.clone());
        }
        return;
    }
    let budget = n + d - 1 - edges.len();
    let remaining = n - apex;
    for mask in 1u32..(1 << d) {
        let size = mask.count_ones() as usize;
        if size + (remaining - 1) > budget {
            continue;
        }
        let mut parent: Vec<usize> = (0..d + n).collect();
        for &(i, j) in edges.iter() {
            let (a, b) = (root(&mut parent, i), root(&mut parent, d + j));
            parent[a] = b;
        }
        let chosen: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let mut acyclic = true;
        for &i in &chosen {
            let (a, b) = (root(&mut parent, i), root(&mut parent, d + apex));
            if a == b {
                acyclic = false;
                break;
            }
            parent[a] = b;
        }
        if !acyclic {
            continue;
        }
        let before = edges.len();
        edges.extend(chosen.iter().map(|&i| (i, apex)));
        if consistent(sys, d, n, edges) {
            search_trees(sys, apex + 1, edges, out);
        }
        edges.truncate(before);
    }
}

/// All maximal covector graphs of a finite generic trimmed system, found by exhaustive search.
pub fn stm_from_matrix(sys: &SignedSystem) -> Result<AbstractStm, StmError> {
    let (n, d) = (sys.n(), sys.d());
    if n * d > 24 {
        return Err(StmError::TooLarge(n * d));
    }
    let trimmed = (0..n).all(|j| (0..d).filter(|&i| sys.sigma(j, i) == Sign::Minus).count() == 1);
    if n == 0 || d == 0 || sys.matrix().entries().any(|v| v.is_infinite()) || !trimmed {
        return Err(StmError::NotFullTrimmed);
    }
    if !is_generic(sys.matrix()) {
        return Err(StmError::NonGeneric);
    }
    let mut found = Vec::new();
    search_trees(sys, 0, &mut Vec::new(), &mut found);
    let mut tuples = Vec::with_capacity(found.len());
    for edges in found {
        let g = CovectorGraph::from_edges(sys.signs(), edges, Some((0..d).collect()));
        let (x, _) = potentials(sys, d, n, &g.edge_set().into_iter().collect::<Vec<_>>());
        let point = Point(x.into_iter().map(|v| v.expect("connected").into()).collect());
        if covector_of(sys, &point) != g || !verify_covector_axioms(sys, &g) {
            return Err(StmError::Walk("exhaustive search produced a non-covector".into()));
        }
        tuples.push(g.neighbours());
    }
    AbstractStm::new(d, &tuples, sys.signs().clone())
}

#[cfg(test)]
mod tests;
