//! Generalized covector graphs: where the row minima of `A ⊙ x` are attained.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::CovectorError;
use crate::system::{Sign, SignMatrix, SignedSystem};
use crate::tropical::{minimal_matchings, t_plus, tdet_value, Matching, Point, Rational, TropicalValue};

/// Bipartite graph on coordinate nodes `0..d` and apex nodes `0..n`.
///
/// Edges are stored as `(coordinate, apex)` with the sign of the corresponding entry.
/// `support` is the coordinate set the graph lives on; coordinates outside it are absent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CovectorGraph {
    d: usize,
    n: usize,
    edges: BTreeMap<(usize, usize), Sign>,
    support: BTreeSet<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Feasible,
    Infeasible,
    TotallyInfeasible,
}

impl Classification {
    /// True for both infeasible classes.
    pub fn is_infeasible(self) -> bool {
        self != Classification::Feasible
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Feasible => "feasible",
            Classification::Infeasible => "infeasible",
            Classification::TotallyInfeasible => "totally infeasible",
        })
    }
}

impl CovectorGraph {
    pub fn empty(d: usize, n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        CovectorGraph { d, n, edges: BTreeMap::new(), support: support.into_iter().collect() }
    }

    /// Builds a graph from `(coordinate, apex)` pairs, taking signs from `signs`.
    ///
    /// Without an explicit support, the support is the set of non-isolated coordinates.
    pub fn from_edges(
        signs: &SignMatrix,
        edges: impl IntoIterator<Item = (usize, usize)>,
        support: Option<BTreeSet<usize>>,
    ) -> Self {
        let edges: BTreeMap<(usize, usize), Sign> = edges.into_iter().map(|(i, j)| ((i, j), signs.get(j, i))).collect();
        let support = support.unwrap_or_else(|| edges.keys().map(|e| e.0).collect());
        CovectorGraph { d: signs.cols(), n: signs.rows(), edges, support }
    }

    /// Tuple notation: entry `j` lists the 0-based coordinates adjacent to apex `j`.
    pub fn from_neighbours(signs: &SignMatrix, neighbours: &[Vec<usize>], support: Option<BTreeSet<usize>>) -> Self {
        let edges = neighbours.iter().enumerate().flat_map(|(j, coords)| coords.iter().map(move |&i| (i, j)));
        Self::from_edges(signs, edges, support)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn with_support(mut self, support: BTreeSet<usize>) -> Self {
        self.support = support;
        self
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), Sign)> + '_ {
        self.edges.iter().map(|(&e, &s)| (e, s))
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.keys().copied().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, coord: usize, apex: usize) -> bool {
        self.edges.contains_key(&(coord, apex))
    }

    pub fn sign(&self, coord: usize, apex: usize) -> Option<Sign> {
        self.edges.get(&(coord, apex)).copied()
    }

    pub fn apex_edges(&self, apex: usize) -> Vec<(usize, Sign)> {
        self.edges.iter().filter(|((_, j), _)| *j == apex).map(|(&(i, _), &s)| (i, s)).collect()
    }

    pub fn coord_edges(&self, coord: usize) -> Vec<(usize, Sign)> {
        self.edges.range((coord, 0)..(coord + 1, 0)).map(|(&(_, j), &s)| (j, s)).collect()
    }

    pub fn apex_degree(&self, apex: usize) -> usize {
        self.edges.keys().filter(|(_, j)| *j == apex).count()
    }

    pub fn coord_degree(&self, coord: usize) -> usize {
        self.coord_edges(coord).len()
    }

    pub fn isolated_apexes(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.apex_degree(j) == 0).collect()
    }

    pub fn is_subgraph_of(&self, other: &CovectorGraph) -> bool {
        self.edges.keys().all(|e| other.edges.contains_key(e))
    }

    pub fn insert(&mut self, coord: usize, apex: usize, sign: Sign) {
        self.edges.insert((coord, apex), sign);
    }

    pub fn remove(&mut self, coord: usize, apex: usize) -> Option<Sign> {
        self.edges.remove(&(coord, apex))
    }

    /// Graph restricted to the edges whose coordinate lies in `coords`.
    pub fn restrict_coords(&self, coords: &BTreeSet<usize>) -> CovectorGraph {
        CovectorGraph {
            d: self.d,
            n: self.n,
            edges: self.edges.iter().filter(|((i, _), _)| coords.contains(i)).map(|(&e, &s)| (e, s)).collect(),
            support: coords.clone(),
        }
    }

    /// Connected components of the edge set, each as (coordinates, apexes).
    pub fn components(&self) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
        let mut seen_coord = BTreeSet::new();
        let mut out = Vec::new();
        let coords: BTreeSet<usize> = self.edges.keys().map(|e| e.0).collect();
        for &start in &coords {
            if seen_coord.contains(&start) {
                continue;
            }
            let mut cs = BTreeSet::new();
            let mut aps = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            cs.insert(start);
            while let Some(i) = queue.pop_front() {
                for (j, _) in self.coord_edges(i) {
                    if aps.insert(j) {
                        for (i2, _) in self.apex_edges(j) {
                            if cs.insert(i2) {
                                queue.push_back(i2);
                            }
                        }
                    }
                }
            }
            seen_coord.extend(cs.iter().copied());
            out.push((cs, aps));
        }
        out
    }

    /// Whether the edges form a spanning tree on the given coordinates and all apexes.
    pub fn is_spanning_tree(&self, coords: &BTreeSet<usize>) -> bool {
        if self.edges.keys().any(|(i, _)| !coords.contains(i)) {
            return false;
        }
        if self.edges.len() + 1 != coords.len() + self.n {
            return false;
        }
        let comps = self.components();
        comps.len() == 1 && comps[0].0 == *coords && comps[0].1.len() == self.n
    }

    /// Right degree sequence: the degree of every apex.
    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|j| self.apex_degree(j)).collect()
    }

    /// Neighbours of every apex, 0-based.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|j| self.apex_edges(j).into_iter().map(|(i, _)| i).collect()).collect()
    }

    /// Tuple notation with 1-based coordinates, e.g. `(13,3,1,12,1,1)`.
    pub fn tuple_notation(&self) -> String {
        let parts: Vec<String> = self
            .neighbours()
            .iter()
            .map(|coords| {
                if coords.is_empty() {
                    "-".to_string()
                } else if self.d <= 9 {
                    coords.iter().map(|i| (i + 1).to_string()).collect()
                } else {
                    format!("[{}]", coords.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","))
                }
            })
            .collect();
        format!("({})", parts.join(","))
    }

    /// Sorted 1-based edge list with signs.
    pub fn edge_list(&self) -> Vec<(usize, usize, Sign)> {
        self.edges.iter().map(|(&(i, j), &s)| (i + 1, j + 1, s)).collect()
    }
}

/// Covector graph of `x`: edge `(i, j)` iff `a_ji + x_i` attains the finite minimum of row `j`.
pub fn covector_of(sys: &SignedSystem, x: &Point) -> CovectorGraph {
    let support: BTreeSet<usize> = x.support().into_iter().collect();
    let mut g = CovectorGraph::empty(sys.d(), sys.n(), support.iter().copied());
    for j in 0..sys.n() {
        let values: Vec<(usize, TropicalValue)> = support.iter().map(|&i| (i, t_plus(sys.a(j, i), &x.0[i]))).collect();
        let Some(min) = values.iter().map(|(_, v)| v).min().cloned() else {
            continue;
        };
        if min.is_infinite() {
            continue;
        }
        for (i, v) in values {
            if v == min {
                g.insert(i, j, sys.sigma(j, i));
            }
        }
    }
    g
}

/// Infeasible iff some apex has edges, all negative; totally infeasible if in addition every
/// support coordinate meets a negative edge.
pub fn classify(g: &CovectorGraph) -> Classification {
    let infeasible = (0..g.n()).any(|j| {
        let e = g.apex_edges(j);
        !e.is_empty() && e.iter().all(|(_, s)| *s == Sign::Minus)
    });
    if !infeasible {
        return Classification::Feasible;
    }
    let covered = g.support().iter().all(|&i| g.coord_edges(i).iter().any(|(_, s)| *s == Sign::Minus));
    if covered {
        Classification::TotallyInfeasible
    } else {
        Classification::Infeasible
    }
}

/// Reconstructs the point with `x[anchor] = 0` whose covector contains the connected graph `g`.
pub fn point_from_covector(sys: &SignedSystem, g: &CovectorGraph, anchor: usize) -> Result<Point, CovectorError> {
    if g.coord_degree(anchor) == 0 {
        return Err(CovectorError::IsolatedAnchor(anchor));
    }
    if g.components().len() != 1 {
        return Err(CovectorError::Disconnected);
    }
    for ((i, j), _) in g.edges() {
        if sys.a(j, i).is_infinite() {
            return Err(CovectorError::InfiniteEdge { coord: i, apex: j });
        }
    }
    let entry = |j: usize, i: usize| -> Rational { sys.a(j, i).finite().cloned().expect("checked finite") };
    let mut coord_value: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut apex_level: BTreeMap<usize, Rational> = BTreeMap::new();
    coord_value.insert(anchor, Rational::from_integer(0.into()));
    let mut queue = VecDeque::from([anchor]);
    while let Some(i) = queue.pop_front() {
        let xi = coord_value[&i].clone();
        for (j, _) in g.coord_edges(i) {
            let level = entry(j, i) + &xi;
            match apex_level.get(&j) {
                Some(existing) if *existing != level => {
                    return Err(CovectorError::Axioms(format!("inconsistent cycle through apex {}", j + 1)));
                }
                Some(_) => continue,
                None => {
                    apex_level.insert(j, level.clone());
                }
            }
            for (i2, _) in g.apex_edges(j) {
                let value = &level - entry(j, i2);
                match coord_value.get(&i2) {
                    Some(existing) if *existing != value => {
                        return Err(CovectorError::Axioms(format!("inconsistent cycle through coordinate {}", i2 + 1)));
                    }
                    Some(_) => {}
                    None => {
                        coord_value.insert(i2, value);
                        queue.push_back(i2);
                    }
                }
            }
        }
    }
    let mut x = Point::infinite(sys.d());
    for (i, v) in coord_value {
        x.0[i] = TropicalValue::Finite(v);
    }
    if !g.is_subgraph_of(&covector_of(sys, &x)) {
        return Err(CovectorError::Axioms("reconstructed point does not attain the given edges".into()));
    }
    Ok(x)
}

fn enumerate_matchings(
    edges: &[(usize, usize)],
    start: usize,
    used_c: &mut BTreeSet<usize>,
    used_a: &mut BTreeSet<usize>,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    for k in start..edges.len() {
        let (i, j) = edges[k];
        if used_c.contains(&i) || used_a.contains(&j) {
            continue;
        }
        used_c.insert(i);
        used_a.insert(j);
        current.push((i, j));
        out.push(current.clone());
        enumerate_matchings(edges, k + 1, used_c, used_a, current, out);
        current.pop();
        used_c.remove(&i);
        used_a.remove(&j);
    }
}

/// All nonempty matchings contained in the graph.
pub fn matchings_in(g: &CovectorGraph) -> Vec<Matching> {
    let edges: Vec<(usize, usize)> = g.edge_set().into_iter().collect();
    let mut out = Vec::new();
    enumerate_matchings(&edges, 0, &mut BTreeSet::new(), &mut BTreeSet::new(), &mut Vec::new(), &mut out);
    out.into_iter().map(Matching::new).collect()
}

/// Matching characterization of covector graphs: no isolated apex, every contained matching
/// is minimal, and every alternative minimal matching on the same nodes is contained too.
pub fn verify_covector_axioms(sys: &SignedSystem, g: &CovectorGraph) -> bool {
    if !g.isolated_apexes().is_empty() {
        return false;
    }
    let mut checked: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
    for mu in matchings_in(g) {
        let mut coords: Vec<usize> = mu.edges.iter().map(|e| e.0).collect();
        let mut apexes: Vec<usize> = mu.edges.iter().map(|e| e.1).collect();
        coords.sort_unstable();
        apexes.sort_unstable();
        let sub = sys.matrix().submatrix(&apexes, &coords);
        if mu.value(sys.matrix()) != tdet_value(&sub) {
            return false;
        }
        if !checked.insert((coords.clone(), apexes.clone())) {
            continue;
        }
        for eta in minimal_matchings(&sub, usize::MAX) {
            if eta.edges.iter().any(|&(c, r)| !g.contains(coords[c], apexes[r])) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_row_system() -> SignedSystem {
        SignedSystem::from_ints(
            &[
                vec![Some(0), Some(0), Some(0)],
                vec![Some(0), Some(-1), Some(-2)],
                vec![Some(0), Some(-2), Some(-4)],
                vec![Some(0), None, Some(-6)],
            ],
            &["+--", "+-+", "+-+", "-.+"],
        )
        .unwrap()
    }

    fn pt(s: &str) -> Point {
        Point(s.split(',').map(|v| v.parse().unwrap()).collect())
    }

    fn edges1(list: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        list.iter().map(|&(i, j)| (i - 1, j - 1)).collect()
    }

    #[test]
    fn covectors_of_example_points() {
        let sys = four_row_system();
        let g = covector_of(&sys, &pt("0,2,4.5"));
        assert_eq!(g.edge_set(), edges1(&[(1, 1), (1, 2), (1, 3), (2, 3), (3, 4)]));
        assert_eq!(g.sign(1, 2), Some(Sign::Minus));
        assert_eq!(classify(&g), Classification::Feasible);
        let g = covector_of(&sys, &pt("inf,0,inf"));
        assert_eq!(g.edge_set(), edges1(&[(2, 1), (2, 2), (2, 3)]));
        assert!(classify(&g).is_infeasible());
        assert_eq!(classify(&g), Classification::TotallyInfeasible);
        let g = covector_of(&sys, &pt("0,1,3"));
        assert_eq!(g.edge_set(), edges1(&[(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 4)]));
        assert_eq!(classify(&CovectorGraph::empty(3, 4, [])), Classification::Feasible);
    }

    #[test]
    fn point_reconstruction() {
        let sys = four_row_system();
        let g = CovectorGraph::from_edges(sys.signs(), edges1(&[(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 4)]), None);
        assert_eq!(point_from_covector(&sys, &g, 0).unwrap(), pt("0,1,3"));
        let star = covector_of(&sys, &pt("inf,0,inf"));
        assert_eq!(point_from_covector(&sys, &star, 1).unwrap(), pt("inf,0,inf"));
        let disconnected = covector_of(&sys, &pt("0,2,4.5"));
        assert!(matches!(point_from_covector(&sys, &disconnected, 0), Err(CovectorError::Disconnected)));
    }

    #[test]
    fn axiom_check() {
        let sys = four_row_system();
        let g = covector_of(&sys, &pt("0,2,4.5"));
        assert!(verify_covector_axioms(&sys, &g));
        let mut bad = g.clone();
        bad.remove(1, 2);
        bad.insert(1, 0, Sign::Minus);
        assert!(!verify_covector_axioms(&sys, &bad));
        let mut isolated = g.clone();
        isolated.remove(2, 3);
        assert!(!verify_covector_axioms(&sys, &isolated));
    }
}
