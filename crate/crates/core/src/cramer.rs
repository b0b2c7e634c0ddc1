//! Tropical Cramer solutions `A[J|I]`, their covector graphs, and basic covectors.

use std::collections::BTreeSet;

use crate::covector::{covector_of, CovectorGraph};
use crate::system::{Sign, SignedSystem};
use crate::tropical::{tdet_sub, Point};

/// Apex set `basis` and coordinate set `coords` with `|basis| = |coords| - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CramerQuery {
    pub basis: BTreeSet<usize>,
    pub coords: BTreeSet<usize>,
}

impl CramerQuery {
    pub fn new(basis: impl IntoIterator<Item = usize>, coords: impl IntoIterator<Item = usize>) -> Option<Self> {
        let q = CramerQuery { basis: basis.into_iter().collect(), coords: coords.into_iter().collect() };
        (!q.coords.is_empty() && q.basis.len() + 1 == q.coords.len()).then_some(q)
    }
}

/// Coordinate `i` of `I` is `tdet(A_{J, I \ {i}})`; infinite outside `I`; normalized to min 0.
pub fn cramer_solution(sys: &SignedSystem, q: &CramerQuery) -> Point {
    let rows: Vec<usize> = q.basis.iter().copied().collect();
    let mut x = Point::infinite(sys.d());
    for &i in &q.coords {
        let cols: Vec<usize> = q.coords.iter().copied().filter(|&c| c != i).collect();
        x.0[i] = tdet_sub(sys.matrix(), &rows, &cols);
    }
    x.normalized()
}

/// Covector graph of the Cramer solution; empty when the solution is all infinite.
pub fn cramer_covector(sys: &SignedSystem, q: &CramerQuery) -> CovectorGraph {
    let x = cramer_solution(sys, q);
    if x.has_empty_support() {
        return CovectorGraph::empty(sys.d(), sys.n(), []);
    }
    covector_of(sys, &x)
}

/// The six conditions of a basic covector with basis `basis`, coordinate set `coords` and
/// distinguished coordinate `delta`.
pub fn is_basic_covector(g: &CovectorGraph, basis: &BTreeSet<usize>, coords: &BTreeSet<usize>, delta: usize) -> bool {
    if coords.contains(&delta) || basis.len() != coords.len() {
        return false;
    }
    let mut all: BTreeSet<usize> = coords.clone();
    all.insert(delta);
    // other coordinates isolated
    if g.edges().any(|((i, _), _)| !all.contains(&i)) {
        return false;
    }
    // spanning tree on the coordinates and the non-isolated apexes
    let apexes: BTreeSet<usize> = (0..g.n()).filter(|&j| g.apex_degree(j) > 0).collect();
    if g.edge_count() + 1 != all.len() + apexes.len() {
        return false;
    }
    let comps = g.components();
    if all.len() == 1 && apexes.is_empty() {
        // a lone coordinate is a tree
    } else if comps.len() != 1 || comps[0].0 != all || comps[0].1 != apexes {
        return false;
    }
    let mut negative_ends = BTreeSet::new();
    for &p in basis {
        let e = g.apex_edges(p);
        if e.len() != 2 {
            return false;
        }
        let neg: Vec<usize> = e.iter().filter(|(_, s)| *s == Sign::Minus).map(|(i, _)| *i).collect();
        let pos = e.iter().filter(|(_, s)| *s == Sign::Plus).count();
        if neg.len() != 1 || pos != 1 || neg[0] == delta {
            return false;
        }
        if !negative_ends.insert(neg[0]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covector::point_from_covector;

    fn seven_rows() -> SignedSystem {
        SignedSystem::from_ints(
            &[
                vec![Some(0), Some(1), Some(1), Some(0)],
                vec![None, Some(0), Some(0), None],
                vec![None, Some(4), Some(2), None],
                vec![Some(1), Some(-5), None, Some(0)],
                vec![Some(4), Some(0), Some(-7), Some(3)],
                vec![Some(0), None, Some(-9), None],
                vec![Some(0), None, None, Some(3)],
            ],
            &["+-++", ".+-.", ".-+.", "-+.+", "+++-", "+.-.", "+..-"],
        )
        .unwrap()
    }

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

    #[test]
    fn cramer_points() {
        let sys = seven_rows();
        let q = CramerQuery::new([], [1]).unwrap();
        assert_eq!(cramer_solution(&sys, &q), Point::from_ints(&[None, Some(0), None, None]));
        let q = CramerQuery::new([2, 3, 5], [0, 1, 2, 3]).unwrap();
        assert!(cramer_solution(&sys, &q).equivalent(&Point::from_ints(&[Some(-5), Some(2), Some(4), Some(-4)])));
        let q = CramerQuery::new([1, 2], [0, 1, 2]).unwrap();
        assert!(cramer_solution(&four_row_system(), &q).equivalent(&Point::from_ints(&[Some(0), Some(1), Some(3)])));
        assert!(CramerQuery::new([0, 1], [0]).is_none());
    }

    #[test]
    fn cramer_graphs() {
        let sys = four_row_system();
        let q = CramerQuery::new([1, 2], [0, 1, 2]).unwrap();
        let g = cramer_covector(&sys, &q);
        let tree_edges: BTreeSet<(usize, usize)> =
            [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3)].into_iter().collect();
        assert_eq!(g.edge_set(), tree_edges);
        assert_eq!(point_from_covector(&sys, &g, 0).unwrap(), Point::from_ints(&[Some(0), Some(1), Some(3)]));
        let star = cramer_covector(&sys, &CramerQuery::new([], [2]).unwrap());
        assert_eq!(star.edge_set(), (0..4).map(|j| (2, j)).collect());
    }

    #[test]
    fn extension_example_cramer() {
        let sys = SignedSystem::from_ints(
            &[
                vec![Some(0), Some(0), None, None],
                vec![Some(1), Some(1), None, None],
                vec![None, Some(1), Some(0), Some(0)],
                vec![Some(0), Some(0), Some(0), Some(1)],
            ],
            &["-+..", "+-..", ".+--", "+-++"],
        )
        .unwrap();
        let q = CramerQuery::new([0, 1, 2], [0, 1, 2, 3]).unwrap();
        assert_eq!(cramer_solution(&sys, &q), Point::from_ints(&[None, None, Some(0), Some(0)]));
        let g = cramer_covector(&sys, &q);
        assert_eq!(g.edge_set(), [(2, 2), (3, 2), (2, 3)].into_iter().collect());
        let (ext, log) = sys.extend_omega();
        let omega1 = log[0].value.to_integer();
        let r = cramer_solution(&ext, &q);
        let expected = Point(vec![
            (omega1.clone() + 1i32).to_string().parse().unwrap(),
            (omega1 + 1i32).to_string().parse().unwrap(),
            1.into(),
            1.into(),
        ]);
        assert!(r.equivalent(&expected));
    }

    #[test]
    fn basic_conditions() {
        let sys = four_row_system();
        let g = cramer_covector(&sys, &CramerQuery::new([1, 2], [0, 1, 2]).unwrap());
        // both basic apexes reach coordinate 2 negatively
        assert!(!is_basic_covector(&g, &[1, 2].into(), &[1, 2].into(), 0));
        let star = CovectorGraph::from_edges(sys.signs(), [(0, 0), (0, 1), (0, 2)], None);
        assert!(is_basic_covector(&star, &BTreeSet::new(), &BTreeSet::new(), 0));
        let lonely = CovectorGraph::from_edges(sys.signs(), [(0, 0), (1, 0)], None);
        assert!(!is_basic_covector(&lonely, &[1].into(), &[1].into(), 0));
    }
}
