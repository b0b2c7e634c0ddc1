use std::collections::BTreeMap;

use super::support::find_sufficiently_infeasible;
use crate::covector::{classify, Classification, CovectorGraph};
use crate::error::SolveError;
use crate::system::{Sign, SignedSystem};

/// Positional strategy read off a covector graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Apex player: apex to the coordinate of its chosen positive edge.
    Apex(BTreeMap<usize, usize>),
    /// Coordinate player: coordinate to the apex of its negative matching edge.
    Coordinate(BTreeMap<usize, usize>),
}

impl Strategy {
    /// Chosen edges as `(coordinate, apex)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            Strategy::Apex(m) => m.iter().map(|(&j, &i)| (i, j)).collect(),
            Strategy::Coordinate(m) => m.iter().map(|(&i, &j)| (i, j)).collect(),
        }
    }
}

/// Every non-isolated apex picks its positive edge with the smallest coordinate.
pub fn extract_nonlosing_strategy(_sys: &SignedSystem, g: &CovectorGraph) -> Result<Strategy, SolveError> {
    if classify(g) != Classification::Feasible {
        return Err(SolveError::Precondition("covector graph is not feasible".into()));
    }
    let mut choice = BTreeMap::new();
    for j in 0..g.n() {
        if let Some((i, _)) = g.apex_edges(j).into_iter().find(|(_, s)| *s == Sign::Plus) {
            choice.insert(j, i);
        }
    }
    Ok(Strategy::Apex(choice))
}

/// The negative perfect matching of a sufficiently infeasible covector graph.
pub fn extract_winning_matching(sys: &SignedSystem, g: &CovectorGraph) -> Result<Strategy, SolveError> {
    let (_, matching) = find_sufficiently_infeasible(sys, g)
        .ok_or_else(|| SolveError::Precondition("covector graph is not sufficiently infeasible".into()))?;
    Ok(Strategy::Coordinate(matching))
}
