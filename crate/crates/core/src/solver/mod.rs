//! Pivoting over Cramer covectors of a trimmed signed system.
//!
//! `find_witness` grows a coordinate set `D` one distinguished coordinate at a time. Inside a
//! phase, non-basic apexes that hang off `D` by a single negative edge replace the basic apex
//! of the same shape.

mod strategy;
mod support;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::covector::{classify, Classification, CovectorGraph};
use crate::cramer::{cramer_covector, cramer_solution, CramerQuery};
use crate::error::{ScriptError, SolveError};
use crate::system::{Sign, SignedSystem};
use crate::tropical::{Point, TropicalValue};

pub use strategy::{extract_nonlosing_strategy, extract_winning_matching, Strategy};
pub use support::{feasible_support, find_sufficiently_infeasible, Blocker, SupportResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EnteringRule {
    /// Bland-style: the smallest eligible apex index.
    #[default]
    Smallest,
    Largest,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Coordinates to use as distinguished coordinates, in order; unlisted ones follow ascending.
    pub delta_order: Option<Vec<usize>>,
    pub entering: EnteringRule,
    /// Apex picked at every decision that has an eligible apex, in order.
    pub script: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        })
    }
}

/// One recomputation of the Cramer covector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub phase_delta: usize,
    pub coords: Vec<usize>,
    pub basis: Vec<usize>,
    pub entering: Option<usize>,
    pub leaving: Option<usize>,
    pub cramer_point: Point,
}

/// Pivot accounting for the phase of one distinguished coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseStats {
    pub delta: usize,
    pub coords: Vec<usize>,
    pub pivots: usize,
    /// Basis at the start of the phase and after each pivot.
    pub bases: Vec<BTreeSet<usize>>,
    pub points: Vec<Point>,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub verdict: Verdict,
    pub point: Point,
    pub covector: CovectorGraph,
    pub basis: BTreeSet<usize>,
    pub coords: BTreeSet<usize>,
    pub delta: usize,
    /// For an infeasible verdict, the apex hanging off `delta` by a negative edge.
    pub blocking_apex: Option<usize>,
    pub trace: Vec<TraceEvent>,
    pub phases: Vec<PhaseStats>,
}

/// Largest absolute entry after clearing denominators.
pub fn integer_width(sys: &SignedSystem) -> BigInt {
    let finite: Vec<_> = sys.matrix().entries().filter_map(TropicalValue::finite).collect();
    let lcm = finite.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    finite.iter().map(|v| (v.numer() * (&lcm / v.denom())).abs()).max().unwrap_or_default()
}

/// Inner pivots allowed per phase: `8 d ω + d`.
pub fn iteration_cap(sys: &SignedSystem) -> usize {
    let omega = integer_width(sys).max(BigInt::one());
    let d = BigInt::from(sys.d());
    (BigInt::from(8) * &d * omega + &d).to_usize().unwrap_or(usize::MAX)
}

pub(crate) fn full_order(d: usize, given: Option<&[usize]>) -> Result<Vec<usize>, SolveError> {
    let mut order = Vec::with_capacity(d);
    let mut seen = vec![false; d];
    for &c in given.unwrap_or(&[]) {
        if c >= d {
            return Err(SolveError::DeltaOrder(format!("coordinate {} out of range", c + 1)));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(SolveError::DeltaOrder(format!("coordinate {} repeated", c + 1)));
        }
        order.push(c);
    }
    order.extend((0..d).filter(|&c| !seen[c]));
    Ok(order)
}

pub(crate) struct Chooser<'a> {
    rule: EnteringRule,
    script: Option<&'a [usize]>,
    used: usize,
}

impl<'a> Chooser<'a> {
    pub(crate) fn new(opts: &'a SolveOptions) -> Self {
        Chooser { rule: opts.entering, script: opts.script.as_deref(), used: 0 }
    }

    pub(crate) fn pick(&mut self, eligible: &[usize]) -> Result<usize, ScriptError> {
        match self.script {
            Some(script) => {
                let Some(&choice) = script.get(self.used) else {
                    return Err(ScriptError::Exhausted { eligible: eligible.to_vec() });
                };
                if !eligible.contains(&choice) {
                    return Err(ScriptError::Ineligible { choice, eligible: eligible.to_vec() });
                }
                self.used += 1;
                Ok(choice)
            }
            None => Ok(match self.rule {
                EnteringRule::Smallest => eligible[0],
                EnteringRule::Largest => eligible[eligible.len() - 1],
            }),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ScriptError> {
        match self.script {
            Some(script) if script.len() > self.used => Err(ScriptError::Leftover(script.len() - self.used)),
            _ => Ok(()),
        }
    }
}

/// Non-basic apexes of degree 1 whose only edge is negative and lands in `targets`.
fn negative_leaves(y: &CovectorGraph, basis: &BTreeSet<usize>, targets: &BTreeSet<usize>) -> Vec<usize> {
    (0..y.n())
        .filter(|j| !basis.contains(j))
        .filter(|&j| match y.apex_edges(j).as_slice() {
            [(i, Sign::Minus)] => targets.contains(i),
            _ => false,
        })
        .collect()
}

struct State<'a> {
    sys: &'a SignedSystem,
    delta: usize,
    coords: BTreeSet<usize>,
    basis: BTreeSet<usize>,
    point: Point,
    y: CovectorGraph,
    trace: Vec<TraceEvent>,
}

impl State<'_> {
    fn recompute(&mut self, entering: Option<usize>, leaving: Option<usize>) -> Result<(), SolveError> {
        let mut all = self.coords.clone();
        all.insert(self.delta);
        let q = CramerQuery::new(self.basis.iter().copied(), all.iter().copied())
            .ok_or_else(|| SolveError::Inconsistent("basis and coordinate sizes disagree".into()))?;
        self.point = cramer_solution(self.sys, &q);
        if self.point.has_empty_support() {
            return Err(SolveError::Inconsistent(format!(
                "Cramer solution for basis {:?} is all infinite",
                self.basis
            )));
        }
        self.y = cramer_covector(self.sys, &q);
        self.trace.push(TraceEvent {
            phase_delta: self.delta,
            coords: self.coords.iter().copied().collect(),
            basis: self.basis.iter().copied().collect(),
            entering,
            leaving,
            cramer_point: self.point.clone(),
        });
        Ok(())
    }

    fn phase(&self) -> PhaseStats {
        PhaseStats {
            delta: self.delta,
            coords: self.coords.iter().copied().collect(),
            pivots: 0,
            bases: vec![self.basis.clone()],
            points: vec![self.point.clone()],
        }
    }
}

/// Decides feasibility of a trimmed signed system.
pub fn find_witness(sys: &SignedSystem, opts: &SolveOptions) -> Result<Certificate, SolveError> {
    if let Some(row) = (0..sys.n()).find(|&r| sys.minus_cols(r).len() > 1) {
        return Err(SolveError::Untrimmed(row));
    }
    if let Err(report) = sys.validate() {
        if sys.n() > 0 {
            return Err(SolveError::System(crate::error::SystemError::Invalid(report)));
        }
    }
    let d = sys.d();
    if d == 0 {
        return Err(SolveError::DeltaOrder("system has no coordinates".into()));
    }
    let order = full_order(d, opts.delta_order.as_deref())?;
    let cap = iteration_cap(sys);
    let mut chooser = Chooser::new(opts);
    let mut st = State {
        sys,
        delta: order[0],
        coords: BTreeSet::new(),
        basis: BTreeSet::new(),
        point: Point::infinite(d),
        y: CovectorGraph::empty(d, sys.n(), []),
        trace: Vec::new(),
    };
    st.recompute(None, None)?;
    let mut phases = Vec::new();
    let mut phase = st.phase();
    loop {
        loop {
            let eligible = negative_leaves(&st.y, &st.basis, &st.coords);
            if eligible.is_empty() {
                break;
            }
            if phase.pivots >= cap {
                return Err(SolveError::IterationCap { delta: st.delta, cap });
            }
            let r = chooser.pick(&eligible)?;
            let shape = st.y.apex_edges(r)[0].0;
            let p = st
                .basis
                .iter()
                .copied()
                .find(|&p| sys.shape(p) == Some(shape))
                .ok_or(SolveError::MissingShape(shape))?;
            st.basis.remove(&p);
            st.basis.insert(r);
            st.recompute(Some(r), Some(p))?;
            phase.pivots += 1;
            phase.bases.push(st.basis.clone());
            phase.points.push(st.point.clone());
        }
        let at_delta = negative_leaves(&st.y, &st.basis, &BTreeSet::from([st.delta]));
        if at_delta.is_empty() {
            phases.push(phase);
            chooser.finish()?;
            if !sys.evaluate_feasible(&st.point)? {
                return Err(SolveError::Inconsistent("terminal point violates the system".into()));
            }
            return Ok(finish(st, Verdict::Feasible, None, phases));
        }
        if st.coords.len() + 1 == d {
            phases.push(phase);
            chooser.finish()?;
            return Ok(finish(st, Verdict::Infeasible, Some(at_delta[0]), phases));
        }
        let j = chooser.pick(&at_delta)?;
        st.basis.insert(j);
        st.coords.insert(st.delta);
        st.delta = order.iter().copied().find(|c| !st.coords.contains(c)).expect("a coordinate is left");
        st.recompute(Some(j), None)?;
        phases.push(std::mem::replace(&mut phase, st.phase()));
    }
}

fn finish(st: State<'_>, verdict: Verdict, blocking_apex: Option<usize>, phases: Vec<PhaseStats>) -> Certificate {
    let mut coords = st.coords;
    coords.insert(st.delta);
    Certificate {
        verdict,
        point: st.point,
        covector: st.y,
        basis: st.basis,
        coords,
        delta: st.delta,
        blocking_apex,
        trace: st.trace,
        phases,
    }
}

/// Re-checks a certificate against the system.
///
/// Feasible: the point satisfies every row and the covector is the one of the point.
/// Infeasible: the shapes of the basis plus the blocking apex cover every coordinate once, and
/// after replacing infinite entries by big numbers the Cramer covector on all coordinates is
/// totally infeasible.
pub fn verify_certificate(sys: &SignedSystem, cert: &Certificate) -> bool {
    match cert.verdict {
        Verdict::Feasible => {
            sys.evaluate_feasible(&cert.point).unwrap_or(false)
                && crate::covector::covector_of(sys, &cert.point) == cert.covector
        }
        Verdict::Infeasible => {
            let Some(j) = cert.blocking_apex else {
                return false;
            };
            if cert.basis.contains(&j) || cert.coords.len() != sys.d() {
                return false;
            }
            let mut shapes = BTreeSet::new();
            for &r in cert.basis.iter().chain([&j]) {
                match sys.shape(r) {
                    Some(s) if shapes.insert(s) => {}
                    _ => return false,
                }
            }
            if shapes.len() != sys.d() {
                return false;
            }
            let (ext, _) = sys.extend_omega();
            let q = CramerQuery::new(cert.basis.iter().copied(), 0..sys.d()).expect("sizes checked");
            classify(&cramer_covector(&ext, &q)) == Classification::TotallyInfeasible
        }
    }
}
