//! Largest support of a feasible point, with a sufficiently infeasible blocker for the rest.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{find_witness, SolveOptions, Verdict};
use crate::covector::{covector_of, CovectorGraph};
use crate::error::SolveError;
use crate::system::{Sign, SignMatrix, SignedSystem};
use crate::tropical::{Point, Rational, TropicalMatrix, TropicalValue};

/// Sufficiently infeasible covector graph of the trimmed system.
#[derive(Clone, Debug)]
pub struct Blocker {
    pub point: Point,
    pub covector: CovectorGraph,
    /// Coordinates negatively covered.
    pub covered: BTreeSet<usize>,
    /// Negative perfect matching, coordinate to trimmed row.
    pub matching: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug)]
pub struct SupportResult {
    pub support: BTreeSet<usize>,
    pub witness: Option<Point>,
    pub blocker: Option<Blocker>,
    /// The trimmed system the blocker refers to, and the input row of each trimmed row.
    pub trimmed: SignedSystem,
    pub origin: Vec<usize>,
}

#[derive(Clone, Debug)]
struct WorkRow {
    plus: BTreeMap<usize, Rational>,
    minus: Option<(usize, Rational)>,
}

impl WorkRow {
    fn mentions(&self, v: usize) -> bool {
        self.plus.contains_key(&v) || self.minus.as_ref().is_some_and(|(c, _)| *c == v)
    }
}

enum Event {
    Free { var: usize, rows: Vec<WorkRow> },
    Merge { rep: usize, offsets: Vec<(usize, Rational)> },
}

fn work_rows(sys: &SignedSystem) -> Vec<WorkRow> {
    (0..sys.n())
        .map(|r| {
            let mut row = WorkRow { plus: BTreeMap::new(), minus: None };
            for c in 0..sys.d() {
                if let Some(v) = sys.a(r, c).finite() {
                    match sys.sigma(r, c) {
                        Sign::Plus => {
                            row.plus.insert(c, v.clone());
                        }
                        Sign::Minus => row.minus = Some((c, v.clone())),
                        Sign::Bullet => {}
                    }
                }
            }
            row
        })
        .collect()
}

fn build_system(rows: &[WorkRow], vars: &[usize]) -> SignedSystem {
    let col: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut entries = vec![TropicalValue::Infinity; rows.len() * vars.len()];
    let mut signs = vec![vec![Sign::Bullet; vars.len()]; rows.len()];
    for (r, row) in rows.iter().enumerate() {
        let terms = row.plus.iter().map(|(c, v)| (c, v, Sign::Plus));
        for (c, v, s) in terms.chain(row.minus.iter().map(|(c, v)| (c, v, Sign::Minus))) {
            entries[r * vars.len() + col[c]] = TropicalValue::Finite(v.clone());
            signs[r][col[c]] = s;
        }
    }
    let matrix = TropicalMatrix::new(rows.len(), vars.len(), entries).expect("consistent dimensions");
    let signs = SignMatrix::from_rows(signs).expect("at least one row");
    SignedSystem::from_parts(matrix, signs)
}

/// Computes the feasible support: the union of the supports of all feasible points.
pub fn feasible_support(sys: &SignedSystem) -> Result<SupportResult, SolveError> {
    let (trimmed, origin) = sys.trim();
    let d = sys.d();
    let mut rows = work_rows(&trimmed);
    let mut vars: BTreeSet<usize> = (0..d).collect();
    let mut events = Vec::new();
    while !vars.is_empty() {
        if rows.is_empty() {
            events.extend(vars.iter().map(|&var| Event::Free { var, rows: Vec::new() }));
            vars.clear();
            break;
        }
        let list: Vec<usize> = vars.iter().copied().collect();
        let cert = find_witness(&build_system(&rows, &list), &SolveOptions::default())?;
        if cert.verdict == Verdict::Infeasible {
            break;
        }
        let support: Vec<usize> = cert.point.support().into_iter().map(|k| list[k]).collect();
        let value = |v: usize| cert.point.0[list.binary_search(&v).expect("known variable")].finite().cloned();
        if let [var] = support[..] {
            let (dropped, kept): (Vec<WorkRow>, Vec<WorkRow>) = rows.into_iter().partition(|r| r.mentions(var));
            rows = kept;
            vars.remove(&var);
            events.push(Event::Free { var, rows: dropped });
            continue;
        }
        let rep = *support.last().expect("nonempty support");
        let base = value(rep).expect("finite");
        let offsets: BTreeMap<usize, Rational> =
            support.iter().map(|&s| (s, value(s).expect("finite") - &base)).collect();
        rows = rows.into_iter().filter_map(|row| substitute(row, &offsets, rep)).collect();
        for &s in &support {
            if s != rep {
                vars.remove(&s);
            }
        }
        events.push(Event::Merge { rep, offsets: offsets.into_iter().filter(|(s, _)| *s != rep).collect() });
    }
    let support: BTreeSet<usize> = (0..d).filter(|c| !vars.contains(c)).collect();
    let witness = if support.is_empty() { None } else { Some(lift_witness(d, &events)?) };
    if let Some(w) = &witness {
        if !sys.evaluate_feasible(w)? || w.support().into_iter().collect::<BTreeSet<_>>() != support {
            return Err(SolveError::Inconsistent("reassembled witness is not feasible".into()));
        }
    }
    let blocker = if vars.is_empty() { None } else { Some(build_blocker(&trimmed, &vars)?) };
    Ok(SupportResult { support, witness, blocker, trimmed, origin })
}

/// Replaces the variables of `offsets` by the representative; `None` drops a tautological row.
fn substitute(mut row: WorkRow, offsets: &BTreeMap<usize, Rational>, rep: usize) -> Option<WorkRow> {
    let mut plus: Option<Rational> = None;
    for (s, off) in offsets {
        if let Some(a) = row.plus.remove(s) {
            let v = a + off;
            plus = Some(match plus {
                Some(p) if p <= v => p,
                _ => v,
            });
        }
    }
    let minus = match row.minus.take() {
        Some((c, a)) if offsets.contains_key(&c) => Some(a + &offsets[&c]),
        other => {
            row.minus = other;
            None
        }
    };
    match (plus, minus) {
        (Some(p), Some(m)) if p <= m => return None,
        (_, Some(m)) => row.minus = Some((rep, m)),
        (Some(p), None) => {
            row.plus.insert(rep, p);
        }
        (None, None) => {}
    }
    Some(row)
}

fn lift_witness(d: usize, events: &[Event]) -> Result<Point, SolveError> {
    let mut x = Point::infinite(d);
    for event in events.iter().rev() {
        match event {
            Event::Free { var, rows } => {
                let mut bound: Option<Rational> = None;
                for row in rows {
                    let Some(a) = row.plus.get(var) else {
                        return Err(SolveError::Inconsistent(format!("coordinate {} is not unbounded", var + 1)));
                    };
                    let Some((c, m)) = &row.minus else { continue };
                    let Some(xc) = x.0[*c].finite() else { continue };
                    let b = m + xc - a;
                    if bound.as_ref().is_none_or(|cur| b < *cur) {
                        bound = Some(b);
                    }
                }
                x.0[*var] = TropicalValue::Finite(bound.unwrap_or_else(Rational::zero));
            }
            Event::Merge { rep, offsets } => {
                for (s, off) in offsets {
                    x.0[*s] = x.0[*rep].shifted(off);
                }
            }
        }
    }
    Ok(x)
}

fn build_blocker(trimmed: &SignedSystem, covered: &BTreeSet<usize>) -> Result<Blocker, SolveError> {
    let cols: Vec<usize> = covered.iter().copied().collect();
    let rows: Vec<usize> =
        (0..trimmed.n()).filter(|&r| trimmed.finite_cols(r).iter().all(|c| covered.contains(c))).collect();
    let sub = SignedSystem::from_parts(
        trimmed.matrix().submatrix(&rows, &cols),
        SignMatrix::from_rows(rows.iter().map(|&r| cols.iter().map(|&c| trimmed.sigma(r, c)).collect()).collect())
            .ok_or_else(|| SolveError::Inconsistent("no rows left on the infeasible coordinates".into()))?,
    );
    let (ext, _) = sub.extend_omega();
    let mut cert = find_witness(&ext, &SolveOptions::default())?;
    if cert.verdict != Verdict::Infeasible {
        cert = find_witness(&sub, &SolveOptions::default())?;
    }
    if cert.verdict != Verdict::Infeasible {
        return Err(SolveError::Inconsistent("reduced system is not infeasible".into()));
    }
    let blocking = cert.blocking_apex.expect("infeasible certificates name the blocking apex");
    let mut mu = vec![usize::MAX; cols.len()];
    for r in cert.basis.iter().copied().chain([blocking]) {
        let shape = sub.shape(r).ok_or_else(|| SolveError::Inconsistent("basic row without shape".into()))?;
        mu[shape] = r;
    }
    let local =
        separate(&sub, &mu).ok_or_else(|| SolveError::Inconsistent("no point separates the matching".into()))?;
    let mut point = Point::infinite(trimmed.d());
    for (k, &c) in cols.iter().enumerate() {
        point.0[c] = TropicalValue::Finite(local[k].clone());
    }
    let point = point.normalized();
    let covector = covector_of(trimmed, &point);
    let (found, matching) = find_sufficiently_infeasible(trimmed, &covector)
        .ok_or_else(|| SolveError::Inconsistent("blocker is not sufficiently infeasible".into()))?;
    if found != *covered {
        return Err(SolveError::Inconsistent("blocker covers the wrong coordinates".into()));
    }
    Ok(Blocker { point, covector, covered: found, matching })
}

/// A point where each row `mu[i]` attains its minimum only at coordinate `i`.
///
/// Solves `x_i - x_k <= a_rk - a_ri - eps` by Bellman-Ford, halving `eps` until feasible.
fn separate(sub: &SignedSystem, mu: &[usize]) -> Option<Vec<Rational>> {
    let d = sub.d();
    let mut arcs: Vec<(usize, usize, Rational)> = Vec::new();
    for (i, &r) in mu.iter().enumerate() {
        let ari = sub.a(r, i).finite()?.clone();
        for k in sub.finite_cols(r) {
            if k != i {
                arcs.push((k, i, sub.a(r, k).finite()?.clone() - &ari));
            }
        }
    }
    let mut eps = Rational::one();
    for _ in 0..64 {
        let mut dist = vec![Rational::zero(); d];
        let mut settled = false;
        for _ in 0..=d {
            let mut changed = false;
            for (from, to, w) in &arcs {
                let cand = &dist[*from] + w - &eps;
                if cand < dist[*to] {
                    dist[*to] = cand;
                    changed = true;
                }
            }
            if !changed {
                settled = true;
                break;
            }
        }
        if settled {
            return Some(dist);
        }
        eps /= Rational::from_integer(2.into());
    }
    None
}

/// Largest coordinate set negatively covered by `g`, with the matching realizing it.
///
/// An apex can serve coordinate `i` when its only edge is negative at `i` and its row is
/// finite only inside the covered set.
pub fn find_sufficiently_infeasible(
    sys: &SignedSystem,
    g: &CovectorGraph,
) -> Option<(BTreeSet<usize>, BTreeMap<usize, usize>)> {
    let candidates: Vec<(usize, usize, Vec<usize>)> = (0..sys.n())
        .filter_map(|j| match g.apex_edges(j).as_slice() {
            [(i, Sign::Minus)] => Some((j, *i, sys.finite_cols(j))),
            _ => None,
        })
        .collect();
    let mut covered: BTreeSet<usize> = candidates.iter().map(|c| c.1).collect();
    loop {
        let usable: BTreeSet<usize> = candidates
            .iter()
            .filter(|(_, i, cols)| covered.contains(i) && cols.iter().all(|c| covered.contains(c)))
            .map(|c| c.1)
            .collect();
        if usable == covered {
            break;
        }
        covered = usable;
    }
    if covered.is_empty() {
        return None;
    }
    let mut matching = BTreeMap::new();
    for (j, i, cols) in &candidates {
        if covered.contains(i) && cols.iter().all(|c| covered.contains(c)) {
            matching.entry(*i).or_insert(*j);
        }
    }
    Some((covered, matching))
}
