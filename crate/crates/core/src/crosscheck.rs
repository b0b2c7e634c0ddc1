//! Seeded random batches: solver against the game oracle and brute force.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::convert::signed_to_mpg;
use crate::cramer::{cramer_covector, CramerQuery};
use crate::generate::{random_finite_matrix, random_trimmed_signs, random_trimmed_system, InstanceShape};
use crate::oracle::{brute_force_feasible, mpg_winning_states};
use crate::solver::{feasible_support, find_witness, integer_width, verify_certificate, SolveOptions, Verdict};
use crate::stm::{eligible, next_basic_covector, next_covector_walk, solve_abstract, stm_from_matrix, BasicState};
use crate::system::SignedSystem;
use crate::tropical::{is_generic, Point};

#[derive(Clone, Copy, Debug)]
pub struct BatchConfig {
    pub count: usize,
    pub seed: u64,
    pub max_d: usize,
    pub max_n: usize,
    pub max_abs: i64,
    pub infinity: f64,
    pub negative: f64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig { count: 500, seed: 1, max_d: 4, max_n: 8, max_abs: 5, infinity: 0.4, negative: 0.8 }
    }
}

#[derive(Clone, Debug)]
pub struct InstanceReport {
    pub index: usize,
    pub d: usize,
    pub n: usize,
    pub infinite_entries: usize,
    pub solver: Option<Verdict>,
    pub oracle: Option<bool>,
    pub brute_force: Option<bool>,
    pub certificate_ok: bool,
    pub support_ok: bool,
    pub max_pivots: usize,
    /// `4 d ω`.
    pub pivot_bound: BigInt,
    pub phases: usize,
    pub bases_distinct: bool,
    pub problems: Vec<String>,
}

impl InstanceReport {
    pub fn agrees(&self) -> bool {
        let solver = self.solver.map(|v| v == Verdict::Feasible);
        solver.is_some()
            && solver == self.oracle
            && solver == self.brute_force
            && self.certificate_ok
            && self.support_ok
    }

    pub fn within_bounds(&self) -> bool {
        BigInt::from(self.max_pivots) <= self.pivot_bound && self.bases_distinct && self.phases <= self.d
    }
}

#[derive(Clone, Debug)]
pub struct BatchReport {
    pub instances: Vec<InstanceReport>,
}

impl BatchReport {
    pub fn disagreements(&self) -> Vec<&InstanceReport> {
        self.instances.iter().filter(|r| !r.agrees()).collect()
    }

    pub fn bound_violations(&self) -> Vec<&InstanceReport> {
        self.instances.iter().filter(|r| !r.within_bounds()).collect()
    }

    pub fn feasible(&self) -> usize {
        self.instances.iter().filter(|r| r.solver == Some(Verdict::Feasible)).count()
    }

    /// Fraction of infinite matrix entries over the batch.
    pub fn infinity_density(&self) -> f64 {
        let total: usize = self.instances.iter().map(|r| r.d * r.n).sum();
        let inf: usize = self.instances.iter().map(|r| r.infinite_entries).sum();
        if total == 0 {
            0.0
        } else {
            inf as f64 / total as f64
        }
    }

    pub fn max_pivots(&self) -> usize {
        self.instances.iter().map(|r| r.max_pivots).max().unwrap_or(0)
    }

    pub fn summary(&self) -> String {
        format!(
            "instances {} feasible {} infinity density {:.2} disagreements {} bound violations {} max pivots per phase {}",
            self.instances.len(),
            self.feasible(),
            self.infinity_density(),
            self.disagreements().len(),
            self.bound_violations().len(),
            self.max_pivots()
        )
    }
}

fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The `index`-th instance of a batch.
pub fn batch_instance(cfg: &BatchConfig, index: usize) -> SignedSystem {
    let mut rng = instance_rng(cfg.seed, index);
    let shape = InstanceShape {
        d: rng.gen_range(1..=cfg.max_d),
        n: rng.gen_range(1..=cfg.max_n),
        max_abs: cfg.max_abs,
        infinity: cfg.infinity,
        negative: cfg.negative,
    };
    random_trimmed_system(&mut rng, shape)
}

pub fn check_instance(sys: &SignedSystem, index: usize) -> InstanceReport {
    let mut problems = Vec::new();
    let omega = integer_width(sys).max(BigInt::from(1));
    let mut report = InstanceReport {
        index,
        d: sys.d(),
        n: sys.n(),
        infinite_entries: sys.matrix().entries().filter(|v| v.is_infinite()).count(),
        solver: None,
        oracle: None,
        brute_force: None,
        certificate_ok: false,
        support_ok: false,
        max_pivots: 0,
        pivot_bound: BigInt::from(4 * sys.d()) * omega,
        phases: 0,
        bases_distinct: true,
        problems: Vec::new(),
    };
    let game = mpg_winning_states(&signed_to_mpg(sys));
    match &game {
        Ok(v) => report.oracle = Some(v.feasible()),
        Err(e) => problems.push(format!("oracle: {e}")),
    }
    match brute_force_feasible(sys, None) {
        Ok(b) => report.brute_force = Some(b),
        Err(e) => problems.push(format!("brute force: {e}")),
    }
    match find_witness(sys, &SolveOptions::default()) {
        Ok(cert) => {
            report.solver = Some(cert.verdict);
            report.certificate_ok = verify_certificate(sys, &cert);
            report.phases = cert.phases.len();
            report.max_pivots = cert.phases.iter().map(|p| p.pivots).max().unwrap_or(0);
            report.bases_distinct =
                cert.phases.iter().all(|p| p.bases.iter().collect::<BTreeSet<_>>().len() == p.bases.len());
        }
        Err(e) => problems.push(format!("solver: {e}")),
    }
    match (feasible_support(sys), &game) {
        (Ok(res), Ok(v)) => report.support_ok = res.support == v.non_losing,
        (Err(e), _) => problems.push(format!("support: {e}")),
        _ => {}
    }
    report.problems = problems;
    report
}

/// Runs the batch in parallel; the result only depends on the configuration.
pub fn run_batch(cfg: &BatchConfig) -> BatchReport {
    let instances = (0..cfg.count).into_par_iter().map(|k| check_instance(&batch_instance(cfg, k), k)).collect();
    BatchReport { instances }
}

/// Finite generic system with exactly one negative entry per row.
pub fn random_generic_system<R: Rng>(rng: &mut R, n: usize, d: usize, max_abs: i64) -> SignedSystem {
    loop {
        let m = random_finite_matrix(rng, n, d, max_abs);
        if is_generic(&m) {
            return SignedSystem::new(m, random_trimmed_signs(rng, n, d)).expect("finite system");
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct MonotonicityReport {
    pub systems: usize,
    pub pivots: usize,
    pub violations: Vec<String>,
}

/// Offsets `x_i - x_delta` never decrease along the pivots of a phase, and some offset grows
/// strictly at every pivot.
pub fn offsets_increase(before: &Point, after: &Point, coords: &[usize], delta: usize) -> Result<(), String> {
    let offset = |p: &Point, i: usize| -> Option<_> { Some(p.0[i].finite()? - p.0[delta].finite()?) };
    let mut strict = false;
    for &i in coords {
        let (Some(x), Some(y)) = (offset(before, i), offset(after, i)) else {
            return Err(format!("coordinate {} is infinite", i + 1));
        };
        if x > y {
            return Err(format!("offset of coordinate {} decreases", i + 1));
        }
        strict |= x < y;
    }
    if strict {
        Ok(())
    } else {
        Err("no offset increases".into())
    }
}

pub fn monotonicity_batch(count: usize, seed: u64) -> MonotonicityReport {
    let mut report = MonotonicityReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while report.systems < count {
        let d = rng.gen_range(2..=4);
        let n = rng.gen_range(2..=7);
        let sys = random_generic_system(&mut rng, n, d, 50);
        report.systems += 1;
        let cert = match find_witness(&sys, &SolveOptions::default()) {
            Ok(c) => c,
            Err(e) => {
                report.violations.push(format!("system {}: {e}", report.systems));
                continue;
            }
        };
        for ph in &cert.phases {
            let mut coords = ph.coords.clone();
            coords.push(ph.delta);
            for w in ph.points.windows(2) {
                report.pivots += 1;
                if let Err(e) = offsets_increase(&w[0], &w[1], &coords, ph.delta) {
                    report.violations.push(format!("system {}: {e}", report.systems));
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, Default)]
pub struct AbstractReport {
    pub systems: usize,
    pub mismatches: Vec<String>,
}

/// Triangulation of a random generic system against the matrix solver: same verdict, and every
/// visited basic covector equals the Cramer covector of the matrix.
pub fn abstract_agreement(count: usize, seed: u64) -> AbstractReport {
    let mut report = AbstractReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while report.systems < count {
        let d = rng.gen_range(2..=3);
        let n = rng.gen_range(2..=4);
        let sys = random_generic_system(&mut rng, n, d, 20);
        report.systems += 1;
        let k = report.systems;
        let stm = match stm_from_matrix(&sys) {
            Ok(s) => s,
            Err(e) => {
                report.mismatches.push(format!("system {k}: {e}"));
                continue;
            }
        };
        let opts = SolveOptions::default();
        match (find_witness(&sys, &opts), solve_abstract(&stm, &opts)) {
            (Ok(cert), Ok(out)) => {
                if cert.verdict != out.verdict {
                    report.mismatches.push(format!("system {k}: verdicts {} vs {}", cert.verdict, out.verdict));
                }
                for e in &out.trace {
                    let coords = e.coords.iter().copied().chain([e.delta]);
                    let q = CramerQuery::new(e.basis.iter().copied(), coords).expect("sizes match");
                    if cramer_covector(&sys, &q) != e.covector {
                        report.mismatches.push(format!("system {k}: Cramer covector for basis {:?} differs", e.basis));
                    }
                }
            }
            (a, b) => report.mismatches.push(format!("system {k}: {:?} / {:?}", a.err(), b.err())),
        }
    }
    report
}

#[derive(Clone, Debug, Default)]
pub struct WalkReport {
    pub pivots: usize,
    pub shapes: Vec<(usize, usize)>,
    pub mismatches: Vec<String>,
}

/// Random basic covectors of triangulations of random generic systems: the edge-exchange walk
/// and the direct pivot reach the same covector.
pub fn walk_agreement(pivots: usize, seed: u64) -> WalkReport {
    let mut report = WalkReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while report.pivots < pivots && attempts < 100 * pivots {
        attempts += 1;
        let (n, d) = [(3, 3), (4, 2), (4, 3), (5, 3)][rng.gen_range(0..4)];
        let sys = random_generic_system(&mut rng, n, d, 20);
        let Ok(stm) = stm_from_matrix(&sys) else { continue };
        let delta = rng.gen_range(0..d);
        let size = rng.gen_range(1..d);
        let others: Vec<usize> = (0..d).filter(|&i| i != delta).collect();
        let coords: BTreeSet<usize> =
            rand::seq::index::sample(&mut rng, others.len(), size).iter().map(|k| others[k]).collect();
        let basis: BTreeSet<usize> = rand::seq::index::sample(&mut rng, n, size).into_iter().collect();
        let Ok(state) = BasicState::cramer(&stm, basis, coords, delta) else { continue };
        let candidates = eligible(&state);
        if !state.is_basic() || candidates.is_empty() {
            continue;
        }
        let r = candidates[rng.gen_range(0..candidates.len())];
        report.pivots += 1;
        report.shapes.push((n, d));
        match (next_covector_walk(&stm, &state, r), next_basic_covector(&stm, &state, r)) {
            (Ok((walked, _)), Ok(direct)) if walked == direct => {}
            (a, b) => report.mismatches.push(format!(
                "{n}x{d} basis {:?} entering {r}: walk {:?} direct {:?}",
                state.basis,
                a.map(|w| w.0.covector.tuple_notation()),
                b.map(|s| s.covector.tuple_notation())
            )),
        }
    }
    report
}
