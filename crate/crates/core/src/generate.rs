//! Random desk-scale instances.

use rand::Rng;

use crate::system::{Sign, SignMatrix, SignedSystem};
use crate::tropical::{TropicalMatrix, TropicalValue};

#[derive(Clone, Copy, Debug)]
pub struct InstanceShape {
    pub d: usize,
    pub n: usize,
    pub max_abs: i64,
    /// Probability of an infinite entry.
    pub infinity: f64,
    /// Probability that a row gets a negative entry.
    pub negative: f64,
}

/// Trimmed integer system: at most one negative entry and at least one finite entry per row.
pub fn random_trimmed_system<R: Rng>(rng: &mut R, shape: InstanceShape) -> SignedSystem {
    let InstanceShape { d, n, max_abs, infinity, negative } = shape;
    let mut entries = Vec::with_capacity(n * d);
    let mut signs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut finite: Vec<bool> = (0..d).map(|_| !rng.gen_bool(infinity)).collect();
        if !finite.iter().any(|&f| f) {
            finite[rng.gen_range(0..d)] = true;
        }
        let cols: Vec<usize> = (0..d).filter(|&c| finite[c]).collect();
        let minus = rng.gen_bool(negative).then(|| cols[rng.gen_range(0..cols.len())]);
        let mut row = Vec::with_capacity(d);
        for c in 0..d {
            if finite[c] {
                entries.push(TropicalValue::int(rng.gen_range(-max_abs..=max_abs)));
                row.push(if Some(c) == minus { Sign::Minus } else { Sign::Plus });
            } else {
                entries.push(TropicalValue::Infinity);
                row.push(Sign::Bullet);
            }
        }
        signs.push(row);
    }
    let matrix = TropicalMatrix::new(n, d, entries).expect("consistent dimensions");
    SignedSystem::new(matrix, SignMatrix::from_rows(signs).expect("rectangular")).expect("valid by construction")
}

/// Finite integer matrix with entries in `[-max_abs, max_abs]`.
pub fn random_finite_matrix<R: Rng>(rng: &mut R, n: usize, d: usize, max_abs: i64) -> TropicalMatrix {
    let entries = (0..n * d).map(|_| TropicalValue::int(rng.gen_range(-max_abs..=max_abs))).collect();
    TropicalMatrix::new(n, d, entries).expect("consistent dimensions")
}

/// Sign matrix with exactly one negative entry per row.
pub fn random_trimmed_signs<R: Rng>(rng: &mut R, n: usize, d: usize) -> SignMatrix {
    SignMatrix::from_rows(
        (0..n)
            .map(|_| {
                let minus = rng.gen_range(0..d);
                (0..d).map(|c| if c == minus { Sign::Minus } else { Sign::Plus }).collect()
            })
            .collect(),
    )
    .expect("rectangular")
}
