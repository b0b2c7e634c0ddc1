//! Min-plus arithmetic over exact rationals, tropical matrices and determinants.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseValueError;

pub type Rational = BigRational;

/// An element of the min-plus semiring: a finite rational or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropicalValue {
    Finite(Rational),
    Infinity,
}

impl TropicalValue {
    pub fn int(v: i64) -> Self {
        TropicalValue::Finite(Rational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        TropicalValue::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TropicalValue::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TropicalValue::Finite(v) => Some(v),
            TropicalValue::Infinity => None,
        }
    }

    /// Adds a finite rational; infinity stays infinity.
    pub fn shifted(&self, c: &Rational) -> Self {
        match self {
            TropicalValue::Finite(v) => TropicalValue::Finite(v + c),
            TropicalValue::Infinity => TropicalValue::Infinity,
        }
    }
}

impl From<Rational> for TropicalValue {
    fn from(v: Rational) -> Self {
        TropicalValue::Finite(v)
    }
}

impl From<i64> for TropicalValue {
    fn from(v: i64) -> Self {
        TropicalValue::int(v)
    }
}

impl PartialOrd for TropicalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropicalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => a.cmp(b),
            (TropicalValue::Finite(_), TropicalValue::Infinity) => Ordering::Less,
            (TropicalValue::Infinity, TropicalValue::Finite(_)) => Ordering::Greater,
            (TropicalValue::Infinity, TropicalValue::Infinity) => Ordering::Equal,
        }
    }
}

/// Tropical addition.
pub fn t_min(a: &TropicalValue, b: &TropicalValue) -> TropicalValue {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Tropical multiplication.
pub fn t_plus(a: &TropicalValue, b: &TropicalValue) -> TropicalValue {
    match (a, b) {
        (TropicalValue::Finite(x), TropicalValue::Finite(y)) => TropicalValue::Finite(x + y),
        _ => TropicalValue::Infinity,
    }
}

pub fn format_rational(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses an integer, a fraction `p/q` or a plain decimal such as `-4.5`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseValueError> {
    let s = s.trim();
    let bad = || ParseValueError(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let ten = BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

impl fmt::Display for TropicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropicalValue::Finite(v) => f.write_str(&format_rational(v)),
            TropicalValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for TropicalValue {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "Infinity" | "∞" => Ok(TropicalValue::Infinity),
            other => parse_rational(other).map(TropicalValue::Finite),
        }
    }
}

/// A point of the tropical projective space; coordinates may be infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<TropicalValue>);

impl Point {
    pub fn infinite(d: usize) -> Self {
        Point(vec![TropicalValue::Infinity; d])
    }

    pub fn from_ints(values: &[Option<i64>]) -> Self {
        Point(values.iter().map(|v| v.map_or(TropicalValue::Infinity, TropicalValue::int)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i].is_finite()).collect()
    }

    pub fn has_empty_support(&self) -> bool {
        self.0.iter().all(TropicalValue::is_infinite)
    }

    pub fn shifted(&self, c: &Rational) -> Point {
        Point(self.0.iter().map(|v| v.shifted(c)).collect())
    }

    /// Representative whose minimum finite coordinate is zero.
    pub fn normalized(&self) -> Point {
        match self.0.iter().filter_map(TropicalValue::finite).min() {
            Some(m) => self.shifted(&-m.clone()),
            None => self.clone(),
        }
    }

    /// Representative with `x[anchor] = 0`; requires a finite anchor coordinate.
    pub fn anchored(&self, anchor: usize) -> Option<Point> {
        let c = self.0[anchor].finite()?.clone();
        Some(self.shifted(&-c))
    }

    /// Equality up to adding a multiple of the all-ones vector.
    pub fn equivalent(&self, other: &Point) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Dense `rows x cols` matrix over the min-plus semiring; row `j`, column `i` holds `a_ji`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropicalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TropicalValue>,
}

impl TropicalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TropicalValue>) -> Option<Self> {
        (entries.len() == rows * cols).then_some(TropicalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<TropicalValue>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(TropicalMatrix { rows: n, cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Integer matrix with `None` for infinity.
    pub fn from_ints(rows: &[Vec<Option<i64>>]) -> Option<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|v| v.map_or(TropicalValue::Infinity, TropicalValue::int)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &TropicalValue {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: TropicalValue) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[TropicalValue] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &TropicalValue> {
        self.entries.iter()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> TropicalMatrix {
        let entries = rows.iter().flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone())).collect();
        TropicalMatrix { rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(TropicalValue::is_finite)
    }

    /// Largest absolute value among finite entries (zero if none).
    pub fn max_abs(&self) -> Rational {
        self.entries.iter().filter_map(TropicalValue::finite).map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// Tropical matrix-vector product: entry `j` is `min_i (a_ji + x_i)`.
pub fn mat_vec(a: &TropicalMatrix, x: &Point) -> Point {
    assert_eq!(a.cols(), x.dim(), "dimension mismatch in mat_vec");
    Point(
        (0..a.rows())
            .map(|j| {
                a.row(j).iter().zip(&x.0).map(|(aji, xi)| t_plus(aji, xi)).min().unwrap_or(TropicalValue::Infinity)
            })
            .collect(),
    )
}

/// Node-disjoint edges `(coordinate, apex)`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort();
        Matching { edges }
    }

    pub fn is_node_disjoint(&self) -> bool {
        let mut coords: Vec<usize> = self.edges.iter().map(|e| e.0).collect();
        let mut apexes: Vec<usize> = self.edges.iter().map(|e| e.1).collect();
        coords.sort_unstable();
        apexes.sort_unstable();
        coords.windows(2).all(|w| w[0] != w[1]) && apexes.windows(2).all(|w| w[0] != w[1])
    }

    /// Sum of the matched entries `a_ji`.
    pub fn value(&self, a: &TropicalMatrix) -> TropicalValue {
        self.edges.iter().fold(TropicalValue::zero(), |acc, &(i, j)| t_plus(&acc, a.get(j, i)))
    }
}

/// Optimal assignment of rows to columns; `None` when no finite perfect matching exists.
fn hungarian(m: &TropicalMatrix) -> Option<(Rational, Vec<usize>)> {
    let k = m.rows();
    debug_assert!(m.is_square());
    if k == 0 {
        return Some((Rational::zero(), Vec::new()));
    }
    let bound: Rational = m.entries().filter_map(TropicalValue::finite).map(|v| v.abs()).sum();
    let big = bound * Rational::from_integer(BigInt::from(2)) + Rational::one();
    let cost = |r: usize, c: usize| -> Rational {
        match m.get(r - 1, c - 1) {
            TropicalValue::Finite(v) => v.clone(),
            TropicalValue::Infinity => big.clone(),
        }
    };
    let mut u = vec![Rational::zero(); k + 1];
    let mut v = vec![Rational::zero(); k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        p[0] = row;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - &u[i0] - &v[j];
                if minv[j].as_ref().is_none_or(|mv| cur < *mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += &delta;
                    v[j] -= &delta;
                } else if let Some(mv) = minv[j].as_mut() {
                    *mv -= &delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; k];
    let mut total = Rational::zero();
    for c in 1..=k {
        let r = p[c];
        assignment[r - 1] = c - 1;
        match m.get(r - 1, c - 1) {
            TropicalValue::Finite(val) => total += val,
            TropicalValue::Infinity => return None,
        }
    }
    Some((total, assignment))
}

/// Value of a minimal perfect matching of a square matrix.
pub fn tdet_value(m: &TropicalMatrix) -> TropicalValue {
    assert!(m.is_square(), "tropical determinant needs a square matrix");
    hungarian(m).map_or(TropicalValue::Infinity, |(v, _)| TropicalValue::Finite(v))
}

/// Tropical determinant of the submatrix on the given rows and columns.
pub fn tdet_sub(a: &TropicalMatrix, rows: &[usize], cols: &[usize]) -> TropicalValue {
    tdet_value(&a.submatrix(rows, cols))
}

/// Tropical determinant with the lexicographically smallest minimal matching as witness.
///
/// Witness edges are `(column, row)` in local indices of the square input.
pub fn tropical_det(m: &TropicalMatrix) -> (TropicalValue, Option<Matching>) {
    let value = tdet_value(m);
    let Some(target) = value.finite().cloned() else {
        return (value, None);
    };
    let k = m.rows();
    let mut free_rows: Vec<usize> = (0..k).collect();
    let mut remaining = target;
    let mut edges = Vec::with_capacity(k);
    for col in 0..k {
        let rest_cols: Vec<usize> = (col + 1..k).collect();
        let pick = free_rows.iter().position(|&row| {
            let Some(entry) = m.get(row, col).finite() else {
                return false;
            };
            let rest_rows: Vec<usize> = free_rows.iter().copied().filter(|&r| r != row).collect();
            match tdet_sub(m, &rest_rows, &rest_cols) {
                TropicalValue::Finite(rest) => entry + rest == remaining,
                TropicalValue::Infinity => false,
            }
        });
        let pos = pick.expect("an optimal completion exists");
        let row = free_rows.remove(pos);
        remaining -= m.get(row, col).finite().expect("finite entry");
        edges.push((col, row));
    }
    (value, Some(Matching::new(edges)))
}

/// Minimum over all permutations, by enumeration.
pub fn tdet_brute_force(m: &TropicalMatrix) -> TropicalValue {
    assert!(m.is_square());
    let k = m.rows();
    itertools::Itertools::permutations(0..k, k)
        .map(|perm| {
            perm.iter().enumerate().fold(TropicalValue::zero(), |acc, (col, &row)| t_plus(&acc, m.get(row, col)))
        })
        .min()
        .unwrap_or_else(TropicalValue::zero)
}

fn collect_minimal(
    m: &TropicalMatrix,
    col: usize,
    free_rows: &mut Vec<usize>,
    remaining: &Rational,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Matching>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let k = m.rows();
    if col == k {
        out.push(Matching::new(current.clone()));
        return;
    }
    let rest_cols: Vec<usize> = (col + 1..k).collect();
    for pos in 0..free_rows.len() {
        let row = free_rows[pos];
        let Some(entry) = m.get(row, col).finite() else {
            continue;
        };
        let rest_rows: Vec<usize> = free_rows.iter().copied().filter(|&r| r != row).collect();
        let TropicalValue::Finite(rest) = tdet_sub(m, &rest_rows, &rest_cols) else {
            continue;
        };
        if entry + &rest != *remaining {
            continue;
        }
        free_rows.remove(pos);
        current.push((col, row));
        collect_minimal(m, col + 1, free_rows, &rest, current, out, limit);
        current.pop();
        free_rows.insert(pos, row);
    }
}

/// All perfect matchings attaining the (finite) tropical determinant, up to `limit` of them.
pub fn minimal_matchings(m: &TropicalMatrix, limit: usize) -> Vec<Matching> {
    let TropicalValue::Finite(target) = tdet_value(m) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut free_rows: Vec<usize> = (0..m.rows()).collect();
    collect_minimal(m, 0, &mut free_rows, &target, &mut Vec::new(), &mut out, limit);
    out
}

/// True iff exactly one perfect matching attains the finite tropical determinant.
pub fn minimal_matching_unique(m: &TropicalMatrix) -> bool {
    assert!(m.is_square());
    minimal_matchings(m, 2).len() == 1
}

/// Every square submatrix has a unique minimal matching.
pub fn is_generic(m: &TropicalMatrix) -> bool {
    use itertools::Itertools;
    let k_max = m.rows().min(m.cols());
    (1..=k_max).all(|k| {
        (0..m.rows())
            .combinations(k)
            .all(|rows| (0..m.cols()).combinations(k).all(|cols| minimal_matching_unique(&m.submatrix(&rows, &cols))))
    })
}
