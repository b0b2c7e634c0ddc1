//! Signed systems `(A, Σ)`: validation, evaluation, trimming and the Ω extension.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::SystemError;
use crate::tropical::{t_plus, Point, Rational, TropicalMatrix, TropicalValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
    Bullet,
}

impl Sign {
    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' | '−' => Some(Sign::Minus),
            '.' | '•' => Some(Sign::Bullet),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Bullet => '.',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    signs: Vec<Sign>,
}

impl SignMatrix {
    pub fn from_rows(rows: Vec<Vec<Sign>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(SignMatrix { rows: n, cols, signs: rows.into_iter().flatten().collect() })
    }

    /// One string per row over the characters `+`, `-`, `.`.
    pub fn parse_rows(rows: &[&str]) -> Option<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.chars().filter(|c| !c.is_whitespace()).map(Sign::from_char).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Sign {
        self.signs[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Sign] {
        &self.signs[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_string(&self, row: usize) -> String {
        self.row(row).iter().map(|s| s.as_char()).collect()
    }
}

/// A single validation finding; indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    DimensionMismatch { matrix: (usize, usize), signs: (usize, usize) },
    EmptyDimension,
    Coupling { row: usize, col: usize },
    InfiniteRow { row: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DimensionMismatch { matrix, signs } => {
                write!(f, "matrix is {}x{} but sign matrix is {}x{}", matrix.0, matrix.1, signs.0, signs.1)
            }
            Diagnostic::EmptyDimension => write!(f, "system needs at least one row and one column"),
            Diagnostic::Coupling { row, col } => write!(
                f,
                "entry ({}, {}) violates the coupling between infinite entries and bullet signs",
                row + 1,
                col + 1
            ),
            Diagnostic::InfiniteRow { row } => write!(f, "row {} has no finite entry", row + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport(pub Vec<Diagnostic>);

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Row `j` encodes `min_{σ_ji = +} (a_ji + x_i) <= min_{σ_ji = -} (a_ji + x_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSystem {
    matrix: TropicalMatrix,
    signs: SignMatrix,
}

/// One replaced infinite entry of an Ω extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaEntry {
    pub row: usize,
    pub col: usize,
    pub value: Rational,
}

impl SignedSystem {
    pub fn new(matrix: TropicalMatrix, signs: SignMatrix) -> Result<Self, SystemError> {
        let sys = SignedSystem { matrix, signs };
        sys.validate().map_err(SystemError::Invalid)?;
        Ok(sys)
    }

    /// Pairs the matrices without validation.
    pub fn from_parts(matrix: TropicalMatrix, signs: SignMatrix) -> Self {
        SignedSystem { matrix, signs }
    }

    /// Integer entries (`None` for infinity) and sign rows such as `"+-."`.
    pub fn from_ints(entries: &[Vec<Option<i64>>], signs: &[&str]) -> Result<Self, SystemError> {
        let matrix = TropicalMatrix::from_ints(entries)
            .ok_or_else(|| SystemError::Invalid(ValidationReport(vec![Diagnostic::EmptyDimension])))?;
        let signs = SignMatrix::parse_rows(signs)
            .ok_or_else(|| SystemError::Invalid(ValidationReport(vec![Diagnostic::EmptyDimension])))?;
        Self::new(matrix, signs)
    }

    pub fn matrix(&self) -> &TropicalMatrix {
        &self.matrix
    }

    pub fn signs(&self) -> &SignMatrix {
        &self.signs
    }

    /// Number of rows (apex nodes).
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of columns (coordinate nodes).
    pub fn d(&self) -> usize {
        self.matrix.cols()
    }

    pub fn a(&self, row: usize, col: usize) -> &TropicalValue {
        self.matrix.get(row, col)
    }

    pub fn sigma(&self, row: usize, col: usize) -> Sign {
        self.signs.get(row, col)
    }

    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut found = Vec::new();
        let (m, s) = (&self.matrix, &self.signs);
        if (m.rows(), m.cols()) != (s.rows(), s.cols()) {
            found.push(Diagnostic::DimensionMismatch { matrix: (m.rows(), m.cols()), signs: (s.rows(), s.cols()) });
            return Err(ValidationReport(found));
        }
        if m.rows() == 0 || m.cols() == 0 {
            found.push(Diagnostic::EmptyDimension);
        }
        for row in 0..m.rows() {
            for col in 0..m.cols() {
                if m.get(row, col).is_infinite() != (s.get(row, col) == Sign::Bullet) {
                    found.push(Diagnostic::Coupling { row, col });
                }
            }
            if m.row(row).iter().all(TropicalValue::is_infinite) {
                found.push(Diagnostic::InfiniteRow { row });
            }
        }
        if found.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport(found))
        }
    }

    pub fn minus_cols(&self, row: usize) -> Vec<usize> {
        (0..self.d()).filter(|&c| self.sigma(row, c) == Sign::Minus).collect()
    }

    /// The column of the unique negative entry of a trimmed row.
    pub fn shape(&self, row: usize) -> Option<usize> {
        match self.minus_cols(row).as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    pub fn is_trimmed(&self) -> bool {
        (0..self.n()).all(|r| self.minus_cols(r).len() <= 1)
    }

    pub fn is_full(&self) -> bool {
        self.matrix.is_finite()
    }

    pub fn finite_cols(&self, row: usize) -> Vec<usize> {
        (0..self.d()).filter(|&c| self.a(row, c).is_finite()).collect()
    }

    fn side_min(&self, row: usize, x: &Point, sign: Sign) -> TropicalValue {
        (0..self.d())
            .filter(|&c| self.sigma(row, c) == sign)
            .map(|c| t_plus(self.a(row, c), &x.0[c]))
            .min()
            .unwrap_or(TropicalValue::Infinity)
    }

    pub fn row_satisfied(&self, row: usize, x: &Point) -> bool {
        self.side_min(row, x, Sign::Plus) <= self.side_min(row, x, Sign::Minus)
    }

    /// Whether `x` satisfies every row inequality.
    pub fn evaluate_feasible(&self, x: &Point) -> Result<bool, SystemError> {
        if x.dim() != self.d() {
            return Err(SystemError::PointDimension { expected: self.d(), got: x.dim() });
        }
        if x.has_empty_support() {
            return Err(SystemError::EmptySupport);
        }
        Ok((0..self.n()).all(|r| self.row_satisfied(r, x)))
    }

    /// Splits every row with several negative entries into one row per negative entry.
    ///
    /// Returns the trimmed system and, per output row, the input row it came from.
    pub fn trim(&self) -> (SignedSystem, Vec<usize>) {
        self.split_rows(|_, _| None)
    }

    /// Splitting that turns the other negative terms into positive ones shifted by `eps`.
    pub fn split_epsilon(&self, eps: &Rational) -> Result<SignedSystem, SystemError> {
        if !eps.is_positive() {
            return Err(SystemError::NonPositiveEpsilon);
        }
        Ok(self.split_rows(|v, _| Some(v.shifted(eps))).0)
    }

    fn split_rows<F>(&self, other_minus: F) -> (SignedSystem, Vec<usize>)
    where
        F: Fn(&TropicalValue, usize) -> Option<TropicalValue>,
    {
        let d = self.d();
        let mut entries = Vec::new();
        let mut signs = Vec::new();
        let mut origin = Vec::new();
        for row in 0..self.n() {
            let minus = self.minus_cols(row);
            if minus.len() <= 1 {
                entries.push(self.matrix.row(row).to_vec());
                signs.push(self.signs.row(row).to_vec());
                origin.push(row);
                continue;
            }
            for &kept in &minus {
                let mut e = Vec::with_capacity(d);
                let mut s = Vec::with_capacity(d);
                for col in 0..d {
                    let sigma = self.sigma(row, col);
                    if sigma != Sign::Minus || col == kept {
                        e.push(self.a(row, col).clone());
                        s.push(sigma);
                    } else if let Some(v) = other_minus(self.a(row, col), col) {
                        e.push(v);
                        s.push(Sign::Plus);
                    } else {
                        e.push(TropicalValue::Infinity);
                        s.push(Sign::Bullet);
                    }
                }
                entries.push(e);
                signs.push(s);
                origin.push(row);
            }
        }
        let matrix = TropicalMatrix::new(entries.len(), d, entries.into_iter().flatten().collect())
            .expect("consistent dimensions");
        let signs = SignMatrix::from_rows(signs).unwrap_or(SignMatrix { rows: 0, cols: d, signs: vec![] });
        (SignedSystem { matrix, signs }, origin)
    }

    /// Replaces infinite entries, in row-major order, by rapidly increasing integers and every
    /// bullet by a plus sign.
    ///
    /// With `S` the ceiling of the sum of absolute finite entries, `Ω_1 = S + 1` and
    /// `Ω_{l+1} = S + Ω_1 + ... + Ω_l + 1`.
    pub fn extend_omega(&self) -> (SignedSystem, Vec<OmegaEntry>) {
        let s: BigRational = self.matrix.entries().filter_map(TropicalValue::finite).map(|v| v.abs()).sum();
        let s = Rational::from_integer(s.ceil().to_integer());
        let one = Rational::from_integer(1.into());
        let mut prefix = Rational::zero();
        let mut matrix = self.matrix.clone();
        let mut sign_rows = Vec::with_capacity(self.n());
        let mut log = Vec::new();
        for row in 0..self.n() {
            let mut srow = Vec::with_capacity(self.d());
            for col in 0..self.d() {
                if self.a(row, col).is_infinite() {
                    let value = &s + &prefix + &one;
                    prefix += &value;
                    matrix.set(row, col, TropicalValue::Finite(value.clone()));
                    log.push(OmegaEntry { row, col, value });
                }
                srow.push(match self.sigma(row, col) {
                    Sign::Bullet => Sign::Plus,
                    other => other,
                });
            }
            sign_rows.push(srow);
        }
        let signs = SignMatrix::from_rows(sign_rows).unwrap_or_else(|| self.signs.clone());
        (SignedSystem { matrix, signs }, log)
    }

    /// Subsystem on the given rows (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> SignedSystem {
        let cols: Vec<usize> = (0..self.d()).collect();
        let matrix = self.matrix.submatrix(rows, &cols);
        let signs = SignMatrix {
            rows: rows.len(),
            cols: self.d(),
            signs: rows.iter().flat_map(|&r| self.signs.row(r).to_vec()).collect(),
        };
        SignedSystem { matrix, signs }
    }
}

impl fmt::Display for SignedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in 0..self.n() {
            let cells: Vec<String> =
                (0..self.d()).map(|c| format!("{}{}", self.sigma(row, c), self.a(row, c))).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn four_row_system() -> SignedSystem {
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

    #[test]
    fn validation() {
        assert!(four_row_system().validate().is_ok());
        let bad = SignedSystem::from_parts(
            TropicalMatrix::from_ints(&[vec![Some(0), Some(1)]]).unwrap(),
            SignMatrix::parse_rows(&["+."]).unwrap(),
        );
        assert_eq!(bad.validate().unwrap_err().0, vec![Diagnostic::Coupling { row: 0, col: 1 }]);
        let bad = SignedSystem::from_parts(
            TropicalMatrix::from_ints(&[vec![None, None]]).unwrap(),
            SignMatrix::parse_rows(&[".."]).unwrap(),
        );
        assert_eq!(bad.validate().unwrap_err().0, vec![Diagnostic::InfiniteRow { row: 0 }]);
        let bad = SignedSystem::from_parts(
            TropicalMatrix::from_ints(&[vec![Some(0)]]).unwrap(),
            SignMatrix::parse_rows(&["+-"]).unwrap(),
        );
        assert!(matches!(bad.validate().unwrap_err().0[0], Diagnostic::DimensionMismatch { .. }));
    }

    #[test]
    fn evaluation() {
        let sys = four_row_system();
        assert!(sys.evaluate_feasible(&pt("0,2,4.5")).unwrap());
        assert!(!sys.evaluate_feasible(&pt("inf,0,inf")).unwrap());
        assert!(sys.evaluate_feasible(&Point::infinite(3)).is_err());
        let one = SignedSystem::from_ints(&[vec![Some(0), Some(0)]], &["+-"]).unwrap();
        assert!(one.evaluate_feasible(&pt("0,0")).unwrap());
    }

    #[test]
    fn trim_splits_in_column_order() {
        let sys = SignedSystem::from_ints(&[vec![Some(0), Some(0), Some(0)]], &["+--"]).unwrap();
        let (t, origin) = sys.trim();
        assert_eq!(
            t,
            SignedSystem::from_ints(&[vec![Some(0), Some(0), None], vec![Some(0), None, Some(0)]], &["+-.", "+.-"])
                .unwrap()
        );
        assert_eq!(origin, vec![0, 0]);
        let (t, origin) = four_row_system().select_rows(&[1, 2]).trim();
        assert_eq!(t, four_row_system().select_rows(&[1, 2]));
        assert_eq!(origin, vec![0, 1]);
    }

    #[test]
    fn trim_of_split_inequality() {
        let sys = SignedSystem::from_ints(&[vec![Some(0), None, Some(-9), Some(3)]], &["+.--"]).unwrap();
        let (t, _) = sys.trim();
        assert_eq!(
            t,
            SignedSystem::from_ints(
                &[vec![Some(0), None, Some(-9), None], vec![Some(0), None, None, Some(3)]],
                &["+.-.", "+..-"]
            )
            .unwrap()
        );
    }

    #[test]
    fn split_epsilon_shifts_other_negatives() {
        // x1 <= x2 ⊕ x3
        let sys = SignedSystem::from_ints(&[vec![Some(0), Some(0), Some(0)]], &["+--"]).unwrap();
        let eps = Rational::from_integer(1.into());
        let s = sys.split_epsilon(&eps).unwrap();
        assert_eq!(
            s,
            SignedSystem::from_ints(
                &[vec![Some(0), Some(0), Some(1)], vec![Some(0), Some(1), Some(0)]],
                &["+-+", "++-"]
            )
            .unwrap()
        );
        let single = four_row_system().select_rows(&[1]);
        assert_eq!(single.split_epsilon(&eps).unwrap(), single);
        assert!(sys.split_epsilon(&Rational::zero()).is_err());
    }

    #[test]
    fn omega_values_follow_the_rule() {
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
        let (ext, log) = sys.extend_omega();
        let positions: Vec<(usize, usize)> = log.iter().map(|e| (e.row, e.col)).collect();
        assert_eq!(positions, vec![(0, 2), (0, 3), (1, 2), (1, 3), (2, 0)]);
        let values: Vec<i64> = log.iter().map(|e| e.value.to_integer().try_into().unwrap()).collect();
        assert_eq!(values, vec![5, 10, 20, 40, 80]);
        assert!(ext.is_full());
        assert_eq!(ext.signs(), &SignMatrix::parse_rows(&["-+++", "+-++", "++--", "+-++"]).unwrap());
        let (same, empty) = ext.extend_omega();
        assert_eq!(same, ext);
        assert!(empty.is_empty());
    }
}
