//! Finite joint distributions over a variable pair `(X, Y)`.

use std::fmt;
use std::path::Path;

use crate::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Which variable of the pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// An `n x m` probability table `p(x_i, y_j)` with cached marginals.
///
/// Rows index `X`, columns index `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
    px: Vec<f64>,
    py: Vec<f64>,
}

impl JointDistribution {
    /// Strictly positive table: every entry in `(0, 1]`, total 1 within `1e-12`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, true)
    }

    /// Like [`JointDistribution::new`] but admits zero entries. Used where a
    /// deterministic relation between the variables is the point of the
    /// example; graph constructions still reject such tables.
    pub fn new_nonnegative(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, false)
    }

    fn build(rows: Vec<Vec<f64>>, strict: bool) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::BadShape);
        }
        let table: Vec<f64> = rows.into_iter().flatten().collect();
        for (idx, &p) in table.iter().enumerate() {
            let ok = p.is_finite() && p <= 1.0 && if strict { p > 0.0 } else { p >= 0.0 };
            if !ok {
                return Err(Error::InvalidProbability { index: idx, value: p });
            }
        }
        let sum: f64 = table.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized(sum));
        }
        let mut px = vec![0.0; n];
        let mut py = vec![0.0; m];
        for i in 0..n {
            for j in 0..m {
                px[i] += table[i * m + j];
                py[j] += table[i * m + j];
            }
        }
        Ok(Self { rows: n, cols: m, table, px, py })
    }

    /// Normalises arbitrary non-negative weights into a joint table.
    pub fn from_weights(rows: Vec<Vec<f64>>) -> Result<Self> {
        let total: f64 = rows.iter().flatten().sum();
        if !(total > 0.0) {
            return Err(Error::NotNormalized(total));
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|w| w / total).collect())
            .collect();
        Self::new_nonnegative(rows)
    }

    /// Parses whitespace-separated rows; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| Error::Parse {
                        line: lineno + 1,
                        msg: format!("{tok:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::new_nonnegative(rows)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("{}: {e}", path.as_ref().display()),
        })?;
        Self::parse(&text)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.table.iter().all(|&p| p > 0.0)
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.table[i * self.cols + j]
    }

    pub fn marginal(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::X => &self.px,
            Axis::Y => &self.py,
        }
    }

    pub fn px(&self) -> &[f64] {
        &self.px
    }

    pub fn py(&self) -> &[f64] {
        &self.py
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.p(i, j)).collect())
            .collect();
        Self::new_nonnegative(rows).expect("transpose of a valid table is valid")
    }

    /// Row-major iterator over `(i, j, p)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.table
            .iter()
            .enumerate()
            .map(move |(k, &p)| (k / self.cols, k % self.cols, p))
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self.p(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_are_row_and_column_sums() {
        let j = JointDistribution::new(vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        assert!((j.px()[0] - 0.3).abs() < 1e-15);
        assert!((j.px()[1] - 0.7).abs() < 1e-15);
        assert!((j.py()[0] - 0.4).abs() < 1e-15);
        assert!((j.py()[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn strict_constructor_rejects_zero() {
        assert!(JointDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).is_err());
        assert!(JointDistribution::new_nonnegative(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).is_ok());
    }

    #[test]
    fn rejects_bad_sum_and_shape() {
        assert!(matches!(
            JointDistribution::new(vec![vec![0.3, 0.3]]),
            Err(Error::NotNormalized(_))
        ));
        assert_eq!(
            JointDistribution::new(vec![vec![0.5], vec![0.25, 0.25]]),
            Err(Error::BadShape)
        );
    }

    #[test]
    fn single_cell_table() {
        let j = JointDistribution::new(vec![vec![1.0]]).unwrap();
        assert_eq!(j.px(), &[1.0]);
    }

    #[test]
    fn parse_matrix_text() {
        let j = JointDistribution::parse("# fixture\n0.25 0.25\n0.25 0.25 # row 2\n").unwrap();
        assert_eq!((j.rows(), j.cols()), (2, 2));
        assert_eq!(j.transpose(), j);
        assert!(JointDistribution::parse("0.5 x\n").is_err());
    }
}
