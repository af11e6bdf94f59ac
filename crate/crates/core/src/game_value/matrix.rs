use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Dense nonnegative `m x n` payoff matrix, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl GameMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix must have at least one row and column, got {rows}x{cols}"
            )));
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::InvalidInput("matrix dimensions overflow".into()))?;
        if entries.len() != expected {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {expected} entries, got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|e| e.is_negative()) {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) is negative",
                pos / cols,
                pos % cols
            )));
        }
        Ok(GameMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        GameMatrix::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        GameMatrix::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| rational::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn from_bits(rows: usize, cols: usize, bits: &[bool]) -> Result<Self> {
        GameMatrix::new(
            rows,
            cols,
            bits.iter().map(|&b| rational::from_int(b as i64)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn is_binary(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.is_zero() || *e == rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn max_entry(&self) -> &Rational {
        self.entries.iter().max().expect("nonempty")
    }

    /// Columns that are identically zero, in increasing order.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| (0..self.rows).all(|i| self.get(i, j).is_zero()))
            .collect()
    }

    /// Keeps the given columns, which must be strictly increasing and in range.
    pub fn column_submatrix(&self, cols: &[usize]) -> Result<GameMatrix> {
        check_index_set(cols, self.cols, "column")?;
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            entries.extend(cols.iter().map(|&j| row[j].clone()));
        }
        GameMatrix::new(self.rows, cols.len(), entries)
    }

    pub fn row_submatrix(&self, rows: &[usize]) -> Result<GameMatrix> {
        check_index_set(rows, self.rows, "row")?;
        let entries = rows.iter().flat_map(|&i| self.row(i).iter().cloned()).collect();
        GameMatrix::new(rows.len(), self.cols, entries)
    }

    pub fn scaled(&self, alpha: &Rational) -> Result<GameMatrix> {
        if !alpha.is_positive() {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        GameMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|e| e * alpha).collect(),
        )
    }

    pub fn transpose(&self) -> GameMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            entries.extend((0..self.rows).map(|i| self.get(i, j).clone()));
        }
        GameMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(rational::to_f64).collect()
    }

    /// `A x`, one payoff per row.
    pub fn row_payoffs(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, w)| !a.is_zero() && !w.is_zero())
                    .fold(Rational::zero(), |acc, (a, w)| acc + a * w)
            })
            .collect()
    }

    /// `y^T A`, one payoff per column.
    pub fn column_payoffs(&self, y: &[Rational]) -> Vec<Rational> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![Rational::zero(); self.cols];
        for (i, w) in y.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (acc, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *acc += a * w;
                }
            }
        }
        out
    }
}

fn check_index_set(idx: &[usize], bound: usize, what: &str) -> Result<()> {
    if idx.is_empty() {
        return Err(Error::InvalidInput(format!("empty {what} index set")));
    }
    if let Some(&bad) = idx.iter().find(|&&j| j >= bound) {
        return Err(Error::InvalidInput(format!(
            "{what} index {bad} out of range 0..{bound}"
        )));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!(
            "{what} indices must be strictly increasing"
        )));
    }
    Ok(())
}

impl fmt::Debug for GameMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GameMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_negatives() {
        assert!(GameMatrix::new(0, 2, vec![]).is_err());
        assert!(GameMatrix::new(2, 2, vec![rational::one(); 3]).is_err());
        assert!(GameMatrix::from_int_rows(&[vec![1, -1]]).is_err());
        assert!(GameMatrix::from_int_rows(&[vec![1, 0], vec![1]]).is_err());
    }

    #[test]
    fn submatrix_keeps_order_and_validates() {
        let a = GameMatrix::from_int_rows(&[[1, 2, 3], [4, 5, 6]]).unwrap();
        let b = a.column_submatrix(&[0, 2]).unwrap();
        assert_eq!(b, GameMatrix::from_int_rows(&[[1, 3], [4, 6]]).unwrap());
        assert_eq!(a.column_submatrix(&[0, 1, 2]).unwrap(), a);
        assert!(a.column_submatrix(&[]).is_err());
        assert!(a.column_submatrix(&[3]).is_err());
        assert!(a.column_submatrix(&[2, 0]).is_err());
        assert!(a.column_submatrix(&[1, 1]).is_err());
        assert_eq!(
            a.row_submatrix(&[1]).unwrap(),
            GameMatrix::from_int_rows(&[[4, 5, 6]]).unwrap()
        );
    }

    #[test]
    fn payoffs() {
        let a = GameMatrix::from_int_rows(&[[1, 0], [1, 1]]).unwrap();
        let half = rational::ratio(1, 2);
        let x = [half.clone(), half.clone()];
        assert_eq!(a.row_payoffs(&x), vec![half.clone(), rational::one()]);
        assert_eq!(a.column_payoffs(&x), vec![rational::one(), half]);
        assert_eq!(a.transpose().transpose(), a);
    }
}
