//! Exact game values by fraction-free (integer) simplex pivoting.
//!
//! For a matrix with no zero column the game LP is rewritten as the packing LP
//!
//! ```text
//!     maximize 1.u   subject to  A u <= 1,  u >= 0
//! ```
//!
//! whose optimum `z` satisfies `V(A) = 1/z`, with `x = u/z` and the row duals
//! (normalised by `z`) as the row player's strategy. The slack basis is
//! feasible, so no phase one is needed. Rows are scaled by the lcm of their
//! denominators so the tableau is integral, and pivots use Bareiss updates:
//! every stored entry is a minor of the input and divisions are exact.
//!
//! The tableau is first run in `i128` with checked arithmetic and rerun in
//! `BigInt` if anything overflows.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{GameMatrix, MixedStrategy, ValueCertificate};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest `m * n` accepted by [`value_exact`].
pub const EXACT_SIZE_GUARD: usize = 1_000_000;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

/// Exact value of `a` with a zero-gap certificate.
pub fn value_exact(a: &GameMatrix) -> Result<ValueCertificate> {
    let (m, n) = (a.rows(), a.cols());
    if m.saturating_mul(n) > EXACT_SIZE_GUARD {
        return Err(Error::ResourceLimit(format!(
            "{m}x{n} matrix exceeds the exact-value guard of {EXACT_SIZE_GUARD} entries; use value_approx with an explicit tolerance"
        )));
    }

    if a.is_zero() {
        return Ok(ValueCertificate {
            primal: MixedStrategy::uniform(n),
            dual: MixedStrategy::uniform(m),
            upper: Rational::zero(),
            lower: Rational::zero(),
        });
    }
    if let Some(&j) = a.zero_columns().first() {
        return ValueCertificate::from_strategies(a, MixedStrategy::pure(n, j), MixedStrategy::uniform(m));
    }

    // Duplicate and all-zero rows add nothing to the LP. The dual weight of a
    // class of equal rows lands on its first member.
    let mut seen: HashMap<&[Rational], usize> = HashMap::new();
    let mut reps = Vec::new();
    for i in 0..m {
        let row = a.row(i);
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        seen.entry(row).or_insert_with(|| {
            reps.push(i);
            i
        });
    }

    let (scaled, scales) = integer_rows(a, &reps);
    let solution = match solve::<i128>(&scaled, &scales, n) {
        Some(s) => s,
        None => solve::<BigInt>(&scaled, &scales, n).ok_or_else(|| {
            Error::InvalidInput("internal error: packing LP reported unbounded".into())
        })?,
    };

    // x_j = u_j / z = rhs_j / obj_rhs ; y_i = L_i * reduced_cost_i / obj_rhs
    let obj = Rational::from_integer(solution.objective_rhs.clone());
    let mut x = vec![Rational::zero(); n];
    for (j, v) in solution.primal {
        x[j] = Rational::from_integer(v) / &obj;
    }
    let mut y = vec![Rational::zero(); m];
    for (k, v) in solution.dual {
        y[reps[k]] = Rational::from_integer(v * &scales[k]) / &obj;
    }

    let primal = MixedStrategy::new(x)?;
    let dual = MixedStrategy::new(y)?;
    let reduced = a.row_submatrix(&reps)?;
    let reduced_dual: Vec<Rational> = reps.iter().map(|&i| dual.weights()[i].clone()).collect();
    let upper = super::max_of(reduced.row_payoffs(primal.weights()));
    let lower = super::min_of(reduced.column_payoffs(&reduced_dual));
    if upper != lower {
        return Err(Error::InvalidInput(format!(
            "internal error: exact certificate did not close ({lower} < {upper})"
        )));
    }
    Ok(ValueCertificate {
        primal,
        dual,
        upper,
        lower,
    })
}

/// Rows `reps` of `a` scaled to integers; returns the rows and their scales.
fn integer_rows(a: &GameMatrix, reps: &[usize]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(reps.len());
    let mut scales = Vec::with_capacity(reps.len());
    for &i in reps {
        let row = a.row(i);
        let lcm = row
            .iter()
            .fold(<BigInt as One>::one(), |acc, e| if e.is_integer() { acc } else { acc.lcm(e.denom()) });
        rows.push(
            row.iter()
                .map(|e| {
                    if lcm.is_one() {
                        e.numer().clone()
                    } else {
                        (e * Rational::from_integer(lcm.clone())).to_integer()
                    }
                })
                .collect(),
        );
        scales.push(lcm);
    }
    (rows, scales)
}

struct Solution {
    objective_rhs: BigInt,
    /// (column, numerator over the determinant) for basic structural vars
    primal: Vec<(usize, BigInt)>,
    /// (reduced row, objective entry) for nonbasic slacks
    dual: Vec<(usize, BigInt)>,
}

trait PivotInt: Clone + Ord {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn mul(&self, rhs: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// `(a * p - b * c) / d`, where the division is known to be exact.
    fn bareiss(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self>;
}

impl PivotInt for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_pos(&self) -> bool {
        *self > 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        self.checked_mul(*rhs)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn bareiss(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        let left = if *a == 0 { 0 } else { a.checked_mul(*p)? };
        let right = if *b == 0 || *c == 0 { 0 } else { b.checked_mul(*c)? };
        let num = left.checked_sub(right)?;
        Some(if *d == 1 { num } else { num / d })
    }
}

impl PivotInt for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn bareiss(a: &Self, p: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        let num = a * p - b * c;
        Some(if d.is_one() { num } else { num / d })
    }
}

/// Dictionary tableau: row 0 is the objective, rows `1..=k` the constraints;
/// columns `0..n` are the nonbasic variables and column `n` the right-hand
/// side. Variable ids `0..n` are structural, `n..n+k` are slacks.
struct Tableau<T> {
    k: usize,
    n: usize,
    cells: Vec<T>,
    det: T,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl<T: PivotInt> Tableau<T> {
    fn at(&self, r: usize, c: usize) -> &T {
        &self.cells[r * (self.n + 1) + c]
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for c in 0..self.n {
            let v = self.at(0, c);
            if !v.is_neg() {
                continue;
            }
            best = match best {
                None => Some(c),
                Some(b) => {
                    let better = if bland {
                        self.nonbasic[c] < self.nonbasic[b]
                    } else {
                        // most negative, lowest variable id on ties
                        v < self.at(0, b) || (v == self.at(0, b) && self.nonbasic[c] < self.nonbasic[b])
                    };
                    Some(if better { c } else { b })
                }
            };
        }
        best
    }

    /// Minimum-ratio row for column `c`, lowest basic id on ties.
    fn leaving(&self, c: usize) -> Option<Option<usize>> {
        let rhs = self.n;
        let mut best: Option<usize> = None;
        for r in 1..=self.k {
            let a = self.at(r, c);
            if !a.is_pos() {
                continue;
            }
            best = match best {
                None => Some(r),
                Some(b) => {
                    // rhs_r / a_r  vs  rhs_b / a_b
                    let lhs = self.at(r, rhs).mul(self.at(b, c))?;
                    let rhs_v = self.at(b, rhs).mul(a)?;
                    let better = lhs < rhs_v || (lhs == rhs_v && self.basis[r - 1] < self.basis[b - 1]);
                    Some(if better { r } else { b })
                }
            };
        }
        Some(best)
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let width = self.n + 1;
        let p = self.at(r, c).clone();
        let pivot_row: Vec<T> = self.cells[r * width..(r + 1) * width].to_vec();
        for i in 0..=self.k {
            if i == r {
                continue;
            }
            let row = &mut self.cells[i * width..(i + 1) * width];
            let bic = row[c].clone();
            for j in 0..width {
                if j == c {
                    continue;
                }
                row[j] = T::bareiss(&row[j], &p, &bic, &pivot_row[j], &self.det)?;
            }
            row[c] = bic.neg()?;
        }
        self.cells[r * width + c] = self.det.clone();
        self.det = p;
        std::mem::swap(&mut self.basis[r - 1], &mut self.nonbasic[c]);
        Some(())
    }
}

/// `None` on arithmetic overflow (only possible for `i128`) or unboundedness.
fn solve<T: PivotInt>(rows: &[Vec<BigInt>], scales: &[BigInt], n: usize) -> Option<Solution> {
    let k = rows.len();
    let mut cells = Vec::with_capacity((k + 1) * (n + 1));
    cells.extend(std::iter::repeat_n(T::one().neg()?, n));
    cells.push(T::zero());
    // row i reads  (L_i A_i) u + s_i = L_i
    for (row, scale) in rows.iter().zip(scales) {
        for v in row {
            cells.push(T::from_big(v)?);
        }
        cells.push(T::from_big(scale)?);
    }
    run(Tableau {
        k,
        n,
        cells,
        det: T::one(),
        basis: (n..n + k).collect(),
        nonbasic: (0..n).collect(),
    })
}

fn run<T: PivotInt>(mut t: Tableau<T>) -> Option<Solution> {
    let mut degenerate_run = 0usize;
    let mut bland = false;
    while let Some(c) = t.entering(bland) {
        let r = t.leaving(c)??;
        if t.at(r, t.n).is_zero() {
            degenerate_run += 1;
            if degenerate_run > DEGENERATE_LIMIT {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        t.pivot(r, c)?;
    }

    let mut primal = Vec::new();
    for r in 1..=t.k {
        let var = t.basis[r - 1];
        if var < t.n {
            primal.push((var, t.at(r, t.n).to_big()));
        }
    }
    let mut dual = Vec::new();
    for c in 0..t.n {
        let var = t.nonbasic[c];
        if var >= t.n {
            dual.push((var - t.n, t.at(0, c).to_big()));
        }
    }
    Some(Solution {
        objective_rhs: t.at(0, t.n).to_big(),
        primal,
        dual,
    })
}
