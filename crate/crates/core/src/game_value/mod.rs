//! Values of nonnegative two-player zero-sum matrix games.
//!
//! The column player picks a mixed strategy `x` and pays `max_i A_i . x`; the
//! value `V(A)` is the smallest such payment. Every routine here returns a
//! [`ValueCertificate`]: a primal strategy `x` and a dual (row-player)
//! strategy `y` whose payoffs sandwich `V(A)` by weak duality.

mod approx;
mod exact;
mod matrix;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use approx::{value_approx, value_approx_with, ApproxOptions};
pub use exact::{value_exact, EXACT_SIZE_GUARD};
pub use matrix::GameMatrix;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Nonnegative weights summing to exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StrategyRepr", into = "StrategyRepr")]
pub struct MixedStrategy {
    weights: Vec<Rational>,
}

impl MixedStrategy {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("strategy has dimension zero".into()));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput("strategy has a negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "strategy weights sum to {total}, not 1"
            )));
        }
        Ok(MixedStrategy { weights })
    }

    pub fn pure(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut weights = vec![Rational::zero(); dim];
        weights[index] = Rational::one();
        MixedStrategy { weights }
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        MixedStrategy {
            weights: vec![rational::ratio(1, dim as i64); dim],
        }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&j| !self.weights[j].is_zero())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct StrategyRepr(#[serde(with = "rational::serde_vec")] Vec<Rational>);

impl TryFrom<StrategyRepr> for MixedStrategy {
    type Error = Error;
    fn try_from(r: StrategyRepr) -> Result<Self> {
        MixedStrategy::new(r.0)
    }
}

impl From<MixedStrategy> for StrategyRepr {
    fn from(s: MixedStrategy) -> Self {
        StrategyRepr(s.weights)
    }
}

/// Primal/dual strategy pair bracketing `V(A)`: `lower <= V(A) <= upper`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCertificate {
    pub primal: MixedStrategy,
    pub dual: MixedStrategy,
    #[serde(with = "rational::serde_str")]
    pub upper: Rational,
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
}

impl ValueCertificate {
    /// Builds a certificate by evaluating both strategies against `a`.
    pub fn from_strategies(a: &GameMatrix, primal: MixedStrategy, dual: MixedStrategy) -> Result<Self> {
        if primal.dimension() != a.cols() || dual.dimension() != a.rows() {
            return Err(Error::InvalidInput(format!(
                "strategy dimensions ({}, {}) do not match {}x{} matrix",
                primal.dimension(),
                dual.dimension(),
                a.rows(),
                a.cols()
            )));
        }
        let upper = max_of(a.row_payoffs(primal.weights()));
        let lower = min_of(a.column_payoffs(dual.weights()));
        Ok(ValueCertificate {
            primal,
            dual,
            upper,
            lower,
        })
    }

    pub fn gap(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn is_exact(&self) -> bool {
        self.upper == self.lower
    }

    /// The value, when the certificate closes the gap.
    pub fn value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.upper)
    }

    /// Recomputes both bounds from the stored strategies.
    pub fn verify(&self, a: &GameMatrix) -> bool {
        match ValueCertificate::from_strategies(a, self.primal.clone(), self.dual.clone()) {
            Ok(c) => c.upper == self.upper && c.lower == self.lower && c.lower <= c.upper,
            Err(_) => false,
        }
    }
}

pub(crate) fn max_of(v: Vec<Rational>) -> Rational {
    v.into_iter().max().expect("nonempty payoff vector")
}

pub(crate) fn min_of(v: Vec<Rational>) -> Rational {
    v.into_iter().min().expect("nonempty payoff vector")
}

/// The `m x |cols|` submatrix of the selected columns.
pub fn column_submatrix(a: &GameMatrix, cols: &[usize]) -> Result<GameMatrix> {
    a.column_submatrix(cols)
}
