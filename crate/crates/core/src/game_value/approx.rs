//! Certified approximate values by multiplicative-weights self-play.
//!
//! Both players run optimistic Hedge against each other: each round a player
//! plays the softmax of its cumulative payoff plus the most recent payoff
//! counted once more. The averaged strategies form the certificate. The
//! cumulative payoff vectors double as `T * A x_bar` and `T * y_bar^T A`, so
//! the duality gap of the averages is available every round for free.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{GameMatrix, MixedStrategy, ValueCertificate};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Strategies are rounded onto this grid before exact evaluation.
const GRID_BITS: u32 = 52;

#[derive(Clone, Debug)]
pub struct ApproxOptions {
    /// Step size on payoffs normalised to `[0, 1]`.
    pub eta: f64,
    /// Overrides the default cap `10 * ceil(ln(m + n) / tol^2)`.
    pub max_iterations: Option<u64>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            eta: 0.25,
            max_iterations: None,
        }
    }
}

/// Certificate with `upper - lower <= tol`.
pub fn value_approx(a: &GameMatrix, tol: &Rational) -> Result<ValueCertificate> {
    value_approx_with(a, tol, &ApproxOptions::default())
}

pub fn value_approx_with(a: &GameMatrix, tol: &Rational, opts: &ApproxOptions) -> Result<ValueCertificate> {
    if !rational::is_positive(tol) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if !(opts.eta > 0.0 && opts.eta.is_finite()) {
        return Err(Error::InvalidParameter("eta must be positive".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    if a.is_zero() {
        return Ok(ValueCertificate {
            primal: MixedStrategy::uniform(n),
            dual: MixedStrategy::uniform(m),
            upper: Rational::zero(),
            lower: Rational::zero(),
        });
    }

    let scale = rational::to_f64(a.max_entry());
    let payoff: Vec<f64> = a.to_f64().into_iter().map(|v| v / scale).collect();
    let tol_f = rational::to_f64(tol);
    let tol_scaled = tol_f / scale;
    let cap = opts.max_iterations.unwrap_or_else(|| {
        let t = ((m + n) as f64).ln() / (tol_scaled * tol_scaled);
        (10.0 * t.ceil()).min(u64::MAX as f64 / 2.0) as u64
    });

    let eta = opts.eta;
    // Cumulative payoff seen by the row player (row i) and column player (col j).
    let mut row_total = vec![0.0f64; m];
    let mut col_total = vec![0.0f64; n];
    let mut row_last = vec![0.0f64; m];
    let mut col_last = vec![0.0f64; n];
    let mut x = vec![0.0f64; n];
    let mut y = vec![0.0f64; m];
    let mut x_sum = vec![0.0f64; n];
    let mut y_sum = vec![0.0f64; m];

    let mut best_upper = (f64::INFINITY, vec![1.0 / n as f64; n]);
    let mut best_lower = (f64::NEG_INFINITY, vec![1.0 / m as f64; m]);

    let mut t = 0u64;
    while t < cap {
        t += 1;
        // column player minimises, row player maximises
        softmax(&mut x, col_total.iter().zip(&col_last).map(|(s, l)| -eta * (s + l)));
        softmax(&mut y, row_total.iter().zip(&row_last).map(|(s, l)| eta * (s + l)));

        for (i, r) in row_last.iter_mut().enumerate() {
            let row = &payoff[i * n..(i + 1) * n];
            *r = row.iter().zip(&x).map(|(a, w)| a * w).sum();
        }
        col_last.iter_mut().for_each(|c| *c = 0.0);
        for (i, &w) in y.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let row = &payoff[i * n..(i + 1) * n];
            for (c, a) in col_last.iter_mut().zip(row) {
                *c += a * w;
            }
        }
        for (s, l) in row_total.iter_mut().zip(&row_last) {
            *s += l;
        }
        for (s, l) in col_total.iter_mut().zip(&col_last) {
            *s += l;
        }
        for (s, v) in x_sum.iter_mut().zip(&x) {
            *s += v;
        }
        for (s, v) in y_sum.iter_mut().zip(&y) {
            *s += v;
        }

        let tf = t as f64;
        let upper = row_total.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / tf;
        let lower = col_total.iter().cloned().fold(f64::INFINITY, f64::min) / tf;
        if upper < best_upper.0 {
            best_upper = (upper, x_sum.iter().map(|v| v / tf).collect());
        }
        if lower > best_lower.0 {
            best_lower = (lower, y_sum.iter().map(|v| v / tf).collect());
        }
        if (best_upper.0 - best_lower.0) * scale <= tol_f * (1.0 - 1e-9) {
            let cert = certify(a, &best_upper.1, &best_lower.1)?;
            if &cert.gap() <= tol {
                return Ok(cert);
            }
        }
    }

    let best = certify(a, &best_upper.1, &best_lower.1)?;
    Err(Error::NonConvergence {
        iterations: t,
        best_gap: rational::to_f64(&best.gap()),
        best: Box::new(best),
    })
}

fn softmax(out: &mut [f64], logits: impl Iterator<Item = f64>) {
    for (o, l) in out.iter_mut().zip(logits) {
        *o = l;
    }
    let max = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Rounds a float distribution onto the `2^-GRID_BITS` grid, keeping the sum
/// exactly one by absorbing the rounding error into the largest weight.
fn round_strategy(p: &[f64]) -> MixedStrategy {
    let total: f64 = p.iter().sum();
    let grid = (1u64 << GRID_BITS) as f64;
    let mut ticks: Vec<i64> = p.iter().map(|v| (v / total * grid).round() as i64).collect();
    let argmax = (0..ticks.len()).fold(0, |b, j| if ticks[j] > ticks[b] { j } else { b });
    let drift: i64 = ticks.iter().sum::<i64>() - (1i64 << GRID_BITS);
    ticks[argmax] -= drift;
    let denom = BigInt::from(1u64 << GRID_BITS);
    let weights = ticks
        .iter()
        .map(|&t| Rational::new(BigInt::from(t.max(0)), denom.clone()))
        .collect::<Vec<_>>();
    MixedStrategy::new(weights).expect("grid weights sum to one")
}

fn certify(a: &GameMatrix, x: &[f64], y: &[f64]) -> Result<ValueCertificate> {
    ValueCertificate::from_strategies(a, round_strategy(x), round_strategy(y))
}
