//! Chernoff-style estimates of how far the value of a random game strays from
//! its entry density, and an empirical check of the upper-tail estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game_value::value_exact;
use crate::instance_gen::bernoulli_matrix;
use crate::rational::{self, Rational};
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    /// `Pr[V(X) >= (1 + delta) q]`, union bound over rows.
    Upper,
    /// `Pr[V(X) <= (1 - delta) q]`, union bound over columns.
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEstimate {
    pub direction: BoundDirection,
    pub q: Rational,
    pub beta: Rational,
    pub m_x: usize,
    pub n_x: usize,
    pub constant_c: f64,
    pub delta: f64,
}

impl BoundEstimate {
    /// `(dim, other)` as used in the deviation formula.
    pub fn dims(&self) -> (usize, usize) {
        oriented(self.direction, self.m_x, self.n_x)
    }
}

fn oriented(direction: BoundDirection, m_x: usize, n_x: usize) -> (usize, usize) {
    match direction {
        BoundDirection::Upper => (m_x, n_x),
        BoundDirection::Lower => (n_x, m_x),
    }
}

fn check_unit(name: &str, r: &Rational) -> Result<()> {
    if !rational::is_positive(r) || *r > rational::one() {
        return Err(Error::InvalidInput(format!("{name} = {} outside (0, 1]", rational::format(r))));
    }
    Ok(())
}

/// `delta = sqrt(C ln(dim / beta) / (q other))`, clamped at zero.
pub fn naive_bound(
    direction: BoundDirection,
    q: &Rational,
    beta: &Rational,
    m_x: usize,
    n_x: usize,
    constant_c: f64,
) -> Result<BoundEstimate> {
    check_unit("q", q)?;
    check_unit("beta", beta)?;
    if m_x == 0 || n_x == 0 {
        return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
    }
    if !(constant_c.is_finite() && constant_c > 0.0) {
        return Err(Error::InvalidInput(format!("constant C = {constant_c} must be positive")));
    }
    let (dim, other) = oriented(direction, m_x, n_x);
    // ln(dim / beta) = ln dim - ln beta keeps precision when beta is tiny.
    let log_term = (dim as f64).ln() - rational::to_f64(beta).ln();
    let delta = (constant_c * log_term.max(0.0) / (rational::to_f64(q) * other as f64)).sqrt();
    Ok(BoundEstimate {
        direction,
        q: q.clone(),
        beta: beta.clone(),
        m_x,
        n_x,
        constant_c,
        delta,
    })
}

/// Inverse of [`naive_bound`]: the failure probability the formula assigns to
/// a given `delta`, capped at 1.
pub fn predicted_beta(direction: BoundDirection, q: &Rational, delta: f64, m_x: usize, n_x: usize, constant_c: f64) -> f64 {
    let (dim, other) = oriented(direction, m_x, n_x);
    let exponent = -delta * delta * rational::to_f64(q) * other as f64 / constant_c;
    (dim as f64 * exponent.exp()).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    #[serde(with = "rational::serde_str")]
    pub q: Rational,
    /// `(m_X, n_X)` pairs.
    pub shapes: Vec<(usize, usize)>,
    /// Each beta contributes the grid point `delta = naive_bound(Upper, ...)`.
    #[serde(with = "rational::serde_vec", default)]
    pub betas: Vec<Rational>,
    /// Extra grid points given directly.
    #[serde(default)]
    pub deltas: Vec<f64>,
    pub constant_c: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRow {
    pub q: Rational,
    pub m_x: usize,
    pub n_x: usize,
    pub delta: f64,
    pub predicted_beta: f64,
    pub empirical_freq: f64,
    pub hits: u64,
    pub trials: u64,
}

/// Draws `trials` Bernoulli(q) matrices per shape and counts how often the
/// exact value reaches `(1 + delta) q`. Rows come sorted by shape (config
/// order), then by delta.
pub fn bound_calibration_experiment(cfg: &CalibrationConfig) -> Result<Vec<CalibrationRow>> {
    check_unit("q", &cfg.q)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("calibration needs at least one trial".into()));
    }
    if let Some(d) = cfg.deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::InvalidParameter(format!("delta = {d} must be finite and nonnegative")));
    }
    let mut rows = Vec::new();
    for &(m_x, n_x) in &cfg.shapes {
        let mut grid = cfg.deltas.clone();
        for beta in &cfg.betas {
            grid.push(naive_bound(BoundDirection::Upper, &cfg.q, beta, m_x, n_x, cfg.constant_c)?.delta);
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        if grid.is_empty() {
            continue;
        }

        let values: Vec<Rational> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let x = bernoulli_matrix(m_x, n_x, &cfg.q, derive_seed(cfg.seed, t))?;
                Ok(value_exact(&x)?.upper)
            })
            .collect::<Result<_>>()?;

        for delta in grid {
            let threshold = rational::from_f64(1.0 + delta).expect("finite delta") * &cfg.q;
            let hits = values.iter().filter(|v| **v >= threshold).count() as u64;
            rows.push(CalibrationRow {
                q: cfg.q.clone(),
                m_x,
                n_x,
                delta,
                predicted_beta: predicted_beta(BoundDirection::Upper, &cfg.q, delta, m_x, n_x, cfg.constant_c),
                empirical_freq: hits as f64 / cfg.trials as f64,
                hits,
                trials: cfg.trials,
            });
        }
    }
    Ok(rows)
}
