//! Width-based multiplicative-weights decision procedure.
//!
//! Row weights start at one. Each iteration builds the combined cost
//! `c_j = sum_i w_i A_ij / b_i`, asks the oracle for a minimizing vertex
//! `x_hat`, and either
//!
//! * stops with `Infeasible(w)` when `sum_i w_i A_i x_hat / b_i > sum_i w_i`
//!   (then no point of P satisfies the weighted constraint), or
//! * folds `x_hat` into the running average `x_bar`, stops with
//!   `Feasible(x_bar)` once `A x_bar <= (1 + eps) b`, and otherwise scales
//!   `w_i` by `1 + step * eps * (A_i x_hat / b_i) / width`.
//!
//! With `step = 1/2` and `T = ceil(8 * width * ln(m) / eps^2)` iterations the
//! average is `eps`-feasible whenever an exact solution exists.

use num_bigint::BigInt;

use super::oracle::{LinearOracle, OracleQuery};
use super::report::{Outcome, SolveReport, TrajectoryRow};
use crate::error::{Error, Result};
use crate::instance_gen::{width, PackingInstance};
use crate::rational::{self, Rational};

const RENORMALIZE_ABOVE: f64 = 1e100;
/// Relative slack on float-side decisions, re-verified exactly afterwards.
const FLOAT_MARGIN: f64 = 1e-9;
/// The incremental cost vector is rebuilt from the weights this often.
const COST_REFRESH: u64 = 1024;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub eps: Rational,
    /// Replaces the default iteration cap.
    pub budget: Option<u64>,
    /// `C` in the default cap `ceil(C * width * ln(m) / eps^2)`.
    pub cap_factor: f64,
    /// Multiplier on `eps` in the weight update.
    pub step_factor: f64,
    /// Test `A x_bar <= (1 + eps) b` every `check_stride` iterations.
    pub check_stride: u64,
    pub trajectory: bool,
}

impl SolverConfig {
    pub fn new(eps: Rational) -> Self {
        SolverConfig {
            eps,
            budget: None,
            cap_factor: 8.0,
            step_factor: 0.5,
            check_stride: 1,
            trajectory: false,
        }
    }

    pub fn with_trajectory(mut self, on: bool) -> Self {
        self.trajectory = on;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Default cap for an instance of `m` rows and the given width.
    pub fn default_cap(&self, m: usize, width: f64) -> u64 {
        let eps = rational::to_f64(&self.eps);
        let t = self.cap_factor * width * (m as f64).ln() / (eps * eps);
        (t.ceil() as u64).max(1)
    }
}

struct Sparse {
    /// per column: (row, A_ij / b_i)
    by_col: Vec<Vec<(usize, f64)>>,
    /// per row: (column, A_ij / b_i)
    by_row: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn new(inst: &PackingInstance) -> Self {
        let (m, n) = (inst.rows(), inst.cols());
        let mut by_col = vec![Vec::new(); n];
        let mut by_row = vec![Vec::new(); m];
        for (i, row) in by_row.iter_mut().enumerate() {
            let b = rational::to_f64(&inst.b[i]);
            for (j, a) in inst.a.row(i).iter().enumerate() {
                let v = rational::to_f64(a) / b;
                if v != 0.0 {
                    by_col[j].push((i, v));
                    row.push((j, v));
                }
            }
        }
        Sparse { by_col, by_row }
    }

    fn costs(&self, w: &[f64], n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        for (i, row) in self.by_row.iter().enumerate() {
            for &(j, v) in row {
                c[j] += w[i] * v;
            }
        }
        c
    }
}

/// Runs the decision procedure. P is reached only through `oracle`.
pub fn solve_packing(inst: &PackingInstance, cfg: &SolverConfig, oracle: &dyn LinearOracle) -> Result<SolveReport> {
    let zero = rational::zero();
    if cfg.eps <= zero || cfg.eps >= rational::one() {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {}", cfg.eps)));
    }
    if !(cfg.cap_factor > 0.0 && cfg.step_factor > 0.0) || cfg.check_stride == 0 {
        return Err(Error::InvalidParameter("solver constants must be positive".into()));
    }
    let (m, n) = (inst.rows(), inst.cols());
    if oracle.dimension() != n {
        return Err(Error::InvalidInput(format!(
            "oracle dimension {} does not match {n} columns",
            oracle.dimension()
        )));
    }

    let rho = rational::to_f64(&width(inst)?);
    let eps = rational::to_f64(&cfg.eps);
    let cap = cfg.budget.unwrap_or_else(|| cfg.default_cap(m, rho));
    let step = cfg.step_factor * eps / rho;
    let feasible_bound = (1.0 + eps) * (1.0 - FLOAT_MARGIN);

    let sparse = Sparse::new(inst);
    let mut w = vec![1.0f64; m];
    let mut cost = sparse.costs(&w, n);
    let mut counts = vec![0u64; n];
    let mut load = vec![0.0f64; m];
    let mut gain = vec![0.0f64; m];
    let mut touched: Vec<usize> = Vec::new();
    let mut trajectory = cfg.trajectory.then(Vec::new);
    let calls_before = oracle.calls();

    let mut t = 0u64;
    while t < cap {
        let answer = oracle.minimize(&OracleQuery { cost: cost.clone() })?;
        t += 1;

        touched.clear();
        for &j in &answer.vertex {
            for &(i, v) in &sparse.by_col[j] {
                if gain[i] == 0.0 {
                    touched.push(i);
                }
                gain[i] += v;
            }
        }
        let weighted: f64 = touched.iter().map(|&i| w[i] * gain[i]).sum();
        let total: f64 = w.iter().sum();
        if weighted > total * (1.0 + FLOAT_MARGIN) {
            let x = average(&counts, t - 1);
            let violation = x.as_ref().map(|x| exact_violation(inst, x));
            return Ok(SolveReport {
                outcome: Outcome::Infeasible { w },
                queries: oracle.calls() - calls_before,
                iterations: t,
                max_relative_violation: violation,
                trajectory: trajectory.map(|mut tr: Vec<TrajectoryRow>| {
                    tr.push(TrajectoryRow {
                        iteration: t,
                        answer: answer.vertex.clone(),
                        // the rejected vertex itself, which never entered x_bar
                        violation: touched.iter().map(|&i| gain[i]).fold(0.0, f64::max) - 1.0,
                    });
                    tr
                }),
            });
        }

        for &j in &answer.vertex {
            counts[j] += 1;
        }
        for &i in &touched {
            load[i] += gain[i];
        }
        let tf = t as f64;
        let worst = load.iter().cloned().fold(0.0f64, f64::max) / tf;
        if let Some(tr) = trajectory.as_mut() {
            tr.push(TrajectoryRow {
                iteration: t,
                answer: answer.vertex.clone(),
                violation: worst - 1.0,
            });
        }
        if (t.is_multiple_of(cfg.check_stride) || t == cap) && worst <= feasible_bound {
            let x = average(&counts, t).expect("t > 0");
            let violation = exact_violation(inst, &x);
            if violation <= cfg.eps {
                return Ok(SolveReport {
                    outcome: Outcome::Feasible { x },
                    queries: oracle.calls() - calls_before,
                    iterations: t,
                    max_relative_violation: Some(violation),
                    trajectory,
                });
            }
        }

        for &i in &touched {
            let old = w[i];
            w[i] = old * (1.0 + step * gain[i]);
            let delta = w[i] - old;
            for &(j, v) in &sparse.by_row[i] {
                cost[j] += delta * v;
            }
            gain[i] = 0.0;
        }
        let total: f64 = w.iter().sum();
        if total > RENORMALIZE_ABOVE {
            w.iter_mut().for_each(|v| *v /= total);
            cost = sparse.costs(&w, n);
        } else if t.is_multiple_of(COST_REFRESH) {
            cost = sparse.costs(&w, n);
        }
    }

    let x = average(&counts, t).unwrap_or_else(|| vec![rational::zero(); n]);
    let violation = (t > 0).then(|| exact_violation(inst, &x));
    Err(Error::BudgetExhausted {
        budget: cap,
        report: Box::new(SolveReport {
            outcome: Outcome::Exhausted { x },
            queries: oracle.calls() - calls_before,
            iterations: t,
            max_relative_violation: violation,
            trajectory,
        }),
    })
}

fn average(counts: &[u64], t: u64) -> Option<Vec<Rational>> {
    (t > 0).then(|| {
        let den = BigInt::from(t);
        counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(c), den.clone()))
            .collect()
    })
}

/// `max_i A_i x / b_i - 1`, exactly.
fn exact_violation(inst: &PackingInstance, x: &[Rational]) -> Rational {
    let mut worst: Option<Rational> = None;
    for (ax, b) in inst.a.row_payoffs(x).into_iter().zip(&inst.b) {
        let r = ax / b;
        if worst.as_ref().is_none_or(|w| r > *w) {
            worst = Some(r);
        }
    }
    worst.expect("at least one row") - rational::one()
}
