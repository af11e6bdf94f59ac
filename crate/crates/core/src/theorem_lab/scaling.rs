//! Query counts of the packing solver across grids of (m, rho, eps, blocks).

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{least_squares, LineFit};
use crate::dw_solver::{count_distinct_vertices, solve_instance, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::instance_gen::{generate_hard_instance, make_block_instance, PackingInstance};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingVariable {
    /// x = ln(1/eps)
    Eps,
    /// x = ln(rho)
    Rho,
    /// x = ln(k) for k identical blocks
    Blocks,
}

impl ScalingVariable {
    pub fn name(self) -> &'static str {
        match self {
            ScalingVariable::Eps => "eps",
            ScalingVariable::Rho => "rho",
            ScalingVariable::Blocks => "blocks",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub name: String,
    /// Rows per block.
    pub m: Vec<usize>,
    #[serde(with = "rational::serde_vec")]
    pub rho: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    pub eps: Vec<Rational>,
    #[serde(default = "one_block")]
    pub blocks: Vec<usize>,
    #[serde(deserialize_with = "crate::harness::seed_list")]
    pub seeds: Vec<u64>,
    /// Variables to fit. Empty means every variable with more than one grid value.
    #[serde(default)]
    pub fit: Vec<ScalingVariable>,
    #[serde(default)]
    pub record_wall_time: bool,
}

fn one_block() -> Vec<usize> {
    vec![1]
}

impl ScalingConfig {
    pub fn cells(&self) -> Vec<ScalingCell> {
        let mut out = Vec::new();
        for &m in &self.m {
            for rho in &self.rho {
                for eps in &self.eps {
                    for &blocks in &self.blocks {
                        for &seed in &self.seeds {
                            out.push(ScalingCell {
                                m,
                                rho: rho.clone(),
                                eps: eps.clone(),
                                blocks,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn fit_variables(&self) -> Vec<ScalingVariable> {
        if !self.fit.is_empty() {
            return self.fit.clone();
        }
        let mut vars = Vec::new();
        if self.eps.len() > 1 {
            vars.push(ScalingVariable::Eps);
        }
        if self.rho.len() > 1 {
            vars.push(ScalingVariable::Rho);
        }
        if self.blocks.len() > 1 {
            vars.push(ScalingVariable::Blocks);
        }
        vars
    }

    pub fn varies_blocks(&self) -> bool {
        self.blocks.iter().any(|&k| k != 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingCell {
    pub m: usize,
    pub rho: Rational,
    pub eps: Rational,
    pub blocks: usize,
    pub seed: u64,
}

impl ScalingCell {
    /// `blocks` identical copies of the hard instance for `(m, rho, seed)`.
    pub fn instance(&self) -> Result<PackingInstance> {
        if self.blocks == 0 {
            return Err(Error::InvalidParameter("blocks must be at least 1".into()));
        }
        let base = generate_hard_instance(self.m, &self.rho, self.seed)?;
        if self.blocks == 1 {
            return Ok(base);
        }
        make_block_instance(&vec![base; self.blocks])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    /// Total rows and columns of the solved instance.
    pub m: usize,
    pub n: usize,
    pub rho: Rational,
    pub eps: Rational,
    pub blocks: usize,
    pub seed: u64,
    pub queries: Option<u64>,
    pub distinct_vertices: Option<u64>,
    /// `feasible`, `infeasible`, `exhausted` or `error`.
    pub outcome: String,
    pub wall_time_ms: Option<u64>,
    pub error: Option<String>,
}

impl ExperimentRecord {
    pub fn succeeded(&self) -> bool {
        self.outcome == "feasible"
    }
}

pub fn run_scaling_cell(cell: &ScalingCell, record_wall_time: bool) -> ExperimentRecord {
    let started = Instant::now();
    let mut rec = ExperimentRecord {
        m: cell.m * cell.blocks,
        n: 0,
        rho: cell.rho.clone(),
        eps: cell.eps.clone(),
        blocks: cell.blocks,
        seed: cell.seed,
        queries: None,
        distinct_vertices: None,
        outcome: "error".into(),
        wall_time_ms: None,
        error: None,
    };
    let result = cell.instance().and_then(|inst| {
        rec.n = inst.cols();
        solve_instance(&inst, &SolverConfig::new(cell.eps.clone()).with_trajectory(true))
    });
    let report: Option<SolveReport> = match result {
        Ok(r) => Some(r),
        Err(Error::BudgetExhausted { report, .. }) => Some(*report),
        Err(e) => {
            rec.error = Some(e.to_string());
            None
        }
    };
    if let Some(r) = report {
        rec.queries = Some(r.queries);
        rec.distinct_vertices = count_distinct_vertices(&r).ok().map(|d| d as u64);
        rec.outcome = r.outcome_name().into();
    }
    if record_wall_time {
        rec.wall_time_ms = Some(started.elapsed().as_millis() as u64);
    }
    rec
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub variable: ScalingVariable,
    /// Values of the held-fixed parameters; the fitted variable's slot is `None`.
    pub m: usize,
    pub rho: Option<Rational>,
    pub eps: Option<Rational>,
    pub blocks: Option<usize>,
    /// `None` when fewer than two distinct x values survived.
    pub fit: Option<LineFit>,
    /// Failed runs left out of the fit.
    pub skipped: usize,
}

impl SlopeFit {
    pub fn slope(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.slope)
    }
}

type GroupKey = (usize, Option<Rational>, Option<Rational>, Option<usize>);

/// Least-squares fit of `ln(queries)` against the chosen variable, one fit per
/// combination of the remaining parameters. `m` is rows per block.
pub fn fit_slopes(records: &[ExperimentRecord], variable: ScalingVariable) -> Vec<SlopeFit> {
    let mut groups: BTreeMap<GroupKey, (Vec<(f64, f64)>, usize)> = BTreeMap::new();
    for r in records {
        let key = (
            r.m / r.blocks.max(1),
            (variable != ScalingVariable::Rho).then(|| r.rho.clone()),
            (variable != ScalingVariable::Eps).then(|| r.eps.clone()),
            (variable != ScalingVariable::Blocks).then_some(r.blocks),
        );
        let entry = groups.entry(key).or_default();
        match (r.succeeded(), r.queries) {
            (true, Some(q)) => {
                let x = match variable {
                    ScalingVariable::Eps => -rational::to_f64(&r.eps).ln(),
                    ScalingVariable::Rho => rational::to_f64(&r.rho).ln(),
                    ScalingVariable::Blocks => (r.blocks as f64).ln(),
                };
                entry.0.push((x, (q as f64).ln()));
            }
            _ => entry.1 += 1,
        }
    }
    groups
        .into_iter()
        .map(|((m, rho, eps, blocks), (points, skipped))| SlopeFit {
            variable,
            m,
            rho,
            eps,
            blocks,
            fit: least_squares(&points),
            skipped,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRun {
    pub records: Vec<ExperimentRecord>,
    pub slopes: Vec<SlopeFit>,
}

impl ScalingRun {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.succeeded()).count()
    }
}

/// Runs every cell (in parallel on the current rayon pool) and fits slopes.
/// Failed cells are kept in `records` and left out of the fits.
pub fn iteration_scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingRun> {
    if cfg.eps.iter().any(|e| !rational::is_positive(e) || *e >= rational::one()) {
        return Err(Error::InvalidParameter(format!("{}: eps values must lie in (0, 1)", cfg.name)));
    }
    let records: Vec<ExperimentRecord> = cfg
        .cells()
        .par_iter()
        .map(|c| run_scaling_cell(c, cfg.record_wall_time))
        .collect();
    let mut slopes = Vec::new();
    for var in cfg.fit_variables() {
        slopes.extend(fit_slopes(&records, var));
    }
    Ok(ScalingRun { records, slopes })
}
