use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Averaged oracle answers satisfying `A x <= (1 + eps) b`.
    Feasible { x: Vec<Rational> },
    /// Row weights whose combined constraint no vertex of P can satisfy.
    Infeasible { w: Vec<f64> },
    /// Budget ran out; `x` is the running average at that point.
    Exhausted { x: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub iteration: u64,
    /// Coordinate chosen in each block.
    pub answer: Vec<usize>,
    /// `max_i A_i x_bar / b_i - 1` after this iteration.
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub queries: u64,
    pub iterations: u64,
    pub max_relative_violation: Option<Rational>,
    pub trajectory: Option<Vec<TrajectoryRow>>,
}

impl SolveReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self.outcome, Outcome::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.outcome, Outcome::Infeasible { .. })
    }

    pub fn outcome_name(&self) -> &'static str {
        match self.outcome {
            Outcome::Feasible { .. } => "feasible",
            Outcome::Infeasible { .. } => "infeasible",
            Outcome::Exhausted { .. } => "exhausted",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ReportRepr::from(self)).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<SolveReport> {
        let repr: ReportRepr = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("solve report (line {}, column {})", e.line(), e.column()), e)
        })?;
        repr.try_into()
    }
}

/// Number of distinct oracle answers recorded in the trajectory.
pub fn count_distinct_vertices(report: &SolveReport) -> Result<usize> {
    let trajectory = report
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::MissingData("solve report has no trajectory; rerun with trajectory logging".into()))?;
    Ok(trajectory.iter().map(|r| &r.answer).collect::<HashSet<_>>().len())
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<Vec<f64>>,
    queries: u64,
    iterations: u64,
    #[serde(default, with = "rational::serde_opt")]
    max_relative_violation: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trajectory: Option<Vec<(u64, AnswerIndex, f64)>>,
}

/// A plain index for simplex answers, one index per block otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AnswerIndex {
    Single(usize),
    Blocks(Vec<usize>),
}

impl From<&SolveReport> for ReportRepr {
    fn from(r: &SolveReport) -> Self {
        let fmt = |x: &[Rational]| Some(x.iter().map(rational::format).collect());
        let (x, w) = match &r.outcome {
            Outcome::Feasible { x } | Outcome::Exhausted { x } => (fmt(x), None),
            Outcome::Infeasible { w } => (None, Some(w.clone())),
        };
        ReportRepr {
            outcome: r.outcome_name().to_string(),
            x,
            w,
            queries: r.queries,
            iterations: r.iterations,
            max_relative_violation: r.max_relative_violation.clone(),
            trajectory: r.trajectory.as_ref().map(|t| {
                t.iter()
                    .map(|row| {
                        let idx = match row.answer.as_slice() {
                            [j] => AnswerIndex::Single(*j),
                            many => AnswerIndex::Blocks(many.to_vec()),
                        };
                        (row.iteration, idx, row.violation)
                    })
                    .collect()
            }),
        }
    }
}

impl TryFrom<ReportRepr> for SolveReport {
    type Error = Error;

    fn try_from(r: ReportRepr) -> Result<SolveReport> {
        let parse_x = |x: Option<Vec<String>>| -> Result<Vec<Rational>> {
            x.ok_or_else(|| Error::parse("solve report", "missing \"x\""))?
                .iter()
                .map(|t| rational::parse(t).ok_or_else(|| Error::parse("solve report field \"x\"", format!("bad rational {t:?}"))))
                .collect()
        };
        let outcome = match r.outcome.as_str() {
            "feasible" => Outcome::Feasible { x: parse_x(r.x)? },
            "exhausted" => Outcome::Exhausted { x: parse_x(r.x)? },
            "infeasible" => Outcome::Infeasible {
                w: r.w.ok_or_else(|| Error::parse("solve report", "missing \"w\""))?,
            },
            other => return Err(Error::parse("solve report field \"outcome\"", format!("unknown outcome {other:?}"))),
        };
        let trajectory = r.trajectory.map(|rows| {
            rows.into_iter()
                .map(|(iteration, idx, violation)| TrajectoryRow {
                    iteration,
                    answer: match idx {
                        AnswerIndex::Single(j) => vec![j],
                        AnswerIndex::Blocks(v) => v,
                    },
                    violation,
                })
                .collect()
        });
        Ok(SolveReport {
            outcome,
            queries: r.queries,
            iterations: r.iterations,
            max_relative_violation: r.max_relative_violation,
            trajectory,
        })
    }
}
