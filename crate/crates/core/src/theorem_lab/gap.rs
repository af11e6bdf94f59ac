//! Minimum value over column submatrices, exhaustively or by sampling.

use std::collections::HashSet;

use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game_value::{value_exact, GameMatrix};
use crate::instance_gen::{generate_hard_instance, width};
use crate::rational::{self, Rational};
use crate::rng::SeededRng;

/// Default cap on the number of subsets [`min_submatrix_value`] enumerates.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SubmatrixMin {
    pub value: Rational,
    /// Lexicographically first minimizing column set.
    pub witness: Vec<usize>,
    pub subsets_checked: u64,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn check_s(a: &GameMatrix, s: usize) -> Result<()> {
    if s == 0 || s > a.cols() {
        return Err(Error::InvalidInput(format!("s = {s} outside 1..={}", a.cols())));
    }
    Ok(())
}

/// Exact minimum of `V(B)` over all `m x s` column submatrices `B`.
pub fn min_submatrix_value(a: &GameMatrix, s: usize) -> Result<SubmatrixMin> {
    min_submatrix_value_guarded(a, s, ENUMERATION_GUARD)
}

pub fn min_submatrix_value_guarded(a: &GameMatrix, s: usize, guard: u128) -> Result<SubmatrixMin> {
    check_s(a, s)?;
    let count = binomial(a.cols(), s);
    if count > guard {
        return Err(Error::ResourceLimit(format!(
            "C({}, {s}) = {count} subsets exceeds the enumeration guard of {guard}; use sampled mode",
            a.cols()
        )));
    }
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut checked = 0u64;
    for cols in (0..a.cols()).combinations(s) {
        let v = value_exact(&a.column_submatrix(&cols)?)?.upper;
        checked += 1;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, cols));
        }
    }
    let (value, witness) = best.expect("at least one subset");
    Ok(SubmatrixMin {
        value,
        witness,
        subsets_checked: checked,
    })
}

/// Minimum over `samples` uniformly drawn `s`-subsets. Repeated draws are
/// evaluated once; `subsets_checked` counts distinct subsets.
pub fn sampled_min_submatrix_value(a: &GameMatrix, s: usize, samples: u64, seed: u64) -> Result<SubmatrixMin> {
    check_s(a, s)?;
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for _ in 0..samples {
        let mut cols = rand::seq::index::sample(rng.inner_mut(), a.cols(), s).into_vec();
        cols.sort_unstable();
        if !seen.insert(cols.clone()) {
            continue;
        }
        let v = value_exact(&a.column_submatrix(&cols)?)?.upper;
        let better = match &best {
            None => true,
            Some((b, w)) => v < *b || (v == *b && cols < *w),
        };
        if better {
            best = Some((v, cols));
        }
    }
    let (value, witness) = best.expect("at least one sample");
    Ok(SubmatrixMin {
        value,
        witness,
        subsets_checked: seen.len() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapCheckConfig {
    pub m: usize,
    #[serde(with = "rational::serde_str")]
    pub rho: Rational,
    #[serde(with = "rational::serde_str")]
    pub eps_bar: Rational,
    pub s_max: usize,
    #[serde(deserialize_with = "crate::harness::seed_list")]
    pub seeds: Vec<u64>,
    #[serde(with = "rational::serde_str")]
    pub c_gap: Rational,
    /// The exponent slack in `s <= m^(1/2 - delta)`.
    #[serde(default = "default_delta_exponent")]
    pub delta_exponent: f64,
}

fn default_delta_exponent() -> f64 {
    0.1
}

impl GapCheckConfig {
    pub fn trials(&self) -> usize {
        self.seeds.len()
    }

    fn validate(&self) -> Result<()> {
        let n = crate::instance_gen::columns_for(self.m);
        if self.s_max == 0 || self.s_max > n {
            return Err(Error::InvalidParameter(format!("s_max = {} outside 1..={n}", self.s_max)));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("gap experiment needs at least one seed".into()));
        }
        if !rational::is_positive(&self.eps_bar) || !rational::is_positive(&self.c_gap) {
            return Err(Error::InvalidParameter("eps_bar and c_gap must be positive".into()));
        }
        Ok(())
    }
}

/// One `(seed, s)` cell of the gap experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub seed: u64,
    pub s: usize,
    pub v_a: Rational,
    pub v_min_s: Rational,
    pub gap_ratio: Rational,
    pub subsets_checked: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSummary {
    pub seed: u64,
    pub effective_seed: u64,
    pub v_a: Rational,
    pub v_a_over_p: Rational,
    pub width: Rational,
}

/// Which term of `min{ ln m / (p eps_bar^2), m^(1/2 - delta) }` is smaller.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeBranch {
    pub log_bound: f64,
    pub power_bound: f64,
    pub active: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapExperiment {
    pub rows: Vec<GapReport>,
    pub seeds: Vec<SeedSummary>,
    /// Per `s`: fraction of seeds with `v_min_s > (1 + c_gap * eps_bar) V(A)`.
    pub pass_fraction: Vec<(usize, f64)>,
    /// Per `s`: smallest `(gap_ratio - 1) / eps_bar` over seeds.
    pub measured_gap_constant: Vec<(usize, Rational)>,
    pub size_branch: SizeBranch,
}

pub fn theorem1_gap_experiment(cfg: &GapCheckConfig) -> Result<GapExperiment> {
    cfg.validate()?;
    let cells: Vec<(Vec<GapReport>, SeedSummary)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| gap_cell(cfg, seed))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut seeds = Vec::new();
    for (r, s) in cells {
        rows.extend(r);
        seeds.push(s);
    }
    let threshold = rational::one() + &cfg.c_gap * &cfg.eps_bar;
    let mut pass_fraction = Vec::new();
    let mut measured = Vec::new();
    for s in 1..=cfg.s_max {
        let at_s: Vec<&GapReport> = rows.iter().filter(|r| r.s == s).collect();
        let passed = at_s.iter().filter(|r| r.gap_ratio > threshold).count();
        pass_fraction.push((s, passed as f64 / at_s.len() as f64));
        let c = at_s
            .iter()
            .map(|r| (&r.gap_ratio - rational::one()) / &cfg.eps_bar)
            .min()
            .expect("seeds nonempty");
        measured.push((s, c));
    }

    let p = rational::to_f64(&cfg.rho.recip());
    let eps = rational::to_f64(&cfg.eps_bar);
    let m = cfg.m as f64;
    let log_bound = m.ln() / (p * eps * eps);
    let power_bound = m.powf(0.5 - cfg.delta_exponent);
    Ok(GapExperiment {
        rows,
        seeds,
        pass_fraction,
        measured_gap_constant: measured,
        size_branch: SizeBranch {
            log_bound,
            power_bound,
            active: if log_bound <= power_bound { "log" } else { "power" },
        },
    })
}

fn gap_cell(cfg: &GapCheckConfig, seed: u64) -> Result<(Vec<GapReport>, SeedSummary)> {
    let inst = generate_hard_instance(cfg.m, &cfg.rho, seed)?;
    let v_a = inst.b[0].clone();
    let meta = inst.meta.as_ref().expect("generated instances carry metadata");
    let summary = SeedSummary {
        seed,
        effective_seed: meta.seed,
        v_a_over_p: &v_a / &meta.p,
        width: width(&inst)?,
        v_a: v_a.clone(),
    };
    debug_assert!(!v_a.is_zero());
    let rows = (1..=cfg.s_max)
        .map(|s| {
            let found = min_submatrix_value(&inst.a, s)?;
            Ok(GapReport {
                seed,
                s,
                gap_ratio: &found.value / &v_a,
                v_a: v_a.clone(),
                v_min_s: found.value,
                subsets_checked: found.subsets_checked,
            })
        })
        .collect::<Result<_>>()?;
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 3), 1140);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn guard_is_enforced() {
        let a = GameMatrix::from_int_rows(&[vec![1i64; 30]]).unwrap();
        assert!(matches!(
            min_submatrix_value_guarded(&a, 15, 1000),
            Err(Error::ResourceLimit(_))
        ));
        assert!(min_submatrix_value(&a, 0).is_err());
        assert!(min_submatrix_value(&a, 31).is_err());
        assert!(sampled_min_submatrix_value(&a, 2, 0, 1).is_err());
    }
}
