//! Independent exact checks of solver outputs against the instance.

use num_traits::{Signed, Zero};

use crate::instance_gen::PackingInstance;
use crate::rational::{self, Rational};

/// Largest number of product-polytope vertices enumerated by
/// [`check_infeasibility_certificate`].
pub const VERTEX_ENUMERATION_GUARD: u128 = 10_000_000;

/// `x` lies in P and satisfies `A x <= (1 + eps) b`, in exact arithmetic.
pub fn check_feasible(inst: &PackingInstance, x: &[Rational], eps: &Rational) -> bool {
    if x.len() != inst.cols() || x.iter().any(Signed::is_negative) {
        return false;
    }
    for (s, len) in inst.polytope.block_ranges() {
        let total: Rational = x[s..s + len].iter().sum();
        if total != rational::one() {
            return false;
        }
    }
    let factor = rational::one() + eps;
    inst.a
        .row_payoffs(x)
        .iter()
        .zip(&inst.b)
        .all(|(ax, b)| *ax <= b * &factor)
}

/// Every vertex `v` of P has `sum_i w_i A_i v / b_i > sum_i w_i`, checked by
/// enumerating the vertices. Weights must be finite, nonnegative and not all
/// zero. Returns `false` if the vertex count exceeds the guard.
pub fn check_infeasibility_certificate(inst: &PackingInstance, w: &[f64]) -> bool {
    if w.len() != inst.rows() || w.iter().any(|v| !v.is_finite() || *v < 0.0) || w.iter().all(|v| *v == 0.0) {
        return false;
    }
    let weights: Vec<Rational> = w.iter().map(|&v| rational::from_f64(v).expect("finite")).collect();
    let total: Rational = weights.iter().sum();
    // per-column combined cost  c_j = sum_i w_i A_ij / b_i
    let scaled: Vec<Rational> = weights.iter().zip(&inst.b).map(|(w, b)| w / b).collect();
    let cost = inst.a.column_payoffs(&scaled);

    let ranges = inst.polytope.block_ranges();
    let count = ranges.iter().fold(1u128, |acc, &(_, len)| acc.saturating_mul(len as u128));
    if count > VERTEX_ENUMERATION_GUARD {
        return false;
    }
    // odometer over one coordinate per block
    let mut pick = vec![0usize; ranges.len()];
    loop {
        let value: Rational = pick
            .iter()
            .zip(&ranges)
            .map(|(&k, &(s, _))| cost[s + k].clone())
            .fold(Rational::zero(), |a, b| a + b);
        if value <= total {
            return false;
        }
        let mut level = 0;
        loop {
            if level == pick.len() {
                return true;
            }
            pick[level] += 1;
            if pick[level] < ranges[level].1 {
                break;
            }
            pick[level] = 0;
            level += 1;
        }
    }
}
