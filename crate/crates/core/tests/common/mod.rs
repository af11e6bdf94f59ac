//! Test-only oracles, independent of the library's LP code.
#![allow(dead_code)]

use dwlab::game_value::GameMatrix;
use dwlab::rational;

fn payoff(a: &[f64], m: usize, n: usize, x: &[f64]) -> f64 {
    (0..m)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn point(params: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut x: Vec<f64> = params.to_vec();
    let rest = 1.0 - params.iter().sum::<f64>();
    if params.iter().any(|&v| v < -1e-15) || rest < -1e-15 {
        return None;
    }
    x.push(rest.max(0.0));
    for v in &mut x {
        *v = v.max(0.0);
    }
    debug_assert_eq!(x.len(), n);
    Some(x)
}

/// Value of a game with at most three columns by grid search over the
/// simplex at step 1e-3, then local grid refinement down to 1e-7.
pub fn grid_value(a: &GameMatrix) -> f64 {
    let (m, n) = (a.rows(), a.cols());
    assert!(n <= 3, "grid oracle handles n <= 3");
    let v: Vec<f64> = a.entries().iter().map(rational::to_f64).collect();
    if n == 1 {
        return payoff(&v, m, 1, &[1.0]);
    }
    let d = n - 1;
    let eval = |p: &[f64]| point(p, n).map(|x| payoff(&v, m, n, &x));

    let steps = 1000usize;
    let mut best = (f64::INFINITY, vec![0.0; d]);
    let consider = |p: Vec<f64>, best: &mut (f64, Vec<f64>)| {
        if let Some(f) = eval(&p) {
            if f < best.0 {
                *best = (f, p);
            }
        }
    };
    if d == 1 {
        for k in 0..=steps {
            consider(vec![k as f64 / steps as f64], &mut best);
        }
    } else {
        for k1 in 0..=steps {
            for k2 in 0..=(steps - k1) {
                consider(vec![k1 as f64 / steps as f64, k2 as f64 / steps as f64], &mut best);
            }
        }
    }

    let radius: i64 = 20;
    let mut h = 1e-3;
    while h >= 1e-7 * 0.999 {
        for _ in 0..200 {
            let center = best.1.clone();
            let before = best.0;
            if d == 1 {
                for k in -radius..=radius {
                    consider(vec![center[0] + k as f64 * h], &mut best);
                }
            } else {
                for k1 in -radius..=radius {
                    for k2 in -radius..=radius {
                        consider(vec![center[0] + k1 as f64 * h, center[1] + k2 as f64 * h], &mut best);
                    }
                }
            }
            if best.0 >= before {
                break;
            }
        }
        h /= 10.0;
    }
    best.0
}

/// Every `k`-subset of `0..n` in lexicographic order, by plain recursion.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
