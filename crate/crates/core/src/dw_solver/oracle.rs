//! Linear minimization oracles: the only access a solver has to its polytope.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::instance_gen::PolytopeDescriptor;
use crate::rational::{self, Rational};

/// "Given a cost vector `c`, return a point of P minimizing `c . x`."
#[derive(Clone, Debug, PartialEq)]
pub struct OracleQuery {
    pub cost: Vec<f64>,
}

/// A vertex of a simplex or of a product of simplices, stored as the
/// coordinate set to one in each block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OracleAnswer {
    pub vertex: Vec<usize>,
    pub dimension: usize,
}

impl OracleAnswer {
    pub fn point(&self) -> Vec<Rational> {
        let mut p = vec![rational::zero(); self.dimension];
        for &j in &self.vertex {
            p[j] = rational::one();
        }
        p
    }

    /// True when the answer is a vertex of `polytope`: one unit coordinate in
    /// every block and zeros elsewhere.
    pub fn is_vertex_of(&self, polytope: &PolytopeDescriptor) -> bool {
        let ranges = polytope.block_ranges();
        self.dimension == polytope.dimension()
            && self.vertex.len() == ranges.len()
            && self
                .vertex
                .iter()
                .zip(&ranges)
                .all(|(&j, &(s, len))| j >= s && j < s + len)
    }
}

fn check_cost(c: &OracleQuery, n: usize) -> Result<()> {
    if c.cost.len() != n {
        return Err(Error::InvalidInput(format!(
            "cost vector has length {} but the polytope has dimension {n}",
            c.cost.len()
        )));
    }
    if c.cost.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("cost vector contains NaN".into()));
    }
    Ok(())
}

fn argmin(costs: &[f64]) -> usize {
    // strict comparison keeps the lowest index on ties
    (1..costs.len()).fold(0, |best, j| if costs[j] < costs[best] { j } else { best })
}

/// Minimizes over the `n`-simplex: the unit vector at the cheapest coordinate.
pub fn lmo_simplex(c: &OracleQuery, n: usize) -> Result<OracleAnswer> {
    if n == 0 {
        return Err(Error::InvalidInput("simplex of dimension 0".into()));
    }
    check_cost(c, n)?;
    Ok(OracleAnswer {
        vertex: vec![argmin(&c.cost)],
        dimension: n,
    })
}

/// Minimizes over a product of simplices, block by block.
pub fn lmo_product(c: &OracleQuery, descriptor: &PolytopeDescriptor) -> Result<OracleAnswer> {
    let dims = match descriptor {
        PolytopeDescriptor::Product(dims) => dims,
        PolytopeDescriptor::Simplex(_) => {
            return Err(Error::InvalidInput("lmo_product needs a product descriptor".into()))
        }
    };
    descriptor.validate()?;
    let n: usize = dims.iter().sum();
    check_cost(c, n)?;
    let vertex = descriptor
        .block_ranges()
        .into_iter()
        .map(|(s, len)| s + argmin(&c.cost[s..s + len]))
        .collect();
    Ok(OracleAnswer { vertex, dimension: n })
}

pub trait LinearOracle {
    fn dimension(&self) -> usize;
    fn minimize(&self, c: &OracleQuery) -> Result<OracleAnswer>;
    /// Subproblem solves so far. A product oracle answers one query per block.
    fn calls(&self) -> u64;
}

/// Oracle over a simplex or a product of simplices, owning its descriptor.
#[derive(Debug)]
pub struct PolytopeOracle {
    polytope: PolytopeDescriptor,
    calls: AtomicU64,
}

impl PolytopeOracle {
    pub fn new(polytope: PolytopeDescriptor) -> Result<Self> {
        polytope.validate()?;
        Ok(PolytopeOracle {
            polytope,
            calls: AtomicU64::new(0),
        })
    }

    pub fn blocks(&self) -> usize {
        self.polytope.blocks()
    }
}

impl LinearOracle for PolytopeOracle {
    fn dimension(&self) -> usize {
        self.polytope.dimension()
    }

    fn minimize(&self, c: &OracleQuery) -> Result<OracleAnswer> {
        let answer = match &self.polytope {
            PolytopeDescriptor::Simplex(n) => lmo_simplex(c, *n)?,
            product => lmo_product(c, product)?,
        };
        self.calls.fetch_add(self.polytope.blocks() as u64, Ordering::Relaxed);
        Ok(answer)
    }

    fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[f64]) -> OracleQuery {
        OracleQuery { cost: v.to_vec() }
    }

    #[test]
    fn simplex_examples() {
        assert_eq!(lmo_simplex(&q(&[3.0, 1.0, 2.0]), 3).unwrap().vertex, vec![1]);
        assert_eq!(lmo_simplex(&q(&[5.0, 5.0, 5.0]), 3).unwrap().vertex, vec![0]);
        assert!(lmo_simplex(&q(&[1.0]), 2).is_err());
        assert!(lmo_simplex(&q(&[f64::NAN, 1.0]), 2).is_err());
    }

    #[test]
    fn product_examples() {
        let d = PolytopeDescriptor::Product(vec![2, 2]);
        let ans = lmo_product(&q(&[2.0, 1.0, 0.0, 9.0]), &d).unwrap();
        assert_eq!(
            ans.point(),
            vec![rational::zero(), rational::one(), rational::one(), rational::zero()]
        );
        assert!(ans.is_vertex_of(&d));
        let one = PolytopeDescriptor::Product(vec![3]);
        let c = q(&[4.0, -1.0, -1.0]);
        assert_eq!(lmo_product(&c, &one).unwrap(), lmo_simplex(&c, 3).unwrap());
        assert!(lmo_product(&q(&[1.0; 3]), &d).is_err());
        assert!(lmo_product(&c, &PolytopeDescriptor::Simplex(3)).is_err());
    }

    #[test]
    fn product_oracle_counts_block_queries() {
        let oracle = PolytopeOracle::new(PolytopeDescriptor::Product(vec![2, 3, 1])).unwrap();
        oracle.minimize(&q(&[0.0; 6])).unwrap();
        oracle.minimize(&q(&[0.0; 6])).unwrap();
        assert_eq!(oracle.calls(), 6);
        let oracle = PolytopeOracle::new(PolytopeDescriptor::Simplex(4)).unwrap();
        oracle.minimize(&q(&[0.0; 4])).unwrap();
        assert_eq!(oracle.calls(), 1);
        assert!(oracle.minimize(&q(&[0.0; 3])).is_err());
        assert_eq!(oracle.calls(), 1);
    }
}
