//! Random hard packing instances and their metadata.
//!
//! A generated instance has an `m x n` matrix with `n = round(sqrt(m))` and
//! i.i.d. Bernoulli(`1/rho`) entries, the simplex as its polytope and the
//! constant right-hand side `b = V(A) * 1`, the smallest constant for which
//! `A x <= b` has a solution on the simplex.

mod io;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use io::{read_instance, write_instance};

use crate::error::{Error, Result};
use crate::game_value::{value_approx, value_exact, GameMatrix, ValueCertificate, EXACT_SIZE_GUARD};
use crate::rational::{self, Rational};
use crate::rng::{Bernoulli, SeededRng, GENERATOR_VERSION};

/// Seed bumps tolerated while rejecting zero-value matrices.
const MAX_SEED_BUMPS: u32 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeDescriptor {
    Simplex(usize),
    /// Cross product of simplices of the given dimensions.
    Product(Vec<usize>),
}

impl PolytopeDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            PolytopeDescriptor::Simplex(0) => Err(Error::InvalidInput("simplex of dimension 0".into())),
            PolytopeDescriptor::Simplex(_) => Ok(()),
            PolytopeDescriptor::Product(dims) if dims.is_empty() => {
                Err(Error::InvalidInput("product polytope with no blocks".into()))
            }
            PolytopeDescriptor::Product(dims) if dims.contains(&0) => {
                Err(Error::InvalidInput("product block of dimension 0".into()))
            }
            PolytopeDescriptor::Product(_) => Ok(()),
        }
    }

    pub fn dimension(&self) -> usize {
        self.block_dims().iter().sum()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        match self {
            PolytopeDescriptor::Simplex(n) => vec![*n],
            PolytopeDescriptor::Product(dims) => dims.clone(),
        }
    }

    /// `(start, len)` of every block in coordinate order.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        let mut start = 0;
        self.block_dims()
            .into_iter()
            .map(|d| {
                let r = (start, d);
                start += d;
                r
            })
            .collect()
    }

    pub fn blocks(&self) -> usize {
        match self {
            PolytopeDescriptor::Simplex(_) => 1,
            PolytopeDescriptor::Product(dims) => dims.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    /// Seed that produced the matrix (after any rejection bumps).
    pub seed: u64,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    pub seed_bumps: u32,
    #[serde(with = "rational::serde_str")]
    pub p: Rational,
    #[serde(with = "rational::serde_str")]
    pub rho_target: Rational,
    pub generator_version: String,
    /// Seeds of the blocks, for block-diagonal instances.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub block_seeds: Vec<u64>,
    /// Present when `b` came from an approximate value certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_certificate: Option<ValueCertificate>,
}

fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

/// One fractional packing problem: find `x` in the polytope with `A x <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingInstance {
    pub a: GameMatrix,
    pub b: Vec<Rational>,
    pub polytope: PolytopeDescriptor,
    pub meta: Option<InstanceMeta>,
}

impl PackingInstance {
    pub fn new(a: GameMatrix, b: Vec<Rational>, polytope: PolytopeDescriptor, meta: Option<InstanceMeta>) -> Result<Self> {
        polytope.validate()?;
        if b.len() != a.rows() {
            return Err(Error::InvalidInput(format!(
                "b has {} entries but A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        if polytope.dimension() != a.cols() {
            return Err(Error::InvalidInput(format!(
                "polytope dimension {} does not match {} columns",
                polytope.dimension(),
                a.cols()
            )));
        }
        if let Some(i) = b.iter().position(|v| !v.is_positive()) {
            return Err(Error::InvalidInput(format!("b[{i}] = {} is not positive", b[i])));
        }
        Ok(PackingInstance { a, b, polytope, meta })
    }

    /// Hand-built instance over the simplex.
    pub fn simplex(a: GameMatrix, b: Vec<Rational>) -> Result<Self> {
        let n = a.cols();
        PackingInstance::new(a, b, PolytopeDescriptor::Simplex(n), None)
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }
}

/// How the right-hand side of a generated instance is computed.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueMode {
    Exact,
    /// `b` is the upper end of an approximate certificate with this tolerance.
    Approx { tol: Rational },
}

/// `rows x cols` matrix of i.i.d. Bernoulli(`p`) entries, filled row-major.
pub fn bernoulli_matrix(rows: usize, cols: usize, p: &Rational, seed: u64) -> Result<GameMatrix> {
    if p.is_negative() || *p > rational::one() {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = SeededRng::new(seed);
    let coin = Bernoulli::new(p);
    let bits: Vec<bool> = (0..rows * cols).map(|_| coin.draw(&mut rng)).collect();
    GameMatrix::from_bits(rows, cols, &bits)
}

/// Number of columns for an `m`-row hard instance.
pub fn columns_for(m: usize) -> usize {
    ((m as f64).sqrt().round() as usize).max(1)
}

pub fn generate_hard_instance(m: usize, rho: &Rational, seed: u64) -> Result<PackingInstance> {
    generate_hard_instance_with(m, rho, seed, &ValueMode::Exact)
}

pub fn generate_hard_instance_with(m: usize, rho: &Rational, seed: u64, mode: &ValueMode) -> Result<PackingInstance> {
    if *rho <= rational::from_int(2) {
        return Err(Error::InvalidParameter(format!("rho must exceed 2, got {rho}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let n = columns_for(m);
    if *mode == ValueMode::Exact && m.saturating_mul(n) > EXACT_SIZE_GUARD {
        return Err(Error::ResourceLimit(format!(
            "{m}x{n} instance exceeds the exact-value guard of {EXACT_SIZE_GUARD} entries; generate with an approximate value mode and an explicit tolerance"
        )));
    }
    let p = rho.recip();

    let mut effective = seed;
    for bumps in 0..=MAX_SEED_BUMPS {
        let a = bernoulli_matrix(m, n, &p, effective)?;
        let (v, certificate) = match mode {
            ValueMode::Exact => (value_exact(&a)?.upper, None),
            ValueMode::Approx { tol } => {
                let c = value_approx(&a, tol)?;
                (c.upper.clone(), Some(c))
            }
        };
        // A zero value (some all-zero column) leaves b = 0 and the width undefined.
        if v.is_zero() {
            effective = effective.wrapping_add(1);
            continue;
        }
        let meta = InstanceMeta {
            seed: effective,
            seed_bumps: bumps,
            p: p.clone(),
            rho_target: rho.clone(),
            generator_version: GENERATOR_VERSION.to_string(),
            block_seeds: Vec::new(),
            value_certificate: certificate,
        };
        return PackingInstance::new(a, vec![v; m], PolytopeDescriptor::Simplex(n), Some(meta));
    }
    Err(Error::ResourceLimit(format!(
        "no positive-value matrix after {MAX_SEED_BUMPS} seed bumps from {seed}"
    )))
}

/// `max over P of max_i A_i x / b_i`, attained at a vertex of P.
pub fn width(inst: &PackingInstance) -> Result<Rational> {
    if let Some(i) = inst.b.iter().position(|v| !v.is_positive()) {
        return Err(Error::UndefinedWidth(format!("b[{i}] = {} is not positive", inst.b[i])));
    }
    let ranges = inst.polytope.block_ranges();
    let mut best = Rational::zero();
    for i in 0..inst.rows() {
        let row = inst.a.row(i);
        let load: Rational = ranges
            .iter()
            .map(|&(s, len)| row[s..s + len].iter().max().expect("nonempty block").clone())
            .sum();
        let ratio = load / &inst.b[i];
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Block-diagonal combination of simplex instances over the product polytope.
pub fn make_block_instance(blocks: &[PackingInstance]) -> Result<PackingInstance> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("no blocks".into()));
    }
    if blocks
        .iter()
        .any(|b| !matches!(b.polytope, PolytopeDescriptor::Simplex(_)))
    {
        return Err(Error::InvalidInput("every block must be a simplex instance".into()));
    }
    let m: usize = blocks.iter().map(PackingInstance::rows).sum();
    let n: usize = blocks.iter().map(PackingInstance::cols).sum();
    let mut entries = vec![Rational::zero(); m * n];
    let (mut r0, mut c0) = (0, 0);
    for blk in blocks {
        for i in 0..blk.rows() {
            for (j, v) in blk.a.row(i).iter().enumerate() {
                entries[(r0 + i) * n + c0 + j] = v.clone();
            }
        }
        r0 += blk.rows();
        c0 += blk.cols();
    }
    let a = GameMatrix::new(m, n, entries)?;
    let b = blocks.iter().flat_map(|blk| blk.b.iter().cloned()).collect();
    let dims = blocks.iter().map(PackingInstance::cols).collect();

    let meta = match blocks.iter().map(|b| b.meta.as_ref()).collect::<Option<Vec<_>>>() {
        Some(metas) => {
            let mut meta = metas[0].clone();
            meta.block_seeds = metas.iter().map(|m| m.seed).collect();
            meta.value_certificate = None;
            Some(meta)
        }
        None => None,
    };
    PackingInstance::new(a, b, PolytopeDescriptor::Product(dims), meta)
}
