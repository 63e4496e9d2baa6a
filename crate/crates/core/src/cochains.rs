//! Chains and cochains over F₂ on the join complex.
//!
//! Both are dense bit-vectors indexed by face rank. The coboundary is the
//! transpose of the boundary, `δa(σ) = a(∂σ)`, and the norm of a `k`-cochain
//! is its support size divided by the number of `k`-faces.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::join_complex::{ComplexError, JoinComplex};

/// Default cap on `rows × columns` of a coboundary matrix (bits).
pub const DEFAULT_MATRIX_LIMIT: usize = 1 << 28;
/// Default cap on `log₂` of the coset size for exhaustive cofilling.
pub const DEFAULT_COSET_BITS: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CochainError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("a 0-chain has no boundary in the unaugmented complex")]
    ZeroDimensionalBoundary,
    #[error("coboundary of a top-dimensional cochain (k = {k} = d)")]
    TopDimensionalCoboundary { k: usize },
    #[error("length {got} does not match face_count({k}) = {expected}")]
    LengthMismatch { k: usize, expected: usize, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix of {rows} x {cols} exceeds the configured limit of {limit} bits")]
    MatrixTooLarge { rows: usize, cols: usize, limit: usize },
    #[error("cochain is not a coboundary")]
    NotACoboundary,
    #[error("exhaustive coset of 2^{bits} elements exceeds the budget of 2^{budget}")]
    CosetTooLarge { bits: u32, budget: u32 },
    #[error("cofilling requires k >= 1")]
    NoCofillingDimension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Chain {
    k: usize,
    bits: BitVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Cochain {
    k: usize,
    bits: BitVec,
}

macro_rules! f2_common {
    ($t:ident) => {
        impl $t {
            pub fn zero(complex: &JoinComplex, k: usize) -> Result<Self, CochainError> {
                Ok(Self {
                    k,
                    bits: BitVec::zeros(complex.face_count(k)?),
                })
            }

            pub fn from_bits(
                complex: &JoinComplex,
                k: usize,
                bits: BitVec,
            ) -> Result<Self, CochainError> {
                let expected = complex.face_count(k)?;
                if bits.len() != expected {
                    return Err(CochainError::LengthMismatch {
                        k,
                        expected,
                        got: bits.len(),
                    });
                }
                Ok(Self { k, bits })
            }

            pub fn from_faces(
                complex: &JoinComplex,
                k: usize,
                ranks: impl IntoIterator<Item = usize>,
            ) -> Result<Self, CochainError> {
                let len = complex.face_count(k)?;
                let mut bits = BitVec::zeros(len);
                for r in ranks {
                    if r >= len {
                        return Err(ComplexError::RankOutOfRange { k, rank: r, count: len }.into());
                    }
                    bits.flip(r);
                }
                Ok(Self { k, bits })
            }

            pub fn k(&self) -> usize {
                self.k
            }

            pub fn bits(&self) -> &BitVec {
                &self.bits
            }

            pub fn into_bits(self) -> BitVec {
                self.bits
            }

            pub fn is_zero(&self) -> bool {
                self.bits.is_zero()
            }

            pub fn weight(&self) -> usize {
                self.bits.count_ones()
            }

            pub fn add(&self, other: &Self) -> Result<Self, CochainError> {
                if self.k != other.k {
                    return Err(CochainError::DimensionMismatch(self.k, other.k));
                }
                let mut bits = self.bits.clone();
                bits.xor_assign(&other.bits);
                Ok(Self { k: self.k, bits })
            }
        }
    };
}

f2_common!(F2Chain);
f2_common!(F2Cochain);

/// `∂c`: each `k`-face maps to the sum of its `k + 1` facets.
pub fn boundary(complex: &JoinComplex, c: &F2Chain) -> Result<F2Chain, CochainError> {
    if c.k == 0 {
        return Err(CochainError::ZeroDimensionalBoundary);
    }
    let mut out = BitVec::zeros(complex.face_count(c.k - 1)?);
    for r in c.bits.iter_ones() {
        for f in complex.facet_ranks(c.k, r)? {
            out.flip(f);
        }
    }
    Ok(F2Chain { k: c.k - 1, bits: out })
}

/// `δa(σ) = a(∂σ)` for every `(k+1)`-face `σ`.
pub fn coboundary(complex: &JoinComplex, a: &F2Cochain) -> Result<F2Cochain, CochainError> {
    if a.k >= complex.d() {
        return Err(CochainError::TopDimensionalCoboundary { k: a.k });
    }
    let count = complex.face_count(a.k + 1)?;
    let mut out = BitVec::zeros(count);
    for r in 0..count {
        let parity = complex
            .facet_ranks(a.k + 1, r)?
            .into_iter()
            .filter(|&f| a.bits.get(f))
            .count()
            % 2;
        if parity == 1 {
            out.set(r, true);
        }
    }
    Ok(F2Cochain { k: a.k + 1, bits: out })
}

/// Evaluation `⟨a, c⟩ = a(c)` of a cochain on a chain of the same dimension.
pub fn pairing(a: &F2Cochain, c: &F2Chain) -> Result<bool, CochainError> {
    if a.k != c.k {
        return Err(CochainError::DimensionMismatch(a.k, c.k));
    }
    Ok(a.bits.dot(&c.bits))
}

/// `‖a‖ = |supp a| / |X^{=k}|`.
pub fn norm(a: &F2Cochain) -> BigRational {
    if a.bits.is_empty() {
        return BigRational::zero();
    }
    BigRational::new(a.weight().into(), a.bits.len().into())
}

/// Rows of the matrix of `δ^k : C^k → C^{k+1}`, one per `(k+1)`-face.
fn coboundary_rows(
    complex: &JoinComplex,
    k: usize,
    limit: usize,
) -> Result<Vec<BitVec>, CochainError> {
    let cols = complex.face_count(k)?;
    let rows = complex.face_count(k + 1)?;
    if rows.saturating_mul(cols) > limit {
        return Err(CochainError::MatrixTooLarge { rows, cols, limit });
    }
    (0..rows)
        .map(|r| Ok(BitVec::from_indices(cols, complex.facet_ranks(k + 1, r)?)))
        .collect()
}

/// Rank of `δ^k` over F₂ (zero for `k = d`).
pub fn coboundary_rank(complex: &JoinComplex, k: usize, limit: usize) -> Result<usize, CochainError> {
    complex.face_count(k)?;
    if k == complex.d() {
        return Ok(0);
    }
    Ok(crate::bits::rank(&coboundary_rows(complex, k, limit)?))
}

/// Dimension of the reduced cohomology `H̃^k(X; F₂)`.
pub fn cohomology_rank(complex: &JoinComplex, k: usize, limit: usize) -> Result<usize, CochainError> {
    let cochains = complex.face_count(k)?;
    let outgoing = coboundary_rank(complex, k, limit)?;
    // the augmentation F₂ → C⁰ has rank one
    let incoming = if k == 0 {
        1
    } else {
        coboundary_rank(complex, k - 1, limit)?
    };
    Ok(cochains - outgoing - incoming)
}

/// Solution of `δa = b` plus a basis of `ker δ^{k−1}`.
#[derive(Clone, Debug)]
pub struct CofillingSystem {
    pub particular: F2Cochain,
    pub kernel: Vec<BitVec>,
}

/// Solves `δa = b` by elimination on the columns `δ(e_τ)`, tracking the
/// combination that produced each basis vector.
pub fn solve_cofilling(
    complex: &JoinComplex,
    b: &F2Cochain,
    limit: usize,
) -> Result<CofillingSystem, CochainError> {
    if b.k == 0 {
        return Err(CochainError::NoCofillingDimension);
    }
    let k = b.k;
    let rows = coboundary_rows(complex, k - 1, limit)?;
    let n_src = complex.face_count(k - 1)?;
    let n_dst = rows.len();
    // columns of the matrix: δ of each unit (k−1)-cochain
    let mut columns = vec![BitVec::zeros(n_dst); n_src];
    for (r, row) in rows.iter().enumerate() {
        for c in row.iter_ones() {
            columns[c].set(r, true);
        }
    }
    let mut basis: Vec<(usize, BitVec, BitVec)> = Vec::new();
    let mut kernel = Vec::new();
    for (c, col) in columns.into_iter().enumerate() {
        let mut v = col;
        let mut combo = BitVec::singleton(n_src, c);
        for (pivot, bv, bc) in &basis {
            if v.get(*pivot) {
                v.xor_assign(bv);
                combo.xor_assign(bc);
            }
        }
        match v.first_one() {
            None => kernel.push(combo),
            Some(p) => basis.push((p, v, combo)),
        }
    }
    let mut residue = b.bits.clone();
    let mut combo = BitVec::zeros(n_src);
    for (pivot, bv, bc) in &basis {
        if residue.get(*pivot) {
            residue.xor_assign(bv);
            combo.xor_assign(bc);
        }
    }
    if !residue.is_zero() {
        return Err(CochainError::NotACoboundary);
    }
    Ok(CofillingSystem {
        particular: F2Cochain { k: k - 1, bits: combo },
        kernel,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CofillingMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug)]
pub struct CofillingReport {
    pub b: F2Cochain,
    pub a: F2Cochain,
    /// `‖a‖ / ‖b‖`, zero when `b = 0`.
    pub ratio: BigRational,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct CofillingBudget {
    pub matrix_limit: usize,
    pub coset_bits: u32,
}

impl Default for CofillingBudget {
    fn default() -> Self {
        Self {
            matrix_limit: DEFAULT_MATRIX_LIMIT,
            coset_bits: DEFAULT_COSET_BITS,
        }
    }
}

/// Orders supports lexicographically as sorted rank lists.
fn support_cmp(a: &BitVec, b: &BitVec) -> Ordering {
    a.iter_ones().cmp(b.iter_ones())
}

fn better(candidate: &BitVec, cw: usize, best: &BitVec, bw: usize) -> bool {
    cw < bw || (cw == bw && support_cmp(candidate, best) == Ordering::Less)
}

/// Minimum-weight element of `start + span(gens)` by Gray-code enumeration.
fn min_over_coset(start: &BitVec, gens: &[BitVec]) -> BitVec {
    let mut cur = start.clone();
    let mut best = cur.clone();
    let mut best_w = cur.count_ones();
    let total: u64 = 1u64 << gens.len();
    for step in 1..total {
        cur.xor_assign(&gens[step.trailing_zeros() as usize]);
        let w = cur.count_ones();
        if w <= best_w && better(&cur, w, &best, best_w) {
            best = cur.clone();
            best_w = w;
        }
    }
    best
}

fn exhaustive_cofilling(particular: &BitVec, kernel: &[BitVec]) -> BitVec {
    // split the coset on its top generators; each block is searched independently
    const SPLIT: usize = 6;
    if kernel.len() <= 16 {
        return min_over_coset(particular, kernel);
    }
    let split = SPLIT.min(kernel.len());
    let (low, high) = kernel.split_at(kernel.len() - split);
    (0..1u64 << split)
        .into_par_iter()
        .map(|mask| {
            let mut start = particular.clone();
            for (i, g) in high.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    start.xor_assign(g);
                }
            }
            min_over_coset(&start, low)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| {
            let (aw, bw) = (a.count_ones(), b.count_ones());
            if better(&b, bw, &a, aw) {
                b
            } else {
                a
            }
        })
        .expect("at least one block")
}

fn greedy_cofilling(
    complex: &JoinComplex,
    k: usize,
    particular: &BitVec,
    kernel: &[BitVec],
) -> Result<BitVec, CochainError> {
    // local moves: coboundaries of single (k−2)-faces, all in ker δ^{k−1}
    let mut moves: Vec<BitVec> = Vec::new();
    if k >= 2 {
        let n_low = complex.face_count(k - 2)?;
        for r in 0..n_low {
            let unit = F2Cochain::from_faces(complex, k - 2, [r])?;
            moves.push(coboundary(complex, &unit)?.bits);
        }
    }
    moves.extend(kernel.iter().cloned());
    let mut a = particular.clone();
    let mut w = a.count_ones();
    loop {
        let mut improved = false;
        for m in &moves {
            let mut trial = a.clone();
            trial.xor_assign(m);
            let tw = trial.count_ones();
            if tw < w {
                a = trial;
                w = tw;
                improved = true;
            }
        }
        if !improved {
            return Ok(a);
        }
    }
}

/// A cofilling of the coboundary `b`: exact minimum norm, or a greedy local optimum.
pub fn minimal_cofilling(
    complex: &JoinComplex,
    b: &F2Cochain,
    mode: CofillingMode,
    budget: CofillingBudget,
) -> Result<CofillingReport, CochainError> {
    let system = solve_cofilling(complex, b, budget.matrix_limit)?;
    let k = b.k;
    let bits = match mode {
        CofillingMode::Exact => {
            let dim = system.kernel.len() as u32;
            if dim > budget.coset_bits || dim >= 63 {
                return Err(CochainError::CosetTooLarge {
                    bits: dim,
                    budget: budget.coset_bits,
                });
            }
            exhaustive_cofilling(system.particular.bits(), &system.kernel)
        }
        CofillingMode::Greedy => {
            greedy_cofilling(complex, k, system.particular.bits(), &system.kernel)?
        }
    };
    let a = F2Cochain { k: k - 1, bits };
    debug_assert_eq!(coboundary(complex, &a)?.bits, b.bits);
    let ratio = if b.is_zero() {
        BigRational::zero()
    } else {
        norm(&a) / norm(b)
    };
    Ok(CofillingReport {
        b: b.clone(),
        a,
        ratio,
        exact: mode == CofillingMode::Exact,
    })
}

/// `L = |X^{=k}| / |X^{=(k−1)}| · (2^k − 1) / n`, the cofilling constant of the join.
pub fn cofilling_constant(d: usize, n: usize, k: usize) -> Result<BigRational, CochainError> {
    let complex = JoinComplex::new(d, n)?;
    if k == 0 {
        return Err(ComplexError::DimensionOutOfRange { k, d }.into());
    }
    let top = BigInt::from(complex.face_count(k)?);
    let low = BigInt::from(complex.face_count(k - 1)?);
    let mersenne = (BigInt::one() << k) - 1;
    Ok(BigRational::new(top, low) * BigRational::new(mersenne, BigInt::from(n)))
}

/// `1 / ((d+1)! · 2^{d²+1})`, the overlap density constant.
pub fn gromov_bound(d: usize) -> BigRational {
    let factorial: BigInt = (1..=d + 1).map(BigInt::from).product();
    BigRational::new(BigInt::one(), factorial << (d * d + 1))
}

/// JSON record of a cochain: `(d, n, k)` header plus hex-encoded bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainRecord {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub bits: String,
}

impl CochainRecord {
    pub fn new(complex: &JoinComplex, a: &F2Cochain) -> Self {
        Self {
            d: complex.d(),
            n: complex.n(),
            k: a.k,
            bits: a.bits.to_hex(),
        }
    }

    pub fn decode(&self) -> Result<(JoinComplex, F2Cochain), CochainError> {
        let complex = JoinComplex::new(self.d, self.n)?;
        let len = complex.face_count(self.k)?;
        let bits = BitVec::from_hex(&self.bits, len).ok_or(CochainError::LengthMismatch {
            k: self.k,
            expected: len,
            got: self.bits.len() * 4,
        })?;
        let a = F2Cochain::from_bits(&complex, self.k, bits)?;
        Ok((complex, a))
    }
}
