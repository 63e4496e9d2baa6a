//! The join complex `V₀ ∗ V₁ ∗ ⋯ ∗ V_d` of `d + 1` discrete parts of size `n`.
//!
//! A face is a set of vertices with at most one vertex per part. Faces of each
//! dimension are ranked lexicographically: first by the (sorted) set of parts
//! they meet, then by the within-part indices read as a base-`n` number. The
//! ranking is fixed so that cochain bit positions are stable across runs.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("dimension {k} out of range 0..={d}")]
    DimensionOutOfRange { k: usize, d: usize },
    #[error("invalid face: {0}")]
    InvalidFace(String),
    #[error("rank {rank} out of range for {count} faces of dimension {k}")]
    RankOutOfRange { k: usize, rank: usize, count: usize },
    #[error("face of dimension {dim} is not top-dimensional (d = {d})")]
    NotTopDimensional { dim: usize, d: usize },
    #[error("invalid complex parameters d = {d}, n = {n}")]
    InvalidParameters { d: usize, n: usize },
}

/// A vertex `index ∈ [0, n)` of part `part ∈ [0, d]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub part: usize,
    pub index: usize,
}

impl Vertex {
    pub fn new(part: usize, index: usize) -> Self {
        Self { part, index }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.part, self.index)
    }
}

/// A face of the join complex; vertices sorted by strictly increasing part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Face {
    vertices: Vec<Vertex>,
}

impl Face {
    /// Builds a face, sorting by part. Fails on repeated parts or an empty list.
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::InvalidFace("empty vertex list".into()));
        }
        vertices.sort();
        if vertices.windows(2).any(|w| w[0].part == w[1].part) {
            return Err(ComplexError::InvalidFace(format!(
                "two vertices in one part: {vertices:?}"
            )));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn parts(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(|v| v.part)
    }

    pub fn vertex_in_part(&self, part: usize) -> Option<Vertex> {
        self.vertices.iter().copied().find(|v| v.part == part)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn meets(&self, other: &Face) -> bool {
        self.vertices.iter().any(|v| other.contains(*v))
    }

    /// The facets of this face (all faces with one vertex removed), in vertex order.
    pub fn facets(&self) -> Vec<Face> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|skip| Face {
                vertices: self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, v)| *v)
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vertices.iter().join(","))
    }
}

/// `X = V₀ ∗ ⋯ ∗ V_d` with `|V_i| = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinComplex {
    d: usize,
    n: usize,
    /// `part_sets[k]`: the (k+1)-subsets of parts in lexicographic order.
    part_sets: Vec<Vec<Vec<usize>>>,
    /// `n^j` for `j = 0..=d+1`.
    powers: Vec<usize>,
}

impl JoinComplex {
    pub fn new(d: usize, n: usize) -> Result<Self, ComplexError> {
        if d == 0 || n == 0 {
            return Err(ComplexError::InvalidParameters { d, n });
        }
        let mut powers = vec![1usize];
        for _ in 0..=d {
            let next = powers
                .last()
                .and_then(|p| p.checked_mul(n))
                .ok_or(ComplexError::InvalidParameters { d, n })?;
            powers.push(next);
        }
        let part_sets = (0..=d)
            .map(|k| (0..=d).combinations(k + 1).collect())
            .collect();
        Ok(Self {
            d,
            n,
            part_sets,
            powers,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        (self.d + 1) * self.n
    }

    /// Global id of a vertex; equals its rank among 0-faces.
    pub fn vertex_id(&self, v: Vertex) -> usize {
        v.part * self.n + v.index
    }

    pub fn vertex_from_id(&self, id: usize) -> Vertex {
        Vertex::new(id / self.n, id % self.n)
    }

    fn check_dim(&self, k: usize) -> Result<(), ComplexError> {
        if k > self.d {
            Err(ComplexError::DimensionOutOfRange { k, d: self.d })
        } else {
            Ok(())
        }
    }

    /// `C(d+1, k+1) · n^{k+1}`.
    pub fn face_count(&self, k: usize) -> Result<usize, ComplexError> {
        self.check_dim(k)?;
        Ok(self.part_sets[k].len() * self.powers[k + 1])
    }

    pub fn validate_face(&self, face: &Face) -> Result<(), ComplexError> {
        let dim = face.dim();
        self.check_dim(dim)?;
        for v in face.vertices() {
            if v.part > self.d || v.index >= self.n {
                return Err(ComplexError::InvalidFace(format!(
                    "vertex {v} outside complex (d = {}, n = {})",
                    self.d, self.n
                )));
            }
        }
        Ok(())
    }

    pub fn rank_face(&self, face: &Face) -> Result<usize, ComplexError> {
        self.validate_face(face)?;
        let k = face.dim();
        let parts: Vec<usize> = face.parts().collect();
        let ps = self.part_sets[k]
            .binary_search(&parts)
            .expect("every strictly increasing part list is enumerated");
        let within = face
            .vertices()
            .iter()
            .fold(0usize, |acc, v| acc * self.n + v.index);
        Ok(ps * self.powers[k + 1] + within)
    }

    pub fn unrank_face(&self, k: usize, rank: usize) -> Result<Face, ComplexError> {
        let count = self.face_count(k)?;
        if rank >= count {
            return Err(ComplexError::RankOutOfRange { k, rank, count });
        }
        let block = self.powers[k + 1];
        let parts = &self.part_sets[k][rank / block];
        let mut within = rank % block;
        let mut vertices = vec![Vertex::new(0, 0); k + 1];
        for (slot, &part) in parts.iter().enumerate().rev() {
            vertices[slot] = Vertex::new(part, within % self.n);
            within /= self.n;
        }
        Ok(Face { vertices })
    }

    /// All k-faces in rank order.
    pub fn faces(&self, k: usize) -> Result<impl Iterator<Item = Face> + '_, ComplexError> {
        let count = self.face_count(k)?;
        Ok((0..count).map(move |r| self.unrank_face(k, r).expect("rank in range")))
    }

    /// The facet of a top-dimensional face that misses part `part`.
    pub fn opposite_face(&self, sigma: &Face, part: usize) -> Result<Face, ComplexError> {
        self.validate_face(sigma)?;
        if sigma.dim() != self.d {
            return Err(ComplexError::NotTopDimensional {
                dim: sigma.dim(),
                d: self.d,
            });
        }
        if part > self.d {
            return Err(ComplexError::InvalidFace(format!(
                "part {part} out of range 0..={}",
                self.d
            )));
        }
        Ok(Face {
            vertices: sigma
                .vertices()
                .iter()
                .copied()
                .filter(|v| v.part != part)
                .collect(),
        })
    }

    /// Ranks of the facets of the ranked `k`-face, ordered by the missing part.
    pub fn facet_ranks(&self, k: usize, rank: usize) -> Result<Vec<usize>, ComplexError> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let face = self.unrank_face(k, rank)?;
        face.facets()
            .iter()
            .map(|f| self.rank_face(f))
            .collect()
    }

    /// Maximum over faces `τ` and dimensions `k` of the fraction of `k`-faces
    /// that share a vertex with `τ`.
    ///
    /// The count only depends on how many vertices `τ` has, and the number of
    /// `k`-faces avoiding `j` fixed vertices in distinct parts is
    /// `Σ_S (n−1)^{|S∩T|} n^{|S∖T|}` over part sets `S`.
    pub fn sparsity(&self) -> BigRational {
        let mut best = BigRational::from_integer(0.into());
        for j in 1..=self.d + 1 {
            for k in 0..=self.d {
                let total = BigInt::from(self.face_count(k).expect("k in range"));
                let mut avoiding = BigInt::from(0);
                for s in &self.part_sets[k] {
                    // τ occupies parts 0..j (any j parts give the same count)
                    let hit = s.iter().filter(|&&p| p < j).count() as u32;
                    let miss = s.len() as u32 - hit;
                    avoiding += BigInt::from(self.n - 1).pow(hit) * BigInt::from(self.n).pow(miss);
                }
                let frac = BigRational::new(&total - avoiding, total);
                if frac > best {
                    best = frac;
                }
            }
        }
        best
    }
}
