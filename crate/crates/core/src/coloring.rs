//! Two-colorings of the `(d, n)`-graph and the pushed-edge map built from them.
//!
//! The `(d, n)`-graph has the `(d−1)`-faces of the join as edges and its
//! `d`-faces as `(d+1)`-cliques. A coloring is good for `m` when every
//! `(d, m)`-subgraph, i.e. every choice of `m` vertices per part, contains
//! monochromatic cliques of both colors.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::geometry::{ExactPoint, PointConfiguration, Triangle};
use crate::join_complex::{ComplexError, JoinComplex, Vertex};
use crate::pl_map::{MapError, PLMap, Polyline};
use crate::rational::binomial;

/// Default cap on exhaustively enumerated selectors.
pub const DEFAULT_SELECTOR_BUDGET: u64 = 10_000_000;
/// Selectors drawn when the exhaustive budget is exceeded.
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Default cap on `2^{|E|}` for the clique-probability enumeration.
pub const DEFAULT_SUBSET_BUDGET: u64 = 1 << 24;

#[derive(Debug, Error)]
pub enum ColoringError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no good coloring after {0} attempts")]
    RetriesExhausted(usize),
    #[error("colliding edge images: {0:?}")]
    Collision(Vec<(usize, usize)>),
    #[error("malformed coloring record: {0}")]
    Malformed(String),
}

/// `χ` on the ranked `(d−1)`-faces; a set bit means color `−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoColoring {
    pub d: usize,
    pub n: usize,
    pub negative: BitVec,
    pub seed: Option<u64>,
}

impl TwoColoring {
    pub fn random(complex: &JoinComplex, seed: u64) -> Result<Self, ColoringError> {
        let count = complex.face_count(complex.d() - 1)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            d: complex.d(),
            n: complex.n(),
            negative: BitVec::from_indices(count, (0..count).filter(|_| rng.gen::<bool>())),
            seed: Some(seed),
        })
    }

    pub fn constant(complex: &JoinComplex, sign: i8) -> Result<Self, ColoringError> {
        let count = complex.face_count(complex.d() - 1)?;
        Ok(Self {
            d: complex.d(),
            n: complex.n(),
            negative: if sign < 0 { BitVec::ones(count) } else { BitVec::zeros(count) },
            seed: None,
        })
    }

    pub fn color(&self, rank: usize) -> i8 {
        if self.negative.get(rank) {
            -1
        } else {
            1
        }
    }

    fn check(&self, complex: &JoinComplex) -> Result<(), ColoringError> {
        if self.d != complex.d() || self.n != complex.n() {
            return Err(ColoringError::InvalidParameters(format!(
                "coloring for (d, n) = ({}, {}) used on ({}, {})",
                self.d,
                self.n,
                complex.d(),
                complex.n()
            )));
        }
        Ok(())
    }

    /// Color shared by all facets of each top face, or 0 when mixed.
    pub fn clique_colors(&self, complex: &JoinComplex) -> Result<Vec<i8>, ColoringError> {
        self.check(complex)?;
        let d = complex.d();
        (0..complex.face_count(d)?)
            .map(|r| {
                let facets = complex.facet_ranks(d, r)?;
                let first = self.color(facets[0]);
                Ok(if facets.iter().all(|&f| self.color(f) == first) {
                    first
                } else {
                    0
                })
            })
            .collect()
    }
}

/// Signed bit-vector with a `(d, n, seed)` header; `signs` holds `+`/`-` per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringRecord {
    pub d: usize,
    pub n: usize,
    pub seed: Option<u64>,
    pub signs: String,
}

impl From<&TwoColoring> for ColoringRecord {
    fn from(c: &TwoColoring) -> Self {
        Self {
            d: c.d,
            n: c.n,
            seed: c.seed,
            signs: (0..c.negative.len())
                .map(|i| if c.negative.get(i) { '-' } else { '+' })
                .collect(),
        }
    }
}

impl TryFrom<&ColoringRecord> for TwoColoring {
    type Error = ColoringError;

    fn try_from(r: &ColoringRecord) -> Result<Self, ColoringError> {
        let complex = JoinComplex::new(r.d, r.n)?;
        let count = complex.face_count(r.d - 1)?;
        if r.signs.chars().count() != count {
            return Err(ColoringError::Malformed(format!(
                "{} signs for {count} edges",
                r.signs.len()
            )));
        }
        let mut negative = BitVec::zeros(count);
        for (i, ch) in r.signs.chars().enumerate() {
            match ch {
                '+' => {}
                '-' => negative.set(i, true),
                other => return Err(ColoringError::Malformed(format!("unexpected sign {other:?}"))),
            }
        }
        Ok(Self {
            d: r.d,
            n: r.n,
            negative,
            seed: r.seed,
        })
    }
}

/// `m` chosen vertices in every part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DnSubgraphSelector {
    pub sets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    /// Lexicographically smallest failing selector among those checked.
    pub first_failure: Option<DnSubgraphSelector>,
    /// Only a random sample of selectors was checked.
    pub sampled: bool,
    pub checked: u64,
}

struct SelectorSpace {
    combos: Vec<Vec<usize>>,
    parts: usize,
}

impl SelectorSpace {
    fn new(n: usize, m: usize, parts: usize) -> Self {
        Self {
            combos: (0..n).combinations(m).collect(),
            parts,
        }
    }

    fn total(&self) -> Option<u64> {
        (self.combos.len() as u64).checked_pow(self.parts as u32)
    }

    /// Selector number `i` in lexicographic order (part 0 most significant).
    fn get(&self, mut i: u64) -> DnSubgraphSelector {
        let base = self.combos.len() as u64;
        let mut sets = vec![Vec::new(); self.parts];
        for slot in (0..self.parts).rev() {
            sets[slot] = self.combos[(i % base) as usize].clone();
            i /= base;
        }
        DnSubgraphSelector { sets }
    }
}

/// Whether the selector holds cliques of both colors. `colors` is indexed by
/// top-face rank, which is mixed radix in the vertex indices.
fn selector_ok(colors: &[i8], n: usize, sel: &DnSubgraphSelector) -> bool {
    let (mut plus, mut minus) = (false, false);
    for tuple in sel.sets.iter().map(|s| s.iter().copied()).multi_cartesian_product() {
        let rank = tuple.iter().fold(0, |acc, &v| acc * n + v);
        match colors[rank] {
            1 => plus = true,
            -1 => minus = true,
            _ => {}
        }
        if plus && minus {
            return true;
        }
    }
    false
}

/// Checks every `(d, m)`-subgraph when there are at most `budget` of them,
/// otherwise `samples` seeded random ones.
pub fn verify_coloring(
    complex: &JoinComplex,
    coloring: &TwoColoring,
    m: usize,
    budget: u64,
    samples: u64,
    seed: u64,
) -> Result<VerifyReport, ColoringError> {
    let n = complex.n();
    if m == 0 || m > n {
        return Err(ColoringError::InvalidParameters(format!("m = {m} with n = {n}")));
    }
    let colors = coloring.clique_colors(complex)?;
    let space = SelectorSpace::new(n, m, complex.d() + 1);
    match space.total().filter(|&t| t <= budget) {
        Some(total) => {
            let failure = (0..total)
                .into_par_iter()
                .find_first(|&i| !selector_ok(&colors, n, &space.get(i)))
                .map(|i| space.get(i));
            Ok(VerifyReport {
                ok: failure.is_none(),
                first_failure: failure,
                sampled: false,
                checked: total,
            })
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failure: Option<DnSubgraphSelector> = None;
            for _ in 0..samples {
                let sets = (0..complex.d() + 1)
                    .map(|_| {
                        let mut s = rand::seq::index::sample(&mut rng, n, m).into_vec();
                        s.sort_unstable();
                        s
                    })
                    .collect();
                let sel = DnSubgraphSelector { sets };
                if !selector_ok(&colors, n, &sel) && failure.as_ref().is_none_or(|f| &sel < f) {
                    failure = Some(sel);
                }
            }
            Ok(VerifyReport {
                ok: failure.is_none(),
                first_failure: failure,
                sampled: true,
                checked: samples,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub coloring: TwoColoring,
    pub attempts: usize,
    pub report: VerifyReport,
}

/// First random coloring passing [`verify_coloring`] at `m_target`; attempt
/// seeds are drawn from a stream seeded by `seed`.
pub fn search_coloring(
    n: usize,
    d: usize,
    m_target: usize,
    seed: u64,
    max_retries: usize,
    budget: u64,
) -> Result<SearchOutcome, ColoringError> {
    let complex = JoinComplex::new(d, n)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_retries {
        let s: u64 = seeds.gen();
        let coloring = TwoColoring::random(&complex, s)?;
        let report = verify_coloring(&complex, &coloring, m_target, budget, DEFAULT_SAMPLES, s)?;
        if report.ok {
            return Ok(SearchOutcome {
                coloring,
                attempts: attempt,
                report,
            });
        }
    }
    Err(ColoringError::RetriesExhausted(max_retries))
}

/// Smallest `m` at which a coloring verifies, scanning upward.
pub fn minimal_good_m(complex: &JoinComplex, coloring: &TwoColoring, budget: u64) -> Result<Option<usize>, ColoringError> {
    for m in 1..=complex.n() {
        if verify_coloring(complex, coloring, m, budget, DEFAULT_SAMPLES, 0)?.ok {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueProbability {
    pub d: usize,
    pub m: usize,
    pub edges: usize,
    pub cliques: usize,
    /// Exact clique-free fraction, when enumerated.
    #[serde(with = "crate::rational::as_string_opt")]
    pub exact: Option<BigRational>,
    pub estimate: f64,
    /// 95% normal-approximation interval, for sampled runs.
    pub interval: Option<(f64, f64)>,
    pub samples: u64,
    /// `(1 − 2^{−d−1})^{m^d}`.
    #[serde(with = "crate::rational::as_string")]
    pub bound: BigRational,
    pub within_bound: Option<bool>,
    /// Cliques through each edge, when that number is the same for every edge.
    pub cliques_per_edge: Option<usize>,
}

/// Fraction of edge subsets of the complete `(d, m)`-graph that contain no
/// `(d+1)`-clique, by enumeration of all `2^{|E|}` subsets when within
/// `budget`, otherwise estimated from `samples` random subsets.
pub fn clique_probability_oracle(
    m: usize,
    d: usize,
    budget: u64,
    samples: u64,
    seed: u64,
) -> Result<CliqueProbability, ColoringError> {
    let complex = JoinComplex::new(d, m)?;
    let edges = complex.face_count(d - 1)?;
    let cliques: Vec<Vec<usize>> = (0..complex.face_count(d)?)
        .map(|r| complex.facet_ranks(d, r))
        .collect::<Result<_, _>>()?;

    let mut per_edge = vec![0usize; edges];
    for c in &cliques {
        for &e in c {
            per_edge[e] += 1;
        }
    }
    let cliques_per_edge = per_edge.iter().all(|&k| k == per_edge[0]).then(|| per_edge[0]);

    let q = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << (d + 1));
    let bound = Pow::pow(q, (m as u32).pow(d as u32));

    let enumerable = edges < 63 && (1u64 << edges) <= budget;
    if enumerable {
        let masks: Vec<u64> = cliques
            .iter()
            .map(|c| c.iter().fold(0u64, |acc, &e| acc | 1 << e))
            .collect();
        let total = 1u64 << edges;
        let free = (0..total)
            .into_par_iter()
            .filter(|&s| masks.iter().all(|&c| s & c != c))
            .count() as u64;
        let exact = BigRational::new(free.into(), total.into());
        Ok(CliqueProbability {
            d,
            m,
            edges,
            cliques: cliques.len(),
            estimate: free as f64 / total as f64,
            within_bound: Some(exact <= bound),
            exact: Some(exact),
            interval: None,
            samples: total,
            bound,
            cliques_per_edge,
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut free = 0u64;
        for _ in 0..samples {
            let s = BitVec::from_indices(edges, (0..edges).filter(|_| rng.gen::<bool>()));
            if cliques.iter().all(|c| c.iter().any(|&e| !s.get(e))) {
                free += 1;
            }
        }
        let p = free as f64 / samples.max(1) as f64;
        let half = 1.96 * (p * (1.0 - p) / samples.max(1) as f64).sqrt();
        Ok(CliqueProbability {
            d,
            m,
            edges,
            cliques: cliques.len(),
            exact: None,
            estimate: p,
            interval: Some(((p - half).max(0.0), (p + half).min(1.0))),
            samples,
            bound,
            within_bound: None,
            cliques_per_edge,
        })
    }
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut k = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= k).all(|&p| !k.is_multiple_of(p)) {
            primes.push(k);
        }
        k += 1;
    }
    primes
}

/// Placement of the cone apex of a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApexRule {
    /// Above the axis for all-`+1` faces, below for all-`−1`, and on the side
    /// of the majority color otherwise.
    Majority,
    /// Above for all-`+1`, below for all-`−1`, above otherwise.
    AboveUnlessNegative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushedMapParams {
    /// Axis position per vertex id; distinct.
    pub positions: Vec<BigRational>,
    /// Tent height per edge rank; distinct and positive.
    pub heights: Vec<BigRational>,
    pub apex_rule: ApexRule,
}

impl PushedMapParams {
    /// Positions `id + δ_id` with small seeded rational jitter, heights
    /// `scale · p_e` for the `e`-th prime.
    pub fn standard(complex: &JoinComplex, seed: u64, scale: &BigRational) -> Result<Self, ColoringError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..complex.vertex_count())
            .map(|i| {
                let jitter = BigRational::new(rng.gen_range(1..=97i64).into(), 293.into());
                BigRational::from_integer((i as i64).into()) + jitter
            })
            .collect();
        let heights = first_primes(complex.face_count(1)?)
            .into_iter()
            .map(|p| BigRational::from_integer(p.into()) * scale)
            .collect();
        Ok(Self {
            positions,
            heights,
            apex_rule: ApexRule::Majority,
        })
    }
}

fn axis_point(x: &BigRational) -> ExactPoint {
    ExactPoint::new(x.clone(), BigRational::zero())
}

/// Pushes each edge into a tent `(x_u, 0) → (mid, χ·h) → (x_v, 0)` and fills
/// each triangle by the cone over its three tents from an apex off the axis.
pub fn build_pushed_map(coloring: &TwoColoring, params: &PushedMapParams) -> Result<PLMap, ColoringError> {
    if coloring.d != 2 {
        return Err(ColoringError::InvalidParameters(format!(
            "pushed maps need d = 2, got {}",
            coloring.d
        )));
    }
    let complex = JoinComplex::new(2, coloring.n)?;
    let edge_count = complex.face_count(1)?;
    if params.positions.len() != complex.vertex_count() || params.heights.len() != edge_count {
        return Err(ColoringError::InvalidParameters(format!(
            "{} positions and {} heights for {} vertices and {edge_count} edges",
            params.positions.len(),
            params.heights.len(),
            complex.vertex_count()
        )));
    }
    if params.positions.iter().duplicates().next().is_some() {
        return Err(ColoringError::InvalidParameters("axis positions are not distinct".into()));
    }
    if params.heights.iter().any(|h| !h.is_positive()) {
        return Err(ColoringError::InvalidParameters("heights must be positive".into()));
    }
    let mut collisions: Vec<(usize, usize)> = Vec::new();
    {
        let mut by_height: Vec<(usize, &BigRational)> = params.heights.iter().enumerate().collect();
        by_height.sort_by(|a, b| a.1.cmp(b.1));
        for w in by_height.windows(2) {
            if w[0].1 == w[1].1 {
                collisions.push((w[0].0.min(w[1].0), w[0].0.max(w[1].0)));
            }
        }
    }
    if !collisions.is_empty() {
        collisions.sort();
        return Err(ColoringError::Collision(collisions));
    }

    let two = BigRational::from_integer(2.into());
    let vertices: Vec<ExactPoint> = params.positions.iter().map(axis_point).collect();
    let tops: Vec<ExactPoint> = (0..edge_count)
        .map(|r| {
            let e = complex.unrank_face(1, r)?;
            let (u, v) = (e.vertices()[0], e.vertices()[1]);
            let mid = (&params.positions[complex.vertex_id(u)] + &params.positions[complex.vertex_id(v)]) / &two;
            let h = &params.heights[r] * BigRational::from_integer(coloring.color(r).into());
            Ok(ExactPoint::new(mid, h))
        })
        .collect::<Result<_, ColoringError>>()?;

    // tents sharing a vertex must leave it in different directions
    for v in 0..complex.vertex_count() {
        let vert = complex.vertex_from_id(v);
        let through: Vec<usize> = (0..edge_count)
            .filter(|&r| complex.unrank_face(1, r).map(|e| e.contains(vert)).unwrap_or(false))
            .collect();
        for (i, &a) in through.iter().enumerate() {
            for &b in &through[i + 1..] {
                let p = &vertices[v];
                if crate::geometry::orientation(p, &tops[a], &tops[b]) == crate::geometry::Orientation::Collinear {
                    collisions.push((a, b));
                }
            }
        }
    }
    if !collisions.is_empty() {
        collisions.sort();
        return Err(ColoringError::Collision(collisions));
    }

    let edges: Vec<Polyline> = (0..edge_count)
        .map(|r| {
            let e = complex.unrank_face(1, r)?;
            let a = vertices[complex.vertex_id(e.vertices()[0])].clone();
            let b = vertices[complex.vertex_id(e.vertices()[1])].clone();
            Ok(Polyline::new(vec![a, tops[r].clone(), b])?)
        })
        .collect::<Result<_, ColoringError>>()?;

    let max_h = params.heights.iter().max().cloned().unwrap_or_else(BigRational::one);
    let face_count = complex.face_count(2)?;
    let mut faces = Vec::with_capacity(face_count);
    for r in 0..face_count {
        let facets = complex.facet_ranks(2, r)?;
        let colors: Vec<i8> = facets.iter().map(|&e| coloring.color(e)).collect();
        let plus = colors.iter().filter(|&&c| c > 0).count();
        let side: i64 = match (plus, params.apex_rule) {
            (3, _) => 1,
            (0, _) => -1,
            (_, ApexRule::AboveUnlessNegative) => 1,
            (2, ApexRule::Majority) => 1,
            _ => -1,
        };
        // distinct apex heights per face, above every tent top
        let level = &max_h + BigRational::one() + BigRational::new((r as i64 + 1).into(), (face_count as i64 + 1).into());
        let y = level * BigRational::from_integer(side.into());
        let face = complex.unrank_face(2, r)?;
        let xs: Vec<&BigRational> = face
            .vertices()
            .iter()
            .map(|v| &params.positions[complex.vertex_id(*v)])
            .collect();
        let base_x = (xs[0] + xs[1] + xs[2]) / BigRational::from_integer(3.into());
        let segments: Vec<(ExactPoint, ExactPoint)> = facets
            .iter()
            .flat_map(|&e| {
                let pts = edges[e].points().to_vec();
                pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect::<Vec<_>>()
            })
            .collect();
        let mut k = 0i64;
        let triangles = loop {
            let x = &base_x + BigRational::new(k.into(), (7 * (k.abs() + 1) + 3).into());
            let apex = ExactPoint::new(x, y.clone());
            let ts: Vec<Triangle> = segments
                .iter()
                .map(|(a, b)| Triangle::new(apex.clone(), a.clone(), b.clone()))
                .collect();
            if ts.iter().all(|t| !t.is_degenerate()) {
                break ts;
            }
            k = if k <= 0 { -k + 1 } else { -k };
        };
        faces.push(triangles);
    }
    Ok(PLMap::new(
        coloring.n,
        PointConfiguration::new(vertices),
        edges,
        faces,
    )?)
}

/// Vertices whose image is `p`: the lower-dimensional faces through a point
/// of the axis.
pub fn q_set(map: &PLMap, p: &ExactPoint) -> Vec<Vertex> {
    let complex = map.complex();
    map.vertices
        .points
        .iter()
        .enumerate()
        .filter(|(_, q)| *q == p)
        .map(|(i, _)| complex.vertex_from_id(i))
        .collect()
}

/// Faces with odd parity at `p` whose boundary is monochromatic of the color
/// opposite to `sign(p_y)`; empty whenever the sign law holds.
pub fn sign_law_violations(
    map: &PLMap,
    coloring: &TwoColoring,
    p: &ExactPoint,
) -> Result<Vec<usize>, ColoringError> {
    let complex = map.complex();
    let colors = coloring.clique_colors(complex)?;
    let sign: i8 = if p.y.is_positive() {
        1
    } else if p.y.is_negative() {
        -1
    } else {
        return Err(ColoringError::InvalidParameters(format!("{p} lies on the axis")));
    };
    let mut bad = Vec::new();
    for (r, &c) in colors.iter().enumerate() {
        if c != 0 && c != sign && crate::pl_map::point_face_parity(map, r, p)? {
            bad.push(r);
        }
    }
    Ok(bad)
}

/// `C(n, m)^{d+1}`, the number of `(d, m)`-subgraphs.
pub fn selector_count(n: u64, m: u64, d: u32) -> BigInt {
    Pow::pow(binomial(n, m), d + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl_map::{point_face_parity, validate_map};
    use crate::rational::rat;

    /// Direct enumeration: nested loops over subsets and d-faces.
    fn direct_verify(complex: &JoinComplex, coloring: &TwoColoring, m: usize) -> bool {
        let n = complex.n();
        let subsets: Vec<Vec<usize>> = (0..n).combinations(m).collect();
        for a in &subsets {
            for b in &subsets {
                for c in &subsets {
                    let mut seen = [false, false];
                    for &x in a {
                        for &y in b {
                            for &z in c {
                                let e01 = complex
                                    .rank_face(&crate::Face::new(vec![Vertex::new(0, x), Vertex::new(1, y)]).unwrap())
                                    .unwrap();
                                let e02 = complex
                                    .rank_face(&crate::Face::new(vec![Vertex::new(0, x), Vertex::new(2, z)]).unwrap())
                                    .unwrap();
                                let e12 = complex
                                    .rank_face(&crate::Face::new(vec![Vertex::new(1, y), Vertex::new(2, z)]).unwrap())
                                    .unwrap();
                                let cs = [coloring.color(e01), coloring.color(e02), coloring.color(e12)];
                                if cs.iter().all(|&k| k == 1) {
                                    seen[0] = true;
                                }
                                if cs.iter().all(|&k| k == -1) {
                                    seen[1] = true;
                                }
                            }
                        }
                    }
                    if !(seen[0] && seen[1]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn constant_coloring_fails() {
        let complex = JoinComplex::new(2, 4).unwrap();
        let c = TwoColoring::constant(&complex, 1).unwrap();
        for m in 1..=4 {
            let r = verify_coloring(&complex, &c, m, DEFAULT_SELECTOR_BUDGET, 10, 0).unwrap();
            assert!(!r.ok);
            assert_eq!(r.first_failure.unwrap().sets, vec![(0..m).collect::<Vec<_>>(); 3]);
        }
    }

    #[test]
    fn whole_graph_is_one_selector() {
        let complex = JoinComplex::new(2, 3).unwrap();
        let c = TwoColoring::random(&complex, 5).unwrap();
        let r = verify_coloring(&complex, &c, 3, DEFAULT_SELECTOR_BUDGET, 10, 0).unwrap();
        assert_eq!(r.checked, 1);
    }

    #[test]
    fn verifier_agrees_with_direct_enumeration() {
        let complex = JoinComplex::new(2, 6).unwrap();
        for seed in 0..4 {
            let c = TwoColoring::random(&complex, seed).unwrap();
            let r = verify_coloring(&complex, &c, 3, DEFAULT_SELECTOR_BUDGET, 10, 0).unwrap();
            assert_eq!(r.checked, 8000);
            assert_eq!(r.ok, direct_verify(&complex, &c, 3), "seed {seed}");
        }
    }

    #[test]
    fn monotone_in_m() {
        let complex = JoinComplex::new(2, 5).unwrap();
        for seed in 0..6 {
            let c = TwoColoring::random(&complex, seed).unwrap();
            let oks: Vec<bool> = (1..=5)
                .map(|m| verify_coloring(&complex, &c, m, DEFAULT_SELECTOR_BUDGET, 10, 0).unwrap().ok)
                .collect();
            for w in oks.windows(2) {
                assert!(!w[0] || w[1], "seed {seed}: {oks:?}");
            }
        }
    }

    #[test]
    fn search_examples() {
        let found = search_coloring(4, 2, 4, 1, 200, DEFAULT_SELECTOR_BUDGET).unwrap();
        assert!(found.report.ok);
        assert_eq!(found, search_coloring(4, 2, 4, 1, 200, DEFAULT_SELECTOR_BUDGET).unwrap());
        assert!(matches!(
            search_coloring(4, 2, 1, 1, 20, DEFAULT_SELECTOR_BUDGET),
            Err(ColoringError::RetriesExhausted(20))
        ));
    }

    #[test]
    fn sampled_fallback() {
        let complex = JoinComplex::new(2, 6).unwrap();
        let c = TwoColoring::constant(&complex, -1).unwrap();
        let r = verify_coloring(&complex, &c, 3, 100, 50, 3).unwrap();
        assert!(r.sampled && !r.ok && r.checked == 50);
    }

    #[test]
    fn clique_probability_small_cases() {
        let one = clique_probability_oracle(1, 2, DEFAULT_SUBSET_BUDGET, 0, 0).unwrap();
        assert_eq!(one.exact, Some(rat(7, 8)));
        assert_eq!(one.edges, 3);
        let two = clique_probability_oracle(2, 2, DEFAULT_SUBSET_BUDGET, 0, 0).unwrap();
        assert_eq!(two.edges, 12);
        assert_eq!(two.samples, 4096);
        assert_eq!(two.within_bound, Some(true));
        assert_eq!(two.cliques_per_edge, Some(2));
        let sampled = clique_probability_oracle(3, 2, 1 << 10, 2000, 1).unwrap();
        assert!(sampled.exact.is_none() && sampled.interval.is_some());
    }

    #[test]
    fn record_round_trip() {
        let complex = JoinComplex::new(2, 3).unwrap();
        let c = TwoColoring::random(&complex, 9).unwrap();
        let rec = ColoringRecord::from(&c);
        assert_eq!(rec.signs.len(), 27);
        assert_eq!(TwoColoring::try_from(&rec).unwrap(), c);
    }

    fn pushed(n: usize, seed: u64) -> (TwoColoring, PLMap) {
        let complex = JoinComplex::new(2, n).unwrap();
        let coloring = TwoColoring::random(&complex, seed).unwrap();
        let params = PushedMapParams::standard(&complex, seed, &rat(1, 4)).unwrap();
        (coloring.clone(), build_pushed_map(&coloring, &params).unwrap())
    }

    #[test]
    fn pushed_map_is_valid() {
        let (_, map) = pushed(3, 2);
        let report = validate_map(&map).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn monochromatic_faces_stay_off_axis() {
        let (coloring, map) = pushed(3, 4);
        let colors = coloring.clique_colors(map.complex()).unwrap();
        for (r, &c) in colors.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for t in &map.faces[r] {
                for q in [&t.a, &t.b, &t.c] {
                    let y = &q.y * BigRational::from_integer(c.into());
                    assert!(!y.is_negative());
                    if y.is_zero() {
                        assert!(map.vertices.points.contains(q));
                    }
                }
            }
        }
    }

    #[test]
    fn sign_law_on_random_points() {
        let (coloring, map) = pushed(3, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut tested = 0;
        while tested < 30 {
            let p = ExactPoint::new(
                BigRational::new(rng.gen_range(-100..1000i64).into(), 97.into()),
                BigRational::new(rng.gen_range(-4000..4000i64).into(), 89.into()),
            );
            if p.y.is_zero() {
                continue;
            }
            if (0..map.faces.len()).any(|r| point_face_parity(&map, r, &p).is_err()) {
                continue;
            }
            assert!(sign_law_violations(&map, &coloring, &p).unwrap().is_empty());
            tested += 1;
        }
    }

    #[test]
    fn q_sets() {
        let (_, map) = pushed(3, 1);
        assert!(q_set(&map, &ExactPoint::new(rat(-1, 3), BigRational::zero())).is_empty());
        for (i, p) in map.vertices.points.iter().enumerate() {
            let q = q_set(&map, p);
            assert_eq!(q, vec![map.complex().vertex_from_id(i)]);
        }
    }

    #[test]
    fn colliding_heights_rejected() {
        let complex = JoinComplex::new(2, 2).unwrap();
        let coloring = TwoColoring::random(&complex, 0).unwrap();
        let mut params = PushedMapParams::standard(&complex, 0, &rat(1, 1)).unwrap();
        params.heights[5] = params.heights[2].clone();
        assert!(matches!(
            build_pushed_map(&coloring, &params),
            Err(ColoringError::Collision(v)) if v == vec![(2, 5)]
        ));
    }
}
