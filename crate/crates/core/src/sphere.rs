//! Random inverted fillings of the 2-sphere and exact Pach-family search.
//!
//! The sphere is the plane plus a point at infinity. Each triangle of the
//! join is filled either by its affine image (bit 0) or by the complement of
//! that image (bit 1), which is the filling through infinity.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::bounds::pach_threshold_sphere;
use crate::extraction::{max_complete_box, ExtractionError, PartiteHypergraph};
use crate::geometry::{
    candidate_points, point_in_triangle, random_generic_points, CandidateSet, ExactPoint, GeometryError,
    Location, PointConfiguration, Segment, SegmentArrangement, Triangle,
};
use crate::join_complex::{ComplexError, Face, JoinComplex, Vertex};
use crate::rational::format_rational;

/// Node budget for the branch-and-bound box search.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error)]
pub enum SphereError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
    #[error("the geometric construction needs d = 2, got d = {0}")]
    UnsupportedDimension(usize),
    #[error("configuration has {got} points, complex has {want} vertices")]
    ConfigMismatch { got: usize, want: usize },
    #[error("filling has {got} bits, complex has {want} top faces")]
    FillingMismatch { got: usize, want: usize },
    #[error("point {p} lies on the boundary of face {face}")]
    NonGeneric { p: Box<ExactPoint>, face: String },
    #[error("witness failed re-verification: {0}")]
    WitnessRejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filling {
    /// Bit per ranked top face; 1 means inverted.
    pub bits: BitVec,
    pub seed: Option<u64>,
}

/// Unbiased inversion bits drawn in rank order from a ChaCha8 stream.
pub fn random_filling(complex: &JoinComplex, seed: u64) -> Result<Filling, SphereError> {
    let count = complex.face_count(complex.d())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = BitVec::from_indices(count, (0..count).filter(|_| rng.gen::<bool>()));
    Ok(Filling {
        bits,
        seed: Some(seed),
    })
}

/// Every face filled by its affine image.
pub fn standard_filling(complex: &JoinComplex) -> Result<Filling, SphereError> {
    let count = complex.face_count(complex.d())?;
    Ok(Filling {
        bits: BitVec::zeros(count),
        seed: None,
    })
}

fn check_inputs(
    complex: &JoinComplex,
    config: &PointConfiguration,
    filling: Option<&Filling>,
) -> Result<(), SphereError> {
    if complex.d() != 2 {
        return Err(SphereError::UnsupportedDimension(complex.d()));
    }
    if config.points.len() != complex.vertex_count() {
        return Err(SphereError::ConfigMismatch {
            got: config.points.len(),
            want: complex.vertex_count(),
        });
    }
    if let Some(f) = filling {
        let want = complex.face_count(2)?;
        if f.bits.len() != want {
            return Err(SphereError::FillingMismatch {
                got: f.bits.len(),
                want,
            });
        }
    }
    Ok(())
}

/// Affine image of a triangle; points are indexed by global vertex id.
pub fn face_triangle(complex: &JoinComplex, config: &PointConfiguration, face: &Face) -> Triangle {
    let p = |v: &Vertex| config.points[complex.vertex_id(*v)].clone();
    let vs = face.vertices();
    Triangle::new(p(&vs[0]), p(&vs[1]), p(&vs[2]))
}

/// Images of all edges of the 1-skeleton, in rank order.
pub fn edge_segments(complex: &JoinComplex, config: &PointConfiguration) -> Result<Vec<Segment>, SphereError> {
    Ok(complex
        .faces(1)?
        .map(|e| {
            let vs = e.vertices();
            Segment::new(
                config.points[complex.vertex_id(vs[0])].clone(),
                config.points[complex.vertex_id(vs[1])].clone(),
            )
        })
        .collect())
}

/// Whether the filling of the top face with rank `rank` contains `p`:
/// strict interior of the affine image, flipped when the face is inverted.
pub fn covers(
    filling: &Filling,
    complex: &JoinComplex,
    config: &PointConfiguration,
    rank: usize,
    p: &ExactPoint,
) -> Result<bool, SphereError> {
    let face = complex.unrank_face(2, rank)?;
    let tri = face_triangle(complex, config, &face);
    let inside = match point_in_triangle(p, &tri)? {
        Location::Inside => true,
        Location::Outside => false,
        Location::Boundary => {
            return Err(SphereError::NonGeneric {
                p: Box::new(p.clone()),
                face: face.to_string(),
            })
        }
    };
    Ok(inside ^ filling.bits.get(rank))
}

/// The triangles whose filling contains a fixed point, as a 3-partite
/// 3-uniform hypergraph on the vertex parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageHypergraph {
    pub p: ExactPoint,
    pub hypergraph: PartiteHypergraph,
}

pub fn coverage_hypergraph(
    filling: &Filling,
    complex: &JoinComplex,
    config: &PointConfiguration,
    p: &ExactPoint,
) -> Result<CoverageHypergraph, SphereError> {
    check_inputs(complex, config, Some(filling))?;
    let count = complex.face_count(2)?;
    let mut members = BitVec::zeros(count);
    // top-face ranks coincide with mixed-radix tuple indices
    for rank in 0..count {
        if covers(filling, complex, config, rank, p)? {
            members.set(rank, true);
        }
    }
    let n = complex.n();
    Ok(CoverageHypergraph {
        p: p.clone(),
        hypergraph: PartiteHypergraph::from_members(vec![n; 3], members)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PachWitness {
    pub parts: Vec<Vec<usize>>,
    pub p: ExactPoint,
    pub m: usize,
    /// `false` when the search budget ran out and `m` is only a lower bound.
    pub exact: bool,
    pub log: Vec<String>,
}

/// Re-checks a witness triangle by triangle through [`covers`], without
/// going through the coverage hypergraph.
pub fn verify_witness(
    filling: &Filling,
    complex: &JoinComplex,
    config: &PointConfiguration,
    witness: &PachWitness,
) -> Result<Vec<String>, SphereError> {
    if witness.parts.len() != 3 || witness.parts.iter().any(|p| p.len() < witness.m) {
        return Err(SphereError::WitnessRejected(format!(
            "parts {:?} do not have size {}",
            witness.parts, witness.m
        )));
    }
    let mut checked = 0usize;
    for &a in &witness.parts[0] {
        for &b in &witness.parts[1] {
            for &c in &witness.parts[2] {
                let face = Face::new(vec![Vertex::new(0, a), Vertex::new(1, b), Vertex::new(2, c)])?;
                let rank = complex.rank_face(&face)?;
                if !covers(filling, complex, config, rank, &witness.p)? {
                    return Err(SphereError::WitnessRejected(format!(
                        "face {face} does not cover {}",
                        witness.p
                    )));
                }
                checked += 1;
            }
        }
    }
    Ok(vec![format!(
        "verified {checked} transversal triangles cover {}",
        witness.p
    )])
}

/// Exact maximum `m` with a complete `m × m × m` family covering `p`.
pub fn max_pach_family_at(
    filling: &Filling,
    complex: &JoinComplex,
    config: &PointConfiguration,
    p: &ExactPoint,
    node_budget: u64,
) -> Result<PachWitness, SphereError> {
    let cov = coverage_hypergraph(filling, complex, config, p)?;
    pach_family_from_coverage(filling, complex, config, &cov, node_budget)
}

fn pach_family_from_coverage(
    filling: &Filling,
    complex: &JoinComplex,
    config: &PointConfiguration,
    cov: &CoverageHypergraph,
    node_budget: u64,
) -> Result<PachWitness, SphereError> {
    let best = max_complete_box(&cov.hypergraph, node_budget)?;
    let mut witness = PachWitness {
        parts: best.parts,
        p: cov.p.clone(),
        m: best.t,
        exact: best.complete,
        log: vec![format!(
            "{} of {} triangles cover p",
            cov.hypergraph.edge_count(),
            cov.hypergraph.members().len()
        )],
    };
    if witness.m > 0 {
        let log = verify_witness(filling, complex, config, &witness)?;
        witness.log.extend(log);
    }
    Ok(witness)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateStrategy {
    /// Region representatives of the arrangement of all edge images.
    SegmentSweep,
    /// Sector offsets around intersections of the supporting lines.
    LineOffsets,
    /// Seeded random rational points off every edge.
    RandomSample { count: usize },
}

/// Candidate points for a configuration; the far point is always included.
pub fn candidates(
    complex: &JoinComplex,
    config: &PointConfiguration,
    strategy: CandidateStrategy,
    seed: u64,
) -> Result<CandidateSet, SphereError> {
    check_inputs(complex, config, None)?;
    let segments = edge_segments(complex, config)?;
    Ok(match strategy {
        CandidateStrategy::SegmentSweep => SegmentArrangement::new(&segments).candidate_set(),
        CandidateStrategy::LineOffsets => candidate_points(&segments, &[]),
        CandidateStrategy::RandomSample { count } => {
            let sweep = SegmentArrangement::new(&segments);
            let far_point = sweep.far_point().clone();
            let bound = far_point.x.clone().max(far_point.y.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut points = Vec::with_capacity(count);
            while points.len() < count {
                let den: i64 = rng.gen_range(1..=997);
                let lim = (&bound * num_rational::BigRational::from_integer(den.into()))
                    .to_integer()
                    .try_into()
                    .unwrap_or(i64::MAX / 2);
                let x = rng.gen_range(-lim..=lim);
                let y = rng.gen_range(-lim..=lim);
                let p = ExactPoint::new(
                    num_rational::BigRational::new(x.into(), den.into()),
                    num_rational::BigRational::new(y.into(), den.into()),
                );
                if segments.iter().all(|s| !s.contains(&p)) {
                    points.push(p);
                }
            }
            CandidateSet { points, far_point }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereExperimentConfig {
    pub n: usize,
    pub seeds: Vec<u64>,
    /// Seed for the vertex configuration, shared by all fillings.
    pub config_seed: u64,
    pub strategy: CandidateStrategy,
    pub node_budget: u64,
    pub include_control: bool,
    /// Record wall time per row; off by default so reports are reproducible byte for byte.
    pub timing: bool,
}

impl SphereExperimentConfig {
    pub fn new(n: usize, seeds: Vec<u64>) -> Self {
        Self {
            n,
            seeds,
            config_seed: 0,
            strategy: CandidateStrategy::SegmentSweep,
            node_budget: DEFAULT_NODE_BUDGET,
            include_control: true,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereExperimentRow {
    /// `None` for the all-standard control filling.
    pub seed: Option<u64>,
    /// Index into the candidate list; `candidates` itself denotes the far point.
    pub candidate_index: usize,
    pub p: ExactPoint,
    pub max_m: usize,
    pub exact: bool,
    pub wall_ms: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereExperimentReport {
    pub config: SphereExperimentConfig,
    pub points: PointConfiguration,
    pub candidates: usize,
    pub rows: Vec<SphereExperimentRow>,
    pub threshold: Option<u64>,
    /// Fraction of seeds whose maximum is at most the control maximum.
    pub control_dominates: Option<f64>,
}

impl SphereExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,candidate_index,p_x,p_y,max_m,exact,wall_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.seed.map_or_else(|| "control".to_string(), |s| s.to_string()),
                r.candidate_index,
                format_rational(&r.p.x),
                format_rational(&r.p.y),
                r.max_m,
                r.exact,
                r.wall_ms.map_or_else(String::new, |t| t.to_string()),
            ));
        }
        out
    }
}

/// Best candidate for one filling; ties go to the lowest candidate index.
fn best_over_candidates(
    filling: &Filling,
    complex: &JoinComplex,
    config: &PointConfiguration,
    points: &[ExactPoint],
    node_budget: u64,
) -> Result<(usize, PachWitness), SphereError> {
    // candidates with identical coverage give identical answers
    let mut seen = HashSet::new();
    let mut distinct = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let cov = coverage_hypergraph(filling, complex, config, p)?;
        if seen.insert(cov.hypergraph.members().clone()) {
            distinct.push((i, cov));
        }
    }
    let results: Vec<Result<(usize, PachWitness), SphereError>> = distinct
        .par_iter()
        .map(|(i, cov)| pach_family_from_coverage(filling, complex, config, cov, node_budget).map(|w| (*i, w)))
        .collect();
    let mut best: Option<(usize, PachWitness)> = None;
    for r in results {
        let (i, w) = r?;
        let better = match &best {
            None => true,
            Some((bi, bw)) => w.m > bw.m || (w.m == bw.m && i < *bi),
        };
        if better {
            best = Some((i, w));
        }
    }
    best.ok_or_else(|| SphereError::WitnessRejected("no candidate points".into()))
}

/// For each seed, the largest Pach family over all candidate points.
pub fn sphere_upper_experiment(cfg: &SphereExperimentConfig) -> Result<SphereExperimentReport, SphereError> {
    let complex = JoinComplex::new(2, cfg.n)?;
    let points = random_generic_points(complex.vertex_count(), cfg.config_seed, 16, 7, 1000)?;
    let cands = candidates(&complex, &points, cfg.strategy, cfg.config_seed)?;
    let all: Vec<ExactPoint> = cands.all().cloned().collect();

    let mut fillings: Vec<Filling> = Vec::new();
    if cfg.include_control {
        fillings.push(standard_filling(&complex)?);
    }
    for &s in &cfg.seeds {
        fillings.push(random_filling(&complex, s)?);
    }

    let mut rows = Vec::with_capacity(fillings.len());
    for filling in &fillings {
        let start = Instant::now();
        let (index, w) = best_over_candidates(filling, &complex, &points, &all, cfg.node_budget)?;
        rows.push(SphereExperimentRow {
            seed: filling.seed,
            candidate_index: index,
            p: w.p,
            max_m: w.m,
            exact: w.exact,
            wall_ms: cfg.timing.then(|| start.elapsed().as_millis()),
        });
    }

    let control = rows.iter().find(|r| r.seed.is_none()).map(|r| r.max_m);
    let control_dominates = control.and_then(|c| {
        let random: Vec<_> = rows.iter().filter(|r| r.seed.is_some()).collect();
        (!random.is_empty())
            .then(|| random.iter().filter(|r| r.max_m <= c).count() as f64 / random.len() as f64)
    });
    Ok(SphereExperimentReport {
        config: cfg.clone(),
        points,
        candidates: all.len(),
        rows,
        threshold: pach_threshold_sphere(cfg.n as u64, 2).ok(),
        control_dominates,
    })
}
