//! The overlap pipeline: from a generic PL map of the 2-dimensional join into
//! the plane to a verified topological Pach family.
//!
//! Stages: a heavily covered point `p`, an escape path `R` from `p` to a
//! point outside the image, the vector `π(σ)` of edge-path parities for every
//! face, the largest π-class `F′`, the tripartite graph `H` of edges of `F′`,
//! and a complete tripartite subgraph of `H`. Every transversal triangle over
//! the output parts is re-checked against the triangle lists.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::cochains::gromov_bound;
use crate::extraction::{extract_tripartite_max, TripartiteGraph};
use crate::geometry::{segments_cross_parity, ExactPoint, Segment, SegmentArrangement};
use crate::join_complex::{Face, Vertex};
use crate::pl_map::{edge_path_parity, face_parities, validate_map, MapError, MapReport, PLMap, Polyline};
use crate::rational::format_rational;

pub const DEFAULT_PATH_RETRIES: usize = 1000;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("validate: map has {} violations", .0.violations.len())]
    InvalidMap(MapReport),
    #[error("validate: {0}")]
    Validate(#[source] MapError),
    #[error("heavy_point: {0}")]
    HeavyPoint(String),
    #[error("escape_path: no generic path after {0} attempts")]
    EscapePath(usize),
    #[error("pi_vector: {0}")]
    PiVector(#[source] MapError),
    #[error("pi_vector: odd-weight law fails at face {face}")]
    ParityLaw { face: usize },
    #[error("pigeonhole_class: no face has odd parity at p")]
    EmptyF,
    #[error("extract: no complete tripartite subgraph found in H")]
    Extraction,
    #[error("verify: {0}")]
    Verification(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeavyPoint {
    pub p: ExactPoint,
    /// Ranks of the faces with `φ(σ)·p = 1`.
    pub faces: Vec<usize>,
    /// `|F| / n³`.
    #[serde(with = "crate::rational::as_string")]
    pub density: BigRational,
    pub candidates: usize,
}

/// Face ranks in facet order (facet `i` misses part `i`).
fn facet_table(map: &PLMap) -> Vec<[usize; 3]> {
    (0..map.faces.len())
        .map(|r| {
            let f = map.complex().facet_ranks(2, r).expect("rank in range");
            [f[0], f[1], f[2]]
        })
        .collect()
}

fn ray_crosses(s: &Segment, p: &ExactPoint) -> bool {
    if (s.a.x <= p.x) == (s.b.x <= p.x) {
        return false;
    }
    let (l, r) = if s.a.x < s.b.x { (&s.a, &s.b) } else { (&s.b, &s.a) };
    crate::geometry::orientation(l, r, p) == crate::geometry::Orientation::Clockwise
}

/// Number of faces of odd parity at `p`, via upward-ray parities of the edges.
fn ray_face_count(segments: &[(usize, Segment)], edge_count: usize, facets: &[[usize; 3]], p: &ExactPoint) -> usize {
    let mut edges = BitVec::zeros(edge_count);
    for (e, s) in segments {
        if ray_crosses(s, p) {
            edges.flip(*e);
        }
    }
    facets
        .iter()
        .filter(|f| edges.get(f[0]) ^ edges.get(f[1]) ^ edges.get(f[2]))
        .count()
}

/// Exact maximizer of `|{σ : φ(σ)·p = 1}|` over one representative per region
/// of the arrangement of edge images.
///
/// The parity of a face at `p` only changes when `p` crosses the image of its
/// boundary, so region representatives of the edge arrangement suffice. The
/// winner is then moved off every segment of the face fillings inside its
/// region, and `F` is recomputed from the triangle lists.
pub fn heavy_point(map: &PLMap) -> Result<HeavyPoint, PipelineError> {
    let segments: Vec<(usize, Segment)> = map.edge_segments().into_iter().map(|(e, _, s)| (e, s)).collect();
    let plain: Vec<Segment> = segments.iter().map(|(_, s)| s.clone()).collect();
    let arrangement = SegmentArrangement::new(&plain);
    let facets = facet_table(map);
    let cells = arrangement.cells();
    let counts: Vec<usize> = cells
        .par_iter()
        .map(|c| ray_face_count(&segments, map.edges.len(), &facets, &c.point))
        .collect();
    let (best, best_count) = counts
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, usize)>, (i, &c)| match acc {
            Some((_, bc)) if bc >= c => acc,
            _ => Some((i, c)),
        })
        .ok_or_else(|| PipelineError::HeavyPoint("the edge arrangement has no bounded region".into()))?;

    let obstacles = map.filling_segments();
    let p = arrangement
        .generic_point_in(&cells[best], &obstacles)
        .ok_or_else(|| PipelineError::HeavyPoint("no generic point in the heaviest region".into()))?;
    let parities = face_parities(map, &p).map_err(|e| PipelineError::HeavyPoint(e.to_string()))?;
    let faces: Vec<usize> = parities.iter_ones().collect();
    if faces.len() != best_count {
        return Err(PipelineError::HeavyPoint(format!(
            "triangle lists give {} faces at p, edge parities give {best_count}",
            faces.len()
        )));
    }
    let n = map.n() as i64;
    Ok(HeavyPoint {
        density: BigRational::new((faces.len() as i64).into(), (n * n * n).into()),
        p,
        faces,
        candidates: cells.len(),
    })
}

/// A point beyond the bounding box of everything drawn by the map.
pub fn outside_point(map: &PLMap) -> ExactPoint {
    let mut pts = map.all_points();
    let first = pts.next().expect("maps have vertices").clone();
    let (mut lo, mut hi) = (first.clone(), first);
    for q in pts {
        if q.x < lo.x {
            lo.x = q.x.clone();
        }
        if q.y < lo.y {
            lo.y = q.y.clone();
        }
        if q.x > hi.x {
            hi.x = q.x.clone();
        }
        if q.y > hi.y {
            hi.y = q.y.clone();
        }
    }
    let one = BigRational::one();
    ExactPoint::new(
        (&hi.x + (&hi.x - &lo.x) + &one).ceil(),
        (&hi.y + (&hi.y - &lo.y) + &one).ceil() + BigRational::new(1.into(), 3.into()),
    )
}

/// Two-segment path `p → J → far` with a seeded random joint `J`, redrawn until
/// the path meets every edge image only in proper crossings.
pub fn escape_path(map: &PLMap, p: &ExactPoint, seed: u64, max_retries: usize) -> Result<Polyline, PipelineError> {
    let far = outside_point(map);
    let segments: Vec<Segment> = map.edge_segments().into_iter().map(|(_, _, s)| s).collect();
    let span = far.x.abs().max(far.y.abs()).ceil().to_integer();
    let span: i64 = span.try_into().unwrap_or(i64::MAX / 4).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries {
        let den: i64 = rng.gen_range(1..=1009);
        let joint = ExactPoint::new(
            BigRational::new(rng.gen_range(-span * den..=span * den).into(), den.into()),
            BigRational::new(rng.gen_range(-span * den..=span * den).into(), den.into()),
        );
        if &joint == p || joint == far {
            continue;
        }
        let legs = [Segment::new(p.clone(), joint.clone()), Segment::new(joint.clone(), far.clone())];
        let generic = legs
            .iter()
            .all(|leg| segments.iter().all(|s| segments_cross_parity(leg, s).is_ok()));
        if generic {
            return Polyline::new(vec![p.clone(), joint, far.clone()]).map_err(|_| PipelineError::EscapePath(max_retries));
        }
    }
    Err(PipelineError::EscapePath(max_retries))
}

/// `φ(τ)·R` for every edge `τ`, by edge rank.
pub fn edge_path_parities(map: &PLMap, path: &Polyline) -> Result<BitVec, MapError> {
    let bits: Vec<bool> = (0..map.edges.len())
        .into_par_iter()
        .map(|e| edge_path_parity(map, e, path))
        .collect::<Result<_, _>>()?;
    Ok(BitVec::from_bools(&bits))
}

/// `π(σ) = (φ(σ₀)·R, φ(σ₁)·R, φ(σ₂)·R)`, with `σ_i` the facet missing part `i`.
pub fn pi_vector(map: &PLMap, face: usize, path: &Polyline) -> Result<[bool; 3], MapError> {
    let f = map.complex().facet_ranks(2, face)?;
    Ok([
        edge_path_parity(map, f[0], path)?,
        edge_path_parity(map, f[1], path)?,
        edge_path_parity(map, f[2], path)?,
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiClass {
    pub pi: [bool; 3],
    pub faces: Vec<usize>,
    /// Size of every nonempty class, keyed by π written as a bit string.
    pub class_sizes: BTreeMap<String, usize>,
}

fn pi_key(pi: &[bool; 3]) -> String {
    pi.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The largest class of `F` by π-vector; ties go to the smallest π.
pub fn pigeonhole_class(faces: &[usize], pis: &BTreeMap<usize, [bool; 3]>) -> Option<PiClass> {
    let mut classes: BTreeMap<[bool; 3], Vec<usize>> = BTreeMap::new();
    for &f in faces {
        classes.entry(pis[&f]).or_default().push(f);
    }
    let class_sizes = classes.iter().map(|(k, v)| (pi_key(k), v.len())).collect();
    let (pi, members) = classes
        .into_iter()
        .fold(None, |acc: Option<([bool; 3], Vec<usize>)>, (k, v)| match acc {
            Some((_, ref bv)) if bv.len() >= v.len() => acc,
            _ => Some((k, v)),
        })?;
    Some(PiClass {
        pi,
        faces: members,
        class_sizes,
    })
}

/// The tripartite graph on `V₀ ⊔ V₁ ⊔ V₂` whose edges are the edges of the given faces.
pub fn build_h(map: &PLMap, faces: &[usize]) -> Result<TripartiteGraph, MapError> {
    let n = map.n();
    let mut g = TripartiteGraph::new([n, n, n]);
    for &r in faces {
        let f = map.complex().unrank_face(2, r)?;
        let v = f.vertices();
        g.add_edge(0, v[0].index, 1, v[1].index);
        g.add_edge(0, v[0].index, 2, v[2].index);
        g.add_edge(1, v[1].index, 2, v[2].index);
    }
    Ok(g)
}

/// Checks `φ(σ)·p = 1` for every transversal triangle over `parts`, straight
/// from the triangle lists.
pub fn verify_family(map: &PLMap, p: &ExactPoint, parts: &[Vec<usize>; 3]) -> Result<usize, PipelineError> {
    let mut checked = 0;
    for &a in &parts[0] {
        for &b in &parts[1] {
            for &c in &parts[2] {
                let face = Face::new(vec![Vertex::new(0, a), Vertex::new(1, b), Vertex::new(2, c)])
                    .map_err(|e| PipelineError::Verification(e.to_string()))?;
                let rank = map
                    .complex()
                    .rank_face(&face)
                    .map_err(|e| PipelineError::Verification(e.to_string()))?;
                let parity = crate::pl_map::point_face_parity(map, rank, p)
                    .map_err(|e| PipelineError::Verification(e.to_string()))?;
                if !parity {
                    return Err(PipelineError::Verification(format!("face {face} has parity 0 at {p}")));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub n: usize,
    pub seed: u64,
    pub p: ExactPoint,
    pub path: Polyline,
    pub f_size: usize,
    #[serde(with = "crate::rational::as_string")]
    pub density: BigRational,
    #[serde(with = "crate::rational::as_string")]
    pub gromov_reference: BigRational,
    pub pi_tilde: [bool; 3],
    pub f_prime_size: usize,
    pub class_sizes: BTreeMap<String, usize>,
    pub h_edges: usize,
    pub t: usize,
    pub parts: [Vec<usize>; 3],
    pub verified_triangles: usize,
    /// `30 ln n`, the size cap of the coloring construction.
    pub upper_reference: f64,
    /// `10⁻¹⁴ ln n`, the guaranteed size.
    pub lower_reference: f64,
    pub stages: Vec<StageLog>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub validate: bool,
    pub path_retries: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            validate: true,
            path_retries: DEFAULT_PATH_RETRIES,
        }
    }
}

/// Runs every stage and verifies the resulting family; a pure function of
/// `(map, seed)`.
pub fn run_pipeline(map: &PLMap, seed: u64, opts: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
    let mut stages = Vec::new();
    let log = |stages: &mut Vec<StageLog>, stage: &str, detail: String| {
        stages.push(StageLog {
            stage: stage.to_string(),
            detail,
        })
    };
    if opts.validate {
        let report = validate_map(map).map_err(PipelineError::Validate)?;
        if !report.is_valid() {
            return Err(PipelineError::InvalidMap(report));
        }
        log(&mut stages, "validate", format!("{} edge segments checked", report.segments_checked));
    }

    let heavy = heavy_point(map)?;
    log(
        &mut stages,
        "heavy_point",
        format!(
            "p = ({}, {}), |F| = {}, density {} over {} candidates",
            format_rational(&heavy.p.x),
            format_rational(&heavy.p.y),
            heavy.faces.len(),
            format_rational(&heavy.density),
            heavy.candidates
        ),
    );
    if heavy.faces.is_empty() {
        return Err(PipelineError::EmptyF);
    }

    let path = escape_path(map, &heavy.p, seed, opts.path_retries)?;
    log(
        &mut stages,
        "escape_path",
        format!("joint {}, far point {}", path.points()[1], path.end()),
    );

    let edge_bits = edge_path_parities(map, &path).map_err(PipelineError::PiVector)?;
    let facets = facet_table(map);
    let in_f = BitVec::from_indices(map.faces.len(), heavy.faces.iter().copied());
    let mut pis = BTreeMap::new();
    for (r, f) in facets.iter().enumerate() {
        let pi = [edge_bits.get(f[0]), edge_bits.get(f[1]), edge_bits.get(f[2])];
        let odd = pi.iter().filter(|&&b| b).count() % 2 == 1;
        if odd != in_f.get(r) {
            return Err(PipelineError::ParityLaw { face: r });
        }
        if odd {
            pis.insert(r, pi);
        }
    }
    log(
        &mut stages,
        "pi_vector",
        format!("odd-weight law holds on all {} faces", facets.len()),
    );

    let class = pigeonhole_class(&heavy.faces, &pis).ok_or(PipelineError::EmptyF)?;
    log(
        &mut stages,
        "pigeonhole_class",
        format!(
            "pi = {}, |F'| = {}, classes {:?}",
            pi_key(&class.pi),
            class.faces.len(),
            class.class_sizes
        ),
    );

    let h = build_h(map, &class.faces).map_err(PipelineError::PiVector)?;
    log(&mut stages, "build_h", format!("{} edges", h.edge_count()));

    let (t, parts) = extract_tripartite_max(&h).ok_or(PipelineError::Extraction)?;
    log(&mut stages, "extract", format!("t = {t}, parts {parts:?}"));

    let verified = verify_family(map, &heavy.p, &parts)?;
    log(
        &mut stages,
        "verify",
        format!("{verified} transversal triangles have parity 1 at p"),
    );

    let ln_n = (map.n() as f64).ln();
    Ok(PipelineReport {
        n: map.n(),
        seed,
        p: heavy.p.clone(),
        path,
        f_size: heavy.faces.len(),
        density: heavy.density,
        gromov_reference: gromov_bound(2),
        pi_tilde: class.pi,
        f_prime_size: class.faces.len(),
        class_sizes: class.class_sizes,
        h_edges: h.edge_count(),
        t,
        parts,
        verified_triangles: verified,
        upper_reference: 30.0 * ln_n,
        lower_reference: 1e-14 * ln_n,
        stages,
    })
}
