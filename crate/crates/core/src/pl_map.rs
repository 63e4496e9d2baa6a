//! Piecewise-linear maps of the 2-dimensional join into the plane and their
//! mod-2 intersection numbers.
//!
//! Edges map to polylines and triangles to lists of plane triangles whose
//! mod-2 boundary is the sum of the three edge polylines.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::geometry::{
    line_intersection, orientation, point_in_triangle, segments_cross_parity, ExactPoint, GeometryError, Location,
    Orientation, PointConfiguration, Segment, Triangle,
};
use crate::join_complex::{ComplexError, Face, JoinComplex};

pub const PLMAP_FORMAT: &str = "pachlab-plmap";
pub const PLMAP_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("polyline needs at least two distinct consecutive points")]
    BadPolyline,
    #[error("maps are only supported for d = 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("malformed map: {0}")]
    Malformed(String),
    #[error("point {p} lies on a segment of face {face}")]
    PointOnFace { p: Box<ExactPoint>, face: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ExactPoint>", into = "Vec<ExactPoint>")]
pub struct Polyline {
    points: Vec<ExactPoint>,
}

impl Polyline {
    pub fn new(points: Vec<ExactPoint>) -> Result<Self, MapError> {
        if points.len() < 2 || points.windows(2).any(|w| w[0] == w[1]) {
            return Err(MapError::BadPolyline);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ExactPoint] {
        &self.points
    }

    pub fn start(&self) -> &ExactPoint {
        &self.points[0]
    }

    pub fn end(&self) -> &ExactPoint {
        self.points.last().expect("non-empty")
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.points.windows(2).map(|w| Segment::new(w[0].clone(), w[1].clone()))
    }

    /// The same curve with every segment split at its midpoint.
    pub fn subdivided(&self) -> Polyline {
        let two = num_rational::BigRational::from_integer(2.into());
        let mut out = vec![self.points[0].clone()];
        for w in self.points.windows(2) {
            out.push(ExactPoint::new((&w[0].x + &w[1].x) / &two, (&w[0].y + &w[1].y) / &two));
            out.push(w[1].clone());
        }
        Polyline { points: out }
    }
}

impl TryFrom<Vec<ExactPoint>> for Polyline {
    type Error = MapError;

    fn try_from(points: Vec<ExactPoint>) -> Result<Self, MapError> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<ExactPoint> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

/// A PL map of the 2-dimensional join `V₀ ∗ V₁ ∗ V₂` into the plane.
///
/// `edges[r]` is the image of the 1-face of rank `r`, running from its
/// lower-part vertex to its higher-part vertex; `faces[r]` fills the 2-face
/// of rank `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PLMapRecord", into = "PLMapRecord")]
pub struct PLMap {
    complex: JoinComplex,
    pub vertices: PointConfiguration,
    pub edges: Vec<Polyline>,
    pub faces: Vec<Vec<Triangle>>,
}

impl PLMap {
    pub fn new(
        n: usize,
        vertices: PointConfiguration,
        edges: Vec<Polyline>,
        faces: Vec<Vec<Triangle>>,
    ) -> Result<Self, MapError> {
        let complex = JoinComplex::new(2, n)?;
        if vertices.points.len() != complex.vertex_count()
            || edges.len() != complex.face_count(1)?
            || faces.len() != complex.face_count(2)?
        {
            return Err(MapError::Malformed(format!(
                "{} vertices, {} edges, {} faces for n = {n}",
                vertices.points.len(),
                edges.len(),
                faces.len()
            )));
        }
        Ok(Self {
            complex,
            vertices,
            edges,
            faces,
        })
    }

    pub fn complex(&self) -> &JoinComplex {
        &self.complex
    }

    pub fn n(&self) -> usize {
        self.complex.n()
    }

    /// Edge-polyline segments tagged with `(edge rank, index in polyline)`.
    pub fn edge_segments(&self) -> Vec<(usize, usize, Segment)> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(e, pl)| pl.segments().enumerate().map(move |(i, s)| (e, i, s)))
            .collect()
    }

    /// Every distinct segment of every face filling.
    pub fn filling_segments(&self) -> Vec<Segment> {
        let mut seen = HashSet::new();
        self.faces
            .iter()
            .flatten()
            .flat_map(|t| t.edges())
            .map(|s| s.canonical())
            .filter(|s| seen.insert(s.clone()))
            .collect()
    }

    /// Every point appearing in the map.
    pub fn all_points(&self) -> impl Iterator<Item = &ExactPoint> {
        self.vertices
            .points
            .iter()
            .chain(self.edges.iter().flat_map(|e| e.points.iter()))
            .chain(self.faces.iter().flatten().flat_map(|t| [&t.a, &t.b, &t.c]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, MapError> {
        serde_json::from_str(s).map_err(|e| MapError::Malformed(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub face: Face,
    pub polyline: Polyline,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub face: Face,
    pub triangles: Vec<[ExactPoint; 3]>,
}

/// Versioned JSON layout of a [`PLMap`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLMapRecord {
    pub format: String,
    pub version: u32,
    pub d: usize,
    pub n: usize,
    pub vertices: Vec<ExactPoint>,
    pub edges: Vec<EdgeRecord>,
    pub faces: Vec<FaceRecord>,
}

impl From<PLMap> for PLMapRecord {
    fn from(map: PLMap) -> Self {
        let c = &map.complex;
        Self {
            format: PLMAP_FORMAT.to_string(),
            version: PLMAP_VERSION,
            d: 2,
            n: c.n(),
            vertices: map.vertices.points.clone(),
            edges: map
                .edges
                .iter()
                .enumerate()
                .map(|(r, pl)| EdgeRecord {
                    face: c.unrank_face(1, r).expect("rank in range"),
                    polyline: pl.clone(),
                })
                .collect(),
            faces: map
                .faces
                .iter()
                .enumerate()
                .map(|(r, ts)| FaceRecord {
                    face: c.unrank_face(2, r).expect("rank in range"),
                    triangles: ts.iter().map(|t| [t.a.clone(), t.b.clone(), t.c.clone()]).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PLMapRecord> for PLMap {
    type Error = MapError;

    fn try_from(r: PLMapRecord) -> Result<Self, MapError> {
        if r.format != PLMAP_FORMAT || r.version != PLMAP_VERSION {
            return Err(MapError::Malformed(format!(
                "unsupported format {:?} version {}",
                r.format, r.version
            )));
        }
        if r.d != 2 {
            return Err(MapError::UnsupportedDimension(r.d));
        }
        let complex = JoinComplex::new(2, r.n)?;
        let mut edges: Vec<Option<Polyline>> = vec![None; complex.face_count(1)?];
        for e in r.edges {
            let rank = complex.rank_face(&e.face)?;
            if e.face.dim() != 1 || edges[rank].replace(e.polyline).is_some() {
                return Err(MapError::Malformed(format!("edge {} repeated or not an edge", e.face)));
            }
        }
        let mut faces: Vec<Option<Vec<Triangle>>> = vec![None; complex.face_count(2)?];
        for f in r.faces {
            let rank = complex.rank_face(&f.face)?;
            let ts = f
                .triangles
                .into_iter()
                .map(|[a, b, c]| Triangle::new(a, b, c))
                .collect();
            if faces[rank].replace(ts).is_some() {
                return Err(MapError::Malformed(format!("face {} repeated", f.face)));
            }
        }
        let edges = edges
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| MapError::Malformed("missing edge image".into()))?;
        let faces = faces
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| MapError::Malformed("missing face image".into()))?;
        PLMap::new(r.n, PointConfiguration::new(r.vertices), edges, faces)
    }
}

/// The linear extension of a vertex configuration (indexed by vertex id).
pub fn affine_map(n: usize, vertices: PointConfiguration) -> Result<PLMap, MapError> {
    let complex = JoinComplex::new(2, n)?;
    let p = |v| vertices.points[complex.vertex_id(v)].clone();
    let edges = complex
        .faces(1)?
        .map(|e| Polyline::new(vec![p(e.vertices()[0]), p(e.vertices()[1])]))
        .collect::<Result<Vec<_>, _>>()?;
    let faces = complex
        .faces(2)?
        .map(|f| {
            let vs = f.vertices();
            vec![Triangle::new(p(vs[0]), p(vs[1]), p(vs[2]))]
        })
        .collect();
    PLMap::new(n, vertices.clone(), edges, faces)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapViolation {
    EndpointMismatch { edge: usize },
    DegenerateTriangle { face: usize, index: usize },
    BoundaryParity { face: usize },
    Touching { first: (usize, usize), second: (usize, usize) },
    Concurrent { point: ExactPoint, segments: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapReport {
    pub violations: Vec<MapViolation>,
    pub segments_checked: usize,
}

impl MapReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn toggle(acc: &mut HashMap<Segment, bool>, s: Segment) {
    let e = acc.entry(s.canonical()).or_insert(false);
    *e = !*e;
}

fn odd_segments(acc: HashMap<Segment, bool>) -> HashSet<Segment> {
    acc.into_iter().filter(|(_, odd)| *odd).map(|(s, _)| s).collect()
}

fn bbox_overlap(s: &Segment, t: &Segment) -> bool {
    let lo = |a: &num_rational::BigRational, b: &num_rational::BigRational| if a <= b { a.clone() } else { b.clone() };
    let hi = |a: &num_rational::BigRational, b: &num_rational::BigRational| if a >= b { a.clone() } else { b.clone() };
    lo(&s.a.x, &s.b.x) <= hi(&t.a.x, &t.b.x)
        && lo(&t.a.x, &t.b.x) <= hi(&s.a.x, &s.b.x)
        && lo(&s.a.y, &s.b.y) <= hi(&t.a.y, &t.b.y)
        && lo(&t.a.y, &t.b.y) <= hi(&s.a.y, &s.b.y)
}

/// Segments meeting only at the shared endpoint `q`, without folding back
/// onto each other.
fn meet_only_at(s: &Segment, t: &Segment, q: &ExactPoint) -> bool {
    let s_other = if &s.a == q { &s.b } else { &s.a };
    let t_other = if &t.a == q { &t.b } else { &t.a };
    !(s.contains(t_other) || t.contains(s_other))
}

/// Checks endpoint matching, the mod-2 boundary condition per face, and
/// genericity of the edge polylines: segments of different edges meet only in
/// proper crossings or at a common vertex image, and no three segments pass
/// through one crossing point.
pub fn validate_map(map: &PLMap) -> Result<MapReport, MapError> {
    let c = &map.complex;
    let mut report = MapReport::default();
    let vimg = |v| &map.vertices.points[c.vertex_id(v)];

    for (r, pl) in map.edges.iter().enumerate() {
        let e = c.unrank_face(1, r)?;
        if pl.start() != vimg(e.vertices()[0]) || pl.end() != vimg(e.vertices()[1]) {
            report.violations.push(MapViolation::EndpointMismatch { edge: r });
        }
    }

    for (r, ts) in map.faces.iter().enumerate() {
        let mut degenerate = false;
        for (i, t) in ts.iter().enumerate() {
            if t.is_degenerate() {
                degenerate = true;
                report
                    .violations
                    .push(MapViolation::DegenerateTriangle { face: r, index: i });
            }
        }
        if degenerate {
            continue;
        }
        let mut fill = HashMap::new();
        for t in ts {
            for s in t.edges() {
                toggle(&mut fill, s);
            }
        }
        let mut bd = HashMap::new();
        for e in c.facet_ranks(2, r)? {
            for s in map.edges[e].segments() {
                toggle(&mut bd, s);
            }
        }
        if odd_segments(fill) != odd_segments(bd) {
            report.violations.push(MapViolation::BoundaryParity { face: r });
        }
    }

    let segs = map.edge_segments();
    report.segments_checked = segs.len();
    let edge_faces: Vec<Face> = (0..map.edges.len())
        .map(|r| c.unrank_face(1, r))
        .collect::<Result<_, _>>()?;
    let mut crossings: HashMap<ExactPoint, HashSet<usize>> = HashMap::new();
    for i in 0..segs.len() {
        let (ea, ia, s) = &segs[i];
        for (j, (eb, ib, t)) in segs.iter().enumerate().skip(i + 1) {
            if !bbox_overlap(s, t) {
                continue;
            }
            let shared: Vec<ExactPoint> = [&s.a, &s.b]
                .into_iter()
                .filter(|q| *q == &t.a || *q == &t.b)
                .cloned()
                .collect();
            let allowed_joint = |q: &ExactPoint| {
                if ea == eb {
                    ia.abs_diff(*ib) == 1
                } else {
                    edge_faces[*ea]
                        .vertices()
                        .iter()
                        .any(|v| edge_faces[*eb].contains(*v) && vimg(*v) == q)
                }
            };
            let ok = match shared.as_slice() {
                [] => match segments_cross_parity(s, t) {
                    Ok(true) => {
                        if let Some(x) = line_intersection(&s.a, &s.b, &t.a, &t.b) {
                            let set = crossings.entry(x).or_default();
                            set.insert(i);
                            set.insert(j);
                        }
                        true
                    }
                    Ok(false) => true,
                    Err(_) => false,
                },
                [q] => allowed_joint(q) && meet_only_at(s, t, q),
                _ => false,
            };
            if !ok {
                report.violations.push(MapViolation::Touching {
                    first: (*ea, *ia),
                    second: (*eb, *ib),
                });
            }
        }
    }
    let mut concurrent: Vec<(ExactPoint, usize)> = crossings
        .into_iter()
        .filter(|(_, set)| set.len() > 2)
        .map(|(p, set)| (p, set.len()))
        .collect();
    concurrent.sort();
    report.violations.extend(
        concurrent
            .into_iter()
            .map(|(point, segments)| MapViolation::Concurrent { point, segments }),
    );
    Ok(report)
}

/// `φ(σ)·p`: parity of the triangles of the filling of face `face` containing `p`.
pub fn point_face_parity(map: &PLMap, face: usize, p: &ExactPoint) -> Result<bool, MapError> {
    let ts = map
        .faces
        .get(face)
        .ok_or_else(|| MapError::Malformed(format!("face rank {face} out of range")))?;
    let mut parity = false;
    for t in ts {
        match point_in_triangle(p, t)? {
            Location::Inside => parity = !parity,
            Location::Outside => {}
            Location::Boundary => return Err(MapError::PointOnFace { p: Box::new(p.clone()), face }),
        }
    }
    Ok(parity)
}

/// `φ(τ)·R`: parity of the proper crossings between an edge image and a path.
pub fn edge_path_parity(map: &PLMap, edge: usize, path: &Polyline) -> Result<bool, MapError> {
    let pl = map
        .edges
        .get(edge)
        .ok_or_else(|| MapError::Malformed(format!("edge rank {edge} out of range")))?;
    let mut parity = false;
    for s in pl.segments() {
        for t in path.segments() {
            if bbox_overlap(&s, &t) {
                parity ^= segments_cross_parity(&s, &t)?;
            }
        }
    }
    Ok(parity)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// `Σ_i φ(σ_i)·R` over the three boundary edges.
    pub lhs: bool,
    /// `φ(σ)·start + φ(σ)·end`.
    pub rhs: bool,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Both sides of `φ(∂σ)·R = φ(σ)·∂R` for a face and a path.
pub fn boundary_identity_check(map: &PLMap, face: usize, path: &Polyline) -> Result<IdentityCheck, MapError> {
    let mut lhs = false;
    for e in map.complex.facet_ranks(2, face)? {
        lhs ^= edge_path_parity(map, e, path)?;
    }
    let rhs = point_face_parity(map, face, path.start())? ^ point_face_parity(map, face, path.end())?;
    Ok(IdentityCheck { lhs, rhs })
}

/// Whether the upward vertical ray from `p` crosses segment `s`, with the
/// half-open rule on abscissas so that closed curves get the right parity
/// even when the ray passes through a joint.
fn ray_crosses(s: &Segment, p: &ExactPoint) -> bool {
    if (s.a.x <= p.x) == (s.b.x <= p.x) {
        return false;
    }
    let (l, r) = if s.a.x < s.b.x { (&s.a, &s.b) } else { (&s.b, &s.a) };
    orientation(l, r, p) == Orientation::Clockwise
}

/// Upward-ray crossing parity of every edge image; a face's parity at `p` is
/// the XOR over its three edges whenever `p` avoids all edge images.
pub fn edge_ray_parities(map: &PLMap, p: &ExactPoint) -> BitVec {
    BitVec::from_indices(
        map.edges.len(),
        map.edges
            .iter()
            .enumerate()
            .filter(|(_, pl)| pl.segments().filter(|s| ray_crosses(s, p)).count() % 2 == 1)
            .map(|(r, _)| r),
    )
}

/// Face parities at `p` from [`edge_ray_parities`], by face rank.
pub fn face_parities_by_ray(map: &PLMap, p: &ExactPoint) -> Result<BitVec, MapError> {
    let edges = edge_ray_parities(map, p);
    let count = map.faces.len();
    let mut out = BitVec::zeros(count);
    for r in 0..count {
        let bit = map
            .complex
            .facet_ranks(2, r)?
            .into_iter()
            .fold(false, |acc, e| acc ^ edges.get(e));
        out.set(r, bit);
    }
    Ok(out)
}

/// Face parities at `p` from the triangle lists, by face rank.
pub fn face_parities(map: &PLMap, p: &ExactPoint) -> Result<BitVec, MapError> {
    let mut out = BitVec::zeros(map.faces.len());
    for r in 0..map.faces.len() {
        out.set(r, point_face_parity(map, r, p)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_generic_points;
    use crate::rational::rat;

    fn pt(x: i64, y: i64) -> ExactPoint {
        ExactPoint::from_ints(x, y)
    }

    fn unit_map() -> PLMap {
        let cfg = PointConfiguration::new(vec![pt(0, 0), pt(4, 0), pt(0, 4)]);
        affine_map(1, cfg).unwrap()
    }

    /// The unit triangle with edge (0,1) bent through (2,-2) and a cone fill.
    fn tent_map() -> PLMap {
        let a = pt(0, 0);
        let b = pt(4, 0);
        let c = pt(0, 4);
        let top = pt(2, -2);
        let apex = ExactPoint::new(rat(1, 1), rat(1, 1));
        let edges = vec![
            Polyline::new(vec![a.clone(), top.clone(), b.clone()]).unwrap(),
            Polyline::new(vec![a.clone(), c.clone()]).unwrap(),
            Polyline::new(vec![b.clone(), c.clone()]).unwrap(),
        ];
        let faces = vec![vec![
            Triangle::new(apex.clone(), a.clone(), top.clone()),
            Triangle::new(apex.clone(), top.clone(), b.clone()),
            Triangle::new(apex.clone(), b.clone(), c.clone()),
            Triangle::new(apex.clone(), c.clone(), a.clone()),
        ]];
        PLMap::new(1, PointConfiguration::new(vec![a, b, c]), edges, faces).unwrap()
    }

    #[test]
    fn polyline_rules() {
        assert!(Polyline::new(vec![pt(0, 0)]).is_err());
        assert!(Polyline::new(vec![pt(0, 0), pt(0, 0), pt(1, 1)]).is_err());
        assert_eq!(Polyline::new(vec![pt(0, 0), pt(2, 2)]).unwrap().subdivided().points().len(), 3);
    }

    #[test]
    fn affine_parities() {
        let m = unit_map();
        assert!(point_face_parity(&m, 0, &pt(1, 1)).unwrap());
        assert!(!point_face_parity(&m, 0, &pt(5, 5)).unwrap());
        assert!(matches!(
            point_face_parity(&m, 0, &pt(2, 0)),
            Err(MapError::PointOnFace { .. })
        ));
        assert!(validate_map(&m).unwrap().is_valid());
    }

    #[test]
    fn cone_parity_matches_ray_casting() {
        let m = tent_map();
        assert!(validate_map(&m).unwrap().is_valid());
        let probes = [
            ExactPoint::new(rat(2, 1), rat(-1, 1)),
            ExactPoint::new(rat(1, 2), rat(1, 3)),
            ExactPoint::new(rat(7, 2), rat(-1, 7)),
            ExactPoint::new(rat(-1, 3), rat(1, 5)),
            ExactPoint::new(rat(3, 1), rat(3, 1)),
        ];
        for p in &probes {
            assert_eq!(
                face_parities(&m, p).unwrap(),
                face_parities_by_ray(&m, p).unwrap(),
                "at {p}"
            );
        }
        assert!(point_face_parity(&m, 0, &probes[0]).unwrap());
    }

    #[test]
    fn dropped_triangle_breaks_boundary() {
        let mut m = tent_map();
        m.faces[0].pop();
        let report = validate_map(&m).unwrap();
        assert_eq!(report.violations, vec![MapViolation::BoundaryParity { face: 0 }]);
    }

    #[test]
    fn endpoint_mismatch_detected() {
        let mut m = unit_map();
        m.edges[0] = Polyline::new(vec![pt(0, 0), pt(5, 1)]).unwrap();
        let v = validate_map(&m).unwrap().violations;
        assert!(v.contains(&MapViolation::EndpointMismatch { edge: 0 }));
    }

    #[test]
    fn tent_edge_crossings() {
        let m = tent_map();
        let vertical = Polyline::new(vec![
            ExactPoint::new(rat(1, 1), rat(-5, 1)),
            ExactPoint::new(rat(1, 1), rat(-1, 2)),
        ])
        .unwrap();
        assert!(edge_path_parity(&m, 0, &vertical).unwrap());
        let through = Polyline::new(vec![
            ExactPoint::new(rat(1, 1), rat(-5, 1)),
            ExactPoint::new(rat(3, 1), rat(-5, 1)),
            ExactPoint::new(rat(3, 1), rat(1, 2)),
        ])
        .unwrap();
        // the tent crosses x = 3 once, and the horizontal leg stays below it
        assert!(edge_path_parity(&m, 0, &through).unwrap());
        assert_eq!(
            edge_path_parity(&m, 0, &through).unwrap(),
            edge_path_parity(&m, 0, &through.subdivided()).unwrap()
        );
        let far = Polyline::new(vec![pt(10, 10), pt(20, 11)]).unwrap();
        assert!(!edge_path_parity(&m, 0, &far).unwrap());
    }

    #[test]
    fn boundary_identity_examples() {
        let m = unit_map();
        let outside = Polyline::new(vec![pt(10, 10), pt(20, 11)]).unwrap();
        let c = boundary_identity_check(&m, 0, &outside).unwrap();
        assert!(!c.lhs && !c.rhs);
        let out_of = Polyline::new(vec![pt(1, 1), ExactPoint::new(rat(31, 3), rat(50, 7))]).unwrap();
        let c = boundary_identity_check(&m, 0, &out_of).unwrap();
        assert!(c.lhs && c.rhs);
    }

    #[test]
    fn json_round_trip() {
        let cfg = random_generic_points(9, 3, 10, 4, 100).unwrap();
        let m = affine_map(3, cfg).unwrap();
        let json = m.to_json();
        let back = PLMap::from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), json);
        let t = tent_map();
        assert_eq!(PLMap::from_json(&t.to_json()).unwrap(), t);
        assert!(PLMap::from_json(&json.replace("pachlab-plmap", "other")).is_err());
    }

    #[test]
    fn random_affine_maps_are_valid() {
        for seed in 0..4 {
            let cfg = random_generic_points(12, seed, 20, 5, 100).unwrap();
            let m = affine_map(4, cfg).unwrap();
            let r = validate_map(&m).unwrap();
            assert!(r.is_valid(), "seed {seed}: {:?}", r.violations);
        }
    }
}
