//! Exact planar predicates over rational coordinates.
//!
//! Nothing in this module rounds. Orientation is evaluated as the sign of a
//! homogeneous 3×3 determinant over big integers, so every membership and
//! crossing decision is exact, and degeneracies are reported rather than
//! perturbed away.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, simplest_between};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(String),
    #[error("degenerate segment {0}")]
    DegenerateSegment(String),
    #[error("degenerate incidence: {0}")]
    Degenerate(String),
    #[error("no certified configuration after {0} attempts")]
    RetriesExhausted(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl ExactPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(
            BigRational::from_integer(x.into()),
            BigRational::from_integer(y.into()),
        )
    }

    /// `(X, Y, W)` with `x = X/W`, `y = Y/W`, `W > 0`.
    fn homogeneous(&self) -> [BigInt; 3] {
        let (xn, xd) = (self.x.numer(), self.x.denom());
        let (yn, yd) = (self.y.numer(), self.y.denom());
        if xd.is_one() && yd.is_one() {
            return [xn.clone(), yn.clone(), BigInt::one()];
        }
        [xn * yd, yn * xd, xd * yd]
    }

    pub fn add_scaled(&self, dir: &ExactPoint, t: &BigRational) -> ExactPoint {
        ExactPoint::new(&self.x + &dir.x * t, &self.y + &dir.y * t)
    }
}

impl fmt::Debug for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for ExactPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [format_rational(&self.x), format_rational(&self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        let x = parse_rational(&x).map_err(serde::de::Error::custom)?;
        let y = parse_rational(&y).map_err(serde::de::Error::custom)?;
        Ok(ExactPoint::new(x, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }

    fn from_sign(v: &BigInt) -> Self {
        match v.sign() {
            num_bigint::Sign::Minus => Orientation::Clockwise,
            num_bigint::Sign::NoSign => Orientation::Collinear,
            num_bigint::Sign::Plus => Orientation::CounterClockwise,
        }
    }
}

/// Sign of `(q − p) × (r − p)`.
pub fn orientation(p: &ExactPoint, q: &ExactPoint, r: &ExactPoint) -> Orientation {
    let [px, py, pw] = p.homogeneous();
    let [qx, qy, qw] = q.homogeneous();
    let [rx, ry, rw] = r.homogeneous();
    let det = &px * (&qy * &rw - &ry * &qw) - &py * (&qx * &rw - &rx * &qw)
        + &pw * (&qx * &ry - &rx * &qy);
    Orientation::from_sign(&det)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub a: ExactPoint,
    pub b: ExactPoint,
}

impl Segment {
    pub fn new(a: ExactPoint, b: ExactPoint) -> Self {
        Self { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Closed-segment membership.
    pub fn contains(&self, p: &ExactPoint) -> bool {
        orientation(&self.a, &self.b, p) == Orientation::Collinear && in_box(&self.a, &self.b, p)
    }

    /// Same segment regardless of endpoint order.
    pub fn canonical(&self) -> Segment {
        if self.a <= self.b {
            self.clone()
        } else {
            Segment::new(self.b.clone(), self.a.clone())
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}–{}", self.a, self.b)
    }
}

/// The line through two distinct points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line {
    pub a: ExactPoint,
    pub b: ExactPoint,
}

impl Line {
    pub fn new(a: ExactPoint, b: ExactPoint) -> Self {
        Self { a, b }
    }

    pub fn contains(&self, p: &ExactPoint) -> bool {
        orientation(&self.a, &self.b, p) == Orientation::Collinear
    }

    fn direction(&self) -> ExactPoint {
        ExactPoint::new(&self.b.x - &self.a.x, &self.b.y - &self.a.y)
    }

    /// `(A, B, C)` with `Ax + By + C = 0`, integral, primitive, first nonzero of
    /// `(A, B)` positive. Equal lines give equal keys.
    fn key(&self) -> [BigInt; 3] {
        let [ax, ay, aw] = self.a.homogeneous();
        let [bx, by, bw] = self.b.homogeneous();
        let a = &ay * &bw - &by * &aw;
        let b = &bx * &aw - &ax * &bw;
        let c = &ax * &by - &bx * &ay;
        let g = num_integer::Integer::gcd(&num_integer::Integer::gcd(&a, &b), &c);
        let (mut a, mut b, mut c) = (a / &g, b / &g, c / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
            c = -c;
        }
        [a, b, c]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triangle {
    pub a: ExactPoint,
    pub b: ExactPoint,
    pub c: ExactPoint,
}

impl Triangle {
    pub fn new(a: ExactPoint, b: ExactPoint, c: ExactPoint) -> Self {
        Self { a, b, c }
    }

    pub fn edges(&self) -> [Segment; 3] {
        [
            Segment::new(self.a.clone(), self.b.clone()),
            Segment::new(self.b.clone(), self.c.clone()),
            Segment::new(self.c.clone(), self.a.clone()),
        ]
    }

    pub fn is_degenerate(&self) -> bool {
        orientation(&self.a, &self.b, &self.c) == Orientation::Collinear
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

fn in_box(a: &ExactPoint, b: &ExactPoint, p: &ExactPoint) -> bool {
    let (x0, x1) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (y0, y1) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    x0 <= &p.x && &p.x <= x1 && y0 <= &p.y && &p.y <= y1
}

pub fn point_in_triangle(p: &ExactPoint, t: &Triangle) -> Result<Location, GeometryError> {
    let o = orientation(&t.a, &t.b, &t.c);
    if o == Orientation::Collinear {
        return Err(GeometryError::DegenerateTriangle(format!(
            "{} {} {}",
            t.a, t.b, t.c
        )));
    }
    let want = o.sign();
    let signs = [
        orientation(&t.a, &t.b, p).sign() * want,
        orientation(&t.b, &t.c, p).sign() * want,
        orientation(&t.c, &t.a, p).sign() * want,
    ];
    Ok(if signs.iter().any(|&s| s < 0) {
        Location::Outside
    } else if signs.contains(&0) {
        Location::Boundary
    } else {
        Location::Inside
    })
}

/// Parity of `|s₁ ∩ s₂|` for segments in general position relative to each other.
///
/// Any incidence (shared endpoint, endpoint on the other segment, collinear
/// overlap) is a degeneracy and is reported as an error.
pub fn segments_cross_parity(s1: &Segment, s2: &Segment) -> Result<bool, GeometryError> {
    for s in [s1, s2] {
        if s.is_degenerate() {
            return Err(GeometryError::DegenerateSegment(s.to_string()));
        }
    }
    let o1 = orientation(&s1.a, &s1.b, &s2.a);
    let o2 = orientation(&s1.a, &s1.b, &s2.b);
    let o3 = orientation(&s2.a, &s2.b, &s1.a);
    let o4 = orientation(&s2.a, &s2.b, &s1.b);
    use Orientation::Collinear;
    if o1 != Collinear && o2 != Collinear && o3 != Collinear && o4 != Collinear {
        return Ok(o1 != o2 && o3 != o4);
    }
    let touching = (o1 == Collinear && in_box(&s1.a, &s1.b, &s2.a))
        || (o2 == Collinear && in_box(&s1.a, &s1.b, &s2.b))
        || (o3 == Collinear && in_box(&s2.a, &s2.b, &s1.a))
        || (o4 == Collinear && in_box(&s2.a, &s2.b, &s1.b));
    if touching {
        Err(GeometryError::Degenerate(format!("segments {s1} and {s2} touch")))
    } else {
        Ok(false)
    }
}

/// Intersection point of the supporting lines, if they are not parallel.
pub fn line_intersection(
    a: &ExactPoint,
    b: &ExactPoint,
    c: &ExactPoint,
    d: &ExactPoint,
) -> Option<ExactPoint> {
    let r = ExactPoint::new(&b.x - &a.x, &b.y - &a.y);
    let s = ExactPoint::new(&d.x - &c.x, &d.y - &c.y);
    let denom = &r.x * &s.y - &r.y * &s.x;
    if denom.is_zero() {
        return None;
    }
    let t = ((&c.x - &a.x) * &s.y - (&c.y - &a.y) * &s.x) / denom;
    Some(a.add_scaled(&r, &t))
}

/// Vertex images with a general-position certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub points: Vec<ExactPoint>,
    #[serde(default)]
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PositionViolation {
    Duplicate { i: usize, j: usize },
    Collinear { i: usize, j: usize, k: usize },
}

impl PointConfiguration {
    pub fn new(points: Vec<ExactPoint>) -> Self {
        let mut cfg = Self {
            points,
            certified: false,
        };
        cfg.certified = certify_general_position(&cfg).is_ok();
        cfg
    }
}

/// Exhaustive check of all pairs for coincidence and all triples for collinearity.
pub fn certify_general_position(config: &PointConfiguration) -> Result<(), Vec<PositionViolation>> {
    let pts = &config.points;
    let mut violations = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                violations.push(PositionViolation::Duplicate { i, j });
            }
        }
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i] == pts[j] {
                continue;
            }
            for k in j + 1..pts.len() {
                if pts[k] == pts[i] || pts[k] == pts[j] {
                    continue;
                }
                if orientation(&pts[i], &pts[j], &pts[k]) == Orientation::Collinear {
                    violations.push(PositionViolation::Collinear { i, j, k });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Random points with coordinates `num/den`, `|num/den| ≤ coord_bound`,
/// `1 ≤ den ≤ den_bound`, redrawn until certified.
pub fn random_generic_points(
    count: usize,
    seed: u64,
    coord_bound: i64,
    den_bound: i64,
    max_retries: usize,
) -> Result<PointConfiguration, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries.max(1) {
        let coord = |rng: &mut ChaCha8Rng| {
            let den = rng.gen_range(1..=den_bound.max(1));
            let num = rng.gen_range(-coord_bound * den..=coord_bound * den);
            BigRational::new(num.into(), den.into())
        };
        let points: Vec<ExactPoint> = (0..count)
            .map(|_| {
                let x = coord(&mut rng);
                let y = coord(&mut rng);
                ExactPoint::new(x, y)
            })
            .collect();
        let cfg = PointConfiguration::new(points);
        if cfg.certified {
            return Ok(cfg);
        }
    }
    Err(GeometryError::RetriesExhausted(max_retries))
}

/// Generic representatives of arrangement regions plus a point far outside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub points: Vec<ExactPoint>,
    pub far_point: ExactPoint,
}

impl CandidateSet {
    /// Candidates followed by the far point.
    pub fn all(&self) -> impl Iterator<Item = &ExactPoint> {
        self.points.iter().chain(std::iter::once(&self.far_point))
    }

    pub fn len(&self) -> usize {
        self.points.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Componentwise maximum distance `max(|Δx|, |Δy|)`; a lower bound on the
/// Euclidean distance.
fn linf(p: &ExactPoint, q: &ExactPoint) -> BigRational {
    let dx = (&p.x - &q.x).abs();
    let dy = (&p.y - &q.y).abs();
    dx.max(dy)
}

/// Scales a nonzero direction to unit sup-norm.
fn unit_linf(v: &ExactPoint) -> ExactPoint {
    let m = v.x.abs().max(v.y.abs());
    ExactPoint::new(&v.x / &m, &v.y / &m)
}

fn half(v: &ExactPoint) -> bool {
    // upper half-plane including the positive x-axis
    v.y.is_positive() || (v.y.is_zero() && v.x.is_positive())
}

fn angle_cmp(u: &ExactPoint, v: &ExactPoint) -> Ordering {
    let (hu, hv) = (half(u), half(v));
    if hu != hv {
        return hv.cmp(&hu);
    }
    let cross = &u.x * &v.y - &u.y * &v.x;
    if cross.is_positive() {
        Ordering::Less
    } else if cross.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

fn bounding_far_point(points: impl Iterator<Item = ExactPoint>, avoid: &[Line]) -> ExactPoint {
    let mut hi_x = BigRational::zero();
    let mut hi_y = BigRational::zero();
    let mut lo_x = BigRational::zero();
    let mut lo_y = BigRational::zero();
    for p in points {
        hi_x = hi_x.max(p.x.clone());
        hi_y = hi_y.max(p.y.clone());
        lo_x = lo_x.min(p.x.clone());
        lo_y = lo_y.min(p.y.clone());
    }
    let one = BigRational::one();
    let x = (&hi_x + (&hi_x - &lo_x) + &one).ceil();
    let mut y = (&hi_y + (&hi_y - &lo_y) + &one).ceil();
    loop {
        let p = ExactPoint::new(x.clone(), y.clone());
        if avoid.iter().all(|l| !l.contains(&p)) {
            return p;
        }
        y += &one;
    }
}

/// Region representatives for an arrangement of lines and segment-supporting lines.
///
/// Every intersection point of two supporting lines is surrounded by one
/// offset per angular sector, `p + ε(u + v)` for angularly consecutive line
/// directions `u`, `v` scaled to unit sup-norm, with `ε` a quarter of the
/// minimum sup-norm gap between distinct intersection points. Such offsets
/// stay inside the sector next to `p`, so every region with a vertex gets a
/// representative. Arrangements of parallel lines get offsets along the normal.
pub fn candidate_points(segments: &[Segment], lines: &[Line]) -> CandidateSet {
    let mut all: Vec<Line> = lines.to_vec();
    all.extend(
        segments
            .iter()
            .filter(|s| !s.is_degenerate())
            .map(|s| Line::new(s.a.clone(), s.b.clone())),
    );
    let mut seen = HashSet::new();
    all.retain(|l| l.a != l.b && seen.insert(l.key()));

    let mut vertices: BTreeMap<ExactPoint, Vec<usize>> = BTreeMap::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if let Some(p) = line_intersection(&all[i].a, &all[i].b, &all[j].a, &all[j].b) {
                let entry = vertices.entry(p).or_default();
                for k in [i, j] {
                    if !entry.contains(&k) {
                        entry.push(k);
                    }
                }
            }
        }
    }

    let mut points = Vec::new();
    if !vertices.is_empty() {
        let keys: Vec<&ExactPoint> = vertices.keys().collect();
        let mut gap: Option<BigRational> = None;
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                let g = linf(keys[i], keys[j]);
                if gap.as_ref().is_none_or(|cur| &g < cur) {
                    gap = Some(g);
                }
            }
        }
        let eps = gap.unwrap_or_else(BigRational::one) / BigRational::from_integer(4.into());
        for (p, through) in &vertices {
            let mut dirs: Vec<ExactPoint> = Vec::with_capacity(2 * through.len());
            for &li in through {
                let u = unit_linf(&all[li].direction());
                let neg = ExactPoint::new(-&u.x, -&u.y);
                dirs.push(u);
                dirs.push(neg);
            }
            dirs.sort_by(angle_cmp);
            for k in 0..dirs.len() {
                let u = &dirs[k];
                let v = &dirs[(k + 1) % dirs.len()];
                let w = ExactPoint::new(&u.x + &v.x, &u.y + &v.y);
                points.push(p.add_scaled(&w, &eps));
            }
        }
    } else if !all.is_empty() {
        // parallel family: one offset on each side of every line
        let dir = all[0].direction();
        let normal = ExactPoint::new(-&dir.y, dir.x.clone());
        let level = |p: &ExactPoint| &normal.x * &p.x + &normal.y * &p.y;
        let mut levels: Vec<BigRational> = all.iter().map(|l| level(&l.a)).collect();
        levels.sort();
        let norm2 = &normal.x * &normal.x + &normal.y * &normal.y;
        let min_gap = levels
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .min()
            .unwrap_or_else(|| norm2.clone());
        let t = min_gap / (norm2 * BigRational::from_integer(2.into()));
        for l in &all {
            points.push(l.a.add_scaled(&normal, &t));
            points.push(l.a.add_scaled(&normal, &-&t));
        }
    }

    let far_point = bounding_far_point(
        segments
            .iter()
            .flat_map(|s| [s.a.clone(), s.b.clone()])
            .chain(lines.iter().flat_map(|l| [l.a.clone(), l.b.clone()]))
            .chain(vertices.keys().cloned())
            .chain(points.iter().cloned()),
        &all,
    );
    CandidateSet { points, far_point }
}

/// [`candidate_points`] keeping the first candidate of each region signature.
pub fn candidate_points_dedup<S, F>(segments: &[Segment], lines: &[Line], signature: F) -> CandidateSet
where
    S: Eq + Hash,
    F: Fn(&ExactPoint) -> S,
{
    let mut set = candidate_points(segments, lines);
    let mut seen = HashSet::new();
    set.points.retain(|p| seen.insert(signature(p)));
    set
}

/// A representative of one region of a segment arrangement, found in the
/// vertical slab just right of the region's leftmost vertex.
///
/// Coordinates `x`, `y_low`, `y_high` are in the sheared sweep frame
/// `(x + λy, y)`; `point` is in the original frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionCell {
    pub point: ExactPoint,
    x: BigRational,
    y_low: BigRational,
    y_high: BigRational,
}

/// The sweep frame: a shear making every input segment non-vertical.
#[derive(Clone, Debug)]
struct Shear {
    lambda: BigRational,
}

impl Shear {
    fn choose(segments: &[Segment]) -> Self {
        let mut k: i64 = 0;
        loop {
            let lambda = if k == 0 {
                BigRational::zero()
            } else {
                BigRational::new(k.into(), (2 * k.abs() + 1).into())
            };
            let shear = Shear { lambda };
            if segments
                .iter()
                .all(|s| shear.apply(&s.a).x != shear.apply(&s.b).x || s.is_degenerate())
            {
                return shear;
            }
            k = if k <= 0 { -k + 1 } else { -k };
        }
    }

    fn apply(&self, p: &ExactPoint) -> ExactPoint {
        if self.lambda.is_zero() {
            return p.clone();
        }
        ExactPoint::new(&p.x + &self.lambda * &p.y, p.y.clone())
    }

    fn invert(&self, p: &ExactPoint) -> ExactPoint {
        if self.lambda.is_zero() {
            return p.clone();
        }
        ExactPoint::new(&p.x - &self.lambda * &p.y, p.y.clone())
    }
}

/// Segment oriented left to right in the sweep frame.
#[derive(Clone, Debug)]
struct SweepSegment {
    l: ExactPoint,
    r: ExactPoint,
}

impl SweepSegment {
    fn y_at(&self, x: &BigRational) -> BigRational {
        let t = (x - &self.l.x) / (&self.r.x - &self.l.x);
        &self.l.y + (&self.r.y - &self.l.y) * t
    }
}

/// Exact representatives of the regions of a segment arrangement.
#[derive(Clone, Debug)]
pub struct SegmentArrangement {
    shear: Shear,
    cells: Vec<RegionCell>,
    far_point: ExactPoint,
}

impl SegmentArrangement {
    /// Builds one representative per bounded region (possibly a few per
    /// region) plus a far point for the unbounded one.
    ///
    /// Every bounded region has a leftmost vertex `v` (a segment endpoint or
    /// crossing), and near `v` it is the wedge between two segments leaving
    /// `v` to the right that are consecutive in slope. In the slab between
    /// `v.x` and the next event abscissa those two segments are adjacent, so
    /// the point midway between them represents the region.
    pub fn new(segments: &[Segment]) -> Self {
        let shear = Shear::choose(segments);
        let segs: Vec<SweepSegment> = segments
            .iter()
            .filter(|s| !s.is_degenerate())
            .map(|s| {
                let (a, b) = (shear.apply(&s.a), shear.apply(&s.b));
                if a.x < b.x {
                    SweepSegment { l: a, r: b }
                } else {
                    SweepSegment { l: b, r: a }
                }
            })
            .collect();

        let mut incident: HashMap<ExactPoint, Vec<usize>> = HashMap::new();
        let mut add = |p: ExactPoint, i: usize| {
            let e = incident.entry(p).or_default();
            if !e.contains(&i) {
                e.push(i);
            }
        };
        for (i, s) in segs.iter().enumerate() {
            add(s.l.clone(), i);
            add(s.r.clone(), i);
        }
        let mut order: Vec<usize> = (0..segs.len()).collect();
        order.sort_by(|&i, &j| segs[i].l.x.cmp(&segs[j].l.x));
        for (oi, &i) in order.iter().enumerate() {
            for &j in &order[oi + 1..] {
                if segs[j].l.x > segs[i].r.x {
                    break;
                }
                for p in segment_meets(&segs[i], &segs[j]) {
                    add(p.clone(), i);
                    add(p, j);
                }
            }
        }

        let mut xs: Vec<BigRational> = incident.keys().map(|p| p.x.clone()).collect();
        xs.sort();
        xs.dedup();
        let mut events: Vec<(&ExactPoint, &Vec<usize>)> = incident.iter().collect();
        events.sort_by(|a, b| a.0.cmp(b.0));

        let mut mids: HashMap<usize, BigRational> = HashMap::new();
        let mut cells = Vec::new();
        for (v, through) in events {
            let rightward: Vec<usize> = through
                .iter()
                .copied()
                .filter(|&i| segs[i].r.x > v.x)
                .collect();
            if rightward.len() < 2 {
                continue;
            }
            let slot = xs.binary_search(&v.x).expect("event abscissa");
            let x_mid = mids
                .entry(slot)
                .or_insert_with(|| simplest_between(&xs[slot], &xs[slot + 1]))
                .clone();
            let mut ys: Vec<BigRational> = rightward.iter().map(|&i| segs[i].y_at(&x_mid)).collect();
            ys.sort();
            ys.dedup();
            for w in ys.windows(2) {
                let y = simplest_between(&w[0], &w[1]);
                cells.push(RegionCell {
                    point: shear.invert(&ExactPoint::new(x_mid.clone(), y)),
                    x: x_mid.clone(),
                    y_low: w[0].clone(),
                    y_high: w[1].clone(),
                });
            }
        }

        let far_point = bounding_far_point(
            segments.iter().flat_map(|s| [s.a.clone(), s.b.clone()]),
            &[],
        );
        Self {
            shear,
            cells,
            far_point,
        }
    }

    pub fn cells(&self) -> &[RegionCell] {
        &self.cells
    }

    pub fn far_point(&self) -> &ExactPoint {
        &self.far_point
    }

    pub fn candidate_set(&self) -> CandidateSet {
        CandidateSet {
            points: self.cells.iter().map(|c| c.point.clone()).collect(),
            far_point: self.far_point.clone(),
        }
    }

    /// A point of `cell` lying on none of `obstacles`.
    ///
    /// Searches the vertical (in the sweep frame) through the cell's
    /// representative; returns `None` if the obstacles cover it entirely.
    pub fn generic_point_in(&self, cell: &RegionCell, obstacles: &[Segment]) -> Option<ExactPoint> {
        let mut blocked: Vec<(BigRational, BigRational)> = Vec::new();
        for s in obstacles {
            let (a, b) = (self.shear.apply(&s.a), self.shear.apply(&s.b));
            let (l, r) = if a.x <= b.x { (a, b) } else { (b, a) };
            if cell.x < l.x || cell.x > r.x {
                continue;
            }
            if l.x == r.x {
                let (y0, y1) = if l.y <= r.y { (l.y, r.y) } else { (r.y, l.y) };
                blocked.push((y0, y1));
            } else {
                let y = SweepSegment { l, r }.y_at(&cell.x);
                blocked.push((y.clone(), y));
            }
        }
        blocked.retain(|(lo, hi)| hi > &cell.y_low && lo < &cell.y_high);
        blocked.sort();
        let mut lo = cell.y_low.clone();
        let mut gaps: Vec<(BigRational, BigRational)> = Vec::new();
        for (b0, b1) in blocked {
            if b0 > lo {
                gaps.push((lo.clone(), b0.clone()));
            }
            if b1 > lo {
                lo = b1;
            }
        }
        if lo < cell.y_high {
            gaps.push((lo, cell.y_high.clone()));
        }
        // prefer the representative itself when it is already clear
        let rep_y = self.shear.apply(&cell.point).y;
        let gap = gaps
            .iter()
            .find(|(a, b)| a < &rep_y && &rep_y < b)
            .or_else(|| gaps.iter().max_by(|a, b| (&a.1 - &a.0).cmp(&(&b.1 - &b.0))))?;
        let y = if gap.0 < rep_y && rep_y < gap.1 {
            rep_y
        } else {
            simplest_between(&gap.0, &gap.1)
        };
        Some(self.shear.invert(&ExactPoint::new(cell.x.clone(), y)))
    }
}

/// All points where two (non-vertical, left-to-right) segments meet.
fn segment_meets(s: &SweepSegment, t: &SweepSegment) -> Vec<ExactPoint> {
    let o1 = orientation(&s.l, &s.r, &t.l);
    let o2 = orientation(&s.l, &s.r, &t.r);
    let o3 = orientation(&t.l, &t.r, &s.l);
    let o4 = orientation(&t.l, &t.r, &s.r);
    use Orientation::Collinear;
    if o1 == Collinear && o2 == Collinear {
        // collinear: overlap endpoints (already events) become shared
        let mut out = Vec::new();
        for p in [&t.l, &t.r] {
            if in_box(&s.l, &s.r, p) {
                out.push(p.clone());
            }
        }
        for p in [&s.l, &s.r] {
            if in_box(&t.l, &t.r, p) {
                out.push(p.clone());
            }
        }
        return out;
    }
    if o1 != Collinear && o1 == o2 {
        return Vec::new();
    }
    if o3 != Collinear && o3 == o4 {
        return Vec::new();
    }
    line_intersection(&s.l, &s.r, &t.l, &t.r).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pt(x: i64, y: i64) -> ExactPoint {
        ExactPoint::from_ints(x, y)
    }

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(pt(a.0, a.1), pt(b.0, b.1))
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&pt(0, 0), &pt(1, 0), &pt(0, 1)).sign(), 1);
        assert_eq!(orientation(&pt(0, 0), &pt(1, 0), &pt(2, 0)).sign(), 0);
        let p = ExactPoint::new(rat(1, 3), rat(-2, 7));
        let q = ExactPoint::new(rat(5, 2), rat(1, 9));
        let r = ExactPoint::new(rat(-4, 5), rat(3, 2));
        assert_eq!(orientation(&p, &q, &r), orientation(&p, &r, &q).reverse());
    }

    #[test]
    fn triangle_membership() {
        let t = Triangle::new(pt(0, 0), pt(1, 0), pt(0, 1));
        let q = ExactPoint::new(rat(1, 4), rat(1, 4));
        assert_eq!(point_in_triangle(&q, &t).unwrap(), Location::Inside);
        assert_eq!(point_in_triangle(&pt(2, 2), &t).unwrap(), Location::Outside);
        let b = ExactPoint::new(rat(1, 2), int(0));
        assert_eq!(point_in_triangle(&b, &t).unwrap(), Location::Boundary);
        let flat = Triangle::new(pt(0, 0), pt(1, 1), pt(2, 2));
        assert!(point_in_triangle(&q, &flat).is_err());
    }

    #[test]
    fn crossing_parity_examples() {
        assert!(segments_cross_parity(&seg((0, -1), (0, 1)), &seg((-1, 0), (1, 0))).unwrap());
        assert!(!segments_cross_parity(&seg((0, 0), (1, 0)), &seg((0, 1), (1, 1))).unwrap());
        assert!(segments_cross_parity(&seg((0, 0), (1, 0)), &seg((1, 0), (1, 1))).is_err());
        // T-junction and collinear overlap
        assert!(segments_cross_parity(&seg((0, 0), (2, 0)), &seg((1, 0), (1, 1))).is_err());
        assert!(segments_cross_parity(&seg((0, 0), (2, 0)), &seg((1, 0), (3, 0))).is_err());
        // collinear but disjoint is fine
        assert!(!segments_cross_parity(&seg((0, 0), (1, 0)), &seg((2, 0), (3, 0))).unwrap());
        // endpoint on the supporting line only
        assert!(!segments_cross_parity(&seg((0, 0), (1, 0)), &seg((2, 0), (2, 1))).unwrap());
    }

    #[test]
    fn general_position_certificates() {
        let cfg = PointConfiguration::new(vec![pt(0, 0), pt(1, 1), pt(2, 2), pt(0, 1)]);
        assert!(!cfg.certified);
        let v = certify_general_position(&cfg).unwrap_err();
        assert_eq!(v, vec![PositionViolation::Collinear { i: 0, j: 1, k: 2 }]);
        let dup = PointConfiguration::new(vec![pt(0, 0), pt(0, 0), pt(1, 0)]);
        assert!(certify_general_position(&dup)
            .unwrap_err()
            .contains(&PositionViolation::Duplicate { i: 0, j: 1 }));
        let random = random_generic_points(12, 5, 1000, 7, 20).unwrap();
        assert!(random.certified);
        assert!(certify_general_position(&random).is_ok());
    }

    #[test]
    fn two_lines_give_four_quadrants() {
        let lines = [
            Line::new(pt(-1, 0), pt(1, 0)),
            Line::new(pt(0, -1), pt(0, 1)),
        ];
        let c = candidate_points(&[], &lines);
        assert_eq!(c.points.len(), 4);
        let mut quadrants: Vec<(bool, bool)> = c
            .points
            .iter()
            .map(|p| (p.x.is_positive(), p.y.is_positive()))
            .collect();
        quadrants.sort();
        quadrants.dedup();
        assert_eq!(quadrants.len(), 4);
        for p in c.all() {
            assert!(lines.iter().all(|l| !l.contains(p)));
        }
    }

    #[test]
    fn empty_and_parallel_inputs() {
        let c = candidate_points(&[], &[]);
        assert!(c.points.is_empty());
        let lines = [
            Line::new(pt(0, 0), pt(1, 1)),
            Line::new(pt(0, 3), pt(1, 4)),
        ];
        let c = candidate_points(&[], &lines);
        // below, between (twice) and above
        let sides: HashSet<(i8, i8)> = c
            .points
            .iter()
            .map(|p| {
                (
                    orientation(&lines[0].a, &lines[0].b, p).sign(),
                    orientation(&lines[1].a, &lines[1].b, p).sign(),
                )
            })
            .collect();
        assert_eq!(sides.len(), 3);
        assert!(c.all().all(|p| lines.iter().all(|l| !l.contains(p))));
    }

    #[test]
    fn concurrent_lines_get_every_sector() {
        let lines = [
            Line::new(pt(0, 0), pt(1, 0)),
            Line::new(pt(0, 0), pt(0, 1)),
            Line::new(pt(0, 0), pt(1, 1)),
        ];
        let c = candidate_points(&[], &lines);
        let sigs: HashSet<Vec<i8>> = c
            .points
            .iter()
            .map(|p| lines.iter().map(|l| orientation(&l.a, &l.b, p).sign()).collect())
            .collect();
        assert_eq!(sigs.len(), 6);
        assert!(sigs.iter().all(|s| s.iter().all(|&v| v != 0)));
    }

    #[test]
    fn segment_arrangement_of_a_triangle() {
        let segs = Triangle::new(pt(0, 0), pt(4, 0), pt(0, 4)).edges();
        let arr = SegmentArrangement::new(&segs);
        let t = Triangle::new(pt(0, 0), pt(4, 0), pt(0, 4));
        assert_eq!(arr.cells().len(), 1);
        assert_eq!(point_in_triangle(&arr.cells()[0].point, &t).unwrap(), Location::Inside);
        assert_eq!(point_in_triangle(arr.far_point(), &t).unwrap(), Location::Outside);
    }

    #[test]
    fn segment_arrangement_with_vertical_segments() {
        // a square: two vertical sides force a shear
        let segs = [
            seg((0, 0), (2, 0)),
            seg((2, 0), (2, 2)),
            seg((2, 2), (0, 2)),
            seg((0, 2), (0, 0)),
            seg((1, -1), (1, 3)),
        ];
        let arr = SegmentArrangement::new(&segs);
        let inside: HashSet<bool> = arr
            .cells()
            .iter()
            .map(|c| c.point.x < int(1))
            .collect();
        // both halves of the square are represented
        assert_eq!(inside.len(), 2);
        for c in arr.cells() {
            assert!(segs.iter().all(|s| !s.contains(&c.point)));
        }
    }

    #[test]
    fn generic_point_avoids_obstacles() {
        let segs = Triangle::new(pt(0, 0), pt(6, 0), pt(0, 6)).edges();
        let arr = SegmentArrangement::new(&segs);
        let cell = &arr.cells()[0];
        // obstacle straight through the representative
        let p = &cell.point;
        let through = Segment::new(
            ExactPoint::new(&p.x - int(1), &p.y - int(1)),
            ExactPoint::new(&p.x + int(1), &p.y + int(1)),
        );
        let q = arr.generic_point_in(cell, std::slice::from_ref(&through)).unwrap();
        assert!(!through.contains(&q));
        let t = Triangle::new(pt(0, 0), pt(6, 0), pt(0, 6));
        assert_eq!(point_in_triangle(&q, &t).unwrap(), Location::Inside);
    }

    #[test]
    fn serde_uses_rational_strings() {
        let p = ExactPoint::new(rat(3, 4), int(-2));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["3/4","-2/1"]"#);
        let back: ExactPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
