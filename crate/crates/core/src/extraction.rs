//! Complete multipartite extraction from tripartite graphs and partite
//! hypergraphs, with exhaustive oracles for small instances.
//!
//! The greedy extractors are finders, not certificates of non-existence: a
//! failure only means the dependent-choice greedy got stuck. Everything they
//! return is re-verified edge by edge.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;

/// Default cap on part sizes for the exhaustive oracles.
pub const DEFAULT_ORACLE_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractionError {
    #[error("part size {size} exceeds the oracle limit {limit}")]
    LimitExceeded { size: usize, limit: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn pair_slot(i: usize, j: usize) -> (usize, bool) {
    match (i, j) {
        (0, 1) => (0, false),
        (1, 0) => (0, true),
        (0, 2) => (1, false),
        (2, 0) => (1, true),
        (1, 2) => (2, false),
        (2, 1) => (2, true),
        _ => panic!("no edges inside part {i}"),
    }
}

/// A graph on `V₀ ⊔ V₁ ⊔ V₂` with edges only between distinct parts.
///
/// Adjacency is stored in both directions for every part pair, as rows of
/// bits indexed by the other part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripartiteGraph {
    sizes: [usize; 3],
    /// `forward[s][u]`: neighbours in the higher part of pair `s` of vertex `u`
    /// of the lower part; `backward` is the transpose.
    forward: [Vec<BitVec>; 3],
    backward: [Vec<BitVec>; 3],
}

impl TripartiteGraph {
    pub fn new(sizes: [usize; 3]) -> Self {
        let make = |rows: usize, cols: usize| vec![BitVec::zeros(cols); rows];
        Self {
            sizes,
            forward: [
                make(sizes[0], sizes[1]),
                make(sizes[0], sizes[2]),
                make(sizes[1], sizes[2]),
            ],
            backward: [
                make(sizes[1], sizes[0]),
                make(sizes[2], sizes[0]),
                make(sizes[2], sizes[1]),
            ],
        }
    }

    pub fn complete(sizes: [usize; 3]) -> Self {
        let mut g = Self::new(sizes);
        for (i, j) in PAIRS {
            for u in 0..sizes[i] {
                for v in 0..sizes[j] {
                    g.add_edge(i, u, j, v);
                }
            }
        }
        g
    }

    /// Each cross-part edge present independently with probability `density`.
    pub fn random(sizes: [usize; 3], density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Self::new(sizes);
        for (i, j) in PAIRS {
            for u in 0..sizes[i] {
                for v in 0..sizes[j] {
                    if rng.gen_bool(density) {
                        g.add_edge(i, u, j, v);
                    }
                }
            }
        }
        g
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn add_edge(&mut self, i: usize, u: usize, j: usize, v: usize) {
        let (s, swapped) = pair_slot(i, j);
        let (lo, hi) = if swapped { (v, u) } else { (u, v) };
        self.forward[s][lo].set(hi, true);
        self.backward[s][hi].set(lo, true);
    }

    pub fn remove_edge(&mut self, i: usize, u: usize, j: usize, v: usize) {
        let (s, swapped) = pair_slot(i, j);
        let (lo, hi) = if swapped { (v, u) } else { (u, v) };
        self.forward[s][lo].set(hi, false);
        self.backward[s][hi].set(lo, false);
    }

    pub fn has_edge(&self, i: usize, u: usize, j: usize, v: usize) -> bool {
        let (s, swapped) = pair_slot(i, j);
        let (lo, hi) = if swapped { (v, u) } else { (u, v) };
        self.forward[s][lo].get(hi)
    }

    /// Neighbours in part `j` of vertex `u` of part `i`.
    pub fn neighbours(&self, i: usize, u: usize, j: usize) -> &BitVec {
        let (s, swapped) = pair_slot(i, j);
        if swapped {
            &self.backward[s][u]
        } else {
            &self.forward[s][u]
        }
    }

    pub fn edge_count(&self) -> usize {
        self.forward.iter().flatten().map(BitVec::count_ones).sum()
    }

    /// Edges as `(i, u, j, v)` with `i < j`, in part-pair then row order.
    pub fn edges(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::new();
        for (s, (i, j)) in PAIRS.iter().enumerate() {
            for (u, row) in self.forward[s].iter().enumerate() {
                out.extend(row.iter_ones().map(|v| (*i, u, *j, v)));
            }
        }
        out
    }

    /// Whether `parts[0] × parts[1] × parts[2]` spans a complete tripartite subgraph.
    pub fn is_complete_on(&self, parts: &[Vec<usize>; 3]) -> bool {
        PAIRS.iter().all(|&(i, j)| {
            parts[i]
                .iter()
                .all(|&u| parts[j].iter().all(|&v| self.has_edge(i, u, j, v)))
        })
    }

    /// Transversal triangle degree of vertex `u` in part `i`.
    pub fn triangle_degree(&self, i: usize, u: usize) -> usize {
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let nk = self.neighbours(i, u, k);
        self.neighbours(i, u, j)
            .iter_ones()
            .map(|v| self.neighbours(j, v, k).and_count(nk))
            .sum()
    }
}

/// Transversal triangles, via rows of the bit-matrices:
/// `Σ_a Σ_{b ∈ N₁(a)} |N₂(a) ∩ N₂(b)|`.
pub fn count_triangles(g: &TripartiteGraph) -> u64 {
    let mut total = 0u64;
    for a in 0..g.sizes[0] {
        let n02 = &g.forward[1][a];
        for b in g.forward[0][a].iter_ones() {
            total += g.forward[2][b].and_count(n02) as u64;
        }
    }
    total
}

/// One dependent-choice pass: peel `t` vertices of part `order[0]`, then `t`
/// of `order[1]` inside the surviving neighbourhoods, then take `t` common
/// neighbours in `order[2]`.
fn greedy_pass(g: &TripartiteGraph, order: [usize; 3], t: usize) -> Option<[Vec<usize>; 3]> {
    let [p, q, r] = order;
    let mut cand_q = BitVec::ones(g.sizes[q]);
    let mut cand_r = BitVec::ones(g.sizes[r]);
    let mut chosen_p = Vec::with_capacity(t);
    for _ in 0..t {
        let mut best: Option<(usize, usize)> = None;
        for c in 0..g.sizes[p] {
            if chosen_p.contains(&c) {
                continue;
            }
            let mut aq = cand_q.clone();
            aq.and_assign(g.neighbours(p, c, q));
            let mut ar = cand_r.clone();
            ar.and_assign(g.neighbours(p, c, r));
            let score: usize = aq.iter_ones().map(|a| g.neighbours(q, a, r).and_count(&ar)).sum();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((c, score));
            }
        }
        let (c, score) = best?;
        if score == 0 {
            return None;
        }
        cand_q.and_assign(g.neighbours(p, c, q));
        cand_r.and_assign(g.neighbours(p, c, r));
        chosen_p.push(c);
    }
    let mut chosen_q = Vec::with_capacity(t);
    for _ in 0..t {
        let (a, _) = cand_q
            .iter_ones()
            .filter(|a| !chosen_q.contains(a))
            .map(|a| (a, g.neighbours(q, a, r).and_count(&cand_r)))
            .fold(None, |acc: Option<(usize, usize)>, (a, s)| match acc {
                Some((_, bs)) if bs >= s => acc,
                _ => Some((a, s)),
            })?;
        cand_r.and_assign(g.neighbours(q, a, r));
        chosen_q.push(a);
    }
    let chosen_r: Vec<usize> = cand_r.iter_ones().take(t).collect();
    if chosen_r.len() < t {
        return None;
    }
    let mut parts: [Vec<usize>; 3] = Default::default();
    parts[p] = chosen_p;
    parts[q] = chosen_q;
    parts[r] = chosen_r;
    for part in parts.iter_mut() {
        part.sort_unstable();
    }
    Some(parts)
}

/// Greedy complete `K(t,t,t)` finder.
///
/// The first peeling order puts larger parts first and breaks ties by the
/// best vertex triangle degree; the remaining orders serve as balancing
/// passes when the first one gets stuck.
pub fn extract_tripartite(g: &TripartiteGraph, t: usize) -> Option<[Vec<usize>; 3]> {
    if t == 0 || g.sizes.iter().any(|&s| s < t) {
        return None;
    }
    let best_degree = |i: usize| (0..g.sizes[i]).map(|u| g.triangle_degree(i, u)).max().unwrap_or(0);
    let degrees = [best_degree(0), best_degree(1), best_degree(2)];
    let mut orders: Vec<[usize; 3]> = (0..3)
        .permutations(3)
        .map(|p| [p[0], p[1], p[2]])
        .collect();
    orders.sort_by_key(|o| {
        (
            std::cmp::Reverse(g.sizes[o[0]]),
            std::cmp::Reverse(degrees[o[0]]),
            std::cmp::Reverse(g.sizes[o[1]]),
            std::cmp::Reverse(degrees[o[1]]),
            *o,
        )
    });
    orders.into_iter().find_map(|order| {
        greedy_pass(g, order, t).filter(|parts| g.is_complete_on(parts))
    })
}

/// Largest `t` for which [`extract_tripartite`] succeeds, with its parts.
pub fn extract_tripartite_max(g: &TripartiteGraph) -> Option<(usize, [Vec<usize>; 3])> {
    let top = *g.sizes.iter().min().unwrap_or(&0);
    (1..=top)
        .rev()
        .find_map(|t| extract_tripartite(g, t).map(|p| (t, p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteOptimum {
    pub t: usize,
    pub parts: [Vec<usize>; 3],
}

/// Exact maximum `t` admitting a complete `K(t,t,t)`, by exhaustive search
/// over `t`-subsets of the first two parts.
pub fn brute_max_complete_tripartite(
    g: &TripartiteGraph,
    limit: usize,
) -> Result<TripartiteOptimum, ExtractionError> {
    if let Some(&size) = g.sizes.iter().find(|&&s| s > limit) {
        return Err(ExtractionError::LimitExceeded { size, limit });
    }
    let top = *g.sizes.iter().min().unwrap_or(&0);
    for t in (1..=top).rev() {
        for a in (0..g.sizes[0]).combinations(t) {
            for b in (0..g.sizes[1]).combinations(t) {
                if !a.iter().all(|&u| b.iter().all(|&v| g.has_edge(0, u, 1, v))) {
                    continue;
                }
                let c: Vec<usize> = (0..g.sizes[2])
                    .filter(|&w| {
                        a.iter().all(|&u| g.has_edge(0, u, 2, w))
                            && b.iter().all(|&v| g.has_edge(1, v, 2, w))
                    })
                    .take(t)
                    .collect();
                if c.len() == t {
                    return Ok(TripartiteOptimum {
                        t,
                        parts: [a, b, c],
                    });
                }
            }
        }
    }
    Ok(TripartiteOptimum {
        t: 0,
        parts: Default::default(),
    })
}

/// A `(k)`-partite `k`-uniform hypergraph; edges are transversal tuples stored
/// as bits in mixed radix with part 0 most significant.
///
/// With all parts of size `n` this indexing coincides with the rank of
/// top-dimensional faces of the join complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartiteHypergraph {
    sizes: Vec<usize>,
    members: BitVec,
}

impl PartiteHypergraph {
    pub fn new(sizes: Vec<usize>) -> Self {
        let total = sizes.iter().product();
        Self {
            sizes,
            members: BitVec::zeros(total),
        }
    }

    pub fn from_members(sizes: Vec<usize>, members: BitVec) -> Result<Self, ExtractionError> {
        let total: usize = sizes.iter().product();
        if members.len() != total {
            return Err(ExtractionError::Invalid(format!(
                "{} membership bits for {} tuples",
                members.len(),
                total
            )));
        }
        Ok(Self { sizes, members })
    }

    pub fn complete(sizes: Vec<usize>) -> Self {
        let total = sizes.iter().product();
        Self {
            sizes,
            members: BitVec::ones(total),
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn members(&self) -> &BitVec {
        &self.members
    }

    pub fn uniformity(&self) -> usize {
        self.sizes.len()
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.sizes.len());
        tuple
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&v, &s)| acc * s + v)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.members.get(self.index(tuple))
    }

    pub fn set(&mut self, tuple: &[usize], present: bool) {
        let i = self.index(tuple);
        self.members.set(i, present);
    }

    pub fn edge_count(&self) -> usize {
        self.members.count_ones()
    }

    /// `|E| / Π|V_i|`.
    pub fn density(&self) -> num_rational::BigRational {
        let total = self.members.len().max(1);
        num_rational::BigRational::new(self.edge_count().into(), total.into())
    }

    /// Every tuple of `parts[0] × ⋯ × parts[k−1]` is an edge.
    pub fn is_complete_on(&self, parts: &[Vec<usize>]) -> bool {
        parts
            .iter()
            .map(|p| p.iter().copied())
            .multi_cartesian_product()
            .all(|tuple| self.contains(&tuple))
    }
}

/// Greedy dependent choice on the last part, recursing into the link.
fn greedy_box(sizes: &[usize], members: &BitVec, t: usize) -> Option<Vec<Vec<usize>>> {
    let k = sizes.len();
    if k == 1 {
        let chosen: Vec<usize> = members.iter_ones().take(t).collect();
        return (chosen.len() == t).then(|| vec![chosen]);
    }
    let last = sizes[k - 1];
    let prefix: usize = sizes[..k - 1].iter().product();
    // slices[c]: tuples of the first k−1 parts completed by vertex c of the last part
    let slices: Vec<BitVec> = (0..last)
        .map(|c| BitVec::from_indices(prefix, (0..prefix).filter(|&x| members.get(x * last + c))))
        .collect();
    let mut link = BitVec::ones(prefix);
    let mut chosen = Vec::with_capacity(t);
    for _ in 0..t {
        let (c, score) = (0..last)
            .filter(|c| !chosen.contains(c))
            .map(|c| (c, link.and_count(&slices[c])))
            .fold(None, |acc: Option<(usize, usize)>, (c, s)| match acc {
                Some((_, bs)) if bs >= s => acc,
                _ => Some((c, s)),
            })?;
        if score == 0 {
            return None;
        }
        link.and_assign(&slices[c]);
        chosen.push(c);
    }
    let mut parts = greedy_box(&sizes[..k - 1], &link, t)?;
    chosen.sort_unstable();
    parts.push(chosen);
    Some(parts)
}

/// Greedy complete box `P₀ × ⋯ × P_d` with `|P_i| = t`, verified before return.
pub fn extract_box(h: &PartiteHypergraph, t: usize) -> Option<Vec<Vec<usize>>> {
    if t == 0 || h.sizes.iter().any(|&s| s < t) {
        return None;
    }
    greedy_box(&h.sizes, &h.members, t).filter(|parts| h.is_complete_on(parts))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxOptimum {
    pub t: usize,
    pub parts: Vec<Vec<usize>>,
    /// `false` when the node budget ran out; `t` is then only a lower bound.
    pub complete: bool,
}

/// Exhaustive oracle: every choice of `t`-subsets of all parts but the last,
/// completed by the common last-part vertices.
pub fn brute_max_complete_box(h: &PartiteHypergraph, limit: usize) -> Result<BoxOptimum, ExtractionError> {
    if let Some(&size) = h.sizes.iter().find(|&&s| s > limit) {
        return Err(ExtractionError::LimitExceeded { size, limit });
    }
    let k = h.sizes.len();
    let top = *h.sizes.iter().min().unwrap_or(&0);
    for t in (1..=top).rev() {
        let choices = h.sizes[..k - 1]
            .iter()
            .map(|&s| (0..s).combinations(t).collect::<Vec<_>>())
            .multi_cartesian_product();
        for prefix in choices {
            let last: Vec<usize> = (0..h.sizes[k - 1])
                .filter(|&w| {
                    prefix
                        .iter()
                        .map(|p| p.iter().copied())
                        .multi_cartesian_product()
                        .all(|mut tuple| {
                            tuple.push(w);
                            h.contains(&tuple)
                        })
                })
                .take(t)
                .collect();
            if last.len() == t {
                let mut parts = prefix;
                parts.push(last);
                return Ok(BoxOptimum {
                    t,
                    parts,
                    complete: true,
                });
            }
        }
    }
    Ok(BoxOptimum {
        t: 0,
        parts: vec![Vec::new(); k],
        complete: true,
    })
}

struct BoxSearch<'a> {
    sizes: &'a [usize],
    budget: u64,
    nodes: u64,
}

impl BoxSearch<'_> {
    /// Finds `t`-subsets for parts `level..` given the reduced masks
    /// `rows[x]` (tuples `x` of parts `level..k−1`, bits over the last part).
    fn feasible(&mut self, level: usize, rows: &[u64], t: usize) -> Option<Option<Vec<Vec<usize>>>> {
        let k = self.sizes.len();
        if level == k - 1 {
            let mask = rows[0];
            return Some((mask.count_ones() as usize >= t).then(|| {
                vec![(0..self.sizes[level]).filter(|&w| mask >> w & 1 == 1).take(t).collect()]
            }));
        }
        let n = self.sizes[level];
        let stride: usize = self.sizes[level + 1..k - 1].iter().product();
        // a vertex is usable only if some row of its slice still has t bits
        let viable: Vec<usize> = (0..n)
            .filter(|&v| rows[v * stride..(v + 1) * stride].iter().any(|m| m.count_ones() as usize >= t))
            .collect();
        if viable.len() < t {
            return Some(None);
        }
        let mut chosen = Vec::with_capacity(t);
        let acc = vec![u64::MAX; stride];
        self.choose(level, rows, stride, &viable, 0, &mut chosen, acc, t)
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        level: usize,
        rows: &[u64],
        stride: usize,
        viable: &[usize],
        from: usize,
        chosen: &mut Vec<usize>,
        acc: Vec<u64>,
        t: usize,
    ) -> Option<Option<Vec<Vec<usize>>>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if chosen.len() == t {
            let sub = self.feasible(level + 1, &acc, t)?;
            return Some(sub.map(|mut rest| {
                rest.insert(0, chosen.clone());
                rest
            }));
        }
        let need = t - chosen.len();
        for idx in from..viable.len() {
            if viable.len() - idx < need {
                break;
            }
            let v = viable[idx];
            let next: Vec<u64> = acc
                .iter()
                .zip(&rows[v * stride..(v + 1) * stride])
                .map(|(a, b)| a & b)
                .collect();
            if next.iter().all(|m| (m.count_ones() as usize) < t) {
                continue;
            }
            chosen.push(v);
            let found = self.choose(level, rows, stride, viable, idx + 1, chosen, next, t)?;
            chosen.pop();
            if found.is_some() {
                return Some(found);
            }
        }
        Some(None)
    }
}

/// Exact maximum complete box by branch and bound on the part size.
///
/// Sizes are tried upward from 1; feasibility is monotone in `t`, so the first
/// infeasible size ends the search. The last part must have at most 64
/// vertices. When `node_budget` runs out the best size found so far is
/// returned with `complete = false`.
pub fn max_complete_box(h: &PartiteHypergraph, node_budget: u64) -> Result<BoxOptimum, ExtractionError> {
    let k = h.sizes.len();
    if k == 0 {
        return Err(ExtractionError::Invalid("no parts".into()));
    }
    let last = h.sizes[k - 1];
    if last > 64 {
        return Err(ExtractionError::LimitExceeded { size: last, limit: 64 });
    }
    let prefix: usize = h.sizes[..k - 1].iter().product();
    let rows: Vec<u64> = (0..prefix)
        .map(|x| {
            (0..last).fold(0u64, |m, w| {
                if h.members.get(x * last + w) {
                    m | 1 << w
                } else {
                    m
                }
            })
        })
        .collect();
    let mut search = BoxSearch {
        sizes: &h.sizes,
        budget: node_budget,
        nodes: 0,
    };
    let mut best = BoxOptimum {
        t: 0,
        parts: vec![Vec::new(); k],
        complete: true,
    };
    let top = *h.sizes.iter().min().unwrap_or(&0);
    for t in 1..=top {
        match search.feasible(0, &rows, t) {
            None => {
                best.complete = false;
                return Ok(best);
            }
            Some(None) => break,
            Some(Some(parts)) => {
                best.t = t;
                best.parts = parts;
            }
        }
    }
    Ok(best)
}

/// JSON adjacency lists keyed by part pair, e.g. `"0-1": [[u, v], ...]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteGraphRecord {
    pub parts: [usize; 3],
    pub edges: std::collections::BTreeMap<String, Vec<[usize; 2]>>,
}

impl From<&TripartiteGraph> for TripartiteGraphRecord {
    fn from(g: &TripartiteGraph) -> Self {
        let mut edges = std::collections::BTreeMap::new();
        for (i, j) in PAIRS {
            edges.insert(format!("{i}-{j}"), Vec::new());
        }
        for (i, u, j, v) in g.edges() {
            edges
                .get_mut(&format!("{i}-{j}"))
                .expect("pair key")
                .push([u, v]);
        }
        Self {
            parts: g.sizes,
            edges,
        }
    }
}

impl TryFrom<&TripartiteGraphRecord> for TripartiteGraph {
    type Error = ExtractionError;

    fn try_from(r: &TripartiteGraphRecord) -> Result<Self, Self::Error> {
        let mut g = TripartiteGraph::new(r.parts);
        for (key, list) in &r.edges {
            let (i, j) = key
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .filter(|&(i, j)| i < j && j < 3)
                .ok_or_else(|| ExtractionError::Invalid(format!("bad part pair {key:?}")))?;
            for &[u, v] in list {
                if u >= r.parts[i] || v >= r.parts[j] {
                    return Err(ExtractionError::Invalid(format!("edge {key}:{u}-{v} out of range")));
                }
                g.add_edge(i, u, j, v);
            }
        }
        Ok(g)
    }
}

/// JSON hypergraph: part sizes and the list of edge tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphRecord {
    pub parts: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
}

impl From<&PartiteHypergraph> for HypergraphRecord {
    fn from(h: &PartiteHypergraph) -> Self {
        let edges = h
            .members
            .iter_ones()
            .map(|mut x| {
                let mut tuple = vec![0; h.sizes.len()];
                for (slot, &s) in h.sizes.iter().enumerate().rev() {
                    tuple[slot] = x % s;
                    x /= s;
                }
                tuple
            })
            .collect();
        Self {
            parts: h.sizes.clone(),
            edges,
        }
    }
}

impl TryFrom<&HypergraphRecord> for PartiteHypergraph {
    type Error = ExtractionError;

    fn try_from(r: &HypergraphRecord) -> Result<Self, Self::Error> {
        let mut h = PartiteHypergraph::new(r.parts.clone());
        for e in &r.edges {
            if e.len() != r.parts.len() || e.iter().zip(&r.parts).any(|(v, s)| v >= s) {
                return Err(ExtractionError::Invalid(format!("edge {e:?} out of range")));
            }
            h.set(e, true);
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_triangles(g: &TripartiteGraph) -> u64 {
        let [a, b, c] = g.sizes();
        let mut count = 0;
        for x in 0..a {
            for y in 0..b {
                for z in 0..c {
                    if g.has_edge(0, x, 1, y) && g.has_edge(0, x, 2, z) && g.has_edge(1, y, 2, z) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn triangle_counts() {
        assert_eq!(count_triangles(&TripartiteGraph::complete([4, 4, 4])), 64);
        assert_eq!(count_triangles(&TripartiteGraph::new([4, 4, 4])), 0);
        for seed in 0..20 {
            let g = TripartiteGraph::random([6, 6, 6], 0.5, seed);
            assert_eq!(count_triangles(&g), brute_triangles(&g));
        }
        let g = TripartiteGraph::random([3, 5, 7], 0.6, 99);
        assert_eq!(count_triangles(&g), brute_triangles(&g));
    }

    #[test]
    fn extraction_on_complete_graph() {
        let g = TripartiteGraph::complete([5, 5, 5]);
        for t in 1..=5 {
            let parts = extract_tripartite(&g, t).unwrap();
            assert_eq!(parts, [(0..t).collect::<Vec<_>>(), (0..t).collect(), (0..t).collect()]);
        }
        assert!(extract_tripartite(&g, 6).is_none());
    }

    #[test]
    fn triangle_free_fails() {
        let mut g = TripartiteGraph::new([3, 3, 3]);
        // complete between parts 0 and 1 only
        for u in 0..3 {
            for v in 0..3 {
                g.add_edge(0, u, 1, v);
            }
        }
        assert!(extract_tripartite(&g, 1).is_none());
        assert_eq!(brute_max_complete_tripartite(&g, 8).unwrap().t, 0);
    }

    #[test]
    fn oracle_examples() {
        let mut g = TripartiteGraph::complete([3, 3, 3]);
        g.remove_edge(0, 1, 2, 2);
        let opt = brute_max_complete_tripartite(&g, 8).unwrap();
        assert_eq!(opt.t, 2);
        assert!(g.is_complete_on(&opt.parts));
        let mut single = TripartiteGraph::new([3, 3, 3]);
        single.add_edge(0, 1, 1, 2);
        single.add_edge(0, 1, 2, 0);
        single.add_edge(1, 2, 2, 0);
        assert_eq!(brute_max_complete_tripartite(&single, 8).unwrap().t, 1);
        assert!(matches!(
            brute_max_complete_tripartite(&TripartiteGraph::new([9, 2, 2]), 8),
            Err(ExtractionError::LimitExceeded { size: 9, .. })
        ));
    }

    #[test]
    fn greedy_success_is_bounded_by_oracle() {
        for seed in 0..30 {
            let g = TripartiteGraph::random([7, 7, 7], 0.5, seed);
            let opt = brute_max_complete_tripartite(&g, 8).unwrap().t;
            for t in 1..=7 {
                if let Some(parts) = extract_tripartite(&g, t) {
                    assert!(g.is_complete_on(&parts));
                    assert!(opt >= t, "seed {seed}: greedy {t} > oracle {opt}");
                }
            }
        }
    }

    #[test]
    fn box_extraction_examples() {
        let h = PartiteHypergraph::complete(vec![4, 4, 4]);
        assert_eq!(extract_box(&h, 3).unwrap(), vec![vec![0, 1, 2]; 3]);
        for n in 2..=5 {
            let mut h = PartiteHypergraph::complete(vec![n, n, n]);
            h.set(&[1, 0, n - 1], false);
            assert!(extract_box(&h, n).is_none());
            let parts = extract_box(&h, n - 1).unwrap();
            assert!(h.is_complete_on(&parts));
        }
    }

    #[test]
    fn bnb_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let sizes = vec![rng.gen_range(1..=5), rng.gen_range(1..=5), rng.gen_range(1..=5)];
            let p = rng.gen_range(0.3..0.95);
            let total: usize = sizes.iter().product();
            let members = BitVec::from_indices(total, (0..total).filter(|_| rng.gen_bool(p)));
            let h = PartiteHypergraph::from_members(sizes, members).unwrap();
            let exact = max_complete_box(&h, u64::MAX).unwrap();
            let brute = brute_max_complete_box(&h, 8).unwrap();
            assert_eq!(exact.t, brute.t);
            assert!(exact.complete);
            if exact.t > 0 {
                assert!(h.is_complete_on(&exact.parts));
            }
        }
    }

    #[test]
    fn bnb_budget_reports_lower_bound() {
        let h = PartiteHypergraph::complete(vec![6, 6, 6]);
        let r = max_complete_box(&h, 3).unwrap();
        assert!(!r.complete);
        assert!(r.t < 6);
    }

    #[test]
    fn four_uniform_boxes() {
        let mut h = PartiteHypergraph::complete(vec![3, 3, 3, 3]);
        h.set(&[0, 0, 0, 0], false);
        assert_eq!(max_complete_box(&h, u64::MAX).unwrap().t, 2);
        assert_eq!(brute_max_complete_box(&h, 8).unwrap().t, 2);
        assert!(extract_box(&h, 2).is_some());
    }

    #[test]
    fn records_round_trip() {
        let g = TripartiteGraph::random([3, 4, 5], 0.5, 1);
        let rec = TripartiteGraphRecord::from(&g);
        let json = serde_json::to_string(&rec).unwrap();
        let back: TripartiteGraphRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(TripartiteGraph::try_from(&back).unwrap(), g);
        let mut h = PartiteHypergraph::new(vec![2, 3, 2]);
        h.set(&[1, 2, 0], true);
        h.set(&[0, 1, 1], true);
        let rec = HypergraphRecord::from(&h);
        assert_eq!(rec.edges, vec![vec![0, 1, 1], vec![1, 2, 0]]);
        assert_eq!(PartiteHypergraph::try_from(&rec).unwrap(), h);
    }
}
