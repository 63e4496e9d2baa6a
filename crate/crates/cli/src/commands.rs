use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use pachlab_core::bounds::{
    coloring_union_bound, coloring_upper_estimate, pach_threshold_coloring, pach_threshold_sphere, sphere_union_bound,
    COLORING_UPPER_CONSTANT, SPHERE_UPPER_CONSTANT,
};
use pachlab_core::cochains::{
    boundary, coboundary, cofilling_constant, cohomology_rank, gromov_bound, minimal_cofilling, CochainRecord,
    CofillingBudget, CofillingMode, F2Chain, F2Cochain, DEFAULT_COSET_BITS, DEFAULT_MATRIX_LIMIT,
};
use pachlab_core::coloring::{
    build_pushed_map, clique_probability_oracle, minimal_good_m, search_coloring, ApexRule, ColoringRecord,
    PushedMapParams, TwoColoring, DEFAULT_SAMPLES, DEFAULT_SELECTOR_BUDGET, DEFAULT_SUBSET_BUDGET,
};
use pachlab_core::extraction::{
    brute_max_complete_box, brute_max_complete_tripartite, count_triangles, extract_box, extract_tripartite,
    extract_tripartite_max, max_complete_box, HypergraphRecord, PartiteHypergraph, TripartiteGraph,
    TripartiteGraphRecord, DEFAULT_ORACLE_LIMIT,
};
use pachlab_core::geometry::random_generic_points;
use pachlab_core::pipeline::{run_pipeline, PipelineOptions, DEFAULT_PATH_RETRIES};
use pachlab_core::pl_map::{affine_map, validate_map, PLMap};
use pachlab_core::rational::{format_rational, parse_rational};
use pachlab_core::sphere::{sphere_upper_experiment, CandidateStrategy, SphereExperimentConfig, DEFAULT_NODE_BUDGET};
use pachlab_core::JoinComplex;

use crate::error::CliError;
use crate::{Artifact, Format, GlobalOpts};

fn seed(g: &GlobalOpts, command: &'static str) -> Result<u64, CliError> {
    g.seed.ok_or(CliError::MissingSeed { command })
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn positive(name: &str, v: u64) -> Result<u64, CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(v)
}

fn no_csv(g: &GlobalOpts, command: &str) -> Result<(), CliError> {
    if g.format == Format::Csv {
        return Err(CliError::Usage(format!("{command} has no CSV output")));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct ChainsVerify {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Largest coboundary matrix, in entries, for the rank computation.
    #[arg(long, default_value_t = DEFAULT_MATRIX_LIMIT as u64)]
    pub budget_matrix: u64,
}

impl ChainsVerify {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "chains-verify")?;
        positive("budget-matrix", self.budget_matrix)?;
        let c = JoinComplex::new(self.d, self.n)?;
        let mut boundary_squares = true;
        let mut coboundary_squares = true;
        let mut adjoint = true;
        for k in 0..=self.d {
            for r in 0..c.face_count(k)? {
                if k >= 1 {
                    let once = boundary(&c, &F2Chain::from_faces(&c, k, [r])?)?;
                    if k >= 2 && !boundary(&c, &once)?.is_zero() {
                        boundary_squares = false;
                    }
                }
                if k < self.d {
                    let up = coboundary(&c, &F2Cochain::from_faces(&c, k, [r])?)?;
                    if k + 1 < self.d && !coboundary(&c, &up)?.is_zero() {
                        coboundary_squares = false;
                    }
                    // ⟨δe_σ, e_τ⟩ = ⟨e_σ, ∂e_τ⟩ on the basis: τ ∈ δσ exactly when σ ∈ ∂τ.
                    for tau in 0..c.face_count(k + 1)? {
                        let down = boundary(&c, &F2Chain::from_faces(&c, k + 1, [tau])?)?;
                        if up.bits().get(tau) != down.bits().get(r) {
                            adjoint = false;
                        }
                    }
                }
            }
        }
        let limit = self.budget_matrix as usize;
        let ranks = (0..=self.d)
            .map(|k| cohomology_rank(&c, k, limit))
            .collect::<Result<Vec<_>, _>>()?;
        let counts = (0..=self.d).map(|k| c.face_count(k)).collect::<Result<Vec<_>, _>>()?;
        let ok = boundary_squares && coboundary_squares && adjoint;
        Ok(Artifact::Report {
            config: json!({ "d": self.d, "n": self.n, "budget_matrix": self.budget_matrix }),
            result: json!({
                "ok": ok,
                "face_counts": counts,
                "boundary_squares_to_zero": boundary_squares,
                "coboundary_squares_to_zero": coboundary_squares,
                "adjoint_on_basis": adjoint,
                "cohomology_ranks": ranks,
            }),
        })
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Args, Debug)]
pub struct Cofill {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Degree of the coboundary to cofill.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Cochain record of the coboundary; a random coboundary is drawn otherwise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Largest kernel dimension searched exhaustively.
    #[arg(long, default_value_t = DEFAULT_COSET_BITS)]
    pub budget_coset_bits: u32,
    #[arg(long, default_value_t = DEFAULT_MATRIX_LIMIT as u64)]
    pub budget_matrix: u64,
}

impl Cofill {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "cofill")?;
        positive("budget-coset-bits", self.budget_coset_bits as u64)?;
        positive("budget-matrix", self.budget_matrix)?;
        let (complex, b) = match &self.input {
            Some(path) => {
                let record: CochainRecord =
                    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(e.to_string()))?;
                record.decode()?
            }
            None => {
                let seed = seed(g, "cofill")?;
                if self.k == 0 {
                    return Err(CliError::Usage("--k must be at least 1".into()));
                }
                let c = JoinComplex::new(self.d, self.n)?;
                let len = c.face_count(self.k - 1)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let ones = (0..len).filter(|_| rng.gen::<bool>());
                let a = F2Cochain::from_faces(&c, self.k - 1, ones)?;
                let b = coboundary(&c, &a)?;
                (c, b)
            }
        };
        let mode = match self.mode {
            ModeArg::Exact => CofillingMode::Exact,
            ModeArg::Greedy => CofillingMode::Greedy,
        };
        let budget = CofillingBudget {
            matrix_limit: self.budget_matrix as usize,
            coset_bits: self.budget_coset_bits,
        };
        let report = minimal_cofilling(&complex, &b, mode, budget)?;
        let constant = cofilling_constant(complex.d(), complex.n(), b.k())?;
        Ok(Artifact::Report {
            config: json!({
                "d": complex.d(), "n": complex.n(), "k": b.k(), "mode": mode,
                "input": self.input, "budget_coset_bits": self.budget_coset_bits,
            }),
            result: json!({
                "b": CochainRecord::new(&complex, &b),
                "a": CochainRecord::new(&complex, &report.a),
                "weight_b": b.weight(),
                "weight_a": report.a.weight(),
                "ratio": format_rational(&report.ratio),
                "cofilling_constant": format_rational(&constant),
                "within_constant": report.ratio <= constant,
                "exact": report.exact,
            }),
        })
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum StrategyArg {
    Sweep,
    Offsets,
    Random,
}

#[derive(Args, Debug)]
pub struct SphereExp {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Number of random fillings; filling seeds are seed, seed+1, ...
    #[arg(long, default_value_t = 10)]
    pub fillings: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Sweep)]
    pub strategy: StrategyArg,
    /// Candidate count for the random strategy.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget_nodes: u64,
    /// Skip the all-standard control filling.
    #[arg(long)]
    pub no_control: bool,
}

impl SphereExp {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        let seed = seed(g, "sphere-exp")?;
        positive("fillings", self.fillings)?;
        positive("budget-nodes", self.budget_nodes)?;
        let mut cfg = SphereExperimentConfig::new(self.n, (0..self.fillings).map(|i| seed.wrapping_add(i)).collect());
        cfg.config_seed = seed;
        cfg.strategy = match self.strategy {
            StrategyArg::Sweep => CandidateStrategy::SegmentSweep,
            StrategyArg::Offsets => CandidateStrategy::LineOffsets,
            StrategyArg::Random => CandidateStrategy::RandomSample { count: self.samples },
        };
        cfg.node_budget = self.budget_nodes;
        cfg.include_control = !self.no_control;
        cfg.timing = g.timing;
        let report = sphere_upper_experiment(&cfg)?;
        let config = to_value(&cfg);
        Ok(match g.format {
            Format::Csv => Artifact::Csv { config, body: report.to_csv() },
            Format::Json => Artifact::Report { config, result: to_value(&report) },
        })
    }
}

#[derive(Args, Debug)]
pub struct ColorSearch {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    /// Target part size of the forbidden monochromatic-free subgraphs.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub retries: usize,
    /// Exhaustive selector limit before switching to sampling.
    #[arg(long, default_value_t = DEFAULT_SELECTOR_BUDGET)]
    pub budget_selectors: u64,
    /// Also report the smallest m at which the found coloring verifies.
    #[arg(long)]
    pub minimal_m: bool,
}

impl ColorSearch {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "color-search")?;
        let seed = seed(g, "color-search")?;
        positive("budget-selectors", self.budget_selectors)?;
        positive("retries", self.retries as u64)?;
        let start = Instant::now();
        let outcome = search_coloring(self.n, self.d, self.m, seed, self.retries, self.budget_selectors)?;
        let minimal = if self.minimal_m {
            let complex = JoinComplex::new(self.d, self.n)?;
            minimal_good_m(&complex, &outcome.coloring, self.budget_selectors)?
        } else {
            None
        };
        let mut result = json!({
            "coloring": ColoringRecord::from(&outcome.coloring),
            "attempts": outcome.attempts,
            "verify": outcome.report,
            "minimal_m": minimal,
            "upper_estimate": coloring_upper_estimate(self.n as u64, self.d as u32),
        });
        if g.timing {
            result["wall_ms"] = json!(start.elapsed().as_millis());
        }
        Ok(Artifact::Report {
            config: json!({
                "d": self.d, "n": self.n, "m": self.m, "retries": self.retries,
                "budget_selectors": self.budget_selectors, "samples": DEFAULT_SAMPLES,
            }),
            result,
        })
    }
}

#[derive(Args, Debug)]
pub struct CliqueProb {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub m: usize,
    /// Largest number of edge subsets enumerated exactly.
    #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
    pub budget_subsets: u64,
    /// Sample count when enumeration exceeds the budget.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
}

impl CliqueProb {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "clique-prob")?;
        positive("budget-subsets", self.budget_subsets)?;
        positive("samples", self.samples)?;
        let edges = JoinComplex::new(self.d, self.m)?.face_count(self.d - 1)?;
        let exhaustive = edges < 64 && (1u64 << edges) <= self.budget_subsets;
        let seed = match (exhaustive, g.seed) {
            (true, s) => s.unwrap_or(0),
            (false, Some(s)) => s,
            (false, None) => return Err(CliError::MissingSeed { command: "clique-prob" }),
        };
        let r = clique_probability_oracle(self.m, self.d, self.budget_subsets, self.samples, seed)?;
        Ok(Artifact::Report {
            config: json!({
                "d": self.d, "m": self.m, "budget_subsets": self.budget_subsets, "samples": self.samples,
            }),
            result: json!({
                "edges": r.edges,
                "cliques": r.cliques,
                "exact": r.exact.as_ref().map(format_rational),
                "estimate": r.estimate,
                "interval": r.interval,
                "samples": r.samples,
                "bound": format_rational(&r.bound),
                "within_bound": r.within_bound,
                "cliques_per_edge": r.cliques_per_edge,
            }),
        })
    }
}

#[derive(Args, Debug)]
pub struct Bounds {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long)]
    pub n: u64,
    /// Evaluate both union bounds at this m as well.
    #[arg(long)]
    pub m: Option<u64>,
}

impl Bounds {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        let (d, n) = (self.d, self.n);
        let t_sphere = pach_threshold_sphere(n, d)?;
        let t_color = if d >= 2 { Some(pach_threshold_coloring(n, d)?) } else { None };
        // the union bounds need m ≤ n; small n sit below their thresholds
        let sphere_at = if t_sphere <= n { Some(to_value(&sphere_union_bound(n, d, t_sphere)?)) } else { None };
        let color_at = match t_color {
            Some(t) if t <= n => Some(to_value(&coloring_union_bound(n, d, t)?)),
            _ => None,
        };
        let mut rows: Vec<(String, Value)> = vec![
            ("gromov_constant".into(), json!(format_rational(&gromov_bound(d as usize)))),
            ("threshold_sphere".into(), json!(t_sphere)),
            ("threshold_coloring".into(), json!(t_color)),
            ("sphere_bound_at_threshold".into(), json!(sphere_at)),
            ("coloring_bound_at_threshold".into(), json!(color_at)),
            ("coloring_upper_estimate".into(), json!(coloring_upper_estimate(n, d))),
            ("coloring_upper_constant".into(), json!(COLORING_UPPER_CONSTANT)),
            ("sphere_upper_constant".into(), json!(SPHERE_UPPER_CONSTANT)),
        ];
        if let Some(m) = self.m {
            rows.push(("sphere_bound_at_m".into(), to_value(&sphere_union_bound(n, d, m)?)));
            rows.push(("coloring_bound_at_m".into(), to_value(&coloring_union_bound(n, d, m)?)));
        }
        let config = json!({ "d": d, "n": n, "m": self.m });
        Ok(match g.format {
            Format::Json => Artifact::Report { config, result: Value::Object(rows.into_iter().collect()) },
            Format::Csv => {
                let mut body = String::from("quantity,value\n");
                for (key, value) in rows {
                    match value {
                        Value::Object(fields) => {
                            for (field, v) in fields {
                                body.push_str(&format!("{key}.{field},{v}\n"));
                            }
                        }
                        Value::String(s) => body.push_str(&format!("{key},{s}\n")),
                        other => body.push_str(&format!("{key},{other}\n")),
                    }
                }
                Artifact::Csv { config, body }
            }
        })
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum MapKind {
    Pushed,
    Affine,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ApexArg {
    Majority,
    AboveUnlessNegative,
}

#[derive(Args, Debug)]
pub struct BuildMap {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = MapKind::Pushed)]
    pub kind: MapKind,
    /// Tent height scale, as a rational.
    #[arg(long, default_value = "1/4")]
    pub scale: String,
    #[arg(long, value_enum, default_value_t = ApexArg::Majority)]
    pub apex: ApexArg,
    /// Check the map before writing it.
    #[arg(long)]
    pub validate: bool,
}

impl BuildMap {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "build-map")?;
        let seed = seed(g, "build-map")?;
        let complex = JoinComplex::new(2, self.n)?;
        let (map, coloring): (PLMap, Option<ColoringRecord>) = match self.kind {
            MapKind::Pushed => {
                let scale: BigRational = parse_rational(&self.scale).map_err(|e| CliError::Parse(e.to_string()))?;
                let coloring = TwoColoring::random(&complex, seed)?;
                let mut params = PushedMapParams::standard(&complex, seed, &scale)?;
                params.apex_rule = match self.apex {
                    ApexArg::Majority => ApexRule::Majority,
                    ApexArg::AboveUnlessNegative => ApexRule::AboveUnlessNegative,
                };
                (build_pushed_map(&coloring, &params)?, Some(ColoringRecord::from(&coloring)))
            }
            MapKind::Affine => {
                let config = random_generic_points(3 * self.n, seed, 20, 7, 1000)
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                (affine_map(self.n, config)?, None)
            }
        };
        if self.validate {
            let report = validate_map(&map)?;
            if !report.is_valid() {
                return Err(pachlab_core::pipeline::PipelineError::InvalidMap(report).into());
            }
        }
        let body: Value = serde_json::from_str(&map.to_json()).expect("map json");
        Ok(Artifact::Document {
            config: json!({
                "n": self.n, "kind": format!("{:?}", self.kind).to_lowercase(), "scale": self.scale,
                "apex": format!("{:?}", self.apex), "coloring": coloring,
            }),
            body,
        })
    }
}

#[derive(Args, Debug)]
pub struct PipelineCmd {
    /// PL map file.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PATH_RETRIES)]
    pub path_retries: usize,
    /// Skip the genericity check of the map.
    #[arg(long)]
    pub no_validate: bool,
}

impl PipelineCmd {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "pipeline")?;
        let seed = seed(g, "pipeline")?;
        let map = PLMap::from_json(&read(&self.map)?)?;
        let opts = PipelineOptions {
            validate: !self.no_validate,
            path_retries: self.path_retries,
        };
        let start = Instant::now();
        let report = run_pipeline(&map, seed, &opts)?;
        let mut result = to_value(&report);
        if g.timing {
            result["wall_ms"] = json!(start.elapsed().as_millis());
        }
        Ok(Artifact::Report {
            config: json!({ "map": self.map, "n": map.n(), "validate": opts.validate, "path_retries": opts.path_retries }),
            result,
        })
    }
}

#[derive(Args, Debug)]
pub struct Extract {
    /// Graph or hypergraph record; a random tripartite graph is drawn otherwise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Part size of the random graph.
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    #[arg(long, default_value_t = 0.7)]
    pub density: f64,
    /// Ask for this t instead of the largest.
    #[arg(long)]
    pub t: Option<usize>,
    /// Also run the exhaustive oracle when every part is at most this size.
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub budget_parts: usize,
    /// Node budget of the hypergraph branch and bound.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget_nodes: u64,
}

impl Extract {
    pub fn run(&self, g: &GlobalOpts) -> Result<Artifact, CliError> {
        no_csv(g, "extract")?;
        positive("budget-nodes", self.budget_nodes)?;
        let config = json!({
            "input": self.input, "n": self.n, "density": self.density, "t": self.t,
            "budget_parts": self.budget_parts, "budget_nodes": self.budget_nodes,
        });
        let result = match &self.input {
            None => {
                let seed = seed(g, "extract")?;
                if !(0.0..=1.0).contains(&self.density) {
                    return Err(CliError::Usage("--density must lie in [0, 1]".into()));
                }
                let graph = TripartiteGraph::random([self.n; 3], self.density, seed);
                self.graph(&graph)?
            }
            Some(path) => {
                let value: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(e.to_string()))?;
                if value.get("edges").is_some_and(Value::is_object) {
                    let record: TripartiteGraphRecord =
                        serde_json::from_value(value).map_err(|e| CliError::Parse(e.to_string()))?;
                    self.graph(&TripartiteGraph::try_from(&record)?)?
                } else {
                    let record: HypergraphRecord =
                        serde_json::from_value(value).map_err(|e| CliError::Parse(e.to_string()))?;
                    self.hypergraph(&PartiteHypergraph::try_from(&record)?)?
                }
            }
        };
        Ok(Artifact::Report { config, result })
    }

    fn graph(&self, graph: &TripartiteGraph) -> Result<Value, CliError> {
        let found = match self.t {
            Some(t) => extract_tripartite(graph, t).map(|parts| (t, parts)),
            None => extract_tripartite_max(graph),
        };
        let oracle = if graph.sizes().iter().all(|&s| s <= self.budget_parts) {
            Some(brute_max_complete_tripartite(graph, self.budget_parts)?)
        } else {
            None
        };
        Ok(json!({
            "kind": "tripartite",
            "graph": TripartiteGraphRecord::from(graph),
            "triangles": count_triangles(graph),
            "t": found.as_ref().map(|f| f.0),
            "parts": found.map(|f| f.1),
            "oracle": oracle,
        }))
    }

    fn hypergraph(&self, h: &PartiteHypergraph) -> Result<Value, CliError> {
        let found = match self.t {
            Some(t) => extract_box(h, t).map(|parts| json!({ "t": t, "parts": parts, "complete": true })),
            None => Some(to_value(&max_complete_box(h, self.budget_nodes)?)),
        };
        let oracle = if h.sizes().iter().all(|&s| s <= self.budget_parts) {
            Some(brute_max_complete_box(h, self.budget_parts)?)
        } else {
            None
        };
        Ok(json!({
            "kind": "hypergraph",
            "edges": h.edge_count(),
            "found": found,
            "oracle": oracle,
        }))
    }
}
