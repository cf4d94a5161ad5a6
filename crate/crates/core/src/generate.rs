//! Two-stage generate-and-test random layered graphs.
//!
//! The *generate* stage draws a uniform layer for every node, then places the
//! required number of proper links among the possible proper positions and
//! skip links among all remaining ordered pairs. The *test* stage picks a
//! source in the first layer and a destination in the last layer, and keeps the
//! graph only if a good path exists and its Quilt fits the display.
//!
//! All randomness comes from `ChaCha8Rng` seeded with a `u64`, driven through
//! `rand` 0.8's `gen_range` and `seq::index::sample`. Both are stable for a
//! given `rand` minor version, so `(spec, seed)` reproduces the same graph on
//! every platform.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{possible_proper_links, GraphError, LayeredGraph, Link, NodeId};
use crate::quilt::{layout_quilt, SkipDepiction};

/// Which path-constraint regime applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Skip-link study: good paths need a skip and at most `L - 2` links.
    Exp1,
    /// Depiction comparison: good paths may use up to `floor(1.5 L)` links.
    Exp2,
}

impl Experiment {
    pub const NODE_LEVELS: [usize; 3] = [50, 100, 200];
    pub const LINK_LEVELS: [f64; 2] = [0.25, 0.50];

    pub fn skip_levels(self) -> &'static [f64] {
        match self {
            Experiment::Exp1 => &[0.25, 0.50],
            Experiment::Exp2 => &[0.0, 0.25],
        }
    }

    pub fn layer_levels(self) -> &'static [usize] {
        match self {
            Experiment::Exp1 => &[5, 10, 15],
            Experiment::Exp2 => &[5, 15],
        }
    }

    /// Full factorial treatment grid in nodes, links, skips, layers order.
    pub fn treatments(self) -> Vec<TreatmentSpec> {
        let mut out = Vec::new();
        for &nodes in &Self::NODE_LEVELS {
            for &link_density in &Self::LINK_LEVELS {
                for &skip_density in self.skip_levels() {
                    for &layers in self.layer_levels() {
                        out.push(TreatmentSpec {
                            nodes,
                            layers,
                            link_density,
                            skip_density,
                            experiment: self,
                        });
                    }
                }
            }
        }
        out
    }

    /// Good-path rules for a graph with `layers` layers.
    pub fn constraints(self, layers: usize, source: NodeId, destination: NodeId) -> PathConstraints {
        let max_links = match self {
            Experiment::Exp1 => layers.saturating_sub(2),
            Experiment::Exp2 => layers * 3 / 2,
        };
        PathConstraints {
            min_links: 3,
            max_links,
            require_skip: self == Experiment::Exp1,
            source,
            destination,
        }
    }

    /// Display used for the fit test: 1920x1200 for the first study and
    /// 2560x1600 for the second, with a cell size that lets a 200-node
    /// centered matrix fill the display height.
    pub fn default_display(self) -> DisplayFit {
        let (width, height) = match self {
            Experiment::Exp1 => (1920.0, 1200.0),
            Experiment::Exp2 => (2560.0, 1600.0),
        };
        DisplayFit {
            width,
            height,
            cell_size: crate::matrix::matrix_cell_size(height, 200),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Exp1 => "exp1",
            Experiment::Exp2 => "exp2",
        })
    }
}

/// Experimental factors of one graph treatment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreatmentSpec {
    pub nodes: usize,
    pub layers: usize,
    /// Fraction of possible proper links that are present.
    pub link_density: f64,
    /// Skip-link count as a fraction of the proper-link count.
    pub skip_density: f64,
    pub experiment: Experiment,
}

impl TreatmentSpec {
    pub fn check(&self) -> Result<(), GenError> {
        if self.layers < 2 {
            return Err(GenError::NoProperLinksPossible);
        }
        let ok = self.nodes >= self.layers
            && (0.0..=1.0).contains(&self.link_density)
            && self.skip_density >= 0.0
            && self.skip_density.is_finite();
        if ok {
            Ok(())
        } else {
            Err(GenError::InvalidSpec(*self))
        }
    }

    /// Short label such as `n100-l10-d25-s50-exp1`.
    pub fn label(&self) -> String {
        format!(
            "n{}-l{}-d{}-s{}-{}",
            self.nodes,
            self.layers,
            (self.link_density * 100.0).round() as u32,
            (self.skip_density * 100.0).round() as u32,
            self.experiment
        )
    }
}

/// Rules a source-to-destination path must meet to count as "good".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConstraints {
    pub min_links: usize,
    pub max_links: usize,
    pub require_skip: bool,
    pub source: NodeId,
    pub destination: NodeId,
}

/// Display bounds for the Quilt fit test, in the same units as `cell_size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplayFit {
    pub width: f64,
    pub height: f64,
    pub cell_size: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("a graph needs at least two layers to hold proper links")]
    NoProperLinksPossible,
    #[error("invalid treatment spec {0:?}")]
    InvalidSpec(TreatmentSpec),
    #[error("{needed} skip links requested but only {available} non-proper pairs exist")]
    InfeasibleCounts { needed: usize, available: usize },
    #[error("could not draw a layer assignment without empty layers in {0} tries")]
    EmptyLayers(usize),
    #[error("no acceptable graph after {attempts} attempts")]
    ExhaustedAttempts {
        attempts: usize,
        rejections: BTreeMap<String, usize>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Rounds half away from zero (`f64::round`).
fn round_count(x: f64) -> usize {
    x.round().max(0.0) as usize
}

/// `(proper, skip)` link counts for a graph with `possible` proper positions.
pub fn required_link_counts(spec: &TreatmentSpec, possible: usize) -> (usize, usize) {
    let proper = round_count(spec.link_density * possible as f64);
    let skip = round_count(spec.skip_density * proper as f64);
    (proper, skip)
}

const LAYER_REROLL_LIMIT: usize = 1_000_000;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer; derives independent sub-seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generate stage. Deterministic in `(spec, seed)`.
pub fn generate(spec: &TreatmentSpec, seed: u64) -> Result<LayeredGraph, GenError> {
    spec.check()?;
    let mut rng = rng_for(seed, 0);

    let layer_of = assign_layers(spec.nodes, spec.layers, &mut rng)?;
    let links = place_links(spec, spec.layers, &layer_of, &mut rng)?;
    Ok(LayeredGraph::new(spec.layers, layer_of, links)?)
}

fn assign_layers(nodes: usize, layers: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>, GenError> {
    let mut layer_of = vec![0; nodes];
    for _ in 0..LAYER_REROLL_LIMIT {
        let mut counts = vec![0usize; layers + 1];
        for slot in layer_of.iter_mut() {
            *slot = rng.gen_range(1..=layers);
            counts[*slot] += 1;
        }
        if counts[1..].iter().all(|&c| c > 0) {
            return Ok(layer_of);
        }
    }
    Err(GenError::EmptyLayers(LAYER_REROLL_LIMIT))
}

/// Samples proper and skip links for a fixed layer assignment.
///
/// Proper candidates are enumerated by layer pair, then source id, then
/// destination id; skip candidates are all remaining ordered pairs of distinct
/// nodes in `(src, dst)` order. The result is sorted by `(src, dst)`.
pub fn place_links(
    spec: &TreatmentSpec,
    layers: usize,
    layer_of: &[usize],
    rng: &mut impl Rng,
) -> Result<Vec<Link>, GenError> {
    let n = layer_of.len();
    let mut by_layer = vec![Vec::new(); layers + 1];
    for (u, &l) in layer_of.iter().enumerate() {
        by_layer[l].push(u);
    }
    let sizes: Vec<usize> = by_layer[1..].iter().map(Vec::len).collect();
    let possible = possible_proper_links(&sizes);
    let (proper_count, skip_count) = required_link_counts(spec, possible);

    let mut proper_candidates = Vec::with_capacity(possible);
    for k in 1..layers {
        for &u in &by_layer[k] {
            for &v in &by_layer[k + 1] {
                proper_candidates.push(Link::new(u, v));
            }
        }
    }
    let mut skip_candidates = Vec::with_capacity(n * n - n - possible);
    for u in 0..n {
        for v in 0..n {
            if u != v && layer_of[v] != layer_of[u] + 1 {
                skip_candidates.push(Link::new(u, v));
            }
        }
    }
    if skip_count > skip_candidates.len() {
        return Err(GenError::InfeasibleCounts {
            needed: skip_count,
            available: skip_candidates.len(),
        });
    }

    let mut links: Vec<Link> = sample(rng, proper_candidates.len(), proper_count)
        .into_iter()
        .map(|i| proper_candidates[i])
        .collect();
    links.extend(
        sample(rng, skip_candidates.len(), skip_count)
            .into_iter()
            .map(|i| skip_candidates[i]),
    );
    links.sort_unstable();
    Ok(links)
}

const UNREACHABLE: usize = usize::MAX;

/// Shortest remaining link count from `(node, has_skip)` to the destination
/// such that the finished walk satisfies the skip requirement. Walks, not
/// simple paths, so it is a lower bound usable for pruning.
struct DistanceToGoal {
    dist: Vec<[usize; 2]>,
}

impl DistanceToGoal {
    fn new(g: &LayeredGraph, destination: NodeId, require_skip: bool) -> Self {
        let n = g.node_count();
        let mut dist = vec![[UNREACHABLE; 2]; n];
        let mut queue = VecDeque::new();
        dist[destination][1] = 0;
        queue.push_back((destination, 1usize));
        if !require_skip {
            dist[destination][0] = 0;
            queue.push_back((destination, 0));
        }
        while let Some((w, h)) = queue.pop_front() {
            let d = dist[w][h];
            for &v in g.predecessors(w) {
                let skip = g.is_skip(Link::new(v, w));
                // (v, hv) steps to (w, hv || skip) == (w, h)
                let sources: &[usize] = match (skip, h) {
                    (true, 1) => &[0, 1],
                    (true, _) => &[],
                    (false, _) => std::slice::from_ref(&h),
                };
                for &hv in sources {
                    if dist[v][hv] == UNREACHABLE {
                        dist[v][hv] = d + 1;
                        queue.push_back((v, hv));
                    }
                }
            }
        }
        Self { dist }
    }

    fn get(&self, node: NodeId, has_skip: bool) -> usize {
        self.dist[node][has_skip as usize]
    }
}

/// Up to `limit` simple directed paths from `c.source` to `c.destination`
/// meeting the constraints, as node sequences.
///
/// Exhaustive depth-first search over out-links in ascending node-id order,
/// bounded by `max_links` and pruned with a shortest-walk lower bound.
pub fn good_paths(g: &LayeredGraph, c: &PathConstraints, limit: usize) -> Vec<Vec<NodeId>> {
    let mut found = Vec::new();
    let n = g.node_count();
    if limit == 0 || c.source >= n || c.destination >= n || c.min_links > c.max_links {
        return found;
    }
    let bound = DistanceToGoal::new(g, c.destination, c.require_skip);
    let mut search = PathSearch {
        g,
        c,
        bound: &bound,
        limit,
        on_path: vec![false; n],
        path: vec![c.source],
        found: &mut found,
    };
    search.on_path[c.source] = true;
    search.visit(c.source, false);
    found
}

struct PathSearch<'a> {
    g: &'a LayeredGraph,
    c: &'a PathConstraints,
    bound: &'a DistanceToGoal,
    limit: usize,
    on_path: Vec<bool>,
    path: Vec<NodeId>,
    found: &'a mut Vec<Vec<NodeId>>,
}

impl PathSearch<'_> {
    fn visit(&mut self, v: NodeId, has_skip: bool) {
        let links = self.path.len() - 1;
        if v == self.c.destination {
            if links >= self.c.min_links && (has_skip || !self.c.require_skip) {
                self.found.push(self.path.clone());
            }
            return;
        }
        for &w in self.g.successors(v) {
            if self.found.len() >= self.limit {
                return;
            }
            if self.on_path[w] {
                continue;
            }
            let h = has_skip || self.g.is_skip(Link::new(v, w));
            let rest = self.bound.get(w, h);
            if rest == UNREACHABLE || links + 1 + rest > self.c.max_links {
                continue;
            }
            self.on_path[w] = true;
            self.path.push(w);
            self.visit(w, h);
            self.path.pop();
            self.on_path[w] = false;
        }
    }
}

/// Why a generated graph failed the test stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    /// The destination is not reachable from the source at all.
    NoPath,
    /// Every source-to-destination walk is longer than `max_links`.
    PathTooLong,
    /// Short enough paths exist but none uses a skip link.
    NoSkipInPath,
    /// Reachable within bounds, but no simple path meets every rule.
    NoGoodPath,
    /// The Quilt depiction exceeds the display.
    DoesNotFit,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::NoPath => "no-path",
            RejectReason::PathTooLong => "path-too-long",
            RejectReason::NoSkipInPath => "no-skip-in-path",
            RejectReason::NoGoodPath => "no-good-path",
            RejectReason::DoesNotFit => "does-not-fit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted { source: NodeId, destination: NodeId },
    Rejected(RejectReason),
}

/// Checks the path rules for fixed endpoints and explains a failure.
pub fn check_paths(g: &LayeredGraph, c: &PathConstraints) -> Result<(), RejectReason> {
    if !good_paths(g, c, 1).is_empty() {
        return Ok(());
    }
    let plain = DistanceToGoal::new(g, c.destination, false).get(c.source, false);
    if plain == UNREACHABLE {
        return Err(RejectReason::NoPath);
    }
    if plain > c.max_links {
        return Err(RejectReason::PathTooLong);
    }
    if c.require_skip {
        let with_skip = DistanceToGoal::new(g, c.destination, true).get(c.source, false);
        if with_skip > c.max_links {
            return Err(RejectReason::NoSkipInPath);
        }
    }
    Err(RejectReason::NoGoodPath)
}

/// Test stage: draw endpoints from `seed`, then apply the path rules of the
/// spec's regime and the display-fit rule.
pub fn test_constraints(g: &LayeredGraph, spec: &TreatmentSpec, seed: u64, fit: &DisplayFit) -> Verdict {
    let mut rng = rng_for(seed, 1);
    let first = g.nodes_in_layer(1);
    let last = g.nodes_in_layer(g.layer_count());
    let source = first[rng.gen_range(0..first.len())];
    let destination = last[rng.gen_range(0..last.len())];

    let c = spec.experiment.constraints(g.layer_count(), source, destination);
    if let Err(reason) = check_paths(g, &c) {
        return Verdict::Rejected(reason);
    }
    let layout = layout_quilt(g, SkipDepiction::Mixed, fit.cell_size)
        .expect("generated graphs have no empty layers");
    if !layout.fits_display(fit.width, fit.height) {
        return Verdict::Rejected(RejectReason::DoesNotFit);
    }
    Verdict::Accepted { source, destination }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationOptions {
    pub max_attempts: usize,
    pub fit: DisplayFit,
}

/// Attempt budget for the first study's grid.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;
/// The second study's sparse, skip-free 15-layer cell accepts roughly one
/// graph in a thousand, so its budget is larger.
pub const EXP2_MAX_ATTEMPTS: usize = 100_000;

impl GenerationOptions {
    pub fn for_experiment(experiment: Experiment) -> Self {
        Self {
            max_attempts: match experiment {
                Experiment::Exp1 => DEFAULT_MAX_ATTEMPTS,
                Experiment::Exp2 => EXP2_MAX_ATTEMPTS,
            },
            fit: experiment.default_display(),
        }
    }
}

/// An accepted stimulus graph with its endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Stimulus {
    pub graph: LayeredGraph,
    pub source: NodeId,
    pub destination: NodeId,
    /// 1-based index of the accepted attempt.
    pub attempts: usize,
    pub rejections: BTreeMap<String, usize>,
    pub spec: TreatmentSpec,
    pub seed: u64,
}

impl Stimulus {
    pub fn constraints(&self) -> PathConstraints {
        self.spec
            .experiment
            .constraints(self.graph.layer_count(), self.source, self.destination)
    }
}

/// Repeats generate + test with sub-seeds `derive_seed(seed, attempt)` until
/// a graph is accepted.
pub fn generate_until_valid(
    spec: &TreatmentSpec,
    seed: u64,
    opts: &GenerationOptions,
) -> Result<Stimulus, GenError> {
    spec.check()?;
    let mut rejections = BTreeMap::new();
    for attempt in 0..opts.max_attempts {
        let sub = derive_seed(seed, attempt as u64);
        let g = generate(spec, sub)?;
        match test_constraints(&g, spec, sub, &opts.fit) {
            Verdict::Accepted { source, destination } => {
                return Ok(Stimulus {
                    graph: g,
                    source,
                    destination,
                    attempts: attempt + 1,
                    rejections,
                    spec: *spec,
                    seed,
                })
            }
            Verdict::Rejected(r) => *rejections.entry(r.to_string()).or_insert(0) += 1,
        }
    }
    Err(GenError::ExhaustedAttempts {
        attempts: opts.max_attempts,
        rejections,
    })
}
