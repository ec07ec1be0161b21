//! Decorated chain graphs: model descriptions and finite truncations.
//!
//! A *model* is a chain spacing `L` together with one finite *decoration*
//! graph per letter of the alphabet.  A word `w₀…w_n` then produces the
//! truncated decorated graph: chain vertices at positions `0, L, …, nL`
//! joined by edges of length `L`, with a copy of decoration `w_i` glued at
//! chain vertex `i` through its base vertex.  Both a metric version (edges
//! carry lengths, vertices carry Kirchhoff/Dirichlet/Robin conditions) and a
//! discrete version (unit edges, normalized Laplacian) are built from the
//! same combinatorial layout, so their vertex numbering and incidence agree
//! exactly.
//!
//! Decorations containing self-loops or parallel edges are subdivided at
//! build time — a loop of length `ℓ` becomes a path through auxiliary
//! vertices of the same total length — because the eigensolvers and the
//! discrete Laplacian assume simple incidence.  Subdivision is applied
//! identically on the metric and discrete sides.
//!
//! Averaged per-cell quantities tie truncations to the infinite graph: with
//! letter frequencies `ν_a`,
//!
//! ```text
//! L̄ = L + Σ_a ν_a ℓ(Γ_a),   V̄ = Σ_a ν_a |V_a|,   Ē = 1 + Σ_a ν_a |E_a|,
//! ```
//!
//! and the conversion factor `C = V̄/Ē` relates discrete and metric state
//! counts per unit cell.

use crate::error::{Error, Result};
use crate::scalar::{cast, cast_usize, Scalar};
use crate::words::{PrecisionMode, SturmianParameters, Word};
use serde::Serialize;

/// Finite connected graph glued to a chain vertex through its base vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decoration<S> {
    letter: u8,
    vertex_count: usize,
    base: usize,
    edges: Vec<(usize, usize, S)>,
}

impl<S: Scalar> Decoration<S> {
    /// The trivial decoration: the base vertex alone.
    pub fn single_vertex(letter: u8) -> Self {
        Decoration {
            letter,
            vertex_count: 1,
            base: 0,
            edges: Vec::new(),
        }
    }

    /// A pendant edge ("tooth") of the given length hanging off the base.
    pub fn pendant(letter: u8, length: S) -> Result<Self> {
        Decoration::new(letter, 2, 0, vec![(0, 1, length)])
    }

    /// General decoration with explicit vertex count, base and edge list.
    ///
    /// Requires positive finite lengths, endpoints in range, and a connected
    /// graph.  Self-loops and parallel edges are accepted here and
    /// subdivided when a truncation is built.
    pub fn new(letter: u8, vertex_count: usize, base: usize, edges: Vec<(usize, usize, S)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::input("decoration must have at least one vertex"));
        }
        if base >= vertex_count {
            return Err(Error::input(format!(
                "decoration base vertex {base} out of range (vertex count {vertex_count})"
            )));
        }
        for &(u, v, len) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::input(format!(
                    "decoration edge ({u},{v}) out of range (vertex count {vertex_count})"
                )));
            }
            if !len.is_finite() || len <= S::zero() {
                return Err(Error::input(format!(
                    "decoration edge ({u},{v}) must have positive finite length, got {len}"
                )));
            }
        }
        let dec = Decoration {
            letter,
            vertex_count,
            base,
            edges,
        };
        if !dec.is_connected() {
            return Err(Error::input("decoration graph must be connected"));
        }
        Ok(dec)
    }

    pub fn letter(&self) -> u8 {
        self.letter
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[(usize, usize, S)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_length(&self) -> S {
        self.edges
            .iter()
            .fold(S::zero(), |acc, &(_, _, len)| acc + len)
    }

    pub fn is_single_vertex(&self) -> bool {
        self.vertex_count == 1 && self.edges.is_empty()
    }

    /// Tooth length, if this decoration is a single pendant edge at the base.
    pub fn pendant_length(&self) -> Option<S> {
        if self.vertex_count == 2 && self.edges.len() == 1 {
            let (u, v, len) = self.edges[0];
            if (u == self.base) != (v == self.base) {
                return Some(len);
            }
        }
        None
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![self.base];
        seen[self.base] = true;
        while let Some(v) = stack.pop() {
            for &(a, b, _) in &self.edges {
                for (from, to) in [(a, b), (b, a)] {
                    if from == v && !seen[to] {
                        seen[to] = true;
                        stack.push(to);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Equivalent decoration with simple incidence: self-loops and parallel
    /// edges are subdivided (splitting lengths evenly) until no two edges
    /// share both endpoints.  Purely topological, so the metric and discrete
    /// builders produce identical vertex numbering.
    pub fn simplified(&self) -> Self {
        let mut vertex_count = self.vertex_count;
        let mut edges = self.edges.clone();
        let half = cast::<S>(0.5);
        loop {
            let mut changed = false;
            let mut next = Vec::with_capacity(edges.len());
            let mut seen_pairs: Vec<(usize, usize)> = Vec::new();
            for &(u, v, len) in &edges {
                let key = (u.min(v), u.max(v));
                if u == v || seen_pairs.contains(&key) {
                    let mid = vertex_count;
                    vertex_count += 1;
                    next.push((u, mid, len * half));
                    next.push((mid, v, len * half));
                    changed = true;
                } else {
                    seen_pairs.push(key);
                    next.push((u, v, len));
                }
            }
            edges = next;
            if !changed {
                break;
            }
        }
        Decoration {
            letter: self.letter,
            vertex_count,
            base: self.base,
            edges,
        }
    }
}

/// Chain spacing plus one decoration per letter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec<S> {
    spacing: S,
    decorations: Vec<Decoration<S>>,
}

impl<S: Scalar> ModelSpec<S> {
    /// Model with decorations indexed by letter: `decorations[a]` must carry
    /// letter `a`.
    pub fn new(spacing: S, decorations: Vec<Decoration<S>>) -> Result<Self> {
        if !spacing.is_finite() || spacing <= S::zero() {
            return Err(Error::input(format!(
                "chain spacing must be positive and finite, got {spacing}"
            )));
        }
        if decorations.is_empty() {
            return Err(Error::input("model needs at least one decoration"));
        }
        for (i, d) in decorations.iter().enumerate() {
            if usize::from(d.letter()) != i {
                return Err(Error::input(format!(
                    "decoration at index {i} carries letter {}; letters must be 0..{} in order",
                    d.letter(),
                    decorations.len() - 1
                )));
            }
        }
        Ok(ModelSpec {
            spacing,
            decorations,
        })
    }

    /// The comb model: letter 0 bare, letter 1 a tooth of length `tooth`.
    pub fn comb(spacing: S, tooth: S) -> Result<Self> {
        ModelSpec::new(
            spacing,
            vec![Decoration::single_vertex(0), Decoration::pendant(1, tooth)?],
        )
    }

    pub fn spacing(&self) -> S {
        self.spacing
    }

    pub fn decorations(&self) -> &[Decoration<S>] {
        &self.decorations
    }

    pub fn decoration(&self, letter: u8) -> Result<&Decoration<S>> {
        self.decorations
            .get(usize::from(letter))
            .ok_or_else(|| Error::input(format!("no decoration for letter {letter}")))
    }

    /// True when every decoration is bare or a pendant edge — the class the
    /// fast chain solver handles.
    pub fn is_comb_like(&self) -> bool {
        self.decorations
            .iter()
            .all(|d| d.is_single_vertex() || d.pendant_length().is_some())
    }

    /// Mean metric length per unit cell: `L̄ = L + Σ ν_a ℓ(Γ_a)`.
    pub fn normalized_length(&self, freqs: &[S]) -> Result<S> {
        let mut total = self.spacing;
        for (d, &nu) in self.check_freqs(freqs)? {
            total += nu * d.total_length();
        }
        Ok(total)
    }

    /// Mean vertex count per unit cell of the (simplified) discrete graph.
    pub fn average_vertex_count(&self, freqs: &[S]) -> Result<S> {
        let mut total = S::zero();
        for (d, &nu) in self.check_freqs(freqs)? {
            total += nu * cast_usize::<S>(d.simplified().vertex_count());
        }
        Ok(total)
    }

    /// Mean edge count per unit cell of the (simplified) discrete graph,
    /// counting the one chain edge.
    pub fn average_edge_count(&self, freqs: &[S]) -> Result<S> {
        let mut total = S::one();
        for (d, &nu) in self.check_freqs(freqs)? {
            total += nu * cast_usize::<S>(d.simplified().edge_count());
        }
        Ok(total)
    }

    /// Conversion factor `C = V̄/Ē` between discrete and metric state counts.
    pub fn conversion_factor(&self, freqs: &[S]) -> Result<S> {
        Ok(self.average_vertex_count(freqs)? / self.average_edge_count(freqs)?)
    }

    fn check_freqs<'a>(
        &'a self,
        freqs: &'a [S],
    ) -> Result<impl Iterator<Item = (&'a Decoration<S>, &'a S)>> {
        if freqs.len() != self.decorations.len() {
            return Err(Error::input(format!(
                "{} letter frequencies supplied for {} decorations",
                freqs.len(),
                self.decorations.len()
            )));
        }
        Ok(self.decorations.iter().zip(freqs.iter()))
    }
}

/// Vertex condition of the metric Laplacian.
///
/// `Robin(ρ)` imposes `Σ ∂f(v) = ρ f(v)` with outward derivatives;
/// `Kirchhoff` is `Robin(0)` plus continuity, `Dirichlet` forces `f(v) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VertexCondition<S> {
    Kirchhoff,
    Dirichlet,
    Robin(S),
}

/// Condition applied at the two chain ends of a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryCondition {
    /// Natural condition: Kirchhoff on the metric side, plain degree on the
    /// discrete side.
    Free,
    /// Hard wall: Dirichlet vertices on the metric side, deletion of the end
    /// vertices on the discrete side.
    Dirichlet,
}

/// Where a decoration copy ended up inside a truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Placement {
    /// Chain site index (also the global id of the base vertex).
    pub site: usize,
    pub letter: u8,
    /// Global vertex ids of the decoration copy; entry 0 is the base.
    pub vertices: Vec<usize>,
    /// Global edge indices of the decoration copy.
    pub edges: Vec<usize>,
}

/// Compact metric graph: vertex conditions plus edges with lengths.
#[derive(Debug, Clone, Serialize)]
pub struct CompactMetricGraph<S> {
    conditions: Vec<VertexCondition<S>>,
    edges: Vec<(usize, usize, S)>,
    chain_sites: usize,
    placements: Vec<Placement>,
}

impl<S: Scalar> CompactMetricGraph<S> {
    /// Graph from explicit parts (used for hand-built test graphs).
    ///
    /// Requires simple incidence — truncation builders subdivide decorations
    /// before reaching this point — and a connected graph with no isolated
    /// vertices.
    pub fn new(conditions: Vec<VertexCondition<S>>, edges: Vec<(usize, usize, S)>) -> Result<Self> {
        let n = conditions.len();
        if n == 0 || edges.is_empty() {
            return Err(Error::input(
                "metric graph needs at least one vertex and one edge",
            ));
        }
        let mut seen_pairs = std::collections::BTreeSet::new();
        for &(u, v, len) in &edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u},{v}) out of range (vertex count {n})"
                )));
            }
            if u == v {
                return Err(Error::input(format!(
                    "self-loop at vertex {u}; subdivide before building"
                )));
            }
            if !seen_pairs.insert((u.min(v), u.max(v))) {
                return Err(Error::input(format!(
                    "parallel edges between {u} and {v}; subdivide before building"
                )));
            }
            if !len.is_finite() || len <= S::zero() {
                return Err(Error::input(format!(
                    "edge ({u},{v}) must have positive finite length, got {len}"
                )));
            }
        }
        let g = CompactMetricGraph {
            conditions,
            edges,
            chain_sites: 0,
            placements: Vec::new(),
        };
        if g.degrees().iter().any(|&d| d == 0) {
            return Err(Error::input("metric graph has an isolated vertex"));
        }
        if !g.is_connected() {
            return Err(Error::input("metric graph must be connected"));
        }
        Ok(g)
    }

    pub fn conditions(&self) -> &[VertexCondition<S>] {
        &self.conditions
    }

    pub fn edges(&self) -> &[(usize, usize, S)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.conditions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of chain vertices (zero for hand-built graphs).
    pub fn chain_sites(&self) -> usize {
        self.chain_sites
    }

    /// Decoration copies by chain site (empty for hand-built graphs).
    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// First and last chain vertex, when the graph is a truncation.
    pub fn chain_ends(&self) -> Option<(usize, usize)> {
        if self.chain_sites == 0 {
            None
        } else {
            Some((0, self.chain_sites - 1))
        }
    }

    pub fn total_length(&self) -> S {
        self.edges
            .iter()
            .fold(S::zero(), |acc, &(_, _, len)| acc + len)
    }

    pub fn min_edge_length(&self) -> S {
        self.edges
            .iter()
            .map(|&(_, _, len)| len)
            .fold(S::infinity(), S::min)
    }

    pub fn max_edge_length(&self) -> S {
        self.edges
            .iter()
            .map(|&(_, _, len)| len)
            .fold(S::zero(), S::max)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertex_count()];
        for &(u, v, _) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn has_dirichlet_vertex(&self) -> bool {
        self.conditions
            .iter()
            .any(|c| matches!(c, VertexCondition::Dirichlet))
    }

    pub fn has_robin_vertex(&self) -> bool {
        self.conditions
            .iter()
            .any(|c| matches!(c, VertexCondition::Robin(_)))
    }

    /// CSV edge list: `u,v,length` with one header line and 12 significant
    /// digits on lengths.
    pub fn edge_csv(&self) -> String {
        let mut out = String::from("u,v,length\n");
        for &(u, v, len) in &self.edges {
            out.push_str(&format!("{u},{v},{:.11e}\n", len));
        }
        out
    }

    fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Unit-edge companion of [`CompactMetricGraph`] for the discrete Laplacian.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteGraph {
    adjacency: Vec<Vec<usize>>,
    chain_sites: usize,
    placements: Vec<Placement>,
}

impl DiscreteGraph {
    /// Graph from explicit neighbor lists (tests and hand-built examples).
    pub fn new(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let g = DiscreteGraph {
            adjacency,
            chain_sites: 0,
            placements: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let n = self.adjacency.len();
        if n == 0 {
            return Err(Error::input("discrete graph needs at least one vertex"));
        }
        for (v, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.is_empty() {
                return Err(Error::input(format!(
                    "discrete graph has isolated vertex {v}"
                )));
            }
            let mut sorted = nbrs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != nbrs.len() {
                return Err(Error::input(format!(
                    "duplicate neighbor in adjacency list of vertex {v}"
                )));
            }
            for &w in nbrs {
                if w >= n {
                    return Err(Error::input(format!(
                        "neighbor {w} of vertex {v} out of range"
                    )));
                }
                if w == v {
                    return Err(Error::input(format!("self-loop at vertex {v}")));
                }
                if !self.adjacency[w].contains(&v) {
                    return Err(Error::input(format!(
                        "adjacency not symmetric between {v} and {w}"
                    )));
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if !seen.into_iter().all(|s| s) {
            return Err(Error::input("discrete graph must be connected"));
        }
        Ok(())
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn chain_sites(&self) -> usize {
        self.chain_sites
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn chain_ends(&self) -> Option<(usize, usize)> {
        if self.chain_sites == 0 {
            None
        } else {
            Some((0, self.chain_sites - 1))
        }
    }

    /// The graph with the given vertices removed (for the Dirichlet
    /// boundary variant).  Remaining vertices are renumbered in order.
    pub fn without_vertices(&self, removed: &[usize]) -> Result<DiscreteGraph> {
        let n = self.vertex_count();
        let mut keep = vec![true; n];
        for &v in removed {
            if v >= n {
                return Err(Error::input(format!("vertex {v} out of range")));
            }
            keep[v] = false;
        }
        let mut new_id = vec![usize::MAX; n];
        let mut next = 0usize;
        for v in 0..n {
            if keep[v] {
                new_id[v] = next;
                next += 1;
            }
        }
        let adjacency = (0..n)
            .filter(|&v| keep[v])
            .map(|v| {
                self.adjacency[v]
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| new_id[w])
                    .collect()
            })
            .collect();
        DiscreteGraph::new(adjacency)
    }

    /// CSV edge list: `u,v` with one header line, each edge once.
    pub fn edge_csv(&self) -> String {
        let mut out = String::from("u,v\n");
        for (v, nbrs) in self.adjacency.iter().enumerate() {
            for &w in nbrs {
                if v < w {
                    out.push_str(&format!("{v},{w}\n"));
                }
            }
        }
        out
    }

    /// Normalized Laplacian `Δ = I − D^{−1/2} A D^{−1/2}` as a dense
    /// symmetric matrix.
    pub fn normalized_laplacian_matrix<S: crate::scalar::EigenScalar>(
        &self,
    ) -> nalgebra::DMatrix<S> {
        let n = self.vertex_count();
        let mut m = nalgebra::DMatrix::<S>::zeros(n, n);
        for v in 0..n {
            m[(v, v)] = S::one();
            for &w in &self.adjacency[v] {
                let norm =
                    num_traits::Float::sqrt(cast_usize::<S>(self.degree(v) * self.degree(w)));
                m[(v, w)] = -S::one() / norm;
            }
        }
        m
    }
}

/// Metric truncation of the decorated chain over `word`, with the given
/// condition at the two chain ends and Kirchhoff everywhere else.
pub fn build_metric_truncation<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    boundary: BoundaryCondition,
) -> Result<CompactMetricGraph<S>> {
    let layout = Layout::build(model, word)?;
    let mut conditions = vec![VertexCondition::Kirchhoff; layout.vertex_count];
    if boundary == BoundaryCondition::Dirichlet {
        conditions[0] = VertexCondition::Dirichlet;
        conditions[layout.chain_sites - 1] = VertexCondition::Dirichlet;
    }
    if layout.metric_edges.is_empty() {
        return Err(Error::input(
            "degenerate truncation: the graph has no edges",
        ));
    }
    let g = CompactMetricGraph {
        conditions,
        edges: layout.metric_edges,
        chain_sites: layout.chain_sites,
        placements: layout.placements,
    };
    Ok(g)
}

/// Discrete truncation of the decorated chain over `word`: same layout as
/// the metric truncation, unit edges.  The Dirichlet variant is obtained
/// afterwards with [`DiscreteGraph::without_vertices`] on the chain ends.
pub fn build_discrete_truncation<S: Scalar>(model: &ModelSpec<S>, word: &Word) -> Result<DiscreteGraph> {
    let layout = Layout::build(model, word)?;
    if layout.metric_edges.is_empty() {
        return Err(Error::input(
            "degenerate truncation: the graph has no edges",
        ));
    }
    let mut adjacency = vec![Vec::new(); layout.vertex_count];
    for &(u, v, _) in &layout.metric_edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let g = DiscreteGraph {
        adjacency,
        chain_sites: layout.chain_sites,
        placements: layout.placements,
    };
    g.validate()?;
    Ok(g)
}

/// Shared combinatorial layout of metric and discrete truncations.
struct Layout<S> {
    vertex_count: usize,
    chain_sites: usize,
    metric_edges: Vec<(usize, usize, S)>,
    placements: Vec<Placement>,
}

impl<S: Scalar> Layout<S> {
    fn build(model: &ModelSpec<S>, word: &Word) -> Result<Self> {
        let sites = word.len();
        if sites == 0 {
            return Err(Error::input("truncation word must be non-empty"));
        }
        let simplified: Vec<Decoration<S>> = model
            .decorations()
            .iter()
            .map(Decoration::simplified)
            .collect();
        for &letter in word.letters() {
            if usize::from(letter) >= simplified.len() {
                return Err(Error::input(format!(
                    "word letter {letter} has no decoration in the model"
                )));
            }
        }
        let mut edges: Vec<(usize, usize, S)> = Vec::new();
        for i in 0..sites.saturating_sub(1) {
            edges.push((i, i + 1, model.spacing()));
        }
        let mut placements = Vec::with_capacity(sites);
        let mut next_vertex = sites;
        for (site, &letter) in word.letters().iter().enumerate() {
            let dec = &simplified[usize::from(letter)];
            let mut vertex_map = vec![usize::MAX; dec.vertex_count()];
            vertex_map[dec.base()] = site;
            let mut vertices = vec![site];
            for v in 0..dec.vertex_count() {
                if v != dec.base() {
                    vertex_map[v] = next_vertex;
                    vertices.push(next_vertex);
                    next_vertex += 1;
                }
            }
            let mut edge_ids = Vec::with_capacity(dec.edge_count());
            for &(u, v, len) in dec.edges() {
                edge_ids.push(edges.len());
                edges.push((vertex_map[u], vertex_map[v], len));
            }
            placements.push(Placement {
                site,
                letter,
                vertices,
                edges: edge_ids,
            });
        }
        Ok(Layout {
            vertex_count: next_vertex,
            chain_sites: sites,
            metric_edges: edges,
            placements,
        })
    }
}

/// Parsed model configuration: word parameters plus the model.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub alpha: f64,
    pub theta: f64,
    pub precision: PrecisionMode,
    pub model: ModelSpec<f64>,
}

impl ModelConfig {
    pub fn params(&self) -> Result<SturmianParameters<f64>> {
        SturmianParameters::with_mode(self.alpha, self.theta, self.precision)
    }
}

/// Parses a key-value model configuration.
///
/// Recognized keys (later assignments override earlier ones):
///
/// ```text
/// alpha = golden | silver | <number in (0,1)>
/// theta = <number in [0,1)>
/// precision = float | rational:<depth>
/// spacing = <positive number>            # alias: L
/// decoration.<letter> = vertex
/// decoration.<letter> = pendant <length>
/// decoration.<letter> = graph <nv> <base> <u>-<v>:<len> ...
/// ```
///
/// Lines starting with `#` and blank lines are ignored.  Defaults: the
/// golden rotation number, `theta = 0`, float precision, spacing 1, and the
/// comb decorations (letter 0 bare, letter 1 a unit tooth).
pub fn parse_model_config(text: &str) -> Result<ModelConfig> {
    let mut alpha = (5f64.sqrt() - 1.0) / 2.0;
    let mut theta = 0.0f64;
    let mut precision = PrecisionMode::Float;
    let mut spacing = 1.0f64;
    let mut decorations: Vec<(u8, Decoration<f64>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::input(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "alpha" => alpha = parse_alpha(value, lineno)?,
            "theta" => theta = parse_number(value, "theta", lineno)?,
            "precision" => precision = parse_precision(value, lineno)?,
            "spacing" | "L" => spacing = parse_number(value, "spacing", lineno)?,
            _ if key.starts_with("decoration.") => {
                let letter: u8 = key["decoration.".len()..].parse().map_err(|_| {
                    Error::input(format!(
                        "config line {}: bad decoration letter in {key:?}",
                        lineno + 1
                    ))
                })?;
                let dec = parse_decoration(letter, value, lineno)?;
                decorations.retain(|(l, _)| *l != letter);
                decorations.push((letter, dec));
            }
            _ => {
                return Err(Error::input(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )))
            }
        }
    }

    let model = if decorations.is_empty() {
        ModelSpec::comb(spacing, 1.0)?
    } else {
        decorations.sort_by_key(|(l, _)| *l);
        let letters: Vec<u8> = decorations.iter().map(|(l, _)| *l).collect();
        let expected: Vec<u8> = (0..letters.len() as u8).collect();
        if letters != expected {
            return Err(Error::input(format!(
                "decoration letters must be contiguous from 0, got {letters:?}"
            )));
        }
        ModelSpec::new(spacing, decorations.into_iter().map(|(_, d)| d).collect())?
    };

    let config = ModelConfig {
        alpha,
        theta,
        precision,
        model,
    };
    config.params()?; // validate alpha/theta/precision eagerly
    Ok(config)
}

fn parse_alpha(value: &str, lineno: usize) -> Result<f64> {
    match value {
        "golden" => Ok((5f64.sqrt() - 1.0) / 2.0),
        "silver" => Ok(2f64.sqrt() - 1.0),
        _ => parse_number(value, "alpha", lineno),
    }
}

fn parse_number(value: &str, key: &str, lineno: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|_| {
        Error::input(format!(
            "config line {}: {key} must be a number, got {value:?}",
            lineno + 1
        ))
    })
}

fn parse_precision(value: &str, lineno: usize) -> Result<PrecisionMode> {
    if value == "float" {
        return Ok(PrecisionMode::Float);
    }
    if let Some(depth) = value.strip_prefix("rational:") {
        let depth = depth.parse::<usize>().map_err(|_| {
            Error::input(format!(
                "config line {}: bad rational-convergent depth {depth:?}",
                lineno + 1
            ))
        })?;
        return Ok(PrecisionMode::RationalConvergent { depth });
    }
    Err(Error::input(format!(
        "config line {}: precision must be 'float' or 'rational:<depth>', got {value:?}",
        lineno + 1
    )))
}

fn parse_decoration(letter: u8, value: &str, lineno: usize) -> Result<Decoration<f64>> {
    let mut parts = value.split_whitespace();
    match parts.next() {
        Some("vertex") => Ok(Decoration::single_vertex(letter)),
        Some("pendant") => {
            let len = parts
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::input(format!(
                        "config line {}: pendant decoration needs a length",
                        lineno + 1
                    ))
                })?;
            Decoration::pendant(letter, len)
        }
        Some("graph") => {
            let nv = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| {
                    Error::input(format!(
                        "config line {}: graph decoration needs a vertex count",
                        lineno + 1
                    ))
                })?;
            let base = parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| {
                    Error::input(format!(
                        "config line {}: graph decoration needs a base vertex",
                        lineno + 1
                    ))
                })?;
            let mut edges = Vec::new();
            for spec in parts {
                let (uv, len) = spec.split_once(':').ok_or_else(|| {
                    Error::input(format!(
                        "config line {}: edge {spec:?} must look like u-v:len",
                        lineno + 1
                    ))
                })?;
                let (u, v) = uv.split_once('-').ok_or_else(|| {
                    Error::input(format!(
                        "config line {}: edge {spec:?} must look like u-v:len",
                        lineno + 1
                    ))
                })?;
                let parse_idx = |s: &str| {
                    s.parse::<usize>().map_err(|_| {
                        Error::input(format!(
                            "config line {}: bad vertex index {s:?}",
                            lineno + 1
                        ))
                    })
                };
                let len = len.parse::<f64>().map_err(|_| {
                    Error::input(format!(
                        "config line {}: bad edge length {len:?}",
                        lineno + 1
                    ))
                })?;
                edges.push((parse_idx(u)?, parse_idx(v)?, len));
            }
            Decoration::new(letter, nv, base, edges)
        }
        _ => Err(Error::input(format!(
            "config line {}: decoration must be 'vertex', 'pendant <len>' or 'graph ...'",
            lineno + 1
        ))),
    }
}
