//! Link prediction from node embeddings on small graphs.
//!
//! A decoder that sees only pairwise embedding distances cannot tell apart
//! two node pairs whose embeddings sit at the same distance. Equivariant
//! embeddings are constant on automorphism orbits, so on automorphic graphs
//! they force edge and non-edge pairs into the same distance class.
//! Appending a sampled `g̃v` separates them.

use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::sort_canonicalize;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, PermutationAction, Subgroup};
use crate::rng::{self, Rng};
use crate::sympe::{make_breaking_vector, SymPEVector};

pub const MAX_NODES: usize = 8;

/// Distances closer than this fall in the same decoder class.
pub const DISTANCE_TOLERANCE: f64 = 1e-9;

/// Weight of the neighbor-degree sum in the sorting score.
pub const SCORE_WEIGHT: f64 = 1.0 / 64.0;

/// Simple undirected graph on at most [`MAX_NODES`] nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SmallGraph {
    n: usize,
    adj: Vec<bool>,
}

impl SmallGraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooLarge { what: format!("graph on {n} nodes"), limit: MAX_NODES });
        }
        Ok(Self { n, adj: vec![false; n * n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidParameter(format!("bad edge ({a}, {b}) on {n} nodes")));
            }
            g.set(a, b, true);
        }
        Ok(g)
    }

    pub fn from_adjacency(n: usize, adj: Vec<bool>) -> Result<Self> {
        let g = Self { adj, ..Self::empty(n)? };
        if g.adj.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: g.adj.len() });
        }
        for i in 0..n {
            if g.adj[i * n + i] {
                return Err(Error::InvalidParameter(format!("self-loop at {i}")));
            }
            for j in 0..i {
                if g.adj[i * n + j] != g.adj[j * n + i] {
                    return Err(Error::InvalidParameter(format!("asymmetric adjacency at ({i}, {j})")));
                }
            }
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        Self::from_edges(n, &edges)
    }

    /// `K_n` minus a perfect matching `{(0,1), (2,3), …}`.
    pub fn cocktail_party(pairs: usize) -> Result<Self> {
        let n = 2 * pairs;
        let edges: Vec<_> = (0..n).flat_map(|i| (0..i).filter(move |&j| j / 2 != i / 2).map(move |j| (i, j))).collect();
        Self::from_edges(n, &edges)
    }

    fn set(&mut self, a: usize, b: usize, on: bool) {
        self.adj[a * self.n + b] = on;
        self.adj[b * self.n + a] = on;
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.n + b]
    }

    pub fn degree(&self, a: usize) -> usize {
        (0..self.n).filter(|&b| self.has_edge(a, b)).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count() / 2
    }

    /// `gAgᵀ`: node `i` is relabeled `perm[i]`.
    pub fn permuted(&self, perm: &[u32]) -> Self {
        let mut out = Self { n: self.n, adj: vec![false; self.n * self.n] };
        for a in 0..self.n {
            for b in 0..self.n {
                out.adj[perm[a] as usize * self.n + perm[b] as usize] = self.has_edge(a, b);
            }
        }
        out
    }
}

/// Each of the `C(n, 2)` pairs independently an edge with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut Rng) -> Result<SmallGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    let mut g = SmallGraph::empty(n)?;
    for a in 0..n {
        for b in 0..a {
            if rng.random::<f64>() < p {
                g.set(a, b, true);
            }
        }
    }
    Ok(g)
}

/// All `g ∈ S_n` with `gAgᵀ = A`. `sym` must be `S_n` on the graph's nodes.
pub fn automorphism_group(graph: &SmallGraph, sym: &Arc<FiniteGroup>) -> Result<Subgroup> {
    if sym.degree() != graph.n {
        return Err(Error::DimensionMismatch { expected: graph.n, actual: sym.degree() });
    }
    let members = sym.elements().filter(|&g| &graph.permuted(sym.perm(g)) == graph);
    Subgroup::new(sym.clone(), members)
}

/// Row-major `n × f` matrix of node features.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeEmbedding {
    pub nodes: usize,
    pub features: usize,
    pub data: Vec<f64>,
}

impl NodeEmbedding {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.features..(i + 1) * self.features]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    fn from_columns(nodes: usize, columns: &[Vec<f64>]) -> Self {
        let features = columns.len();
        let data = (0..nodes).flat_map(|i| columns.iter().map(move |c| c[i])).collect();
        Self { nodes, features, data }
    }

    /// Rows reordered so that row `perm[i]` of the result is row `i` here.
    pub fn permuted(&self, perm: &[u32]) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for (i, &to) in perm.iter().enumerate().take(self.nodes) {
            let to = to as usize;
            data[to * self.features..(to + 1) * self.features].copy_from_slice(self.row(i));
        }
        Self { data, ..*self }
    }
}

fn neighbor_sum(graph: &SmallGraph, col: &[f64]) -> Vec<f64> {
    (0..graph.n).map(|a| (0..graph.n).filter(|&b| graph.has_edge(a, b)).map(|b| col[b]).sum()).collect()
}

/// Fixed-weight message passing: column 0 is the degree, column `k` the
/// neighbor sum of column `k − 1`. Integer-valued, so equivariance is exact.
pub fn equivariant_embed(graph: &SmallGraph, rounds: usize) -> NodeEmbedding {
    let mut columns = vec![(0..graph.n).map(|a| graph.degree(a) as f64).collect::<Vec<f64>>()];
    for k in 0..rounds {
        let next = neighbor_sum(graph, &columns[k]);
        columns.push(next);
    }
    NodeEmbedding::from_columns(graph.n, &columns)
}

/// One message-passing layer: `deg(i) + w Σ_{j~i} deg(j)`.
pub fn sort_scores(graph: &SmallGraph) -> Vec<f64> {
    let deg: Vec<f64> = (0..graph.n).map(|a| graph.degree(a) as f64).collect();
    deg.iter().zip(neighbor_sum(graph, &deg)).map(|(d, s)| d + SCORE_WEIGHT * s).collect()
}

/// `equivariant_embed` with one extra column `g̃v`, `g̃` a tie-broken sort of
/// the node scores.
pub fn sympe_embed(graph: &SmallGraph, rounds: usize, v: &SymPEVector, rng: &mut Rng) -> Result<NodeEmbedding> {
    if v.values.len() != graph.n {
        return Err(Error::DimensionMismatch { expected: graph.n, actual: v.values.len() });
    }
    let base = equivariant_embed(graph, rounds);
    let sample = sort_canonicalize(&sort_scores(graph), rng);
    let mut encoded = vec![0.0; graph.n];
    for (i, &to) in sample.tau.iter().enumerate() {
        encoded[to as usize] = v.values[i];
    }
    let mut columns: Vec<Vec<f64>> = (0..base.features).map(|c| (0..graph.n).map(|i| base.row(i)[c]).collect()).collect();
    columns.push(encoded);
    Ok(NodeEmbedding::from_columns(graph.n, &columns))
}

/// Fewest misclassified pairs achievable by any decoder `edge = φ(‖z_i − z_j‖)`,
/// as a fraction of `C(n, 2)`. Pairs are grouped by distance, chaining
/// neighbors closer than [`DISTANCE_TOLERANCE`]; each group takes its
/// majority label.
pub fn distance_decoder_best_error(graph: &SmallGraph, z: &NodeEmbedding) -> f64 {
    let n = graph.n;
    let mut pairs: Vec<(f64, bool)> =
        (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| (z.distance(i, j), graph.has_edge(i, j))).collect();
    if pairs.is_empty() {
        return 0.0;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut minority = 0;
    let mut start = 0;
    for k in 1..=pairs.len() {
        if k == pairs.len() || pairs[k].0 - pairs[k - 1].0 > DISTANCE_TOLERANCE {
            let edges = pairs[start..k].iter().filter(|p| p.1).count();
            minority += edges.min(k - start - edges);
            start = k;
        }
    }
    minority as f64 / pairs.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: usize,
    pub aut_order: usize,
    pub err_equivariant: f64,
    pub err_sympe: f64,
}

/// Parameters of an Erdős–Rényi comparison run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub count: usize,
    pub n: usize,
    pub p: f64,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self { count: 500, n: 7, p: 0.25, rounds: 2, seed: 0 }
    }
}

pub fn compare(graph: &SmallGraph, sym: &Arc<FiniteGroup>, rounds: usize, v: &SymPEVector, rng: &mut Rng) -> Result<GraphRecord> {
    let aut = automorphism_group(graph, sym)?;
    let err_equivariant = distance_decoder_best_error(graph, &equivariant_embed(graph, rounds));
    let err_sympe = distance_decoder_best_error(graph, &sympe_embed(graph, rounds, v, rng)?);
    Ok(GraphRecord { n: graph.n, edges: graph.edge_count(), aut_order: aut.order(), err_equivariant, err_sympe })
}

/// One shared breaking vector; graph `k` and its tie-breaking draw come from
/// stream `k + 1` of the seed.
pub fn run_corpus(config: &CorpusConfig) -> Result<Vec<GraphRecord>> {
    let sym = Arc::new(crate::groups::make_symmetric(config.n)?);
    let action = PermutationAction::natural(sym.clone());
    let v = make_breaking_vector(&action, &mut rng::stream(config.seed, 0))?;
    (0..config.count)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(config.seed, k as u64 + 1);
            let graph = erdos_renyi(config.n, config.p, &mut rng)?;
            compare(&graph, &sym, config.rounds, &v, &mut rng)
        })
        .collect()
}

/// `v = (0, 1, 3, 7)`: all pairwise differences distinct.
pub fn c4_vector() -> SymPEVector {
    SymPEVector {
        values: vec![0.0, 1.0, 3.0, 7.0],
        representation: crate::groups::ActionKind::Permutation { sites: 4, channels: 1 },
        redraws: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::make_symmetric;

    fn sym(n: usize) -> Arc<FiniteGroup> {
        Arc::new(make_symmetric(n).unwrap())
    }

    #[test]
    fn er_extremes() {
        let mut rng = rng::seeded(0);
        assert_eq!(erdos_renyi(6, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(6, 1.0, &mut rng).unwrap().edge_count(), 15);
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(automorphism_group(&SmallGraph::cycle(4).unwrap(), &sym(4)).unwrap().order(), 8);
        assert_eq!(automorphism_group(&SmallGraph::path(3).unwrap(), &sym(3)).unwrap().order(), 2);
        assert_eq!(automorphism_group(&SmallGraph::complete(4).unwrap(), &sym(4)).unwrap().order(), 24);
    }

    #[test]
    fn c4_equivariant_rows_coincide() {
        let z = equivariant_embed(&SmallGraph::cycle(4).unwrap(), 2);
        assert!((1..4).all(|i| z.row(i) == z.row(0)));
        assert_eq!(distance_decoder_best_error(&SmallGraph::cycle(4).unwrap(), &z), 1.0 / 3.0);
    }

    #[test]
    fn p3_orbits() {
        let z = equivariant_embed(&SmallGraph::path(3).unwrap(), 2);
        assert_eq!(z.row(0), z.row(2));
        assert_ne!(z.row(0), z.row(1));
    }

    #[test]
    fn c4_sympe_is_perfect() {
        let c4 = SmallGraph::cycle(4).unwrap();
        let mut rng = rng::seeded(1);
        for _ in 0..20 {
            let z = sympe_embed(&c4, 2, &c4_vector(), &mut rng).unwrap();
            assert_eq!(distance_decoder_best_error(&c4, &z), 0.0);
            for i in 0..4 {
                for j in 0..i {
                    assert_ne!(z.row(i), z.row(j));
                }
            }
        }
    }

    #[test]
    fn empty_graph_has_no_error() {
        let g = SmallGraph::empty(5).unwrap();
        assert_eq!(distance_decoder_best_error(&g, &equivariant_embed(&g, 1)), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SmallGraph::empty(9).is_err());
        assert!(SmallGraph::from_edges(3, &[(1, 1)]).is_err());
        assert!(SmallGraph::from_adjacency(2, vec![false, true, false, false]).is_err());
    }
}
