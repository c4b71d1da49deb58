//! Louvain-style greedy modularity maximisation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ClusterParams, Method, Partition};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

const MIN_GAIN: f64 = 1e-12;
/// Restarts scale inversely with graph size: small graphs get many cheap
/// restarts, large ones at least `MIN_RESTARTS`.
const RESTART_BUDGET: usize = 4096;
const MIN_RESTARTS: usize = 10;
const MAX_RESTARTS: usize = 256;
const MAX_KL_PASSES: usize = 50;

/// Weighted modularity of a labelling,
/// `Q = 1/2m · Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
pub fn modularity(graph: &SimilarityGraph, labels: &[usize]) -> f64 {
    let n = graph.n_vertices();
    let mut degree = vec![0.0; n];
    let mut two_m = 0.0;
    let mut internal = 0.0;
    for e in &graph.edges {
        degree[e.i] += e.weight;
        degree[e.j] += e.weight;
        two_m += 2.0 * e.weight;
        if labels[e.i] == labels[e.j] {
            internal += 2.0 * e.weight;
        }
    }
    if two_m == 0.0 {
        return 0.0;
    }
    let mut tot: BTreeMap<usize, f64> = BTreeMap::new();
    for (v, &l) in labels.iter().enumerate() {
        *tot.entry(l).or_insert(0.0) += degree[v];
    }
    internal / two_m - tot.values().map(|t| (t / two_m).powi(2)).sum::<f64>()
}

/// Aggregated graph level: symmetric adjacency where `adj[i][i]` holds
/// twice the internal weight, so row sums are node strengths.
struct Level {
    adj: Vec<BTreeMap<usize, f64>>,
    strength: Vec<f64>,
}

fn louvain(base: &Level, two_m: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut membership: Vec<usize> = (0..base.n()).collect();
    let mut level = None::<Level>;
    loop {
        let cur = level.as_ref().unwrap_or(base);
        let (comm, moved) = cur.local_moves(two_m, rng);
        if !moved {
            break;
        }
        let (next, dense) = cur.aggregate(&comm);
        for m in membership.iter_mut() {
            *m = dense[*m];
        }
        level = Some(next);
    }
    base.kl_refine(&mut membership, two_m);
    membership
}

impl Level {
    fn from_graph(g: &SimilarityGraph) -> Self {
        let n = g.n_vertices();
        let mut adj = vec![BTreeMap::new(); n];
        for e in &g.edges {
            *adj[e.i].entry(e.j).or_insert(0.0) += e.weight;
            *adj[e.j].entry(e.i).or_insert(0.0) += e.weight;
        }
        Self::with_adj(adj)
    }

    fn with_adj(adj: Vec<BTreeMap<usize, f64>>) -> Self {
        let strength = adj.iter().map(|row| row.values().sum()).collect();
        Self { adj, strength }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Repeated local-move passes in a fixed shuffled order. Returns the
    /// community of each node and whether anything moved.
    fn local_moves(&self, two_m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.n();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for &v in &order {
                let kv = self.strength[v];
                let old = comm[v];
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                links.insert(old, 0.0);
                for (&u, &w) in &self.adj[v] {
                    if u != v {
                        *links.entry(comm[u]).or_insert(0.0) += w;
                    }
                }
                tot[old] -= kv;
                // gain of inserting v into c, up to the common factor 1/m
                let gain = |c: usize, k_in: f64| k_in - tot[c] * kv / two_m;
                let stay = gain(old, links[&old]);
                let mut best = old;
                let mut best_gain = stay;
                for (&c, &k_in) in &links {
                    let g = gain(c, k_in);
                    if g > best_gain {
                        best_gain = g;
                        best = c;
                    }
                }
                if best != old && (best_gain - stay) * 2.0 / two_m > MIN_GAIN {
                    comm[v] = best;
                    moved = true;
                    moved_any = true;
                } else {
                    best = old;
                }
                tot[best] += kv;
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    /// Kernighan-Lin style polish on the original graph. Each pass moves
    /// every vertex once, always taking the best available move even when it
    /// lowers modularity, then rolls back to the best point reached. This
    /// escapes local optima where two moves are needed before any gain shows.
    fn kl_refine(&self, comm: &mut [usize], two_m: f64) {
        let n = self.n();
        let adj: Vec<Vec<(usize, f64)>> = self
            .adj
            .iter()
            .enumerate()
            .map(|(v, row)| row.iter().filter(|(&u, _)| u != v).map(|(&u, &w)| (u, w)).collect())
            .collect();
        let mut acc = vec![0.0; n];
        let mut touched = Vec::new();
        for _ in 0..MAX_KL_PASSES {
            let mut tot = vec![0.0; n];
            let mut size = vec![0usize; n];
            for v in 0..n {
                tot[comm[v]] += self.strength[v];
                size[comm[v]] += 1;
            }
            let mut cur = comm.to_vec();
            let mut locked = vec![false; n];
            let mut gain_sum = 0.0;
            let mut best_sum = 0.0;
            let mut best_prefix = 0;
            let mut moves = Vec::with_capacity(n);
            for _ in 0..n {
                let free = size.iter().position(|&s| s == 0);
                let mut pick: Option<(f64, usize, usize)> = None;
                for v in (0..n).filter(|&v| !locked[v] && !adj[v].is_empty()) {
                    let kv = self.strength[v];
                    let old = cur[v];
                    for &(u, w) in &adj[v] {
                        let c = cur[u];
                        if acc[c] == 0.0 {
                            touched.push(c);
                        }
                        acc[c] += w;
                    }
                    let stay = acc[old] - (tot[old] - kv) * kv / two_m;
                    let mut consider = |c: usize, k_in: f64| {
                        let g = (k_in - tot[c] * kv / two_m - stay) * 2.0 / two_m;
                        if pick.is_none_or(|(bg, _, _)| g > bg) {
                            pick = Some((g, v, c));
                        }
                    };
                    for &c in touched.iter().filter(|&&c| c != old) {
                        consider(c, acc[c]);
                    }
                    if let Some(f) = free.filter(|_| size[old] > 1) {
                        consider(f, 0.0);
                    }
                    for c in touched.drain(..) {
                        acc[c] = 0.0;
                    }
                }
                let Some((g, v, c)) = pick else { break };
                tot[cur[v]] -= self.strength[v];
                tot[c] += self.strength[v];
                size[cur[v]] -= 1;
                size[c] += 1;
                cur[v] = c;
                locked[v] = true;
                moves.push((v, c));
                gain_sum += g;
                if gain_sum > best_sum + MIN_GAIN {
                    best_sum = gain_sum;
                    best_prefix = moves.len();
                }
            }
            if best_prefix == 0 {
                return;
            }
            for &(v, c) in &moves[..best_prefix] {
                comm[v] = c;
            }
        }
    }

    fn aggregate(&self, comm: &[usize]) -> (Level, Vec<usize>) {
        let (dense, count) = super::canonical_labels(comm);
        let mut adj = vec![BTreeMap::new(); count];
        for (v, row) in self.adj.iter().enumerate() {
            for (&u, &w) in row {
                *adj[dense[v]].entry(dense[u]).or_insert(0.0) += w;
            }
        }
        (Level::with_adj(adj), dense)
    }
}

/// Partitions the population graph into communities by greedy modularity
/// maximisation. The number of communities is emergent; isolated vertices
/// end up as singletons. Several shuffled visit orders are tried from the
/// seeded generator and the highest-modularity result kept.
pub fn community_detect(graph: &SimilarityGraph, seed: u64) -> Result<Partition> {
    if graph.edges.is_empty() {
        return Err(Error::EdgelessGraph);
    }
    if graph.edges.iter().any(|e| !(e.weight > 0.0)) {
        return Err(Error::Domain("community detection needs positive edge weights".into()));
    }
    let two_m: f64 = 2.0 * graph.edges.iter().map(|e| e.weight).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = Level::from_graph(graph);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let restarts = (RESTART_BUDGET / graph.n_vertices().max(1)).clamp(MIN_RESTARTS, MAX_RESTARTS);
    for _ in 0..restarts {
        let membership = louvain(&base, two_m, &mut rng);
        let q = modularity(graph, &membership);
        if best.as_ref().is_none_or(|(bq, _)| q > bq + MIN_GAIN) {
            best = Some((q, membership));
        }
    }
    let (_, membership) = best.expect("at least one restart");
    let mut p = Partition::from_labels(
        "graph",
        graph.sample_ids.clone(),
        &membership,
        Method::Community,
        ClusterParams {
            k: None,
            seed,
            metric: Some(graph.metric),
            threshold: Some(graph.threshold),
        },
    )?;
    p.modularity = Some(modularity(graph, &p.labels));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn bridged_cliques() {
        let mut edges = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((base + i, base + j, 1.0));
                }
            }
        }
        edges.push((3, 4, 1.0));
        let g = SimilarityGraph::from_edges(ids(8), edges).unwrap();
        for seed in 0..20 {
            let p = community_detect(&g, seed).unwrap();
            assert_eq!(p.labels, vec![0, 0, 0, 0, 1, 1, 1, 1], "seed {seed}");
            // 12 intra edges of 13; each side has degree 13
            let expected = 12.0 / 13.0 - 2.0 * 0.25;
            assert!((p.modularity.unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_one_community() {
        let edges = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j, 1.0)));
        let g = SimilarityGraph::from_edges(ids(5), edges).unwrap();
        let p = community_detect(&g, 4).unwrap();
        assert_eq!(p.k, 1);
    }

    #[test]
    fn two_edges_and_isolated_vertex() {
        let g = SimilarityGraph::from_edges(ids(5), [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let p = community_detect(&g, 0).unwrap();
        assert_eq!(p.labels, vec![0, 0, 1, 1, 2]);
        assert_eq!(p.k, 3);
    }

    #[test]
    fn edgeless_errors() {
        let g = SimilarityGraph::from_edges(ids(3), []).unwrap();
        assert_eq!(community_detect(&g, 0).unwrap_err(), Error::EdgelessGraph);
    }
}
