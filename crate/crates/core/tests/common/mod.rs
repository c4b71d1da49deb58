//! Independent reference implementations used as test oracles. Nothing here
//! calls into the code paths it checks.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Minimum within-cluster sum of squares over every split into two
/// non-empty groups.
pub fn brute_min_wcss_2(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let dim = points[0].len();
    let mut best = f64::INFINITY;
    // fix point 0 in group 0 to skip mirrored splits
    for mask in 1u32..(1 << (n - 1)) {
        let mask = mask << 1;
        let mut cost = 0.0;
        for g in [false, true] {
            let members: Vec<&Vec<f64>> = (0..n)
                .filter(|&i| ((mask >> i) & 1 == 1) == g)
                .map(|i| &points[i])
                .collect();
            let mut mean = vec![0.0; dim];
            for p in &members {
                for d in 0..dim {
                    mean[d] += p[d] / members.len() as f64;
                }
            }
            cost += members.iter().map(|p| sq(p, &mean)).sum::<f64>();
        }
        best = best.min(cost);
    }
    best
}

/// All set partitions of `0..n` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            cur[i] = l;
            rec(i + 1, max.max(l), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

/// Modularity straight from the definition over a dense weight matrix.
pub fn modularity_dense(w: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = w.len();
    let k: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += w[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

pub fn brute_max_modularity(w: &[Vec<f64>]) -> f64 {
    set_partitions(w.len())
        .iter()
        .map(|l| modularity_dense(w, l))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random weighted graph on `n` nodes with at least one edge, as
/// (dense matrix, edge list).
pub fn random_graph(r: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<f64>>, Vec<(usize, usize, f64)>) {
    let p: f64 = r.random_range(0.2..0.8);
    let weighted = r.random_bool(0.5);
    loop {
        let mut w = vec![vec![0.0; n]; n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if r.random_bool(p) {
                    let x = if weighted { r.random_range(0.1..1.0) } else { 1.0 };
                    w[i][j] = x;
                    w[j][i] = x;
                    edges.push((i, j, x));
                }
            }
        }
        if !edges.is_empty() {
            return (w, edges);
        }
    }
}

/// Silhouette from the definition, squared Euclidean dissimilarity.
pub fn naive_silhouette(points: &[Vec<f64>], labels: &[usize]) -> Vec<f64> {
    let n = points.len();
    let k = labels.iter().max().unwrap() + 1;
    (0..n)
        .map(|i| {
            let own: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == labels[i]).collect();
            if own.is_empty() {
                return 0.0;
            }
            let a = own.iter().map(|&j| sq(&points[i], &points[j])).sum::<f64>() / own.len() as f64;
            let mut b = f64::INFINITY;
            for c in 0..k {
                if c == labels[i] {
                    continue;
                }
                let other: Vec<usize> = (0..n).filter(|&j| labels[j] == c).collect();
                if other.is_empty() {
                    continue;
                }
                let m = other.iter().map(|&j| sq(&points[i], &points[j])).sum::<f64>() / other.len() as f64;
                b = b.min(m);
            }
            if a == 0.0 && b == 0.0 {
                0.0
            } else {
                (b - a) / a.max(b)
            }
        })
        .collect()
}

/// Kaplan-Meier by walking every distinct event time and recounting the risk
/// set from scratch. Returns (time, at risk, events, survival).
pub fn naive_km(obs: &[(f64, bool)]) -> Vec<(f64, usize, usize, f64)> {
    let mut times: Vec<f64> = obs.iter().filter(|o| o.1).map(|o| o.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut s = 1.0;
    times
        .into_iter()
        .map(|t| {
            let n = obs.iter().filter(|o| o.0 >= t).count();
            let d = obs.iter().filter(|o| o.1 && o.0 == t).count();
            s *= (n - d) as f64 / n as f64;
            (t, n, d, s)
        })
        .collect()
}

/// Chi-square upper tail by adaptive Simpson integration of the density.
pub fn chi_square_sf_quadrature(x: f64, df: u32) -> f64 {
    let k = df as f64 / 2.0;
    let ln_norm = -(k * 2f64.ln()) - ln_gamma_stirling(k);
    let pdf = move |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            (ln_norm + (k - 1.0) * t.ln() - t / 2.0).exp()
        }
    };
    // integrate [0, x] with a sqrt substitution that removes the df=1 pole
    let g = |u: f64| 2.0 * u * pdf(u * u);
    let cdf = adaptive_simpson(&g, 0.0, x.sqrt(), 1e-13, 50);
    1.0 - cdf
}

fn ln_gamma_stirling(x: f64) -> f64 {
    // shift up then Stirling series; independent of the Lanczos code
    let mut shift = 0.0;
    let mut z = x;
    while z < 20.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5))
        - 1.0 / (1680.0 * z.powi(7));
    shift + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, eps / 2.0, left, depth - 1) + rec(f, m, b, eps / 2.0, right, depth - 1)
    }
    rec(f, a, b, eps, simpson(f, a, b), depth)
}

/// Connected components by breadth-first search.
pub fn bfs_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([s]);
        comp[s] = next;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Minimum normalized cut over all 2-partitions of a dense weight matrix.
/// Returns (cut value, side mask with node 0 on side 0).
pub fn brute_min_ncut(w: &[Vec<f64>]) -> (f64, u32) {
    let n = w.len();
    let deg: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let mut best = (f64::INFINITY, 0);
    for mask in 1u32..(1 << (n - 1)) {
        let mask = mask << 1;
        let side = |i: usize| (mask >> i) & 1 == 1;
        let mut cut = 0.0;
        let (mut vol0, mut vol1) = (0.0, 0.0);
        for i in 0..n {
            if side(i) { vol1 += deg[i] } else { vol0 += deg[i] }
            for j in 0..n {
                if side(i) != side(j) && i < j {
                    cut += w[i][j];
                }
            }
        }
        let ncut = cut / vol0 + cut / vol1;
        if ncut < best.0 {
            best = (ncut, mask);
        }
    }
    best
}

/// True when two labelings induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// Two-group log-rank pieces from a per-event-time table:
/// (O_1, E_1, V) with V summed over times where more than one subject is at risk.
pub fn logrank_table(g1: &[(f64, bool)], g2: &[(f64, bool)]) -> (f64, f64, f64) {
    let mut times: Vec<f64> = g1.iter().chain(g2).filter(|o| o.1).map(|o| o.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (mut o1, mut e1, mut v) = (0.0, 0.0, 0.0);
    for t in times {
        let n1 = g1.iter().filter(|o| o.0 >= t).count() as f64;
        let n2 = g2.iter().filter(|o| o.0 >= t).count() as f64;
        let d1 = g1.iter().filter(|o| o.1 && o.0 == t).count() as f64;
        let d2 = g2.iter().filter(|o| o.1 && o.0 == t).count() as f64;
        let (n, d) = (n1 + n2, d1 + d2);
        o1 += d1;
        e1 += d * n1 / n;
        if n > 1.0 {
            v += d * (n - d) * n1 * n2 / (n * n * (n - 1.0));
        }
    }
    (o1, e1, v)
}

/// Clinical table from (time, event) pairs; sample ids are `{prefix}{index}`.
pub fn clinical(prefix: &str, obs: &[(f64, bool)]) -> stratix::ingest::ClinicalTable {
    stratix::ingest::ClinicalTable::from_records(
        obs.iter()
            .enumerate()
            .map(|(i, &(t, e))| stratix::ingest::ClinicalRecord {
                sample_id: format!("{prefix}{i}"),
                age: None,
                tumor_grade: None,
                survival_time: t,
                event: e,
            })
            .collect(),
    )
    .unwrap()
}

/// Random censored dataset with integer-valued times so ties occur.
pub fn random_survival(r: &mut ChaCha8Rng, n: usize, censor_p: f64) -> Vec<(f64, bool)> {
    (0..n)
        .map(|_| (r.random_range(1..=12) as f64, !r.random_bool(censor_p)))
        .collect()
}
