use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sq_dist, ClusterParams, Method, Partition};
use crate::error::{Error, Result};
use crate::features::FeatureView;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub k: usize,
    pub seed: u64,
    /// Independent k-means++ restarts; the lowest-WCSS run wins.
    pub n_init: usize,
    pub max_iter: usize,
    /// Stop once the relative WCSS improvement falls below this.
    pub tol: f64,
}

impl KMeansOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            n_init: 20,
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct KMeansFit {
    pub labels: Vec<usize>,
    pub wcss: f64,
}

pub fn kmeans(view: &FeatureView, k: usize, seed: u64) -> Result<Partition> {
    kmeans_with(view, &KMeansOptions::new(k, seed))
}

pub fn kmeans_with(view: &FeatureView, opts: &KMeansOptions) -> Result<Partition> {
    let fit = fit_points(view.points(), opts)?;
    let mut p = Partition::from_labels(
        view.modality_name.clone(),
        view.sample_ids.clone(),
        &fit.labels,
        Method::Kmeans,
        ClusterParams {
            k: Some(opts.k),
            seed: opts.seed,
            ..Default::default()
        },
    )?;
    p.wcss = Some(fit.wcss);
    Ok(p)
}

fn distinct_count(points: &[Vec<f64>]) -> usize {
    let mut keys: Vec<Vec<u64>> = points
        .iter()
        .map(|p| p.iter().map(|v| (v + 0.0).to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

pub(crate) fn fit_points(points: &[Vec<f64>], opts: &KMeansOptions) -> Result<KMeansFit> {
    let n = points.len();
    let k = opts.k;
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n, min: 1 });
    }
    let distinct = distinct_count(points);
    if distinct < k {
        return Err(Error::TooFewDistinctPoints { k, distinct });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..opts.n_init.max(1) {
        let fit = lloyd(points, k, opts, &mut rng);
        if best.as_ref().is_none_or(|b| fit.wcss < b.wcss) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one run"))
}

/// k-means++ seeding: first centre uniform, then proportional to the squared
/// distance to the nearest chosen centre.
fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centres = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centres[0])).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = None;
        for (i, &w) in d2.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            pick = Some(i);
            if target < w {
                break;
            }
            target -= w;
        }
        let pick = pick.expect("distinct points remain");
        centres.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &centres[centres.len() - 1]));
        }
    }
    centres
}

fn nearest(p: &[f64], centres: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centre) in centres.iter().enumerate() {
        let d = sq_dist(p, centre);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn means(points: &[Vec<f64>], labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|v| *v /= c as f64);
        }
    }
    (sums, counts)
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(points: &[Vec<f64>], labels: &mut [usize], k: usize) {
    loop {
        let (centres, counts) = means(points, labels, k);
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far = None;
        let mut far_d = -1.0;
        for (i, p) in points.iter().enumerate() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let d = sq_dist(p, &centres[labels[i]]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        match far {
            Some(i) => labels[i] = empty,
            None => return,
        }
    }
}

fn wcss_of(points: &[Vec<f64>], labels: &[usize], centres: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &centres[l]))
        .sum()
}

fn lloyd(points: &[Vec<f64>], k: usize, opts: &KMeansOptions, rng: &mut ChaCha8Rng) -> KMeansFit {
    let mut centres = plus_plus(points, k, rng);
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centres)).collect();
    repair_empty(points, &mut labels, k);
    (centres, _) = means(points, &labels, k);
    let mut wcss = wcss_of(points, &labels, &centres);

    for _ in 0..opts.max_iter {
        let mut next: Vec<usize> = points.iter().map(|p| nearest(p, &centres)).collect();
        repair_empty(points, &mut next, k);
        let (next_centres, _) = means(points, &next, k);
        let next_wcss = wcss_of(points, &next, &next_centres);
        debug_assert!(
            next_wcss <= wcss * (1.0 + 1e-12) + 1e-12,
            "WCSS increased: {wcss} -> {next_wcss}"
        );
        let improvement = wcss - next_wcss;
        let converged = next == labels || wcss == 0.0 || improvement / wcss < opts.tol;
        labels = next;
        centres = next_centres;
        wcss = next_wcss;
        if converged {
            break;
        }
    }
    hartigan(points, &mut labels, k);
    let (centres, _) = means(points, &labels, k);
    let wcss = wcss_of(points, &labels, &centres);
    KMeansFit { labels, wcss }
}

/// Single-point transfers after Lloyd: moves a point whenever doing so
/// lowers the WCSS, accounting for both centroids shifting. Lloyd's fixed
/// points are not always stable under such moves.
fn hartigan(points: &[Vec<f64>], labels: &mut [usize], k: usize) {
    let (mut centres, mut counts) = means(points, labels, k);
    let dim = points[0].len();
    for _ in 0..points.len() * 10 {
        let mut moved = false;
        for (i, p) in points.iter().enumerate() {
            let from = labels[i];
            if counts[from] < 2 {
                continue;
            }
            let nf = counts[from] as f64;
            let removal = nf / (nf - 1.0) * sq_dist(p, &centres[from]);
            let mut best = None;
            let mut best_add = removal;
            for to in (0..k).filter(|&c| c != from) {
                let nt = counts[to] as f64;
                let add = nt / (nt + 1.0) * sq_dist(p, &centres[to]);
                if add < best_add * (1.0 - 1e-12) {
                    best_add = add;
                    best = Some(to);
                }
            }
            if let Some(to) = best {
                let (nf, nt) = (counts[from] as f64, counts[to] as f64);
                for d in 0..dim {
                    centres[from][d] = (centres[from][d] * nf - p[d]) / (nf - 1.0);
                    centres[to][d] = (centres[to][d] * nt + p[d]) / (nt + 1.0);
                }
                counts[from] -= 1;
                counts[to] += 1;
                labels[i] = to;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}
