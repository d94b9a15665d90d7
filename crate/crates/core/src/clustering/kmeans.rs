//! Lloyd's k-means over the rows of a dense matrix, seeded with k-means++
//! and repeated over several restarts.

use nalgebra::DMatrix;
use rand::Rng;

use super::partition::canonicalize;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, tag};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative SSE change below which a run is considered converged.
    pub tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            restarts: 10,
            max_iters: 100,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster of each row, renumbered in order of first appearance.
    pub labels: Vec<usize>,
    /// Within-cluster sum of squared distances to the cluster means.
    pub sse: f64,
    /// Restart that produced the result.
    pub restart: usize,
}

struct Rows<'a> {
    data: &'a [f64],
    dim: usize,
}

impl Rows<'_> {
    fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init<R: Rng>(rows: &Rows, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(rows.row(i), rows.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 && total.is_finite() {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in dist.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `acc` just short of `target`.
            pick.unwrap_or_else(|| dist.iter().rposition(|&d| d > 0.0).expect("positive mass"))
        } else {
            // Every row coincides with a chosen centroid.
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(rows.row(i), rows.row(next)));
        }
    }
    chosen.iter().map(|&i| rows.row(i).to_vec()).collect()
}

fn assign(rows: &Rows, centroids: &[Vec<f64>], labels: &mut [usize]) {
    for (i, label) in labels.iter_mut().enumerate() {
        let row = rows.row(i);
        let mut best = 0;
        let mut best_d = sq_dist(row, &centroids[0]);
        for (c, centroid) in centroids.iter().enumerate().skip(1) {
            let d = sq_dist(row, centroid);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        *label = best;
    }
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that can spare it.
fn repair_empty(rows: &Rows, centroids: &mut [Vec<f64>], labels: &mut [usize]) {
    let k = centroids.len();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let mut donor = None;
        let mut donor_d = f64::NEG_INFINITY;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] > 1 {
                let d = sq_dist(rows.row(i), &centroids[l]);
                if d > donor_d {
                    donor = Some(i);
                    donor_d = d;
                }
            }
        }
        let i = donor.expect("k <= n leaves a cluster with a spare point");
        sizes[labels[i]] -= 1;
        sizes[empty] += 1;
        labels[i] = empty;
        centroids[empty] = rows.row(i).to_vec();
    }
}

fn update_means(rows: &Rows, labels: &[usize], centroids: &mut [Vec<f64>]) {
    let mut counts = vec![0usize; centroids.len()];
    for c in centroids.iter_mut() {
        c.iter_mut().for_each(|x| *x = 0.0);
    }
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (acc, x) in centroids[l].iter_mut().zip(rows.row(i)) {
            *acc += x;
        }
    }
    for (c, &n) in centroids.iter_mut().zip(&counts) {
        c.iter_mut().for_each(|x| *x /= n as f64);
    }
}

fn sse(rows: &Rows, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(rows.row(i), &centroids[l]))
        .sum()
}

fn lloyd(rows: &Rows, mut centroids: Vec<Vec<f64>>, params: &KMeansParams) -> (Vec<usize>, f64) {
    let mut labels = vec![0usize; rows.len()];
    let mut prev = f64::INFINITY;
    let mut current = f64::INFINITY;
    for _ in 0..params.max_iters.max(1) {
        assign(rows, &centroids, &mut labels);
        repair_empty(rows, &mut centroids, &mut labels);
        update_means(rows, &labels, &mut centroids);
        current = sse(rows, &labels, &centroids);
        if current == 0.0 || (prev.is_finite() && (prev - current).abs() < params.tol * prev) {
            break;
        }
        prev = current;
    }
    (labels, current)
}

/// Clusters the rows of `y` into exactly `k` nonempty groups.
///
/// Runs `params.restarts` independently seeded k-means++ initializations and
/// keeps the lowest SSE, the earliest restart winning ties.
pub fn kmeans_rows(y: &DMatrix<f64>, k: usize, params: &KMeansParams, seed: u64) -> Result<KMeansResult> {
    let n = y.nrows();
    if k == 0 || k > n {
        return Err(Error::Config(format!("cannot form {k} clusters from {n} rows")));
    }
    // Row-major copy so each row is contiguous.
    let data: Vec<f64> = (0..n).flat_map(|i| y.row(i).iter().copied().collect::<Vec<_>>()).collect();
    let rows = Rows {
        data: &data,
        dim: y.ncols(),
    };
    if rows.dim == 0 {
        // No coordinates: spread the rows over the clusters in order.
        let labels = (0..n).map(|i| i.min(k - 1)).collect();
        return Ok(KMeansResult {
            labels,
            sse: 0.0,
            restart: 0,
        });
    }
    let mut best: Option<KMeansResult> = None;
    for restart in 0..params.restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, tag::KMEANS, restart as u64));
        let init = plus_plus_init(&rows, k, &mut rng);
        let (labels, sse) = lloyd(&rows, init, params);
        if best.as_ref().is_none_or(|b| sse < b.sse) {
            best = Some(KMeansResult {
                labels,
                sse,
                restart,
            });
        }
    }
    let mut best = best.expect("at least one restart");
    best.labels = canonicalize(&best.labels);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn distinct_labels(labels: &[usize]) -> usize {
        let mut v = labels.to_vec();
        v.sort();
        v.dedup();
        v.len()
    }

    #[test]
    fn one_row_per_cluster() {
        let y = DMatrix::from_row_slice(4, 2, &[0., 0., 1., 0., 0., 1., 5., 5.]);
        let r = kmeans_rows(&y, 4, &KMeansParams::default(), 1).unwrap();
        assert_eq!(distinct_labels(&r.labels), 4);
        assert_eq!(r.sse, 0.0);
    }

    #[test]
    fn separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut data = Vec::new();
        let mut truth = Vec::new();
        for i in 0..40 {
            let centre = if i % 2 == 0 { 0.0 } else { 10.0 };
            data.push(centre + rng.random_range(-0.5..0.5));
            data.push(centre + rng.random_range(-0.5..0.5));
            truth.push(i % 2);
        }
        let y = DMatrix::from_row_slice(40, 2, &data);
        let r = kmeans_rows(&y, 2, &KMeansParams::default(), 3).unwrap();
        assert_eq!(r.labels, canonicalize(&truth));
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = DMatrix::from_fn(30, 3, |_, _| rng.random::<f64>());
        let p = KMeansParams::default();
        assert_eq!(kmeans_rows(&y, 5, &p, 77).unwrap(), kmeans_rows(&y, 5, &p, 77).unwrap());
    }

    #[test]
    fn duplicate_rows_still_fill_every_cluster() {
        let y = DMatrix::from_row_slice(6, 1, &[1., 1., 1., 1., 2., 2.]);
        let r = kmeans_rows(&y, 4, &KMeansParams::default(), 5).unwrap();
        assert_eq!(distinct_labels(&r.labels), 4);
        let y = DMatrix::zeros(5, 2);
        let r = kmeans_rows(&y, 3, &KMeansParams::default(), 5).unwrap();
        assert_eq!(distinct_labels(&r.labels), 3);
    }

    #[test]
    fn restarts_never_worse_than_single_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let y = DMatrix::from_fn(50, 4, |_, _| rng.random::<f64>());
        let one = KMeansParams {
            restarts: 1,
            ..Default::default()
        };
        let single = kmeans_rows(&y, 6, &one, 9).unwrap();
        let many = kmeans_rows(&y, 6, &KMeansParams::default(), 9).unwrap();
        assert!(many.sse <= single.sse);
    }

    #[test]
    fn rejects_too_many_clusters() {
        assert!(kmeans_rows(&DMatrix::zeros(2, 1), 3, &KMeansParams::default(), 0).is_err());
    }
}
