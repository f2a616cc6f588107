use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, FlatClustering, Points, Provenance};
use crate::error::{Error, Result};
use crate::similarity::Metric;

pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// k distinct rows drawn uniformly.
    #[default]
    RandomRows,
    /// k-means++ seeding.
    PlusPlus,
}

/// Lloyd K-means configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeans {
    pub k: usize,
    pub metric: Metric,
    pub seed: u64,
    pub max_iter: usize,
    pub init: Init,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub k: usize,
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared Euclidean deviations from the assigned centroids.
    pub wcss: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    /// WCSS after each assign/update step.
    pub wcss_history: Vec<f64>,
}

impl KMeansResult {
    pub fn clustering(&self) -> FlatClustering {
        FlatClustering::new(&self.labels, Provenance::Kmeans)
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }
}

fn sq_euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Σ ‖x − centroid(label(x))‖² in index order.
pub(crate) fn wcss(points: &Points, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .rows()
        .zip(labels)
        .map(|(x, &l)| sq_euclidean(x, &centroids[l]))
        .sum()
}

impl KMeans {
    pub fn new(k: usize) -> Self {
        KMeans {
            k,
            metric: Metric::Euclidean,
            seed: 0,
            max_iter: DEFAULT_MAX_ITER,
            init: Init::RandomRows,
        }
    }

    pub fn metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter.max(1);
        self
    }

    pub fn init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn fit(&self, points: &Points) -> Result<KMeansResult> {
        let n = points.n();
        if self.k == 0 || self.k > n {
            return Err(Error::KTooLarge { k: self.k, n });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut centroids = match self.init {
            Init::RandomRows => sample(&mut rng, n, self.k)
                .into_iter()
                .map(|i| points.row(i).to_vec())
                .collect(),
            Init::PlusPlus => self.plus_plus(points, &mut rng),
        };

        let mut labels: Vec<usize> = vec![usize::MAX; n];
        let mut history = Vec::new();
        let mut converged = false;
        let mut iterations = 0;
        for iter in 1..=self.max_iter {
            iterations = iter;
            let mut next = self.assign(points, &centroids);
            self.repair_empty(points, &centroids, &mut next);
            let changed = next != labels;
            labels = next;
            centroids = means(points, &labels, self.k);
            history.push(wcss(points, &labels, &centroids));
            if !changed {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!(
                "k-means (k = {}) hit max_iter = {} without converging",
                self.k,
                self.max_iter
            );
        }
        Ok(KMeansResult {
            k: self.k,
            wcss: *history.last().expect("at least one iteration"),
            labels,
            centroids,
            iterations,
            converged,
            seed: self.seed,
            wcss_history: history,
        })
    }

    fn assign(&self, points: &Points, centroids: &[Vec<f64>]) -> Vec<usize> {
        points
            .rows()
            .map(|x| {
                let mut best = (0, f64::INFINITY);
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = self.metric.eval(x, centroid);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best.0
            })
            .collect()
    }

    /// Moves the point farthest from its centroid (taken from a cluster with
    /// at least two members) into each empty cluster.
    fn repair_empty(&self, points: &Points, centroids: &[Vec<f64>], labels: &mut [usize]) {
        let mut sizes = vec![0usize; self.k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        while let Some(empty) = sizes.iter().position(|&s| s == 0) {
            let mut best: Option<(usize, f64)> = None;
            for (i, x) in points.rows().enumerate() {
                if sizes[labels[i]] < 2 {
                    continue;
                }
                let d = self.metric.eval(x, &centroids[labels[i]]);
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((i, d));
                }
            }
            let (i, _) = best.expect("k <= n guarantees a donor cluster");
            sizes[labels[i]] -= 1;
            labels[i] = empty;
            sizes[empty] += 1;
        }
    }

    fn plus_plus(&self, points: &Points, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let n = points.n();
        let mut chosen = vec![rng.gen_range(0..n)];
        let mut d2: Vec<f64> = points
            .rows()
            .map(|x| self.metric.eval(x, points.row(chosen[0])).powi(2))
            .collect();
        while chosen.len() < self.k {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let mut target = rng.gen::<f64>() * total;
                let mut pick = n - 1;
                for (i, &w) in d2.iter().enumerate() {
                    if w > 0.0 && target < w {
                        pick = i;
                        break;
                    }
                    target -= w;
                }
                pick
            } else {
                // all remaining mass is zero: take the first unchosen row
                (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
            };
            chosen.push(next);
            for (i, x) in points.rows().enumerate() {
                let d = self.metric.eval(x, points.row(next)).powi(2);
                if d < d2[i] {
                    d2[i] = d;
                }
            }
        }
        chosen.into_iter().map(|i| points.row(i).to_vec()).collect()
    }
}

fn means(points: &Points, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; points.dim()]; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in points.rows().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(x) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        let c = c as f64;
        s.iter_mut().for_each(|v| *v /= c);
    }
    sums
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElbowMethod {
    MaxSecondDifference,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowScan {
    pub ks: Vec<usize>,
    pub wcss_per_k: Vec<f64>,
    pub chosen_k: usize,
    pub method: ElbowMethod,
}

impl ElbowScan {
    pub fn wcss_at(&self, k: usize) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.wcss_per_k[i])
    }

    /// Replaces the automatic choice with `k`, which must be one of the
    /// scanned values.
    pub fn with_manual_k(mut self, k: usize) -> Result<Self> {
        if !self.ks.contains(&k) {
            return Err(Error::KTooLarge {
                k,
                n: *self.ks.last().unwrap_or(&0),
            });
        }
        self.chosen_k = k;
        self.method = ElbowMethod::Manual;
        Ok(self)
    }

    /// `k,wcss` lines.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "wcss"])?;
        for (k, v) in self.ks.iter().zip(&self.wcss_per_k) {
            w.write_record([k.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| crate::error::Error::io("elbow.csv", e))?;
        Ok(())
    }
}

pub fn elbow_scan(points: &Points, k_max: usize, metric: Metric, seed: u64) -> Result<ElbowScan> {
    elbow_scan_with(points, k_max, &KMeans::new(1).metric(metric).seed(seed))
}

/// Runs K-means for k = 1..=k_max (seed for each k derived from the
/// template's seed) and picks the k with the largest discrete second
/// difference `w[k-1] - 2 w[k] + w[k+1]`; ties go to the smaller k.
pub fn elbow_scan_with(points: &Points, k_max: usize, template: &KMeans) -> Result<ElbowScan> {
    let n = points.n();
    if k_max < 2 || k_max > n {
        return Err(Error::InvalidKMax { k_max, n });
    }
    let ks: Vec<usize> = (1..=k_max).collect();
    let wcss_per_k = ks
        .iter()
        .map(|&k| {
            let km = KMeans {
                k,
                seed: derive_seed(template.seed, k as u64),
                ..*template
            };
            km.fit(points).map(|r| r.wcss)
        })
        .collect::<Result<Vec<f64>>>()?;

    let chosen_k = if k_max == 2 {
        2
    } else if wcss_per_k.iter().all(|&w| w <= f64::EPSILON) {
        log::warn!("WCSS curve is flat at zero; choosing k = 2");
        2
    } else {
        let mut best = (2, f64::NEG_INFINITY);
        for k in 2..k_max {
            let i = k - 1;
            let d2 = wcss_per_k[i - 1] - 2.0 * wcss_per_k[i] + wcss_per_k[i + 1];
            if d2 > best.1 {
                best = (k, d2);
            }
        }
        best.0
    };
    Ok(ElbowScan {
        ks,
        wcss_per_k,
        chosen_k,
        method: ElbowMethod::MaxSecondDifference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_points_two_clusters() {
        let pts = Points::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
        for seed in 0..20 {
            let r = KMeans::new(2).seed(seed).fit(&pts).unwrap();
            assert_eq!(r.labels[0], r.labels[1]);
            assert_eq!(r.labels[2], r.labels[3]);
            assert_ne!(r.labels[0], r.labels[2]);
            let mut c: Vec<f64> = r.centroids.iter().map(|c| c[0]).collect();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![0.5, 10.5]);
            assert!((r.wcss - 1.0).abs() < 1e-12);
            assert!(r.converged);
        }
    }

    #[test]
    fn k_equals_n_and_k_one() {
        let pts = Points::from_scalars(&[3.0, -1.0, 4.0, 1.5, 9.0]);
        let r = KMeans::new(5).fit(&pts).unwrap();
        assert_eq!(r.wcss, 0.0);
        assert_eq!(r.cluster_sizes(), vec![1; 5]);

        let r = KMeans::new(1).fit(&pts).unwrap();
        let mean = 16.5 / 5.0;
        let tss: f64 = [3.0, -1.0, 4.0, 1.5, 9.0]
            .iter()
            .map(|x: &f64| (x - mean) * (x - mean))
            .sum();
        assert!((r.centroids[0][0] - mean).abs() < 1e-12);
        assert!((r.wcss - tss).abs() < 1e-9);
    }

    #[test]
    fn k_out_of_range() {
        let pts = Points::from_scalars(&[0.0, 1.0]);
        assert!(matches!(KMeans::new(3).fit(&pts), Err(Error::KTooLarge { k: 3, n: 2 })));
        assert!(matches!(KMeans::new(0).fit(&pts), Err(Error::KTooLarge { .. })));
    }

    #[test]
    fn duplicate_rows_do_not_leave_empty_clusters() {
        let pts = Points::from_scalars(&[1.0, 1.0, 1.0, 1.0]);
        for seed in 0..5 {
            let r = KMeans::new(3).seed(seed).fit(&pts).unwrap();
            assert!(r.cluster_sizes().iter().all(|&s| s >= 1));
            assert_eq!(r.wcss, 0.0);
        }
    }

    #[test]
    fn plus_plus_init_runs() {
        let pts = Points::from_scalars(&[0.0, 0.2, 5.0, 5.1, 9.0, 9.3]);
        let r = KMeans::new(3).init(Init::PlusPlus).seed(3).fit(&pts).unwrap();
        assert!(r.cluster_sizes().iter().all(|&s| s == 2));
    }

    #[test]
    fn non_euclidean_assignment_is_capped() {
        let pts = Points::from_rows(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![5.0, 5.0], vec![6.0, 5.0]]).unwrap();
        let r = KMeans::new(2).metric(Metric::Canberra).max_iter(3).fit(&pts).unwrap();
        assert!(r.iterations <= 3);
        assert!(r.cluster_sizes().iter().all(|&s| s >= 1));
    }

    fn elbow_second_difference_oracle(w: &[f64]) -> usize {
        // w[0] is k = 1
        (2..w.len())
            .map(|k| (k, w[k - 2] - 2.0 * w[k - 1] + w[k]))
            .fold(
                (0, f64::NEG_INFINITY),
                |best, (k, d)| if d > best.1 { (k, d) } else { best },
            )
            .0
    }

    #[test]
    fn elbow_two_blobs() {
        let pts = Points::from_scalars(&[0.0, 0.1, 0.2, 0.3, 0.4, 10.0, 10.1, 10.2, 10.3, 10.4]);
        let scan = elbow_scan(&pts, 8, Metric::Euclidean, 11).unwrap();
        assert_eq!(scan.ks, (1..=8).collect::<Vec<_>>());
        assert_eq!(scan.chosen_k, elbow_second_difference_oracle(&scan.wcss_per_k));
        assert_eq!(scan.chosen_k, 2);
        assert_eq!(scan.method, ElbowMethod::MaxSecondDifference);

        let full = elbow_scan(&pts, 10, Metric::Euclidean, 11).unwrap();
        assert_eq!(full.wcss_at(10), Some(0.0));

        let manual = full.with_manual_k(4).unwrap();
        assert_eq!((manual.chosen_k, manual.method), (4, ElbowMethod::Manual));
    }

    #[test]
    fn elbow_flat_curve() {
        let pts = Points::from_scalars(&[2.0; 6]);
        let scan = elbow_scan(&pts, 5, Metric::Euclidean, 0).unwrap();
        assert!(scan.wcss_per_k.iter().all(|&w| w == 0.0));
        assert_eq!(scan.chosen_k, 2);
    }

    #[test]
    fn elbow_bounds() {
        let pts = Points::from_scalars(&[0.0, 1.0, 2.0]);
        assert!(matches!(
            elbow_scan(&pts, 1, Metric::Euclidean, 0),
            Err(Error::InvalidKMax { .. })
        ));
        assert!(matches!(
            elbow_scan(&pts, 4, Metric::Euclidean, 0),
            Err(Error::InvalidKMax { .. })
        ));
        assert_eq!(elbow_scan(&pts, 2, Metric::Euclidean, 0).unwrap().chosen_k, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn wcss_matches_recomputation(
            rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 2..30),
            k_frac in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            let n = rows.len();
            let k = 1 + ((n - 1) as f64 * k_frac) as usize;
            let pts = Points::from_rows(rows).unwrap();
            let r = KMeans::new(k).seed(seed).fit(&pts).unwrap();
            prop_assert!(r.cluster_sizes().iter().all(|&s| s >= 1));
            prop_assert!(r.labels.iter().all(|&l| l < k));
            let direct = wcss(&pts, &r.labels, &r.centroids);
            prop_assert!((direct - r.wcss).abs() <= 1e-9);
            let again = KMeans::new(k).seed(seed).fit(&pts).unwrap();
            prop_assert_eq!(r, again);
        }
    }
}
