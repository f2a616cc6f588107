//! Cluster validity indices: mean silhouette coefficient and
//! Davies-Bouldin index.

use serde::{Deserialize, Serialize};

use crate::cluster::{FlatClustering, Points};
use crate::error::{Error, Result};
use crate::similarity::{DistanceMatrix, Metric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityScores {
    pub silhouette: f64,
    pub davies_bouldin: f64,
    pub n_clusters: usize,
    pub per_point_silhouette: Vec<f64>,
}

fn check_len(dist: &DistanceMatrix, labels: &FlatClustering) -> Result<()> {
    if labels.len() != dist.n() {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            points: dist.n(),
        });
    }
    Ok(())
}

/// Mean silhouette and the per-point values.
///
/// `s(i) = (b(i) - a(i)) / max(a(i), b(i))` where `a` is the mean distance to
/// the rest of i's cluster and `b` the smallest mean distance to another
/// cluster. Members of singleton clusters score 0.
pub fn silhouette(dist: &DistanceMatrix, labels: &FlatClustering) -> Result<(f64, Vec<f64>)> {
    check_len(dist, labels)?;
    let n = dist.n();
    let k = labels.n_clusters();
    if k < 2 || k >= n {
        return Err(Error::DegenerateClustering { n_clusters: k, n });
    }
    let sizes = labels.sizes();
    let lab = labels.labels();
    let mut sums = vec![0.0; k];
    let per_point: Vec<f64> = (0..n)
        .map(|i| {
            let own = lab[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            sums.iter_mut().for_each(|s| *s = 0.0);
            for (j, &l) in lab.iter().enumerate() {
                if j != i {
                    sums[l] += dist.get(i, j);
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect();
    let mean = per_point.iter().sum::<f64>() / n as f64;
    Ok((mean, per_point))
}

fn ratio(scatter_sum: f64, separation: f64) -> f64 {
    if separation == 0.0 {
        f64::INFINITY
    } else {
        scatter_sum / separation
    }
}

fn dbi_from(scatter: &[f64], separation: impl Fn(usize, usize) -> f64) -> f64 {
    let k = scatter.len();
    let mut coincident = false;
    let total: f64 = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| j != i)
                .map(|j| {
                    let m = separation(i, j);
                    coincident |= m == 0.0;
                    ratio(scatter[i] + scatter[j], m)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    if coincident {
        log::warn!("coincident cluster centres; Davies-Bouldin index is infinite");
    }
    total / k as f64
}

/// Davies-Bouldin index in feature space: centroids are member means,
/// scatter is the mean `metric` distance of members to their centroid and
/// separation the `metric` distance between centroids. Coincident
/// centroids make the index `+inf`.
pub fn davies_bouldin(points: &Points, metric: Metric, labels: &FlatClustering) -> Result<f64> {
    if labels.len() != points.n() {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            points: points.n(),
        });
    }
    let k = labels.n_clusters();
    if k < 2 {
        return Err(Error::DegenerateClustering {
            n_clusters: k,
            n: points.n(),
        });
    }
    let members = labels.members();
    let centroids: Vec<Vec<f64>> = members
        .iter()
        .map(|m| {
            let mut c = vec![0.0; points.dim()];
            for &i in m {
                for (acc, v) in c.iter_mut().zip(points.row(i)) {
                    *acc += v;
                }
            }
            c.iter_mut().for_each(|v| *v /= m.len() as f64);
            c
        })
        .collect();
    let scatter: Vec<f64> = members
        .iter()
        .zip(&centroids)
        .map(|(m, c)| m.iter().map(|&i| metric.eval(points.row(i), c)).sum::<f64>() / m.len() as f64)
        .collect();
    Ok(dbi_from(&scatter, |i, j| metric.eval(&centroids[i], &centroids[j])))
}

/// Member minimizing the summed distance to the rest of its cluster
/// (lowest index on ties).
pub fn medoids(dist: &DistanceMatrix, labels: &FlatClustering) -> Vec<usize> {
    labels
        .members()
        .iter()
        .map(|m| {
            let mut best = (m[0], f64::INFINITY);
            for &c in m {
                let total: f64 = m.iter().map(|&j| dist.get(c, j)).sum();
                if total < best.1 {
                    best = (c, total);
                }
            }
            best.0
        })
        .collect()
}

/// Davies-Bouldin index in distance-matrix space, with each cluster's
/// medoid standing in for its centroid.
pub fn davies_bouldin_medoid(dist: &DistanceMatrix, labels: &FlatClustering) -> Result<f64> {
    check_len(dist, labels)?;
    let k = labels.n_clusters();
    if k < 2 {
        return Err(Error::DegenerateClustering {
            n_clusters: k,
            n: dist.n(),
        });
    }
    let members = labels.members();
    let med = medoids(dist, labels);
    let scatter: Vec<f64> = members
        .iter()
        .zip(&med)
        .map(|(m, &c)| m.iter().map(|&i| dist.get(i, c)).sum::<f64>() / m.len() as f64)
        .collect();
    Ok(dbi_from(&scatter, |i, j| dist.get(med[i], med[j])))
}

/// Silhouette and medoid Davies-Bouldin against one document distance
/// matrix.
pub fn validity_scores(dist: &DistanceMatrix, labels: &FlatClustering) -> Result<ValidityScores> {
    let (silhouette, per_point_silhouette) = silhouette(dist, labels)?;
    Ok(ValidityScores {
        silhouette,
        davies_bouldin: davies_bouldin_medoid(dist, labels)?,
        n_clusters: labels.n_clusters(),
        per_point_silhouette,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Provenance;
    use crate::similarity::SimilarityKind;

    fn line_matrix(xs: &[f64]) -> DistanceMatrix {
        let rows = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
        let ids = (0..xs.len()).map(|i| i.to_string()).collect();
        DistanceMatrix::from_square(rows, SimilarityKind::Cosine, ids).unwrap()
    }

    fn flat(labels: &[usize]) -> FlatClustering {
        FlatClustering::new(labels, Provenance::AgnesCut)
    }

    #[test]
    fn silhouette_two_tight_pairs() {
        let d = line_matrix(&[0.0, 0.1, 10.0, 10.1]);
        let (mean, per) = silhouette(&d, &flat(&[0, 0, 1, 1])).unwrap();
        // outer points: b = 10.05, inner points: b = 9.95; a = 0.1 for all
        let outer = (10.05 - 0.1) / 10.05;
        let inner = (9.95 - 0.1) / 9.95;
        let expected = [outer, inner, inner, outer];
        for (s, e) in per.iter().zip(expected) {
            assert!((s - e).abs() < 1e-12);
        }
        assert!((outer - 0.990050).abs() < 1e-6);
        assert!((mean - 0.98999975).abs() < 1e-8);
    }

    #[test]
    fn singleton_scores_zero() {
        let d = line_matrix(&[0.0, 0.1, 10.0]);
        let (_, per) = silhouette(&d, &flat(&[0, 0, 1])).unwrap();
        assert_eq!(per[2], 0.0);
    }

    #[test]
    fn degenerate_silhouette() {
        let d = line_matrix(&[0.0, 1.0, 2.0]);
        assert!(matches!(
            silhouette(&d, &flat(&[0, 0, 0])),
            Err(Error::DegenerateClustering { .. })
        ));
        assert!(matches!(
            silhouette(&d, &flat(&[0, 1, 2])),
            Err(Error::DegenerateClustering { .. })
        ));
        assert!(matches!(
            silhouette(&d, &flat(&[0, 1])),
            Err(Error::LabelMismatch { .. })
        ));
    }

    #[test]
    fn dbi_examples() {
        let pts = Points::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
        let dbi = davies_bouldin(&pts, Metric::Euclidean, &flat(&[0, 0, 1, 1])).unwrap();
        assert!((dbi - 0.1).abs() < 1e-12);
        let d = line_matrix(&[0.0, 1.0, 10.0, 11.0]);
        let dbi = davies_bouldin_medoid(&d, &flat(&[0, 0, 1, 1])).unwrap();
        assert!((dbi - 0.1).abs() < 1e-12);

        let two = Points::from_scalars(&[3.0, 8.0]);
        assert_eq!(davies_bouldin(&two, Metric::Manhattan, &flat(&[0, 1])).unwrap(), 0.0);
        assert_eq!(
            davies_bouldin_medoid(&line_matrix(&[3.0, 8.0]), &flat(&[0, 1])).unwrap(),
            0.0
        );
    }

    #[test]
    fn dbi_coincident_centres_is_infinite() {
        let pts = Points::from_scalars(&[-1.0, 1.0, 0.0]);
        let dbi = davies_bouldin(&pts, Metric::Euclidean, &flat(&[0, 0, 1])).unwrap();
        assert!(dbi.is_infinite());
        assert!(matches!(
            davies_bouldin(&pts, Metric::Euclidean, &flat(&[0, 0, 0])),
            Err(Error::DegenerateClustering { .. })
        ));
    }

    #[test]
    fn separating_a_cluster_helps_both_indices() {
        let labels = flat(&[0, 0, 0, 1, 1, 1]);
        let mut prev: Option<(f64, f64)> = None;
        for shift in [5.0, 10.0, 20.0, 40.0] {
            let xs = [0.0, 0.5, 1.2, shift, shift + 0.4, shift + 1.1];
            let d = line_matrix(&xs);
            let s = silhouette(&d, &labels).unwrap().0;
            let b = davies_bouldin(&Points::from_scalars(&xs), Metric::Euclidean, &labels).unwrap();
            if let Some((ps, pb)) = prev {
                assert!(s >= ps);
                assert!(b <= pb);
            }
            prev = Some((s, b));
        }
    }

    #[test]
    fn relabeling_is_bit_identical() {
        let d = line_matrix(&[0.0, 0.3, 4.0, 4.2, 9.0, 9.9, 1.0]);
        let a = validity_scores(&d, &flat(&[0, 0, 1, 1, 2, 2, 0])).unwrap();
        let b = validity_scores(&d, &flat(&[5, 5, 2, 2, 9, 9, 5])).unwrap();
        assert_eq!(a.silhouette.to_bits(), b.silhouette.to_bits());
        assert_eq!(a.davies_bouldin.to_bits(), b.davies_bouldin.to_bits());
    }
}
