//! Efficient agglomerative clustering: K-means builds `k_mid` middle-level
//! clusters, then AGNES merges those clusters. Stage-two distances start as
//! Euclidean distances between K-means centroids and are updated with the
//! cluster cardinalities as Lance-Williams weights.

use serde::{Deserialize, Serialize};

use super::agnes::{agnes_weighted, cut_with_provenance};
use super::{Dendrogram, FlatClustering, KMeans, KMeansResult, Linkage, Points, Provenance, StopCriterion};
use crate::error::{Error, Result};
use crate::similarity::Metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridResult {
    pub middle: KMeansResult,
    pub dendrogram: Dendrogram,
}

impl HybridResult {
    /// Cuts the stage-two tree into `n_clusters` groups and expands them
    /// back to the original items.
    pub fn cut(&self, n_clusters: usize) -> Result<FlatClustering> {
        let top = cut_with_provenance(&self.dendrogram, n_clusters, Provenance::HybridCut)?;
        let labels: Vec<usize> = self.middle.labels.iter().map(|&m| top.labels()[m]).collect();
        Ok(FlatClustering::new(&labels, Provenance::HybridCut))
    }
}

/// `kmeans` supplies metric, seed, iteration cap and init; its `k` is
/// replaced by `k_mid`.
pub fn efficient_agglomerative(
    points: &Points,
    k_mid: usize,
    linkage: Linkage,
    kmeans: &KMeans,
) -> Result<HybridResult> {
    if linkage == Linkage::Centroid {
        return Err(Error::CentroidLinkageNotApplicable);
    }
    let n = points.n();
    if k_mid < 2 || k_mid > n {
        return Err(Error::KTooLarge { k: k_mid, n });
    }
    let middle = KMeans { k: k_mid, ..*kmeans }.fit(points)?;
    let centroids = &middle.centroids;
    let distances = centroids
        .iter()
        .map(|a| centroids.iter().map(|b| Metric::Euclidean.eval(a, b)).collect())
        .collect();
    let dendrogram = agnes_weighted(distances, &middle.cluster_sizes(), linkage, StopCriterion::Clusters(1))?;
    Ok(HybridResult { middle, dendrogram })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_middle_clusters_single_merge() {
        let pts = Points::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
        let h = efficient_agglomerative(&pts, 2, Linkage::Single, &KMeans::new(2)).unwrap();
        assert_eq!(h.dendrogram.n_leaves, 2);
        assert_eq!(h.dendrogram.merges.len(), 1);
        assert_eq!(h.dendrogram.merges[0].size, 4);
        assert_eq!(h.dendrogram.merges[0].height, 10.0);
        assert_eq!(h.cut(2).unwrap().labels(), &[0, 0, 1, 1]);
        assert_eq!(h.cut(1).unwrap().labels(), &[0, 0, 0, 0]);
        assert_eq!(h.cut(2).unwrap().provenance(), Provenance::HybridCut);
    }

    #[test]
    fn centroid_linkage_rejected() {
        let pts = Points::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
        assert!(matches!(
            efficient_agglomerative(&pts, 2, Linkage::Centroid, &KMeans::new(2)),
            Err(Error::CentroidLinkageNotApplicable)
        ));
    }

    #[test]
    fn k_mid_bounds() {
        let pts = Points::from_scalars(&[0.0, 1.0, 10.0]);
        assert!(efficient_agglomerative(&pts, 1, Linkage::Ward, &KMeans::new(1)).is_err());
        assert!(efficient_agglomerative(&pts, 4, Linkage::Ward, &KMeans::new(1)).is_err());
    }

    #[test]
    fn weighted_average_uses_cardinalities() {
        // middle clusters {0,1}, {10}, {20,21,22} -> sizes 2, 1, 3
        let pts = Points::from_scalars(&[0.0, 1.0, 10.0, 20.0, 21.0, 22.0]);
        let h = efficient_agglomerative(&pts, 3, Linkage::Average, &KMeans::new(3).seed(4)).unwrap();
        let mut sizes = h.middle.cluster_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        // first merge joins 0.5 and 10 (distance 9.5), the joint cluster then
        // sits at (2 * |21 - 0.5| + 1 * |21 - 10|) / 3 from the third.
        assert_eq!(h.dendrogram.merges[0].height, 9.5);
        let expected = (2.0 * 20.5 + 11.0) / 3.0;
        assert!((h.dendrogram.merges[1].height - expected).abs() < 1e-12);
        assert_eq!(h.dendrogram.merges[1].size, 6);
    }
}
