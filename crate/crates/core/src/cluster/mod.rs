//! The clustering engines: Lloyd K-means with an elbow scan,
//! agglomerative nesting (AGNES) with Lance-Williams updates, and the
//! efficient hybrid that runs AGNES over K-means middle-level clusters.

mod agnes;
mod hybrid;
mod kmeans;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::DistanceMatrix;

pub use agnes::{agnes, agnes_points, agnes_weighted, cut_dendrogram, Dendrogram, Linkage, Merge, StopCriterion};
pub use hybrid::{efficient_agglomerative, HybridResult};
pub use kmeans::{elbow_scan, elbow_scan_with, ElbowMethod, ElbowScan, Init, KMeans, KMeansResult, DEFAULT_MAX_ITER};

/// Dense row-major feature vectors, one row per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Points {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch(r.len(), dim));
            }
            data.extend(r);
        }
        Ok(Points { n, dim, data })
    }

    /// One-dimensional points.
    pub fn from_scalars(values: &[f64]) -> Self {
        Points {
            n: values.len(),
            dim: 1,
            data: values.to_vec(),
        }
    }

    /// Each document represented by its row of the distance matrix.
    pub fn from_distance_rows(dist: &DistanceMatrix) -> Self {
        let n = dist.n();
        Points {
            n,
            dim: n,
            data: dist.rows().flatten().copied().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n).map(move |i| self.row(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Kmeans,
    AgnesCut,
    HybridCut,
}

/// A partition of items into clusters `0..n_clusters`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatClustering {
    labels: Vec<usize>,
    n_clusters: usize,
    provenance: Provenance,
}

impl FlatClustering {
    /// Relabels `labels` densely in order of first appearance.
    pub fn new(labels: &[usize], provenance: Provenance) -> Self {
        let mut map = std::collections::HashMap::new();
        let dense: Vec<usize> = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        FlatClustering {
            n_clusters: map.len(),
            labels: dense,
            provenance,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.n_clusters];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }

    /// Member indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.n_clusters];
        for (i, &l) in self.labels.iter().enumerate() {
            m[l].push(i);
        }
        m
    }
}

/// splitmix64 finalizer over `(master, stream)`; gives stable, well-mixed
/// child seeds.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
