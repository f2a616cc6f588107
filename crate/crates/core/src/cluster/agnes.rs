//! Agglomerative nesting over a dissimilarity matrix.
//!
//! Each step scans the active clusters for the globally smallest pairwise
//! distance (first-found wins, so ties resolve to the lowest
//! `(row, col)` slot pair), merges the pair into the lower slot and
//! updates the row with the Lance-Williams recurrence. Ward and centroid
//! linkage run the recurrence on squared distances and report the square
//! root as merge height.
//!
//! Node ids follow the usual scheme: leaves `0..n`, and the merge at
//! step `m` creates node `n + m`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FlatClustering, Points, Provenance};
use crate::error::{Error, Result};
use crate::similarity::{DistanceMatrix, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Ward,
    Single,
    Complete,
    Average,
    Centroid,
}

impl Linkage {
    pub const ALL: [Linkage; 5] = [
        Linkage::Ward,
        Linkage::Single,
        Linkage::Complete,
        Linkage::Average,
        Linkage::Centroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Ward => "ward",
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Centroid => "centroid",
        }
    }

    /// Merge heights are guaranteed non-decreasing (centroid linkage can
    /// produce inversions).
    pub fn is_monotone(self) -> bool {
        self != Linkage::Centroid
    }

    fn squared(self) -> bool {
        matches!(self, Linkage::Ward | Linkage::Centroid)
    }

    /// New distance from cluster `k` to `i ∪ j` given `d(k,i)`, `d(k,j)`,
    /// `d(i,j)` and the cluster sizes. Squared inputs for ward/centroid.
    fn update(self, dki: f64, dkj: f64, dij: f64, ni: f64, nj: f64, nk: f64) -> f64 {
        match self {
            // (1/2, 1/2, 0, ∓1/2) reduce to min / max; evaluated directly so
            // heights are exact input distances.
            Linkage::Single => dki.min(dkj),
            Linkage::Complete => dki.max(dkj),
            Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
            Linkage::Ward => ((nk + ni) * dki + (nk + nj) * dkj - nk * dij) / (ni + nj + nk),
            Linkage::Centroid => {
                let nij = ni + nj;
                (ni * dki + nj * dkj) / nij - ni * nj * dij / (nij * nij)
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopCriterion {
    /// Merge until this many clusters remain (1 builds the full tree).
    Clusters(usize),
    /// Merge while the smallest inter-cluster distance is at most this.
    Distance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.merges.len() + 1 == self.n_leaves
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// AGNES over document distances.
pub fn agnes(dist: &DistanceMatrix, linkage: Linkage, stop: usize) -> Result<Dendrogram> {
    let rows: Vec<Vec<f64>> = dist.rows().map(<[f64]>::to_vec).collect();
    let n = rows.len();
    agnes_weighted(rows, &vec![1; n], linkage, StopCriterion::Clusters(stop))
}

/// AGNES over feature rows, with pairwise distances under `metric`.
pub fn agnes_points(points: &Points, metric: Metric, linkage: Linkage, stop: usize) -> Result<Dendrogram> {
    let n = points.n();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| metric.eval(points.row(i), points.row(j))).collect())
        .collect();
    agnes_weighted(rows, &vec![1; n], linkage, StopCriterion::Clusters(stop))
}

/// AGNES over a square dissimilarity matrix whose items start with the
/// given cardinalities. Only the upper triangle is read.
pub fn agnes_weighted(
    distances: Vec<Vec<f64>>,
    sizes: &[usize],
    linkage: Linkage,
    stop: StopCriterion,
) -> Result<Dendrogram> {
    let n = distances.len();
    if let Some(r) = distances.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(r.len(), n));
    }
    if sizes.len() != n {
        return Err(Error::DimensionMismatch(sizes.len(), n));
    }
    if n < 2 {
        return Err(Error::TooFewDocuments(n));
    }
    let target = match stop {
        StopCriterion::Clusters(s) if (1..=n).contains(&s) => s,
        StopCriterion::Clusters(s) => return Err(Error::InvalidStop { stop: s, n }),
        StopCriterion::Distance(_) => 1,
    };

    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = distances[i][j];
            let v = if linkage.squared() { v * v } else { v };
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    let mut size: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let mut count: Vec<usize> = sizes.to_vec();
    let mut node: Vec<usize> = (0..n).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    while active.len() > target {
        let (mut row, mut col, mut least) = (usize::MAX, usize::MAX, f64::INFINITY);
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[a + 1..] {
                let v = d[i * n + j];
                if v < least || row == usize::MAX {
                    least = v;
                    row = i;
                    col = j;
                }
            }
        }
        let height = if linkage.squared() {
            least.max(0.0).sqrt()
        } else {
            least
        };
        if let StopCriterion::Distance(limit) = stop {
            if height > limit {
                break;
            }
        }

        let (ni, nj) = (size[row], size[col]);
        for &k in &active {
            if k == row || k == col {
                continue;
            }
            let v = linkage.update(d[k * n + row], d[k * n + col], least, ni, nj, size[k]);
            let v = if linkage.squared() { v.max(0.0) } else { v };
            d[k * n + row] = v;
            d[row * n + k] = v;
        }
        let (a, b) = (node[row], node[col]);
        let merged_count = count[row] + count[col];
        merges.push(Merge {
            left: a.min(b),
            right: a.max(b),
            height,
            size: merged_count,
        });
        size[row] = ni + nj;
        count[row] = merged_count;
        node[row] = n + merges.len() - 1;
        active.retain(|&s| s != col);
    }

    Ok(Dendrogram { n_leaves: n, merges })
}

/// Flat partition left after undoing the last `n_clusters - 1` merges of a
/// full tree (or, for a partial tree, keeping the first
/// `n_leaves - n_clusters` merges).
pub fn cut_dendrogram(d: &Dendrogram, n_clusters: usize) -> Result<FlatClustering> {
    cut_with_provenance(d, n_clusters, Provenance::AgnesCut)
}

pub(crate) fn cut_with_provenance(d: &Dendrogram, n_clusters: usize, provenance: Provenance) -> Result<FlatClustering> {
    let n = d.n_leaves;
    if n_clusters == 0 || n_clusters > n || n - n_clusters > d.merges.len() {
        return Err(Error::InvalidCut {
            requested: n_clusters,
            n_leaves: n,
            merges: d.merges.len(),
        });
    }
    // union-find over node ids
    let mut parent: Vec<usize> = (0..n + d.merges.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (m, merge) in d.merges.iter().take(n - n_clusters).enumerate() {
        let id = n + m;
        let l = find(&mut parent, merge.left);
        let r = find(&mut parent, merge.right);
        parent[l] = id;
        parent[r] = id;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(FlatClustering::new(&roots, provenance))
}
