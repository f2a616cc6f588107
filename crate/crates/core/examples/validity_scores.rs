// Silhouette and Davies-Bouldin scores for a flat clustering.

use std::error::Error;

use cta_cluster::cluster::{FlatClustering, Points, Provenance};
use cta_cluster::evaluate::{davies_bouldin, validity_scores};
use cta_cluster::similarity::{DistanceMatrix, Metric, SimilarityKind};

fn main() -> Result<(), Box<dyn Error>> {
    let xs: [f64; 4] = [0.0, 1.0, 10.0, 11.0];
    let labels = FlatClustering::new(&[0, 0, 1, 1], Provenance::Kmeans);

    let rows = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    let ids = (0..xs.len()).map(|i| format!("p{i}")).collect();
    let dist = DistanceMatrix::from_square(rows, SimilarityKind::Cosine, ids)?;

    let scores = validity_scores(&dist, &labels)?;
    println!("silhouette {:.6}", scores.silhouette);
    println!("per point  {:?}", scores.per_point_silhouette);
    println!("DBI (medoids) {:.6}", scores.davies_bouldin);
    println!(
        "DBI (centroids) {:.6}",
        davies_bouldin(&Points::from_scalars(&xs), Metric::Euclidean, &labels)?
    );
    Ok(())
}
