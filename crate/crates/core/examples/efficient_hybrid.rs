// K-means to a middle level, then AGNES over the middle centroids.

use std::error::Error;

use cta_cluster::cluster::{efficient_agglomerative, KMeans, Linkage, Points};

fn main() -> Result<(), Box<dyn Error>> {
    let xs: Vec<f64> = (0..30)
        .map(|i| (i / 10) as f64 * 20.0 + (i % 10) as f64 * 0.3)
        .collect();
    let points = Points::from_scalars(&xs);

    let hybrid = efficient_agglomerative(&points, 6, Linkage::Ward, &KMeans::new(6).seed(1))?;
    println!("middle sizes: {:?}", hybrid.middle.cluster_sizes());
    println!("merge heights: {:?}", hybrid.dendrogram.heights());

    let groups = hybrid.cut(3)?;
    println!("3 groups, sizes {:?}", groups.sizes());
    Ok(())
}
