// AGNES with each linkage, then a flat cut of the tree.

use std::error::Error;

use cta_cluster::cluster::{agnes_points, cut_dendrogram, Linkage, Points};
use cta_cluster::similarity::Metric;

fn main() -> Result<(), Box<dyn Error>> {
    let points = Points::from_rows(vec![
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![4.0, 0.0],
        vec![4.0, 1.5],
        vec![9.0, 9.0],
    ])?;

    for linkage in Linkage::ALL {
        let tree = agnes_points(&points, Metric::Euclidean, linkage, 1)?;
        println!("{linkage:>8}: heights {:?}", tree.heights());
    }

    let tree = agnes_points(&points, Metric::Euclidean, Linkage::Average, 1)?;
    println!("{}", tree.to_json()?);
    println!("3 groups: {:?}", cut_dendrogram(&tree, 3)?.labels());
    Ok(())
}
