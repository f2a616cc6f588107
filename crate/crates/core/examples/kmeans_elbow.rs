// Scan k = 1..=k_max with K-means and pick the elbow.

use std::error::Error;

use cta_cluster::cluster::{elbow_scan_with, Init, KMeans, Points};

fn main() -> Result<(), Box<dyn Error>> {
    // three tight groups at the corners of a triangle
    let mut rows = Vec::new();
    for (cx, cy) in [(0.0, 0.0), (10.0, 0.0), (5.0, 8.66)] {
        for (dx, dy) in [(0.0, 0.0), (0.3, 0.1), (-0.2, 0.3)] {
            rows.push(vec![cx + dx, cy + dy]);
        }
    }
    let points = Points::from_rows(rows)?;

    // k-means++ seeding avoids the two-centres-in-one-group local optimum
    let template = KMeans::new(1).seed(7).init(Init::PlusPlus);
    let scan = elbow_scan_with(&points, 6, &template)?;
    scan.write_csv(std::io::stdout())?;
    println!("chosen k = {}", scan.chosen_k);

    let fit = KMeans {
        k: scan.chosen_k,
        ..template
    }
    .fit(&points)?;
    println!(
        "labels {:?}, wcss {:.4}, {} iterations",
        fit.labels, fit.wcss, fit.iterations
    );
    Ok(())
}
