// Cosine and Jaccard document distances plus the four vector metrics.

use std::error::Error;
use std::path::Path;

use cta_cluster::pipeline::Prepared;
use cta_cluster::preprocess::StopWords;
use cta_cluster::similarity::{Metric, SimilarityKind};
use cta_cluster::vectorize::VocabularyOptions;

fn main() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_corpus"));
    let prep = Prepared::load(dir, None, &StopWords::english(), VocabularyOptions::default())?;

    for kind in SimilarityKind::ALL {
        let dist = prep.distances(kind)?;
        println!("{kind} distance, first row:");
        for (id, d) in dist.doc_ids().iter().zip(dist.row(0)) {
            println!("  {id:>10} {d:.4}");
        }
    }

    let (x, y) = ([0.0, 3.0, 1.0], [4.0, 0.0, 1.0]);
    for m in [
        Metric::Euclidean,
        Metric::Manhattan,
        Metric::Canberra,
        Metric::minkowski(3.0)?,
    ] {
        println!("{:?}: {:.4}", m, m.eval(&x, &y));
    }
    Ok(())
}
