// End-to-end run on the sample corpus and the resulting group profiles.

use std::error::Error;
use std::path::Path;

use cta_cluster::cluster::Linkage;
use cta_cluster::pipeline::{run_pipeline, Algorithm, RunConfig, RunOptions};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_corpus"));
    let out = std::env::temp_dir().join("cta-cluster-actor-profiles");
    let cfg = RunConfig {
        algorithm: Algorithm::Efficient,
        linkage: Some(Linkage::Single),
        cut_clusters: Some(3),
        seed: 42,
        ..Default::default()
    };
    let report = run_pipeline(dir, &cfg, &RunOptions::default(), &out)?;

    for p in &report.profiles {
        let terms: Vec<&str> = p.top_terms.iter().take(6).map(|(t, _)| t.as_str()).collect();
        println!(
            "group {}: {:?}\n  docs  {:?}\n  terms {:?}",
            p.group_id, p.actor_labels, p.doc_ids, terms
        );
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
