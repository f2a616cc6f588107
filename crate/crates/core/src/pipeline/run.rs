use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::profile::{render_groups_markdown, stage_profiles};
use super::{
    cluster_documents, elbow_for, export_groups, ArtifactWriter, GroupProfile, KSource, OutputFormat, Prepared,
    RunConfig,
};
use crate::cluster::{ElbowScan, FlatClustering};
use crate::error::Result;
use crate::evaluate::validity_scores;
use crate::preprocess::StopWords;

/// Inputs to a run besides the clustering configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub manifest: Option<PathBuf>,
    pub stopwords: StopWords,
    pub format: OutputFormat,
    /// Record wall-clock time in `scores`; off by default so outputs are
    /// byte-identical between runs.
    pub timings: bool,
}

/// The single row of `scores.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub algorithm: String,
    pub similarity: String,
    pub metric: String,
    pub minkowski_p: f64,
    pub linkage: String,
    pub k: usize,
    pub k_source: KSource,
    pub k_mid: Option<usize>,
    pub n_clusters: usize,
    pub silhouette: f64,
    pub davies_bouldin: f64,
    pub scoring_space: String,
    pub seed: u64,
    pub runtime_ms: Option<u128>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub scores: ScoreRecord,
    pub clustering: FlatClustering,
    pub elbow: Option<ElbowScan>,
    pub profiles: Vec<GroupProfile>,
    /// Final paths of every artifact written.
    pub artifacts: Vec<PathBuf>,
}

#[derive(Serialize)]
struct AssignmentRow<'a> {
    doc_id: &'a str,
    cluster: usize,
}

#[derive(Serialize)]
struct MiddleRow<'a> {
    doc_id: &'a str,
    middle_cluster: usize,
}

#[derive(Serialize)]
struct ElbowRow {
    k: usize,
    wcss: f64,
}

/// Runs the whole pipeline on one corpus and writes its artifacts into
/// `out_dir`. Nothing is written unless every stage succeeds.
pub fn run_pipeline(corpus_dir: &Path, cfg: &RunConfig, opts: &RunOptions, out_dir: &Path) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let prep = Prepared::load(
        corpus_dir,
        opts.manifest.as_deref(),
        &opts.stopwords,
        cfg.vocabulary_options(),
    )?;
    let dist = prep.distances(cfg.similarity)?;
    let points = prep.features(&dist, cfg.feature_space)?;

    let (k, k_source, elbow) = match cfg.k {
        Some(k) => (k, KSource::Manual, None),
        None => {
            let scan = elbow_for(&points, cfg)?;
            log::info!("elbow scan chose k = {}", scan.chosen_k);
            (scan.chosen_k, KSource::Elbow, Some(scan))
        }
    };
    let clustered = cluster_documents(&points, cfg, k)?;
    let scores = validity_scores(&dist, &clustered.clustering)?;
    let profiles = export_groups(&clustered.clustering, &prep.corpus, &prep.tfidf, &prep.vocab)?;
    let elapsed = start.elapsed().as_millis();

    let record = ScoreRecord {
        algorithm: cfg.algorithm.name().into(),
        similarity: cfg.similarity.name().into(),
        metric: cfg.metric.name().into(),
        minkowski_p: cfg.minkowski_p,
        linkage: cfg.linkage.map(|l| l.name().to_string()).unwrap_or_default(),
        k,
        k_source,
        k_mid: clustered.k_mid,
        n_clusters: clustered.clustering.n_clusters(),
        silhouette: scores.silhouette,
        davies_bouldin: scores.davies_bouldin,
        scoring_space: format!("{}_distance", cfg.similarity.name()),
        seed: cfg.seed,
        runtime_ms: opts.timings.then_some(elapsed),
    };

    let ids = prep.corpus.doc_ids();
    let format = opts.format;
    let mut w = ArtifactWriter::new(out_dir)?;
    let assignments: Vec<AssignmentRow> = ids
        .iter()
        .zip(clustered.clustering.labels())
        .map(|(d, &cluster)| AssignmentRow { doc_id: d, cluster })
        .collect();
    w.table("assignments", &assignments, format)?;
    w.table("scores", std::slice::from_ref(&record), format)?;
    if let Some(scan) = &elbow {
        let rows: Vec<ElbowRow> = scan
            .ks
            .iter()
            .zip(&scan.wcss_per_k)
            .map(|(&k, &wcss)| ElbowRow { k, wcss })
            .collect();
        w.table("elbow", &rows, format)?;
    }
    if let Some(d) = &clustered.dendrogram {
        let mut json = d.to_json()?;
        json.push('\n');
        w.bytes("dendrogram.json", json.as_bytes())?;
    }
    if let (Some(km), Some(_)) = (&clustered.kmeans, clustered.k_mid) {
        let rows: Vec<MiddleRow> = ids
            .iter()
            .zip(&km.labels)
            .map(|(d, &middle_cluster)| MiddleRow {
                doc_id: d,
                middle_cluster,
            })
            .collect();
        w.table("middle_clusters", &rows, format)?;
    }
    stage_profiles(&mut w, &profiles, &prep.corpus, format)?;
    w.bytes("groups.md", render_groups_markdown(&profiles).as_bytes())?;
    let artifacts = w.commit()?;

    Ok(RunReport {
        config: cfg.clone(),
        scores: record,
        clustering: clustered.clustering,
        elbow,
        profiles,
        artifacts,
    })
}
