//! End-to-end orchestration: single runs, the full experiment grid and
//! group-profile export.

mod artifacts;
mod grid;
mod profile;
mod run;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::{
    agnes_points, cut_dendrogram, derive_seed, efficient_agglomerative, elbow_scan_with, Dendrogram, ElbowScan,
    FlatClustering, Init, KMeans, KMeansResult, Linkage, Points, DEFAULT_MAX_ITER,
};
use crate::corpus::{load_corpus, Corpus};
use crate::error::{Error, Result};
use crate::preprocess::{preprocess_corpus, ProcessedDoc, StopWords};
use crate::similarity::{distance_matrix, DistanceMatrix, Metric, MetricKind, SimilarityKind};
use crate::vectorize::{build_vocabulary_with, tfidf, TfIdfMatrix, Vocabulary, VocabularyOptions, DEFAULT_MAX_DF};

pub use artifacts::{ArtifactWriter, OutputFormat};
pub use grid::{
    grid_rows, render_markdown, run_grid, write_grid_csv, CellValue, GridOptions, GridReport, GridRow, GRID_CELLS,
};
pub use profile::{export_groups, read_assignments, render_groups_markdown, run_report, GroupProfile, TOP_TERMS};
pub use run::{run_pipeline, RunOptions, RunReport, ScoreRecord};

/// Default upper end of the elbow scan: k = 1..=20.
pub const DEFAULT_K_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Kmeans,
    Agnes,
    Efficient,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Kmeans, Algorithm::Agnes, Algorithm::Efficient];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Kmeans => "kmeans",
            Algorithm::Agnes => "agnes",
            Algorithm::Efficient => "efficient",
        }
    }

    pub fn is_hierarchical(self) -> bool {
        self != Algorithm::Kmeans
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Vectors handed to K-means and AGNES.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSpace {
    /// Each document's row of the document distance matrix.
    #[default]
    DistanceRows,
    /// Raw TF-IDF vectors.
    Tfidf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub similarity: SimilarityKind,
    pub metric: MetricKind,
    pub minkowski_p: f64,
    pub linkage: Option<Linkage>,
    pub algorithm: Algorithm,
    /// Final cluster count; chosen by the elbow scan when unset.
    pub k: Option<usize>,
    /// Middle-level cluster count for the hybrid; defaults to `min(n, 2k)`.
    pub k_mid: Option<usize>,
    pub k_max: usize,
    pub max_df: f64,
    pub min_df: usize,
    pub seed: u64,
    /// Number of groups cut from a hierarchy; defaults to `k`.
    pub cut_clusters: Option<usize>,
    pub feature_space: FeatureSpace,
    pub init: Init,
    pub max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            similarity: SimilarityKind::Cosine,
            metric: MetricKind::Euclidean,
            minkowski_p: 2.0,
            linkage: Some(Linkage::Single),
            algorithm: Algorithm::Efficient,
            k: None,
            k_mid: None,
            k_max: DEFAULT_K_MAX,
            max_df: DEFAULT_MAX_DF,
            min_df: 1,
            seed: 0,
            cut_clusters: None,
            feature_space: FeatureSpace::DistanceRows,
            init: Init::RandomRows,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.algorithm.is_hierarchical(), self.linkage) {
            (true, None) => {
                return Err(Error::Config(format!(
                    "--linkage is required for --algo {}",
                    self.algorithm
                )))
            }
            (false, Some(l)) => {
                return Err(Error::Config(format!(
                    "--linkage {l} given but --algo kmeans has no linkage"
                )))
            }
            _ => {}
        }
        if self.algorithm == Algorithm::Efficient && self.linkage == Some(Linkage::Centroid) {
            return Err(Error::CentroidLinkageNotApplicable);
        }
        if !(self.max_df > 0.0 && self.max_df <= 1.0) {
            return Err(Error::InvalidMaxDf(self.max_df));
        }
        self.metric()?;
        if self.k_max < 2 {
            return Err(Error::Config(format!("--k-max must be at least 2, got {}", self.k_max)));
        }
        if self.k == Some(0) || self.cut_clusters == Some(0) || self.k_mid == Some(0) {
            return Err(Error::Config("cluster counts must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("--max-iter must be positive".into()));
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<Metric> {
        self.metric.with_p(self.minkowski_p)
    }

    pub fn vocabulary_options(&self) -> VocabularyOptions {
        VocabularyOptions {
            max_df: self.max_df,
            min_df: self.min_df,
        }
    }

    /// K-means settings for `k`; the seed is derived from the master seed
    /// and `k` only, so every stage that runs K-means at the same k sees the
    /// same result.
    pub fn kmeans(&self, k: usize) -> Result<KMeans> {
        Ok(KMeans::new(k)
            .metric(self.metric()?)
            .seed(derive_seed(self.seed, k as u64))
            .max_iter(self.max_iter)
            .init(self.init))
    }
}

/// Corpus plus everything derived from it up to the TF-IDF matrix.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub corpus: Corpus,
    pub docs: Vec<ProcessedDoc>,
    pub vocab: Vocabulary,
    pub tfidf: TfIdfMatrix,
}

impl Prepared {
    pub fn load(dir: &Path, manifest: Option<&Path>, stopwords: &StopWords, opts: VocabularyOptions) -> Result<Self> {
        Self::from_corpus(load_corpus(dir, manifest)?, stopwords, opts)
    }

    pub fn from_corpus(corpus: Corpus, stopwords: &StopWords, opts: VocabularyOptions) -> Result<Self> {
        if corpus.len() < 2 {
            return Err(Error::TooFewDocuments(corpus.len()));
        }
        let docs = preprocess_corpus(&corpus, stopwords)?;
        let vocab = build_vocabulary_with(&docs, opts)?;
        let tfidf = tfidf(&docs, &vocab);
        Ok(Prepared {
            corpus,
            docs,
            vocab,
            tfidf,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.corpus.len()
    }

    pub fn distances(&self, kind: SimilarityKind) -> Result<DistanceMatrix> {
        distance_matrix(&self.tfidf, kind)
    }

    pub fn features(&self, dist: &DistanceMatrix, space: FeatureSpace) -> Result<Points> {
        match space {
            FeatureSpace::DistanceRows => Ok(Points::from_distance_rows(dist)),
            FeatureSpace::Tfidf => Points::from_rows(self.tfidf.to_dense()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KSource {
    Manual,
    Elbow,
}

/// Outcome of one clustering run before scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustered {
    pub clustering: FlatClustering,
    pub k: usize,
    pub k_mid: Option<usize>,
    pub dendrogram: Option<Dendrogram>,
    /// Final K-means model, or stage one of the hybrid.
    pub kmeans: Option<KMeansResult>,
}

pub fn elbow_for(points: &Points, cfg: &RunConfig) -> Result<ElbowScan> {
    let k_max = cfg.k_max.min(points.n());
    if k_max < cfg.k_max {
        log::info!("k_max lowered from {} to the document count {}", cfg.k_max, k_max);
    }
    let template = KMeans::new(1)
        .metric(cfg.metric()?)
        .seed(cfg.seed)
        .max_iter(cfg.max_iter)
        .init(cfg.init);
    elbow_scan_with(points, k_max, &template)
}

/// Clusters `points` into `k` groups with the configured algorithm.
pub fn cluster_documents(points: &Points, cfg: &RunConfig, k: usize) -> Result<Clustered> {
    let n = points.n();
    let cut = cfg.cut_clusters.unwrap_or(k);
    match cfg.algorithm {
        Algorithm::Kmeans => {
            let res = cfg.kmeans(k)?.fit(points)?;
            Ok(Clustered {
                clustering: res.clustering(),
                k,
                k_mid: None,
                dendrogram: None,
                kmeans: Some(res),
            })
        }
        Algorithm::Agnes => {
            let linkage = cfg.linkage.ok_or_else(|| Error::Config("missing linkage".into()))?;
            let dendrogram = agnes_points(points, cfg.metric()?, linkage, 1)?;
            Ok(Clustered {
                clustering: cut_dendrogram(&dendrogram, cut)?,
                k,
                k_mid: None,
                dendrogram: Some(dendrogram),
                kmeans: None,
            })
        }
        Algorithm::Efficient => {
            let linkage = cfg.linkage.ok_or_else(|| Error::Config("missing linkage".into()))?;
            let k_mid = cfg.k_mid.unwrap_or((2 * k).min(n));
            let hybrid = efficient_agglomerative(points, k_mid, linkage, &cfg.kmeans(k_mid)?)?;
            Ok(Clustered {
                clustering: hybrid.cut(cut)?,
                k,
                k_mid: Some(k_mid),
                dendrogram: Some(hybrid.dendrogram),
                kmeans: Some(hybrid.middle),
            })
        }
    }
}
