use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{cluster_documents, elbow_for, Algorithm, ArtifactWriter, FeatureSpace, OutputFormat, Prepared, RunConfig};
use crate::cluster::{Init, Linkage, Points, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::evaluate::validity_scores;
use crate::preprocess::StopWords;
use crate::similarity::{DistanceMatrix, MetricKind, SimilarityKind};
use crate::vectorize::{VocabularyOptions, DEFAULT_MAX_DF};

/// kmeans: 2 similarities x 4 metrics; agnes and efficient: 2 x 4 x 5.
pub const GRID_CELLS: usize = 88;

#[derive(Debug, Clone)]
pub struct GridOptions {
    pub seed: u64,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
    /// Fixed k for every cell; otherwise an elbow scan per similarity and
    /// metric.
    pub k: Option<usize>,
    pub k_max: usize,
    pub max_df: f64,
    pub min_df: usize,
    pub minkowski_p: f64,
    pub cut: Option<usize>,
    pub feature_space: FeatureSpace,
    pub init: Init,
    pub max_iter: usize,
    pub stopwords: StopWords,
    pub manifest: Option<PathBuf>,
    pub timings: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            seed: 0,
            jobs: 0,
            k: None,
            k_max: super::DEFAULT_K_MAX,
            max_df: DEFAULT_MAX_DF,
            min_df: 1,
            minkowski_p: 2.0,
            cut: None,
            feature_space: FeatureSpace::DistanceRows,
            init: Init::RandomRows,
            max_iter: DEFAULT_MAX_ITER,
            stopwords: StopWords::english(),
            manifest: None,
            timings: false,
        }
    }
}

impl GridOptions {
    fn config(
        &self,
        similarity: SimilarityKind,
        metric: MetricKind,
        algorithm: Algorithm,
        linkage: Option<Linkage>,
    ) -> RunConfig {
        RunConfig {
            similarity,
            metric,
            minkowski_p: self.minkowski_p,
            linkage,
            algorithm,
            k: self.k,
            k_mid: None,
            k_max: self.k_max,
            max_df: self.max_df,
            min_df: self.min_df,
            seed: self.seed,
            cut_clusters: self.cut,
            feature_space: self.feature_space,
            init: self.init,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Value(f64),
    NotApplicable,
    Error(String),
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Value(v) => write!(f, "{v}"),
            CellValue::NotApplicable => f.write_str("N.A."),
            CellValue::Error(e) => write!(f, "error:{e}"),
        }
    }
}

impl Serialize for CellValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub similarity: SimilarityKind,
    pub metric: MetricKind,
    #[serde(serialize_with = "linkage_name")]
    pub linkage: Option<Linkage>,
    pub algorithm: Algorithm,
    pub silhouette: CellValue,
    pub davies_bouldin: CellValue,
    pub runtime_ms: Option<u128>,
}

fn linkage_name<S: Serializer>(l: &Option<Linkage>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(l.map_or("", Linkage::name))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub rows: Vec<GridRow>,
}

impl GridReport {
    pub fn row(
        &self,
        similarity: SimilarityKind,
        metric: MetricKind,
        algorithm: Algorithm,
        linkage: Option<Linkage>,
    ) -> Option<&GridRow> {
        self.rows.iter().find(|r| {
            r.similarity == similarity && r.metric == metric && r.algorithm == algorithm && r.linkage == linkage
        })
    }

    /// Writes `grid.csv` (or `grid.json`) and `grid.md`.
    pub fn write(&self, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        let mut w = ArtifactWriter::new(out_dir)?;
        w.table("grid", &self.rows, format)?;
        w.bytes("grid.md", render_markdown(self).as_bytes())?;
        w.commit()
    }
}

/// The 88 cell keys in output order: per similarity, kmeans over the
/// metrics, then agnes and efficient over linkage x metric.
pub fn grid_rows() -> Vec<(SimilarityKind, MetricKind, Algorithm, Option<Linkage>)> {
    let mut cells = Vec::with_capacity(GRID_CELLS);
    for sim in SimilarityKind::ALL {
        for metric in MetricKind::ALL {
            cells.push((sim, metric, Algorithm::Kmeans, None));
        }
        for algo in [Algorithm::Agnes, Algorithm::Efficient] {
            for linkage in Linkage::ALL {
                for metric in MetricKind::ALL {
                    cells.push((sim, metric, algo, Some(linkage)));
                }
            }
        }
    }
    cells
}

struct Space {
    dist: DistanceMatrix,
    points: Points,
}

fn score_cell(space: &Space, cfg: &RunConfig, k: usize) -> Result<(f64, f64)> {
    let clustered = cluster_documents(&space.points, cfg, k)?;
    let s = validity_scores(&space.dist, &clustered.clustering)?;
    Ok((s.silhouette, s.davies_bouldin))
}

/// Runs every cell of the grid. Cell failures are recorded in the row;
/// only corpus and thread-pool problems abort the grid.
pub fn run_grid(corpus_dir: &Path, opts: &GridOptions) -> Result<GridReport> {
    let vopts = VocabularyOptions {
        max_df: opts.max_df,
        min_df: opts.min_df,
    };
    let prep = Prepared::load(corpus_dir, opts.manifest.as_deref(), &opts.stopwords, vopts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| grid_on(&prep, opts))
}

fn grid_on(prep: &Prepared, opts: &GridOptions) -> Result<GridReport> {
    let spaces = SimilarityKind::ALL
        .par_iter()
        .map(|&sim| {
            let dist = prep.distances(sim)?;
            let points = prep.features(&dist, opts.feature_space)?;
            Ok(Space { dist, points })
        })
        .collect::<Result<Vec<_>>>()?;
    let space_of = |sim: SimilarityKind| &spaces[SimilarityKind::ALL.iter().position(|&s| s == sim).unwrap()];

    // One k per similarity x metric, shared by all algorithms in the block.
    let blocks: Vec<(SimilarityKind, MetricKind)> = SimilarityKind::ALL
        .iter()
        .flat_map(|&s| MetricKind::ALL.iter().map(move |&m| (s, m)))
        .collect();
    let ks: Vec<Result<usize, String>> = blocks
        .par_iter()
        .map(|&(sim, metric)| match opts.k {
            Some(k) => Ok(k),
            None => {
                let cfg = opts.config(sim, metric, Algorithm::Kmeans, None);
                elbow_for(&space_of(sim).points, &cfg)
                    .map(|e| e.chosen_k)
                    .map_err(|e| e.to_string())
            }
        })
        .collect();
    let k_of = |sim, metric| &ks[blocks.iter().position(|&b| b == (sim, metric)).unwrap()];

    let rows = grid_rows()
        .into_par_iter()
        .map(|(sim, metric, algo, linkage)| {
            let start = Instant::now();
            let (silhouette, davies_bouldin) = if algo == Algorithm::Efficient && linkage == Some(Linkage::Centroid) {
                (CellValue::NotApplicable, CellValue::NotApplicable)
            } else {
                let cfg = opts.config(sim, metric, algo, linkage);
                let outcome = k_of(sim, metric)
                    .clone()
                    .and_then(|k| score_cell(space_of(sim), &cfg, k).map_err(|e| e.to_string()));
                match outcome {
                    Ok((s, d)) => (CellValue::Value(s), CellValue::Value(d)),
                    Err(e) => {
                        log::warn!("grid cell {sim}/{metric}/{algo}/{linkage:?} failed: {e}");
                        (CellValue::Error(e.clone()), CellValue::Error(e))
                    }
                }
            };
            GridRow {
                similarity: sim,
                metric,
                linkage,
                algorithm: algo,
                silhouette,
                davies_bouldin,
                runtime_ms: opts.timings.then(|| start.elapsed().as_millis()),
            }
        })
        .collect();
    Ok(GridReport { rows })
}

pub fn write_grid_csv<W: std::io::Write>(report: &GridReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("grid.csv", e))
}

fn title(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map_or_else(String::new, |f| f.to_uppercase().chain(c).collect())
}

/// Four tables (silhouette and Davies-Bouldin for each similarity), one
/// row per metric and linkage with the three algorithms side by side.
pub fn render_markdown(report: &GridReport) -> String {
    let mut s = String::new();
    for (label, pick) in [
        (
            "Silhouette",
            (|r: &GridRow| &r.silhouette) as fn(&GridRow) -> &CellValue,
        ),
        ("Davies-Bouldin index", |r: &GridRow| &r.davies_bouldin),
    ] {
        for sim in SimilarityKind::ALL {
            let _ = writeln!(s, "## {label}, {} similarity\n", title(sim.name()));
            s.push_str("| Combination | K-Means | Agglomerative | Efficient |\n|---|---|---|---|\n");
            for metric in MetricKind::ALL {
                for linkage in Linkage::ALL {
                    let cell = |algo, l| {
                        report
                            .row(sim, metric, algo, l)
                            .map_or_else(|| "-".to_string(), |r| pick(r).to_string())
                    };
                    let _ = writeln!(
                        s,
                        "| {}, {}, {} | {} | {} | {} |",
                        title(sim.name()),
                        title(metric.name()),
                        title(linkage.name()),
                        cell(Algorithm::Kmeans, None),
                        cell(Algorithm::Agnes, Some(linkage)),
                        cell(Algorithm::Efficient, Some(linkage)),
                    );
                }
            }
            s.push('\n');
        }
    }
    s
}
