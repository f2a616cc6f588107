//! Command-line front end: `run`, `grid`, `elbow` and `report`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cluster::{Init, Linkage, DEFAULT_MAX_ITER};
use crate::error::Result;
use crate::pipeline::{
    elbow_for, run_grid, run_pipeline, run_report, Algorithm, ArtifactWriter, FeatureSpace, GridOptions, OutputFormat,
    Prepared, RunConfig, RunOptions, DEFAULT_K_MAX,
};
use crate::preprocess::StopWords;
use crate::similarity::{MetricKind, SimilarityKind};
use crate::vectorize::{VocabularyOptions, DEFAULT_MAX_DF};

#[derive(Debug, Parser)]
#[command(
    name = "cta-cluster",
    version,
    about = "Cluster cyber threat intelligence reports into actor groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a corpus once and write assignments, scores and group profiles.
    Run(RunArgs),
    /// Score every similarity, metric, linkage and algorithm combination.
    Grid(GridArgs),
    /// Write the K-means WCSS curve and the chosen k.
    Elbow(ElbowArgs),
    /// Build group profiles from an existing assignments file.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory of .txt reports, optionally with a manifest.csv.
    pub corpus: PathBuf,
    /// Manifest to use instead of `CORPUS/manifest.csv`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Stopword file (one word per line) replacing the bundled English list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Drop terms found in more than this fraction of documents.
    #[arg(long, default_value_t = DEFAULT_MAX_DF)]
    pub max_df: f64,
    /// Drop terms found in fewer than this many documents.
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

impl CorpusArgs {
    fn stopwords(&self) -> Result<StopWords> {
        match &self.stopwords {
            Some(p) => StopWords::from_file(p),
            None => Ok(StopWords::english()),
        }
    }

    fn vocabulary_options(&self) -> VocabularyOptions {
        VocabularyOptions {
            max_df: self.max_df,
            min_df: self.min_df,
        }
    }
}

#[derive(Debug, Args)]
pub struct KMeansArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    #[arg(long, default_value_t = 2.0)]
    pub minkowski_p: f64,
    /// Vectors clustered by K-means and AGNES.
    #[arg(long, value_enum, default_value_t = FeatureSpace::DistanceRows)]
    pub kmeans_space: FeatureSpace,
    #[arg(long, value_enum, default_value_t = Init::RandomRows)]
    pub init: Init,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub kmeans: KMeansArgs,
    #[arg(long, value_enum, default_value_t = SimilarityKind::Cosine)]
    pub similarity: SimilarityKind,
    #[arg(long, value_enum, default_value_t = MetricKind::Euclidean)]
    pub metric: MetricKind,
    /// Defaults to single for agnes and efficient.
    #[arg(long, value_enum)]
    pub linkage: Option<Linkage>,
    #[arg(long = "algo", value_enum, default_value_t = Algorithm::Efficient)]
    pub algorithm: Algorithm,
    /// Number of clusters; chosen by the elbow method when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    /// Middle-level K-means clusters for the efficient algorithm.
    #[arg(long)]
    pub k_mid: Option<usize>,
    /// Groups cut from the hierarchy; defaults to k.
    #[arg(long)]
    pub cut: Option<usize>,
    /// Record wall-clock time in scores.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub kmeans: KMeansArgs,
    /// Fixed k for every cell instead of one elbow scan per block.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub cut: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ElbowArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub kmeans: KMeansArgs,
    #[arg(long, value_enum, default_value_t = SimilarityKind::Cosine)]
    pub similarity: SimilarityKind,
    #[arg(long, value_enum, default_value_t = MetricKind::Euclidean)]
    pub metric: MetricKind,
    /// Override the automatic choice.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// `doc_id,cluster` file, e.g. from `run`.
    #[arg(long)]
    pub assignments: PathBuf,
}

impl RunArgs {
    pub fn config(&self) -> RunConfig {
        let linkage = self
            .linkage
            .or_else(|| self.algorithm.is_hierarchical().then_some(Linkage::Single));
        RunConfig {
            similarity: self.similarity,
            metric: self.metric,
            minkowski_p: self.kmeans.minkowski_p,
            linkage,
            algorithm: self.algorithm,
            k: self.k,
            k_mid: self.k_mid,
            k_max: self.kmeans.k_max,
            max_df: self.corpus.max_df,
            min_df: self.corpus.min_df,
            seed: self.kmeans.seed,
            cut_clusters: self.cut,
            feature_space: self.kmeans.kmeans_space,
            init: self.kmeans.init,
            max_iter: self.kmeans.max_iter,
        }
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let opts = RunOptions {
        manifest: args.corpus.manifest.clone(),
        stopwords: args.corpus.stopwords()?,
        format: args.corpus.format,
        timings: args.timings,
    };
    let report = run_pipeline(&args.corpus.corpus, &args.config(), &opts, &args.corpus.out)?;
    let s = &report.scores;
    println!(
        "{} groups (k = {}, {:?}); silhouette {}, Davies-Bouldin {}; artifacts in {}",
        s.n_clusters,
        s.k,
        s.k_source,
        s.silhouette,
        s.davies_bouldin,
        args.corpus.out.display()
    );
    Ok(())
}

fn grid(args: &GridArgs) -> Result<()> {
    let opts = GridOptions {
        seed: args.kmeans.seed,
        jobs: args.jobs,
        k: args.k,
        k_max: args.kmeans.k_max,
        max_df: args.corpus.max_df,
        min_df: args.corpus.min_df,
        minkowski_p: args.kmeans.minkowski_p,
        cut: args.cut,
        feature_space: args.kmeans.kmeans_space,
        init: args.kmeans.init,
        max_iter: args.kmeans.max_iter,
        stopwords: args.corpus.stopwords()?,
        manifest: args.corpus.manifest.clone(),
        timings: args.timings,
    };
    let check = RunConfig {
        metric: MetricKind::Minkowski,
        k: args.k,
        k_max: opts.k_max,
        max_df: opts.max_df,
        minkowski_p: opts.minkowski_p,
        cut_clusters: opts.cut,
        max_iter: opts.max_iter,
        ..RunConfig::default()
    };
    check.validate()?;
    let report = run_grid(&args.corpus.corpus, &opts)?;
    report.write(&args.corpus.out, args.corpus.format)?;
    println!(
        "{} grid rows written to {}",
        report.rows.len(),
        args.corpus.out.display()
    );
    Ok(())
}

fn elbow(args: &ElbowArgs) -> Result<()> {
    let cfg = RunConfig {
        similarity: args.similarity,
        metric: args.metric,
        minkowski_p: args.kmeans.minkowski_p,
        linkage: None,
        algorithm: Algorithm::Kmeans,
        k_max: args.kmeans.k_max,
        max_df: args.corpus.max_df,
        min_df: args.corpus.min_df,
        seed: args.kmeans.seed,
        feature_space: args.kmeans.kmeans_space,
        init: args.kmeans.init,
        max_iter: args.kmeans.max_iter,
        ..RunConfig::default()
    };
    cfg.validate()?;
    let prep = Prepared::load(
        &args.corpus.corpus,
        args.corpus.manifest.as_deref(),
        &args.corpus.stopwords()?,
        cfg.vocabulary_options(),
    )?;
    let dist = prep.distances(cfg.similarity)?;
    let mut scan = elbow_for(&prep.features(&dist, cfg.feature_space)?, &cfg)?;
    if let Some(k) = args.k {
        scan = scan.with_manual_k(k)?;
    }
    write_elbow(&scan, &args.corpus.out, args.corpus.format)?;
    println!("chosen k = {} ({:?})", scan.chosen_k, scan.method);
    Ok(())
}

fn write_elbow(scan: &crate::cluster::ElbowScan, out: &Path, format: OutputFormat) -> Result<()> {
    let mut w = ArtifactWriter::new(out)?;
    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            scan.write_csv(&mut buf)?;
            w.bytes("elbow.csv", &buf)?;
        }
        OutputFormat::Json => {
            let mut json = serde_json::to_vec_pretty(scan)?;
            json.push(b'\n');
            w.bytes("elbow.json", &json)?;
        }
    }
    w.commit()?;
    Ok(())
}

fn report(args: &ReportArgs) -> Result<()> {
    let profiles = run_report(
        &args.corpus.corpus,
        args.corpus.manifest.as_deref(),
        &args.assignments,
        &args.corpus.stopwords()?,
        args.corpus.vocabulary_options(),
        args.corpus.format,
        &args.corpus.out,
    )?;
    println!("{} groups written to {}", profiles.len(), args.corpus.out.display());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => run(a),
        Command::Grid(a) => grid(a),
        Command::Elbow(a) => elbow(a),
        Command::Report(a) => report(a),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Diagnostics go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
