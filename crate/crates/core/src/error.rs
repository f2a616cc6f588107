use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // ingest
    #[error("corpus directory {0} does not exist or is not a directory")]
    MissingDir(PathBuf),
    #[error("manifest references missing file {0}")]
    MissingFile(PathBuf),
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("document `{0}` is empty")]
    EmptyDocument(String),
    #[error("file {0} is not valid UTF-8")]
    NonUtf8(PathBuf),
    #[error("malformed manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    // preprocess / vectorize
    #[error("every document reduced to zero terms after preprocessing")]
    AllDocsEmpty,
    #[error("vocabulary is empty after document-frequency filtering")]
    EmptyVocabulary,
    #[error("max_df must lie in (0, 1], got {0}")]
    InvalidMaxDf(f64),

    // similarity
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("minkowski exponent must be >= 1, got {0}")]
    InvalidP(f64),
    #[error("need at least 2 documents, got {0}")]
    TooFewDocuments(usize),

    // cluster
    #[error("k = {k} is outside [1, {n}]")]
    KTooLarge { k: usize, n: usize },
    #[error("k_max = {k_max} is outside [2, {n}]")]
    InvalidKMax { k_max: usize, n: usize },
    #[error("stop = {stop} is outside [1, {n}]")]
    InvalidStop { stop: usize, n: usize },
    #[error("cannot cut a dendrogram over {n_leaves} leaves ({merges} merges) into {requested} clusters")]
    InvalidCut {
        requested: usize,
        n_leaves: usize,
        merges: usize,
    },
    #[error("centroid linkage is not applicable to the efficient hybrid")]
    CentroidLinkageNotApplicable,

    // evaluate
    #[error("validity index undefined for {n_clusters} clusters over {n} points")]
    DegenerateClustering { n_clusters: usize, n: usize },
    #[error("label vector has {labels} entries but there are {points} points")]
    LabelMismatch { labels: usize, points: usize },

    // pipeline
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 usage/config, 2 corpus/ingest, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidMaxDf(_) | Error::InvalidP(_) | Error::CentroidLinkageNotApplicable => 1,
            Error::MissingDir(_)
            | Error::MissingFile(_)
            | Error::DuplicateId(_)
            | Error::EmptyDocument(_)
            | Error::NonUtf8(_)
            | Error::Manifest { .. }
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}
