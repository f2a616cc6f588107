//! Document similarity (cosine, Jaccard), the document [`DistanceMatrix`],
//! and the feature-space metrics used by the clustering engines.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vectorize::{SparseRow, TfIdfMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    Cosine,
    Jaccard,
}

impl SimilarityKind {
    pub const ALL: [SimilarityKind; 2] = [SimilarityKind::Cosine, SimilarityKind::Jaccard];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityKind::Cosine => "cosine",
            SimilarityKind::Jaccard => "jaccard",
        }
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Manhattan,
    Canberra,
    Minkowski,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Euclidean,
        MetricKind::Manhattan,
        MetricKind::Canberra,
        MetricKind::Minkowski,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Manhattan => "manhattan",
            MetricKind::Canberra => "canberra",
            MetricKind::Minkowski => "minkowski",
        }
    }

    /// Resolves to a [`Metric`]; `p` is only read for Minkowski.
    pub fn with_p(self, p: f64) -> Result<Metric> {
        Ok(match self {
            MetricKind::Euclidean => Metric::Euclidean,
            MetricKind::Manhattan => Metric::Manhattan,
            MetricKind::Canberra => Metric::Canberra,
            MetricKind::Minkowski => Metric::minkowski(p)?,
        })
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A distance between dense feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    Manhattan,
    Canberra,
    Minkowski { p: f64 },
}

impl Metric {
    pub fn minkowski(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidP(p));
        }
        Ok(Metric::Minkowski { p })
    }

    pub fn kind(self) -> MetricKind {
        match self {
            Metric::Euclidean => MetricKind::Euclidean,
            Metric::Manhattan => MetricKind::Manhattan,
            Metric::Canberra => MetricKind::Canberra,
            Metric::Minkowski { .. } => MetricKind::Minkowski,
        }
    }

    /// Distance without the dimension check. Minkowski with `p` of exactly
    /// 1 or 2 goes through the Manhattan / Euclidean kernels so the results
    /// are bit-identical.
    pub fn eval(self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self {
            Metric::Euclidean => euclidean(x, y),
            Metric::Manhattan => manhattan(x, y),
            Metric::Canberra => canberra(x, y),
            Metric::Minkowski { p: 2.0 } => euclidean(x, y),
            Metric::Minkowski { p: 1.0 } => manhattan(x, y),
            Metric::Minkowski { p } => minkowski_general(x, y, p),
        }
    }
}

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn manhattan(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

fn canberra(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let den = a.abs() + b.abs();
            if den == 0.0 {
                0.0
            } else {
                (a - b).abs() / den
            }
        })
        .sum()
}

pub(crate) fn minkowski_general(x: &[f64], y: &[f64], p: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub fn metric_distance(x: &[f64], y: &[f64], metric: Metric) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    if let Metric::Minkowski { p } = metric {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidP(p));
        }
    }
    Ok(metric.eval(x, y))
}

/// Cosine similarity of two sparse rows; 0 when either row is all-zero.
pub fn cosine_similarity(u: &SparseRow, v: &SparseRow) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    u.dot(v) / (nu * nv)
}

/// Cosine similarity of dense vectors; 0 when either vector is all-zero.
pub fn cosine_similarity_dense(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (nu * nv))
}

/// `|A ∩ B| / |A ∪ B|` over sorted, deduplicated id sets. `J(∅, ∅) = 1`.
pub fn jaccard_similarity<T: Ord>(a: &[T], b: &[T]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Symmetric `n x n` matrix of document distances `1 - similarity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    kind: SimilarityKind,
    doc_ids: Vec<String>,
}

impl DistanceMatrix {
    /// Wraps a precomputed square matrix. The upper triangle is mirrored
    /// onto the lower one and the diagonal forced to zero.
    pub fn from_square(rows: Vec<Vec<f64>>, kind: SimilarityKind, doc_ids: Vec<String>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(bad.len(), n));
        }
        if doc_ids.len() != n {
            return Err(Error::DimensionMismatch(doc_ids.len(), n));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                data[i * n + j] = rows[i][j];
                data[j * n + i] = rows[i][j];
            }
        }
        Ok(DistanceMatrix { n, data, kind, doc_ids })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    /// Square CSV with a doc_id header row and column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::from("doc_id")];
        header.extend(self.doc_ids.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.doc_ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.row(i).iter().map(|d| d.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("distance.csv", e))?;
        Ok(())
    }
}

pub fn distance_matrix(m: &TfIdfMatrix, kind: SimilarityKind) -> Result<DistanceMatrix> {
    let n = m.n_docs;
    if n < 2 {
        return Err(Error::TooFewDocuments(n));
    }
    match kind {
        SimilarityKind::Cosine => {
            for (id, row) in m.doc_ids.iter().zip(&m.rows) {
                if row.is_empty() {
                    log::warn!("document `{id}` has an all-zero TF-IDF row; cosine similarity set to 0");
                }
            }
        }
        SimilarityKind::Jaccard => {
            if m.term_sets.iter().filter(|s| s.is_empty()).count() > 1 {
                log::warn!("several documents have no vocabulary terms; J(empty, empty) = 1");
            }
        }
    }
    // Each entry is computed independently so the result does not depend on
    // how rows are split across threads.
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        return 0.0;
                    }
                    let sim = match kind {
                        SimilarityKind::Cosine => cosine_similarity(&m.rows[i], &m.rows[j]),
                        SimilarityKind::Jaccard => jaccard_similarity(&m.term_sets[i], &m.term_sets[j]),
                    };
                    (1.0 - sim).clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect();
    DistanceMatrix::from_square(upper, kind, m.doc_ids.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::ProcessedDoc;
    use crate::vectorize::{build_vocabulary, tfidf};
    use proptest::prelude::*;

    fn row(entries: &[(usize, f64)]) -> SparseRow {
        SparseRow {
            entries: entries.to_vec(),
        }
    }

    #[test]
    fn cosine_examples() {
        let u = row(&[(0, 1.0), (1, 2.0), (2, 3.0)]);
        let v = row(&[(0, 4.0), (1, 5.0), (2, 6.0)]);
        let expected = 32.0 / (14.0f64 * 77.0).sqrt();
        assert!((cosine_similarity(&u, &v) - expected).abs() < 1e-15);
        assert!((expected - 0.974632).abs() < 1e-6);
        assert!((cosine_similarity(&u, &u) - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&row(&[(0, 1.0)]), &row(&[(1, 1.0)])), 0.0);
        assert_eq!(cosine_similarity(&row(&[]), &u), 0.0);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard_similarity(&["a", "b", "c"], &["b", "c", "d"]), 0.5);
        assert_eq!(jaccard_similarity(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(jaccard_similarity(&[1, 2], &[3]), 0.0);
        assert_eq!(jaccard_similarity::<u8>(&[], &[]), 1.0);
    }

    #[test]
    fn metric_examples() {
        let (x, y) = ([0.0, 0.0], [3.0, 4.0]);
        assert_eq!(metric_distance(&x, &y, Metric::Euclidean).unwrap(), 5.0);
        assert_eq!(metric_distance(&x, &y, Metric::Manhattan).unwrap(), 7.0);
        assert_eq!(metric_distance(&x, &y, Metric::Canberra).unwrap(), 2.0);
        let m3 = metric_distance(&x, &y, Metric::minkowski(3.0).unwrap()).unwrap();
        assert!((m3 - 91f64.cbrt()).abs() < 1e-12);
        for m in [
            Metric::Euclidean,
            Metric::Manhattan,
            Metric::Canberra,
            Metric::Minkowski { p: 3.0 },
        ] {
            assert_eq!(metric_distance(&y, &y, m).unwrap(), 0.0);
        }
        assert!(matches!(
            metric_distance(&[1.0], &[1.0, 2.0], Metric::Euclidean),
            Err(Error::DimensionMismatch(1, 2))
        ));
        assert!(matches!(Metric::minkowski(0.5), Err(Error::InvalidP(_))));
        assert!(matches!(
            metric_distance(&x, &y, Metric::Minkowski { p: 0.0 }),
            Err(Error::InvalidP(_))
        ));
    }

    #[test]
    fn canberra_zero_denominator_terms() {
        let d = metric_distance(&[0.0, 1.0], &[0.0, 3.0], Metric::Canberra).unwrap();
        assert_eq!(d, 0.5);
    }

    fn docs(texts: &[&str]) -> Vec<ProcessedDoc> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| ProcessedDoc {
                doc_id: format!("d{i}"),
                terms: t.split_whitespace().map(String::from).collect(),
            })
            .collect()
    }

    #[test]
    fn distance_matrix_small_corpus() {
        // df: malware=2, loader=1, wiper=1, scada=1 over n=3.
        let d = docs(&["malware loader", "malware loader", "wiper scada"]);
        let v = build_vocabulary(&d, 1.0).unwrap();
        let m = tfidf(&d, &v);
        let cos = distance_matrix(&m, SimilarityKind::Cosine).unwrap();
        assert!(cos.get(0, 1).abs() < 1e-15);
        assert_eq!(cos.get(0, 2), 1.0);
        assert_eq!(cos.get(2, 2), 0.0);

        let d = docs(&["malware loader", "malware wiper", "scada"]);
        let v = build_vocabulary(&d, 1.0).unwrap();
        let m = tfidf(&d, &v);
        let cos = distance_matrix(&m, SimilarityKind::Cosine).unwrap();
        // w(malware) = ln(3/2), w(loader) = w(wiper) = ln 3
        let (a, b) = ((1.5f64).ln(), 3f64.ln());
        let expected = 1.0 - a * a / (a * a + b * b);
        assert!((cos.get(0, 1) - expected).abs() < 1e-12);
        assert_eq!(cos.get(1, 2), 1.0);
        let jac = distance_matrix(&m, SimilarityKind::Jaccard).unwrap();
        assert!((jac.get(0, 1) - (1.0 - 1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(jac.get(0, 2), 1.0);
    }

    #[test]
    fn too_few_documents() {
        let d = docs(&["a b"]);
        let v = build_vocabulary(&d, 1.0).unwrap();
        let m = tfidf(&d, &v);
        assert!(matches!(
            distance_matrix(&m, SimilarityKind::Cosine),
            Err(Error::TooFewDocuments(1))
        ));
    }

    fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..12).prop_flat_map(|d| {
            (
                prop::collection::vec(-50.0f64..50.0, d),
                prop::collection::vec(-50.0f64..50.0, d),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn minkowski_two_is_euclidean((x, y) in vec_pair()) {
            let e = metric_distance(&x, &y, Metric::Euclidean).unwrap();
            let m = metric_distance(&x, &y, Metric::minkowski(2.0).unwrap()).unwrap();
            prop_assert_eq!(e.to_bits(), m.to_bits());
            // The general power path agrees too.
            prop_assert!((minkowski_general(&x, &y, 2.0) - e).abs() <= 1e-12 * e.max(1.0));
        }

        #[test]
        fn cosine_scale_invariant(
            entries in prop::collection::btree_map(0usize..20, 0.01f64..10.0, 1..10),
            other in prop::collection::btree_map(0usize..20, 0.01f64..10.0, 1..10),
            alpha in 0.01f64..100.0,
        ) {
            let u = SparseRow { entries: entries.into_iter().collect() };
            let v = SparseRow { entries: other.into_iter().collect() };
            let scaled = SparseRow { entries: u.entries.iter().map(|&(c, w)| (c, w * alpha)).collect() };
            let s = cosine_similarity(&u, &v);
            prop_assert!((s - cosine_similarity(&scaled, &v)).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        }

        #[test]
        fn jaccard_ignores_multiplicity(
            a in prop::collection::vec("[a-e]", 1..8),
            b in prop::collection::vec("[a-e]", 1..8),
        ) {
            let mut doubled = a.clone();
            doubled.extend(a.iter().cloned());
            let texts = [a.join(" "), b.join(" "), doubled.join(" "), "zz".to_string()];
            let d = docs(&texts.iter().map(String::as_str).collect::<Vec<_>>());
            let v = build_vocabulary(&d, 1.0).unwrap();
            let m = tfidf(&d, &v);
            let dm = distance_matrix(&m, SimilarityKind::Jaccard).unwrap();
            prop_assert_eq!(dm.get(0, 1), dm.get(2, 1));
        }

        #[test]
        fn distance_matrix_invariants(texts in prop::collection::vec("[a-f]( [a-f]){0,6}", 2..10)) {
            let d = docs(&texts.iter().map(String::as_str).collect::<Vec<_>>());
            let v = build_vocabulary(&d, 1.0).unwrap();
            let m = tfidf(&d, &v);
            for kind in SimilarityKind::ALL {
                let dm = distance_matrix(&m, kind).unwrap();
                for i in 0..dm.n() {
                    prop_assert_eq!(dm.get(i, i), 0.0);
                    for j in 0..dm.n() {
                        prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                        prop_assert!((0.0..=1.0).contains(&dm.get(i, j)));
                    }
                }
            }
        }
    }
}
