//! Vocabulary construction with document-frequency pruning and the
//! sparse TF-IDF document-term matrix.
//!
//! Weights are `tf * ln(n / df)` with `tf` the raw term count. There is no
//! smoothing and no row normalization.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::ProcessedDoc;

/// Default `max_df`: terms in more than 80% of documents are dropped.
pub const DEFAULT_MAX_DF: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    df: Vec<usize>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Document frequency of column `col`.
    pub fn df(&self, col: usize) -> usize {
        self.df[col]
    }

    pub fn df_of(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|c| self.df[c])
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn idf(&self, col: usize) -> f64 {
        (self.n_docs as f64 / self.df[col] as f64).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VocabularyOptions {
    pub max_df: f64,
    pub min_df: usize,
}

impl Default for VocabularyOptions {
    fn default() -> Self {
        VocabularyOptions {
            max_df: DEFAULT_MAX_DF,
            min_df: 1,
        }
    }
}

pub fn build_vocabulary(docs: &[ProcessedDoc], max_df: f64) -> Result<Vocabulary> {
    build_vocabulary_with(
        docs,
        VocabularyOptions {
            max_df,
            ..Default::default()
        },
    )
}

/// Keeps the terms with `min_df <= df` and `df / n <= max_df`, in order of
/// first occurrence across the documents.
pub fn build_vocabulary_with(docs: &[ProcessedDoc], opts: VocabularyOptions) -> Result<Vocabulary> {
    if !(opts.max_df > 0.0 && opts.max_df <= 1.0) {
        return Err(Error::InvalidMaxDf(opts.max_df));
    }
    if docs.iter().all(|d| d.terms.is_empty()) {
        return Err(Error::AllDocsEmpty);
    }
    let n = docs.len();

    let mut order: Vec<&str> = Vec::new();
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen_here = std::collections::HashSet::new();
        for t in &doc.terms {
            if seen_here.insert(t.as_str()) {
                let count = df.entry(t.as_str()).or_insert_with(|| {
                    order.push(t.as_str());
                    0
                });
                *count += 1;
            }
        }
    }

    let mut terms = Vec::new();
    let mut kept_df = Vec::new();
    for t in order {
        let f = df[t];
        if f >= opts.min_df && (f as f64 / n as f64) <= opts.max_df {
            terms.push(t.to_string());
            kept_df.push(f);
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary {
        terms,
        df: kept_df,
        index,
        n_docs: n,
    })
}

/// One document's non-zero TF-IDF weights, sorted by column.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    pub entries: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn get(&self, col: usize) -> f64 {
        self.entries
            .binary_search_by_key(&col, |&(c, _)| c)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, other: &SparseRow) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfMatrix {
    pub n_docs: usize,
    pub n_terms: usize,
    pub doc_ids: Vec<String>,
    pub rows: Vec<SparseRow>,
    /// Sorted vocabulary columns present in each document, including
    /// columns whose weight is zero because `df == n`.
    pub term_sets: Vec<Vec<usize>>,
}

impl TfIdfMatrix {
    /// Dense `n_docs x n_terms` copy of the weights.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![0.0; self.n_terms];
                for &(c, w) in &r.entries {
                    v[c] = w;
                }
                v
            })
            .collect()
    }

    pub fn get(&self, doc: usize, col: usize) -> f64 {
        self.rows[doc].get(col)
    }

    /// `doc_id,term,weight` triplets of every stored cell.
    pub fn write_csv<W: Write>(&self, vocab: &Vocabulary, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["doc_id", "term", "weight"])?;
        for (doc_id, row) in self.doc_ids.iter().zip(&self.rows) {
            for &(c, weight) in &row.entries {
                w.write_record([doc_id.as_str(), vocab.terms()[c].as_str(), &weight.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("tfidf.csv", e))?;
        Ok(())
    }
}

pub fn tfidf(docs: &[ProcessedDoc], vocab: &Vocabulary) -> TfIdfMatrix {
    let idf: Vec<f64> = (0..vocab.len()).map(|c| vocab.idf(c)).collect();
    let mut rows = Vec::with_capacity(docs.len());
    let mut term_sets = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: Vec<(usize, usize)> = Vec::new();
        {
            let mut by_col: HashMap<usize, usize> = HashMap::new();
            for t in &doc.terms {
                if let Some(c) = vocab.index_of(t) {
                    *by_col.entry(c).or_default() += 1;
                }
            }
            counts.extend(by_col);
        }
        counts.sort_unstable();
        term_sets.push(counts.iter().map(|&(c, _)| c).collect());
        let entries = counts
            .into_iter()
            .map(|(c, tf)| (c, tf as f64 * idf[c]))
            .filter(|&(_, w)| w > 0.0)
            .collect();
        rows.push(SparseRow { entries });
    }
    TfIdfMatrix {
        n_docs: docs.len(),
        n_terms: vocab.len(),
        doc_ids: docs.iter().map(|d| d.doc_id.clone()).collect(),
        rows,
        term_sets,
    }
}
