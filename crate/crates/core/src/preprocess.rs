//! Tokenization, stopword removal and Porter2 stemming.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

const BUNDLED_STOPWORDS: &str = include_str!("../assets/stopwords_en.txt");

/// Shortest token (and stem) kept by the pipeline.
pub const MIN_TOKEN_LEN: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessedDoc {
    pub doc_id: String,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    /// The bundled English list (179 entries).
    pub fn english() -> Self {
        Self::parse(BUNDLED_STOPWORDS)
    }

    pub fn empty() -> Self {
        StopWords(HashSet::new())
    }

    /// One word per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Self {
        StopWords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, word: impl Into<String>) {
        self.0.insert(word.into().to_lowercase());
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::english()
    }
}

/// Lowercases and splits on every character outside `[A-Za-z0-9]`,
/// dropping fragments shorter than [`MIN_TOKEN_LEN`].
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| t.len() >= MIN_TOKEN_LEN)
        .map(|t| t.to_ascii_lowercase())
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &StopWords) -> Vec<String> {
    tokens.into_iter().filter(|t| !stopwords.contains(t)).collect()
}

fn english_stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Porter2 (English Snowball) stem.
pub fn stem(token: &str) -> String {
    english_stemmer().stem(token).into_owned()
}

/// tokenize, then drop stopwords, then stem. Stems shorter than
/// [`MIN_TOKEN_LEN`] are discarded (Porter2 can shorten "ued" to "u").
pub fn preprocess_text(text: &str, stopwords: &StopWords) -> Vec<String> {
    remove_stopwords(tokenize(text), stopwords)
        .iter()
        .map(|t| stem(t))
        .filter(|s| s.len() >= MIN_TOKEN_LEN)
        .collect()
}

pub fn preprocess_corpus(corpus: &Corpus, stopwords: &StopWords) -> Result<Vec<ProcessedDoc>> {
    let docs: Vec<ProcessedDoc> = corpus
        .documents()
        .par_iter()
        .map(|d| ProcessedDoc {
            doc_id: d.doc_id.clone(),
            terms: preprocess_text(&d.text, stopwords),
        })
        .collect();
    for d in docs.iter().filter(|d| d.terms.is_empty()) {
        log::warn!("document `{}` has no terms after preprocessing", d.doc_id);
    }
    if docs.iter().all(|d| d.terms.is_empty()) {
        return Err(Error::AllDocsEmpty);
    }
    Ok(docs)
}
