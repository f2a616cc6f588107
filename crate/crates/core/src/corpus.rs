//! Loading a directory of plain-text reports into an in-memory [`Corpus`].
//!
//! Layout: `<dir>/*.txt` plus an optional `<dir>/manifest.csv` with header
//! `doc_id,actor,source,published_date,filename`. With a manifest, documents
//! follow manifest row order; without one, lexicographic filename order and
//! `doc_id` is the file stem.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub actor_label: Option<String>,
    pub source: Option<String>,
    pub published_date: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    source_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub doc_id: String,
    #[serde(default)]
    pub actor: String,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub published_date: String,
    pub filename: String,
}

impl Corpus {
    /// Builds a corpus from already-loaded documents, checking the id and
    /// non-empty text invariants.
    pub fn from_documents(documents: Vec<Document>, source_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.doc_id.is_empty() {
                return Err(Error::DuplicateId(String::new()));
            }
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::DuplicateId(doc.doc_id.clone()));
            }
            if doc.text.trim().is_empty() {
                return Err(Error::EmptyDocument(doc.doc_id.clone()));
            }
        }
        Ok(Corpus {
            documents,
            source_dir: source_dir.into(),
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn source_dir(&self) -> &Path {
        &self.source_dir
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn doc_ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.doc_id.clone()).collect()
    }

    /// Manifest rows describing this corpus. Writing them next to the text
    /// files and reloading reproduces the same order and ids.
    pub fn manifest_rows(&self, filenames: &[String]) -> Vec<ManifestRow> {
        self.documents
            .iter()
            .zip(filenames)
            .map(|(d, f)| ManifestRow {
                doc_id: d.doc_id.clone(),
                actor: d.actor_label.clone().unwrap_or_default(),
                source: d.source.clone().unwrap_or_default(),
                published_date: d.published_date.clone().unwrap_or_default(),
                filename: f.clone(),
            })
            .collect()
    }
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Loads `dir`. `manifest` defaults to `<dir>/manifest.csv` when that file
/// exists; pass an explicit path to use a manifest stored elsewhere.
pub fn load_corpus(dir: &Path, manifest: Option<&Path>) -> Result<Corpus> {
    if !dir.is_dir() {
        return Err(Error::MissingDir(dir.to_path_buf()));
    }
    let default_manifest = dir.join(MANIFEST_FILE);
    let manifest = match manifest {
        Some(m) => Some(m.to_path_buf()),
        None if default_manifest.is_file() => Some(default_manifest),
        None => None,
    };

    let documents = match manifest {
        Some(path) => load_with_manifest(dir, &path)?,
        None => load_plain(dir)?,
    };
    Corpus::from_documents(documents, dir)
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|_| Error::NonUtf8(path.to_path_buf()))
}

fn non_empty(s: String) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

fn load_with_manifest(dir: &Path, manifest: &Path) -> Result<Vec<Document>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(manifest)
        .map_err(|e| Error::Manifest {
            path: manifest.to_path_buf(),
            reason: e.to_string(),
        })?;
    let mut docs = Vec::new();
    for row in reader.deserialize::<ManifestRow>() {
        let row = row.map_err(|e| Error::Manifest {
            path: manifest.to_path_buf(),
            reason: e.to_string(),
        })?;
        if row.doc_id.is_empty() || row.filename.is_empty() {
            return Err(Error::Manifest {
                path: manifest.to_path_buf(),
                reason: "doc_id and filename are required".into(),
            });
        }
        let path = dir.join(&row.filename);
        if !path.is_file() {
            return Err(Error::MissingFile(path));
        }
        docs.push(Document {
            text: read_text(&path)?,
            doc_id: row.doc_id,
            actor_label: non_empty(row.actor),
            source: non_empty(row.source),
            published_date: non_empty(row.published_date),
        });
    }
    Ok(docs)
}

fn load_plain(dir: &Path) -> Result<Vec<Document>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let doc_id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Document {
                text: read_text(&path)?,
                doc_id,
                actor_label: None,
                source: None,
                published_date: None,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &[u8]) {
        fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn lexicographic_order_without_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "b.txt", b"beta");
        write(tmp.path(), "a.txt", b"alpha");
        write(tmp.path(), "notes.md", b"ignored");
        let corpus = load_corpus(tmp.path(), None).unwrap();
        assert_eq!(corpus.doc_ids(), vec!["a", "b"]);
        assert_eq!(corpus.documents()[0].text, "alpha");
        assert!(corpus.documents()[0].actor_label.is_none());
    }

    #[test]
    fn manifest_order_wins() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.txt", b"alpha");
        write(tmp.path(), "b.txt", b"beta");
        write(
            tmp.path(),
            MANIFEST_FILE,
            b"doc_id,actor,source,published_date,filename\nr1,APT28,,2020-01-02,b.txt\nr2,,vendor,,a.txt\n",
        );
        let corpus = load_corpus(tmp.path(), None).unwrap();
        assert_eq!(corpus.doc_ids(), vec!["r1", "r2"]);
        assert_eq!(corpus.documents()[0].text, "beta");
        assert_eq!(corpus.documents()[0].actor_label.as_deref(), Some("APT28"));
        assert_eq!(corpus.documents()[0].published_date.as_deref(), Some("2020-01-02"));
        assert_eq!(corpus.documents()[1].source.as_deref(), Some("vendor"));
    }

    #[test]
    fn missing_manifest_file() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.txt", b"alpha");
        write(
            tmp.path(),
            MANIFEST_FILE,
            b"doc_id,actor,source,published_date,filename\nr1,,,,c.txt\n",
        );
        assert!(matches!(load_corpus(tmp.path(), None), Err(Error::MissingFile(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.txt", b"alpha");
        write(tmp.path(), "b.txt", b"beta");
        write(
            tmp.path(),
            MANIFEST_FILE,
            b"doc_id,actor,source,published_date,filename\nr1,,,,a.txt\nr1,,,,b.txt\n",
        );
        assert!(matches!(load_corpus(tmp.path(), None), Err(Error::DuplicateId(id)) if id == "r1"));
    }

    #[test]
    fn empty_and_non_utf8_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.txt", b"  \n\t ");
        assert!(matches!(load_corpus(tmp.path(), None), Err(Error::EmptyDocument(_))));

        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "a.txt", &[0x66, 0xff, 0xfe]);
        assert!(matches!(load_corpus(tmp.path(), None), Err(Error::NonUtf8(_))));
    }

    #[test]
    fn manifest_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "x.txt", b"one");
        write(tmp.path(), "y.txt", b"two");
        write(tmp.path(), "z.txt", b"three");
        let first = load_corpus(tmp.path(), None).unwrap();
        let names: Vec<String> = ["x.txt", "y.txt", "z.txt"].iter().map(|s| s.to_string()).collect();
        write_manifest(&tmp.path().join(MANIFEST_FILE), &first.manifest_rows(&names)).unwrap();
        let second = load_corpus(tmp.path(), None).unwrap();
        assert_eq!(first, second);
    }
}
