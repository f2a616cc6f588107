use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArtifactWriter, OutputFormat, Prepared};
use crate::cluster::{FlatClustering, Provenance};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::preprocess::StopWords;
use crate::vectorize::{TfIdfMatrix, Vocabulary, VocabularyOptions};

/// Terms listed per group.
pub const TOP_TERMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupProfile {
    pub group_id: usize,
    /// Distinct actor labels of the members, sorted.
    pub actor_labels: Vec<String>,
    pub doc_ids: Vec<String>,
    /// Summed member TF-IDF weight, highest first; ties by term.
    pub top_terms: Vec<(String, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GroupRow<'a> {
    group_id: usize,
    doc_id: &'a str,
    actor: &'a str,
}

#[derive(Debug, Serialize)]
struct TermRow<'a> {
    group_id: usize,
    rank: usize,
    term: &'a str,
    weight: f64,
}

#[derive(Debug, Deserialize)]
struct AssignmentRow {
    doc_id: String,
    cluster: usize,
}

pub fn export_groups(
    clustering: &FlatClustering,
    corpus: &Corpus,
    tfidf: &TfIdfMatrix,
    vocab: &Vocabulary,
) -> Result<Vec<GroupProfile>> {
    if clustering.len() != corpus.len() || tfidf.n_docs != corpus.len() {
        return Err(Error::LabelMismatch {
            labels: clustering.len(),
            points: corpus.len(),
        });
    }
    let docs = corpus.documents();
    Ok(clustering
        .members()
        .into_iter()
        .enumerate()
        .map(|(group_id, members)| {
            let actor_labels: BTreeSet<String> = members.iter().filter_map(|&i| docs[i].actor_label.clone()).collect();
            let mut totals: HashMap<usize, f64> = HashMap::new();
            for &i in &members {
                for &(c, w) in &tfidf.rows[i].entries {
                    *totals.entry(c).or_default() += w;
                }
            }
            let mut terms: Vec<(String, f64)> = totals
                .into_iter()
                .filter(|&(_, w)| w > 0.0)
                .map(|(c, w)| (vocab.terms()[c].clone(), w))
                .collect();
            terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            terms.truncate(TOP_TERMS);
            GroupProfile {
                group_id,
                actor_labels: actor_labels.into_iter().collect(),
                doc_ids: members.iter().map(|&i| docs[i].doc_id.clone()).collect(),
                top_terms: terms,
            }
        })
        .collect())
}

pub(crate) fn stage_profiles(
    w: &mut ArtifactWriter,
    profiles: &[GroupProfile],
    corpus: &Corpus,
    format: OutputFormat,
) -> Result<()> {
    let actor_of: HashMap<&str, &str> = corpus
        .documents()
        .iter()
        .map(|d| (d.doc_id.as_str(), d.actor_label.as_deref().unwrap_or("")))
        .collect();
    let groups: Vec<GroupRow> = profiles
        .iter()
        .flat_map(|p| {
            p.doc_ids.iter().map(|d| GroupRow {
                group_id: p.group_id,
                doc_id: d,
                actor: actor_of[d.as_str()],
            })
        })
        .collect();
    w.table("groups", &groups, format)?;
    let terms: Vec<TermRow> = profiles
        .iter()
        .flat_map(|p| {
            p.top_terms.iter().enumerate().map(|(r, (t, wt))| TermRow {
                group_id: p.group_id,
                rank: r + 1,
                term: t,
                weight: *wt,
            })
        })
        .collect();
    w.table("top_terms", &terms, format)
}

pub fn render_groups_markdown(profiles: &[GroupProfile]) -> String {
    let mut s = String::from("# Groups\n");
    for p in profiles {
        let actors = if p.actor_labels.is_empty() {
            "(unlabelled)".to_string()
        } else {
            p.actor_labels.join(", ")
        };
        let _ = write!(s, "\n## Group {}\n\n", p.group_id);
        let _ = writeln!(s, "- documents ({}): {}", p.doc_ids.len(), p.doc_ids.join(", "));
        let _ = writeln!(s, "- actors: {actors}");
        let terms: Vec<&str> = p.top_terms.iter().map(|(t, _)| t.as_str()).collect();
        let _ = writeln!(s, "- top terms: {}", terms.join(", "));
    }
    s
}

/// Reads `doc_id,cluster` rows and aligns them with the corpus order.
pub fn read_assignments(path: &Path, corpus: &Corpus) -> Result<FlatClustering> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    })?;
    let mut by_id = HashMap::new();
    for row in rdr.deserialize() {
        let row: AssignmentRow = row?;
        if by_id.insert(row.doc_id.clone(), row.cluster).is_some() {
            return Err(Error::DuplicateId(row.doc_id));
        }
    }
    let labels = corpus
        .documents()
        .iter()
        .map(|d| {
            by_id
                .get(&d.doc_id)
                .copied()
                .ok_or_else(|| Error::Config(format!("{} has no row for `{}`", path.display(), d.doc_id)))
        })
        .collect::<Result<Vec<_>>>()?;
    if by_id.len() != labels.len() {
        return Err(Error::LabelMismatch {
            labels: by_id.len(),
            points: labels.len(),
        });
    }
    Ok(FlatClustering::new(&labels, Provenance::AgnesCut))
}

/// Rebuilds TF-IDF for the corpus and writes `groups`, `top_terms` and
/// `groups.md` for an existing assignment file.
pub fn run_report(
    corpus_dir: &Path,
    manifest: Option<&Path>,
    assignments: &Path,
    stopwords: &StopWords,
    opts: VocabularyOptions,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<GroupProfile>> {
    let prep = Prepared::load(corpus_dir, manifest, stopwords, opts)?;
    let clustering = read_assignments(assignments, &prep.corpus)?;
    let profiles = export_groups(&clustering, &prep.corpus, &prep.tfidf, &prep.vocab)?;
    let mut w = ArtifactWriter::new(out_dir)?;
    stage_profiles(&mut w, &profiles, &prep.corpus, format)?;
    w.bytes("groups.md", render_groups_markdown(&profiles).as_bytes())?;
    w.commit()?;
    Ok(profiles)
}
