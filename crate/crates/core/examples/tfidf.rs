// Build a vocabulary and TF-IDF weights for a tiny corpus.

use std::error::Error;

use cta_cluster::corpus::{Corpus, Document};
use cta_cluster::preprocess::{preprocess_corpus, StopWords};
use cta_cluster::vectorize::{build_vocabulary, tfidf, DEFAULT_MAX_DF};

fn doc(id: &str, text: &str) -> Document {
    Document {
        doc_id: id.into(),
        actor_label: None,
        source: None,
        published_date: None,
        text: text.into(),
    }
}

fn main() -> Result<(), Box<dyn Error>> {
    let corpus = Corpus::from_documents(
        vec![
            doc("d1", "apt malware malware"),
            doc("d2", "apt phishing"),
            doc("d3", "apt scan"),
            doc("d4", "apt exploit"),
        ],
        ".",
    )?;
    let docs = preprocess_corpus(&corpus, &StopWords::english())?;
    // "apt" appears everywhere and is pruned by max_df
    let vocab = build_vocabulary(&docs, DEFAULT_MAX_DF)?;
    println!("vocabulary: {:?}", vocab.terms());

    let m = tfidf(&docs, &vocab);
    m.write_csv(&vocab, std::io::stdout())?;
    Ok(())
}
